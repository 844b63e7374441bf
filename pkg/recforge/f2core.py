"""
Arithmetic and enumeration in F₂^d.

Vectors are d-bit integers (bit i is coordinate i) and addition is XOR.
Whole-space computations use numpy boolean masks of length 2^d indexed by
the integer value of the vector, so every exhaustive operation is guarded by
the max_cells cap.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import FrozenSet, Optional, Union

import numpy as np

from recforge.config import get_max_cells
from recforge.errors import ParameterError, ResourceLimitError, SearchFailure
from recforge.rationals import RationalLike, require_open_half

logger = logging.getLogger(__name__)

MAX_BITVECTOR_DIM = 64


@dataclass(frozen=True, order=True)
class BitVector:
    """An element of F₂^dim stored in the low `dim` bits of an integer."""

    dim: int
    bits: int

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_BITVECTOR_DIM:
            raise ParameterError(f"dimension must be in 1..{MAX_BITVECTOR_DIM}, got {self.dim}")
        if not 0 <= self.bits < (1 << self.dim):
            raise ParameterError(f"bits {self.bits} do not fit in dimension {self.dim}")

    @classmethod
    def zero(cls, dim: int) -> "BitVector":
        return cls(dim, 0)

    @classmethod
    def ones(cls, dim: int) -> "BitVector":
        return cls(dim, (1 << dim) - 1)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Character i of text is coordinate i, so '100' is the first unit vector."""
        if not text or set(text) - {"0", "1"}:
            raise ParameterError(f"Not a bit string: {text!r}")
        return cls(len(text), sum(1 << i for i, ch in enumerate(text) if ch == "1"))

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.dim))

    def __add__(self, other: "BitVector") -> "BitVector":
        _require_same_dim(self, other)
        return BitVector(self.dim, self.bits ^ other.bits)

    # characteristic 2
    __sub__ = __add__

    def __neg__(self) -> "BitVector":
        return self

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self.dim:
            raise IndexError(index)
        return self.bits >> index & 1


@dataclass(frozen=True)
class HammingBallSpec:
    """H_radius(center) = {x : w(center − x) ≤ radius}."""

    dim: int
    radius: int
    center: Optional[BitVector] = None

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", BitVector.zero(self.dim))
        if self.center.dim != self.dim:
            raise ParameterError(f"center has dimension {self.center.dim}, ball has {self.dim}")
        if not 0 <= self.radius <= self.dim:
            raise ParameterError(f"radius must be in 0..{self.dim}, got {self.radius}")

    @property
    def cardinality(self) -> int:
        return ball_cardinality(self.dim, self.radius)

    def contains(self, x: BitVector) -> bool:
        return hamming_weight(self.center - x) <= self.radius


def _require_same_dim(a: BitVector, b: BitVector) -> None:
    if a.dim != b.dim:
        raise ParameterError(f"dimension mismatch: {a.dim} vs {b.dim}")


def hamming_weight(x: Union[BitVector, int]) -> int:
    """Number of nonzero coordinates."""
    bits = x.bits if isinstance(x, BitVector) else x
    return bin(bits).count("1")


def ball_cardinality(dim: int, radius: int) -> int:
    """Σ_{j ≤ radius} C(dim, j), exact."""
    return sum(comb(dim, j) for j in range(min(radius, dim) + 1))


def _check_cells(dim: int, stage: str, max_cells: Optional[int]) -> int:
    limit = get_max_cells() if max_cells is None else max_cells
    if dim > MAX_BITVECTOR_DIM or (1 << dim) > limit:
        raise ResourceLimitError(stage, "2^d", limit, 1 << dim)
    return limit


def weight_table(dim: int, max_cells: Optional[int] = None) -> np.ndarray:
    """Array w with w[x] = hamming_weight(x) for every x in F₂^dim."""
    _check_cells(dim, "weight_table", max_cells)
    weights = np.zeros(1, dtype=np.uint8)
    for _ in range(dim):
        weights = np.concatenate([weights, weights + 1])
    return weights


def ball_mask(spec: HammingBallSpec, max_cells: Optional[int] = None) -> np.ndarray:
    """Boolean membership mask of the ball over all 2^dim vectors."""
    weights = weight_table(spec.dim, max_cells)
    indices = np.arange(1 << spec.dim, dtype=np.uint64)
    return weights[indices ^ np.uint64(spec.center.bits)] <= spec.radius


def _mask_to_set(mask: np.ndarray, dim: int) -> FrozenSet[BitVector]:
    return frozenset(BitVector(dim, int(i)) for i in np.flatnonzero(mask))


def enumerate_ball(spec: HammingBallSpec, max_cells: Optional[int] = None) -> FrozenSet[BitVector]:
    """
    Every vector within Hamming distance spec.radius of spec.center.

    Raises:
        ResourceLimitError: if 2^dim exceeds max_cells
    """
    members = _mask_to_set(ball_mask(spec, max_cells), spec.dim)
    logger.debug(f"Enumerated H_{spec.radius} in dimension {spec.dim}: {len(members)} vectors")
    return members


def difference_mask(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Mask of {a − b} for two masks over the same F₂^d."""
    if left.shape != right.shape:
        raise ParameterError(f"dimension mismatch: {left.shape} vs {right.shape}")
    result = np.zeros_like(left, dtype=bool)
    right_indices = np.flatnonzero(right)
    for a in np.flatnonzero(left):
        result[right_indices ^ a] = True
    return result


def ball_difference(
    spec_a: HammingBallSpec, spec_b: HammingBallSpec, max_cells: Optional[int] = None
) -> FrozenSet[BitVector]:
    """
    The difference set {a − b : a ∈ A, b ∈ B} computed pairwise.

    Args:
        spec_a: First ball
        spec_b: Second ball, same dimension

    Returns:
        Set of BitVector
    """
    if spec_a.dim != spec_b.dim:
        raise ParameterError(f"dimension mismatch: {spec_a.dim} vs {spec_b.dim}")
    mask = difference_mask(ball_mask(spec_a, max_cells), ball_mask(spec_b, max_cells))
    return _mask_to_set(mask, spec_a.dim)


def balls_intersect(
    spec_a: HammingBallSpec, spec_b: HammingBallSpec, max_cells: Optional[int] = None
) -> bool:
    if spec_a.dim != spec_b.dim:
        raise ParameterError(f"dimension mismatch: {spec_a.dim} vs {spec_b.dim}")
    return bool(np.any(ball_mask(spec_a, max_cells) & ball_mask(spec_b, max_cells)))


@dataclass(frozen=True)
class F2Witness:
    """
    A = H_radius(0) ⊂ F₂^dim with |A| > delta·2^dim and (A − A) ∩ H_k(1) = ∅.
    """

    dim: int
    k: int
    radius: int
    size: int
    delta: Fraction

    @property
    def success(self) -> bool:
        return True

    @property
    def ball(self) -> HammingBallSpec:
        return HammingBallSpec(self.dim, self.radius)

    @property
    def forbidden(self) -> HammingBallSpec:
        """The ball H_k(1) that A − A avoids."""
        return HammingBallSpec(self.dim, self.k, BitVector.ones(self.dim))

    @property
    def density(self) -> Fraction:
        return Fraction(self.size, 1 << self.dim)

    def members(self, max_cells: Optional[int] = None) -> FrozenSet[BitVector]:
        return enumerate_ball(self.ball, max_cells)


def f2_nonrecurrence_witness(
    d: int, k: int, delta: RationalLike
) -> Union[F2Witness, SearchFailure]:
    """
    The ball A = H_{⌊d/2⌋−k}(0), when it is large enough and A − A avoids H_k(1).

    Args:
        d: Dimension
        k: Radius of the forbidden ball around 1
        delta: Density threshold in (0, 1/2)

    Returns:
        F2Witness on success, SearchFailure when d is too small
    """
    delta = require_open_half(delta)
    if d < 1 or d > MAX_BITVECTOR_DIM:
        raise ParameterError(f"dimension must be in 1..{MAX_BITVECTOR_DIM}, got {d}")
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    radius = d // 2 - k
    if radius < 0:
        raise ParameterError(f"floor(d/2) - k must be non-negative, got d={d}, k={k}")

    if 2 * radius + k >= d:
        return SearchFailure("f2_witness", "difference set meets H_k(1)", {"d": d, "k": k, "radius": radius})

    size = ball_cardinality(d, radius)
    # |A| > delta * 2^d, in integers
    if size * delta.denominator <= delta.numerator * (1 << d):
        return SearchFailure(
            "f2_witness", "ball too small", {"d": d, "k": k, "size": size, "delta": str(delta)}
        )
    logger.debug(f"F2 witness: d={d}, k={k}, radius={radius}, |A|={size}")
    return F2Witness(dim=d, k=k, radius=radius, size=size, delta=delta)
