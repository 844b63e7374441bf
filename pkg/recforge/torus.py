"""
Exact arithmetic on the torus 𝕋^d = ℝ^d/ℤ^d.

Points have rational coordinates in [0, 1). Box unions are finite lists of
closed boxes whose sides never wrap (a wrapping interval is split in two when
the box is built). Orbit scans n ↦ nα run on numpy integer residues: for a
coordinate p/P the position of n is (n·p mod P)/P, computed exactly.

Fixed-point α (64 fractional bits) exists for equidistribution demos only and
never enters a certificate.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from recforge.config import get_horizon, get_max_cells, get_seed
from recforge.errors import ParameterError, ResourceLimitError, SearchFailure
from recforge.f2core import BitVector
from recforge.rationals import RationalLike, circle_norm, frac_mod1, to_fraction
from recforge.streams import IntegerStream

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
RANDOM_MODULUS = 10**9 + 7
RANDOM_ATTEMPTS = 24
INTERVAL_BOUNDS = ("[]", "()", "[)", "(]")
INT64_SAFE = 2**62

Segment = Tuple[Fraction, Fraction]
Box = Tuple[Segment, ...]


@dataclass(frozen=True)
class TorusPoint:
    """A point of 𝕋^dim with exact rational coordinates in [0, 1)."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coords:
            raise ParameterError("a torus point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(frac_mod1(to_fraction(c)) for c in self.coords))

    @classmethod
    def of(cls, *coords: RationalLike) -> "TorusPoint":
        return cls(tuple(to_fraction(c) for c in coords))

    @classmethod
    def from_g(cls, x: BitVector) -> "TorusPoint":
        """The point of G_d = {0, 1/2}^d corresponding to x ∈ F₂^d."""
        return cls(tuple(HALF if x[i] else Fraction(0) for i in range(x.dim)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        _same_dim(self.dim, other.dim)
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        _same_dim(self.dim, other.dim)
        return TorusPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, n: int) -> "TorusPoint":
        return TorusPoint(tuple(n * c for c in self.coords))

    def norm(self) -> Fraction:
        """Sup-metric distance to 0."""
        return max(circle_norm(c) for c in self.coords)

    def distance(self, other: "TorusPoint") -> Fraction:
        return (self - other).norm()

    @property
    def period(self) -> int:
        """Order of the point in 𝕋^d (lcm of the denominators)."""
        return math.lcm(*(c.denominator for c in self.coords))


def _same_dim(a: int, b: int) -> None:
    if a != b:
        raise ParameterError(f"dimension mismatch: {a} vs {b}")


# --------------------------------------------------------------------------
# Box unions
# --------------------------------------------------------------------------


def _split_segment(lo: Fraction, length: Fraction) -> List[Segment]:
    """[lo, lo + length] mod 1 as one or two non-wrapping closed segments."""
    if length >= 1:
        return [(Fraction(0), Fraction(1))]
    lo = frac_mod1(lo)
    hi = lo + length
    if hi <= 1:
        return [(lo, hi)]
    return [(lo, Fraction(1)), (Fraction(0), hi - 1)]


def _box_measure(box: Box) -> Fraction:
    measure = Fraction(1)
    for lo, hi in box:
        measure *= hi - lo
    return measure


def _segment_intersection(a: Segment, b: Segment) -> Optional[Segment]:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if lo <= hi else None


def _segment_gap(a: Segment, b: Segment) -> Fraction:
    """Circle distance between two closed non-wrapping segments."""
    if _segment_intersection(a, b) is not None:
        return Fraction(0)
    return min(frac_mod1(b[0] - a[1]), frac_mod1(a[0] - b[1]))


@dataclass(frozen=True)
class BoxSet:
    """
    A finite union of closed boxes in 𝕋^dim.

    tiles is set when the union is A□_ε = A + I_ε^d for A ⊆ G_d; it holds
    (ε, words of A) and enables the grid fast paths.
    """

    dim: int
    boxes: Tuple[Box, ...]
    disjoint: bool = False
    tiles: Optional[Tuple[Fraction, FrozenSet[int]]] = None

    @classmethod
    def from_intervals(
        cls,
        dim: int,
        intervals: Iterable[Sequence[Tuple[RationalLike, RationalLike]]],
        bounds: str = "[]",
    ) -> "BoxSet":
        """
        Build from boxes given as per-coordinate (start, end) pairs read mod 1; end < start wraps.

        Only closed boxes are represented. bounds names the interval kind
        ("[]", "()", "[)" or "(]") and anything but "[]" is refused.
        """
        if bounds not in INTERVAL_BOUNDS:
            raise ParameterError(f"unknown interval bounds {bounds!r}, expected one of {INTERVAL_BOUNDS}")
        if bounds != "[]":
            raise ParameterError(f"box unions are closed; {bounds!r} intervals are not supported")
        boxes: List[Box] = []
        for box in intervals:
            if len(box) != dim:
                raise ParameterError(f"box has {len(box)} sides, expected {dim}")
            sides = []
            for start, end in box:
                start, end = to_fraction(start), to_fraction(end)
                length = end - start if end >= start else end - start + 1
                sides.append(_split_segment(start, length))
            boxes.extend(tuple(choice) for choice in product(*sides))
        return cls(dim, tuple(boxes))

    @classmethod
    def tiled(cls, words: Iterable[Union[BitVector, int]], dim: int, epsilon: RationalLike) -> "BoxSet":
        """A□_ε = A + I_ε^d with I_ε = [ε, 1/2 − ε]."""
        epsilon = to_fraction(epsilon)
        if not 0 < epsilon < Fraction(1, 4):
            raise ParameterError(f"epsilon must lie in (0, 1/4), got {epsilon}")
        word_set = frozenset(w.bits if isinstance(w, BitVector) else int(w) for w in words)
        boxes = tuple(sorted(_tile(word, dim, epsilon) for word in word_set))
        return cls(dim, boxes, True, (epsilon, word_set))

    @property
    def measure(self) -> Fraction:
        """Sum of box volumes; the Haar measure when the boxes are disjoint."""
        if not self.disjoint:
            raise ParameterError("measure of a possibly overlapping box union is not a plain sum")
        return sum((_box_measure(box) for box in self.boxes), Fraction(0))

    def contains(self, point: TorusPoint) -> bool:
        _same_dim(self.dim, point.dim)
        return any(
            all(lo <= x <= hi or (hi == 1 and x == 0) for x, (lo, hi) in zip(point.coords, box))
            for box in self.boxes
        )

    def translate(self, shift: TorusPoint) -> "BoxSet":
        _same_dim(self.dim, shift.dim)
        if self.tiles is not None and all(c in (0, HALF) for c in shift.coords):
            word = sum(1 << i for i, c in enumerate(shift.coords) if c)
            epsilon, words = self.tiles
            return BoxSet.tiled({w ^ word for w in words}, self.dim, epsilon)
        boxes: List[Box] = []
        for box in self.boxes:
            sides = [_split_segment(lo + t, hi - lo) for (lo, hi), t in zip(box, shift.coords)]
            boxes.extend(tuple(choice) for choice in product(*sides))
        return BoxSet(self.dim, tuple(boxes), self.disjoint)

    def union(self, other: "BoxSet") -> "BoxSet":
        _same_dim(self.dim, other.dim)
        return BoxSet(self.dim, self.boxes + other.boxes)

    def intersection(self, other: "BoxSet") -> "BoxSet":
        _same_dim(self.dim, other.dim)
        boxes = set()
        for a in self.boxes:
            for b in other.boxes:
                sides = [_segment_intersection(sa, sb) for sa, sb in zip(a, b)]
                if all(side is not None for side in sides):
                    boxes.add(tuple(sides))
        return BoxSet(self.dim, tuple(sorted(boxes)))

    def canonical(self) -> FrozenSet[Box]:
        """Boxes with positive volume; equal canonical sets mean equal unions."""
        return frozenset(box for box in self.boxes if _box_measure(box) > 0)


def _tile(word: int, dim: int, epsilon: Fraction) -> Box:
    return tuple(
        (HALF + epsilon, 1 - epsilon) if word >> i & 1 else (epsilon, HALF - epsilon) for i in range(dim)
    )


def box_separation(left: BoxSet, right: BoxSet) -> Optional[Fraction]:
    """
    Sup-metric distance between two box unions (None if either is empty).

    Two tilings of the same ε are 0 apart when they share a tile and 2ε apart
    otherwise; everything else is computed box by box.
    """
    _same_dim(left.dim, right.dim)
    if not left.boxes or not right.boxes:
        return None
    if left.tiles and right.tiles and left.tiles[0] == right.tiles[0]:
        epsilon = left.tiles[0]
        return Fraction(0) if left.tiles[1] & right.tiles[1] else 2 * epsilon
    best: Optional[Fraction] = None
    for a in left.boxes:
        for b in right.boxes:
            gap = max(_segment_gap(sa, sb) for sa, sb in zip(a, b))
            if best is None or gap < best:
                best = gap
                if best == 0:
                    return best
    return best


def _sample_coordinates(breaks: Sequence[Fraction]) -> List[Fraction]:
    points = sorted(set(breaks) | {Fraction(0), Fraction(1)})
    samples = set(points)
    samples.update((a + b) / 2 for a, b in zip(points, points[1:]))
    return sorted(s for s in samples if s < 1)


def same_union(left: BoxSet, right: BoxSet) -> bool:
    """Whether two closed box unions cover the same points."""
    _same_dim(left.dim, right.dim)
    if left.canonical() == right.canonical() and not any(
        _box_measure(b) == 0 for b in left.boxes + right.boxes
    ):
        return True
    # elementary cells of the common refinement
    per_axis = []
    for axis in range(left.dim):
        breaks = [end for box in left.boxes + right.boxes for end in box[axis]]
        per_axis.append(_sample_coordinates(breaks))
    for coords in product(*per_axis):
        point = TorusPoint(tuple(coords))
        if left.contains(point) != right.contains(point):
            return False
    return True


def box_intersection_lemma_check(
    words: Iterable[Union[BitVector, int]], shift: Union[BitVector, int], dim: int, epsilon: RationalLike
) -> bool:
    """
    Check A□_ε ∩ (A□_ε + t) = (A ∩ (A + t))□_ε by interval arithmetic.

    Args:
        words: A ⊆ G_d, as F₂^d vectors
        shift: t ∈ G_d
        dim: d
        epsilon: in (0, 1/4)
    """
    epsilon = to_fraction(epsilon)
    if not 0 < epsilon < Fraction(1, 4):
        raise ParameterError(f"epsilon must lie in (0, 1/4), got {epsilon}")
    word_set = {w.bits if isinstance(w, BitVector) else int(w) for w in words}
    t = shift.bits if isinstance(shift, BitVector) else int(shift)
    # drop the tiling so the shift goes through generic interval arithmetic
    base = BoxSet(dim, BoxSet.tiled(word_set, dim, epsilon).boxes)
    shifted = base.translate(TorusPoint.from_g(BitVector(dim, t)))
    left = base.intersection(shifted)
    right = BoxSet.tiled({w for w in word_set if w ^ t in word_set}, dim, epsilon)
    return same_union(left, right)


# --------------------------------------------------------------------------
# ε-copies of Hamming balls
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CopySpec:
    """H̃(α; k, ε) = {n : nα ∈ H_k(½⃗) + V_ε}."""

    alpha: TorusPoint
    k: int
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", to_fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.k < 0:
            raise ParameterError(f"k must be non-negative, got {self.k}")


def in_thickened_ball(point: TorusPoint, k: int, epsilon: Fraction) -> bool:
    """point ∈ H_k(½⃗) + V_ε."""
    far_from_half = 0
    for x in point.coords:
        if circle_norm(x - HALF) < epsilon:
            continue
        if circle_norm(x) < epsilon:
            far_from_half += 1
            continue
        return False
    return far_from_half <= k


def tilde_h_member(n: int, spec: CopySpec) -> bool:
    return in_thickened_ball(spec.alpha.scale(n), spec.k, spec.epsilon)


@dataclass(frozen=True)
class LiftResult:
    """
    Output of lift_nonrecurrence.

    B = A□_{epsilon_prime} is disjoint from B + R + V_epsilon and has measure
    above delta.
    """

    epsilon: Fraction
    epsilon_prime: Fraction
    boxes: BoxSet
    separation: Optional[Fraction]
    measure: Fraction

    @property
    def success(self) -> bool:
        return True


def lift_nonrecurrence(
    words: Iterable[Union[BitVector, int]],
    forbidden: Iterable[Union[BitVector, int]],
    dim: int,
    delta: RationalLike,
    alpha: Optional[TorusPoint] = None,
    epsilon_prime: Optional[RationalLike] = None,
) -> Union[LiftResult, SearchFailure]:
    """
    Thicken A ⊆ G_d into a box union that stays clear of itself shifted by R.

    Args:
        words: A, with A ∩ (A + R) = ∅
        forbidden: R ⊆ G_d
        dim: d
        delta: Target measure for B
        alpha: Unused by the construction, accepted for symmetry with the orbit steps
        epsilon_prime: Fix the inset instead of searching 1/8, 1/16, ...

    Returns:
        LiftResult, or SearchFailure when |A|/2^d ≤ delta
    """
    delta = to_fraction(delta)
    word_set = {w.bits if isinstance(w, BitVector) else int(w) for w in words}
    shift_set = {w.bits if isinstance(w, BitVector) else int(w) for w in forbidden}
    if not word_set:
        return SearchFailure("lift_nonrecurrence", "empty set", {"dim": dim})
    if any(a ^ r in word_set for a in word_set for r in shift_set):
        raise ParameterError("A meets A + R")
    if len(word_set) * delta.denominator <= delta.numerator * (1 << dim):
        return SearchFailure(
            "lift_nonrecurrence", "measure bound fails", {"size": len(word_set), "dim": dim, "delta": str(delta)}
        )

    def measure_at(inset: Fraction) -> Fraction:
        return len(word_set) * (HALF - 2 * inset) ** dim

    if epsilon_prime is not None:
        inset = to_fraction(epsilon_prime)
        if measure_at(inset) <= delta:
            return SearchFailure("lift_nonrecurrence", "inset too large", {"epsilon_prime": str(inset)})
    else:
        inset = Fraction(1, 8)
        while measure_at(inset) <= delta:
            inset /= 2
            if inset.denominator > 2**60:
                return SearchFailure("lift_nonrecurrence", "no inset found", {"dim": dim})

    boxes = BoxSet.tiled(word_set, dim, inset)
    shifted = BoxSet.tiled({a ^ r for a in word_set for r in shift_set}, dim, inset) if shift_set else None
    separation = box_separation(boxes, shifted) if shifted else None
    if separation is not None and separation == 0:
        raise ParameterError("B meets B + R")
    epsilon = separation / 2 if separation is not None else inset
    logger.debug(f"lift: |A|={len(word_set)} epsilon'={inset} separation={separation} epsilon={epsilon}")
    return LiftResult(epsilon, inset, boxes, separation, measure_at(inset))


# --------------------------------------------------------------------------
# Orbit scans
# --------------------------------------------------------------------------


def _residue_array(values: Sequence[int], numerator: int, denominator: int) -> np.ndarray:
    """(n·numerator mod denominator) for every n, as exact integers."""
    numerator %= denominator
    reduced = [n % denominator for n in values]
    if denominator * denominator < INT64_SAFE:
        return (np.asarray(reduced, dtype=np.int64) * numerator) % denominator
    return (np.asarray(reduced, dtype=object) * numerator) % denominator


class _Orbit:
    """Exact positions nα for a fixed list of integers n."""

    def __init__(self, alpha: TorusPoint, values: Sequence[int]):
        self.alpha = alpha
        self.values = list(values)
        self.denominators = [c.denominator for c in alpha.coords]
        self.residues = [
            _residue_array(self.values, c.numerator, c.denominator) for c in alpha.coords
        ]

    def cells(self, q: int) -> np.ndarray:
        """Index Σ_j floor(Q·x_j)·Q^j of the grid cell containing each point."""
        index = np.zeros(len(self.values), dtype=np.int64)
        for j, (res, den) in enumerate(zip(self.residues, self.denominators)):
            index += np.asarray((res * q) // den, dtype=np.int64) * (q**j)
        return index

    def near(self, target: TorusPoint, radius: Fraction) -> np.ndarray:
        """Mask of points with sup-distance to target strictly below radius."""
        mask = np.ones(len(self.values), dtype=bool)
        for res, den, v in zip(self.residues, self.denominators, target.coords):
            scale = den * v.denominator
            dtype = np.int64 if scale * radius.denominator * 2 < INT64_SAFE else object
            res = np.asarray(res, dtype=dtype)
            diff = (res * v.denominator - v.numerator * den) % scale
            dist = np.minimum(diff, scale - diff)
            mask &= np.asarray(dist * radius.denominator < radius.numerator * scale, dtype=bool)
        return mask


@dataclass(frozen=True)
class AlphaChoice:
    """
    α whose orbit over E reaches the required cells of the 1/Q grid, with one witness per cell.

    Without targets every cell is required; with targets only the cells
    within 1/Q of a target are, and witness_hits is keyed by target cell.
    """

    alpha: TorusPoint
    q: int
    witness_hits: Dict[Tuple[int, ...], int]
    candidate: str

    @property
    def success(self) -> bool:
        return True


def digit_alpha(dim: int, q: int, step: int = 1) -> TorusPoint:
    """α_j = 1/(step·Q^{d−j}); n/step in base Q spreads over every grid cell."""
    return TorusPoint(tuple(Fraction(1, step * q ** (dim - j)) for j in range(dim)))


def line_alpha(shift: TorusPoint, q: int) -> Optional[TorusPoint]:
    """
    α = w/(4Q + 1) for a point shift of G_d, w_j = 1 where shift_j = 1/2 and 2 elsewhere.

    n = 2Q puts nα within 1/Q of shift, and the orbit runs along a closed line
    through every coordinate. None when shift is not in G_d or is 0.
    """
    if any(c not in (0, HALF) for c in shift.coords) or all(c == 0 for c in shift.coords):
        return None
    period = 4 * q + 1
    return TorusPoint(tuple(Fraction(1 if c else 2, period) for c in shift.coords))


def _resolution_to_q(resolution: Union[RationalLike, int]) -> int:
    if isinstance(resolution, int) and not isinstance(resolution, bool) and resolution > 1:
        return resolution
    value = to_fraction(resolution)
    if value <= 0 or value > 1 or value.numerator != 1:
        raise ParameterError(f"resolution must be 1/Q, got {value}")
    return value.denominator


def _target_cell(point: TorusPoint, q: int) -> Tuple[int, ...]:
    return tuple(int(c * q) for c in point.coords)


def choose_alpha(
    stream: IntegerStream,
    dim: int,
    resolution: Union[RationalLike, int],
    horizon: Optional[int] = None,
    seed: Optional[int] = None,
    max_cells: Optional[int] = None,
    targets: Optional[Sequence[TorusPoint]] = None,
) -> Union[AlphaChoice, SearchFailure]:
    """
    Find rational α with Eα meeting every cell of side 1/Q, or only the targets.

    Tries the digit vectors for step = gcd of the stream differences and
    step = 1, then pseudo-random p/P with P prime. With two targets 0 and a
    point of G_d the line rotation toward that point goes first.

    Args:
        stream: E (infinite)
        dim: d
        resolution: 1/Q, or Q itself
        horizon: Number of elements of E examined
        seed: Seed for the random candidates
        targets: Points that need an orbit element within 1/Q; the Q^d cap
            does not apply then, and candidates with period above max_cells
            are skipped

    Returns:
        AlphaChoice, or SearchFailure reporting the best coverage
    """
    if not stream.infinite:
        raise ParameterError("E must be infinite")
    q = _resolution_to_q(resolution)
    horizon = get_horizon() if horizon is None else horizon
    limit = get_max_cells() if max_cells is None else max_cells
    targets = list(targets) if targets is not None else None
    cell_count = q**dim if targets is None else len(targets)
    if targets is None and cell_count > limit:
        raise ResourceLimitError("choose_alpha", "Q^d", limit, cell_count)
    for v in targets or ():
        _same_dim(dim, v.dim)
    prefix = stream.take(horizon)
    if targets is None and len(prefix) < cell_count:
        return SearchFailure("choose_alpha", "horizon exhausted", {"cells": cell_count, "examined": len(prefix)})

    candidates: List[Tuple[str, TorusPoint]] = []
    if targets is not None and len(targets) == 2 and targets[0].norm() == 0:
        line = line_alpha(targets[1], q)
        if line is not None:
            candidates.append(("line", line))
    for step in dict.fromkeys([stream.common_step(), 1]):
        candidates.append((f"digits/{step}", digit_alpha(dim, q, step)))
    rng = np.random.default_rng(get_seed() if seed is None else seed)
    for attempt in range(RANDOM_ATTEMPTS):
        numerators = rng.integers(1, RANDOM_MODULUS, size=dim)
        candidates.append(
            (f"random/{attempt}", TorusPoint(tuple(Fraction(int(p), RANDOM_MODULUS) for p in numerators)))
        )

    best_coverage = 0
    for name, alpha in candidates:
        if targets is not None and alpha.period > limit:
            # the copy needs the periodic preimage, which orbit_pattern caps at max_cells
            logger.debug(f"choose_alpha {name}: period {alpha.period} above {limit}, skipped")
            continue
        orbit = _Orbit(alpha, prefix)
        if targets is not None:
            hits: Dict[Tuple[int, ...], int] = {}
            for v in targets:
                found = np.flatnonzero(orbit.near(v, Fraction(1, q)))
                if len(found):
                    hits[_target_cell(v, q)] = prefix[int(found[0])]
            covered = sum(1 for v in targets if _target_cell(v, q) in hits)
            best_coverage = max(best_coverage, covered)
            logger.debug(f"choose_alpha {name}: {covered}/{cell_count} targets")
            if covered == cell_count:
                logger.info(f"Chose alpha ({name}) reaching all {cell_count} targets at Q={q}")
                return AlphaChoice(alpha, q, hits, name)
            continue
        cells = orbit.cells(q)
        unique, first = np.unique(cells, return_index=True)
        best_coverage = max(best_coverage, len(unique))
        logger.debug(f"choose_alpha {name}: {len(unique)}/{cell_count} cells")
        if len(unique) == cell_count:
            hits = {
                tuple(int(cell) // q**j % q for j in range(dim)): prefix[int(index)]
                for cell, index in zip(unique, first)
            }
            logger.info(f"Chose alpha ({name}) covering all {cell_count} cells at Q={q}")
            return AlphaChoice(alpha, q, hits, name)
    logger.warning(f"No alpha covered {cell_count} cells within horizon {horizon}")
    return SearchFailure(
        "choose_alpha", "horizon exhausted", {"cells": cell_count, "covered": best_coverage, "horizon": horizon}
    )


def copy_cayley_vertices(
    stream: IntegerStream,
    alpha: TorusPoint,
    targets: Sequence[TorusPoint],
    epsilon: RationalLike,
    horizon: Optional[int] = None,
) -> Union[Dict[TorusPoint, int], SearchFailure]:
    """
    Pick g_v ∈ E with ‖g_v·α − v‖ < ε/2 for each target v (first match in E order).

    Returns:
        Mapping v -> g_v, or SearchFailure naming the first unreached v
    """
    epsilon = to_fraction(epsilon)
    horizon = get_horizon() if horizon is None else horizon
    orbit = _Orbit(alpha, stream.take(horizon))
    chosen: Dict[TorusPoint, int] = {}
    for v in targets:
        _same_dim(alpha.dim, v.dim)
        hits = np.flatnonzero(orbit.near(v, epsilon / 2))
        if len(hits) == 0:
            return SearchFailure("copy_cayley_vertices", "target unreached", {"target": str(v.coords), "horizon": horizon})
        chosen[v] = orbit.values[int(hits[0])]
    return chosen


def orbit_pattern(alpha: TorusPoint, boxes: BoxSet, max_cells: Optional[int] = None) -> Tuple[int, np.ndarray]:
    """
    The periodic set {n : nα ∈ B} over one period of α.

    Returns:
        (period, boolean mask of length period)
    """
    _same_dim(alpha.dim, boxes.dim)
    period = alpha.period
    limit = get_max_cells() if max_cells is None else max_cells
    if period > limit:
        raise ResourceLimitError("orbit_pattern", "period", limit, period)
    return period, _box_hits(_Orbit(alpha, range(period)), boxes)


def _box_hits(orbit: _Orbit, boxes: BoxSet) -> np.ndarray:
    count = len(orbit.values)
    mask = np.zeros(count, dtype=bool)
    for box in boxes.boxes:
        inside = np.ones(count, dtype=bool)
        for res, den, (lo, hi) in zip(orbit.residues, orbit.denominators, box):
            scaled = np.asarray(res, dtype=object) if den * max(lo.denominator, hi.denominator) >= INT64_SAFE else res
            above = scaled * lo.denominator >= lo.numerator * den
            below = scaled * hi.denominator <= hi.numerator * den
            wrapped = (scaled == 0) & (hi == 1)
            inside &= np.asarray((above & below) | wrapped, dtype=bool)
        mask |= inside
    return mask


# --------------------------------------------------------------------------
# Equidistribution demos
# --------------------------------------------------------------------------

GOLDEN_FRACTION_64 = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class FixedPointAlpha:
    """α with coordinates w_j / 2^64."""

    words: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.words)

    def positions(self, n_max: int) -> np.ndarray:
        """Array of shape (n_max, dim): fractional parts of nα for n = 1..n_max."""
        n = np.arange(1, n_max + 1, dtype=np.uint64)
        columns = [(n * np.uint64(w)).astype(np.float64) / 2.0**64 for w in self.words]
        return np.stack(columns, axis=1)


def golden_ratio_alpha(dim: int = 1) -> FixedPointAlpha:
    return FixedPointAlpha((GOLDEN_FRACTION_64,) * dim)


def empirical_box_density(
    alpha: Union[TorusPoint, FixedPointAlpha], boxes: BoxSet, n_max: int
) -> Fraction:
    """
    |{1 ≤ n ≤ N : nα ∈ A}| / N.

    Exact for rational α; fixed-point α is compared in floating point.
    """
    if n_max < 1:
        raise ParameterError(f"N must be positive, got {n_max}")
    _same_dim(alpha.dim, boxes.dim)
    if isinstance(alpha, FixedPointAlpha):
        positions = alpha.positions(n_max)
        hits = np.zeros(n_max, dtype=bool)
        for box in boxes.boxes:
            inside = np.ones(n_max, dtype=bool)
            for j, (lo, hi) in enumerate(box):
                inside &= (positions[:, j] >= float(lo)) & (positions[:, j] <= float(hi))
            hits |= inside
        return Fraction(int(hits.sum()), n_max)

    period = alpha.period
    if period >= n_max:
        hits = _box_hits(_Orbit(alpha, range(1, n_max + 1)), boxes)
        return Fraction(int(hits.sum()), n_max)
    mask = _box_hits(_Orbit(alpha, range(period)), boxes)
    full, rest = divmod(n_max, period)
    # n = 1..N covers residues 1..N mod period
    count = full * int(mask.sum()) + int(mask[1 : rest + 1].sum())
    return Fraction(count, n_max)


def weyl_sum(alpha: Union[TorusPoint, FixedPointAlpha, RationalLike], h: int, n_max: int) -> float:
    """|N⁻¹ Σ_{n=1}^{N} e(h·nα)| for one-dimensional α."""
    if n_max < 1:
        raise ParameterError(f"N must be positive, got {n_max}")
    if isinstance(alpha, FixedPointAlpha):
        phases = alpha.positions(n_max)[:, 0] * h
    else:
        point = alpha if isinstance(alpha, TorusPoint) else TorusPoint.of(alpha)
        x = point.coords[0]
        res = _residue_array(range(1, n_max + 1), x.numerator * h, x.denominator)
        phases = np.asarray(res, dtype=np.float64) / x.denominator
    return float(abs(np.exp(2j * np.pi * phases).mean()))
