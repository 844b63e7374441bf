"""
Witness algebra on the integers and the iterative construction.

A (B, m) witness certifies that S is δ-nonrecurrent: B ⊆ [m], |B| > δm,
B ∩ (B + S) = ∅ and B + S + S ⊆ [m]. Witnesses are cut out of periodic
sets of positive density and glued together round by round with
two_pieces. Every witness a constructor returns has been re-checked by
recforge.verify.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from recforge.config import Caps
from recforge.errors import ParameterError, RecforgeError, ResourceLimitError, SearchFailure
from recforge.graphs import ChromaticEvidence
from recforge.rationals import RationalLike, format_fraction, require_open_half, to_fraction
from recforge.streams import IntegerStream
from recforge.verify import check_witness, failed_names

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
SCAN_STEPS = 4096
DIFFERENCE_PREFIX = 256


# --------------------------------------------------------------------------
# Periodic sets
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PeriodicSet:
    """{n : mask[(n − offset) mod period]}; density is exact."""

    period: int
    mask: np.ndarray
    offset: int = 0

    def __post_init__(self):
        if self.period < 1 or len(self.mask) != self.period:
            raise ParameterError(f"mask length {len(self.mask)} does not match period {self.period}")

    @classmethod
    def from_residues(cls, period: int, residues: Iterable[int], offset: int = 0) -> "PeriodicSet":
        if period < 1:
            raise ParameterError(f"period must be positive, got {period}")
        mask = np.zeros(period, dtype=bool)
        mask[[r % period for r in residues]] = True
        return cls(period, mask, offset)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.period)

    def contains(self, n: int) -> bool:
        return bool(self.mask[(n - self.offset) % self.period])

    def aligned(self) -> np.ndarray:
        """Membership of 0..period-1."""
        return np.roll(self.mask, self.offset % self.period)

    def first_difference(self, values: Iterable[int]) -> Optional[int]:
        """The first s with s ∈ A − A, checked over one period."""
        for s in values:
            if np.any(self.mask & np.roll(self.mask, -(s % self.period))):
                return s
        return None

    def restrict(self, modulus: int, residue: int) -> "PeriodicSet":
        """{n : residue + modulus·n ∈ A}."""
        step = self.period // math.gcd(self.period, modulus)
        members = self.aligned()
        positions = (residue + modulus * np.arange(step, dtype=np.int64)) % self.period
        return PeriodicSet(step, members[positions])

    def densest_restriction(self, modulus: int) -> Tuple[int, "PeriodicSet"]:
        """The residue t (smallest on ties) whose restriction is densest."""
        best_t, best = 0, self.restrict(modulus, 0)
        for t in range(1, math.gcd(self.period, modulus)):
            candidate = self.restrict(modulus, t)
            if candidate.count > best.count:
                best_t, best = t, candidate
        return best_t, best


def best_window(periodic: PeriodicSet, m: int) -> Tuple[int, int]:
    """
    The shift t maximising |A ∩ ([m] + t)|, smallest t on ties.

    Returns:
        (t, count)
    """
    if m < 1:
        raise ParameterError(f"window length must be positive, got {m}")
    full, rest = divmod(m, periodic.period)
    members = periodic.aligned()
    doubled = np.concatenate([members, members]).astype(np.int64)
    prefix = np.concatenate([[0], np.cumsum(doubled)])
    starts = np.arange(periodic.period)
    counts = full * periodic.count + prefix[starts + rest] - prefix[starts]
    t = int(np.argmax(counts))
    return t, int(counts[t])


# --------------------------------------------------------------------------
# Witnesses
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NonrecurrenceWitness:
    """(B, m) witnessing the delta-nonrecurrence of S."""

    B: np.ndarray
    m: int
    S: Tuple[int, ...]
    delta: Fraction

    @property
    def size(self) -> int:
        return len(self.B)

    @property
    def density(self) -> Fraction:
        return Fraction(self.size, self.m)

    @property
    def success(self) -> bool:
        return True

    def restate(self, delta: RationalLike) -> "NonrecurrenceWitness":
        """The same (B, m) read as a witness at another density."""
        delta = to_fraction(delta)
        if self.size <= delta * self.m:
            raise ParameterError(f"|B|={self.size} does not exceed {delta}*{self.m}")
        return NonrecurrenceWitness(self.B, self.m, self.S, delta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "B": [int(b) for b in self.B],
            "m": int(self.m),
            "S": list(self.S),
            "delta": format_fraction(self.delta),
        }


def _normalize_set(values: Iterable[int], name: str = "S") -> Tuple[int, ...]:
    result = tuple(sorted({int(v) for v in values}))
    if not result:
        raise ParameterError(f"{name} must be non-empty")
    if result[0] <= 0:
        raise ParameterError(f"{name} must hold positive integers, got {result[0]}")
    return result


def _certified(witness: NonrecurrenceWitness) -> NonrecurrenceWitness:
    failures = failed_names(check_witness(witness.B.tolist(), witness.m, witness.S, witness.delta))
    if failures:
        raise RecforgeError(f"constructed witness fails {failures}")
    return witness


def witness_threshold(S: Sequence[int], density: Fraction, delta: Fraction) -> int:
    """m₀ = ⌊2·max(S)/(density − δ)⌋ + 1; every m ≥ m₀ yields a witness."""
    return math.floor(Fraction(2 * max(S)) / (density - delta)) + 1


def _validate_density(S: Tuple[int, ...], periodic: PeriodicSet, delta: Fraction) -> None:
    if periodic.density <= delta:
        raise ParameterError(f"density {periodic.density} does not exceed delta {delta}")
    clash = periodic.first_difference(S)
    if clash is not None:
        raise ParameterError(f"{clash} lies in A - A")


def _extract(S: Tuple[int, ...], periodic: PeriodicSet, delta: Fraction, m: int) -> Optional[NonrecurrenceWitness]:
    window = m - 2 * S[-1]
    if window <= 0:
        return None
    t, count = best_window(periodic, window)
    if count <= delta * m:
        return None
    positions = np.arange(t, t + window, dtype=np.int64)
    B = np.flatnonzero(periodic.aligned()[positions % periodic.period]).astype(np.int64)
    return NonrecurrenceWitness(B, m, S, delta)


def witness_from_set(
    S: Iterable[int], periodic: PeriodicSet, delta: RationalLike, m: int
) -> Union[NonrecurrenceWitness, SearchFailure]:
    """
    B = (A − t) ∩ [m − 2k] for the best window t, k = max(S).

    Args:
        S: Positive integers with (A − A) ∩ S = ∅
        periodic: A, of density above delta
        delta: Target density
        m: Witness modulus

    Returns:
        NonrecurrenceWitness, or SearchFailure when m is too small

    Raises:
        ParameterError: if S meets A − A or A is not dense enough
    """
    S = _normalize_set(S)
    delta = require_open_half(delta)
    _validate_density(S, periodic, delta)
    witness = _extract(S, periodic, delta, m)
    if witness is None:
        return SearchFailure(
            "witness_from_set",
            "modulus too small",
            {"m": m, "m0": witness_threshold(S, periodic.density, delta)},
        )
    return _certified(witness)


def smallest_witness(
    S: Iterable[int],
    periodic: PeriodicSet,
    delta: RationalLike,
    lower: int = 1,
    max_modulus: Optional[int] = None,
    scan: int = SCAN_STEPS,
) -> NonrecurrenceWitness:
    """
    The witness with the smallest m ≥ lower.

    Scans a bounded range above the first feasible m, then falls back to the
    threshold m₀ where success is guaranteed.
    """
    S = _normalize_set(S)
    delta = require_open_half(delta)
    _validate_density(S, periodic, delta)
    threshold = witness_threshold(S, periodic.density, delta)
    # |B| ≤ m − 2k, so m must exceed 2k/(1 − δ)
    start = max(lower, math.floor(Fraction(2 * S[-1]) / (1 - delta)) + 1)
    for m in range(start, min(start + scan, threshold)):
        if max_modulus is not None and m > max_modulus:
            break
        witness = _extract(S, periodic, delta, m)
        if witness is not None:
            logger.debug(f"smallest witness for max(S)={S[-1]} at m={m} (m0={threshold})")
            return _certified(witness)
    m = max(start, threshold)
    if max_modulus is not None and m > max_modulus:
        raise ResourceLimitError("smallest_witness", "m", max_modulus, m)
    witness = _extract(S, periodic, delta, m)
    if witness is None:
        raise RecforgeError(f"no witness at the guaranteed modulus {m}")
    return _certified(witness)


# --------------------------------------------------------------------------
# Combining pieces
# --------------------------------------------------------------------------


def two_pieces_threshold(w_e: NonrecurrenceWitness, F: Iterable[int], eta: RationalLike) -> int:
    """
    l₀ = ⌊k / (η·m·(δ′ − δ))⌋ with δ′ = |A|/m and k = max(E ∪ mF).

    Any l > l₀ makes the combined witness dense enough.
    """
    F = _normalize_set(F, "F")
    eta = to_fraction(eta)
    excess = w_e.density - w_e.delta
    if excess <= 0:
        raise ParameterError(f"|A|/m = {w_e.density} does not exceed delta {w_e.delta}")
    k = max(max(w_e.S), w_e.m * F[-1])
    return math.floor(Fraction(k) / (eta * w_e.m * excess))


def decomposition_counts(
    values: np.ndarray, a_values: np.ndarray, b_values: np.ndarray, m: int, e0: int, f0: int
) -> np.ndarray:
    """For each c, the number of (q, a, b) with c = a + q·e0 + m(b + q·f0), q ∈ {0, 1}."""
    values = np.asarray(values, dtype=np.int64)
    a_mask = np.zeros(m, dtype=bool)
    a_mask[np.asarray(a_values, dtype=np.int64)] = True
    b_top = int(np.max(b_values)) + f0 + 2 if len(b_values) else 1
    b_mask = np.zeros(b_top, dtype=bool)
    b_mask[np.asarray(b_values, dtype=np.int64)] = True

    def member(mask: np.ndarray, x: np.ndarray) -> np.ndarray:
        ok = (x >= 0) & (x < len(mask))
        result = np.zeros(len(x), dtype=bool)
        result[ok] = mask[x[ok]]
        return result

    low, high = values % m, values // m
    counts = (member(a_mask, low) & member(b_mask, high)).astype(np.int64)
    counts += member(a_mask, low - e0) & member(b_mask, high - f0)
    return counts


def two_pieces(
    w_e: NonrecurrenceWitness,
    w_f: NonrecurrenceWitness,
    eta: Optional[RationalLike] = None,
    e0: Optional[int] = None,
    f0: Optional[int] = None,
) -> NonrecurrenceWitness:
    """
    Glue a witness (A, m) for E and a witness (B, l) for F into one for E ∪ mF.

    C₁ = ∪_{b∈B} (A + mb), C₂ = ∪_{b∈B} (A + e0 + m(b + f0)),
    C = ((C₁ ∪ C₂) ∩ [lm − 2k]) − m·min(B), so that A ⊆ C.

    Args:
        w_e: Witness (A, m) at density delta for E
        w_f: Witness (B, l) at density eta for F
        eta: Defaults to w_f.delta
        e0: Element of E (default min E)
        f0: Element of F (default min F)

    Returns:
        Witness (C, l·m) at density 2·delta·eta

    Raises:
        ParameterError: on invalid inputs, or when l ≤ l₀
    """
    for name, witness in (("E", w_e), ("F", w_f)):
        failures = failed_names(check_witness(witness.B.tolist(), witness.m, witness.S, witness.delta))
        if failures:
            raise ParameterError(f"witness for {name} fails {failures}")
    eta = w_f.delta if eta is None else to_fraction(eta)
    if w_f.size <= eta * w_f.m:
        raise ParameterError(f"(B, l) does not witness {eta}-nonrecurrence")
    E, F = w_e.S, w_f.S
    e0 = E[0] if e0 is None else e0
    f0 = F[0] if f0 is None else f0
    if e0 not in E or f0 not in F:
        raise ParameterError(f"e0={e0} and f0={f0} must lie in E and F")

    m, l = w_e.m, w_f.m
    l0 = two_pieces_threshold(w_e, F, eta)
    if l <= l0:
        raise ParameterError(f"l={l} must exceed l0={l0}")
    k = max(E[-1], m * F[-1])

    A = w_e.B.astype(np.int64)
    B = w_f.B.astype(np.int64)
    first = (A[None, :] + m * B[:, None]).ravel()
    second = (A[None, :] + e0 + m * (B[:, None] + f0)).ravel()
    combined = np.union1d(first, second)
    combined = combined[combined < l * m - 2 * k]

    counts = decomposition_counts(combined, A, B, m, e0, f0)
    if np.any(counts != 1):
        raise RecforgeError("two_pieces produced an element without a unique decomposition")

    shift = m * int(B.min())
    union = tuple(sorted(set(E) | {m * f for f in F}))
    result = NonrecurrenceWitness(combined - shift, l * m, union, 2 * w_e.delta * eta)
    logger.debug(f"two_pieces: m={m} l={l} l0={l0} |C|={result.size}")
    return _certified(result)


def dilate(S: Iterable[int], m: int) -> Tuple[int, ...]:
    if m < 1:
        raise ParameterError(f"dilation factor must be positive, got {m}")
    return tuple(sorted({m * s for s in S}))


def quotient(S: Iterable[int], m: int) -> Tuple[int, ...]:
    """S/m = {n : m·n ∈ S}."""
    if m < 1:
        raise ParameterError(f"modulus must be positive, got {m}")
    return tuple(sorted({s // m for s in S if s % m == 0}))


# --------------------------------------------------------------------------
# Certificates and the main loops
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RecurrenceCertificate:
    """
    S with evidence that Cay(S) needs more than k colours and a witness
    that S is delta-nonrecurrent.

    multiplier·S ⊆ E − E when E is set. complete is False when the
    construction stopped early; failure says where.
    """

    S: Tuple[int, ...]
    k: int
    delta: Fraction
    evidence: ChromaticEvidence
    witness: NonrecurrenceWitness
    log: List[Dict[str, Any]] = field(default_factory=list)
    E: Optional[str] = None
    multiplier: int = 1
    complete: bool = True
    failure: Optional[SearchFailure] = None


def single_edge_evidence(s: int) -> ChromaticEvidence:
    """One edge {0, s}: Cay({s}) is not 1-colourable."""
    return ChromaticEvidence(
        kind="exhaustion", colors=1, vertices=(0, s), edges=((0, 1),), lower_bound=2, solver={"nodes": 0}
    )


def smallest_difference_above(stream: IntegerStream, bound: Fraction, prefix: int = DIFFERENCE_PREFIX) -> int:
    """The smallest positive element of E − E above bound, among differences of the first elements of E."""
    if stream.kind == "all":
        return math.floor(bound) + 1
    if stream.kind == "arith":
        step = stream.params[1]
        return (math.floor(bound) // step + 1) * step
    values = np.asarray(sorted(set(stream.take(prefix))), dtype=object)
    best: Optional[int] = None
    for i in range(1, len(values)):
        gaps = values[i:] - values[:-i]
        above = [int(g) for g in gaps if g > bound]
        if above:
            low = min(above)
            best = low if best is None else min(best, low)
    if best is None:
        raise ParameterError(f"no difference above {bound} among the first {prefix} elements of E")
    return best


def kriz_iterate(
    delta: RationalLike, K: int, caps: Optional[Caps] = None, strategy: str = "auto"
) -> RecurrenceCertificate:
    """
    K rounds of the construction over ℤ, starting from S₁ = {1} with A = 2ℤ.

    Returns:
        RecurrenceCertificate for S_K (or the last completed round, with failure set)
    """
    from recforge.pieces import finite_piece

    delta = require_open_half(delta)
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    caps = caps or Caps.from_env()
    S = (1,)
    base = smallest_witness(S, PeriodicSet.from_residues(2, [0]), delta, max_modulus=caps.max_modulus)
    log = [{"round": 1, "step": "base", "S": list(S), "A": "2Z", "m": base.m, "C_size": base.size}]
    logger.info(f"Round 1: S={list(S)} m={base.m} |C|={base.size}")

    def build(level: int, eta: Fraction, modulus: int):
        return finite_piece(level, eta, caps, strategy)

    return _iterate(delta, K, caps, S, base, single_edge_evidence(1), log, build, None)


def kriz_iterate_in_difference_set(
    delta: RationalLike, K: int, stream: IntegerStream, caps: Optional[Caps] = None, strategy: str = "auto"
) -> RecurrenceCertificate:
    """
    The construction inside E − E, starting from S₁ = {t} with A = [t] + 2tℤ.

    t is the smallest difference of E above (1/2 − δ)⁻¹.
    """
    from recforge.pieces import piece_in_difference_set

    delta = require_open_half(delta)
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    if not stream.infinite:
        raise ParameterError("E must be infinite")
    caps = caps or Caps.from_env()
    t = smallest_difference_above(stream, 1 / (HALF - delta))
    if not stream.is_difference(t):
        raise RecforgeError(f"{t} is not a difference of {stream.describe()}")
    S = (t,)
    periodic = PeriodicSet.from_residues(2 * t, range(t))
    base = smallest_witness(S, periodic, delta, max_modulus=caps.max_modulus)
    log = [{"round": 1, "step": "base", "S": [t], "A": f"[{t}]+{2 * t}Z", "m": base.m, "C_size": base.size}]
    logger.info(f"Round 1: S={[t]} m={base.m} |C|={base.size}")

    def build(level: int, eta: Fraction, modulus: int):
        return piece_in_difference_set(level, modulus, eta, stream, caps, strategy)

    return _iterate(delta, K, caps, S, base, single_edge_evidence(t), log, build, stream.describe())


def _iterate(
    delta: Fraction,
    K: int,
    caps: Caps,
    S: Tuple[int, ...],
    witness: NonrecurrenceWitness,
    evidence: ChromaticEvidence,
    log: List[Dict[str, Any]],
    build,
    description: Optional[str],
) -> RecurrenceCertificate:
    completed = 1
    failure: Optional[SearchFailure] = None
    for level in range(2, K + 1):
        ratio = witness.density
        delta_k = (delta + ratio) / 2
        eta = (delta / (2 * delta_k) + HALF) / 2
        try:
            piece = build(level, eta, witness.m)
            if isinstance(piece, SearchFailure):
                failure = piece
                break
            current = witness.restate(delta_k)
            l0 = two_pieces_threshold(current, piece.S, eta)
            room = caps.max_modulus // witness.m
            piece_witness = smallest_witness(piece.S, piece.density_set, eta, lower=l0 + 1, max_modulus=room)
            e0, f0 = current.S[0], piece.S[0]
            combined = two_pieces(current, piece_witness, eta, e0=e0, f0=f0)
        except ResourceLimitError as e:
            failure = SearchFailure(e.stage, "resource limit", {"parameter": e.parameter, "limit": e.limit, "value": e.value})
            break
        except RecforgeError as e:
            failure = SearchFailure("assemble", str(e), {"round": level, "error": type(e).__name__})
            break

        new_S = tuple(sorted(set(S) | {witness.m * s for s in piece.S}))
        if len(new_S) > caps.max_set_size:
            failure = SearchFailure("assemble", "resource limit", {"parameter": "|S|", "limit": caps.max_set_size})
            break
        log.append(
            {
                "round": level,
                "step": "two_pieces",
                "delta_k": format_fraction(delta_k),
                "eta": format_fraction(eta),
                "piece": list(piece.S),
                "piece_route": piece.route,
                "piece_log": piece.log,
                "l0": l0,
                "e0": e0,
                "f0": f0,
                "l": piece_witness.m,
                "m": combined.m,
                "C_size": combined.size,
            }
        )
        logger.info(f"Round {level}: |S|={len(new_S)} m={combined.m} |C|={combined.size}")
        # Cay(m_k·S') is a subgraph of Cay(S_{k+1})
        evidence = piece.evidence.dilate(witness.m)
        S, witness = new_S, combined
        completed = level

    if failure is not None:
        logger.warning(f"Stopped after round {completed}: {failure.describe()}")
    return RecurrenceCertificate(
        S=S,
        k=completed,
        delta=delta,
        evidence=evidence,
        witness=witness.restate(delta),
        log=log,
        E=description,
        complete=completed == K,
        failure=failure,
    )
