"""
Finite pieces: sets S that are k-chromatically recurrent and δ-nonrecurrent.

Two routes build them:

  kneser  A Hamming ball A ⊂ F₂^d avoiding H_R(1) is thickened into boxes on
          𝕋^d; the Kneser graph KG(d, r) inside Cay(H_R(1)) is copied into ℤ
          through an orbit n ↦ nα. S is the set of edge differences.
  circle  For k ≤ 2 only: a pair {x, y} with x/g + y/g odd sits inside the
          ε-copy of {1/2} ⊂ 𝕋 for α = c/(gq), and Cay({x, y}) holds an odd
          cycle.

'auto' tries the Kneser route first and falls back to circles.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from recforge.assembly import (
    NonrecurrenceWitness,
    PeriodicSet,
    RecurrenceCertificate,
    smallest_witness,
)
from recforge.config import Caps
from recforge.errors import ParameterError, RecforgeError, ResourceLimitError, SearchFailure
from recforge.f2core import BitVector, HammingBallSpec, enumerate_ball, f2_nonrecurrence_witness
from recforge.graphs import ChromaticEvidence, exhaustion_evidence, kneser_embedding_for_radius
from recforge.rationals import format_fraction, require_open_half
from recforge.streams import IntegerStream
from recforge.torus import (
    CopySpec,
    TorusPoint,
    choose_alpha,
    copy_cayley_vertices,
    lift_nonrecurrence,
    orbit_pattern,
    tilde_h_member,
)

logger = logging.getLogger(__name__)

STRATEGIES = ("auto", "kneser", "circle")
CIRCLE_POOL = 256
CIRCLE_MAX_LEVEL = 2
MIN_CLASS_HITS = 64


@dataclass(frozen=True, eq=False)
class Piece:
    """
    A finite piece with its certificate parts.

    density_set is a periodic set of density above delta with
    (A − A) ∩ S = ∅; multiplier·S ⊆ E − E when E is set.
    """

    S: Tuple[int, ...]
    k: int
    delta: Fraction
    route: str
    density_set: PeriodicSet
    evidence: ChromaticEvidence
    witness: NonrecurrenceWitness
    log: Dict[str, Any] = field(default_factory=dict)
    multiplier: int = 1
    E: Optional[str] = None

    @property
    def success(self) -> bool:
        return True

    @property
    def certificate(self) -> RecurrenceCertificate:
        return RecurrenceCertificate(
            S=self.S,
            k=self.k,
            delta=self.delta,
            evidence=self.evidence,
            witness=self.witness,
            log=[dict(self.log, route=self.route)],
            E=self.E,
            multiplier=self.multiplier,
        )


PieceOutcome = Union[Piece, SearchFailure]


def _trivial_piece(delta: Fraction, caps: Caps) -> Piece:
    """k = 0: every S is 0-chromatically recurrent; S = {1} with A = 2ℤ."""
    periodic = PeriodicSet.from_residues(2, [0])
    witness = smallest_witness((1,), periodic, delta, max_modulus=caps.max_modulus)
    evidence = ChromaticEvidence(kind="exhaustion", colors=0, vertices=(0,), edges=(), lower_bound=1)
    return Piece((1,), 0, delta, "trivial", periodic, evidence, witness, {"A": "2Z"})


# --------------------------------------------------------------------------
# Kneser route
# --------------------------------------------------------------------------


def choose_dimension(k: int, delta: Fraction, max_dimension: int) -> Union[Tuple[int, int, int], SearchFailure]:
    """
    The smallest d (then radius R ∈ {k−1, k}) with a ball witness in F₂^d and
    χ(KG(d, r)) = d − 2r + 2 ≥ k + 1, r = ⌈(d − R)/2⌉.

    Returns:
        (d, R, r) or SearchFailure
    """
    for d in range(1, max_dimension + 1):
        for radius in (k - 1, k):
            if radius < 0:
                continue
            r = -(-(d - radius) // 2)
            if r < 1 or 2 * r > d or d - 2 * r + 2 < k + 1:
                continue
            if d // 2 - radius < 0:
                continue
            if isinstance(f2_nonrecurrence_witness(d, radius, delta), SearchFailure):
                continue
            logger.info(f"Dimension d={d}, radius R={radius}, Kneser KG({d},{r})")
            return d, radius, r
    return SearchFailure("dimension", "no dimension within the cap", {"k": k, "max_d": max_dimension})


def _kneser_piece(k: int, delta: Fraction, caps: Caps, stream: IntegerStream, modulus: int) -> PieceOutcome:
    chosen = choose_dimension(k, delta, caps.max_dimension)
    if isinstance(chosen, SearchFailure):
        return chosen
    d, radius, r = chosen
    if (1 << d) > caps.max_cells:
        raise ResourceLimitError("f2_witness", "2^d", caps.max_cells, 1 << d)

    ball = f2_nonrecurrence_witness(d, radius, delta)
    words = ball.members(caps.max_cells)
    forbidden = enumerate_ball(HammingBallSpec(d, radius, BitVector.ones(d)), caps.max_cells)
    lift = lift_nonrecurrence(words, forbidden, d, delta)
    if isinstance(lift, SearchFailure):
        return lift
    epsilon = lift.epsilon
    q = math.ceil(2 / epsilon)

    embedding = kneser_embedding_for_radius(d, radius, caps.max_cells)
    if not embedding.verified:
        raise RecforgeError(f"KG({d},{embedding.r}) does not embed in Cay(H_{radius}(1))")
    if k == 1:
        # one Kneser edge already needs two colours; copy it as {0, v_a + v_b}
        a, b = min(embedding.kneser.edges)
        targets = [
            TorusPoint.from_g(BitVector.zero(d)),
            TorusPoint.from_g(embedding.vectors[a] + embedding.vectors[b]),
        ]
        copied_edges: Tuple[Tuple[int, int], ...] = ((0, 1),)
    else:
        targets = [TorusPoint.from_g(v) for v in embedding.vectors]
        copied_edges = tuple(sorted(embedding.kneser.edges))

    choice = choose_alpha(stream, d, q, caps.horizon, caps.seed, caps.max_cells, targets=targets)
    if isinstance(choice, SearchFailure):
        return choice
    alpha = choice.alpha

    copies = copy_cayley_vertices(stream, alpha, targets, epsilon, caps.horizon)
    if isinstance(copies, SearchFailure):
        return copies
    images = [copies[t] for t in targets]

    differences = sorted({abs(images[a] - images[b]) for a, b in copied_edges})
    spec = CopySpec(alpha, radius, epsilon)
    stray = [s for s in differences if not tilde_h_member(s, spec)]
    if stray:
        raise RecforgeError(f"edge differences {stray[:3]} fall outside the epsilon-copy")

    period, mask = orbit_pattern(alpha, lift.boxes, caps.max_cells)
    periodic = PeriodicSet(period, mask)
    residue = images[0] % modulus
    S = tuple(s // modulus for s in differences)
    vertices = tuple((g - residue) // modulus for g in images)
    if modulus > 1:
        shift, periodic = periodic.densest_restriction(modulus)
    else:
        shift = 0
    if periodic.density <= delta:
        return SearchFailure("orbit_pattern", "orbit preimage too sparse", {"density": str(periodic.density)})

    if k == 1:
        evidence = ChromaticEvidence(
            kind="exhaustion", colors=1, vertices=vertices, edges=copied_edges, lower_bound=2, solver={"nodes": 0}
        )
    else:
        evidence = ChromaticEvidence(
            kind="embedding",
            colors=k,
            vertices=vertices,
            edges=copied_edges,
            lower_bound=embedding.chromatic_lower_bound,
            kneser=(d, embedding.r),
        )
    log = {
        "d": d,
        "R": radius,
        "r": embedding.r,
        "copied": "edge" if k == 1 else "kneser",
        "epsilon": format_fraction(epsilon),
        "epsilon_prime": format_fraction(lift.epsilon_prime),
        "Q": q,
        "alpha": [format_fraction(c) for c in alpha.coords],
        "alpha_candidate": choice.candidate,
        "period": period,
        "density": format_fraction(periodic.density),
        "residue_shift": shift,
    }
    witness = smallest_witness(S, periodic, delta, max_modulus=caps.max_modulus)
    return Piece(S, k, delta, "kneser", periodic, evidence, witness, log)


# --------------------------------------------------------------------------
# Circle route
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CirclePair:
    x: int
    y: int
    g: int
    q: int
    inset: Fraction
    density: Fraction


def circle_candidate(x: int, y: int) -> Optional[CirclePair]:
    """The circle data for {x, y}, or None when x/g + y/g is even."""
    g = math.gcd(x, y)
    q = x // g + y // g
    if q % 2 == 0:
        return None
    inset = Fraction(1, 2 * q) + Fraction(1, 4 * g * q)
    if inset >= Fraction(1, 4):
        return None
    period = g * q
    low = math.ceil(period * inset)
    high = math.floor(period * (Fraction(1, 2) - inset))
    return CirclePair(x, y, g, q, inset, Fraction(max(high - low + 1, 0), period))


def circle_alpha(pair: CirclePair) -> Fraction:
    """c/(gq) with x'c ≡ (q − 1)/2 (mod q) and gcd(c, g) = 1."""
    x_reduced = pair.x // pair.g
    c = (pair.q - 1) // 2 * pow(x_reduced, -1, pair.q) % pair.q
    while math.gcd(c, pair.g) != 1:
        c += pair.q
    return Fraction(c, pair.g * pair.q)


def best_circle_pair(pool: Sequence[int], delta: Fraction, max_cells: int) -> Optional[CirclePair]:
    """The pair minimising 2·max/(density − δ), lexicographically smallest on ties."""
    best: Optional[Tuple[Fraction, int, int]] = None
    chosen: Optional[CirclePair] = None
    for x, y in combinations(sorted(set(pool)), 2):
        pair = circle_candidate(x, y)
        if pair is None or pair.density <= delta or pair.g * pair.q > max_cells:
            continue
        if Fraction(1, 2) - 2 * pair.inset <= delta:
            continue
        key = (Fraction(2 * y) / (pair.density - delta), x, y)
        if best is None or key < best:
            best, chosen = key, pair
    return chosen


def _circle_piece(k: int, delta: Fraction, caps: Caps, pool: Sequence[int]) -> PieceOutcome:
    if k > CIRCLE_MAX_LEVEL:
        return SearchFailure("circle", "chromatic level above 2", {"k": k})
    pair = best_circle_pair(pool, delta, caps.max_cells)
    if pair is None:
        return SearchFailure("circle", "no pair dense enough", {"pool": len(pool), "delta": str(delta)})
    alpha = TorusPoint((circle_alpha(pair),))
    lift = lift_nonrecurrence([0], [1], 1, delta, alpha, epsilon_prime=pair.inset)
    if isinstance(lift, SearchFailure):
        return lift
    spec = CopySpec(alpha, 0, lift.epsilon)
    if not (tilde_h_member(pair.x, spec) and tilde_h_member(pair.y, spec)):
        raise RecforgeError(f"{{{pair.x}, {pair.y}}} falls outside the epsilon-copy")

    period, mask = orbit_pattern(alpha, lift.boxes, caps.max_cells)
    periodic = PeriodicSet(period, mask)
    evidence = exhaustion_evidence([pair.g * j for j in range(pair.q)], (pair.x, pair.y), caps.node_budget)
    if evidence.lower_bound < k + 1:
        raise RecforgeError(f"Cay({{{pair.x}, {pair.y}}}) window only needs {evidence.lower_bound} colours")
    S = (pair.x, pair.y)
    log = {
        "pair": [pair.x, pair.y],
        "g": pair.g,
        "q": pair.q,
        "alpha": format_fraction(alpha.coords[0]),
        "epsilon": format_fraction(lift.epsilon),
        "density": format_fraction(periodic.density),
    }
    witness = smallest_witness(S, periodic, delta, max_modulus=caps.max_modulus)
    logger.info(f"Circle piece {list(S)} (q={pair.q}, g={pair.g}), witness m={witness.m}")
    return Piece(S, k, delta, "circle", periodic, evidence, witness, log)


# --------------------------------------------------------------------------
# Public entry points
# --------------------------------------------------------------------------


def _run(strategy: str, k: int, kneser, circle) -> PieceOutcome:
    if strategy not in STRATEGIES:
        raise ParameterError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if strategy == "circle":
        return circle()
    if strategy == "kneser":
        return kneser()
    try:
        outcome = kneser()
    except ResourceLimitError as e:
        if k > CIRCLE_MAX_LEVEL:
            raise
        logger.warning(f"Kneser route hit {e}; trying circle pieces")
        return circle()
    if isinstance(outcome, SearchFailure) and k <= CIRCLE_MAX_LEVEL:
        logger.warning(f"Kneser route failed ({outcome.describe()}); trying circle pieces")
        return circle()
    return outcome


def finite_piece(k: int, delta, caps: Optional[Caps] = None, strategy: str = "auto") -> PieceOutcome:
    """
    A finite S ⊂ ℕ with χ(Cay(S)) > k that is delta-nonrecurrent.

    Args:
        k: Chromatic level
        delta: Density in (0, 1/2)
        caps: Resource limits
        strategy: 'auto', 'kneser' or 'circle'

    Returns:
        Piece, or SearchFailure naming the stage that gave up

    Raises:
        ResourceLimitError: when a cap is hit and no fallback applies
    """
    delta = require_open_half(delta)
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    caps = caps or Caps.from_env()
    if k == 0:
        return _trivial_piece(delta, caps)
    everything = IntegerStream("all")
    return _run(
        strategy,
        k,
        lambda: _kneser_piece(k, delta, caps, everything, 1),
        lambda: _circle_piece(k, delta, caps, range(1, CIRCLE_POOL + 1)),
    )


def congruent_class(stream: IntegerStream, modulus: int, horizon: int, hits: int = MIN_CLASS_HITS) -> Optional[int]:
    """The first residue mod modulus seen `hits` times in E."""
    if modulus == 1:
        return 0
    counts: Dict[int, int] = {}
    for n in stream.take(horizon):
        r = n % modulus
        counts[r] = counts.get(r, 0) + 1
        if counts[r] >= hits:
            return r
    return None


def difference_pool(stream: IntegerStream, modulus: int, size: int = CIRCLE_POOL, prefix: int = MIN_CLASS_HITS) -> List[int]:
    """The smallest distinct positive values of (E' − E')/m over a prefix of E'."""
    values = sorted(set(stream.take(prefix)))
    gaps = {(b - a) // modulus for a, b in combinations(values, 2) if b > a}
    return sorted(gaps)[:size]


def piece_in_difference_set(
    k: int,
    modulus: int,
    delta,
    stream: IntegerStream,
    caps: Optional[Caps] = None,
    strategy: str = "auto",
) -> PieceOutcome:
    """
    A piece S with modulus·S ⊆ E − E.

    E' is the first residue class of E mod modulus to collect enough
    elements; the piece is built from orbits and differences of E' and
    divided by modulus.
    """
    delta = require_open_half(delta)
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    if modulus < 1:
        raise ParameterError(f"modulus must be positive, got {modulus}")
    if not stream.infinite:
        raise ParameterError("E must be infinite")
    caps = caps or Caps.from_env()
    residue = congruent_class(stream, modulus, caps.horizon)
    if residue is None:
        return SearchFailure("difference_set", "no residue class filled", {"modulus": modulus, "horizon": caps.horizon})
    sub = stream.congruent(modulus, residue)
    logger.info(f"E' = {sub.describe()}")

    if k == 0:
        outcome: PieceOutcome = _circle_piece(1, delta, caps, difference_pool(sub, modulus))
    else:
        outcome = _run(
            strategy,
            k,
            lambda: _kneser_piece(k, delta, caps, sub, modulus),
            lambda: _circle_piece(k, delta, caps, difference_pool(sub, modulus)),
        )
    if isinstance(outcome, SearchFailure):
        return outcome

    outside = [s for s in outcome.S if not stream.is_difference(modulus * s)]
    if outside:
        raise RecforgeError(f"{modulus}*{outside[0]} is not a difference of {stream.describe()}")
    log = dict(outcome.log, modulus=modulus, residue=residue)
    return Piece(
        outcome.S,
        k,
        delta,
        outcome.route,
        outcome.density_set,
        outcome.evidence,
        outcome.witness,
        log,
        multiplier=modulus,
        E=stream.describe(),
    )
