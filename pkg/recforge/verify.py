"""
Independent certificate checks.

Everything here works on plain document data (lists, ints, "p/q" strings)
and re-derives each claim from scratch. Nothing in this module imports the
constructors, so a certificate passes only on its own merits.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Any, Dict, List, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

BRUTE_FORCE_NODES = 2_000_000
FILE_PREFIX = 100_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return Fraction(str(value))


def all_passed(results: Sequence[CheckResult]) -> bool:
    return all(result.passed for result in results)


def failed_names(results: Sequence[CheckResult]) -> List[str]:
    return [result.name for result in results if not result.passed]


# --------------------------------------------------------------------------
# Nonrecurrence witness
# --------------------------------------------------------------------------


def check_witness(b_values: Sequence[int], m: int, s_values: Sequence[int], delta: Any) -> List[CheckResult]:
    """
    Re-check every invariant of a (B, m) witness for S at density delta.
    """
    results: List[CheckResult] = []
    delta = _fraction(delta)
    b_list = [int(b) for b in b_values]
    s_list = sorted({int(s) for s in s_values})
    m = int(m)

    increasing = all(x < y for x, y in zip(b_list, b_list[1:]))
    results.append(CheckResult("B-sorted-distinct", increasing, "" if increasing else "B is not strictly increasing"))

    positive = bool(s_list) and s_list[0] > 0
    results.append(CheckResult("S-positive", positive, "" if positive else f"S={s_list[:5]}"))

    dense = Fraction(len(set(b_list))) > delta * m
    results.append(
        CheckResult("|B|>delta*m", dense, f"|B|={len(set(b_list))}, delta*m={delta * m}")
    )

    if not b_list:
        for name in ("B⊆[m]", "B+S⊆[m]", "B+S+S⊆[m]", "B∩(B+S)=∅"):
            results.append(CheckResult(name, True, "B is empty"))
        return results

    low, high = min(b_list), max(b_list)
    top = max(s_list) if s_list else 0
    inside = low >= 0 and high < m
    results.append(CheckResult("B⊆[m]", inside, f"min={low}, max={high}, m={m}"))
    results.append(CheckResult("B+S⊆[m]", low >= 0 and high + top < m, f"max(B)+max(S)={high + top}, m={m}"))
    results.append(
        CheckResult("B+S+S⊆[m]", low >= 0 and high + 2 * top < m, f"max(B)+2max(S)={high + 2 * top}, m={m}")
    )

    if low < 0:
        results.append(CheckResult("B∩(B+S)=∅", False, "B has negative elements"))
        return results
    present = np.zeros(high + 1, dtype=bool)
    values = np.asarray(b_list, dtype=np.int64)
    present[values] = True
    clash: Optional[str] = None
    for s in s_list:
        shifted = values + s
        shifted = shifted[shifted <= high]
        hits = shifted[present[shifted]]
        if len(hits):
            clash = f"{int(hits[0]) - s} + {s} = {int(hits[0])}"
            break
    results.append(CheckResult("B∩(B+S)=∅", clash is None, clash or ""))
    return results


# --------------------------------------------------------------------------
# Chromatic evidence
# --------------------------------------------------------------------------


def _kneser_edges(n: int, r: int) -> List[tuple]:
    subsets = [frozenset(c) for c in combinations(range(1, n + 1), r)]
    return [(a, b) for a, b in combinations(range(len(subsets)), 2) if not subsets[a] & subsets[b]]


def _colorable(vertex_count: int, edges: Sequence[Sequence[int]], colors: int, node_cap: int) -> Optional[bool]:
    """Plain backtracking in index order; None when node_cap is reached."""
    if colors <= 0:
        return vertex_count == 0
    neighbors: List[List[int]] = [[] for _ in range(vertex_count)]
    for a, b in edges:
        neighbors[max(a, b)].append(min(a, b))
    assignment = [-1] * vertex_count
    nodes = 0
    stack = [(0, 0)]
    while stack:
        vertex, color = stack.pop()
        if vertex == vertex_count:
            return True
        if color >= colors:
            continue
        nodes += 1
        if nodes > node_cap:
            return None
        stack.append((vertex, color + 1))
        if all(assignment[u] != color for u in neighbors[vertex]):
            assignment[vertex] = color
            stack.append((vertex + 1, 0))
    return False


def check_evidence(
    s_values: Sequence[int], evidence: Mapping[str, Any], k: int, strict: bool = True
) -> List[CheckResult]:
    """
    Re-check that the evidence graph lives in Cay(S) and has no proper k-colouring.
    """
    results: List[CheckResult] = []
    s_set = {int(s) for s in s_values}
    vertices = [int(v) for v in evidence.get("vertices", [])]
    edges = [tuple(int(x) for x in edge) for edge in evidence.get("edges", [])]
    colors = int(evidence.get("colors", -1))
    kind = evidence.get("kind")

    results.append(CheckResult("evidence-colors≥k", colors >= k, f"colors={colors}, k={k}"))

    distinct = len(set(vertices)) == len(vertices)
    results.append(CheckResult("evidence-injective", distinct, "" if distinct else "repeated vertex"))

    bad_edge: Optional[str] = None
    for a, b in edges:
        if not (0 <= a < len(vertices) and 0 <= b < len(vertices)) or a == b:
            bad_edge = f"edge ({a}, {b}) is not between two vertices"
            break
        if abs(vertices[a] - vertices[b]) not in s_set:
            bad_edge = f"|{vertices[a]} - {vertices[b]}| not in S"
            break
    results.append(CheckResult("evidence-edges⊆Cay(S)", bad_edge is None, bad_edge or f"{len(edges)} edges"))

    if kind == "embedding":
        kneser = evidence.get("kneser") or [0, 0]
        n, r = int(kneser[0]), int(kneser[1])
        shaped = 1 <= r and 2 * r <= n and len(vertices) == comb(n, r)
        same_edges = shaped and sorted(tuple(sorted(e)) for e in edges) == _kneser_edges(n, r)
        results.append(CheckResult("evidence-kneser-edges", same_edges, f"KG({n},{r})"))
        # chromatic number of KG(n, r) is n - 2r + 2
        bound = n - 2 * r + 2 if shaped else 0
        claim = bound >= colors + 1
        if claim and len(vertices) <= 20:
            claim = _colorable(len(vertices), edges, colors, BRUTE_FORCE_NODES) is False
        results.append(CheckResult("evidence-lower-bound", claim, f"KG({n},{r}) needs {bound} colours"))
        return results

    if kind != "exhaustion":
        results.append(CheckResult("evidence-lower-bound", False, f"unknown evidence kind {kind!r}"))
        return results

    if colors <= 0:
        verdict: Optional[bool] = len(vertices) > 0
    elif colors == 1:
        verdict = len(edges) > 0
    elif colors == 2:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(vertices)))
        graph.add_edges_from(edges)
        verdict = not nx.is_bipartite(graph)
    else:
        colorable = _colorable(len(vertices), edges, colors, BRUTE_FORCE_NODES)
        verdict = None if colorable is None else not colorable
    if verdict is None:
        results.append(
            CheckResult("evidence-lower-bound", not strict, "too large to re-check by brute force")
        )
    else:
        results.append(CheckResult("evidence-lower-bound", verdict, f"no proper {colors}-colouring"))
    return results


# --------------------------------------------------------------------------
# Difference-set membership
# --------------------------------------------------------------------------


def _difference_oracle(description: str):
    kind, _, rest = description.partition(":")
    if kind == "all":
        return lambda x: True
    if kind == "arith":
        step = int(rest.split(",")[1])
        return lambda x: x % step == 0
    if kind == "powers":
        base = int(rest)

        def is_power_gap(x: int) -> bool:
            # x = base^j (base^i - 1)
            if x == 0:
                return True
            while x % base == 0:
                x //= base
            x += 1
            if x == 1:
                return False
            while x % base == 0:
                x //= base
            return x == 1

        return is_power_gap
    if kind == "file":
        members: List[int] = []
        with open(rest, "r", encoding="utf-8") as handle:
            for line in handle:
                text = line.split("#", 1)[0].strip()
                if text:
                    members.append(int(text))
                if len(members) >= FILE_PREFIX:
                    break
        member_set = set(members)
        return lambda x: any(e + x in member_set for e in members)
    raise ValueError(f"unknown set description {description!r}")


def check_difference_membership(s_values: Sequence[int], multiplier: int, description: str) -> List[CheckResult]:
    """multiplier·S ⊆ E − E, element by element."""
    try:
        oracle = _difference_oracle(description)
    except (OSError, ValueError) as e:
        return [CheckResult("S⊆E-E", False, str(e))]
    for s in s_values:
        if not oracle(abs(int(multiplier) * int(s))):
            return [CheckResult("S⊆E-E", False, f"{multiplier}*{s} is not a difference of {description}")]
    return [CheckResult("S⊆E-E", True, f"{len(s_values)} elements")]


# --------------------------------------------------------------------------
# Whole certificate
# --------------------------------------------------------------------------


def verify_certificate(certificate: Mapping[str, Any], strict: bool = True) -> List[CheckResult]:
    """
    Run every check on a serialized certificate body.

    The construction log is never consulted.
    """
    results: List[CheckResult] = []
    try:
        s_values = [int(s) for s in certificate["S"]]
        witness: Dict[str, Any] = certificate["witness"]
        delta = _fraction(certificate["delta"])
        k = int(certificate["k"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        return [CheckResult("document-shape", False, f"missing or malformed field: {e}")]

    same_s = sorted(int(s) for s in witness.get("S", [])) == sorted(s_values)
    results.append(CheckResult("witness-S=S", same_s, "" if same_s else "witness certifies a different S"))
    results.extend(check_witness(witness.get("B", []), witness.get("m", 0), s_values, delta))
    results.extend(check_evidence(s_values, certificate.get("evidence", {}), k, strict))

    description = certificate.get("E")
    if description:
        results.extend(check_difference_membership(s_values, certificate.get("multiplier", 1), description))

    failed = failed_names(results)
    if failed:
        logger.warning(f"Certificate checks failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(results)} certificate checks passed")
    return results
