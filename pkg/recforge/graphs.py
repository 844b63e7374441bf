"""
Graph construction and colouring.

Builds Kneser graphs, Cayley graphs over F₂^d, ℤ/Nℤ and integer windows,
computes chromatic numbers exactly within a node budget, and checks
colourings and subgraph embeddings. networkx supplies the greedy DSATUR
upper bound and the maximal independent sets; the exact searches below are
our own implicit enumerations.
"""

import logging
import sys
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from recforge.config import get_max_cells, get_node_budget
from recforge.errors import ParameterError, ResourceLimitError
from recforge.f2core import BitVector, HammingBallSpec

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

# The set-cover phase runs only on graphs with few maximal independent sets
MAX_COVER_VERTICES = 400
MAX_COVER_SETS = 2000
COVER_NODE_LIMIT = 1_000_000


@dataclass(frozen=True)
class Graph:
    """Finite loop-free undirected graph on vertices 0..vertex_count-1."""

    vertex_count: int
    edges: FrozenSet[Edge]
    labels: Optional[Tuple[Any, ...]] = None

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ParameterError(f"edge ({u}, {v}) outside 0..{self.vertex_count - 1}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if self.labels is not None and len(self.labels) != self.vertex_count:
            raise ParameterError("labels must name every vertex")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph


def _cap(value: int, stage: str, parameter: str, max_cells: Optional[int]) -> None:
    limit = get_max_cells() if max_cells is None else max_cells
    if value > limit:
        raise ResourceLimitError(stage, parameter, limit, value)


def kneser_graph(n: int, r: int, max_cells: Optional[int] = None) -> Graph:
    """
    KG(n, r): the r-subsets of {1..n}, adjacent when disjoint.

    Labels are sorted tuples of the subset elements, in lexicographic order.
    """
    if not 1 <= r <= n:
        raise ParameterError(f"need 1 <= r <= n, got n={n}, r={r}")
    _cap(comb(n, r), "kneser_graph", "C(n,r)", max_cells)
    subsets = list(combinations(range(1, n + 1), r))
    masks = [sum(1 << (i - 1) for i in subset) for subset in subsets]
    edges = {
        (a, b)
        for a, b in combinations(range(len(subsets)), 2)
        if masks[a] & masks[b] == 0
    }
    logger.debug(f"KG({n},{r}): {len(subsets)} vertices, {len(edges)} edges")
    return Graph(len(subsets), frozenset(edges), tuple(subsets))


def cayley_graph(
    group_elements: Sequence[Any],
    difference: Callable[[Any, Any], Any],
    generators: Iterable[Any],
) -> Graph:
    """
    Cay(S) on an explicit list of group elements.

    Args:
        group_elements: The vertices, in index order
        difference: (x, y) -> x - y in the group
        generators: S; must not contain the identity

    Returns:
        Graph with x ~ y iff x - y or y - x lies in S
    """
    generators = set(generators)
    if group_elements:
        identity = difference(group_elements[0], group_elements[0])
        if identity in generators:
            raise ParameterError("S contains the identity, Cayley graph would have loops")
    edges = set()
    for a, b in combinations(range(len(group_elements)), 2):
        x, y = group_elements[a], group_elements[b]
        if difference(x, y) in generators or difference(y, x) in generators:
            edges.add((a, b))
    return Graph(len(group_elements), frozenset(edges), tuple(group_elements))


def f2_cayley_graph(dim: int, generators: Iterable[Union[BitVector, int]], max_cells: Optional[int] = None) -> Graph:
    """Cay(S) on F₂^dim; vertex i is the vector with bits i."""
    _cap(1 << dim, "f2_cayley_graph", "2^d", max_cells)
    words = {g.bits if isinstance(g, BitVector) else int(g) for g in generators}
    if 0 in words:
        raise ParameterError("S contains the zero vector, Cayley graph would have loops")
    edges = {(x, x ^ s) for x in range(1 << dim) for s in words if x < x ^ s}
    return Graph(1 << dim, frozenset(edges))


def cyclic_cayley_graph(modulus: int, generators: Iterable[int]) -> Graph:
    """Cay(ℤ/Nℤ, S)."""
    if modulus < 1:
        raise ParameterError(f"modulus must be positive, got {modulus}")
    residues = {s % modulus for s in generators}
    if 0 in residues:
        raise ParameterError(f"S contains a multiple of {modulus}, Cayley graph would have loops")
    edges = {(x, (x + s) % modulus) for x in range(modulus) for s in residues}
    return Graph(modulus, frozenset(edges))


def cayley_graph_interval(generators: Iterable[int], window: int) -> Graph:
    """Cay_ℤ(S) induced on the window 0..window-1."""
    gens = sorted(set(generators))
    if not gens:
        raise ParameterError("S must be non-empty")
    if gens[0] <= 0:
        raise ParameterError(f"S must hold positive integers, got {gens[0]}")
    if gens[-1] >= window:
        raise ParameterError(f"max(S)={gens[-1]} must be below the window {window}")
    edges = {(a, a + s) for s in gens for a in range(window - s)}
    return Graph(window, frozenset(edges))


# --------------------------------------------------------------------------
# Colouring
# --------------------------------------------------------------------------


def is_proper_coloring(graph: Graph, coloring: Union[Sequence[int], Mapping[int, int]]) -> bool:
    """True iff no edge is monochromatic."""
    if isinstance(coloring, Mapping):
        missing = [v for v in range(graph.vertex_count) if v not in coloring]
        if missing:
            raise ParameterError(f"colouring is partial, missing vertex {missing[0]}")
        lookup = coloring
    else:
        if len(coloring) != graph.vertex_count:
            raise ParameterError(f"colouring has {len(coloring)} entries for {graph.vertex_count} vertices")
        lookup = list(coloring)
    return all(lookup[u] != lookup[v] for u, v in graph.edges)


def greedy_clique(graph: Graph) -> List[int]:
    """A maximal clique grown greedily from each vertex; the largest one found."""
    adj = [set(neighbors) for neighbors in graph.adjacency()]
    best: List[int] = [0] if graph.vertex_count else []
    order = sorted(range(graph.vertex_count), key=lambda v: (-len(adj[v]), v))
    for start in order:
        if len(best) > len(adj[start]):
            break
        clique = [start]
        candidates = set(adj[start])
        while candidates:
            v = min(candidates, key=lambda u: (-len(adj[u] & candidates), u))
            clique.append(v)
            candidates &= adj[v]
        if len(clique) > len(best):
            best = clique
    return sorted(best)


@dataclass(frozen=True)
class ChromaticResult:
    """
    Outcome of the exact solver.

    chi is set only when exact. coloring is a proper colouring with `upper`
    colours; lower_certificate says why `lower` colours are needed.
    """

    chi: Optional[int]
    exact: bool
    lower: int
    upper: int
    coloring: Tuple[int, ...]
    lower_certificate: Dict[str, Any] = field(default_factory=dict)
    nodes: int = 0


class _BudgetExceeded(Exception):
    pass


class _ColoringSearch:
    """k-colourability by backtracking with DSATUR ordering and forward checking."""

    def __init__(self, adj: List[List[int]], budget: int):
        self.adj = adj
        self.n = len(adj)
        self.budget = budget
        self.nodes = 0

    def run(self, k: int, clique: Sequence[int]) -> Optional[List[int]]:
        self.k = k
        self.colors = [-1] * self.n
        # counts[v][c]: coloured neighbours of v with colour c
        self.counts = [[0] * k for _ in range(self.n)]
        self.saturation = [0] * self.n
        for c, v in enumerate(clique):
            self._assign(v, c)
        found = self._search(len(clique) - 1, self.n - len(clique))
        return list(self.colors) if found else None

    def _assign(self, v: int, c: int) -> bool:
        self.colors[v] = c
        ok = True
        for u in self.adj[v]:
            self.counts[u][c] += 1
            if self.counts[u][c] == 1:
                self.saturation[u] += 1
                if self.colors[u] == -1 and self.saturation[u] >= self.k:
                    ok = False
        return ok

    def _unassign(self, v: int, c: int) -> None:
        self.colors[v] = -1
        for u in self.adj[v]:
            self.counts[u][c] -= 1
            if self.counts[u][c] == 0:
                self.saturation[u] -= 1

    def _select(self) -> int:
        best, best_key = -1, None
        for v in range(self.n):
            if self.colors[v] != -1:
                continue
            key = (self.saturation[v], len(self.adj[v]), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def _search(self, highest: int, remaining: int) -> bool:
        if remaining == 0:
            return True
        v = self._select()
        for c in range(min(highest + 2, self.k)):
            if self.counts[v][c]:
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise _BudgetExceeded()
            ok = self._assign(v, c)
            if ok and self._search(max(highest, c), remaining - 1):
                return True
            self._unassign(v, c)
        return False


def maximal_independent_sets(graph: Graph, limit: int = MAX_COVER_SETS) -> Optional[List[FrozenSet[int]]]:
    """All maximal independent sets (maximal cliques of the complement), or None past limit."""
    found: List[FrozenSet[int]] = []
    for clique in nx.find_cliques(nx.complement(graph.to_networkx())):
        found.append(frozenset(clique))
        if len(found) > limit:
            return None
    return found


class _CoverSearch:
    """
    Fewest maximal independent sets covering every vertex, by include/exclude branching.

    Always branches on the set covering the most uncovered vertices. A node is
    cut when the largest `slots` gains among the sets still allowed cannot
    cover what is left.
    """

    def __init__(self, sets: Sequence[FrozenSet[int]], vertex_count: int, budget: int):
        self.members = np.zeros((len(sets), vertex_count), dtype=bool)
        for i, members in enumerate(sets):
            self.members[i, sorted(members)] = True
        # float64 so the gains go through BLAS; counts stay exact
        self.weights = self.members.astype(np.float64)
        self.budget = budget
        self.nodes = 0
        self.cover: Optional[List[int]] = None

    def run(self, upper: int, lower: int) -> Optional[List[int]]:
        """Search for a cover with fewer than `upper` sets; stops early at `lower`."""
        self.best = upper
        self.lower = lower
        self._search(
            np.ones(self.members.shape[1], dtype=bool), [], np.zeros(len(self.members), dtype=bool)
        )
        return self.cover

    def coloring(self, cover: Sequence[int]) -> Tuple[int, ...]:
        chosen = self.members[list(cover)]
        return tuple(int(c) for c in np.argmax(chosen, axis=0))

    def _search(self, uncovered: np.ndarray, chosen: List[int], excluded: np.ndarray) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExceeded()
        remaining = int(uncovered.sum())
        if remaining == 0:
            self.best, self.cover = len(chosen), list(chosen)
            return
        slots = self.best - 1 - len(chosen)
        if slots <= 0 or self.best <= self.lower:
            return
        gain = self.weights @ uncovered.astype(np.float64)
        gain[excluded] = 0
        top = gain if slots >= len(gain) else np.partition(gain, len(gain) - slots)[len(gain) - slots :]
        if int(top.sum()) < remaining:
            return
        pick = int(np.argmax(gain))
        self._search(uncovered & ~self.members[pick], chosen + [pick], excluded)
        excluded[pick] = True
        self._search(uncovered, chosen, excluded)
        excluded[pick] = False


def chromatic_number_exact(graph: Graph, budget: Optional[int] = None) -> ChromaticResult:
    """
    χ(graph) with certificates, or bounds flagged inexact when the budget runs out.

    Two exact phases run in turn, each with its own node budget. On graphs
    with few maximal independent sets the colouring is a smallest cover by
    such sets; |V|/α gives a lower bound on the way. Otherwise DSATUR
    backtracking tries k = upper − 1, upper − 2, ... down to the lower bound.

    Args:
        graph: Graph to colour
        budget: Node-expansion limit per phase (defaults to RECFORGE_NODE_BUDGET)

    Returns:
        ChromaticResult
    """
    budget = get_node_budget() if budget is None else budget
    n = graph.vertex_count
    if n == 0:
        return ChromaticResult(0, True, 0, 0, (), {"kind": "empty"})
    if not graph.edges:
        return ChromaticResult(1, True, 1, 1, (0,) * n, {"kind": "clique", "clique": [0]})

    clique = greedy_clique(graph)
    greedy = nx.greedy_color(graph.to_networkx(), strategy="DSATUR")
    coloring = tuple(greedy[v] for v in range(n))
    upper = max(coloring) + 1
    lower = len(clique)
    lower_certificate: Dict[str, Any] = {"kind": "clique", "clique": clique}
    nodes = 0

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, n + MAX_COVER_SETS + 1000))
    exact = True
    try:
        sets = maximal_independent_sets(graph) if lower < upper and budget > 0 and n <= MAX_COVER_VERTICES else None
        if sets is not None:
            alpha = max(len(s) for s in sets)
            if -(-n // alpha) > lower:
                lower = -(-n // alpha)
                lower_certificate = {"kind": "independence", "alpha": alpha}
            cover_search = _CoverSearch(sets, n, min(budget, COVER_NODE_LIMIT))
            try:
                if lower < upper:
                    cover_search.run(upper, lower)
                    if lower < cover_search.best:
                        lower = cover_search.best
                        lower_certificate = {"kind": "cover", "colors": lower - 1, "sets": len(sets)}
            except _BudgetExceeded:
                logger.info(f"Cover search stopped after {cover_search.nodes} nodes; falling back to DSATUR")
            if cover_search.cover is not None:
                coloring, upper = cover_search.coloring(cover_search.cover), len(cover_search.cover)
            nodes += cover_search.nodes

        search = _ColoringSearch(graph.adjacency(), budget)
        try:
            for k in range(upper - 1, lower - 1, -1):
                found = search.run(k, clique)
                if found is None:
                    lower = k + 1
                    lower_certificate = {"kind": "exhaustion", "colors": k, "nodes": search.nodes}
                    break
                coloring, upper = tuple(found), k
        except _BudgetExceeded:
            exact = lower == upper
            logger.warning(f"Colouring budget {budget} exhausted; bounds {lower}..{upper}")
        nodes += search.nodes
    finally:
        sys.setrecursionlimit(limit)

    exact = exact and lower == upper
    logger.debug(f"chromatic search: lower={lower} upper={upper} nodes={nodes}")
    return ChromaticResult(
        chi=upper if exact else None,
        exact=exact,
        lower=lower,
        upper=upper,
        coloring=coloring,
        lower_certificate=lower_certificate,
        nodes=nodes,
    )


def lift_cyclic_coloring(coloring: Sequence[int], modulus: int, length: int) -> List[int]:
    """Periodic extension of a colouring of ℤ/Nℤ to 0..length-1."""
    if len(coloring) != modulus:
        raise ParameterError(f"colouring has {len(coloring)} entries, modulus is {modulus}")
    return [coloring[i % modulus] for i in range(length)]


@dataclass(frozen=True)
class IntegerChromaticBounds:
    """Two-sided bounds on χ(Cay_ℤ(S))."""

    lower: int
    upper: int
    window: int
    modulus: int
    periodic_coloring: Tuple[int, ...]

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def integer_chromatic_bounds(
    generators: Iterable[int],
    window: Optional[int] = None,
    modulus: Optional[int] = None,
    budget: Optional[int] = None,
) -> IntegerChromaticBounds:
    """
    Bound χ(Cay_ℤ(S)) from both sides.

    The lower bound solves an integer window, the upper bound colours
    Cay(ℤ/Nℤ, S) and extends periodically. With no modulus given, N is
    scanned from 2·max(S)+1 until the bounds meet.
    """
    gens = sorted(set(generators))
    if not gens or gens[0] <= 0:
        raise ParameterError("S must be a non-empty set of positive integers")
    top = gens[-1]
    window = window or 3 * top + 1
    lower = chromatic_number_exact(cayley_graph_interval(gens, window), budget).lower

    candidates = [modulus] if modulus else range(2 * top + 1, 4 * top + 2)
    best: Optional[Tuple[int, int, Tuple[int, ...]]] = None
    for n in candidates:
        if any(s % n == 0 for s in gens):
            continue
        result = chromatic_number_exact(cyclic_cayley_graph(n, gens), budget)
        if best is None or result.upper < best[0]:
            best = (result.upper, n, result.coloring)
        if best[0] <= lower:
            break
    if best is None:
        raise ParameterError(f"every candidate modulus divides an element of S={gens}")
    upper, n, coloring = best
    return IntegerChromaticBounds(lower, max(upper, lower), window, n, coloring)


# --------------------------------------------------------------------------
# Embeddings
# --------------------------------------------------------------------------


def verify_embedding(host: Graph, sub: Graph, mapping: Sequence[int]) -> bool:
    """True iff mapping sends every edge of sub to an edge of host."""
    if len(mapping) != sub.vertex_count:
        raise ParameterError(f"mapping covers {len(mapping)} of {sub.vertex_count} vertices")
    if len(set(mapping)) != len(mapping):
        raise ParameterError("mapping is not injective")
    if any(not 0 <= image < host.vertex_count for image in mapping):
        raise ParameterError("mapping leaves the host graph")
    return all(host.has_edge(mapping[u], mapping[v]) for u, v in sub.edges)


@dataclass(frozen=True)
class KneserEmbedding:
    """KG(dim, r) inside Cay(H_radius(1)) ⊂ F₂^dim via C ↦ 1_C."""

    dim: int
    r: int
    radius: int
    kneser: Graph
    vectors: Tuple[BitVector, ...]
    verified: bool

    @property
    def mapping(self) -> Dict[Tuple[int, ...], BitVector]:
        return dict(zip(self.kneser.labels, self.vectors))

    @property
    def chromatic_lower_bound(self) -> int:
        """n − 2r + 2 when KG(n, r) has edges."""
        return self.dim - 2 * self.r + 2 if 2 * self.r <= self.dim and self.r >= 1 else 1


def kneser_embedding_for_radius(dim: int, radius: int, max_cells: Optional[int] = None) -> KneserEmbedding:
    """
    Embed KG(dim, r), r = ⌈(dim − radius)/2⌉, into Cay(H_radius(1)).

    Every edge is checked: disjoint C, C' give 1_C − 1_C' of weight 2r,
    which must be within radius of the all-ones vector.
    """
    if not 0 <= radius <= dim:
        raise ParameterError(f"radius must be in 0..{dim}, got {radius}")
    r = -(-(dim - radius) // 2)
    forbidden = HammingBallSpec(dim, radius, BitVector.ones(dim))
    if r < 1:
        kneser = Graph(1, frozenset(), ((),))
        return KneserEmbedding(dim, 0, radius, kneser, (BitVector.zero(dim),), True)
    kneser = kneser_graph(dim, r, max_cells)
    vectors = tuple(
        BitVector(dim, sum(1 << (i - 1) for i in subset)) for subset in kneser.labels
    )
    verified = all(forbidden.contains(vectors[a] - vectors[b]) for a, b in kneser.edges)
    logger.debug(f"KG({dim},{r}) -> Cay(H_{radius}(1)): verified={verified}")
    return KneserEmbedding(dim, r, radius, kneser, vectors, verified)


def kneser_embedding_into_hamming_cayley(dim: int, k: int, max_cells: Optional[int] = None) -> KneserEmbedding:
    """KG(d, ⌊d/2⌋ − k) inside Cay(H_{2k+1}(1))."""
    if k < 0 or 2 * k > dim:
        raise ParameterError(f"need 0 <= 2k <= d, got d={dim}, k={k}")
    return kneser_embedding_for_radius(dim, min(2 * k + 1, dim), max_cells)


# --------------------------------------------------------------------------
# Evidence carried by certificates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChromaticEvidence:
    """
    A finite subgraph of Cay_ℤ(S) that admits no proper `colors`-colouring.

    vertices are integers, edges index into vertices. kind 'embedding' means
    the edges are those of KG(kneser); 'exhaustion' means the claim was
    settled by the exact solver.
    """

    kind: str
    colors: int
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    lower_bound: int
    kneser: Optional[Tuple[int, int]] = None
    solver: Dict[str, Any] = field(default_factory=dict)

    def dilate(self, factor: int) -> "ChromaticEvidence":
        """The same subgraph inside Cay(factor·S)."""
        if factor < 1:
            raise ParameterError(f"dilation factor must be positive, got {factor}")
        return ChromaticEvidence(
            kind=self.kind,
            colors=self.colors,
            vertices=tuple(factor * v for v in self.vertices),
            edges=self.edges,
            lower_bound=self.lower_bound,
            kneser=self.kneser,
            solver=dict(self.solver),
        )

    def graph(self) -> Graph:
        return Graph(len(self.vertices), frozenset(self.edges), self.vertices)


def exhaustion_evidence(vertices: Sequence[int], generators: Iterable[int], budget: Optional[int] = None) -> ChromaticEvidence:
    """
    Solve the subgraph of Cay_ℤ(S) induced on vertices exactly.

    Raises:
        ResourceLimitError: if the solver cannot settle χ within budget
    """
    gens = set(generators)
    verts = tuple(vertices)
    edges = tuple(
        (a, b) for a, b in combinations(range(len(verts)), 2) if abs(verts[a] - verts[b]) in gens
    )
    graph = Graph(len(verts), frozenset(edges))
    result = chromatic_number_exact(graph, budget)
    if not result.exact:
        raise ResourceLimitError("exhaustion_evidence", "node_budget", budget, result.nodes)
    return ChromaticEvidence(
        kind="exhaustion",
        colors=result.chi - 1,
        vertices=verts,
        edges=tuple(sorted(graph.edges)),
        lower_bound=result.chi,
        solver={"nodes": result.nodes, "certificate": result.lower_certificate.get("kind")},
    )
