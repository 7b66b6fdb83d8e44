"""
Independent-set machinery over adjacency bitsets: enumeration, exact
maximum-weight independent set, chromatic and clique numbers, and the
odd-hole perfectness test.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel

from .config_manager import Limits, resolve_limits
from .errors import CapExceededError
from .graph_core import ProbabilisticGraph, VertexId, complement


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _check_cap(name: str, limit: int, requested: int) -> None:
    if requested > limit:
        raise CapExceededError(name, limit, requested)


@dataclass(frozen=True)
class IndependentSetFamily:
    graph: ProbabilisticGraph
    kind: Literal["all", "maximal"]
    masks: Tuple[int, ...]
    sets: Tuple[Tuple[VertexId, ...], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.masks)


def _mask_to_ids(g: ProbabilisticGraph, mask: int) -> Tuple[VertexId, ...]:
    return tuple(g.vertices[i] for i in iter_bits(mask))


def _all_independent_masks(adj: Sequence[int], n: int) -> List[int]:
    out: List[int] = []

    def grow(current: int, allowed: int) -> None:
        for i in iter_bits(allowed):
            nxt = current | (1 << i)
            out.append(nxt)
            higher = allowed & ~((1 << (i + 1)) - 1)
            grow(nxt, higher & ~adj[i])

    grow(0, (1 << n) - 1)
    return out


def _maximal_independent_masks(g: ProbabilisticGraph) -> List[int]:
    # maximal independent sets of g are the maximal cliques of its complement
    comp = nx.Graph()
    comp.add_nodes_from(range(g.n))
    full = (1 << g.n) - 1
    for i, mask in enumerate(g.adjacency):
        for j in iter_bits(full & ~mask & ~((1 << (i + 1)) - 1)):
            comp.add_edge(i, j)
    masks = []
    for clique in nx.find_cliques(comp):
        mask = 0
        for i in clique:
            mask |= 1 << i
        masks.append(mask)
    return masks


def _set_order_key(mask: int) -> Tuple[int, ...]:
    return tuple(iter_bits(mask))


def enumerate_independent_sets(g: ProbabilisticGraph, kind: str = "maximal",
                               limits: Optional[Limits] = None) -> IndependentSetFamily:
    """
    Every non-empty independent set ("all") or every inclusion-maximal one
    ("maximal"), ordered lexicographically by sorted vertex positions.
    """
    limits = resolve_limits(limits)
    if kind == "all":
        _check_cap("max_vertices_all_sets", limits.max_vertices_all_sets, g.n)
        masks = _all_independent_masks(g.adjacency, g.n)
    elif kind == "maximal":
        _check_cap("max_vertices_maximal_sets", limits.max_vertices_maximal_sets, g.n)
        masks = _maximal_independent_masks(g)
    else:
        raise ValueError(f"unknown independent set kind {kind!r}")
    masks.sort(key=_set_order_key)
    logging.debug(f"Enumerated {len(masks)} {kind} independent sets on {g.n} vertices")
    return IndependentSetFamily(
        graph=g, kind=kind, masks=tuple(masks),
        sets=tuple(_mask_to_ids(g, m) for m in masks))


# --- weighted independent sets ------------------------------------------------

def clique_cover_bound(adj: Sequence[int], weights: Sequence[float], mask: int) -> float:
    """Upper bound on the heaviest independent set inside mask via a greedy weighted clique cover"""
    order = sorted(iter_bits(mask), key=lambda i: (-weights[i], i))
    cliques: List[List[Any]] = []
    for v in order:
        for clique in cliques:
            if clique[0] & ~adj[v] == 0:
                clique[0] |= 1 << v
                break
        else:
            cliques.append([1 << v, weights[v]])
    return sum(c[1] for c in cliques)


def max_weight_independent_set(adj: Sequence[int], weights: Sequence[float], mask: int) -> Tuple[float, int]:
    """Exact maximum-weight independent set inside mask; returns (weight, set mask)"""
    cand = 0
    for i in iter_bits(mask):
        if weights[i] > 0:
            cand |= 1 << i
    best = [0.0, 0]

    def search(weight: float, chosen: int, cand: int) -> None:
        # isolated candidates are always taken
        free = 0
        for v in iter_bits(cand):
            if adj[v] & cand == 0:
                free |= 1 << v
        if free:
            weight += sum(weights[v] for v in iter_bits(free))
            chosen |= free
            cand &= ~free
        if cand == 0:
            if weight > best[0]:
                best[0], best[1] = weight, chosen
            return
        if weight + clique_cover_bound(adj, weights, cand) <= best[0]:
            return
        v = (cand & -cand).bit_length() - 1
        search(weight + weights[v], chosen | (1 << v), cand & ~adj[v] & ~(1 << v))
        search(weight, chosen, cand & ~(1 << v))

    search(0.0, 0, cand)
    return best[0], best[1]


# --- chromatic and clique numbers -------------------------------------------

def _clique_number_mask(adj: Sequence[int], mask: int) -> int:
    best = [0]

    def expand(size: int, cand: int) -> None:
        if cand == 0:
            best[0] = max(best[0], size)
            return
        if size + popcount(cand) <= best[0]:
            return
        v = (cand & -cand).bit_length() - 1
        expand(size + 1, cand & adj[v])
        expand(size, cand & ~(1 << v))

    expand(0, mask)
    return best[0]


def _chromatic_number_mask(adj: Sequence[int], mask: int) -> int:
    """DSATUR branch-and-bound restricted to the vertices in mask"""
    vertices = list(iter_bits(mask))
    if not vertices:
        return 0
    lower = _clique_number_mask(adj, mask)
    best = [len(vertices)]
    color: Dict[int, int] = {}

    def pick(uncolored: List[int]) -> int:
        def key(v: int):
            sat = {color[u] for u in iter_bits(adj[v] & mask) if u in color}
            deg = popcount(adj[v] & mask & ~sum(1 << u for u in color))
            return (-len(sat), -deg, v)
        return min(uncolored, key=key)

    def dfs(used: int, uncolored: List[int]) -> bool:
        if used >= best[0]:
            return False
        if not uncolored:
            best[0] = used
            return used == lower
        v = pick(uncolored)
        rest = [u for u in uncolored if u != v]
        taken = {color[u] for u in iter_bits(adj[v] & mask) if u in color}
        for c in range(used + 1):
            if c in taken:
                continue
            if c == used and used + 1 >= best[0]:
                break
            color[v] = c
            if dfs(max(used, c + 1), rest):
                return True
            del color[v]
        return False

    dfs(0, vertices)
    return best[0]


def chromatic_number(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> int:
    limits = resolve_limits(limits)
    _check_cap("max_vertices_perfect", limits.max_vertices_perfect, g.n)
    return _chromatic_number_mask(g.adjacency, (1 << g.n) - 1)


def clique_number(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> int:
    limits = resolve_limits(limits)
    _check_cap("max_vertices_perfect", limits.max_vertices_perfect, g.n)
    return max(len(c) for c in nx.find_cliques(g.to_networkx()))


# --- perfectness ----------------------------------------------------------

class PerfectnessCertificate(BaseModel):
    verdict: Literal["perfect", "imperfect"]
    witness: Optional[List[Any]] = None
    witness_in: Optional[Literal["graph", "complement"]] = None

    @property
    def is_perfect(self) -> bool:
        return self.verdict == "perfect"


def find_odd_hole(adj: Sequence[int], length: int) -> Optional[List[int]]:
    """
    Chordless cycle of exactly `length` vertices, as positions v0..v_{L-1} with
    v0 the smallest position on the cycle and v1 < v_{L-1}. Neighbours are
    tried in position order so the first hole found is deterministic.
    """
    n = len(adj)
    closed = [mask | (1 << i) for i, mask in enumerate(adj)]

    def extend(path: List[int], forbidden: int, higher: int, start_closed: int) -> Optional[List[int]]:
        last = path[-1]
        if len(path) == length - 1:
            cand = adj[last] & adj[path[0]] & higher & ~forbidden
            for u in iter_bits(cand):
                if u > path[1]:
                    return path + [u]
            return None
        cand = adj[last] & higher & ~forbidden & ~start_closed
        # once u follows `last`, nothing later may touch `last` or its neighbours
        settled = forbidden | closed[last]
        for u in iter_bits(cand):
            found = extend(path + [u], settled | (1 << u), higher, start_closed)
            if found:
                return found
        return None

    for s in range(n):
        higher = ((1 << n) - 1) & ~((1 << (s + 1)) - 1)
        for v1 in iter_bits(adj[s] & higher):
            found = extend([s, v1], (1 << s) | (1 << v1), higher, closed[s])
            if found:
                return found
    return None


def is_perfect(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> PerfectnessCertificate:
    """
    Strong perfect graph test: look for an odd hole of length >= 5 in g, then in
    its complement, for L = 5, 7, ... in turn.
    """
    limits = resolve_limits(limits)
    _check_cap("max_vertices_perfect", limits.max_vertices_perfect, g.n)
    comp = complement(g)
    for length in range(5, g.n + 1, 2):
        for graph, where in ((g, "graph"), (comp, "complement")):
            hole = find_odd_hole(graph.adjacency, length)
            if hole is not None:
                logging.debug(f"Odd hole of length {length} found in the {where}")
                return PerfectnessCertificate(
                    verdict="imperfect",
                    witness=[g.vertices[i] for i in hole],
                    witness_in=where)
    return PerfectnessCertificate(verdict="perfect")


def is_perfect_by_definition(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> bool:
    """chi(G[S]) == omega(G[S]) for every vertex subset S, by brute force"""
    limits = resolve_limits(limits)
    _check_cap("max_vertices_oracle", limits.max_vertices_oracle, g.n)
    adj = g.adjacency
    for mask in range(1, 1 << g.n):
        if _chromatic_number_mask(adj, mask) != _clique_number_mask(adj, mask):
            return False
    return True
