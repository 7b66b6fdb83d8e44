"""
Probabilistic graphs and their structural operators: AND product and power,
weighted disjoint union, induced subgraph, complement, standard families and
weight-preserving isomorphism.

Graphs are immutable. Internally every graph keeps one adjacency bitset per
vertex (bit j of adj[i] set iff i~j); the AND product is assembled directly
on those bitsets with the self-adjacency convention (closed neighbourhoods).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from .config_manager import Limits, resolve_limits
from .errors import CapExceededError, GraphValidationError

SIMPLEX_TOL = 1e-9
ISO_WEIGHT_TOL = 1e-12

VertexId = Hashable


def _normalize_probs(probs: Sequence[float], what: str) -> Tuple[float, ...]:
    values = []
    for p in probs:
        try:
            value = float(p)
        except (TypeError, ValueError):
            raise GraphValidationError(f"{what}: probability {p!r} is not a number")
        if math.isnan(value) or math.isinf(value):
            raise GraphValidationError(f"{what}: probability {p!r} is not finite")
        if value < 0:
            raise GraphValidationError(f"{what}: negative probability {value}")
        values.append(value)
    total = math.fsum(values)
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise GraphValidationError(f"{what}: probabilities sum to {total!r}, expected 1")
    return tuple(v / total for v in values)


class WeightVector:
    """A probability distribution over an ordered finite index set"""

    __slots__ = ("_support", "_probs", "_index")

    def __init__(self, support: Sequence[Any], probs: Union[Sequence[float], Mapping[Any, float]]):
        support = tuple(support)
        if not support:
            raise GraphValidationError("weight vector needs a non-empty support")
        if len(set(support)) != len(support):
            raise GraphValidationError("weight vector support has duplicate entries")
        if isinstance(probs, Mapping):
            unknown = set(probs) - set(support)
            if unknown:
                raise GraphValidationError(f"weight vector has entries outside its support: {sorted(map(repr, unknown))}")
            probs = [probs.get(a, 0.0) for a in support]
        if len(probs) != len(support):
            raise GraphValidationError(
                f"weight vector length mismatch: {len(support)} indices, {len(probs)} probabilities")
        self._support = support
        self._probs = _normalize_probs(probs, "weight vector")
        self._index = {a: i for i, a in enumerate(support)}

    @classmethod
    def uniform(cls, support: Union[int, Sequence[Any]]) -> "WeightVector":
        if isinstance(support, int):
            support = range(support)
        support = tuple(support)
        return cls(support, [1.0 / len(support)] * len(support))

    @classmethod
    def point_mass(cls, support: Union[int, Sequence[Any]], at: Any) -> "WeightVector":
        if isinstance(support, int):
            support = range(support)
        support = tuple(support)
        if at not in support:
            raise GraphValidationError(f"point mass location {at!r} not in support")
        return cls(support, [1.0 if a == at else 0.0 for a in support])

    @classmethod
    def from_list(cls, probs: Sequence[float]) -> "WeightVector":
        return cls(range(len(probs)), probs)

    def product(self, other: "WeightVector") -> "WeightVector":
        """P_A·P_B over pairs (a, b), lexicographic order"""
        support = [(a, b) for a in self._support for b in other._support]
        probs = [p * q for p in self._probs for q in other._probs]
        return WeightVector(support, probs)

    @property
    def support(self) -> Tuple[Any, ...]:
        return self._support

    @property
    def probs(self) -> Tuple[float, ...]:
        return self._probs

    def __getitem__(self, a: Any) -> float:
        return self._probs[self._index[a]]

    def __len__(self) -> int:
        return len(self._support)

    def __iter__(self):
        return iter(zip(self._support, self._probs))

    def is_full_support(self) -> bool:
        return all(p > 0 for p in self._probs)

    def __repr__(self) -> str:
        body = ", ".join(f"{a!r}: {p:.6g}" for a, p in self)
        return f"WeightVector({{{body}}})"


class ProbabilisticGraph:
    """
    Finite simple undirected graph with a probability distribution on its vertices.
    Vertex order is part of the value: products, serialization and every
    deterministic tie-break follow it.
    """

    __slots__ = ("_vertices", "_weights", "_adj", "_index")

    def __init__(self, vertices: Sequence[VertexId], edges: Iterable[Tuple[VertexId, VertexId]],
                 weights: Union[Sequence[float], Mapping[VertexId, float], None] = None):
        vertices = tuple(vertices)
        if not vertices:
            raise GraphValidationError("graph needs at least one vertex")
        index = {}
        for i, v in enumerate(vertices):
            if v in index:
                raise GraphValidationError(f"duplicate vertex id {v!r}")
            index[v] = i

        if weights is None:
            weights = [1.0 / len(vertices)] * len(vertices)
        elif isinstance(weights, Mapping):
            missing = [v for v in vertices if v not in weights]
            if missing:
                raise GraphValidationError(f"no weight given for vertices {missing!r}")
            unknown = [v for v in weights if v not in index]
            if unknown:
                raise GraphValidationError(f"weights reference unknown vertices {unknown!r}")
            weights = [weights[v] for v in vertices]
        if len(weights) != len(vertices):
            raise GraphValidationError(
                f"weight length mismatch: {len(vertices)} vertices, {len(weights)} weights")

        adj = [0] * len(vertices)
        for edge in edges:
            try:
                u, v = edge
            except (TypeError, ValueError):
                raise GraphValidationError(f"edge {edge!r} is not a pair")
            if u not in index or v not in index:
                raise GraphValidationError(f"edge {edge!r} references an unknown vertex")
            i, j = index[u], index[v]
            if i == j:
                raise GraphValidationError(f"self-loop on vertex {u!r}")
            if adj[i] >> j & 1:
                raise GraphValidationError(f"duplicate edge {edge!r}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i

        self._vertices = vertices
        self._index = index
        self._weights = _normalize_probs(weights, "vertex weights")
        self._adj = tuple(adj)

    @classmethod
    def _from_bitsets(cls, vertices: Sequence[VertexId], weights: Sequence[float],
                      adj: Sequence[int]) -> "ProbabilisticGraph":
        g = cls.__new__(cls)
        g._vertices = tuple(vertices)
        g._index = {v: i for i, v in enumerate(g._vertices)}
        g._weights = tuple(weights)
        g._adj = tuple(adj)
        return g

    @property
    def vertices(self) -> Tuple[VertexId, ...]:
        return self._vertices

    @property
    def weights(self) -> Tuple[float, ...]:
        return self._weights

    @property
    def adjacency(self) -> Tuple[int, ...]:
        return self._adj

    @property
    def n(self) -> int:
        return len(self._vertices)

    def __len__(self) -> int:
        return len(self._vertices)

    def index(self, v: VertexId) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphValidationError(f"unknown vertex {v!r}")

    def weight(self, v: VertexId) -> float:
        return self._weights[self.index(v)]

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return bool(self._adj[self.index(u)] >> self.index(v) & 1)

    def degree(self, v: VertexId) -> int:
        return bin(self._adj[self.index(v)]).count("1")

    def edge_indices(self) -> List[Tuple[int, int]]:
        """Edges as index pairs (i < j), sorted"""
        out = []
        for i, mask in enumerate(self._adj):
            rest = mask >> (i + 1)
            j = i + 1
            while rest:
                if rest & 1:
                    out.append((i, j))
                rest >>= 1
                j += 1
        return out

    @property
    def edges(self) -> List[Tuple[VertexId, VertexId]]:
        return [(self._vertices[i], self._vertices[j]) for i, j in self.edge_indices()]

    def edge_count(self) -> int:
        return sum(bin(m).count("1") for m in self._adj) // 2

    def positive_mask(self) -> int:
        mask = 0
        for i, w in enumerate(self._weights):
            if w > 0:
                mask |= 1 << i
        return mask

    def mass(self, vertices: Iterable[VertexId]) -> float:
        return math.fsum(self._weights[self.index(v)] for v in vertices)

    def is_independent(self, vertices: Iterable[VertexId]) -> bool:
        idx = [self.index(v) for v in vertices]
        mask = 0
        for i in idx:
            mask |= 1 << i
        return all(not (self._adj[i] & mask) for i in idx)

    def to_networkx(self) -> nx.Graph:
        """Weights are stored as the node attribute 'p'"""
        graph = nx.Graph()
        for v, w in zip(self._vertices, self._weights):
            graph.add_node(v, p=w)
        graph.add_edges_from(self.edges)
        return graph

    def __repr__(self) -> str:
        return f"ProbabilisticGraph(n={self.n}, edges={self.edge_count()})"


@dataclass(frozen=True)
class GraphIsomorphism:
    """Weight-preserving bijection between the vertex sets of two graphs"""
    mapping: Dict[VertexId, VertexId]

    def __call__(self, v: VertexId) -> VertexId:
        return self.mapping[v]

    def is_valid(self, g1: ProbabilisticGraph, g2: ProbabilisticGraph, tol: float = ISO_WEIGHT_TOL) -> bool:
        if g1.n != g2.n or set(self.mapping) != set(g1.vertices) or set(self.mapping.values()) != set(g2.vertices):
            return False
        for v in g1.vertices:
            if abs(g1.weight(v) - g2.weight(self.mapping[v])) > tol:
                return False
        for u, v in itertools.combinations(g1.vertices, 2):
            if g1.has_edge(u, v) != g2.has_edge(self.mapping[u], self.mapping[v]):
                return False
        return True


# --- products -------------------------------------------------------------

def _closed(adj: Sequence[int]) -> List[int]:
    return [mask | (1 << i) for i, mask in enumerate(adj)]


def _product_bitsets(adj1: Sequence[int], adj2: Sequence[int]) -> List[int]:
    """Adjacency of the AND product on index (i1, i2) -> i1*n2 + i2"""
    n2 = len(adj2)
    closed1, closed2 = _closed(adj1), _closed(adj2)
    out = []
    for i1, c1 in enumerate(closed1):
        for i2, c2 in enumerate(closed2):
            mask = 0
            j1 = 0
            rest = c1
            while rest:
                if rest & 1:
                    mask |= c2 << (j1 * n2)
                rest >>= 1
                j1 += 1
            out.append(mask & ~(1 << (i1 * n2 + i2)))
    return out


def _check_power_cap(count: int, limits: Limits) -> None:
    if count > limits.max_power_vertices:
        raise CapExceededError("max_power_vertices", limits.max_power_vertices, count)


def and_product(g1: ProbabilisticGraph, g2: ProbabilisticGraph,
                limits: Optional[Limits] = None) -> ProbabilisticGraph:
    """AND (strong) product; vertex (v1, v2), weight P1(v1)·P2(v2)"""
    limits = resolve_limits(limits)
    _check_power_cap(g1.n * g2.n, limits)
    vertices = [(v1, v2) for v1 in g1.vertices for v2 in g2.vertices]
    weights = [p * q for p in g1.weights for q in g2.weights]
    return ProbabilisticGraph._from_bitsets(vertices, weights, _product_bitsets(g1.adjacency, g2.adjacency))


def and_product_all(graphs: Sequence[ProbabilisticGraph], limits: Optional[Limits] = None) -> ProbabilisticGraph:
    """Iterated AND product; vertex ids are flat tuples (v1, ..., vk)"""
    if not graphs:
        raise GraphValidationError("AND product of an empty family")
    limits = resolve_limits(limits)
    _check_power_cap(math.prod(g.n for g in graphs), limits)
    vertices: List[Tuple] = [(v,) for v in graphs[0].vertices]
    weights = list(graphs[0].weights)
    adj = list(graphs[0].adjacency)
    for g in graphs[1:]:
        vertices = [ids + (v,) for ids in vertices for v in g.vertices]
        weights = [p * q for p in weights for q in g.weights]
        adj = _product_bitsets(adj, g.adjacency)
    return ProbabilisticGraph._from_bitsets(vertices, weights, adj)


def and_power(g: ProbabilisticGraph, n: int, limits: Optional[Limits] = None) -> ProbabilisticGraph:
    """n-th AND power; vertex ids are n-tuples in lexicographic order"""
    if not isinstance(n, int) or n < 1:
        raise GraphValidationError(f"power must be a positive integer, got {n!r}")
    limits = resolve_limits(limits)
    _check_power_cap(g.n ** n, limits)
    return and_product_all([g] * n, limits)


# --- union, induced subgraph, complement ---------------------------------

def disjoint_union(parts: Sequence[ProbabilisticGraph], pa: WeightVector) -> ProbabilisticGraph:
    """Union of vertex-disjoint parts, part a scaled by pa; vertex ids are (a, v)"""
    if len(parts) != len(pa):
        raise GraphValidationError(
            f"union length mismatch: {len(parts)} parts, {len(pa)} weights")
    if not parts:
        raise GraphValidationError("disjoint union of an empty family")
    for a in zero_mass_parts(pa):
        logging.warning(f"union part {a} has zero weight; keeping its {parts[a].n} vertices with zero mass")
    vertices, weights, adj = [], [], []
    offset = 0
    for a, (part, pa_a) in enumerate(zip(parts, pa.probs)):
        vertices.extend((a, v) for v in part.vertices)
        weights.extend(pa_a * w for w in part.weights)
        adj.extend(mask << offset for mask in part.adjacency)
        offset += part.n
    return ProbabilisticGraph._from_bitsets(vertices, weights, adj)


def zero_mass_parts(pa: WeightVector) -> List[int]:
    return [a for a, p in enumerate(pa.probs) if p == 0]


def induced_subgraph(g: ProbabilisticGraph, s: Iterable[VertexId]) -> ProbabilisticGraph:
    """G[S] with weights renormalized by P_V(S); vertex order follows g"""
    chosen = set()
    for v in s:
        chosen.add(g.index(v))
    if not chosen:
        raise GraphValidationError("induced subgraph of an empty vertex set")
    keep = sorted(chosen)
    mass = math.fsum(g.weights[i] for i in keep)
    if mass <= 0:
        raise GraphValidationError("induced subgraph on a zero-mass vertex set")
    position = {i: k for k, i in enumerate(keep)}
    adj = []
    for i in keep:
        mask = 0
        for j in keep:
            if g.adjacency[i] >> j & 1:
                mask |= 1 << position[j]
        adj.append(mask)
    return ProbabilisticGraph._from_bitsets(
        [g.vertices[i] for i in keep], [g.weights[i] / mass for i in keep], adj)


def complement(g: ProbabilisticGraph) -> ProbabilisticGraph:
    full = (1 << g.n) - 1
    adj = [full & ~mask & ~(1 << i) for i, mask in enumerate(g.adjacency)]
    return ProbabilisticGraph._from_bitsets(g.vertices, g.weights, adj)


# --- standard families ------------------------------------------------------

def _family_weights(n: int, p: Union[Sequence[float], WeightVector, None]) -> Sequence[float]:
    if p is None:
        return [1.0 / n] * n
    if isinstance(p, WeightVector):
        p = p.probs
    if len(p) != n:
        raise GraphValidationError(f"expected {n} weights, got {len(p)}")
    return p


def cycle(n: int, p: Union[Sequence[float], WeightVector, None] = None) -> ProbabilisticGraph:
    if n < 3:
        raise GraphValidationError(f"cycle needs at least 3 vertices, got {n}")
    return ProbabilisticGraph(range(n), [(i, (i + 1) % n) for i in range(n)], _family_weights(n, p))


def path(n: int, p: Union[Sequence[float], WeightVector, None] = None) -> ProbabilisticGraph:
    if n < 1:
        raise GraphValidationError(f"path needs at least 1 vertex, got {n}")
    return ProbabilisticGraph(range(n), [(i, i + 1) for i in range(n - 1)], _family_weights(n, p))


def complete(n: int, p: Union[Sequence[float], WeightVector, None] = None) -> ProbabilisticGraph:
    if n < 1:
        raise GraphValidationError(f"complete graph needs at least 1 vertex, got {n}")
    return ProbabilisticGraph(range(n), itertools.combinations(range(n), 2), _family_weights(n, p))


def empty(n: int, p: Union[Sequence[float], WeightVector, None] = None) -> ProbabilisticGraph:
    if n < 1:
        raise GraphValidationError(f"empty graph needs at least 1 vertex, got {n}")
    return ProbabilisticGraph(range(n), [], _family_weights(n, p))


def pentagon() -> ProbabilisticGraph:
    """(C5, uniform)"""
    return cycle(5)


# --- isomorphism -----------------------------------------------------------

def _weight_classes(values: Sequence[float]) -> List[int]:
    """Cluster weights into integer labels, neighbours within ISO_WEIGHT_TOL share a label"""
    order = sorted(range(len(values)), key=lambda i: values[i])
    labels = [0] * len(values)
    label = 0
    for k, i in enumerate(order):
        if k and values[i] - values[order[k - 1]] > ISO_WEIGHT_TOL:
            label += 1
        labels[i] = label
    return labels


def _refine(adj: Sequence[int], colors: List[int]) -> List[int]:
    """Colour refinement to a stable partition; shared palette across graphs"""
    n = len(adj)
    while True:
        signatures = []
        for i in range(n):
            neigh = sorted(colors[j] for j in range(n) if adj[i] >> j & 1)
            signatures.append((colors[i], tuple(neigh)))
        palette = {sig: k for k, sig in enumerate(sorted(set(signatures)))}
        new = [palette[sig] for sig in signatures]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def is_isomorphic(g1: ProbabilisticGraph, g2: ProbabilisticGraph) -> Optional[GraphIsomorphism]:
    """Exact weight-preserving isomorphism search, None when the graphs differ"""
    if g1.n != g2.n or g1.edge_count() != g2.edge_count():
        return None
    n = g1.n
    labels = _weight_classes(list(g1.weights) + list(g2.weights))
    # refine both graphs as one disjoint graph so colours are comparable
    joint_adj = list(g1.adjacency) + [mask << n for mask in g2.adjacency]
    colors = _refine(joint_adj, labels)
    c1, c2 = colors[:n], colors[n:]
    if sorted(c1) != sorted(c2):
        return None

    by_color: Dict[int, List[int]] = {}
    for j, c in enumerate(c2):
        by_color.setdefault(c, []).append(j)
    order = sorted(range(n), key=lambda i: (len(by_color[c1[i]]), i))
    adj1, adj2 = g1.adjacency, g2.adjacency
    w1, w2 = g1.weights, g2.weights
    mapping = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in by_color[c1[i]]:
            # weight classes chain, so pairs can still differ by more than the tolerance
            if used[j] or abs(w1[i] - w2[j]) > ISO_WEIGHT_TOL:
                continue
            consistent = True
            for prev in order[:k]:
                if bool(adj1[i] >> prev & 1) != bool(adj2[j] >> mapping[prev] & 1):
                    consistent = False
                    break
            if not consistent:
                continue
            mapping[i] = j
            used[j] = True
            if extend(k + 1):
                return True
            used[j] = False
            mapping[i] = -1
        return False

    if not extend(0):
        return None
    return GraphIsomorphism({g1.vertices[i]: g2.vertices[mapping[i]] for i in range(n)})
