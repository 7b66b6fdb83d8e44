"""
Chromatic entropy and Koerner graph entropy solvers, each paired with a
brute-force oracle used for verification.

All entropies are in bits. Zero-weight vertices never enter an objective;
once the positive-weight vertices are partitioned they are dropped into the
first class that can take them.
"""

import itertools
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .combinatorics import (
    _check_cap, clique_cover_bound, enumerate_independent_sets, iter_bits,
    max_weight_independent_set,
)
from .config_manager import Limits, resolve_limits
from .graph_core import ProbabilisticGraph, WeightVector


def _plogp(m: float) -> float:
    return -m * math.log2(m) if m > 0 else 0.0


def class_entropy(masses: Sequence[float]) -> float:
    return math.fsum(_plogp(m) for m in masses)


def entropy_of(w: WeightVector) -> float:
    """Shannon entropy in bits, zero entries skipped"""
    return class_entropy(w.probs)


class Coloring(BaseModel):
    classes: List[List[Any]]
    class_masses: List[float]
    entropy_bits: float

    def assignment(self) -> Dict[Any, int]:
        """vertex id -> class index"""
        return {v: c for c, members in enumerate(self.classes) for v in members}

    def canonical_key(self) -> Tuple[Tuple[Any, ...], ...]:
        return tuple(tuple(members) for members in self.classes)


# --- chromatic entropy ----------------------------------------------------------

def packing_bound(residual: float, heaviest: float) -> float:
    """
    Least entropy contribution of splitting `residual` mass into blocks no
    heavier than `heaviest`: as many full blocks as fit plus one remainder.
    """
    if residual <= 0:
        return 0.0
    if heaviest <= 0 or heaviest >= residual:
        return _plogp(residual)
    full = math.floor(residual / heaviest)
    rest = residual - full * heaviest
    if rest < 0:
        rest = 0.0
    return full * _plogp(heaviest) + _plogp(rest)


def _block_bound(low: float, high: float, residual: float, heaviest: float) -> float:
    """min over block mass m in [low, high] of plogp(m) + packing_bound(residual - m, heaviest)"""
    high = min(high, heaviest, residual)
    if high < low:
        high = low

    def value(m: float) -> float:
        return _plogp(m) + packing_bound(residual - m, heaviest)

    # concave between the breakpoints residual - j*heaviest
    best = min(value(low), value(high))
    if heaviest > 0:
        j_lo = math.ceil((residual - high) / heaviest)
        j_hi = math.floor((residual - low) / heaviest)
        for j in range(max(j_lo, 0), j_hi + 1):
            m = residual - j * heaviest
            if low < m < high:
                best = min(best, value(m))
    return best


def _place_zero_weight(g: ProbabilisticGraph, blocks: List[int]) -> List[int]:
    """Extend a partition of the positive-weight vertices to every vertex"""
    blocks = list(blocks)
    adj = g.adjacency
    for i, w in enumerate(g.weights):
        if w > 0:
            continue
        for k, block in enumerate(blocks):
            if adj[i] & block == 0:
                blocks[k] = block | (1 << i)
                break
        else:
            blocks.append(1 << i)
    return blocks


def _coloring_from_blocks(g: ProbabilisticGraph, blocks: List[int]) -> Coloring:
    blocks = _place_zero_weight(g, blocks)
    masses = [math.fsum(g.weights[i] for i in iter_bits(b)) for b in blocks]
    return Coloring(
        classes=[[g.vertices[i] for i in iter_bits(b)] for b in blocks],
        class_masses=masses,
        entropy_bits=class_entropy(masses),
    )


class _ChromaticSearch:
    """
    Branch-and-bound over partitions of the positive-weight vertices into
    independent blocks. Blocks are built one at a time, each opened by the
    lowest unassigned vertex and grown include-first in vertex order, so
    leaves arrive in canonical order and the first optimum reached wins ties.
    """

    def __init__(self, g: ProbabilisticGraph, tol: float):
        self.adj = g.adjacency
        self.w = g.weights
        self.tol = tol
        self.mwis_cache: Dict[int, float] = {}
        self.nodes = 0
        self.best_value = math.inf
        self.best_blocks: List[int] = []
        self.found_leaf = False

    def heaviest(self, mask: int) -> float:
        if mask not in self.mwis_cache:
            self.mwis_cache[mask] = max_weight_independent_set(self.adj, self.w, mask)[0]
        return self.mwis_cache[mask]

    def mass(self, mask: int) -> float:
        return math.fsum(self.w[i] for i in iter_bits(mask))

    def greedy(self, mask: int) -> Tuple[float, List[int]]:
        blocks = []
        while mask:
            _, block = max_weight_independent_set(self.adj, self.w, mask)
            blocks.append(block)
            mask &= ~block
        return class_entropy([self.mass(b) for b in blocks]), blocks

    def pruned(self, bound: float) -> bool:
        if self.found_leaf:
            return bound >= self.best_value - self.tol
        return bound > self.best_value + self.tol

    def leaf(self, value: float, blocks: List[int]) -> None:
        if not self.found_leaf:
            accept = value <= self.best_value + self.tol
        else:
            accept = value < self.best_value - self.tol
        if accept:
            self.found_leaf = True
            self.best_value = value
            self.best_blocks = list(blocks)

    def open_block(self, residual: int, committed: float, blocks: List[int]) -> None:
        self.nodes += 1
        if residual == 0:
            self.leaf(committed, blocks)
            return
        r = self.mass(residual)
        heaviest = self.heaviest(residual)
        if self.pruned(committed + packing_bound(r, heaviest)):
            return
        s = (residual & -residual).bit_length() - 1
        cand = residual & ~self.adj[s] & ~(1 << s)
        self.grow(residual, committed, blocks, r, heaviest, 1 << s, self.w[s], cand)

    def grow(self, residual: int, committed: float, blocks: List[int], r: float,
             heaviest: float, block: int, weight: float, cand: int) -> None:
        self.nodes += 1
        if cand == 0:
            blocks.append(block)
            self.open_block(residual & ~block, committed + _plogp(weight), blocks)
            blocks.pop()
            return
        high = weight + clique_cover_bound(self.adj, self.w, cand)
        if self.pruned(committed + _block_bound(weight, high, r, heaviest)):
            return
        v = (cand & -cand).bit_length() - 1
        bit = 1 << v
        self.grow(residual, committed, blocks, r, heaviest,
                  block | bit, weight + self.w[v], cand & ~self.adj[v] & ~bit)
        self.grow(residual, committed, blocks, r, heaviest, block, weight, cand & ~bit)

    def run(self, mask: int) -> List[int]:
        self.best_value, self.best_blocks = self.greedy(mask)
        self.open_block(mask, 0.0, [])
        return self.best_blocks


def chromatic_entropy(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> Coloring:
    """Minimum-entropy proper colouring"""
    limits = resolve_limits(limits)
    positive = g.positive_mask()
    _check_cap("max_vertices_chromatic", limits.max_vertices_chromatic, bin(positive).count("1"))
    search = _ChromaticSearch(g, limits.tolerance)
    blocks = search.run(positive)
    logging.debug(f"Chromatic entropy search on {g.n} vertices visited {search.nodes} nodes, "
                  f"value {search.best_value:.12g}")
    return _coloring_from_blocks(g, blocks)


def _block_order_key(blocks: Sequence[int], n: int) -> Tuple[Tuple[int, ...], ...]:
    # membership first: the order in which the include-first search meets leaves
    return tuple(tuple(0 if b >> i & 1 else 1 for i in range(n)) for b in blocks)


def chromatic_entropy_oracle(g: ProbabilisticGraph, limits: Optional[Limits] = None) -> Coloring:
    """Exhaustive restricted-growth-string enumeration of every partition into independent sets"""
    limits = resolve_limits(limits)
    _check_cap("max_vertices_oracle", limits.max_vertices_oracle, g.n)
    positive = [i for i, w in enumerate(g.weights) if w > 0]
    adj, w = g.adjacency, g.weights
    results: List[Tuple[float, List[int]]] = []

    def assign(k: int, blocks: List[int]) -> None:
        if k == len(positive):
            results.append((class_entropy([math.fsum(w[i] for i in iter_bits(b)) for b in blocks]), list(blocks)))
            return
        v = positive[k]
        for idx, block in enumerate(blocks):
            if adj[v] & block == 0:
                blocks[idx] = block | (1 << v)
                assign(k + 1, blocks)
                blocks[idx] = block
        blocks.append(1 << v)
        assign(k + 1, blocks)
        blocks.pop()

    assign(0, [])
    low = min(value for value, _ in results)
    ties = [blocks for value, blocks in results if value <= low + limits.tolerance]
    best = min(ties, key=lambda b: _block_order_key(b, g.n))
    return _coloring_from_blocks(g, best)


# --- Koerner entropy ----------------------------------------------------------

class KoernerSolution(BaseModel):
    support: List[List[Any]]
    conditional: List[List[float]]
    marginal: List[float]
    mutual_info_bits: float
    lower_bound_bits: float
    gap_bits: float
    iterations: int
    converged: bool
    history: List[float] = []

    @property
    def value_bits(self) -> float:
        return self.mutual_info_bits


def _membership(g: ProbabilisticGraph, masks: Sequence[int]) -> np.ndarray:
    A = np.zeros((g.n, len(masks)), dtype=bool)
    for k, mask in enumerate(masks):
        for i in iter_bits(mask):
            A[i, k] = True
    return A


def _xlog2(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.log2(x[pos])
    return out


def mutual_information_bits(p: np.ndarray, cond: np.ndarray, q: Optional[np.ndarray] = None) -> float:
    """I(V;W) for P(v) and rows cond[v, :]; q defaults to the induced marginal"""
    if q is None:
        q = p @ cond
    joint = p[:, None] * cond
    # zero-mass vertices contribute nothing, even where their sets have q = 0
    pos = joint > 0
    ratio = cond[pos] / np.broadcast_to(q, cond.shape)[pos]
    return float(np.sum(joint[pos] * np.log2(ratio)))


def _conditional_from_marginal(A: np.ndarray, q: np.ndarray) -> np.ndarray:
    cond = A * q[None, :]
    rows = cond.sum(axis=1, keepdims=True)
    # rows with no mass left on their sets fall back to uniform
    empty = rows[:, 0] <= 0
    if np.any(empty):
        cond[empty] = A[empty]
        rows[empty] = A[empty].sum(axis=1, keepdims=True)
    return cond / rows


def _dual_lower_bound(p: np.ndarray, A: np.ndarray, q: np.ndarray) -> float:
    qa = A.astype(float) @ q
    pos = p > 0
    upper = float(-np.sum(p[pos] * np.log2(qa[pos])))
    weights = np.zeros_like(p)
    weights[pos] = p[pos] / qa[pos]
    return upper - float(np.log2(np.max(weights @ A)))


def koerner_entropy(g: ProbabilisticGraph, tol: Optional[float] = None,
                    limits: Optional[Limits] = None) -> KoernerSolution:
    """
    min I(V;W) over W supported on maximal independent sets containing V, by
    alternating between the conditional and the marginal of W.
    """
    limits = resolve_limits(limits)
    tol = limits.tolerance if tol is None else tol
    family = enumerate_independent_sets(g, "maximal", limits)
    A = _membership(g, family.masks)
    p = np.asarray(g.weights, dtype=float)

    cond = A / A.sum(axis=1, keepdims=True)
    q = p @ cond
    value = mutual_information_bits(p, cond, q)
    history = [value]
    converged = False
    iterations = 0
    while iterations < limits.max_iters:
        iterations += 1
        cond = _conditional_from_marginal(A, q)
        q = p @ cond
        new_value = mutual_information_bits(p, cond, q)
        history.append(new_value)
        decrease = value - new_value
        value = new_value
        if decrease < tol:
            converged = True
            break
    if not converged:
        logging.warning(f"Koerner entropy stopped at the iteration cap ({limits.max_iters}) "
                        f"without reaching tolerance {tol}")

    value = max(value, 0.0)
    lower = max(min(_dual_lower_bound(p, A, q), value), 0.0)
    logging.debug(f"Koerner entropy: {value:.12g} bits after {iterations} iterations, gap {value - lower:.3g}")
    return KoernerSolution(
        support=[list(s) for s in family.sets],
        conditional=cond.tolist(),
        marginal=q.tolist(),
        mutual_info_bits=value,
        lower_bound_bits=lower,
        gap_bits=value - lower,
        iterations=iterations,
        converged=converged,
        history=history,
    )


def _compositions(total: int, parts: int) -> np.ndarray:
    """Every vector of `parts` non-negative integers summing to `total`"""
    if parts == 1:
        return np.array([[total]])
    bars = np.array(list(itertools.combinations(range(total + parts - 1), parts - 1)))
    edges = np.concatenate(
        [np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), total + parts - 1)], axis=1)
    return np.diff(edges, axis=1) - 1


def koerner_entropy_oracle(g: ProbabilisticGraph, grid: Optional[int] = None,
                           limits: Optional[Limits] = None) -> float:
    """
    Grid search over the marginal of W on the maximal independent sets; each
    grid marginal induces the conditional W | V and its exact I(V;W), so every
    value returned is achievable.
    """
    limits = resolve_limits(limits)
    grid = limits.koerner_oracle_grid if grid is None else grid
    _check_cap("koerner_oracle_vertices", limits.koerner_oracle_vertices, g.n)
    family = enumerate_independent_sets(g, "maximal", limits)
    _check_cap("koerner_oracle_sets", limits.koerner_oracle_sets, len(family))
    A = _membership(g, family.masks).astype(float)
    p = np.asarray(g.weights, dtype=float)
    pos = p > 0

    Q = _compositions(grid, A.shape[1]) / grid
    QA = Q @ A.T
    feasible = np.all(QA[:, pos] > 0, axis=1)
    Q, QA = Q[feasible], QA[feasible]

    # I = -sum_v P(v) log2 Q(A_v) - sum_W Q(W) c_W log2 c_W with c_W = sum_{v in W} P(v)/Q(A_v)
    ratio = np.zeros_like(QA)
    ratio[:, pos] = p[pos] / QA[:, pos]
    c = ratio @ A
    first = -np.sum(p[pos] * np.log2(QA[:, pos]), axis=1)
    qc = Q * c
    second = np.sum(qc * _xlog2(c), axis=1)
    values = first - second
    return float(max(np.min(values), 0.0))
