"""
Complementary graph entropy: exact values for the graph classes where a
closed form is known, chromatic-entropy upper bounds over AND powers
otherwise, and checkers for the union/product identities.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from .config_manager import Limits, resolve_limits
from .entropy import chromatic_entropy, koerner_entropy
from .errors import CapExceededError, GraphValidationError, NotExactError, TypeDenominatorError
from .graph_core import (
    ProbabilisticGraph, WeightVector, and_power, and_product_all, disjoint_union,
    is_isomorphic, pentagon, zero_mass_parts,
)
from .combinatorics import is_perfect

HALF_LOG2_5 = 0.5 * math.log2(5)
KOERNER_TOL = 1e-12

Certificate = Literal[
    "perfect", "product-of-perfect", "union-of-perfect", "pentagon",
    "pentagon-times-perfect", "pentagon-plus-perfect", "power-sequence",
]


class HBarResult(BaseModel):
    kind: Literal["exact", "bounded"]
    certificate: Certificate
    value_bits: Optional[float] = None
    upper_sequence: List[Tuple[int, float]] = []
    best_upper_bits: Optional[float] = None
    lower_bound_bits: Optional[float] = None
    doubling_monotone: Optional[bool] = None
    sub_results: List["HBarResult"] = []
    note: Optional[str] = None


HBarResult.model_rebuild()


class TheoremCheckReport(BaseModel):
    claim: str
    lhs_bits: float
    rhs_bits: float
    abs_gap: float
    passed: bool
    tolerance: float


class LinearizationReport(BaseModel):
    union: TheoremCheckReport
    product: TheoremCheckReport
    equivalent: bool


class EtaPoint(BaseModel):
    pa: List[float]
    value_bits: float


class EtaProfile(BaseModel):
    points: List[EtaPoint]
    lipschitz_constant: float
    max_lipschitz_ratio: float
    lipschitz_ok: bool
    max_midpoint_gap: float
    convex_ok: bool
    max_linear_deviation: float
    linear: bool


@dataclass(frozen=True)
class GraphFamily:
    """Graphs combined by AND product or by weighted disjoint union"""
    parts: Tuple[ProbabilisticGraph, ...]
    operator: Literal["and", "union"]
    pa: Optional[WeightVector] = None

    def __post_init__(self):
        if not self.parts:
            raise GraphValidationError("graph family needs at least one member")
        if self.operator not in ("and", "union"):
            raise GraphValidationError(f"unknown family operator {self.operator!r}")
        if self.operator == "union":
            if self.pa is None:
                raise GraphValidationError("union family needs a weight vector")
            if len(self.pa) != len(self.parts):
                raise GraphValidationError(
                    f"union length mismatch: {len(self.parts)} parts, {len(self.pa)} weights")

    @classmethod
    def product(cls, parts: Sequence[ProbabilisticGraph]) -> "GraphFamily":
        return cls(tuple(parts), "and")

    @classmethod
    def union(cls, parts: Sequence[ProbabilisticGraph], pa: WeightVector) -> "GraphFamily":
        return cls(tuple(parts), "union", pa)

    def build(self, limits: Optional[Limits] = None) -> ProbabilisticGraph:
        if self.operator == "and":
            return and_product_all(self.parts, limits)
        return disjoint_union(self.parts, self.pa)


class HBarClassifier:
    """
    Classifies graphs and families, caching each member's exact value by
    identity so repeated factors are solved once.
    """

    def __init__(self, limits: Optional[Limits] = None, max_n: int = 2):
        self.limits = resolve_limits(limits)
        self.max_n = max_n
        self._members: Dict[int, Tuple[ProbabilisticGraph, Optional[HBarResult]]] = {}

    def member(self, g: ProbabilisticGraph) -> Optional[HBarResult]:
        """Exact result for a single graph when it is perfect or the pentagon, else None"""
        key = id(g)
        if key in self._members:
            return self._members[key][1]
        result = None
        try:
            if is_perfect(g, self.limits).is_perfect:
                solution = koerner_entropy(g, tol=min(self.limits.tolerance, KOERNER_TOL), limits=self.limits)
                result = HBarResult(kind="exact", certificate="perfect",
                                    value_bits=solution.mutual_info_bits)
        except CapExceededError as e:
            logging.info(f"Perfectness not decided ({e}); trying the pentagon class")
        if result is None and g.n == 5 and is_isomorphic(g, pentagon()) is not None:
            result = HBarResult(kind="exact", certificate="pentagon", value_bits=HALF_LOG2_5)
        # keep g alive so id() stays unique for the cache lifetime
        self._members[key] = (g, result)
        return result

    def classify(self, target: Union[ProbabilisticGraph, GraphFamily]) -> HBarResult:
        result = self.exact(target)
        if result is not None:
            return result
        if isinstance(target, ProbabilisticGraph):
            return hbar_upper_bounds(target, self.max_n, self.limits)
        return self._bounded(target)

    def exact(self, target: Union[ProbabilisticGraph, GraphFamily]) -> Optional[HBarResult]:
        if isinstance(target, ProbabilisticGraph):
            return self.member(target)
        if target.operator == "and":
            return self._classify_product(target)
        return self._classify_union(target)

    def _classify_product(self, family: GraphFamily) -> Optional[HBarResult]:
        subs = [self.member(g) for g in family.parts]
        if all(s is not None for s in subs):
            value = math.fsum(s.value_bits for s in subs)
            kinds = {s.certificate for s in subs}
            if kinds == {"perfect"}:
                certificate = "product-of-perfect"
            elif kinds == {"pentagon"}:
                certificate = "pentagon"
            else:
                certificate = "pentagon-times-perfect"
            return HBarResult(kind="exact", certificate=certificate, value_bits=value, sub_results=subs)
        return None

    def _classify_union(self, family: GraphFamily) -> Optional[HBarResult]:
        subs: List[HBarResult] = []
        terms = []
        # zero-mass parts never occur
        skipped = set(zero_mass_parts(family.pa))
        for a, (g, p) in enumerate(zip(family.parts, family.pa.probs)):
            if a in skipped:
                continue
            s = self.member(g)
            if s is None:
                return None
            subs.append(s)
            terms.append(p * s.value_bits)
        kinds = {s.certificate for s in subs}
        if kinds == {"perfect"}:
            certificate = "union-of-perfect"
        elif kinds == {"pentagon"}:
            certificate = "pentagon"
        else:
            certificate = "pentagon-plus-perfect"
        return HBarResult(kind="exact", certificate=certificate, value_bits=math.fsum(terms), sub_results=subs)

    def _bounded(self, family: GraphFamily) -> HBarResult:
        try:
            g = family.build(self.limits)
        except CapExceededError as e:
            logging.warning(f"Family graph too large for power bounds: {e}")
            return HBarResult(kind="bounded", certificate="power-sequence",
                              note=f"no upper bound computed: {e}")
        return hbar_upper_bounds(g, self.max_n, self.limits)

    def exact_value(self, target: Union[ProbabilisticGraph, GraphFamily]) -> float:
        result = self.exact(target)
        if result is None:
            raise NotExactError("complementary graph entropy is only bounded for this input")
        return result.value_bits


def hbar_exact(target: Union[ProbabilisticGraph, GraphFamily], limits: Optional[Limits] = None,
               max_n: int = 2) -> HBarResult:
    """
    Exact value when the input is perfect, the pentagon, or a product or union
    whose members all are; otherwise a bounded result from the power sequence.
    Products mixing pentagons and perfect factors must be supplied as a family.
    """
    return HBarClassifier(limits, max_n).classify(target)


def hbar_upper_bounds(g: ProbabilisticGraph, max_n: int, limits: Optional[Limits] = None,
                      lower_bound_bits: Optional[float] = None) -> HBarResult:
    """H_chi(g^n)/n for n = 1..max_n, stopping early at the first cap hit"""
    limits = resolve_limits(limits)
    if max_n < 1:
        raise GraphValidationError(f"max_n must be at least 1, got {max_n}")
    sequence: List[Tuple[int, float]] = []
    note = None
    for n in range(1, max_n + 1):
        try:
            power = and_power(g, n, limits)
            coloring = chromatic_entropy(power, limits)
        except CapExceededError as e:
            logging.warning(f"Upper-bound sequence truncated at n={n}: {e}")
            note = f"truncated at n={n}: {e}"
            break
        sequence.append((n, coloring.entropy_bits / n))

    by_n = dict(sequence)
    doubling = [by_n[n] for n in (1, 2, 4, 8, 16, 32, 64) if n in by_n]
    monotone = all(b <= a + limits.tolerance for a, b in zip(doubling, doubling[1:]))
    return HBarResult(
        kind="bounded",
        certificate="power-sequence",
        upper_sequence=sequence,
        best_upper_bits=min(by_n.values()) if by_n else None,
        lower_bound_bits=lower_bound_bits,
        doubling_monotone=monotone,
        note=note,
    )


def rationalize_type(pa: WeightVector, k_cap: int, tol: float) -> Tuple[int, List[int]]:
    """Smallest k <= k_cap with k·pa integral within tol; returns (k, counts)"""
    fractions = []
    for p in pa.probs:
        f = Fraction(p).limit_denominator(k_cap)
        if abs(float(f) - p) > tol:
            raise TypeDenominatorError(f"weight {p!r} is not a fraction with denominator <= {k_cap}")
        fractions.append(f)
    k = 1
    for f in fractions:
        k = k * f.denominator // math.gcd(k, f.denominator)
    if k > k_cap:
        raise TypeDenominatorError(f"common denominator {k} exceeds the cap {k_cap}")
    counts = [int(f * k) for f in fractions]
    if sum(counts) != k:
        raise TypeDenominatorError(f"weights do not form a type of length {k}")
    return k, counts


def verify_theorem1(parts: Sequence[ProbabilisticGraph], pa: WeightVector, tol: float = 1e-6,
                    limits: Optional[Limits] = None) -> TheoremCheckReport:
    """
    For a k-type pa: H(union of parts weighted by pa) against
    (1/k)·H(AND of every part repeated k·pa(a) times).
    """
    limits = resolve_limits(limits)
    if len(parts) != len(pa):
        raise GraphValidationError(f"length mismatch: {len(parts)} parts, {len(pa)} weights")
    k, counts = rationalize_type(pa, limits.k_cap, limits.tolerance)
    classifier = HBarClassifier(limits)
    lhs = classifier.exact_value(GraphFamily.union(parts, pa))
    repeated = [g for g, c in zip(parts, counts) for _ in range(c)]
    rhs = classifier.exact_value(GraphFamily.product(repeated)) / k
    gap = abs(lhs - rhs)
    return TheoremCheckReport(
        claim=f"union of types equals normalized product (k={k})",
        lhs_bits=lhs, rhs_bits=rhs, abs_gap=gap, passed=gap <= tol, tolerance=tol)


def verify_linearization(parts: Sequence[ProbabilisticGraph], pa: WeightVector, tol: float = 1e-6,
                         limits: Optional[Limits] = None) -> LinearizationReport:
    """Union linearity and product additivity, with whether their verdicts agree"""
    if len(parts) != len(pa):
        raise GraphValidationError(f"length mismatch: {len(parts)} parts, {len(pa)} weights")
    if len(parts) < 2 or not pa.is_full_support():
        raise GraphValidationError("linearization needs at least two parts and a full-support weight vector")
    classifier = HBarClassifier(limits)
    members = [classifier.exact_value(g) for g in parts]

    union_lhs = classifier.exact_value(GraphFamily.union(parts, pa))
    union_rhs = math.fsum(p * v for p, v in zip(pa.probs, members))
    product_lhs = classifier.exact_value(GraphFamily.product(parts))
    product_rhs = math.fsum(members)

    union = TheoremCheckReport(
        claim="union is linear in the weights", lhs_bits=union_lhs, rhs_bits=union_rhs,
        abs_gap=abs(union_lhs - union_rhs), passed=abs(union_lhs - union_rhs) <= tol, tolerance=tol)
    product = TheoremCheckReport(
        claim="product is additive", lhs_bits=product_lhs, rhs_bits=product_rhs,
        abs_gap=abs(product_lhs - product_rhs), passed=abs(product_lhs - product_rhs) <= tol, tolerance=tol)
    return LinearizationReport(union=union, product=product, equivalent=union.passed == product.passed)


def simplex_grid(parts: int, resolution: int) -> List[Tuple[int, ...]]:
    """Integer compositions of `resolution` into `parts` entries, lexicographic"""
    out = []
    for bars in itertools.combinations(range(resolution + parts - 1), parts - 1):
        edges = (-1,) + bars + (resolution + parts - 1,)
        out.append(tuple(b - a - 1 for a, b in zip(edges, edges[1:])))
    return out


def eta_profile(parts: Sequence[ProbabilisticGraph], grid_points: int, tol: float = 1e-9,
                limits: Optional[Limits] = None) -> EtaProfile:
    """Union entropy over a simplex grid of weights, with Lipschitz, convexity and linearity checks"""
    if grid_points < 1:
        raise GraphValidationError(f"grid must be at least 1, got {grid_points}")
    classifier = HBarClassifier(limits)
    m = len(parts)
    grid = simplex_grid(m, grid_points)
    values: Dict[Tuple[int, ...], float] = {}
    for counts in grid:
        pa = WeightVector(range(m), [c / grid_points for c in counts])
        values[counts] = classifier.exact_value(GraphFamily.union(parts, pa))

    lipschitz = math.log2(max(g.n for g in parts))
    max_ratio = 0.0
    lipschitz_ok = True
    max_mid_gap = -math.inf
    for a, b in itertools.combinations(grid, 2):
        dist = sum(abs(x - y) for x, y in zip(a, b)) / grid_points
        diff = abs(values[a] - values[b])
        if lipschitz > 0:
            max_ratio = max(max_ratio, diff / (lipschitz * dist))
        if diff > lipschitz * dist + tol:
            lipschitz_ok = False
        if all((x + y) % 2 == 0 for x, y in zip(a, b)):
            mid = tuple((x + y) // 2 for x, y in zip(a, b))
            max_mid_gap = max(max_mid_gap, values[mid] - (values[a] + values[b]) / 2)
    if max_mid_gap == -math.inf:
        max_mid_gap = 0.0

    vertex_values = []
    for a in range(m):
        corner = tuple(grid_points if i == a else 0 for i in range(m))
        vertex_values.append(values[corner])
    deviation = max(
        abs(values[c] - math.fsum(x / grid_points * v for x, v in zip(c, vertex_values))) for c in grid)

    return EtaProfile(
        points=[EtaPoint(pa=[c / grid_points for c in counts], value_bits=values[counts]) for counts in grid],
        lipschitz_constant=lipschitz,
        max_lipschitz_ratio=max_ratio,
        lipschitz_ok=lipschitz_ok,
        max_midpoint_gap=max_mid_gap,
        convex_ok=max_mid_gap <= tol,
        max_linear_deviation=deviation,
        linear=deviation <= tol,
    )
