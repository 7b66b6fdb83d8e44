import itertools
import math

import pytest

from zeroerror.config_manager import Limits
from zeroerror.entropy import chromatic_entropy, class_entropy, koerner_entropy
from zeroerror.errors import GraphValidationError, NotExactError, TypeDenominatorError
from zeroerror.graph_core import (
    ProbabilisticGraph, WeightVector, and_power, complete, cycle, empty, pentagon,
)
from zeroerror.hbar import (
    HALF_LOG2_5, GraphFamily, HBarClassifier, eta_profile, hbar_exact, hbar_upper_bounds,
    rationalize_type, simplex_grid, verify_linearization, verify_theorem1,
)


def test_c6_c8_product_of_perfect():
    result = hbar_exact(GraphFamily.product([cycle(6), cycle(8)]))
    assert result.kind == "exact"
    assert result.certificate == "product-of-perfect"
    assert result.value_bits == pytest.approx(2.0, abs=1e-9)
    assert [s.certificate for s in result.sub_results] == ["perfect", "perfect"]


def test_pentagon_value():
    result = hbar_exact(pentagon())
    assert result.certificate == "pentagon"
    assert result.value_bits == pytest.approx(0.5 * math.log2(5), abs=1e-9)
    relabelled = ProbabilisticGraph("abcde", [("a", "c"), ("c", "e"), ("e", "b"), ("b", "d"), ("d", "a")])
    assert hbar_exact(relabelled).value_bits == pytest.approx(HALF_LOG2_5, abs=1e-12)


def test_pentagon_times_perfect():
    result = hbar_exact(GraphFamily.product([cycle(5), cycle(6)]))
    assert result.certificate == "pentagon-times-perfect"
    assert result.value_bits == pytest.approx(1 + HALF_LOG2_5, abs=1e-9)
    swapped = hbar_exact(GraphFamily.product([cycle(6), cycle(5)]))
    assert swapped.value_bits == pytest.approx(result.value_bits, abs=1e-12)
    both = hbar_exact(GraphFamily.product([cycle(5), cycle(5)]))
    assert both.certificate == "pentagon"
    assert both.value_bits == pytest.approx(2 * HALF_LOG2_5, abs=1e-12)


def test_pentagon_plus_perfect_union():
    result = hbar_exact(GraphFamily.union([cycle(5), cycle(6)], WeightVector.from_list([0.3, 0.7])))
    assert result.certificate == "pentagon-plus-perfect"
    assert result.value_bits == pytest.approx(0.3 * HALF_LOG2_5 + 0.7, abs=1e-9)


def test_empty_graph_is_zero():
    result = hbar_exact(empty(4, [0.1, 0.2, 0.3, 0.4]))
    assert result.certificate == "perfect"
    assert result.value_bits == pytest.approx(0.0, abs=1e-12)


def test_perfect_graph_matches_koerner_and_one_part_union(random_perfect_graph, rng):
    for _ in range(20):
        g = random_perfect_graph(rng, 7)
        exact = hbar_exact(g).value_bits
        assert exact == pytest.approx(koerner_entropy(g, tol=1e-12).value_bits, abs=1e-9)
        union = hbar_exact(GraphFamily.union([g], WeightVector.from_list([1.0])))
        assert union.certificate == "union-of-perfect"
        assert union.value_bits == pytest.approx(exact, abs=1e-9)


def test_union_skips_zero_weight_parts():
    result = hbar_exact(GraphFamily.union([cycle(6), cycle(7)], WeightVector.from_list([1.0, 0.0])))
    assert result.certificate == "union-of-perfect"
    assert len(result.sub_results) == 1


def test_zero_mass_vertices_keep_values_finite():
    result = hbar_exact(complete(2, [1.0, 0.0]))
    assert result.certificate == "perfect"
    assert result.value_bits == 0.0
    union = hbar_exact(GraphFamily.union([complete(2, [1.0, 0.0]), cycle(5)], WeightVector.from_list([0.5, 0.5])))
    assert union.value_bits == pytest.approx(0.5 * HALF_LOG2_5)


def test_odd_hole_falls_back_to_upper_bounds():
    c7 = cycle(7)
    result = hbar_exact(c7, max_n=1)
    assert result.kind == "bounded"
    assert result.certificate == "power-sequence"
    expected = class_entropy([3 / 7, 3 / 7, 1 / 7])
    assert result.upper_sequence == [(1, pytest.approx(expected, abs=1e-12))]
    assert result.best_upper_bits == pytest.approx(expected, abs=1e-12)
    with pytest.raises(NotExactError):
        HBarClassifier().exact_value(c7)
    assert HBarClassifier().exact(c7) is None


def test_bounded_family_and_oversized_family(caplog):
    family = GraphFamily.product([cycle(7), complete(2)])
    result = hbar_exact(family, max_n=1)
    assert result.kind == "bounded"
    assert result.upper_sequence[0][0] == 1
    with caplog.at_level("WARNING"):
        big = hbar_exact(GraphFamily.product([cycle(7)] * 3))
    assert big.kind == "bounded"
    assert big.upper_sequence == []
    assert "no upper bound" in big.note


def test_family_validation():
    with pytest.raises(GraphValidationError):
        GraphFamily.product([])
    with pytest.raises(GraphValidationError):
        GraphFamily.union([cycle(5)], WeightVector.from_list([0.5, 0.5]))
    with pytest.raises(GraphValidationError):
        GraphFamily((cycle(5),), "or")


def test_upper_bounds_truncate_at_cap(caplog):
    with caplog.at_level("WARNING"):
        result = hbar_upper_bounds(cycle(5), 2, Limits(max_power_vertices=10))
    assert [n for n, _ in result.upper_sequence] == [1]
    assert result.upper_sequence[0][1] == pytest.approx(math.log2(5) - 0.8, abs=1e-12)
    assert "truncated at n=2" in result.note
    with pytest.raises(GraphValidationError):
        hbar_upper_bounds(cycle(5), 0)


def test_upper_bounds_dominate_exact_value(random_perfect_graph, rng):
    for _ in range(20):
        g = random_perfect_graph(rng, 4)
        exact = hbar_exact(g).value_bits
        bounds = hbar_upper_bounds(g, 2, lower_bound_bits=exact)
        assert bounds.doubling_monotone
        assert bounds.lower_bound_bits == exact
        for _, value in bounds.upper_sequence:
            assert value >= exact - 1e-9


def test_pentagon_square_packing_sets_are_independent():
    square = and_power(pentagon(), 2)
    blocks = [[(i, (2 * i + c) % 5) for i in range(5)] for c in range(5)]
    for block in blocks:
        assert square.is_independent(block)
    assert sorted(v for block in blocks for v in block) == sorted(square.vertices)


@pytest.mark.slow
def test_pentagon_square_meets_the_limit():
    result = hbar_upper_bounds(pentagon(), 2)
    assert result.upper_sequence[0][1] == pytest.approx(math.log2(5) - 0.8, abs=1e-9)
    assert result.upper_sequence[1][1] == pytest.approx(0.5 * math.log2(5), abs=1e-6)
    assert result.doubling_monotone
    assert chromatic_entropy(and_power(pentagon(), 2)).entropy_bits == pytest.approx(math.log2(5), abs=1e-9)


def test_rationalize_type():
    assert rationalize_type(WeightVector.from_list([1 / 3, 2 / 3]), 12, 1e-9) == (3, [1, 2])
    assert rationalize_type(WeightVector.from_list([0.3, 0.7]), 12, 1e-9) == (10, [3, 7])
    assert rationalize_type(WeightVector.from_list([1.0, 0.0]), 12, 1e-9) == (1, [1, 0])
    assert rationalize_type(WeightVector.from_list([0.25, 1 / 6, 7 / 12]), 12, 1e-9) == (12, [3, 2, 7])
    with pytest.raises(TypeDenominatorError):
        rationalize_type(WeightVector.from_list([1 / 13, 12 / 13]), 12, 1e-9)
    with pytest.raises(TypeDenominatorError):
        rationalize_type(WeightVector.from_list([0.25, 1 / 6, 7 / 12]), 6, 1e-9)


def test_theorem1_complete_and_empty():
    report = verify_theorem1([complete(2), empty(2)], WeightVector.from_list([0.5, 0.5]))
    assert report.lhs_bits == pytest.approx(0.5, abs=1e-9)
    assert report.rhs_bits == pytest.approx(0.5, abs=1e-9)
    assert report.passed
    assert "k=2" in report.claim


def test_theorem1_point_mass_and_uniform():
    parts = [cycle(6), complete(3), empty(2)]
    point = verify_theorem1(parts, WeightVector.point_mass(3, 1))
    assert point.lhs_bits == pytest.approx(math.log2(3), abs=1e-9)
    assert point.passed
    uniform = verify_theorem1(parts, WeightVector.uniform(3))
    assert uniform.lhs_bits == pytest.approx((1 + math.log2(3)) / 3, abs=1e-9)
    assert uniform.passed


def test_theorem1_rejects_bounded_and_irrational_inputs():
    with pytest.raises(NotExactError):
        verify_theorem1([cycle(7), complete(2)], WeightVector.from_list([0.5, 0.5]))
    with pytest.raises(TypeDenominatorError):
        verify_theorem1([cycle(6), complete(2)], WeightVector.from_list([0.123456789, 0.876543211]))
    with pytest.raises(GraphValidationError):
        verify_theorem1([cycle(6)], WeightVector.from_list([0.5, 0.5]))


def test_theorem1_random_perfect_families(random_perfect_graph, rng):
    for _ in range(50):
        m = rng.randint(1, 3)
        parts = [random_perfect_graph(rng, 5) for _ in range(m)]
        k = rng.randint(1, 4)
        counts = [0] * m
        for _ in range(k):
            counts[rng.randrange(m)] += 1
        report = verify_theorem1(parts, WeightVector.from_list([c / k for c in counts]))
        assert report.abs_gap <= 1e-6
        assert report.passed


def test_linearization_pentagon_and_hexagon():
    report = verify_linearization([cycle(5), cycle(6)], WeightVector.from_list([0.3, 0.7]))
    assert report.union.passed and report.product.passed
    assert report.equivalent
    assert report.union.lhs_bits == pytest.approx(0.3 * HALF_LOG2_5 + 0.7, abs=1e-9)
    assert report.product.lhs_bits == pytest.approx(HALF_LOG2_5 + 1, abs=1e-9)


def test_linearization_perfect_families(random_perfect_graph, random_weights, rng):
    for _ in range(20):
        parts = [random_perfect_graph(rng, 5) for _ in range(rng.randint(2, 3))]
        report = verify_linearization(parts, random_weights(rng, len(parts)))
        assert report.union.passed and report.product.passed and report.equivalent


def test_linearization_rejects_degenerate_weights():
    with pytest.raises(GraphValidationError):
        verify_linearization([cycle(5), cycle(6)], WeightVector.from_list([1.0, 0.0]))
    with pytest.raises(GraphValidationError):
        verify_linearization([cycle(6)], WeightVector.from_list([1.0]))


def test_simplex_grid():
    assert simplex_grid(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert len(simplex_grid(3, 4)) == 15
    assert all(sum(c) == 4 for c in simplex_grid(3, 4))


def test_eta_profile_perfect_family_is_linear():
    parts = [complete(2), empty(3), cycle(4)]
    profile = eta_profile(parts, 4)
    assert len(profile.points) == 15
    assert profile.linear and profile.convex_ok and profile.lipschitz_ok
    assert profile.lipschitz_constant == pytest.approx(2.0)
    assert profile.max_lipschitz_ratio <= 1.0 + 1e-9
    corners = {tuple(p.pa): p.value_bits for p in profile.points}
    assert corners[(1.0, 0.0, 0.0)] == pytest.approx(1.0, abs=1e-9)
    assert corners[(0.0, 1.0, 0.0)] == pytest.approx(0.0, abs=1e-9)
    assert corners[(0.0, 0.0, 1.0)] == pytest.approx(1.0, abs=1e-9)


def test_eta_profile_with_pentagon_member():
    profile = eta_profile([cycle(5), complete(2)], 5)
    assert profile.linear
    assert profile.points[0].value_bits == pytest.approx(1.0, abs=1e-9)
    assert profile.points[-1].value_bits == pytest.approx(HALF_LOG2_5, abs=1e-9)
    with pytest.raises(NotExactError):
        eta_profile([cycle(7), complete(2)], 2)
    with pytest.raises(GraphValidationError):
        eta_profile([cycle(5)], 0)


def test_eta_lipschitz_on_random_perfect_families(random_perfect_graph, rng):
    for _ in range(200):
        parts = [random_perfect_graph(rng, 4) for _ in range(2)]
        profile = eta_profile(parts, 3)
        assert profile.lipschitz_ok
        assert profile.convex_ok


def test_classifier_caches_members():
    classifier = HBarClassifier()
    c6 = cycle(6)
    first = classifier.member(c6)
    assert classifier.member(c6) is first
    values = {classifier.exact_value(GraphFamily.product(list(p))) for p in itertools.permutations([c6, complete(3), empty(2)])}
    assert len({round(v, 12) for v in values}) == 1
