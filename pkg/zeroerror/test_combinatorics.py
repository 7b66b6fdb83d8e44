import pytest

from zeroerror.combinatorics import (
    chromatic_number, clique_cover_bound, clique_number, enumerate_independent_sets, find_odd_hole,
    is_perfect, is_perfect_by_definition, iter_bits, max_weight_independent_set, popcount,
)
from zeroerror.config_manager import Limits
from zeroerror.errors import CapExceededError
from zeroerror.graph_core import and_product, complement, complete, cycle, disjoint_union, empty, path


def test_bit_helpers():
    assert list(iter_bits(0b101001)) == [0, 3, 5]
    assert popcount(0b101001) == 3
    assert list(iter_bits(0)) == []


def test_pentagon_independent_sets():
    c5 = cycle(5)
    everything = enumerate_independent_sets(c5, "all")
    assert everything.sets == ((0,), (0, 2), (0, 3), (1,), (1, 3), (1, 4), (2,), (2, 4), (3,), (4,))
    maximal = enumerate_independent_sets(c5, "maximal")
    assert maximal.sets == ((0, 2), (0, 3), (1, 3), (1, 4), (2, 4))
    assert len(maximal) == 5


def test_complete_and_empty_families():
    assert enumerate_independent_sets(complete(4), "maximal").sets == ((0,), (1,), (2,), (3,))
    assert enumerate_independent_sets(empty(4), "maximal").sets == ((0, 1, 2, 3),)
    assert len(enumerate_independent_sets(empty(4), "all")) == 15


def test_maximal_sets_are_the_maximal_members_of_all(random_graph, rng):
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 9))
        everything = set(enumerate_independent_sets(g, "all").masks)
        maximal = enumerate_independent_sets(g, "maximal")
        expected = {m for m in everything if not any(m != o and m & o == m for o in everything)}
        assert set(maximal.masks) == expected
        for s in maximal.sets:
            assert g.is_independent(s)


def test_enumeration_caps_and_bad_kind():
    with pytest.raises(CapExceededError) as info:
        enumerate_independent_sets(empty(25), "all")
    assert info.value.cap_name == "max_vertices_all_sets"
    with pytest.raises(CapExceededError):
        enumerate_independent_sets(cycle(12), "maximal", Limits(max_vertices_maximal_sets=10))
    with pytest.raises(ValueError):
        enumerate_independent_sets(cycle(5), "cliques")


def test_max_weight_independent_set_matches_enumeration(random_graph, rng):
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 10), rng.choice([0.2, 0.5, 0.8]), zero_weights=True)
        full = (1 << g.n) - 1
        weight, mask = max_weight_independent_set(g.adjacency, g.weights, full)
        best = max(sum(g.weights[i] for i in iter_bits(m))
                   for m in enumerate_independent_sets(g, "all").masks)
        assert weight == pytest.approx(best, abs=1e-12)
        assert all(not (g.adjacency[i] & mask) for i in iter_bits(mask))
        assert clique_cover_bound(g.adjacency, g.weights, full) >= weight - 1e-12


def test_max_weight_independent_set_inside_mask():
    c5 = cycle(5, [0.3, 0.1, 0.2, 0.15, 0.25])
    weight, mask = max_weight_independent_set(c5.adjacency, c5.weights, 0b11110)
    assert mask == 0b10100
    assert weight == pytest.approx(0.45)


def test_chromatic_and_clique_numbers(corpus):
    expected = {"K1": (1, 1), "K5": (5, 5), "N7": (1, 1), "P4": (2, 2), "C4": (2, 2),
                "C5": (3, 2), "C6": (2, 2), "C7": (3, 2), "C9": (3, 2), "anti_C7": (4, 3), "bull": (3, 3)}
    for name, (chi, omega) in expected.items():
        assert chromatic_number(corpus[name]) == chi, name
        assert clique_number(corpus[name]) == omega, name


def test_c6_c8_product_numbers():
    prod = and_product(cycle(6), cycle(8))
    assert clique_number(prod) == 4
    assert chromatic_number(prod) == 4
    with pytest.raises(CapExceededError):
        chromatic_number(prod, Limits(max_vertices_perfect=40))


def test_find_odd_hole_lengths():
    assert find_odd_hole(cycle(5).adjacency, 5) == [0, 1, 2, 3, 4]
    assert find_odd_hole(cycle(7).adjacency, 5) is None
    assert find_odd_hole(cycle(7).adjacency, 7) == [0, 1, 2, 3, 4, 5, 6]
    assert find_odd_hole(cycle(6).adjacency, 5) is None


def test_pentagon_witness():
    cert = is_perfect(cycle(5))
    assert not cert.is_perfect
    assert cert.witness == [0, 1, 2, 3, 4]
    assert cert.witness_in == "graph"


def test_antihole_is_reported_in_complement():
    cert = is_perfect(complement(cycle(7)))
    assert cert.verdict == "imperfect"
    assert cert.witness_in == "complement"
    assert len(cert.witness) == 7


def test_perfect_families(corpus):
    for name in ("K1", "K3", "N7", "P3", "P4", "C4", "C6", "C8", "bull", "fig4_product", "fig4_union"):
        cert = is_perfect(corpus[name])
        assert cert.is_perfect, name
        assert cert.witness is None
    assert is_perfect(path(9)).is_perfect


def test_witness_is_an_induced_odd_hole(random_graph, rng):
    for _ in range(100):
        g = random_graph(rng, rng.randint(5, 10))
        cert = is_perfect(g)
        if cert.is_perfect:
            continue
        graph = g if cert.witness_in == "graph" else complement(g)
        hole = cert.witness
        assert len(hole) % 2 == 1 and len(hole) >= 5
        for k, u in enumerate(hole):
            for m, v in enumerate(hole):
                if k < m:
                    adjacent = (m - k) in (1, len(hole) - 1)
                    assert graph.has_edge(u, v) == adjacent


def test_odd_hole_test_agrees_with_definition(random_graph, rng):
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 7), rng.choice([0.3, 0.5, 0.7]))
        assert is_perfect(g).is_perfect == is_perfect_by_definition(g)


def test_odd_hole_test_agrees_with_definition_on_corpus(corpus):
    checked = 0
    for name, g in corpus.items():
        if g.n > 9:
            continue
        assert is_perfect(g).is_perfect == is_perfect_by_definition(g), name
        checked += 1
    assert checked == len(corpus)


def test_definition_check_cap():
    with pytest.raises(CapExceededError):
        is_perfect_by_definition(empty(13))
    with pytest.raises(CapExceededError):
        is_perfect(empty(60))


@pytest.mark.slow
def test_c6_c8_product_is_imperfect():
    cert = is_perfect(and_product(cycle(6), cycle(8)))
    assert cert.verdict == "imperfect"
    assert cert.witness_in == "graph"
    assert len(cert.witness) == 7


def test_union_is_perfect_iff_every_part_is(random_graph, random_weights, rng):
    mixed = 0
    for _ in range(200):
        parts = [random_graph(rng, rng.randint(1, 6)) for _ in range(rng.randint(1, 3))]
        union = disjoint_union(parts, random_weights(rng, len(parts)))
        verdicts = [is_perfect(part).is_perfect for part in parts]
        assert is_perfect(union).is_perfect == all(verdicts)
        mixed += not all(verdicts)
    assert mixed > 0
