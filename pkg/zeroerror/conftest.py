"""
Shared fixtures: a named corpus of small graphs and seeded random generators
"""

import itertools
import logging
import random
from typing import Callable, Dict

import pytest

from zeroerror.combinatorics import is_perfect
from zeroerror.graph_core import (
    ProbabilisticGraph, WeightVector, and_product, complement, complete, cycle, disjoint_union,
    empty, path,
)


def _random_graph(rng: random.Random, n: int, density: float = 0.5, zero_weights: bool = False) -> ProbabilisticGraph:
    weights = [rng.random() + 0.05 for _ in range(n)]
    if zero_weights and n > 1 and rng.random() < 0.3:
        weights[rng.randrange(n)] = 0.0
    total = sum(weights)
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return ProbabilisticGraph(range(n), edges, [w / total for w in weights])


def _random_perfect_graph(rng: random.Random, max_vertices: int) -> ProbabilisticGraph:
    while True:
        g = _random_graph(rng, rng.randint(1, max_vertices), rng.choice([0.3, 0.5, 0.7]))
        if is_perfect(g).is_perfect:
            return g


def _random_weights(rng: random.Random, m: int) -> WeightVector:
    raw = [rng.random() + 0.05 for _ in range(m)]
    total = sum(raw)
    return WeightVector.from_list([x / total for x in raw])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


@pytest.fixture
def random_graph() -> Callable[..., ProbabilisticGraph]:
    return _random_graph


@pytest.fixture
def random_perfect_graph() -> Callable[..., ProbabilisticGraph]:
    return _random_perfect_graph


@pytest.fixture
def random_weights() -> Callable[..., WeightVector]:
    return _random_weights


def build_corpus() -> Dict[str, ProbabilisticGraph]:
    corpus = {
        "K1": complete(1),
        "K2": complete(2, [1 / 3, 2 / 3]),
        "K3": complete(3),
        "K5": complete(5),
        "N3": empty(3, [0.25, 0.5, 0.25]),
        "N7": empty(7),
        "P3": path(3),
        "P4": path(4, [0.1, 0.2, 0.3, 0.4]),
        "C4": cycle(4),
        "C5": cycle(5),
        "C5_skewed": cycle(5, [0.3, 0.1, 0.2, 0.15, 0.25]),
        "C6": cycle(6),
        "C7": cycle(7),
        "C8": cycle(8),
        "C9": cycle(9),
        "anti_C7": complement(cycle(7)),
        "bull": ProbabilisticGraph(range(5), [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)]),
        "fig4_product": and_product(empty(3, [0.25, 0.5, 0.25]), complete(2, [1 / 3, 2 / 3])),
        "fig4_union": disjoint_union(
            [empty(3, [0.25, 0.5, 0.25]), complete(2, [1 / 3, 2 / 3])], WeightVector.from_list([0.25, 0.75])),
        "zero_weight_star": ProbabilisticGraph(range(4), [(0, 1), (0, 2), (0, 3)], [0.0, 0.5, 0.25, 0.25]),
    }
    rng = random.Random(7)
    for k in range(8):
        corpus[f"random_{k}"] = _random_graph(rng, rng.randint(3, 8), rng.choice([0.3, 0.5, 0.7]), zero_weights=True)
    return corpus


@pytest.fixture(scope="session")
def corpus() -> Dict[str, ProbabilisticGraph]:
    return build_corpus()


@pytest.fixture(autouse=True)
def _detach_cli_handlers():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_zeroerror", False):
            root.removeHandler(handler)
            handler.close()
