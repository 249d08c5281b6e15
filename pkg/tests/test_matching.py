import random
from fractions import Fraction

import pytest

from fairdiv.matching import (
    RoundGraph,
    brute_force_matching_oracle,
    connected_components,
    max_cardinality_max_weight_matching,
)


def test_weight_beats_weight_on_shared_item():
    g = RoundGraph((1, 2), (7,), ((1, 7, Fraction(3)), (2, 7, Fraction(5))))
    assert max_cardinality_max_weight_matching(g) == ((2, 7),)


def test_cardinality_beats_weight():
    g = RoundGraph(
        (1, 2), (10, 11),
        ((1, 10, Fraction(1)), (1, 11, Fraction(1)), (2, 10, Fraction(1))),
    )
    assert max_cardinality_max_weight_matching(g) == ((1, 11), (2, 10))


def test_empty_graph():
    g = RoundGraph((), (), ())
    assert max_cardinality_max_weight_matching(g) == ()
    assert brute_force_matching_oracle(g) == ()


def test_single_edge():
    g = RoundGraph((0,), (3,), ((0, 3, Fraction(2)),))
    assert brute_force_matching_oracle(g) == ((0, 3),)
    assert max_cardinality_max_weight_matching(g) == ((0, 3),)


def test_uniform_weight_invariant_enforced():
    with pytest.raises(ValueError):
        RoundGraph((0,), (1, 2), ((0, 1, Fraction(1)), (0, 2, Fraction(2))))


def test_edge_endpoints_validated():
    with pytest.raises(ValueError):
        RoundGraph((0,), (1,), ((0, 2, Fraction(1)),))


def test_connected_components():
    g = RoundGraph((1, 2, 3), (5, 6), ((1, 5, Fraction(1)), (2, 5, Fraction(1))))
    comps = connected_components(g)
    assert {"agents": [1, 2], "items": [5]} in comps
    assert {"agents": [3], "items": []} in comps
    assert {"agents": [], "items": [6]} in comps

    empty = RoundGraph((1, 2), (3,), ())
    assert len(connected_components(empty)) == 3

    path = RoundGraph((1, 2), (9,), ((1, 9, Fraction(1)), (2, 9, Fraction(1))))
    assert len(connected_components(path)) == 1


def _random_graph(rng: random.Random) -> RoundGraph:
    n_agents = rng.randint(1, 4)
    n_items = rng.randint(1, 4)
    agents = tuple(range(n_agents))
    items = tuple(range(100, 100 + n_items))
    edges = []
    for a in agents:
        w = Fraction(rng.randint(1, 9), rng.choice([1, 2, 3]))
        for g in items:
            if rng.random() < 0.5:
                edges.append((a, g, w))
    return RoundGraph(agents, items, tuple(edges))


def test_matcher_agrees_with_oracle_on_random_graphs():
    rng = random.Random(42)
    for _ in range(300):
        g = _random_graph(rng)
        fast = max_cardinality_max_weight_matching(g)
        slow = brute_force_matching_oracle(g)
        assert fast == slow
