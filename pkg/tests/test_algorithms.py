import random
from fractions import Fraction

import pytest

from fairdiv.algorithms import (
    CutAndChooseStuckError,
    build_cut_and_choose_graph,
    cut_and_choose_graph_procedure,
    match_and_freeze,
    maf_trace_lines,
    pair_demand_mu_closed_form,
    ratio_substitute,
    reversed_round_robin,
    sufficient_no_envy,
)
from fairdiv.core import (
    Additive,
    BinaryTable,
    Instance,
    PairDemand,
    PersonalizedBivalued,
    UnsupportedValuationError,
    full_mask,
)
from fairdiv.instances import gen_table1_example, random_binary_mms_feasible
from fairdiv.matching import connected_components
from fairdiv.oracles import check_efx, check_pmms, mu

from helpers import check_maf_trace_invariants, check_matching_round_property


# ---------------------------------------------------------------------------
# match-and-freeze


def test_maf_table1_round1_matching_and_components():
    inst = gen_table1_example()
    _, trace = match_and_freeze(inst)
    first = trace.rounds[0]
    assert first.matching == ((1, 0), (3, 1))  # agents 2 and 4 win x and y
    comps = [c for c in connected_components(first.graph) if c["agents"]]
    assert {"agents": [0, 1], "items": [0]} in comps
    assert {"agents": [2, 3], "items": [1]} in comps


def test_maf_table1_freezes_and_values():
    inst = gen_table1_example()
    bundles, trace = match_and_freeze(inst)
    assert trace.inactive_rounds(1) == {2}
    assert trace.inactive_rounds(3) == {2, 3, 4}
    round6 = trace.rounds[5]
    assert sorted(a for a, _ in round6.leftovers) == [0, 2]
    assert [inst.value(i, bundles[i]) for i in range(4)] == [6, 6, 6, 6]


def test_maf_single_agent():
    inst = Instance(1, 3, (PersonalizedBivalued(Fraction(2), Fraction(1), 0b001, 3),))
    bundles, trace = match_and_freeze(inst)
    assert bundles == (0b111,)
    assert len(trace.rounds) == 3


def test_maf_wrong_class():
    inst = Instance(1, 2, (Additive.of([1, 2]),))
    with pytest.raises(UnsupportedValuationError):
        match_and_freeze(inst)


def test_maf_b_zero_uses_substitute_ratio():
    vals = (
        PersonalizedBivalued(Fraction(4), Fraction(0), 0b0001, 4),
        PersonalizedBivalued(Fraction(3), Fraction(1), 0b0001, 4),
    )
    inst = Instance(2, 4, vals)
    K = ratio_substitute(inst)
    assert K == 4 * (1 + 3)
    bundles, trace = match_and_freeze(inst)
    assert check_efx(inst, bundles).holds
    check_maf_trace_invariants(inst, trace)
    for rnd in trace.rounds:
        check_matching_round_property(rnd.graph, rnd.matching)


def test_maf_trace_lines_stable():
    inst = gen_table1_example()
    _, trace = match_and_freeze(inst)
    lines = maf_trace_lines(trace)
    assert lines[0] == "round=1 matched=1:0,3:1 frozen=1:1,3:3 leftovers=0:2,2:3"
    assert len(lines) == 6


def test_sufficient_no_envy():
    v = PersonalizedBivalued(Fraction(4), Fraction(1), 0b0011, 4)
    # own two low items (2) vs high+low (5): 2 < 5 - 1, inconclusive
    efx_safe, pmms_safe = sufficient_no_envy(v, 0b1100, 0b0101)
    assert not efx_safe and not pmms_safe
    # own high (4) vs high+low (5): 4 >= 5 - 1
    efx_safe, pmms_safe = sufficient_no_envy(v, 0b0001, 0b0110)
    assert efx_safe and pmms_safe  # factored (4/1)
    v2 = PersonalizedBivalued(Fraction(5, 2), Fraction(1), 0b0011, 4)
    efx_safe, pmms_safe = sufficient_no_envy(v2, 0b0001, 0b0100)
    assert efx_safe and not pmms_safe  # not factored


# ---------------------------------------------------------------------------
# cut-and-choose graph


def _binary_instance(m, *ones_sets, n=None):
    vals = tuple(BinaryTable(m, frozenset(o)) for o in ones_sets)
    return Instance(len(vals), m, vals, monotone_required=False, normalized_required=False)


def test_build_graph_all_accept():
    # every agent values X_s at 1 -> pi points at s everywhere
    m = 2
    ones = {0b01, 0b10, 0b11}
    inst = _binary_instance(m, ones, ones)
    bundles = (0b01, 0b10)
    assert build_cut_and_choose_graph(inst, bundles, 0) == (0, 0)


def test_build_graph_zero_valuations():
    inst = _binary_instance(2, set(), set())
    assert build_cut_and_choose_graph(inst, (0b01, 0b10), 0) == (0, 0)


def test_build_graph_deviation_witness():
    """Whenever pi(i) = j != s, agent i values X_j at 1 and the union's
    2-part fair share is 1."""
    rng = random.Random(3)
    for seed in range(30):
        inst = random_binary_mms_feasible(3, 5, seed, normalized=False)
        X0 = rng.getrandbits(5)
        X1 = rng.getrandbits(5) & ~X0
        bundles = (X0, X1, full_mask(5) & ~(X0 | X1))
        for s in range(3):
            pi = build_cut_and_choose_graph(inst, bundles, s)
            for i, j in enumerate(pi):
                if j != s:
                    vi = inst.valuations[i]
                    assert vi.value(bundles[j]) == 1
                    assert mu(vi, bundles[s] | bundles[j], 2).mu == 1


def test_ccg_already_pmms_zero_iterations():
    ones = {mask for mask in range(1, 1 << 2)}
    inst = _binary_instance(2, ones, ones)
    bundles, trace = cut_and_choose_graph_procedure(inst)
    assert trace.iterations == ()
    assert check_pmms(inst, bundles).holds


def test_ccg_non_monotone_instance():
    inst = random_binary_mms_feasible(3, 6, 7, normalized=False)
    from fairdiv.core import is_monotone
    bundles, trace = cut_and_choose_graph_procedure(inst)
    assert check_pmms(inst, bundles).holds
    assert len(trace.iterations) <= 9


def test_ccg_wrong_class():
    inst = Instance(1, 2, (Additive.of([1, 1]),))
    with pytest.raises(UnsupportedValuationError):
        cut_and_choose_graph_procedure(inst)


def test_ccg_stuck_on_infeasible_table():
    inst = _binary_instance(3, {1}, {1, 4, 6})
    with pytest.raises(CutAndChooseStuckError):
        cut_and_choose_graph_procedure(inst)


def test_ccg_potential_increases():
    for seed in range(40):
        inst = random_binary_mms_feasible(3, 6, 100 + seed, normalized=False)
        _, trace = cut_and_choose_graph_procedure(inst)
        prev = (trace.initial_W, trace.initial_E)
        for it in trace.iterations:
            cur = (it.W, it.E)
            assert cur > prev
            assert 0 <= it.W <= inst.n and 0 <= it.E <= inst.n
            prev = cur


# ---------------------------------------------------------------------------
# reversed round-robin


def test_rrr_hand_trace():
    v = PairDemand.of([4, 3, 2, 1])
    inst = Instance(2, 4, (v, v))
    bundles = reversed_round_robin(inst)
    assert bundles == (0b1001, 0b0110)
    assert inst.value(0, bundles[0]) == inst.value(1, bundles[1]) == 5
    assert mu(v, full_mask(4), 2).mu == 5


def test_rrr_single_agent():
    inst = Instance(1, 3, (PairDemand.of([1, 2, 3]),))
    assert reversed_round_robin(inst) == (0b111,)


def test_rrr_padding_strips_dummies():
    inst = Instance(3, 2, (PairDemand.of([1, 2]),) * 3)
    bundles = reversed_round_robin(inst)
    assert sum(bundles) == full_mask(2)
    for mask in bundles:
        assert mask >> 2 == 0


def test_rrr_wrong_class_and_bad_leftover():
    inst = Instance(1, 2, (Additive.of([1, 1]),))
    with pytest.raises(UnsupportedValuationError):
        reversed_round_robin(inst)
    ok = Instance(2, 4, (PairDemand.of([1, 1, 1, 1]),) * 2)
    with pytest.raises(ValueError):
        reversed_round_robin(ok, leftover_agent=5)


def test_pair_demand_closed_form():
    assert pair_demand_mu_closed_form(PairDemand.of([1, 2, 3, 4])) == 5
    assert pair_demand_mu_closed_form(PairDemand.of([0, 0, 0, 0])) == 0
    assert pair_demand_mu_closed_form(PairDemand.of([1, 1, 1, 9])) == 2
    with pytest.raises(ValueError):
        pair_demand_mu_closed_form(PairDemand.of([1, 2, 3]))
