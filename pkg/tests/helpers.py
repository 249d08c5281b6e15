"""Shared verification helpers: per-round matching properties and
match-and-freeze trace invariants, asserted on every randomized run."""

import math
from fractions import Fraction

from fairdiv.algorithms import MafTrace, alternating_reach, ratio_substitute
from fairdiv.core import Instance
from fairdiv.matching import RoundGraph


def agent_ratios(inst: Instance) -> list[Fraction]:
    K = ratio_substitute(inst)
    return [v.a / v.b if v.b > 0 else K for v in inst.valuations]


def check_matching_round_property(graph: RoundGraph, matching) -> None:
    """Every matched agent reachable from an unmatched agent by an
    alternating path weighs at least as much as that unmatched agent
    (otherwise swapping along the path would improve the matching).

    Note this is deliberately *not* asserted component-wide: two agents can
    share a connected component without any alternating path between them,
    and then no weight ordering is forced.
    """
    matched_agents = {a for a, _ in matching}
    for u in graph.agents:
        if u in matched_agents:
            continue
        wu = graph.agent_weight(u)
        if wu is None:
            continue
        for a in alternating_reach(graph, matching, u):
            wa = graph.agent_weight(a)
            assert wa is not None and wu <= wa, (
                f"unmatched agent {u} (weight {wu}) reaches matched agent "
                f"{a} (weight {wa}) by an alternating path"
            )


def check_maf_trace_invariants(inst: Instance, trace: MafTrace) -> None:
    """Three per-run facts about freeze structure:

    1. every item an agent receives strictly before its last high-value
       round is itself high-value for that agent;
    2. a frozen agent was matched to a high-value item in the freeze round,
       and the freeze length never exceeds floor(ratio - 1);
    3. if two agents are matched in the same round to items that the first
       agent values high, the first freezes for no longer than the second
       (every alternating path threatening the first extends to the second).
    """
    ratios = agent_ratios(inst)
    n = inst.n

    for i in range(n):
        vi = inst.valuations[i]
        r_i = trace.r_star[i]
        for rnd in trace.rounds:
            if rnd.round >= r_i:
                break
            g = trace.round_item(i, rnd.round)
            if g is not None:
                assert vi.value(1 << g) == vi.a, (
                    f"agent {i} got a low-value item in round {rnd.round} < r_i={r_i}"
                )

    for rnd in trace.rounds:
        matched = dict(rnd.matching)
        for a, duration in rnd.frozen_now:
            assert a in matched, f"frozen agent {a} was not matched in round {rnd.round}"
            va = inst.valuations[a]
            assert va.value(1 << matched[a]) == va.a
            assert duration <= max(math.floor(ratios[a] - 1), 0), (
                f"agent {a} frozen {duration} rounds, ratio only {ratios[a]}"
            )

    for rnd in trace.rounds:
        frozen = dict(rnd.frozen_now)
        pairs = list(rnd.matching)
        for i, gi in pairs:
            vi = inst.valuations[i]
            for j, gj in pairs:
                if i == j:
                    continue
                if vi.value(1 << gi) == vi.a and vi.value(1 << gj) == vi.a:
                    assert frozen.get(i, 0) <= frozen.get(j, 0), (
                        f"round {rnd.round}: agents {i},{j} both took items high for "
                        f"{i} but {i} froze longer"
                    )
