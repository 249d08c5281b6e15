"""The three constructive allocation algorithms, with execution traces.

- match_and_freeze: EFX for personalized bivalued valuations (PMMS when
  factored), driven by per-round max-cardinality max-weight matchings.
- cut_and_choose_graph_procedure: PMMS for binary-valued MMS-feasible
  valuations via cycle/lollipop reallocation steps.
- reversed_round_robin: PMMS for pair-demand valuations via a forward
  then reversed picking sequence.

Every "any/arbitrary" choice in the procedures is pinned (lowest index,
round-robin, lexicographically smallest witness) so runs are deterministic
and traces are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    BinaryTable,
    Instance,
    PairDemand,
    PersonalizedBivalued,
    UnsupportedValuationError,
    full_mask,
    items_of,
)
from .matching import (
    Matching,
    RoundGraph,
    max_cardinality_max_weight_matching,
)
from .oracles import mu


class CutAndChooseStuckError(RuntimeError):
    """The cut-and-choose-graph procedure exceeded its n^2 iteration bound,
    which signals a non-MMS-feasible input."""


# ---------------------------------------------------------------------------
# Match-and-Freeze (personalized bivalued valuations)


@dataclass(frozen=True)
class MafRound:
    round: int
    graph: RoundGraph
    matching: Matching
    frozen_now: tuple[tuple[int, int], ...]  # (agent, freeze duration in rounds)
    leftovers: tuple[tuple[int, int], ...]  # (agent, item), in pick order


@dataclass(frozen=True)
class MafTrace:
    rounds: tuple[MafRound, ...]
    priorities_w: tuple[int, ...]
    r_star: tuple[int, ...]  # per agent: last round a high-value item was allocated

    def inactive_rounds(self, agent: int) -> frozenset[int]:
        """Rounds during which the agent was frozen (within the run)."""
        total = len(self.rounds)
        out = set()
        for rnd in self.rounds:
            for a, duration in rnd.frozen_now:
                if a == agent:
                    out.update(r for r in range(rnd.round + 1, rnd.round + duration + 1)
                               if r <= total)
        return frozenset(out)

    def round_item(self, agent: int, round_no: int) -> Optional[int]:
        rnd = self.rounds[round_no - 1]
        for a, g in rnd.matching:
            if a == agent:
                return g
        for a, g in rnd.leftovers:
            if a == agent:
                return g
        return None


def ratio_substitute(inst: Instance) -> Fraction:
    """The 'sufficiently large' stand-in K for a_i / b_i when b_i = 0:
    m * (1 + max finite ratio), which exceeds every finite ratio and keeps
    floor(K - 1) past the m-round horizon."""
    finite = [v.a / v.b for v in inst.valuations
              if isinstance(v, PersonalizedBivalued) and v.b > 0]
    return Fraction(inst.m) * (1 + (max(finite) if finite else Fraction(0)))


def alternating_reach(graph: RoundGraph, matching: Matching, start: int) -> set[int]:
    """Matched agents reachable from the (unmatched) agent ``start`` by an
    alternating path: a non-matching edge to an item, that item's matching
    edge to its owner, and so on.

    In an optimal matching, every reachable agent's weight is at least the
    start agent's weight — otherwise swapping along the path would improve
    the matching. Freezing is therefore restricted to reachable agents:
    they are exactly the ones that out-competed the start agent, and their
    own ratios provably cover the freeze length.
    """
    adj: dict[int, list[int]] = {}
    for a, g, _ in graph.edges:
        adj.setdefault(a, []).append(g)
    owner = {g: a for a, g in matching}
    reached: set[int] = set()
    frontier_items = set(adj.get(start, ()))
    seen_items: set[int] = set()
    while frontier_items:
        next_items: set[int] = set()
        for g in frontier_items:
            if g in seen_items:
                continue
            seen_items.add(g)
            a = owner.get(g)
            if a is not None and a not in reached:
                reached.add(a)
                next_items.update(adj.get(a, ()))
        frontier_items = next_items - seen_items
    return reached


def _require_class(inst: Instance, cls, name: str) -> None:
    for i, v in enumerate(inst.valuations):
        if not isinstance(v, cls):
            raise UnsupportedValuationError(
                f"{name} requires {cls.__name__} valuations; agent {i} has {type(v).__name__}"
            )


def match_and_freeze(inst: Instance) -> tuple[tuple[int, ...], MafTrace]:
    """Personalized match-and-freeze. Returns an EFX allocation (PMMS if all
    valuations are factored) together with a full round-by-round trace."""
    _require_class(inst, PersonalizedBivalued, "match_and_freeze")
    n, m = inst.n, inst.m
    K = ratio_substitute(inst)
    ratio = [v.a / v.b if v.b > 0 else K for v in inst.valuations]

    pool = full_mask(m)
    bundles = [0] * n
    w = [0] * n
    inactive: dict[int, set[int]] = {}
    rounds: list[MafRound] = []
    r = 0
    while pool:
        r += 1
        if r > m + 1:
            raise RuntimeError("match-and-freeze failed to allocate an item per round")
        active = [i for i in range(n) if i not in inactive.get(r, ())]
        pool_items = tuple(items_of(pool))
        edges = tuple(
            (i, g, ratio[i])
            for i in active
            for g in pool_items
            if inst.valuations[i].value(1 << g) == inst.valuations[i].a
        )
        graph = RoundGraph(tuple(active), pool_items, edges)
        matching = max_cardinality_max_weight_matching(graph)
        matched_agents = {a for a, _ in matching}
        for a, g in matching:
            bundles[a] |= 1 << g
            pool &= ~(1 << g)

        # Freeze the matched agents that beat an unmatched agent to an item,
        # i.e. those reachable from it by an alternating path; the freeze
        # length is driven by the largest such loser's ratio, which never
        # exceeds the frozen agent's own ratio.
        threat: dict[int, Fraction] = {}
        for u in active:
            if u in matched_agents:
                continue
            for i in alternating_reach(graph, matching, u):
                if i not in threat or ratio[u] > threat[i]:
                    threat[i] = ratio[u]
        frozen_now = []
        for i in sorted(threat):
            duration = min(max(math.floor(threat[i] - 1), 0), m)  # cap at horizon
            for j in range(1, duration + 1):
                inactive.setdefault(r + j, set()).add(i)
            w[i] = r
            frozen_now.append((i, duration))

        leftovers = []
        for i in sorted(set(active) - matched_agents, key=lambda i: (w[i], i)):
            if not pool:
                break
            g = (pool & -pool).bit_length() - 1  # lowest-index remaining item
            bundles[i] |= 1 << g
            pool &= ~(1 << g)
            leftovers.append((i, g))

        rounds.append(MafRound(r, graph, matching, tuple(frozen_now), tuple(leftovers)))

    r_star = []
    for i in range(n):
        last = 0
        for rnd in rounds:
            allocated = [g for _, g in rnd.matching] + [g for _, g in rnd.leftovers]
            if any(inst.valuations[i].value(1 << g) == inst.valuations[i].a for g in allocated):
                last = rnd.round
        r_star.append(last)

    trace = MafTrace(tuple(rounds), tuple(w), tuple(r_star))
    return tuple(bundles), trace


def maf_trace_lines(trace: MafTrace) -> list[str]:
    """Line-oriented rendering of a match-and-freeze trace, one round per
    line with a stable field order (for golden-file comparisons)."""
    lines = []
    for rnd in trace.rounds:
        matched = ",".join(f"{a}:{g}" for a, g in rnd.matching)
        frozen = ",".join(f"{a}:{d}" for a, d in rnd.frozen_now)
        leftovers = ",".join(f"{a}:{g}" for a, g in rnd.leftovers)
        lines.append(f"round={rnd.round} matched={matched} frozen={frozen} leftovers={leftovers}")
    return lines


def sufficient_no_envy(v: PersonalizedBivalued, own_bundle: int, other_bundle: int) -> tuple[bool, bool]:
    """Fast certificate: if v_i(X_i) >= v_i(X_j) - b_i then i does not
    EFX-envy j, and not PMMS-envy j either when v_i is factored.

    Returns (efx_safe, pmms_safe); False means inconclusive, not a violation.
    """
    efx_safe = v.value(own_bundle) >= v.value(other_bundle) - v.b
    return efx_safe, efx_safe and v.is_factored()


# ---------------------------------------------------------------------------
# Cut-and-Choose-Graph (binary-valued MMS-feasible valuations)


@dataclass(frozen=True)
class CcgIteration:
    s: int
    pi: tuple[int, ...]
    walk: tuple[int, ...]
    case: str  # "cycle" | "lollipop"
    swap_applied: bool
    W: int  # sum of own-bundle values after the step
    E: int  # number of PMMS-satisfied agents after the step


@dataclass(frozen=True)
class CcgTrace:
    initial_W: int
    initial_E: int
    iterations: tuple[CcgIteration, ...]


def build_cut_and_choose_graph(inst: Instance, bundles, s: int) -> tuple[int, ...]:
    """The functional digraph pi relative to agent s: pi(i) = s when agent i
    accepts X_s against every bundle, otherwise the lowest-index j whose
    bundle makes X_s unacceptable."""
    pi = []
    for i in range(inst.n):
        vi = inst.valuations[i]
        vs = vi.value(bundles[s])
        target = s
        for j in range(inst.n):
            if j == s:
                # comparing X_s against itself never changes the target, and
                # for non-normalized values it would mask the real witness
                # when i == s (a bundle can lose to its own best split there)
                continue
            if vs < mu(vi, bundles[s] | bundles[j], 2).mu:
                target = j
                break
        pi.append(target)
    return tuple(pi)


def _pmms_state(inst: Instance, bundles) -> tuple[int, int, Optional[int]]:
    """(W, E, s) where s is the lowest-index PMMS-violating agent or None."""
    W = 0
    E = 0
    s: Optional[int] = None
    for i in range(inst.n):
        vi = inst.valuations[i]
        own = vi.value(bundles[i])
        W += int(own)
        ok = all(own >= mu(vi, bundles[i] | bundles[j], 2).mu
                 for j in range(inst.n) if j != i)
        if ok:
            E += 1
        elif s is None:
            s = i
    return W, E, s


def cut_and_choose_graph_procedure(inst: Instance) -> tuple[tuple[int, ...], CcgTrace]:
    """Repair an initial round-robin allocation into a PMMS one by walking
    the cut-and-choose graph and applying the cycle / lollipop step.

    Raises CutAndChooseStuckError after n^2 iterations, which by the
    termination potential can only happen for non-MMS-feasible input.
    """
    _require_class(inst, BinaryTable, "cut_and_choose_graph_procedure")
    n = inst.n

    bundles = [0] * n
    for g in range(inst.m):  # round-robin initial allocation
        bundles[g % n] |= 1 << g

    iterations: list[CcgIteration] = []
    W, E, s = _pmms_state(inst, bundles)
    initial_W, initial_E = W, E
    while s is not None:
        if len(iterations) >= n * n:
            raise CutAndChooseStuckError(
                f"no PMMS allocation after {n * n} iterations; input is likely not MMS-feasible"
            )
        pi = build_cut_and_choose_graph(inst, bundles, s)
        walk = [s]
        seen = {s: 0}
        while pi[walk[-1]] not in seen:
            nxt = pi[walk[-1]]
            seen[nxt] = len(walk)
            walk.append(nxt)
        closing = pi[walk[-1]]
        new = list(bundles)
        if closing == s:
            case = "cycle"
            swap_applied = False
            for i in walk:
                new[i] = bundles[pi[i]]
        else:
            case = "lollipop"
            w_pos = seen[closing]
            k_pos = len(walk) - 1
            part = mu(inst.valuations[walk[k_pos]], bundles[walk[0]] | bundles[closing], 2)
            A, B = part.witness
            swap_applied = False
            prev = walk[w_pos - 1]
            if inst.valuations[prev].value(A) < inst.valuations[prev].value(B):
                A, B = B, A
                swap_applied = True
            for i in walk[:max(w_pos - 1, 0)] + walk[w_pos:k_pos]:
                new[i] = bundles[pi[i]]
            new[prev] = A
            new[walk[k_pos]] = B
        bundles = new
        W, E, s = _pmms_state(inst, bundles)
        iterations.append(CcgIteration(walk[0], pi, tuple(walk), case, swap_applied, W, E))

    return tuple(bundles), CcgTrace(initial_W, initial_E, tuple(iterations))


def ccg_trace_lines(trace: CcgTrace) -> list[str]:
    lines = [f"init W={trace.initial_W} E={trace.initial_E}"]
    for t, it in enumerate(trace.iterations, start=1):
        pi = ",".join(str(x) for x in it.pi)
        walk = ",".join(str(x) for x in it.walk)
        lines.append(
            f"iter={t} s={it.s} pi={pi} walk={walk} case={it.case} "
            f"swap={int(it.swap_applied)} W={it.W} E={it.E}"
        )
    return lines


# ---------------------------------------------------------------------------
# Reversed Round-Robin (pair-demand valuations)


def reversed_round_robin(inst: Instance, leftover_agent: int = 0) -> tuple[int, ...]:
    """Forward pick round, reversed pick round, leftovers to one agent.
    Returns a PMMS allocation for pair-demand valuations.

    When m < 2n the instance is padded with zero-value dummy items; dummies
    never appear in the returned allocation.
    """
    _require_class(inst, PairDemand, "reversed_round_robin")
    if not 0 <= leftover_agent < inst.n:
        raise ValueError("leftover_agent out of range")
    n, m = inst.n, inst.m
    padded = max(m, 2 * n)
    singles = [list(v.values) + [Fraction(0)] * (padded - m) for v in inst.valuations]

    pool = full_mask(padded)
    bundles = [0] * n

    def pick(agent: int) -> None:
        best_g = -1
        best_v: Optional[Fraction] = None
        rest = pool
        while rest:
            low = rest & -rest
            g = low.bit_length() - 1
            rest ^= low
            if best_v is None or singles[agent][g] > best_v:
                best_v = singles[agent][g]
                best_g = g
        bundles[agent] |= 1 << best_g
        nonlocal_pool_remove(best_g)

    def nonlocal_pool_remove(g: int) -> None:
        nonlocal pool
        pool &= ~(1 << g)

    for i in range(n):
        pick(i)
    for i in reversed(range(n)):
        pick(i)
    bundles[leftover_agent] |= pool

    real = full_mask(m)
    return tuple(mask & real for mask in bundles)


def pair_demand_mu_closed_form(v: PairDemand) -> Fraction:
    """Closed form for the 2-part fair share of a pair-demand valuation on
    four items a <= b <= c <= d (by singleton value):
    mu = min(v({a, d}), v({b, c})). Cross-checked against the brute-force
    oracle before returning."""
    if v.num_items != 4:
        raise ValueError("closed form is for exactly four items")
    order = sorted(range(4), key=lambda g: (v.values[g], g))
    a, b, c, d = order
    closed = min(v.value((1 << a) | (1 << d)), v.value((1 << b) | (1 << c)))
    brute = mu(v, full_mask(4), 2).mu
    if closed != brute:
        raise AssertionError(f"closed form {closed} != brute force {brute}")
    return closed
