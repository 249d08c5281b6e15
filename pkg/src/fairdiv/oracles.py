"""Brute-force fair-share computation and fairness verification.

Everything here is exhaustive and exact: maximin shares enumerate all
labeled partitions, allocation scans enumerate all n^m assignments.
Exceeding the enumeration budget is a hard error, never an approximation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .core import (
    Additive,
    FairnessNotion,
    Instance,
    PersonalizedBivalued,
    UnsupportedValuationError,
    Valuation,
    full_mask,
    items_of,
    require_valid_allocation,
)

DEFAULT_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


def _check_budget(count: int, budget: Optional[int]) -> None:
    cap = DEFAULT_BUDGET if budget is None else budget
    if count > cap:
        raise BudgetExceededError(f"enumeration of size {count} exceeds budget {cap}")


@dataclass(frozen=True)
class MaximinResult:
    mu: Fraction
    witness: tuple[int, ...]  # k part masks, a labeled partition of S


@dataclass(frozen=True)
class FairnessViolation:
    envier: int
    envied: Optional[int]  # None for MMS (no pairwise counterpart)
    witness: object  # violating item index, or a maximin-partition witness


@dataclass(frozen=True)
class FairnessReport:
    notion: FairnessNotion
    holds: bool
    violations: tuple[FairnessViolation, ...]


@lru_cache(maxsize=1 << 18)
def _mu_search(v: Valuation, S: int, k: int) -> MaximinResult:
    items = list(items_of(S))
    best_min: Optional[Fraction] = None
    best_parts: tuple[int, ...] = ()
    parts = [0] * k

    # Items are assigned in increasing index order and labels in increasing
    # order, so the first optimum found has the lexicographically smallest
    # label vector; only strict improvements replace it.
    def assign(idx: int) -> None:
        nonlocal best_min, best_parts
        if idx == len(items):
            worst = min(v._value(p) for p in parts)
            if best_min is None or worst > best_min:
                best_min = worst
                best_parts = tuple(parts)
            return
        bit = 1 << items[idx]
        for label in range(k):
            parts[label] |= bit
            assign(idx + 1)
            parts[label] ^= bit

    assign(0)
    assert best_min is not None
    return MaximinResult(best_min, best_parts)


def mu(v: Valuation, S: int, k: int, budget: Optional[int] = None) -> MaximinResult:
    """Exact fair share: max over labeled k-part partitions of S of the
    minimum part value, with a witness partition attaining it."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if S < 0 or S >> v.num_items:
        raise ValueError("S addresses items outside the valuation's range")
    _check_budget(k ** S.bit_count(), budget)
    return _mu_search(v, S, k)


def clear_caches() -> None:
    _mu_search.cache_clear()


# ---------------------------------------------------------------------------
# fairness predicates (short-circuiting) and full reports


def _efx_violations(inst: Instance, bundles, positive_only: bool, first_only: bool):
    out = []
    for i in range(inst.n):
        vi = inst.valuations[i]
        own = vi.value(bundles[i])
        if positive_only:
            singles = vi.singleton_values()
        for j in range(inst.n):
            if i == j:
                continue
            for g in items_of(bundles[j]):
                if positive_only and singles[g] <= 0:
                    continue
                if own < vi.value(bundles[j] & ~(1 << g)):
                    out.append(FairnessViolation(i, j, g))
                    if first_only:
                        return out
                    break  # one witness item per pair
    return out


def check_efx(inst: Instance, bundles) -> FairnessReport:
    """EFX: v_i(X_i) >= v_i(X_j \\ {g}) for all pairs i,j and all g in X_j."""
    bundles = require_valid_allocation(inst, bundles)
    violations = tuple(_efx_violations(inst, bundles, positive_only=False, first_only=False))
    return FairnessReport(FairnessNotion.EFX, not violations, violations)


def check_efx_positive(inst: Instance, bundles) -> FairnessReport:
    """EFX restricted to removal of items the envier values positively.

    Defined for additive valuations only.
    """
    for v in inst.valuations:
        if not v.is_additive():
            raise UnsupportedValuationError("EFX+ is defined for additive valuations only")
    bundles = require_valid_allocation(inst, bundles)
    violations = tuple(_efx_violations(inst, bundles, positive_only=True, first_only=False))
    return FairnessReport(FairnessNotion.EFX_POSITIVE, not violations, violations)


def check_pmms(inst: Instance, bundles, budget: Optional[int] = None) -> FairnessReport:
    bundles = require_valid_allocation(inst, bundles)
    violations = []
    for i in range(inst.n):
        vi = inst.valuations[i]
        own = vi.value(bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            result = mu(vi, bundles[i] | bundles[j], 2, budget)
            if own < result.mu:
                violations.append(FairnessViolation(i, j, result.witness))
    return FairnessReport(FairnessNotion.PMMS, not violations, tuple(violations))


def check_mms(inst: Instance, bundles, budget: Optional[int] = None) -> FairnessReport:
    bundles = require_valid_allocation(inst, bundles)
    violations = []
    for i in range(inst.n):
        result = mu(inst.valuations[i], inst.all_items, inst.n, budget)
        if inst.valuations[i].value(bundles[i]) < result.mu:
            violations.append(FairnessViolation(i, None, result.witness))
    return FairnessReport(FairnessNotion.MMS, not violations, tuple(violations))


def _is_efx(inst, bundles, positive_only=False) -> bool:
    return not _efx_violations(inst, bundles, positive_only, first_only=True)


def _is_pmms(inst, bundles, budget=None) -> bool:
    for i in range(inst.n):
        vi = inst.valuations[i]
        own = vi.value(bundles[i])
        for j in range(inst.n):
            if i != j and own < mu(vi, bundles[i] | bundles[j], 2, budget).mu:
                return False
    return True


def _is_mms(inst, bundles, budget=None) -> bool:
    for i in range(inst.n):
        if inst.valuations[i].value(bundles[i]) < mu(inst.valuations[i], inst.all_items, inst.n, budget).mu:
            return False
    return True


def allocation_satisfies(inst: Instance, bundles, notion: FairnessNotion,
                         budget: Optional[int] = None) -> bool:
    if notion is FairnessNotion.EFX:
        return _is_efx(inst, bundles)
    if notion is FairnessNotion.EFX_POSITIVE:
        for v in inst.valuations:
            if not v.is_additive():
                raise UnsupportedValuationError("EFX+ is defined for additive valuations only")
        return _is_efx(inst, bundles, positive_only=True)
    if notion is FairnessNotion.PMMS:
        return _is_pmms(inst, bundles, budget)
    if notion is FairnessNotion.MMS:
        return _is_mms(inst, bundles, budget)
    raise ValueError(f"unknown notion {notion}")


def check(inst: Instance, bundles, notion: FairnessNotion,
          budget: Optional[int] = None) -> FairnessReport:
    if notion is FairnessNotion.EFX:
        return check_efx(inst, bundles)
    if notion is FairnessNotion.EFX_POSITIVE:
        return check_efx_positive(inst, bundles)
    if notion is FairnessNotion.PMMS:
        return check_pmms(inst, bundles, budget)
    if notion is FairnessNotion.MMS:
        return check_mms(inst, bundles, budget)
    raise ValueError(f"unknown notion {notion}")


# ---------------------------------------------------------------------------
# exhaustive searches


def iter_allocations(n: int, m: int) -> Iterable[tuple[int, ...]]:
    """All n^m labeled allocations (empty bundles allowed) in lexicographic
    order of the per-item owner vector."""
    for owners in itertools.product(range(n), repeat=m):
        bundles = [0] * n
        for g, owner in enumerate(owners):
            bundles[owner] |= 1 << g
        yield tuple(bundles)


def exists_fair_allocation(inst: Instance, notion: FairnessNotion,
                           budget: Optional[int] = None) -> Optional[tuple[int, ...]]:
    """First allocation (lexicographic owner-vector order) satisfying the
    notion, or None after an exhaustive scan."""
    _check_budget(inst.n ** inst.m, budget)
    for bundles in iter_allocations(inst.n, inst.m):
        if allocation_satisfies(inst, bundles, notion, budget):
            return bundles
    return None


def nash_welfare_maximizers(inst: Instance, budget: Optional[int] = None):
    """Exact maximum of the product of utilities over all allocations,
    with every maximizer (in lexicographic order)."""
    _check_budget(inst.n ** inst.m, budget)
    best: Optional[Fraction] = None
    argmax: list[tuple[int, ...]] = []
    for bundles in iter_allocations(inst.n, inst.m):
        product = Fraction(1)
        for i in range(inst.n):
            product *= inst.valuations[i].value(bundles[i])
        if best is None or product > best:
            best = product
            argmax = [bundles]
        elif product == best:
            argmax.append(bundles)
    assert best is not None
    return best, argmax


def check_mms_feasible(v: Valuation, budget: Optional[int] = None) -> bool:
    """True iff for every S: min over bipartitions of the max side value is
    at least mu(v, S, 2). This collapses the all-pairs-of-partitions
    condition to a single pass of 2^|S| bipartitions per subset."""
    m = v.num_items
    _check_budget(3**m, budget)
    for S in range(1 << m):
        maxmin: Optional[Fraction] = None
        minmax: Optional[Fraction] = None
        sub = S
        while True:
            a = v._value(sub)
            b = v._value(S ^ sub)
            lo, hi = (a, b) if a <= b else (b, a)
            if maxmin is None or lo > maxmin:
                maxmin = lo
            if minmax is None or hi < minmax:
                minmax = hi
            if sub == 0:
                break
            sub = (sub - 1) & S
        if minmax < maxmin:
            return False
    return True


# ---------------------------------------------------------------------------
# pairwise compatibility graph (balanced 2-item bundles)


@dataclass(frozen=True)
class CompatGraph:
    """Nodes are (agent, 2-item bundle mask); an edge joins two nodes whose
    owners would not PMMS-envy each other under those bundles."""

    n: int
    m: int
    nodes: tuple[tuple[int, int], ...]
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def degree(self, node) -> int:
        return sum(1 for e in self.edges if node in e)

    def isolated_nodes(self) -> tuple[tuple[int, int], ...]:
        touched = {u for e in self.edges for u in e}
        return tuple(node for node in self.nodes if node not in touched)

    def has_triangle(self) -> bool:
        """Triangle over three distinct agents, i.e. a PMMS-compatible
        balanced allocation when n = 3."""
        adj: dict = {}
        for u, w in self.edges:
            adj.setdefault(u, set()).add(w)
            adj.setdefault(w, set()).add(u)
        edge_list = list(self.edges)
        for u, w in edge_list:
            common = adj.get(u, set()) & adj.get(w, set())
            for x in common:
                if len({u[0], w[0], x[0]}) == 3:
                    return True
        return False


def pair_compatibility_graph(inst: Instance, budget: Optional[int] = None) -> CompatGraph:
    pairs = [(1 << a) | (1 << b) for a, b in itertools.combinations(range(inst.m), 2)]
    nodes = tuple((i, S) for i in range(inst.n) for S in pairs)
    edges = []
    for (i, S), (j, T) in itertools.combinations(nodes, 2):
        if i == j or S & T:
            continue
        union = S | T
        if (inst.valuations[i].value(S) >= mu(inst.valuations[i], union, 2, budget).mu
                and inst.valuations[j].value(T) >= mu(inst.valuations[j], union, 2, budget).mu):
            edges.append(((i, S), (j, T)))
    return CompatGraph(inst.n, inst.m, nodes, tuple(edges))
