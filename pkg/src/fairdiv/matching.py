"""Bipartite matching machinery for the match-and-freeze round structure.

Each agent's edges all carry that agent's uniform weight (a ratio of
high to low value), so a maximum-cardinality maximum-weight matching can
be found exactly with rational arithmetic at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import as_fraction

BRUTE_FORCE_EDGE_LIMIT = 20


@dataclass(frozen=True)
class RoundGraph:
    """Bipartite graph between active agents and unallocated items."""

    agents: tuple[int, ...]
    items: tuple[int, ...]
    edges: tuple[tuple[int, int, Fraction], ...]  # (agent, item, weight)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges", tuple((a, g, as_fraction(w)) for a, g, w in self.edges)
        )
        agents = set(self.agents)
        items = set(self.items)
        weight_of: dict[int, Fraction] = {}
        for a, g, w in self.edges:
            if a not in agents or g not in items:
                raise ValueError(f"edge ({a}, {g}) references an unknown node")
            if weight_of.setdefault(a, w) != w:
                raise ValueError(f"agent {a} has edges with differing weights")

    def agent_weight(self, agent: int) -> Optional[Fraction]:
        for a, _, w in self.edges:
            if a == agent:
                return w
        return None


Matching = tuple  # sorted (agent, item) pairs


def _adjacency(graph: RoundGraph) -> dict[int, list[tuple[int, Fraction]]]:
    adj: dict[int, list[tuple[int, Fraction]]] = {a: [] for a in graph.agents}
    for a, g, w in graph.edges:
        adj[a].append((g, w))
    for a in adj:
        adj[a].sort()
    return adj


def max_cardinality_max_weight_matching(graph: RoundGraph) -> Matching:
    """Among maximum-cardinality matchings, one of maximum total weight;
    ties broken toward the lexicographically smallest sorted pair list.

    Uses cardinality-boosted weights (every edge gains a constant C larger
    than any achievable weight total), so maximizing boosted weight selects
    a maximum-cardinality maximum-weight matching.
    """
    if not graph.edges:
        return ()
    agents = sorted({a for a, _, _ in graph.edges})
    edge_items = sorted({g for _, g, _ in graph.edges})
    item_bit = {g: 1 << idx for idx, g in enumerate(edge_items)}
    adj = _adjacency(graph)
    max_w = max(w for _, _, w in graph.edges)
    boost = 1 + min(len(agents), len(edge_items)) * max(max_w, Fraction(0))

    memo: dict[tuple[int, int], tuple[Fraction, tuple]] = {}

    def solve(pos: int, used: int) -> tuple[Fraction, tuple]:
        if pos == len(agents):
            return Fraction(0), ()
        key = (pos, used)
        hit = memo.get(key)
        if hit is not None:
            return hit
        agent = agents[pos]
        best_w, best_pairs = solve(pos + 1, used)  # leave this agent unmatched
        for g, w in adj[agent]:
            bit = item_bit[g]
            if used & bit:
                continue
            sub_w, sub_pairs = solve(pos + 1, used | bit)
            cand_w = boost + w + sub_w
            cand_pairs = ((agent, g),) + sub_pairs
            if cand_w > best_w or (cand_w == best_w and cand_pairs < best_pairs):
                best_w, best_pairs = cand_w, cand_pairs
        memo[key] = (best_w, best_pairs)
        return best_w, best_pairs

    return solve(0, 0)[1]


def brute_force_matching_oracle(graph: RoundGraph) -> Matching:
    """Test oracle: enumerate every matching and pick the optimum under
    the same criteria and tie-break as the production matcher."""
    if len(graph.edges) > BRUTE_FORCE_EDGE_LIMIT:
        raise ValueError(f"oracle limited to {BRUTE_FORCE_EDGE_LIMIT} edges")
    adj = _adjacency(graph)
    agents = sorted(adj)
    best: Optional[tuple[int, Fraction, tuple]] = None  # (-card, -weight, pairs), minimized

    def walk(pos: int, used_items: frozenset, pairs: tuple, weight: Fraction) -> None:
        nonlocal best
        if pos == len(agents):
            key = (-len(pairs), -weight, pairs)
            if best is None or key < best:
                best = key
            return
        walk(pos + 1, used_items, pairs, weight)
        agent = agents[pos]
        for g, w in adj[agent]:
            if g not in used_items:
                walk(pos + 1, used_items | {g}, pairs + ((agent, g),), weight + w)

    walk(0, frozenset(), (), Fraction(0))
    assert best is not None
    return best[2]


def connected_components(graph: RoundGraph) -> list[dict]:
    """Partition of graph nodes into connected components, each reported as
    {"agents": [...], "items": [...]}; isolated nodes form singletons."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for a in graph.agents:
        parent[("a", a)] = ("a", a)
    for g in graph.items:
        parent[("g", g)] = ("g", g)
    for a, g, _ in graph.edges:
        union(("a", a), ("g", g))

    groups: dict = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    components = []
    for members in groups.values():
        components.append({
            "agents": sorted(a for kind, a in members if kind == "a"),
            "items": sorted(g for kind, g in members if kind == "g"),
        })
    components.sort(key=lambda c: (c["agents"], c["items"]))
    return components
