"""Concrete instances: every construction used in the verifications, plus
seeded random samplers per valuation class."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    Additive,
    BinaryTable,
    ExplicitTable,
    Instance,
    PairDemand,
    PersonalizedBivalued,
    full_mask,
    mask_of,
)
from .oracles import check_mms_feasible

REJECTION_LIMIT = 10**5


# ---------------------------------------------------------------------------
# named constructions


def stars_partition_size(n: int) -> int:
    """Minimal k with C(2k, k) >= 2n."""
    k = 1
    while math.comb(2 * k, k) < 2 * n:
        k += 1
    return k


def gen_nonexistence_stars(n: int) -> Instance:
    """n agents, m = 2k + n - 2 items (n-2 'stars' then 2k 'commons'), with
    monotone table valuations under which no PMMS allocation exists while an
    MMS allocation does.

    Each agent i privileges a distinct balanced bipartition (A_i, B_i) of the
    commons. The partitions are made unique canonically: A_i is the i-th
    k-subset of the commons containing the first common item, in
    lexicographic order, and B_i its complement.
    """
    if n < 2:
        raise ValueError("need at least two agents")
    k = stars_partition_size(n)
    num_stars = n - 2
    m = 2 * k + num_stars
    stars_mask = full_mask(num_stars)
    commons = list(range(num_stars, m))
    commons_mask = full_mask(m) & ~stars_mask

    c1 = commons[0]
    a_masks = []
    for rest in itertools.combinations(commons[1:], k - 1):
        a_masks.append((1 << c1) | mask_of(rest))
        if len(a_masks) == n:
            break
    if len(a_masks) < n:
        raise ValueError("not enough distinct balanced bipartitions")

    valuations = []
    for i in range(n):
        A = a_masks[i]
        B = commons_mask ^ A
        table = []
        for mask in range(1 << m):
            if mask == A or mask == B:
                table.append(Fraction(k + 1))
            elif mask & stars_mask and mask.bit_count() >= 2:
                table.append(Fraction(2 * k))
            elif mask & stars_mask:
                table.append(Fraction(k))  # a single star
            else:
                table.append(Fraction(mask.bit_count()))
        valuations.append(ExplicitTable(tuple(table)))

    labels = tuple(f"s{j + 1}" for j in range(num_stars)) + tuple(
        f"c{j + 1}" for j in range(2 * k)
    )
    return Instance(n, m, tuple(valuations), labels=labels)


# Pair values for the three-agent EFX/PMMS separation instance
# (1-based item labels; both monotone agents).
_SEPARATION_PAIRS_V1 = {
    (1, 2): 6, (1, 3): 5, (1, 4): 2, (1, 5): 2, (1, 6): 4,
    (2, 3): 2, (2, 4): 3, (2, 5): 5, (2, 6): 4, (3, 4): 4,
    (3, 5): 6, (3, 6): 5, (4, 5): 4, (4, 6): 6, (5, 6): 3,
}
_SEPARATION_PAIRS_V2 = {
    (1, 2): 3, (1, 3): 5, (1, 4): 2, (1, 5): 2, (1, 6): 3,
    (2, 3): 2, (2, 4): 2, (2, 5): 5, (2, 6): 3, (3, 4): 2,
    (3, 5): 4, (3, 6): 2, (4, 5): 3, (4, 6): 5, (5, 6): 4,
}


def gen_separation3() -> Instance:
    """Three agents, six items: two monotone table valuations and one
    additive valuation, admitting no PMMS allocation."""
    m = 6

    def table_for(pairs: dict) -> ExplicitTable:
        table = []
        for mask in range(1 << m):
            size = mask.bit_count()
            if size == 0:
                table.append(Fraction(0))
            elif size == 1:
                table.append(Fraction(1))
            elif size == 2:
                a, b = sorted(g + 1 for g in range(m) if mask & (1 << g))
                table.append(Fraction(pairs[(a, b)]))
            else:
                table.append(Fraction(7))
        return ExplicitTable(tuple(table))

    v3 = Additive.of([100 + j for j in range(1, 7)])
    labels = tuple(str(j) for j in range(1, 7))
    return Instance(
        3, m, (table_for(_SEPARATION_PAIRS_V1), table_for(_SEPARATION_PAIRS_V2), v3),
        labels=labels,
    )


def gen_mnw_counterexample() -> Instance:
    """Two agents, four items: every Nash-welfare-maximizing allocation
    fails EFX."""
    high = mask_of([0, 1])
    return Instance(
        2, 4,
        (
            PersonalizedBivalued(Fraction(5), Fraction(1), high, 4),
            PersonalizedBivalued(Fraction(3), Fraction(1), high, 4),
        ),
        labels=("g1", "g2", "g3", "g4"),
    )


def gen_pmms_not_efx_example() -> Instance:
    """Two agents, three items, identical additive values (0, 0, 2):
    giving {item 1} / {items 2, 3} is PMMS but not EFX."""
    v = Additive.of([0, 0, 2])
    return Instance(2, 3, (v, v), labels=("1", "2", "3"))


def gen_table1_example() -> Instance:
    """Four agents, 18 items x, y, z1..z16; a = (5/2, 3, 4, 5), b = 1;
    x is high for agents 1-2 and y for agents 3-4."""
    m = 18
    a_values = [Fraction(5, 2), Fraction(3), Fraction(4), Fraction(5)]
    highs = [1 << 0, 1 << 0, 1 << 1, 1 << 1]
    valuations = tuple(
        PersonalizedBivalued(a, Fraction(1), high, m) for a, high in zip(a_values, highs)
    )
    labels = ("x", "y") + tuple(f"z{j}" for j in range(1, 17))
    return Instance(4, m, valuations, labels=labels)


# ---------------------------------------------------------------------------
# random samplers (deterministic given the seed)


def random_bivalued(n: int, m: int, seed: int, factored: bool = False,
                    allow_b_zero: bool = True) -> Instance:
    rng = random.Random(seed)
    valuations = []
    for _ in range(n):
        if factored:
            b = Fraction(rng.choice([0, 1, 1, 2] if allow_b_zero else [1, 1, 2]))
            a = Fraction(rng.randint(1, 6)) if b == 0 else b * rng.randint(2, 6)
        else:
            b = Fraction(rng.randint(0, 8 if allow_b_zero else 7) if allow_b_zero else rng.randint(1, 8), rng.choice([1, 2]))
            if not allow_b_zero and b == 0:
                b = Fraction(1, 2)
            a = b + Fraction(rng.randint(1, 6), rng.choice([1, 2]))
        high = rng.getrandbits(m)
        valuations.append(PersonalizedBivalued(a, b, high, m))
    return Instance(n, m, tuple(valuations))


def random_pair_demand(n: int, m: int, seed: int) -> Instance:
    rng = random.Random(seed)
    valuations = tuple(
        PairDemand.of([Fraction(rng.randint(0, 9)) for _ in range(m)]) for _ in range(n)
    )
    return Instance(n, m, valuations)


def random_binary_additive(n: int, m: int, seed: int) -> Instance:
    rng = random.Random(seed)
    valuations = tuple(
        Additive.of([rng.randint(0, 1) for _ in range(m)]) for _ in range(n)
    )
    return Instance(n, m, valuations)


def random_additive(n: int, m: int, seed: int, max_value: int = 9) -> Instance:
    rng = random.Random(seed)
    valuations = tuple(
        Additive.of([rng.randint(0, max_value) for _ in range(m)]) for _ in range(n)
    )
    return Instance(n, m, valuations)


def _draw_binary_table(rng: random.Random, m: int, monotone: bool, normalized: bool) -> BinaryTable:
    """One proposal table. Several proposal shapes are mixed so that accepted
    tables include non-trivial ones (with achievable fair share 1), but every
    draw still goes through the MMS-feasibility rejection check."""
    size = 1 << m
    if monotone:
        seeds = [rng.getrandbits(m) for _ in range(rng.randint(1, 3))]
        ones = {mask for mask in range(size) if any(mask & s == s for s in seeds)}
    else:
        shape = rng.randrange(4)
        if shape == 0:  # sparse desirable bundles
            ones = {rng.getrandbits(m) for _ in range(rng.randint(0, 4))}
        elif shape == 1:  # dense desirable bundles
            zeros = {rng.getrandbits(m) for _ in range(rng.randint(0, 4))}
            ones = {mask for mask in range(size) if mask not in zeros}
        elif shape == 2:  # bundles hitting a target set
            target = rng.getrandbits(m) or 1
            ones = {mask for mask in range(size) if mask & target}
        else:  # bundles avoiding a target set (non-monotone, v(empty) = 1)
            target = rng.getrandbits(m) or 1
            ones = {mask for mask in range(size) if not mask & target}
        for _ in range(rng.randint(0, 2)):  # jitter
            ones ^= {rng.getrandbits(m)}
    if normalized:
        ones.discard(0)
    return BinaryTable(m, frozenset(ones))


@dataclass
class RejectionStats:
    draws: int = 0
    rejections: int = 0


def random_binary_mms_feasible(
    n: int, m: int, seed: int, monotone: bool = False, normalized: bool = True,
    max_draws: int = REJECTION_LIMIT, stats: Optional[RejectionStats] = None,
) -> Instance:
    """Rejection sampling: draw random binary tables and keep only those
    passing the MMS-feasibility check. Raises if the draw limit is hit."""
    rng = random.Random(seed)
    valuations = []
    draws = 0
    while len(valuations) < n:
        if draws >= max_draws:
            raise RuntimeError(f"rejection limit {max_draws} exceeded")
        draws += 1
        if stats is not None:
            stats.draws += 1
        v = _draw_binary_table(rng, m, monotone, normalized)
        if check_mms_feasible(v):
            valuations.append(v)
        elif stats is not None:
            stats.rejections += 1
    return Instance(n, m, tuple(valuations), monotone_required=False,
                    normalized_required=False)


# ---------------------------------------------------------------------------
# generator dispatch (used by the CLI)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)


GENERATOR_KINDS = (
    "stars",
    "separation3",
    "mnw",
    "pmms-not-efx",
    "table1",
    "random-bivalued",
    "random-factored-bivalued",
    "random-pair-demand",
    "random-binary-mms-feasible",
    "random-binary-additive",
    "random-additive",
)


def sample_random(spec: GeneratorSpec) -> Instance:
    kind, seed, p = spec.kind, spec.seed, spec.params
    if kind == "stars":
        return gen_nonexistence_stars(p["n"])
    if kind == "separation3":
        return gen_separation3()
    if kind == "mnw":
        return gen_mnw_counterexample()
    if kind == "pmms-not-efx":
        return gen_pmms_not_efx_example()
    if kind == "table1":
        return gen_table1_example()
    if kind == "random-bivalued":
        return random_bivalued(p["n"], p["m"], seed)
    if kind == "random-factored-bivalued":
        return random_bivalued(p["n"], p["m"], seed, factored=True)
    if kind == "random-pair-demand":
        return random_pair_demand(p["n"], p["m"], seed)
    if kind == "random-binary-mms-feasible":
        return random_binary_mms_feasible(
            p["n"], p["m"], seed,
            monotone=p.get("monotone", False),
            normalized=p.get("normalized", True),
        )
    if kind == "random-binary-additive":
        return random_binary_additive(p["n"], p["m"], seed)
    if kind == "random-additive":
        return random_additive(p["n"], p["m"], seed)
    raise ValueError(f"unknown generator kind: {kind}")
