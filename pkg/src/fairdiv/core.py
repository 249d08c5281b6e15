"""Domain model: bundles, valuations, instances and allocations.

Bundles are plain ints used as bitmasks over item indices ``0..m-1``.
All arithmetic is exact (``fractions.Fraction``); fairness verdicts are
equality-sensitive, so floats are never used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

RationalLike = Union[int, str, Fraction]

#: Table-backed valuations materialize 2^m entries; generators enforce this cap.
MAX_TABLE_ITEMS = 24


class InvalidBundleError(ValueError):
    """A bundle mask sets a bit outside the valuation's item range."""


class UnsupportedValuationError(TypeError):
    """An operation was called with a valuation class it does not support."""


def full_mask(m: int) -> int:
    """Bitmask with all m item bits set."""
    return (1 << m) - 1


def items_of(mask: int) -> Iterator[int]:
    """Yield the item indices of a bundle mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(items: Sequence[int]) -> int:
    out = 0
    for g in items:
        out |= 1 << g
    return out


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        if "/" in x:
            num, den = x.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(x))
    if isinstance(x, float):
        raise TypeError("floats are not allowed; pass int, Fraction or 'p/q'")
    return Fraction(x)


class FairnessNotion(Enum):
    EFX = "efx"
    EFX_POSITIVE = "efx+"
    PMMS = "pmms"
    MMS = "mms"


@dataclass(frozen=True)
class Valuation:
    """Base class. Subclasses answer ``value(bundle)`` for bitmask bundles."""

    @property
    def num_items(self) -> int:
        raise NotImplementedError

    def _value(self, mask: int) -> Fraction:
        raise NotImplementedError

    def value(self, mask: int) -> Fraction:
        if mask < 0 or mask >> self.num_items:
            raise InvalidBundleError(
                f"bundle {bin(mask)} addresses items outside 0..{self.num_items - 1}"
            )
        return self._value(mask)

    def is_additive(self) -> bool:
        return False

    def singleton_values(self) -> tuple[Fraction, ...]:
        """Per-item values v({g}); defined for every class."""
        return tuple(self.value(1 << g) for g in range(self.num_items))


@dataclass(frozen=True)
class Additive(Valuation):
    """Additive valuation given by per-item values.

    >>> v = Additive.of([1, 2, 3])
    >>> v.value(0b101)
    Fraction(4, 1)
    """

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(as_fraction(x) for x in self.values))
        if any(x < 0 for x in self.values):
            raise ValueError("item values must be non-negative")

    @classmethod
    def of(cls, values: Sequence[RationalLike]) -> "Additive":
        return cls(tuple(as_fraction(x) for x in values))

    @property
    def num_items(self) -> int:
        return len(self.values)

    def _value(self, mask: int) -> Fraction:
        total = Fraction(0)
        for g in items_of(mask):
            total += self.values[g]
        return total

    def is_additive(self) -> bool:
        return True


@dataclass(frozen=True)
class PersonalizedBivalued(Valuation):
    """Additive valuation with per-agent values a > b >= 0.

    Items in ``high_items`` are worth ``a``, the rest ``b``.
    """

    a: Fraction
    b: Fraction
    high_items: int
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        if not (self.a > self.b >= 0):
            raise ValueError("personalized bivalued requires a > b >= 0")
        if self.high_items >> self.m:
            raise InvalidBundleError("high_items addresses items outside 0..m-1")

    @property
    def num_items(self) -> int:
        return self.m

    def is_factored(self) -> bool:
        """True iff b = 0 or a is an integer multiple of b."""
        return self.b == 0 or (self.a / self.b).denominator == 1

    def _value(self, mask: int) -> Fraction:
        high = (mask & self.high_items).bit_count()
        low = mask.bit_count() - high
        return self.a * high + self.b * low

    def is_additive(self) -> bool:
        return True


@dataclass(frozen=True)
class PairDemand(Valuation):
    """Bundle value is the sum of the two highest item values in the bundle."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(as_fraction(x) for x in self.values))
        if any(x < 0 for x in self.values):
            raise ValueError("item values must be non-negative")

    @classmethod
    def of(cls, values: Sequence[RationalLike]) -> "PairDemand":
        return cls(tuple(as_fraction(x) for x in values))

    @property
    def num_items(self) -> int:
        return len(self.values)

    def _value(self, mask: int) -> Fraction:
        best = second = Fraction(0)
        for g in items_of(mask):
            x = self.values[g]
            if x > best:
                best, second = x, best
            elif x > second:
                second = x
        return best + second


@dataclass(frozen=True)
class ExplicitTable(Valuation):
    """Arbitrary set function stored as a 2^m table indexed by bundle mask."""

    table: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(as_fraction(x) for x in self.table))
        size = len(self.table)
        if size == 0 or size & (size - 1):
            raise ValueError("table length must be a power of two")
        if self.num_items > MAX_TABLE_ITEMS:
            raise ValueError(f"explicit tables are capped at {MAX_TABLE_ITEMS} items")

    @classmethod
    def of(cls, table: Sequence[RationalLike]) -> "ExplicitTable":
        return cls(tuple(as_fraction(x) for x in table))

    @property
    def num_items(self) -> int:
        return len(self.table).bit_length() - 1

    def _value(self, mask: int) -> Fraction:
        return self.table[mask]


_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class BinaryTable(Valuation):
    """Binary-valued set function: v(S) in {0, 1}, not necessarily monotone
    or normalized. ``ones`` is the set of bundle masks with value 1."""

    m: int
    ones: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ones", frozenset(self.ones))
        if self.m > MAX_TABLE_ITEMS:
            raise ValueError(f"binary tables are capped at {MAX_TABLE_ITEMS} items")
        if any(mask < 0 or mask >> self.m for mask in self.ones):
            raise InvalidBundleError("ones contains a mask outside the item range")

    @property
    def num_items(self) -> int:
        return self.m

    def _value(self, mask: int) -> Fraction:
        return _ONE if mask in self.ones else _ZERO


def value(v: Valuation, mask: int) -> Fraction:
    """Evaluate v(S) for a bundle bitmask S."""
    return v.value(mask)


def to_explicit_table(v: Valuation) -> ExplicitTable:
    """Materialize any valuation on m <= MAX_TABLE_ITEMS items as a table."""
    m = v.num_items
    if m > MAX_TABLE_ITEMS:
        raise ValueError("valuation has too many items to materialize")
    return ExplicitTable(tuple(v.value(mask) for mask in range(1 << m)))


def is_monotone(v: Valuation, m: Optional[int] = None) -> bool:
    """Scan S subset-of T => v(S) <= v(T) over single-item extensions."""
    m = v.num_items if m is None else m
    for mask in range(1 << m):
        base = v.value(mask)
        for g in range(m):
            bit = 1 << g
            if not mask & bit and v.value(mask | bit) < base:
                return False
    return True


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: n agents, m items, one valuation per agent."""

    n: int
    m: int
    valuations: tuple[Valuation, ...]
    monotone_required: bool = True
    normalized_required: bool = True
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if self.n < 1:
            raise ValueError("need at least one agent")
        if len(self.valuations) != self.n:
            raise ValueError("need exactly one valuation per agent")
        for v in self.valuations:
            if v.num_items != self.m:
                raise ValueError("all valuations must address exactly m items")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.m:
                raise ValueError("need exactly one label per item")
        if self.normalized_required:
            for i, v in enumerate(self.valuations):
                if v.value(0) != 0:
                    raise ValueError(f"valuation of agent {i} is not normalized")
        if self.monotone_required:
            for i, v in enumerate(self.valuations):
                # non-table classes are monotone by construction
                if isinstance(v, (ExplicitTable, BinaryTable)) and not is_monotone(v):
                    raise ValueError(f"valuation of agent {i} is not monotone")

    @property
    def all_items(self) -> int:
        return full_mask(self.m)

    def value(self, agent: int, mask: int) -> Fraction:
        return self.valuations[agent].value(mask)


Allocation = tuple  # n bundle masks, pairwise disjoint, covering all items


@dataclass(frozen=True)
class AllocationViolation:
    kind: str  # "overlap" | "uncovered" | "out_of_range" | "arity"
    item: Optional[int] = None

    def __str__(self) -> str:
        if self.item is None:
            return self.kind
        return f"{self.kind}(item {self.item})"


def validate_allocation(inst: Instance, bundles: Sequence[int]) -> Optional[AllocationViolation]:
    """Return None if the bundles partition the item set, else a violation."""
    if len(bundles) != inst.n:
        return AllocationViolation("arity")
    seen = 0
    for mask in bundles:
        if mask < 0 or mask >> inst.m:
            bad = mask if mask < 0 else mask >> inst.m
            item = inst.m + (bad.bit_length() - 1) if mask >= 0 else None
            return AllocationViolation("out_of_range", item)
        if seen & mask:
            return AllocationViolation("overlap", next(items_of(seen & mask)))
        seen |= mask
    if seen != inst.all_items:
        return AllocationViolation("uncovered", next(items_of(inst.all_items & ~seen)))
    return None


def require_valid_allocation(inst: Instance, bundles: Sequence[int]) -> tuple[int, ...]:
    violation = validate_allocation(inst, bundles)
    if violation is not None:
        raise ValueError(f"invalid allocation: {violation}")
    return tuple(bundles)
