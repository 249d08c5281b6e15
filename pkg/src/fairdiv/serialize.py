"""JSON round-tripping for instances, allocations and rationals.

Rationals serialize as ints when integral, else as "p/q" strings; floats
are rejected in both directions so no value is ever rounded.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence, Union

from .core import (
    Additive,
    BinaryTable,
    ExplicitTable,
    Instance,
    PairDemand,
    PersonalizedBivalued,
    Valuation,
    as_fraction,
    items_of,
    mask_of,
)

JsonRational = Union[int, str]


def rational_to_json(x: Fraction) -> JsonRational:
    x = as_fraction(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"expected int or 'p/q' string, got {x!r}")
    return as_fraction(x)


def valuation_to_doc(v: Valuation) -> dict:
    if isinstance(v, PersonalizedBivalued):
        return {
            "type": "personalized_bivalued",
            "a": rational_to_json(v.a),
            "b": rational_to_json(v.b),
            "high_items": sorted(items_of(v.high_items)),
            "m": v.m,
        }
    if isinstance(v, Additive):
        return {"type": "additive", "values": [rational_to_json(x) for x in v.values]}
    if isinstance(v, PairDemand):
        return {"type": "pair_demand", "values": [rational_to_json(x) for x in v.values]}
    if isinstance(v, BinaryTable):
        return {"type": "binary_table", "m": v.m, "ones": sorted(v.ones)}
    if isinstance(v, ExplicitTable):
        return {"type": "table", "table": [rational_to_json(x) for x in v.table]}
    raise TypeError(f"cannot serialize valuation of type {type(v).__name__}")


def valuation_from_doc(doc: dict) -> Valuation:
    kind = doc["type"]
    if kind == "additive":
        return Additive.of([rational_from_json(x) for x in doc["values"]])
    if kind == "personalized_bivalued":
        return PersonalizedBivalued(
            rational_from_json(doc["a"]),
            rational_from_json(doc["b"]),
            mask_of(doc["high_items"]),
            doc["m"],
        )
    if kind == "pair_demand":
        return PairDemand.of([rational_from_json(x) for x in doc["values"]])
    if kind == "binary_table":
        return BinaryTable(doc["m"], frozenset(doc["ones"]))
    if kind == "table":
        return ExplicitTable.of([rational_from_json(x) for x in doc["table"]])
    raise ValueError(f"unknown valuation type: {kind}")


def instance_to_doc(inst: Instance) -> dict:
    doc = {
        "n": inst.n,
        "m": inst.m,
        "valuations": [valuation_to_doc(v) for v in inst.valuations],
        "flags": {
            "monotone_required": inst.monotone_required,
            "normalized_required": inst.normalized_required,
        },
    }
    if inst.labels is not None:
        doc["labels"] = list(inst.labels)
    return doc


def instance_from_doc(doc: dict) -> Instance:
    flags = doc.get("flags", {})
    return Instance(
        n=doc["n"],
        m=doc["m"],
        valuations=tuple(valuation_from_doc(d) for d in doc["valuations"]),
        monotone_required=flags.get("monotone_required", True),
        normalized_required=flags.get("normalized_required", True),
        labels=tuple(doc["labels"]) if doc.get("labels") is not None else None,
    )


def allocation_to_doc(bundles: Sequence[int]) -> dict:
    return {"bundles": [sorted(items_of(mask)) for mask in bundles]}


def allocation_from_doc(doc: dict) -> tuple[int, ...]:
    return tuple(mask_of(items) for items in doc["bundles"])


def dumps(doc: dict) -> str:
    """Canonical serialization: sorted keys, stable spacing, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)
