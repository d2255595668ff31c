"""Canonical JSON-friendly encodings for the workbench value types.

Scalars travel as text ("3/2" for rationals in lowest terms, shortest
round-trip decimals for floats); vectors and functionals as sorted
index/value pair lists.  Encoders and decoders are inverse to each other in
either scalar mode.
"""

from __future__ import annotations

from typing import Any, List, Mapping

from .operators import FiniteRankOperator
from .scalars import Scalar, format_scalar, parse_scalar
from .seminorms import DiskSpec, SeminormSpec
from .vectors import CoordFunctional, SparseVector


def encode_pairs(value) -> List[List[Any]]:
    return [[i, format_scalar(v)] for i, v in value.pairs()]


def decode_vector(pairs, mode: str = "exact") -> SparseVector:
    return SparseVector(
        {int(i): parse_scalar(str(v), mode) for i, v in pairs}, mode == "exact"
    )


def decode_functional(pairs, mode: str = "exact") -> CoordFunctional:
    return CoordFunctional(
        {int(i): parse_scalar(str(v), mode) for i, v in pairs}, mode == "exact"
    )


def encode_weights(weights: Mapping[int, Scalar]) -> List[List[Any]]:
    return [[i, format_scalar(w)] for i, w in sorted(weights.items())]


def decode_weights(pairs, mode: str = "exact") -> dict:
    return {int(i): parse_scalar(str(w), mode) for i, w in pairs}


def encode_seminorm(p: SeminormSpec) -> dict:
    return {"kind": p.kind, "weights": encode_weights(p.weights)}


def decode_seminorm(data: Mapping, mode: str = "exact") -> SeminormSpec:
    return SeminormSpec(
        data["kind"], decode_weights(data["weights"], mode), mode == "exact"
    )


def encode_disk(d: DiskSpec) -> dict:
    if d.weights is not None:
        return {"weights": encode_weights(d.weights)}
    return {"generators": [encode_pairs(g) for g in d.generators]}


def decode_disk(data: Mapping, mode: str = "exact") -> DiskSpec:
    if "weights" in data:
        return DiskSpec(weights=decode_weights(data["weights"], mode),
                        exact=mode == "exact")
    return DiskSpec(
        generators=tuple(decode_vector(g, mode) for g in data["generators"]),
        exact=mode == "exact",
    )


def encode_operator(t: FiniteRankOperator) -> dict:
    return {
        "base": t.base,
        "terms": [
            {"f": encode_pairs(f), "v": encode_pairs(v)} for f, v in t.terms
        ],
    }


def decode_operator(data: Mapping, mode: str = "exact") -> FiniteRankOperator:
    terms = tuple(
        (decode_functional(term["f"], mode), decode_vector(term["v"], mode))
        for term in data["terms"]
    )
    return FiniteRankOperator(data["base"], terms, mode == "exact")


def format_vector(value) -> str:
    """Compact text form, e.g. "1:3/2 4:-1"; empty support prints "0"."""
    if value.is_zero():
        return "0"
    return " ".join(f"{i}:{format_scalar(v)}" for i, v in value.pairs())


def parse_vector(text: str, mode: str = "exact") -> SparseVector:
    text = text.strip()
    if text == "0" or not text:
        return SparseVector.zero(mode == "exact")
    entries = {}
    for chunk in text.split():
        idx, _, val = chunk.partition(":")
        entries[int(idx)] = parse_scalar(val, mode)
    return SparseVector(entries, mode == "exact")
