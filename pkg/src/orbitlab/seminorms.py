"""Seminorms, disks, dual norms and the concrete separating-functional solve.

Seminorms are sup- or l1-combinations of weighted coordinates over a finite
active set; their kernels are exactly the vectors supported outside the
active set, so kernel membership is a support inspection.  The dual norm and
the Minkowski gauge of a disk are computed in closed form (weight form) or
by an exact linear program (generator form).  The separating-functional
construction replaces the Hahn-Banach step of the abstract theory with a
finite nullspace solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg, simplex
from .errors import NoSeparation, NotInSpan, NotPBounded
from .scalars import EXACT, Scalar, ScalarContext, as_fraction
from .vectors import CoordFunctional, SparseVector

SUP = "sup"
L1 = "l1"


def _clean_weights(weights: Mapping[int, Scalar], exact: bool) -> dict:
    out = {}
    for idx, w in weights.items():
        idx = int(idx)
        w = as_fraction(w) if exact else float(w)
        if not w > 0:
            raise ValueError(f"weight at coordinate {idx} must be positive, got {w}")
        out[idx] = w
    return out


@dataclass(frozen=True)
class SeminormSpec:
    """p(x) = max_i w_i |x_i|  (sup kind)  or  sum_i w_i |x_i|  (l1 kind)."""

    kind: str
    weights: Mapping[int, Scalar] = field(default_factory=dict)
    exact: bool = True

    def __post_init__(self):
        if self.kind not in (SUP, L1):
            raise ValueError(f"unknown seminorm kind {self.kind!r}")
        object.__setattr__(self, "weights", _clean_weights(self.weights, self.exact))

    @classmethod
    def sup_on(cls, indices: Iterable[int], weight: Scalar = 1, exact: bool = True):
        return cls(SUP, {i: weight for i in indices}, exact)

    @classmethod
    def l1_on(cls, indices: Iterable[int], weight: Scalar = 1, exact: bool = True):
        return cls(L1, {i: weight for i in indices}, exact)

    @property
    def active(self) -> frozenset:
        return frozenset(self.weights)

    def kernel_contains(self, x: SparseVector) -> bool:
        return all(i not in self.weights for i in x.entries)


def eval_seminorm(p: SeminormSpec, x: SparseVector) -> Scalar:
    zero = Fraction(0) if p.exact else 0.0
    terms = [p.weights[i] * abs(v) for i, v in x.entries.items() if i in p.weights]
    if not terms:
        return zero
    return max(terms) if p.kind == SUP else sum(terms, zero)


def dual_norm(p: SeminormSpec, f: CoordFunctional) -> Scalar:
    """Smallest c with |f(x)| <= c p(x); NotPBounded if no such c exists."""
    zero = Fraction(0) if p.exact else 0.0
    for i in sorted(f.entries):
        if i not in p.weights:
            raise NotPBounded(i)
    terms = [abs(v) / p.weights[i] for i, v in f.entries.items()]
    if not terms:
        return zero
    return sum(terms, zero) if p.kind == SUP else max(terms)


def dual_norm_witness(p: SeminormSpec, f: CoordFunctional) -> Tuple[Scalar, SparseVector]:
    """Dual norm plus an x with p(x) <= 1 and |f(x)| = dual_norm exactly.

    Sup kind: the sign-pattern vertex of the unit cube; l1 kind: the single
    best coordinate.
    """
    c = dual_norm(p, f)
    if f.is_zero():
        return c, SparseVector.zero(p.exact)
    if p.kind == SUP:
        entries = {
            i: (1 if v > 0 else -1) / p.weights[i] for i, v in f.entries.items()
        }
        return c, SparseVector(entries, p.exact)
    best = max(sorted(f.entries), key=lambda i: abs(f.entries[i]) / p.weights[i])
    sign = 1 if f.entries[best] > 0 else -1
    return c, SparseVector({best: sign / p.weights[best]}, p.exact)


@dataclass(frozen=True)
class DiskSpec:
    """A disk given by l1-type coordinate weights or by a generator list.

    Weight form: p_D(x) = sum_i |x_i| / d_i on vectors supported in the
    weighted coordinates.  Generator form: p_D(u) is the minimal l1 mass of a
    representation of u as a combination of the generators.
    """

    weights: Optional[Mapping[int, Scalar]] = None
    generators: Optional[Tuple[SparseVector, ...]] = None
    exact: bool = True

    def __post_init__(self):
        if (self.weights is None) == (self.generators is None):
            raise ValueError("disk needs exactly one of weights / generators")
        if self.weights is not None:
            object.__setattr__(self, "weights", _clean_weights(self.weights, self.exact))
        else:
            object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def l1_on(cls, indices: Iterable[int], weight: Scalar = 1, exact: bool = True):
        return cls(weights={i: weight for i in indices}, exact=exact)

    @classmethod
    def from_generators(cls, xs: Sequence[SparseVector], exact: bool = True):
        return cls(generators=tuple(xs), exact=exact)


def minkowski(disk: DiskSpec, u: SparseVector, ctx: ScalarContext = EXACT) -> Scalar:
    """Gauge of u with respect to the disk; NotInSpan if u is outside span D."""
    zero = Fraction(0) if disk.exact else 0.0
    if disk.weights is not None:
        total = zero
        for i, v in u.entries.items():
            d = disk.weights.get(i)
            if d is None:
                raise NotInSpan(f"coordinate {i} carries no disk weight")
            total += abs(v) / d
        return total

    gens = disk.generators
    if u.is_zero():
        return zero
    if not gens:
        raise NotInSpan("empty generator list spans only 0")
    coords = sorted(set(u.support).union(*(g.support for g in gens)))
    # Split each coefficient into positive and negative parts; minimize mass.
    k = len(gens)
    a = [
        [gens[j].get(i) for j in range(k)] + [-gens[j].get(i) for j in range(k)]
        for i in coords
    ]
    b = [u.get(i) for i in coords]
    one = Fraction(1) if disk.exact else 1.0
    try:
        result = simplex.solve_lp([one] * (2 * k), a, b, ctx)
    except simplex.Infeasible as exc:
        raise NotInSpan("u is not a combination of the generators") from exc
    return result.value


def project_active(p: SeminormSpec, xs: Sequence[SparseVector]) -> List[dict]:
    """Restrictions to the active coordinates, as plain dicts."""
    return [
        {i: v for i, v in x.entries.items() if i in p.weights} for x in xs
    ]


def p_independent(p: SeminormSpec, xs: Sequence[SparseVector],
                  ctx: ScalarContext = EXACT) -> bool:
    """Exact rank test: residues of xs modulo ker p are linearly independent."""
    reducer = linalg.RowReducer(ctx)
    return all(reducer.try_add(proj) for proj in project_active(p, xs))


def separating_functional(p: SeminormSpec, constraints: Sequence[SparseVector],
                          u: SparseVector, ctx: ScalarContext = EXACT) -> CoordFunctional:
    """f with support in active(p), f = 0 on the constraints, f(u) != 0,
    dual_norm(p, f) = 1.

    Solves the homogeneous system on the active window and rescales; raises
    NoSeparation exactly when (u + span constraints) meets ker p.
    """
    coords = sorted(
        {i for i in u.entries if i in p.weights}.union(
            *({i for i in l.entries if i in p.weights} for l in constraints)
        )
    )
    if not coords:
        raise NoSeparation("u projects to zero on the active coordinates")
    rows = [[l.get(i) for i in coords] for l in constraints]
    u_proj = [u.get(i) for i in coords]
    for candidate in linalg.nullspace(rows, cols=len(coords), ctx=ctx):
        value = sum(c * uv for c, uv in zip(candidate, u_proj))
        if not ctx.is_zero(value):
            f = CoordFunctional(
                {i: c for i, c in zip(coords, candidate) if not ctx.is_zero(c)},
                p.exact,
            )
            return f.scale(1 / dual_norm(p, f))
    raise NoSeparation("u lies in span(constraints) + ker p")
