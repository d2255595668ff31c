"""Finite-rank perturbations of the identity and their exact inverses.

An operator is base + sum_j f_j (x) v_j with base either the identity or
zero.  Inversion goes through the k x k Gram system G_ij = f_i(v_j); the
Neumann sum c = sum_j p*(f_j) p_D(v_j) < 1 is kept as the invertibility
certificate only, never as a numerical inversion device.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import linalg
from .errors import BudgetExceeded, SingularOperator
from .scalars import EXACT, Scalar, ScalarContext
from .seminorms import DiskSpec, SeminormSpec, dual_norm, minkowski
from .vectors import CoordFunctional, SparseVector

IDENTITY = "identity"
ZERO = "zero"

Term = Tuple[CoordFunctional, SparseVector]


@dataclass(frozen=True)
class FiniteRankOperator:
    """x -> base(x) + sum_j f_j(x) v_j, term order preserved."""

    base: str = IDENTITY
    terms: Tuple[Term, ...] = field(default_factory=tuple)
    exact: bool = True

    def __post_init__(self):
        if self.base not in (IDENTITY, ZERO):
            raise ValueError(f"unknown base {self.base!r}")
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def identity(cls, exact: bool = True) -> "FiniteRankOperator":
        return cls(IDENTITY, (), exact)

    @classmethod
    def zero(cls, exact: bool = True) -> "FiniteRankOperator":
        return cls(ZERO, (), exact)

    def with_term(self, f: CoordFunctional, v: SparseVector) -> "FiniteRankOperator":
        return FiniteRankOperator(self.base, self.terms + ((f, v),), self.exact)

    @property
    def rank_bound(self) -> int:
        return len(self.terms)

    def linear_part(self) -> "FiniteRankOperator":
        """The operator minus its identity component."""
        return FiniteRankOperator(ZERO, self.terms, self.exact)

    def plus_identity(self) -> "FiniteRankOperator":
        return FiniteRankOperator(IDENTITY, self.terms, self.exact)

    def apply(self, x: SparseVector) -> SparseVector:
        out = x if self.base == IDENTITY else SparseVector.zero(self.exact)
        for f, v in self.terms:
            coeff = f.pair(x)
            if coeff != 0:
                out = out + v.scale(coeff)
        return out

    def compose(self, other: "FiniteRankOperator") -> "FiniteRankOperator":
        """self after other, expanded back into base-plus-terms form."""
        terms: List[Term] = []
        for g, w in other.terms:
            image = w if self.base == IDENTITY else SparseVector.zero(self.exact)
            for f, v in self.terms:
                coeff = f.pair(w)
                if coeff != 0:
                    image = image + v.scale(coeff)
            if not image.is_zero():
                terms.append((g, image))
        if other.base == IDENTITY:
            for f, v in self.terms:
                terms.append((f, v))
        base = IDENTITY if self.base == IDENTITY and other.base == IDENTITY else ZERO
        return FiniteRankOperator(base, tuple(terms), self.exact)

    def matrix_on(self, indices: Sequence[int]) -> List[List[Scalar]]:
        """Matrix of the operator restricted to the given window coordinates."""
        cols = [self.apply(SparseVector.basis(j, self.exact)) for j in indices]
        return [[col.get(i) for col in cols] for i in indices]


@dataclass(frozen=True)
class NeumannBudget:
    """Certificate c = sum_j p*(f_j) p_D(v_j) < 1 for invertibility of I + T."""

    p: SeminormSpec
    disk: DiskSpec
    c: Scalar
    per_term: Tuple[Tuple[Scalar, Scalar], ...]
    epsilons: Optional[Tuple[Scalar, ...]] = None


def neumann_certificate(t: FiniteRankOperator, p: SeminormSpec, disk: DiskSpec,
                        epsilons: Optional[Sequence[Scalar]] = None,
                        ctx: ScalarContext = EXACT) -> NeumannBudget:
    """Compute the budget of a base-zero operator; BudgetExceeded if c >= 1."""
    if t.base != ZERO:
        raise ValueError("certificate applies to the finite-rank part only")
    per_term = []
    c = Fraction(0) if t.exact else 0.0
    for f, v in t.terms:
        df = dual_norm(p, f)
        pv = minkowski(disk, v, ctx)
        per_term.append((df, pv))
        c += df * pv
    if not c < 1:
        raise BudgetExceeded(c)
    return NeumannBudget(
        p=p,
        disk=disk,
        c=c,
        per_term=tuple(per_term),
        epsilons=tuple(epsilons) if epsilons is not None else None,
    )


def invert(j: FiniteRankOperator, ctx: ScalarContext = EXACT) -> FiniteRankOperator:
    """Exact inverse of I + sum f_j (.) v_j via the Gram system.

    The inverse is I - sum_j f_j (.) u_j with u_j = sum_i M_ij v_i and
    M = (I_k + G)^{-1}, G_ij = f_i(v_j).  SingularOperator when I_k + G is
    singular, i.e. when the operator annihilates some vector.
    """
    if j.base != IDENTITY:
        raise ValueError("inversion expects an identity-plus-finite-rank operator")
    k = len(j.terms)
    if k == 0:
        return FiniteRankOperator.identity(j.exact)
    one = Fraction(1) if j.exact else 1.0
    gram = [
        [j.terms[r][0].pair(j.terms[c][1]) + (one if r == c else 0) for c in range(k)]
        for r in range(k)
    ]
    m = linalg.invert_matrix(gram, ctx)
    new_terms = []
    for col in range(k):
        u = SparseVector.zero(j.exact)
        for row in range(k):
            if m[row][col] != 0:
                u = u + j.terms[row][1].scale(m[row][col])
        new_terms.append((j.terms[col][0], -u))
    return FiniteRankOperator(IDENTITY, tuple(new_terms), j.exact)


def orbit(t: FiniteRankOperator, x0: SparseVector, horizon: int) -> List[SparseVector]:
    """First `horizon` elements x0, T x0, T^2 x0, ..."""
    out = []
    x = x0
    for _ in range(horizon):
        out.append(x)
        x = t.apply(x)
    return out


def conjugate_orbit(t0: FiniteRankOperator, x0: SparseVector, j: FiniteRankOperator,
                    horizon: int, ctx: ScalarContext = EXACT) -> List[SparseVector]:
    """Orbit of J T0 J^{-1} started at J x0, computed through the conjugate."""
    j_inv = invert(j, ctx)
    conjugated = j.compose(t0).compose(j_inv)
    return orbit(conjugated, j.apply(x0), horizon)
