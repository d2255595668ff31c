"""Greedy triangularization of a basis against separating functionals.

Maintains two index prefixes alpha (into the functional list) and beta (into
the basis list) such that every leading minor of the pairing matrix
{f_alpha(j)(u_beta(k))} is invertible, alternating a forced minimal-index
pick with a greedy scan.  From the minors it derives coefficients making the
combined vectors v_m biorthogonal-triangular against the chosen functionals,
which is exactly what turns the shuffled basis matrix unit lower triangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import linalg
from .errors import Exhausted
from .scalars import EXACT, Scalar, ScalarContext
from .vectors import CoordFunctional, SparseVector

# The driver refuses to start without this much slack beyond the prefix it
# must build; greedy scans need room.
WINDOW_MARGIN = 2


def _pairing_matrix(funcs: Sequence[CoordFunctional],
                    vectors: Sequence[SparseVector]) -> List[List[Scalar]]:
    return [[f.pair(x) for x in vectors] for f in funcs]


def _defect_functional(funcs, chosen, ctx) -> CoordFunctional:
    """g = f_{n+1} - sum c_j f_j with g = 0 on all chosen vectors.

    Solving the n x n pairing system for the c_j keeps everything exact, and
    the determinant of the extended minor is g(x) times the previous one.
    """
    n = len(chosen)
    g = funcs[n]
    if n == 0:
        return g
    matrix = [[funcs[j].pair(chosen[k]) for j in range(n)] for k in range(n)]
    rhs = [funcs[n].pair(chosen[k]) for k in range(n)]
    coeffs = linalg.solve(matrix, rhs, ctx)
    for c, f in zip(coeffs, funcs[:n]):
        if c != 0:
            g = g - f.scale(c)
    return g


def _defect_vector(vectors, chosen_funcs, ctx) -> SparseVector:
    """Dual construction: y = x_{n+1} - sum c_k x_k killed by the chosen funcs."""
    n = len(chosen_funcs)
    y = vectors[n]
    if n == 0:
        return y
    matrix = [[chosen_funcs[j].pair(vectors[k]) for k in range(n)] for j in range(n)]
    rhs = [chosen_funcs[j].pair(vectors[n]) for j in range(n)]
    coeffs = linalg.solve(matrix, rhs, ctx)
    for c, x in zip(coeffs, vectors[:n]):
        if c != 0:
            y = y - x.scale(c)
    return y


def greedy_extend_vector(funcs: Sequence[CoordFunctional],
                         chosen: Sequence[SparseVector],
                         candidates: Sequence[SparseVector],
                         ctx: ScalarContext = EXACT) -> Tuple[SparseVector, Scalar]:
    """First candidate keeping the extended minor invertible, with its det."""
    pos, det = _scan_vector(funcs, chosen, candidates, ctx)
    return candidates[pos], det


def _scan_vector(funcs, chosen, candidates, ctx, prev_det=None) -> Tuple[int, Scalar]:
    n = len(chosen)
    if len(funcs) < n + 1:
        raise ValueError("need n+1 functionals to extend n chosen vectors")
    if prev_det is None:
        prev_det = linalg.determinant(_pairing_matrix(funcs[:n], chosen), ctx)
    if ctx.is_zero(prev_det):
        raise ValueError("chosen prefix has a singular pairing matrix")
    g = _defect_functional(list(funcs), list(chosen), ctx)
    for pos, x in enumerate(candidates):
        value = g.pair(x)
        if not ctx.is_zero(value):
            return pos, value * prev_det
    raise Exhausted("all candidates lie in the kernel of the defect functional")


def greedy_extend_functional(vectors: Sequence[SparseVector],
                             chosen: Sequence[CoordFunctional],
                             candidates: Sequence[CoordFunctional],
                             ctx: ScalarContext = EXACT) -> Tuple[CoordFunctional, Scalar]:
    """Dual of greedy_extend_vector with vector and functional roles swapped."""
    pos, det = _scan_functional(vectors, chosen, candidates, ctx)
    return candidates[pos], det


def _scan_functional(vectors, chosen, candidates, ctx, prev_det=None) -> Tuple[int, Scalar]:
    n = len(chosen)
    if len(vectors) < n + 1:
        raise ValueError("need n+1 vectors to extend n chosen functionals")
    if prev_det is None:
        prev_det = linalg.determinant(_pairing_matrix(chosen, vectors[:n]), ctx)
    if ctx.is_zero(prev_det):
        raise ValueError("chosen prefix has a singular pairing matrix")
    y = _defect_vector(list(vectors), list(chosen), ctx)
    for pos, f in enumerate(candidates):
        value = f.pair(y)
        if not ctx.is_zero(value):
            return pos, value * prev_det
    raise Exhausted("all candidate functionals vanish on the defect vector")


@dataclass(frozen=True)
class TriangularizeState:
    """Prefixes of the two bijections plus the triangular combination data.

    alpha/beta are 1-based indices into funcs/basis.  coeffs[m-1] holds the
    m coefficients of v_m = sum_j c_{j,m} u_{beta(j)}; minors[m-1] is the
    exact determinant of the m x m leading pairing minor.
    """

    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    basis: Tuple[SparseVector, ...]
    funcs: Tuple[CoordFunctional, ...]
    coeffs: Tuple[Tuple[Scalar, ...], ...]
    v: Tuple[SparseVector, ...]
    minors: Tuple[Scalar, ...]

    @property
    def built(self) -> int:
        return len(self.alpha)

    def chosen_funcs(self) -> List[CoordFunctional]:
        return [self.funcs[a - 1] for a in self.alpha]

    def chosen_basis(self) -> List[SparseVector]:
        return [self.basis[b - 1] for b in self.beta]

    def pairing_matrix(self) -> List[List[Scalar]]:
        return _pairing_matrix(self.chosen_funcs(), self.chosen_basis())


def interleave_triangularize(basis: Sequence[SparseVector],
                             funcs: Sequence[CoordFunctional],
                             stages: int,
                             ctx: ScalarContext = EXACT) -> TriangularizeState:
    """Run `stages` rounds of the alternating construction (prefix length 2k).

    Each round picks the minimal unused functional index, scans the basis for
    a vector keeping the minor invertible, then picks the minimal unused
    basis index and scans the functionals.  Raises Exhausted when the inputs
    are too short for the requested prefix plus margin.
    """
    basis = tuple(basis)
    funcs = tuple(funcs)
    target = 2 * stages
    if len(basis) < target or len(funcs) < target + WINDOW_MARGIN:
        raise Exhausted(
            f"prefix of length {target} needs at least {target} basis vectors "
            f"and {target + WINDOW_MARGIN} functionals"
        )
    reducer = linalg.RowReducer(ctx)
    if not all(reducer.try_add(dict(u.entries)) for u in basis):
        raise ValueError("basis vectors are not linearly independent")

    alpha: List[int] = []
    beta: List[int] = []
    chosen_f: List[CoordFunctional] = []
    chosen_u: List[SparseVector] = []
    minors: List[Scalar] = []

    def unused(total, taken):
        return [i for i in range(1, total + 1) if i not in taken]

    one = Fraction(1) if ctx.exact else 1.0
    for _ in range(stages):
        # forced minimal functional index, greedy basis scan
        a_idx = min(unused(len(funcs), set(alpha)))
        alpha.append(a_idx)
        chosen_f.append(funcs[a_idx - 1])
        candidates = unused(len(basis), set(beta))
        pos, det = _scan_vector(
            chosen_f, chosen_u, [basis[i - 1] for i in candidates], ctx,
            prev_det=minors[-1] if minors else one,
        )
        beta.append(candidates[pos])
        chosen_u.append(basis[candidates[pos] - 1])
        minors.append(det)

        # forced minimal basis index, greedy functional scan
        b_idx = min(unused(len(basis), set(beta)))
        beta.append(b_idx)
        chosen_u.append(basis[b_idx - 1])
        candidates = unused(len(funcs), set(alpha))
        pos, det = _scan_functional(
            chosen_u, chosen_f, [funcs[i - 1] for i in candidates], ctx,
            prev_det=minors[-1],
        )
        alpha.append(candidates[pos])
        chosen_f.append(funcs[candidates[pos] - 1])
        minors.append(det)

    # coefficients: solve A_m c = e_m for each built m
    coeffs: List[Tuple[Scalar, ...]] = []
    vs: List[SparseVector] = []
    full = _pairing_matrix(chosen_f, chosen_u)
    for m in range(1, target + 1):
        a_m = [row[:m] for row in full[:m]]
        rhs = [Fraction(0) if ctx.exact else 0.0] * m
        rhs[m - 1] = Fraction(1) if ctx.exact else 1.0
        c = linalg.solve(a_m, rhs, ctx)
        coeffs.append(tuple(c))
        v = SparseVector.zero(ctx.exact)
        for cj, u in zip(c, chosen_u[:m]):
            if cj != 0:
                v = v + u.scale(cj)
        vs.append(v)

    return TriangularizeState(
        alpha=tuple(alpha),
        beta=tuple(beta),
        basis=basis,
        funcs=funcs,
        coeffs=tuple(coeffs),
        v=tuple(vs),
        minors=tuple(minors),
    )


def build_omega_operator(state: TriangularizeState):
    """Operator x -> sum_n x_{alpha(n)} v_n for coordinate-functional states.

    Its matrix in the shuffled basis e_alpha(1), e_alpha(2), ... is unit
    lower triangular, so it maps the span of the first n shuffled basis
    vectors onto span{v_1..v_n}.
    """
    from .operators import FiniteRankOperator, ZERO

    for a in state.alpha:
        f = state.funcs[a - 1]
        if f.pairs() != ((a, Fraction(1)),) and f.pairs() != ((a, 1.0),):
            raise ValueError(
                "shuffled-basis operator needs coordinate functionals as funcs"
            )
    terms = tuple(
        (state.funcs[a - 1], v) for a, v in zip(state.alpha, state.v)
    )
    exact = state.v[0].exact if state.v else True
    return FiniteRankOperator(ZERO, terms, exact)


def shuffled_matrix(state: TriangularizeState) -> List[List[Scalar]]:
    """M[j][n] = coordinate alpha(j+1) of v_{n+1}; unit lower triangular."""
    return [[v.get(a) for v in state.v] for a in state.alpha]


def omega_forward_solve(state: TriangularizeState, y: SparseVector,
                        ctx: ScalarContext = EXACT) -> List[Scalar]:
    """Coefficients z with sum_n z_n v_n = y, by forward substitution.

    Only valid for y in the span of the built v's; the caller can verify by
    recombining.  Demonstrates exact invertibility of the triangular matrix.
    """
    m = shuffled_matrix(state)
    n = state.built
    zs: List[Scalar] = []
    for j in range(n):
        val = y.get(state.alpha[j])
        for t in range(j):
            val -= m[j][t] * zs[t]
        zs.append(val / m[j][j])
    return zs


def map_between_spans(source: TriangularizeState, target: TriangularizeState,
                      x: SparseVector, ctx: ScalarContext = EXACT) -> SparseVector:
    """Convenience composition: solve through the source triangle, push
    through the target one.  No claims beyond the built prefixes."""
    if source.built != target.built:
        raise ValueError("states must have prefixes of equal length")
    zs = omega_forward_solve(source, x, ctx)
    out = SparseVector.zero(ctx.exact)
    for z, v in zip(zs, target.v):
        if z != 0:
            out = out + v.scale(z)
    return out
