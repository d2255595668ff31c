"""Back-and-forth synthesis of an invertible operator matching two enumerations.

Alternates forward steps (send the next unmatched element of A onto some
element of B) and backward steps (arrange a preimage in A for the next
unmatched element of B), each time adding one rank-one term f (.) v with
dual-norm-one f and a v small enough in the disk gauge that the running
Neumann budget stays below one.  The matched pairs are exact identities, not
approximations: the rank-one update absorbs the distance to the chosen
approximant.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .density import Enumeration
from .errors import (
    Exhausted,
    NoApproximant,
    NotPIndependent,
    StageFailure,
)
from .operators import FiniteRankOperator, invert
from .reports import CheckResult, VerificationReport
from .scalars import EXACT, Scalar, ScalarContext
from .seminorms import (
    DiskSpec,
    SeminormSpec,
    dual_norm,
    minkowski,
    p_independent,
    separating_functional,
)
from .vectors import CoordFunctional, SparseVector


@dataclass(frozen=True)
class TransportState:
    """Everything the verifier needs to replay a run from raw data."""

    stage: int
    n_idx: Tuple[int, ...]
    m_idx: Tuple[int, ...]
    terms: FiniteRankOperator          # base-zero running T_k
    epsilons: Tuple[Scalar, ...]
    a: Enumeration
    b: Enumeration
    p: SeminormSpec
    disk: DiskSpec

    @property
    def operator(self) -> FiniteRankOperator:
        """J = I + T_k."""
        return self.terms.plus_identity()

    def budget_used(self, ctx: ScalarContext = EXACT) -> Scalar:
        total = Fraction(0) if self.terms.exact else 0.0
        for f, v in self.terms.terms:
            total += dual_norm(self.p, f) * minkowski(self.disk, v, ctx)
        return total


def initial_state(a: Enumeration, b: Enumeration, p: SeminormSpec, disk: DiskSpec,
                  epsilons: Sequence[Scalar], exact: bool = True) -> TransportState:
    return TransportState(
        stage=0,
        n_idx=(),
        m_idx=(),
        terms=FiniteRankOperator.zero(exact),
        epsilons=tuple(epsilons),
        a=a,
        b=b,
        p=p,
        disk=disk,
    )


def step_forward(state: TransportState, u: SparseVector,
                 constraints: Sequence[SparseVector],
                 pool: Sequence[SparseVector], eps: Scalar,
                 ctx: ScalarContext = EXACT
                 ) -> Tuple[CoordFunctional, SparseVector, SparseVector]:
    """One forward step: returns (f, v, r) with (I + T + f (.) v) u = r in pool.

    f separates u from the constraint span with dual norm one; r is the first
    pool element within eps * |f(u)| of u + T u in the disk gauge; v is the
    exact update making the image land on r.
    """
    t = state.terms
    f = separating_functional(state.p, constraints, u, ctx)
    target = u + t.apply(u)
    f_u = f.pair(u)
    bound = eps * abs(f_u)
    best: Optional[Scalar] = None
    best_pos = None
    for pos, r in enumerate(pool):
        dist = minkowski(state.disk, r - target, ctx)
        if ctx.lt(dist, bound):
            v = (r - target).scale(1 / f_u)
            return f, v, r
        if best is None or dist < best:
            best, best_pos = dist, pos
    raise NoApproximant(
        f"no pool element within {bound} of the forward target; best distance {best}",
        best=best,
        best_index=best_pos,
    )


def step_backward(state: TransportState, u: SparseVector,
                  constraints: Sequence[SparseVector],
                  pool: Sequence[SparseVector], eps: Scalar,
                  ctx: ScalarContext = EXACT
                  ) -> Tuple[CoordFunctional, SparseVector, SparseVector]:
    """One backward step: returns (f, v, a) with (I + T + f (.) v) a = u.

    Solves (I + T) w = u exactly, separates w from the constraints, then
    scans the pool for an a with f(a) != 0 whose exact update vector
    v = (I + T)(w - a) / f(a) fits in the eps slot.
    """
    t = state.terms
    j = t.plus_identity()
    w = invert(j, ctx).apply(u)
    f = separating_functional(state.p, constraints, w, ctx)
    best: Optional[Scalar] = None
    best_pos = None
    for pos, a in enumerate(pool):
        f_a = f.pair(a)
        if ctx.is_zero(f_a):
            continue
        v = j.apply(w - a).scale(1 / f_a)
        size = minkowski(state.disk, v, ctx)
        if ctx.lt(size, eps):
            return f, v, a
        if best is None or size < best:
            best, best_pos = size, pos
    raise NoApproximant(
        f"no pool element yields an update below {eps}; best size {best}",
        best=best,
        best_index=best_pos,
    )


def _min_unused(used: Sequence[int]) -> int:
    n = 1
    taken = set(used)
    while n in taken:
        n += 1
    return n


def run_transport(a: Enumeration, b: Enumeration, p: SeminormSpec, disk: DiskSpec,
                  eps_schedule: Sequence[Scalar], stages: int,
                  ctx: ScalarContext = EXACT
                  ) -> Tuple[FiniteRankOperator, TransportState]:
    """Drive `stages` rounds of the alternating scheme and return (J, state).

    Index selection follows the minimal-unused rule; each aborted step is
    re-raised as StageFailure carrying the stage number and partial state.
    """
    if not p_independent(p, a.items, ctx):
        raise NotPIndependent("first enumeration is not p-independent")
    if not p_independent(p, b.items, ctx):
        raise NotPIndependent("second enumeration is not p-independent")
    if len(eps_schedule) < 2 * stages:
        raise ValueError("epsilon schedule shorter than the requested stages")
    total = sum(eps_schedule[: 2 * stages])
    if not total < 1:
        raise ValueError(f"epsilon schedule sums to {total} >= 1")

    state = initial_state(a, b, p, disk, eps_schedule, exact=ctx.exact)
    for q in range(1, stages + 1):
        try:
            state = _run_stage(state, q, ctx)
        except (NoApproximant, Exhausted) as exc:
            raise StageFailure(q, state, exc) from exc
    return state.operator, state


def _run_stage(state: TransportState, q: int, ctx: ScalarContext) -> TransportState:
    a, b = state.a, state.b
    n_idx, m_idx = list(state.n_idx), list(state.m_idx)

    n_fwd = _min_unused(n_idx)
    m_bwd = _min_unused(m_idx)
    if n_fwd > len(a) or m_bwd > len(b):
        raise Exhausted(f"enumeration prefix exhausted at stage {q}")

    # forward: u = a(n_fwd), pool = unused B except the reserved backward target
    u = a.vector(n_fwd)
    constraints = [a.vector(i) for i in n_idx]
    used_m = set(m_idx) | {m_bwd}
    pool_idx = [i for i in range(1, len(b) + 1) if i not in used_m]
    f, v, r = step_forward(
        state, u, constraints, [b.vector(i) for i in pool_idx],
        state.epsilons[2 * q - 2], ctx,
    )
    m_fwd = pool_idx[[b.vector(i) for i in pool_idx].index(r)]
    n_idx.append(n_fwd)
    m_idx.append(m_fwd)
    state = replace(state, terms=state.terms.with_term(f, v), n_idx=tuple(n_idx),
                    m_idx=tuple(m_idx))

    # backward: u = b(m_bwd), pool = unused A
    u = b.vector(m_bwd)
    constraints = [a.vector(i) for i in n_idx]
    pool_idx = [i for i in range(1, len(a) + 1) if i not in set(n_idx)]
    f, v, picked = step_backward(
        state, u, constraints, [a.vector(i) for i in pool_idx],
        state.epsilons[2 * q - 1], ctx,
    )
    n_bwd = pool_idx[[a.vector(i) for i in pool_idx].index(picked)]
    n_idx.append(n_bwd)
    m_idx.append(m_bwd)
    return replace(state, stage=q, terms=state.terms.with_term(f, v),
                   n_idx=tuple(n_idx), m_idx=tuple(m_idx))


def matched_pairs(state: TransportState) -> List[Tuple[int, int, int]]:
    """(j, n_j, m_j) rows for reports."""
    return [
        (j + 1, n, m) for j, (n, m) in enumerate(zip(state.n_idx, state.m_idx))
    ]


def _window_indices(state: TransportState) -> List[int]:
    indices = set(state.p.active)
    if state.disk.weights is not None:
        indices |= set(state.disk.weights)
    for x in list(state.a.items) + list(state.b.items):
        indices |= set(x.support)
    return sorted(indices)


def verify_transport(state: TransportState, ctx: ScalarContext = EXACT) -> VerificationReport:
    """Recompute every invariant of the state from raw data.

    Failures are report entries, never exceptions; each entry carries a
    witness message for diagnosis.
    """
    checks: List[CheckResult] = []
    k = state.stage
    built = 2 * k

    def add(name, passed, detail=""):
        checks.append(CheckResult(name=name, passed=bool(passed), detail=detail))

    add("index-count", len(state.n_idx) == built and len(state.m_idx) == built,
        f"{len(state.n_idx)} n / {len(state.m_idx)} m indices for stage {k}")

    add("indices-distinct", len(set(state.n_idx)) == len(state.n_idx)
        and len(set(state.m_idx)) == len(state.m_idx),
        "indices pairwise distinct")

    want = set(range(1, k + 1))
    add("index-coverage", want <= set(state.n_idx) and want <= set(state.m_idx),
        f"{{1..{k}}} inside both index sets")

    slots_ok, slot_details = True, []
    for j, (f, v) in enumerate(state.terms.terms, start=1):
        df = dual_norm(state.p, f)
        pv = minkowski(state.disk, v, ctx)
        if not df <= 1 or not pv < state.epsilons[j - 1]:
            slots_ok = False
            slot_details.append(f"term {j}: p*(f) = {df}, p_D(v) = {pv}")
    add("slot-bounds", slots_ok, "; ".join(slot_details) or "all slots respected")

    add("two-terms-per-stage", len(state.terms.terms) == built,
        f"{len(state.terms.terms)} terms")

    j_op = state.operator
    match_ok, match_details = True, []
    for j, (n, m) in enumerate(zip(state.n_idx, state.m_idx), start=1):
        image = j_op.apply(state.a.vector(n))
        expected = state.b.vector(m)
        same = image == expected if ctx.exact else _close(image, expected, ctx)
        if not same:
            match_ok = False
            match_details.append(f"pair {j}: J a({n}) != b({m})")
    add("exact-matching", match_ok, "; ".join(match_details) or "all matched pairs exact")

    budget = state.budget_used(ctx)
    add("budget-below-one", budget < 1, f"c = {budget}")

    try:
        j_inv = invert(j_op, ctx)
        if ctx.exact:
            round_trip = all(
                j_inv.apply(j_op.apply(SparseVector.basis(i)))
                == SparseVector.basis(i)
                for i in _window_indices(state)
            )
            add("invertible", round_trip, "Gram solve and window round trip")
        else:
            add("invertible", True, "Gram solve with pivot tolerance")
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        add("invertible", False, str(exc))

    kernel_ok = True
    for i in _window_indices(state):
        if i in state.p.active:
            continue
        e = SparseVector.basis(i, ctx.exact)
        if j_op.apply(e) != e:
            kernel_ok = False
    add("kernel-fixed", kernel_ok, "J e_i = e_i outside the active set")

    replay_ok = True
    for q in range(1, k + 1):
        expect_n = _min_unused(state.n_idx[: 2 * q - 2])
        expect_m = _min_unused(state.m_idx[: 2 * q - 2])
        if state.n_idx[2 * q - 2] != expect_n or state.m_idx[2 * q - 1] != expect_m:
            replay_ok = False
    add("min-rule-replay", replay_ok, "forced indices match the minimal-unused rule")

    return VerificationReport(checks=checks)


def _close(x: SparseVector, y: SparseVector, ctx: ScalarContext) -> bool:
    diff = x - y
    return all(ctx.is_zero(v) for v in diff.entries.values())
