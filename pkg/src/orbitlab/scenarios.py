"""Scenario files: schema validation, dispatch to the modules, report assembly.

A scenario pins name, scalar mode, window, seed and one task payload.  Runs
are deterministic: the seed drives every randomized spot-check and is
recorded in the report, and reports carry no clocks, so re-running a stored
scenario reproduces its bytes in exact mode.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import __version__, serialize
from .density import Enumeration, EpsilonNet, common_disk, net_report, null_sequence_disk
from .errors import NotInSpan, StageFailure, WitnessNotFound, WorkbenchError
from .hypercyclic import (
    build_nonorbit_set,
    build_shift_operator,
    range_kernel_premise_check,
    omega_shift_demo,
    refute_orbit,
    transitivity_witness,
)
from .reports import CheckResult, Report, Table, scenario_hash
from .scalars import ScalarContext, Scalar, format_scalar, parse_scalar
from .seminorms import SeminormSpec, eval_seminorm, minkowski
from .transport import matched_pairs, run_transport, verify_transport
from .triangular import (
    build_omega_operator,
    interleave_triangularize,
    shuffled_matrix,
)
from .vectors import CoordFunctional, SparseVector

TASKS = ("transport", "triangularize", "disk", "hypercyclic", "refute")


class ScenarioError(WorkbenchError):
    """Schema violation; the message names the offending field path."""


@dataclass
class Scenario:
    name: str
    scalar_mode: str
    window: int
    seed: int
    task: str
    payload: Dict[str, Any]
    expected: Optional[Dict[str, Any]] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scenario":
        for key in ("name", "scalar_mode", "window", "seed", "task", "payload"):
            if key not in data:
                raise ScenarioError(f"{key}: missing")
        if data["scalar_mode"] not in ("exact", "float"):
            raise ScenarioError("scalar_mode: must be 'exact' or 'float'")
        if data["task"] not in TASKS:
            raise ScenarioError(f"task: unknown task {data['task']!r}")
        window = data["window"]
        if not isinstance(window, int) or window < 2:
            raise ScenarioError("window: must be an integer >= 2")
        if not isinstance(data["payload"], dict):
            raise ScenarioError("payload: must be an object")
        return cls(
            name=str(data["name"]),
            scalar_mode=data["scalar_mode"],
            window=window,
            seed=int(data["seed"]),
            task=data["task"],
            payload=data["payload"],
            expected=data.get("expected"),
        )

    def hash_payload(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "scalar_mode": self.scalar_mode,
            "window": self.window,
            "seed": self.seed,
            "task": self.task,
            "payload": self.payload,
        }


def _need(payload: Dict[str, Any], key: str, where: str = "payload"):
    if key not in payload:
        raise ScenarioError(f"{where}.{key}: missing")
    return payload[key]


def _vectors(data, mode: str, where: str) -> List[SparseVector]:
    if not isinstance(data, list):
        raise ScenarioError(f"{where}: must be a list of vectors")
    return [serialize.decode_vector(v, mode) for v in data]


def parse_eps_schedule(spec, count: int, mode: str = "exact") -> List[Scalar]:
    """Either an explicit list of scalars or "geometric:r" with slots r^(j+1)."""
    if isinstance(spec, str):
        kind, _, arg = spec.partition(":")
        if kind != "geometric" or not arg:
            raise ScenarioError(f"eps_schedule: unknown form {spec!r}")
        r = parse_scalar(arg, mode)
        if not 0 < r < 1:
            raise ScenarioError("eps_schedule: ratio must lie in (0, 1)")
        return [r ** (j + 1) for j in range(1, count + 1)]
    return [parse_scalar(str(v), mode) for v in spec]


def run_scenario(scenario: Scenario) -> Report:
    ctx = ScalarContext(mode=scenario.scalar_mode)
    rng = random.Random(scenario.seed)
    report = Report(
        scenario=scenario.name,
        task=scenario.task,
        scalar_mode=scenario.scalar_mode,
        seed=scenario.seed,
        scenario_hash=scenario_hash(scenario.hash_payload()),
        version=__version__,
    )
    runner = _RUNNERS[scenario.task]
    runner(scenario, ctx, rng, report)
    if scenario.expected is not None:
        match = scenario.expected == report.to_dict()
        report.checks.append(CheckResult(
            "regression-match", match,
            "stored expected report reproduced" if match else "report drifted",
        ))
    return report


def _random_window_vector(rng, window: int, ctx: ScalarContext) -> SparseVector:
    entries = {}
    for i in rng.sample(range(1, window + 1), rng.randint(0, min(window, 5))):
        num = rng.randint(-8, 8)
        den = rng.choice([1, 2, 4])
        entries[i] = Fraction(num, den) if ctx.exact else num / den
    return SparseVector(entries, ctx.exact)


def _run_transport_task(scenario: Scenario, ctx, rng, report: Report):
    payload = scenario.payload
    mode = scenario.scalar_mode
    a = Enumeration(tuple(_vectors(_need(payload, "a"), mode, "payload.a")), "A")
    b = Enumeration(tuple(_vectors(_need(payload, "b"), mode, "payload.b")), "B")
    p = serialize.decode_seminorm(_need(payload, "p"), mode)
    disk = serialize.decode_disk(_need(payload, "disk"), mode)
    stages = int(_need(payload, "stages"))
    schedule = parse_eps_schedule(
        payload.get("eps_schedule", "geometric:1/2"), max(2 * stages, 1), mode
    )

    try:
        j, state = run_transport(a, b, p, disk, schedule, stages, ctx)
    except StageFailure as exc:
        report.checks.append(CheckResult("transport-run", False,
                                         f"aborted at stage {exc.stage}: {exc.__cause__}"))
        report.data["aborted_stage"] = exc.stage
        return
    report.checks.append(CheckResult("transport-run", True, f"{stages} stages"))
    verification = verify_transport(state, ctx)
    report.checks.extend(verification.checks)

    rows = []
    for jj, n, m in matched_pairs(state):
        residual = j.apply(a.vector(n)) - b.vector(m)
        rows.append([str(jj), str(n), str(m), serialize.format_vector(residual)])
    report.tables.append(Table("matched-pairs", ["j", "n_j", "m_j", "residual"], rows))
    report.data["budget"] = format_scalar(state.budget_used(ctx))
    report.data["operator"] = serialize.encode_operator(j)
    report.data["state"] = {
        "stage": state.stage,
        "n_idx": list(state.n_idx),
        "m_idx": list(state.m_idx),
        "epsilons": [format_scalar(e) for e in state.epsilons],
    }

    # seeded spot-check: J fixes random vectors supported outside active(p)
    kernel_coords = [i for i in range(1, scenario.window + 1) if i not in p.active]
    fixed = True
    for _ in range(20):
        if not kernel_coords:
            break
        x = SparseVector(
            {i: Fraction(rng.randint(-9, 9)) if ctx.exact else float(rng.randint(-9, 9))
             for i in rng.sample(kernel_coords, min(3, len(kernel_coords)))},
            ctx.exact,
        )
        if j.apply(x) != x:
            fixed = False
    report.checks.append(CheckResult("kernel-fixing-spot-check", fixed,
                                     "20 seeded kernel vectors"))


def _run_triangularize_task(scenario: Scenario, ctx, rng, report: Report):
    payload = scenario.payload
    mode = scenario.scalar_mode
    basis = _vectors(_need(payload, "basis"), mode, "payload.basis")
    stages = int(_need(payload, "stages"))
    funcs = [CoordFunctional.delta(i, ctx.exact) for i in range(1, scenario.window + 1)]
    state = interleave_triangularize(basis, funcs, stages, ctx)

    built = state.built
    report.checks.append(CheckResult("minors-invertible",
                                     all(not ctx.is_zero(d) for d in state.minors),
                                     f"{built} leading minors"))
    fs, us = state.chosen_funcs(), state.chosen_basis()
    tri_ok = True
    for m, v in enumerate(state.v, start=1):
        for jj in range(1, m + 1):
            want = 1 if jj == m else 0
            if fs[jj - 1].pair(v) != want:
                tri_ok = False
    report.checks.append(CheckResult("biorthogonal-triangular", tri_ok,
                                     "f_alpha(j)(v_m) identities"))
    op = build_omega_operator(state)
    matrix = shuffled_matrix(state)
    unit_lower = all(
        matrix[j][j] == 1 and all(ctx.is_zero(matrix[j][t]) for t in range(j + 1, built))
        for j in range(built)
    )
    report.checks.append(CheckResult("unit-lower-triangular", unit_lower,
                                     "matrix in the shuffled basis"))

    report.tables.append(Table(
        "prefixes", ["m", "alpha_m", "beta_m", "minor_det"],
        [[str(m + 1), str(a), str(bb), format_scalar(d)]
         for m, (a, bb, d) in enumerate(zip(state.alpha, state.beta, state.minors))],
    ))
    report.tables.append(Table(
        "combined-vectors", ["m", "v_m"],
        [[str(m + 1), serialize.format_vector(v)] for m, v in enumerate(state.v)],
    ))
    report.data["operator"] = serialize.encode_operator(op)
    report.data["coeffs"] = [[format_scalar(c) for c in row] for row in state.coeffs]


def _run_disk_task(scenario: Scenario, ctx, rng, report: Report):
    payload = scenario.payload
    mode = scenario.scalar_mode
    if "generators" in payload:
        gens = _vectors(payload["generators"], mode, "payload.generators")
        disk = null_sequence_disk(gens)
        inside = True
        rows = []
        for i, g in enumerate(gens, start=1):
            gauge = minkowski(disk, g, ctx)
            rows.append([str(i), serialize.format_vector(g), format_scalar(gauge)])
            if not gauge <= 1:
                inside = False
        report.checks.append(CheckResult("generators-inside-disk", inside,
                                         "p_K(x_j) <= 1 for every generator"))
        report.tables.append(Table("generator-gauges", ["j", "generator", "p_K"], rows))
        probe_rows = []
        for v in _vectors(payload.get("probes", []), mode, "payload.probes"):
            try:
                value = format_scalar(minkowski(disk, v, ctx))
            except NotInSpan:
                value = "NOT_IN_SPAN"
            probe_rows.append([serialize.format_vector(v), value])
        if probe_rows:
            report.tables.append(Table("probes", ["vector", "p_K"], probe_rows))
    elif "common" in payload:
        spec = payload["common"]
        a = Enumeration(tuple(_vectors(_need(spec, "a", "payload.common"), mode,
                                       "payload.common.a")), "A")
        b = Enumeration(tuple(_vectors(_need(spec, "b", "payload.common"), mode,
                                       "payload.common.b")), "B")
        targets = tuple(_vectors(_need(spec, "targets", "payload.common"), mode,
                                 "payload.common.targets"))
        eps = parse_scalar(str(_need(spec, "eps", "payload.common")), mode)
        net = EpsilonNet(window=scenario.window, targets=targets, eps=eps)
        result = common_disk(a, b, net, ctx=ctx)
        report.checks.append(CheckResult("combined-elements-inside-disk",
                                         all(minkowski(result.disk, z, ctx) <= 1
                                             for z in result.combined),
                                         f"{len(result.combined)} elements"))
        report.data["eps_a"] = format_scalar(result.eps_a)
        report.data["eps_b"] = format_scalar(result.eps_b)
        report.data["domination"] = format_scalar(result.domination)
        report.tables.append(Table(
            "residual-schedule", ["m", "dist_a", "dist_b"],
            [[str(m), format_scalar(da), format_scalar(db)]
             for m, da, db in result.schedule],
        ))
        for label, items in (("a", a.items), ("b", b.items)):
            rows = [
                [serialize.format_vector(t), serialize.format_vector(nearest),
                 format_scalar(dist)]
                for t, nearest, dist in net_report(items, net)
            ]
            report.tables.append(Table(
                f"net-report-{label}", ["target", "nearest", "distance"], rows,
            ))
        report.tables.append(Table(
            "disk-weights", ["i", "d_i"],
            [[str(i), format_scalar(w)] for i, w in sorted(result.disk.weights.items())],
        ))
    else:
        raise ScenarioError("payload: disk task needs 'generators' or 'common'")


def _run_hypercyclic_task(scenario: Scenario, ctx, rng, report: Report):
    payload = scenario.payload
    mode = scenario.scalar_mode
    kind = _need(payload, "mode")
    if kind == "build-shift":
        basis = _vectors(_need(payload, "basis"), mode, "payload.basis")
        p = serialize.decode_seminorm(_need(payload, "p"), mode)
        disk = serialize.decode_disk(_need(payload, "disk"), mode)
        spec = build_shift_operator(basis, p, disk, ctx)
        s = spec.operator
        chain_ok = s.apply(spec.us[0]).is_zero() and all(
            s.apply(spec.us[k]) == spec.us[k - 1].scale(spec.weights[k - 1])
            for k in range(1, len(spec.us))
        )
        report.checks.append(CheckResult("chain-identities", chain_ok,
                                         "S u_1 = 0 and S u_k = w_{k-1} u_{k-1}"))
        bound_ok = True
        for _ in range(100):
            x = _random_window_vector(rng, scenario.window, ctx)
            if not minkowski(disk, s.apply(x), ctx) <= eval_seminorm(p, x):
                bound_ok = False
        report.checks.append(CheckResult("continuity-bound", bound_ok,
                                         "p_D(S x) <= p(x) on 100 seeded vectors"))
        report.tables.append(Table(
            "weights", ["n", "w_n"],
            [[str(n + 1), format_scalar(w)] for n, w in enumerate(spec.weights)],
        ))
        report.data["operator"] = serialize.encode_operator(s)
        premise = range_kernel_premise_check(s.plus_identity(), scenario.window,
                                    min(len(basis), 6), ctx)
        report.data["premise_span_dim"] = premise.window_meet_dim
    elif kind == "witness":
        op = serialize.decode_operator(_need(payload, "operator"), mode)
        x = serialize.decode_vector(_need(payload, "x"), mode)
        y = serialize.decode_vector(_need(payload, "y"), mode)
        p = serialize.decode_seminorm(_need(payload, "p"), mode)
        eps = parse_scalar(str(_need(payload, "eps")), mode)
        max_n = int(_need(payload, "max_n"))
        try:
            n, z = transitivity_witness(op, x, y, eps, max_n, p,
                                        window=scenario.window, ctx=ctx)
        except WitnessNotFound as exc:
            report.checks.append(CheckResult("witness-found", False, str(exc)))
            report.data["best_n"] = exc.best_n
            report.data["best_residual"] = format_scalar(exc.best_residual)
            return
        image = z
        for _ in range(n):
            image = op.apply(image)
        res_x = eval_seminorm(p, z - x)
        res_y = eval_seminorm(p, image - y)
        report.checks.append(CheckResult("witness-found", True, f"n = {n}"))
        report.checks.append(CheckResult("residuals-below-eps",
                                         res_x < eps and res_y < eps,
                                         f"{format_scalar(res_x)}, {format_scalar(res_y)}"))
        report.tables.append(Table(
            "witness", ["n", "residual_x", "residual_y"],
            [[str(n), format_scalar(res_x), format_scalar(res_y)]],
        ))
        report.data["z"] = serialize.encode_pairs(z)
    elif kind == "demo":
        x0 = serialize.decode_vector(_need(payload, "x0"), mode)
        horizon = int(_need(payload, "horizon"))
        steps = omega_shift_demo(scenario.window, x0, horizon, ctx.exact)
        report.checks.append(CheckResult("demo-run", True, f"{horizon} steps"))
        report.tables.append(Table(
            "orbit", ["n", "T^n x0"],
            [[str(i), serialize.format_vector(x)] for i, x in enumerate(steps)],
        ))
    else:
        raise ScenarioError(f"payload.mode: unknown hypercyclic mode {kind!r}")


def _run_refute_task(scenario: Scenario, ctx, rng, report: Report):
    payload = scenario.payload
    mode = scenario.scalar_mode
    levels = int(_need(payload, "family_levels"))
    first = int(payload.get("first_active", 1))
    family = [
        SeminormSpec.sup_on(range(1, first + n), exact=ctx.exact)
        for n in range(1, levels + 1)
    ]
    b = Enumeration(tuple(_vectors(payload.get("b", []), mode, "payload.b")), "B")
    ns = build_nonorbit_set(family, b, ctx)
    op = serialize.decode_operator(_need(payload, "operator"), mode)
    x = serialize.decode_vector(_need(payload, "x"), mode)
    horizon = int(_need(payload, "horizon"))
    result = refute_orbit(op, x, ns, horizon, ctx)

    # divergence findings are facts about the candidate, not check failures
    report.checks.append(CheckResult("refute-instrumented", True,
                                     f"horizon {horizon}, |A| = {len(ns.items)}"))
    report.tables.append(Table(
        "membership", ["n", "in_A"],
        [[str(i), str(int(ok))] for i, ok in enumerate(result.in_a)],
    ))
    report.tables.append(Table(
        "m-set", ["n"], [[str(n)] for n in result.m_set],
    ))
    report.data["diverges"] = result.diverges
    report.data["covers_a"] = result.covers_a
    report.data["m_count"] = result.m_count
    report.data["p1_partial_sum"] = format_scalar(result.p1_partial_sum)
    report.data["series_sums"] = {
        str(k): format_scalar(v) for k, v in sorted(result.series_sums.items())
    }
    report.data["first_exit"] = result.first_exit
    report.data["orbit_p1_rank"] = result.orbit_p1_rank


_RUNNERS = {
    "transport": _run_transport_task,
    "triangularize": _run_triangularize_task,
    "disk": _run_disk_task,
    "hypercyclic": _run_hypercyclic_task,
    "refute": _run_refute_task,
}
