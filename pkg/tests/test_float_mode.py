"""Float scalar mode: same flows, comparisons up to the context tolerance."""

import pytest

from orbitlab import (
    CoordFunctional,
    DiskSpec,
    FiniteRankOperator,
    SeminormSpec,
    SparseVector,
    dual_norm,
    eval_seminorm,
    invert,
    minkowski,
)
from orbitlab.errors import SingularOperator
from orbitlab.operators import IDENTITY
from orbitlab.scalars import FLOAT, ScalarContext
from orbitlab.scenarios import Scenario, run_scenario
from orbitlab.seminorms import separating_functional


def fsv(*entries):
    return SparseVector({i + 1: float(v) for i, v in enumerate(entries) if v != 0},
                        exact=False)


def test_seminorm_and_dual_in_float_mode():
    p = SeminormSpec.sup_on([1, 2], exact=False)
    assert eval_seminorm(p, fsv(3, -4)) == 4.0
    f = CoordFunctional({1: 3.0, 2: -4.0}, exact=False)
    assert dual_norm(p, f) == 7.0


def test_generator_gauge_in_float_mode():
    disk = DiskSpec.from_generators([fsv(1), fsv(0, 1)], exact=False)
    value = minkowski(disk, fsv(0.5, 0.5), FLOAT)
    assert abs(value - 1.0) < 1e-9


def test_float_inversion_and_tolerance_singularity():
    j = FiniteRankOperator(
        IDENTITY,
        ((CoordFunctional({1: 1.0}, exact=False), fsv(0.5)),),
        exact=False,
    )
    j_inv = invert(j, FLOAT)
    image = j_inv.apply(j.apply(fsv(1)))
    assert abs(image.get(1) - 1.0) < 1e-9

    nearly_singular = FiniteRankOperator(
        IDENTITY,
        ((CoordFunctional({1: 1.0}, exact=False), fsv(-1.0 + 1e-14)),),
        exact=False,
    )
    with pytest.raises(SingularOperator):
        invert(nearly_singular, FLOAT)


def test_separating_functional_float():
    p = SeminormSpec.sup_on([1, 2], exact=False)
    f = separating_functional(p, [fsv(1)], fsv(0, 1), FLOAT)
    assert abs(f.pair(fsv(1))) <= FLOAT.tol
    assert abs(dual_norm(p, f) - 1.0) < 1e-9


def test_float_transport_scenario_runs():
    window, stages = 12, 2
    active = window // 2
    size = 2 * stages
    a_items = [[[i, "1"]] for i in range(1, size + 1)]
    pi = [1, 0, 3, 2]
    b_items = []
    for i in range(size):
        pairs = [[pi[i] + 1, "1"], [active + 1 + i, "0.00000001"]]
        b_items.append(sorted(pairs))
    scenario = Scenario.from_dict({
        "name": "float-twin",
        "scalar_mode": "float",
        "window": window,
        "seed": 7,
        "task": "transport",
        "payload": {
            "a": a_items,
            "b": b_items,
            "p": {"kind": "sup", "weights": [[i, "1"] for i in range(1, active + 1)]},
            "disk": {"weights": [[i, "1"] for i in range(1, window + 1)]},
            "stages": stages,
            "eps_schedule": "geometric:1/2",
        },
    })
    report = run_scenario(scenario)
    assert report.passed, [c.name for c in report.checks if not c.passed]
    assert report.scalar_mode == "float"


def test_context_comparisons():
    ctx = ScalarContext(mode="float", tol=1e-6)
    assert ctx.is_zero(5e-7)
    assert not ctx.is_zero(2e-6)
    assert ctx.eq(1.0, 1.0 + 1e-7)
    assert ctx.lt(0.0, 1.0)
    assert not ctx.lt(1.0, 1.0 + 1e-9)
