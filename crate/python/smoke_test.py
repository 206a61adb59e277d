#!/usr/bin/env python3
"""Smoke test for the gaugekit_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/
(release preferred), stages it under an importable name, and exercises the
main types end to end. Build the extension first with

    cargo build -p gaugekit-py --release
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libgaugekit_py.so",
        ROOT / "target" / "debug" / "libgaugekit_py.so",
        ROOT / "target" / "release" / "libgaugekit_py.dylib",
        ROOT / "target" / "debug" / "libgaugekit_py.dylib",
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p gaugekit-py --release")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="gaugekit-py-"))
    target = stage / "gaugekit_py.so"
    shutil.copyfile(built, target)
    sys.path.insert(0, str(stage))
    import gaugekit_py

    return gaugekit_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol * (1.0 + abs(b)), f"{a} != {b} (tol {tol})"


def main():
    gk = load_module()

    # polar pairs: the 1-norm's polar is the max-norm, the 2-norm is self-dual
    n1 = gk.Gauge.norm("one", 2)
    approx(n1.evaluate([1.0, -2.0]), 3.0)
    approx(n1.polar([3.0, -1.0]), 3.0)
    n2 = gk.Gauge.norm("two", 2)
    approx(n2.polar([3.0, 4.0]), 5.0)
    assert n1.check_polar_inequality([1.0, 1.0], [1.0, -1.0])

    # the cross-polytope atomic gauge is the 1-norm
    atoms = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
    atomic = gk.Gauge.atomic(atoms)
    approx(atomic.evaluate([0.5, 0.5]), 1.0, tol=1e-7)

    # antipolar of a shifted Euclidean ball: {y : 2 y1 - |y| >= 1}
    ball = gk.ConvexSet.ball(gk.Gauge.norm("two", 2), [2.0, 0.0], 1.0)
    anti, rule, closure = ball.antipolar()
    assert rule == "gauge-ball rule" and not closure
    assert anti.contains([1.0, 0.0])
    assert not anti.contains([0.0, 1.0])
    assert anti.is_raylike() == "yes"

    # the intersection rule refuses a non-ray-like operand
    wedge = gk.ConvexSet.intersect(
        [gk.ConvexSet.halfspace([1.0, 1.0], 1.0), gk.ConvexSet.halfspace([1.0, -1.0], 1.0)]
    )
    line = gk.ConvexSet.affine([[1.0, 0.0]], [1.0])
    try:
        gk.ConvexSet.intersect([wedge, line]).antipolar()
    except ValueError as e:
        assert "ray-like" in str(e)
    else:
        raise AssertionError("intersection rule should refuse the line")

    # minimum 1-norm program: primal 2, gauge dual 1/2, product 1
    problem = gk.Problem(
        gk.Gauge.norm("one", 2), [[1.0, 1.0]], [2.0], gk.Gauge.norm("two", 1), 0.0
    )
    assert "⟨b,y⟩ ≥ 1" in problem.dual_summary("gauge")
    result = problem.solve()
    approx(result["primal_value"], 2.0, tol=1e-8)
    approx(result["dual_value"], 0.5, tol=1e-8)
    approx(result["product"], 1.0, tol=1e-8)

    # sensitivity: the value-function subgradient of the same program
    y, tau, route = problem.value_subgradient(assume_interior=True)
    assert route == "lagrange"
    approx(y[0], 1.0, tol=1e-7)
    approx(tau, -1.0, tol=1e-7)
    v_up = problem.value_function([0.2], 0.0)
    approx(v_up, 2.2, tol=1e-7)

    # max-cut triangle: subgradient dual reaches 1/3 of the primal 3
    dpa = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]
    rows = []
    for i in range(3):
        r = [0.0] * 9
        r[i * 3 + i] = 1.0
        rows.append(r)
    maxcut = gk.Problem(
        gk.Gauge.conic_psd(dpa), rows, [1.0, 1.0, 1.0], gk.Gauge.norm("two", 3), 0.0
    )
    value, point, method = maxcut.primal_oracle()
    approx(value, 3.0, tol=1e-3)
    dual_value, _, dual_method, _, _ = maxcut.solve_dual(step_c=0.2, max_iters=30_000)
    assert dual_method == "projectedsubgradient"
    assert abs(dual_value - 1.0 / 3.0) <= 1e-3
    assert abs(value * dual_value - 1.0) <= 1e-3

    print("smoke test passed:", math.isclose(result["product"], 1.0, rel_tol=1e-8))


if __name__ == "__main__":
    main()
