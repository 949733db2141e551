"""Acceptance gate: ten end-to-end checks at fixed tolerances.

Each test prints exactly one PASS/FAIL line (collected and echoed in the
terminal summary) and asserts the same condition, runtime budget included.
"""
import math
import time

import numpy as np
import pytest

from asymlab import (
    BoundaryCurve,
    EquationSpec,
    LaurentCoeffs,
    ShellSpec,
    SymMat,
    boundary_d,
    expected_profile,
    fit_profile,
    flux_identity,
    hessian_limit,
    legendre,
    legendre_lewy,
    oracle_sle,
    phase,
    rotate_hessian,
    rotate_potential,
    unrotate_potential,
)
from asymlab.asymptotics import decay_exponent
from asymlab.core import AnnulusGrid
from asymlab.equations import residual, residual_many, sigma2_margin
from asymlab.errors import NoDecay
from asymlab.oracle2d import builtin, ihh_expected_d
from asymlab.solver import convergence_study

from conftest import random_symmetric
from test_asymptotics import expansion_residual_samples
from test_transforms import perturbed_quadratic

LINES = []

SLE2 = EquationSpec("SLE", 2, theta=math.pi / 2)
MA2 = EquationSpec("MA", 2)
IHH2 = EquationSpec("IHH", 2)

# five manufactured solutions spanning all three rotation angles; every
# instance carries a nonzero tail so the O(1/r) remainder is genuine
ORACLES = [
    (math.pi / 8, LaurentCoeffs(a1=0.5 + 0.3j, a0=0.2 + 0.1j, am1=0.7, tail=(0.3,))),
    (math.pi / 8, LaurentCoeffs(a1=-0.8, am1=-0.4, tail=(0.2, -0.1))),
    (math.pi / 4, LaurentCoeffs(a1=0.2, am1=0.5, tail=(0.25,))),
    (math.pi / 4, LaurentCoeffs(a1=0.1 + 0.25j, am1=1.0, tail=(-0.3, 0.15))),
    (3 * math.pi / 8, LaurentCoeffs(a1=0.15 - 0.1j, am1=0.6, tail=(0.2,))),
]


def _record(num, ok, detail):
    LINES.append(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {detail}")
    print(LINES[-1])
    assert ok, LINES[-1]


def test_criterion_01_named_solution_residuals(rng):
    worst = {}
    budgets_ok = True

    t0 = time.perf_counter()
    P = builtin("sin-exp")
    spec = EquationSpec("SLE", 2, theta=0.0)
    pts = rng.uniform(-2.5, 2.5, size=(10_000, 2))
    H = np.stack([P.hess(x).m for x in pts])
    worst["sin-exp"] = float(np.abs(residual_many(spec, H)).max())
    budgets_ok &= time.perf_counter() - t0 < 1.0

    t0 = time.perf_counter()
    P = builtin("warren3d")
    spec = EquationSpec("SIGMA2", 3, delta=0.1)
    pts = rng.uniform(-2.0, 2.0, size=(10_000, 3))
    H = np.stack([P.hess(x).m for x in pts])
    worst["warren3d"] = float(np.abs(residual_many(spec, H)).max())
    budgets_ok &= time.perf_counter() - t0 < 1.0

    t0 = time.perf_counter()
    P = builtin("log-radial", {"dim": 3})
    wors = 0.0
    for _ in range(10_000):
        v = rng.normal(size=3)
        x = rng.uniform(1.0, 30.0) * v / np.linalg.norm(v)
        M = np.eye(3) + np.outer(x, x) / (x @ x)
        wors = max(wors, abs(np.sum(M * P.hess(x).m)))
    worst["log-radial"] = wors
    budgets_ok &= time.perf_counter() - t0 < 1.0

    ok = budgets_ok and all(v <= 1e-10 for v in worst.values())
    _record(1, ok, "named residuals " +
            " ".join(f"{k}={v:.2e}" for k, v in worst.items()) + " (tol 1e-10)")


def test_criterion_02_rotation_algebra(rng):
    t0 = time.perf_counter()
    worst_add = 0.0
    worst_conf = 0.0
    for _ in range(1000):
        vt = rng.uniform(0.1, 1.4)
        dim = int(rng.integers(2, 4))
        while True:
            M = random_symmetric(rng, dim, scale=2.0)
            if np.linalg.eigvalsh(M.m).min() > -1.0 / math.tan(vt) + 0.05:
                break
        Mt = rotate_hessian(M, vt)
        worst_add = max(worst_add, abs(phase(Mt) - (phase(M) - dim * vt)))

        t1, t2 = rng.uniform(-1.4, 1.4, size=2)
        if not 0.0 < (t1 + t2) / 2.0 < math.pi / 2:
            t1, t2 = abs(t1), abs(t2)
        Q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
        A = Q @ np.diag([math.tan(t1), math.tan(t2)]) @ Q.T
        c, s = math.cos((t1 + t2) / 2), math.sin((t1 + t2) / 2)
        lhs = (c * np.eye(2) + s * A) @ (c * np.eye(2) + s * A)
        rhs = math.cos((t1 - t2) / 2) ** 2 * (np.eye(2) + A @ A)
        worst_conf = max(worst_conf, np.abs(lhs - rhs).max())
    dt = time.perf_counter() - t0
    ok = worst_add <= 1e-10 and worst_conf <= 1e-10 and dt < 1.0
    _record(2, ok, f"phase additivity {worst_add:.2e}, conformality "
                   f"{worst_conf:.2e} (tol 1e-10), {dt:.2f}s")


def test_criterion_03_transform_round_trips(rng):
    t0 = time.perf_counter()
    worst = 0.0

    vt = 0.5
    P = builtin("quadratic", {"A": [[1.2, 0.4], [0.4, 0.7]], "b": [0.3, -0.2], "c": 1.5})
    back = unrotate_potential(rotate_potential(P, vt), vt)
    for r in (2.0, 5.0, 20.0):
        for _ in range(12):
            v = rng.normal(size=2)
            x = r * v / np.linalg.norm(v)
            worst = max(worst,
                        abs(back.value(x) - P.value(x)),
                        np.abs(back.grad(x) - P.grad(x)).max(),
                        np.abs(back.hess(x).m - P.hess(x).m).max())

    from asymlab import harmonic_potential
    Ph = harmonic_potential(LaurentCoeffs(a1=0.2, am1=0.2, tail=(0.1,)))
    back = rotate_potential(unrotate_potential(Ph, math.pi / 4), math.pi / 4)
    for r in (3.0, 10.0, 30.0):
        for _ in range(12):
            v = rng.normal(size=2)
            x = r * v / np.linalg.norm(v)
            worst = max(worst,
                        abs(back.value(x) - Ph.value(x)),
                        np.abs(back.grad(x) - Ph.grad(x)).max(),
                        np.abs(back.hess(x).m - Ph.hess(x).m).max())

    Pq = builtin("quadratic", {"A": [[2.0, 0.5], [0.5, 1.0]], "b": [0.0, 1.0], "c": 0.3})
    PP = legendre(legendre(Pq))
    for _ in range(30):
        x = rng.uniform(-4, 4, size=2)
        worst = max(worst, abs(PP.value(x) - Pq.value(x)),
                    np.abs(PP.grad(x) - Pq.grad(x)).max())

    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 10.0
    _record(3, ok, f"round-trip max error {worst:.2e} (tol 1e-9), {dt:.2f}s")


def test_criterion_04_sle_oracle_suite():
    t0 = time.perf_counter()
    shells = ShellSpec(tuple(np.geomspace(50, 400, 6)))
    rows = []
    ok = True
    for vt, co in ORACLES:
        P = oracle_sle(co, vt)
        prof_exp = expected_profile(co, vt)
        prof = fit_profile(P, EquationSpec("SLE", 2, theta=2 * vt), shells)
        d_fit_err = abs(prof.d - co.am1)
        d_bd = boundary_d(EquationSpec("SLE", 2, theta=2 * vt), P,
                          BoundaryCurve.circle(max(2.0, 1.2 * P.rho)))
        d_bd_err = abs(d_bd - co.am1)
        res_slope = decay_exponent(
            expansion_residual_samples(P, prof_exp, np.geomspace(50, 400, 6)))
        _, hess_slope = hessian_limit(P, shells)
        rows.append((d_fit_err, d_bd_err, res_slope, hess_slope))
        ok &= (d_fit_err <= 2e-3 and d_bd_err <= 1e-4
               and abs(res_slope + 1.0) <= 0.15 and abs(hess_slope + 2.0) <= 0.15)
    dt = time.perf_counter() - t0
    ok &= dt < 30.0
    worst = [max(r[k] for r in rows) for k in (0, 1)]
    slopes = ([f"{r[2]:.2f}" for r in rows], [f"{r[3]:.2f}" for r in rows])
    _record(4, ok, f"5 oracles: d_fit err {worst[0]:.1e} (tol 2e-3), "
                   f"d_boundary err {worst[1]:.1e} (tol 1e-4), "
                   f"slopes {slopes[0]}/{slopes[1]}, {dt:.1f}s")


def test_criterion_05_ma_radial():
    t0 = time.perf_counter()
    P = builtin("ma-radial", {"c": 1.0})
    prof = fit_profile(P, MA2, ShellSpec((50.0, 100.0, 200.0)))
    d_bd = boundary_d(MA2, P, BoundaryCurve.circle(3.0))
    flux_errs = [abs(flux_identity(MA2, SymMat.identity(2), 0.5, R) - math.pi)
                 for R in (1.0, 6.0)]
    dt = time.perf_counter() - t0
    ok = (abs(prof.d - 0.5) <= 1e-3 and abs(d_bd - 0.5) <= 1e-6
          and max(flux_errs) <= 1e-6 and dt < 10.0)
    _record(5, ok, f"ma-radial d_fit err {abs(prof.d - 0.5):.1e} (tol 1e-3), "
                   f"d_boundary err {abs(d_bd - 0.5):.1e} (tol 1e-6), "
                   f"flux err {max(flux_errs):.1e} (tol 1e-6), {dt:.1f}s")


def test_criterion_06_ihh_oracle():
    t0 = time.perf_counter()
    co = LaurentCoeffs(am1=0.4)
    P = builtin("ihh-oracle", {"am1": 0.4})
    d_exp = ihh_expected_d(co)
    prof = fit_profile(P, IHH2, ShellSpec(tuple(np.geomspace(50, 400, 5))))
    d_bd = boundary_d(IHH2, P, BoundaryCurve.circle(max(2.0, 1.2 * P.rho)))
    # log kernel is (D^2 Q)^2 with D^2 Q = 2I here
    kernel_err = np.abs(prof.L.m - prof.A.m @ prof.A.m).max()
    dt = time.perf_counter() - t0
    ok = (abs(prof.d - d_exp) <= 2e-3 and abs(d_bd - d_exp) <= 2e-3
          and abs(prof.d - d_bd) <= 2e-3 and kernel_err <= 1e-10 and dt < 30.0)
    _record(6, ok, f"ihh-oracle d_fit err {abs(prof.d - d_exp):.1e}, "
                   f"d_boundary err {abs(d_bd - d_exp):.1e} (tol 2e-3), "
                   f"kernel (D2Q)^2, {dt:.1f}s")


def test_criterion_07_legendre_lewy_pinching(rng):
    t0 = time.perf_counter()
    K = sigma2_margin(3)
    spec = EquationSpec("SIGMA2", 3, delta=K / 2)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    quad = builtin("quadratic", {"A": (Q @ np.diag([2.0, 0.8, -0.1]) @ Q.T).tolist(),
                                 "b": [0.2, 0.0, -0.1], "c": 0.0})
    ok = True
    worst = (-math.inf, math.inf)
    for P in (perturbed_quadratic(), quad):
        Pt = legendre_lewy(P, spec)
        for _ in range(1000):
            y = rng.uniform(-3.0, 3.0, size=3)
            ev = np.linalg.eigvalsh(Pt.hess(y).m)
            worst = (max(worst[0], ev.max()), min(worst[1], ev.min()))
            ok &= ev.max() < 0.0 and ev.min() > -1.0 / spec.delta
    dt = time.perf_counter() - t0
    ok &= dt < 5.0
    _record(7, ok, f"output Hessian spectrum in ({worst[1]:.3f}, {worst[0]:.3f}) "
                   f"strictly inside (-{1/spec.delta:.3f}, 0), {dt:.1f}s")


def test_criterion_08_solver_convergence():
    t0 = time.perf_counter()
    grids = [AnnulusGrid(1.0, 8.0, 33, 64, "uniform"),
             AnnulusGrid(1.0, 8.0, 65, 128, "uniform"),
             AnnulusGrid(1.0, 8.0, 129, 256, "uniform")]
    ok = True
    finest = {}
    ratios = {}
    for name, spec, P in (
            ("MA", MA2, builtin("ma-radial", {"c": 1.0})),
            ("SLE", SLE2, oracle_sle(LaurentCoeffs(a1=0.1, am1=0.5), math.pi / 4))):
        rows = convergence_study(spec, P, grids)
        ratios[name] = [r["ratio"] for r in rows[1:]]
        finest[name] = rows[-1]["maxError"]
        ok &= all(3.0 <= q <= 5.0 for q in ratios[name])
        ok &= finest[name] <= 5e-4
    dt = time.perf_counter() - t0
    ok &= dt < 120.0
    _record(8, ok, "h-halving ratios " +
            " ".join(f"{k}={['%.2f' % q for q in v]}" for k, v in ratios.items()) +
            f" (in [3,5]), finest max err MA={finest['MA']:.1e} "
            f"SLE={finest['SLE']:.1e} (tol 5e-4), {dt:.1f}s")


def test_criterion_09_negative_control():
    t0 = time.perf_counter()
    P = builtin("sin-exp")
    raised = False
    try:
        fit_profile(P, EquationSpec("SLE", 2, theta=0.0), ShellSpec((4.0, 8.0, 16.0)))
    except NoDecay:
        raised = True
    dt = time.perf_counter() - t0
    ok = raised and dt < 5.0
    _record(9, ok, f"sin-exp raises NoDecay in the fitting pipeline, {dt:.1f}s")


def test_criterion_10_uniqueness_disjoint_shells():
    t0 = time.perf_counter()
    fam1 = ShellSpec(tuple(np.geomspace(50, 200, 5)))
    fam2 = ShellSpec(tuple(np.geomspace(100, 400, 5)))
    ok = True
    worst = 0.0
    for vt, co in ORACLES:
        spec = EquationSpec("SLE", 2, theta=2 * vt)
        P = oracle_sle(co, vt)
        p1 = fit_profile(P, spec, fam1)
        p2 = fit_profile(P, spec, fam2)
        gap = max(np.abs(p1.A.m - p2.A.m).max(), np.abs(p1.b - p2.b).max(),
                  abs(p1.c - p2.c), abs(p1.d - p2.d))
        worst = max(worst, gap)
        ok &= gap <= 5e-3
    dt = time.perf_counter() - t0
    _record(10, ok, f"disjoint-shell profile gap {worst:.1e} (tol 5e-3) "
                    f"across 5 oracles, {dt:.1f}s")
