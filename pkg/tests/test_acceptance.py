"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is
printed in the terminal summary."""

import math
from fractions import Fraction

import numpy as np
import pytest

from rankeb import (Instance, argmin_frames, check_bounds, dist_estimate, fit_loglog,
                    generate_planted, grad_g_V, grad_g_X, lift_g, probe_regularity,
                    probe_stability, r_value, residual_f, slope_mf, sweep_local, tau)
from rankeb.cli import main

from conftest import random_stiefel, record
from test_variational import fd_gradient


def random_instance(g, max_dim=12):
    m, n = (int(v) for v in g.integers(1, max_dim + 1, size=2))
    r = int(g.integers(0, min(m, n) + 1))
    kind = ("dense", "mask")[int(g.integers(2))]
    size = int(g.integers(0, m * n + 1)) if kind == "dense" else float(g.uniform(0.2, 1.0))
    try:
        inst, _ = generate_planted(m, n, r, kind, size, seed=int(g.integers(2**63)))
    except ValueError:  # empty mask
        inst, _ = generate_planted(m, n, r, "dense", 1, seed=int(g.integers(2**63)))
    return inst


def test_1_stiefel_minimum():
    g = np.random.default_rng(1)
    worst_below, worst_eq = 0.0, 0.0
    for _ in range(200):
        inst = random_instance(g)
        X = g.standard_normal(inst.shape)
        f = residual_f(inst, X).f_value
        V = argmin_frames(inst, X).base_frame
        worst_eq = max(worst_eq, abs(lift_g(inst, X, V) - f) / (1 + f))
        k = inst.n - inst.r
        for _ in range(500):
            U = random_stiefel(g, inst.n, k) if k else np.zeros((inst.n, 0))
            worst_below = max(worst_below, (f - lift_g(inst, X, U)) / (1 + f))
    ok = worst_below <= 1e-9 and worst_eq <= 1e-10
    record(1, "Stiefel-minimum equivalence", ok,
           f"max (f-g)/(1+f)={worst_below:.2e}, max |g-f|/(1+f) at base={worst_eq:.2e}")
    assert ok


def test_2_gradients_finite_differences():
    g = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        inst = random_instance(g, max_dim=6)
        X = g.standard_normal(inst.shape)
        V = g.standard_normal((inst.n, inst.n - inst.r))
        h = 1e-5 * (1 + np.linalg.norm(X))
        Gx = grad_g_X(inst, X, V)
        Fx = fd_gradient(lambda Z: lift_g(inst, Z, V), X, h)
        worst = max(worst, np.linalg.norm(Gx - Fx) / max(np.linalg.norm(Gx), 1e-300))
        if V.size:
            Gv = grad_g_V(inst, X, V)
            Fv = fd_gradient(lambda W: lift_g(inst, X, W), V, h)
            worst = max(worst, np.linalg.norm(Gv - Fv) / max(np.linalg.norm(Gv), 1e-300))
    record(2, "Gradient correctness vs central differences", worst <= 1e-6,
           f"max rel err={worst:.2e}")
    assert worst <= 1e-6


def test_3_grad_v_bound():
    g = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        inst = random_instance(g)
        X = g.standard_normal(inst.shape)
        V = argmin_frames(inst, X).base_frame
        f = residual_f(inst, X).f_value
        lhs = np.linalg.norm(grad_g_V(inst, X, V))
        worst = max(worst, lhs / (2 * f) if f > 0 else lhs)
    diag = Instance.dense(2, 2, 1, np.zeros((0, 4)), [])
    X = np.diag([3.0, 4.0])
    e1 = np.array([[1.0], [0.0]])
    tight = np.linalg.norm(grad_g_V(diag, X, e1))
    ok = worst <= 1 + 1e-10 and abs(tight - 18.0) <= 1e-12 and abs(2 * residual_f(diag, X).f_value - 18.0) <= 1e-12
    record(3, "||grad_V g|| <= 2 f on E(X); tight at diag(3,4)", ok,
           f"max ratio={worst:.12f}, witness {tight} = 18")
    assert ok


def test_4_closed_form_slope():
    g = np.random.default_rng(4)
    worst, count = 0.0, 0
    while count < 200:
        m, n = (int(v) for v in g.integers(1, 13, size=2))
        r = int(g.integers(0, min(m, n) + 1))
        inst = Instance.dense(m, n, r, np.zeros((0, m * n)), [])
        X = g.standard_normal((m, n))
        rep = slope_mf(inst, X)
        if rep.degenerate:
            continue
        count += 1
        f = residual_f(inst, X).f_value
        target = 2 * math.sqrt(f)
        err = abs(rep.slope_lb - target) / target if target > 0 else rep.slope_lb
        worst = max(worst, err)
    record(4, "Closed-form slope 2 sqrt(f) without affine term", worst <= 1e-8,
           f"max rel err={worst:.2e}")
    assert worst <= 1e-8


def test_5_distance_exactness():
    g = np.random.default_rng(5)
    worst_ey, worst_mask = 0.0, 0.0
    diag = Instance.dense(2, 2, 1, np.zeros((0, 4)), [])
    worst_ey = abs(dist_estimate(diag, np.diag([3.0, 4.0])).dist_estimate - 3.0)
    for _ in range(20):
        m, n = (int(v) for v in g.integers(1, 13, size=2))
        r = int(g.integers(0, min(m, n) + 1))
        inst = Instance.dense(m, n, r, np.zeros((0, m * n)), [])
        X = g.standard_normal((m, n))
        exact = math.sqrt(residual_f(inst, X).tail_sq_sum)
        worst_ey = max(worst_ey, abs(dist_estimate(inst, X).dist_estimate - exact))
    for seed in range(10):
        m, n = (int(v) for v in g.integers(1, 9, size=2))
        r = int(g.integers(0, min(m, n) + 1))
        inst, wit = generate_planted(m, n, r, "mask", 1.0, seed=seed)
        X = wit.X_star + g.standard_normal((m, n))
        rep = dist_estimate(inst, X, restarts=4, seed=seed)
        worst_mask = max(worst_mask, abs(rep.dist_estimate - np.linalg.norm(X - wit.X_star)))
    ok = worst_ey <= 1e-8 and worst_mask <= 1e-8
    record(5, "Distance exactness (Eckart-Young; full mask)", ok,
           f"max err l=0: {worst_ey:.2e}, full mask: {worst_mask:.2e}")
    assert ok


def test_6_planted_feasibility():
    g = np.random.default_rng(6)
    worst_f, worst_d = 0.0, 0.0
    for k in range(50):
        m, n = (int(v) for v in g.integers(2, 9, size=2))
        r = int(g.integers(1, min(m, n) + 1))
        if k % 2:
            inst, wit = generate_planted(m, n, r, "mask", 0.7, seed=k)
        else:
            inst, wit = generate_planted(m, n, r, "dense", int(g.integers(1, m * n)), seed=k)
        X = wit.X_star
        f = residual_f(inst, X).f_value
        worst_f = max(worst_f, f / (1e-20 * (1 + np.linalg.norm(X) ** 2) ** 2))
        worst_d = max(worst_d, dist_estimate(inst, X, restarts=3, seed=k).dist_estimate)
    ok = worst_f <= 1 and worst_d <= 1e-8
    record(6, "Planted witnesses are feasible", ok,
           f"max f/bound={worst_f:.2e}, max dist={worst_d:.2e}")
    assert ok


def test_7_exponent_arithmetic():
    R = r_value(6, 4)
    t = tau(2, 2, 1)
    t10 = tau(10, 10, 2)
    ok = (R.exact == 236196 and t.exact == Fraction(1, 236196)
          and abs(t.linear * 236196 - 1) <= 1e-12 and abs(t10.log10 + 171.4115) <= 1e-3)
    record(7, "Exponent arithmetic", ok,
           f"R(6,4)={R.exact}, tau(2,2,1)={t.linear:.6e}, log10 tau(10,10,2)={t10.log10:.4f}")
    assert ok


@pytest.mark.slow
def test_8_sweep_exponents():
    t = tau(6, 6, 2)
    slopes, r2s, reports = [], [], []
    for seed in range(5):
        inst, wit = generate_planted(6, 6, 2, "dense", 10, seed=seed)
        tab = sweep_local(inst, wit, t_min=1e-6, t_max=1e-1, points=30, seed=seed)
        fit = fit_loglog(tab, "f", "dist", tau=t)
        slopes.append(fit.slope)
        r2s.append(fit.r_squared)
        reports.append(check_bounds(tab, t, fit_margin=0.05))
    med = float(np.median(slopes))
    ok_fit = 0.4 <= med <= 0.6 and min(r2s) >= 0.99
    ok_a = all(rep.verdicts["eb_slope"] for rep in reports)
    ok_b = all(rep.verdicts["kl_slope"] for rep in reports)
    ok_c = all(rep.c_eb > 0 and rep.c_kl > 0 for rep in reports)
    ok = ok_fit and ok_a and ok_b and ok_c
    record(8, "Sweep exponents (6x6, r=2, l=10, 5 seeds)", ok,
           f"median slope={med:.4f}, min r2={min(r2s):.6f}, log10 tau={t.log10:.1f}, "
           f"c*_EB>={min(r.c_eb for r in reports):.3g}, c*_KL>={min(r.c_kl for r in reports):.3g}")
    assert ok


def test_9_stability_probe():
    inst = Instance.dense(6, 6, 3, np.zeros((0, 36)), [])
    X_bar = np.diag([3.0, 4.0, 1.0, 2.0, 5.0, 6.0])
    rep = probe_stability(inst, X_bar, scales=np.logspace(-7, -1, 13), samples=4, seed=9)
    ok = rep.monotone and rep.h.min() < 1e-5 and rep.alpha >= 0.9 and not rep.degenerate
    record(9, "Stability probe on diag(3,4,...)", ok,
           f"alpha={rep.alpha:.4f}, h(min scale)={rep.h.min():.2e}")
    assert ok


def test_10_regularity_probe():
    free = Instance.dense(5, 5, 2, np.zeros((0, 25)), [])
    a = probe_regularity(free, [10, 100, 1000], samples_per_radius=16, seed=10)
    full, _ = generate_planted(5, 4, 2, "mask", 1.0, seed=10)
    b = probe_regularity(full, [10, 100, 1000], samples_per_radius=16, seed=10)
    ok = a.falsified_at is not None and b.verdict == "not falsified"
    record(10, "Regularity probe", ok,
           f"l=0: {a.verdict} (min slope {min(a.min_slope):.1e}); full mask: {b.verdict} "
           f"(min slope {min(b.min_slope):.3g})")
    assert ok


def test_11_sweep_determinism(tmp_path):
    inst_path, wit_path = tmp_path / "inst.json", tmp_path / "wit.json"
    main(["gen", "--m", "5", "--n", "5", "--r", "2", "--l", "8", "--seed", "11",
          "--out", str(inst_path), "--witness-out", str(wit_path)])
    outs = []
    for jobs in ("1", "1", "3"):
        out = tmp_path / f"sweep{len(outs)}.csv"
        main(["sweep", "-i", str(inst_path), "-w", str(wit_path), "--points", "10",
              "--restarts", "6", "--seed", "4", "--jobs", jobs, "--out", str(out)])
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    record(11, "Sweep CSV byte-identical (serial twice, parallel)", ok, f"{len(outs[0])} bytes")
    assert ok
