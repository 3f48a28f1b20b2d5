"""The nine acceptance criteria at their stated tolerances, one report line each."""
import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from wavetrain import checker, fitter, oscillator as osc, packet as pk, scenarios as sc, stepper as sp
from wavetrain.fitter import FitConstraints
from wavetrain.oscillator import OscillatorParams
from wavetrain.packet import TrainSpec
from wavetrain.units import LI7_MASS_AMU, convert_units

from conftest import FIG1, FIG2, FIG3, HALF_PI, random_params


@pytest.fixture
def report(capsys):
    def emit(k, title, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {k} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def test_1_exactness(report):
    start = time.perf_counter()
    lines, ok = [], True
    for name in ("fig1", "fig2", "fig3"):
        s = sc.preset(name)
        p, ts = s.params, s.train
        fine = checker.pde_residual(p, ts, s.times, points=4096).residual_l2
        coarse = checker.pde_residual(p, ts, s.times, points=2048).residual_l2
        order = math.log2(coarse / fine)
        ok &= fine < 1e-6 and 3.5 < order < 4.5
        lines.append(f"{name} {fine:.2e} order {order:.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10.0
    report(1, "exactness", ok, "; ".join(lines) + f"; {elapsed:.1f}s")


def test_2_orthonormality(report, rng):
    worst = 0.0
    for p, ts in (FIG1, FIG2, FIG3):
        for t in rng.uniform(0.0, 2.0 * math.pi, 3):
            g = checker.gram_matrix(p, 8, t, ts.b0, ts.omega_r)
            worst = max(worst, float(np.max(np.abs(g - np.eye(9)))))
    report(2, "orthonormality", worst < 1e-9, f"max |G - I| = {worst:.2e}")


def test_3_energy(report, rng):
    cases = [("fig1", *FIG1, 63.0), ("fig2", *FIG2, 565.0525)]
    cases += [(f"random{i}", random_params(rng), TrainSpec(int(rng.integers(0, 9)), rng.uniform(-3, 3), 40.0), None)
              for i in range(3)]
    ok, lines = True, []
    for name, p, ts, expected in cases:
        closed = pk.energy_level(p, ts)
        if expected is not None:
            ok &= abs(closed - expected) < 1e-4 * expected
        vals = np.array([checker.energy_expectation(p, ts, t) for t in np.linspace(0.0, 2.0 * math.pi, 5)])
        rel = float(np.max(np.abs(vals - closed)) / closed)
        drift = float((vals.max() - vals.min()) / closed)
        ok &= rel < 1e-6 and drift < 1e-8
        spacing = pk.energy_level(p, ts.with_n(ts.n + 1)) - closed
        cs = osc.conserved(p)
        ok &= math.isclose(spacing, cs.c1 / cs.c0, rel_tol=1e-12)
        lines.append(f"{name} E={closed:.4f} rel {rel:.1e} drift {drift:.1e}")
    report(3, "energy", ok, "; ".join(lines))


def _fig1_run(dt):
    p, ts = FIG1
    cfg = sp.auto_config(p, ts, math.pi, dt=dt, min_points=4096)
    return cfg, sp.deviation_curve(p, ts, cfg)


def test_4_oracle_propagation(report):
    cfg, fine = _fig1_run(1e-4)
    _, coarse = _fig1_run(2e-4)
    err, drift = float(fine.deviation[-1]), float(np.max(fine.norm_drift))
    ratio = float(coarse.deviation[-1]) / err
    ok = cfg.points == 4096 and err < 1e-6 and drift < 1e-12 and 3.0 <= ratio <= 5.0
    report(4, "oracle propagation", ok,
           f"L2 error {err:.2e}, norm drift {drift:.1e}, dt ratio {ratio:.2f}, {cfg.points} points")


def _measurements(name, tmp_path):
    manifest = sc.run_scenario(replace(sc.preset(name), outputs=("vertical_view",)), tmp_path / name)
    with open(manifest["metadata"]) as fh:
        meta = json.load(fh)
    data = np.loadtxt(manifest["vertical_view"], delimiter=",", skiprows=1)
    return meta["measurements"], data


def test_5_figures(report, tmp_path):
    m1, data = _measurements("fig1", tmp_path)
    peaks1 = []
    for t in sorted(set(data[:, 0])):
        block = data[data[:, 0] == t]
        peaks1.append(sc.count_peaks(block[:, 2]))
    ok = peaks1 == [11, 11, 11]
    ok &= all(abs(m["center"] - c) <= 0.01 for m, c in zip(m1, (-5.0, 0.0, 5.0)))
    m2, _ = _measurements("fig2", tmp_path)
    ratio = m2[2]["peak_density"] / m2[0]["peak_density"]
    ok &= abs(ratio / 0.01 - 1.0) <= 0.01
    p3, ts3 = FIG3
    wmin, wmax = (r / math.sqrt(p3.c0) for r in osc.rho_extrema(p3))
    amp = abs(ts3.b0 * p3.A / p3.c0)
    ok &= abs(wmin - 0.68) <= 1e-3 and abs(wmax - 1.4706) <= 1e-3 and abs(amp - 17.437) <= 1e-3
    m5, _ = _measurements("fig5", tmp_path)
    peaks5 = [m["peak_count"] for m in m5]
    ok &= peaks5 == [7, 7, 7]
    report(5, "figure reproduction", ok,
           f"fig1 peaks {peaks1} centers {[round(m['center'], 4) for m in m1]}; fig2 ratio {ratio:.6f}; "
           f"fig3 widths {wmin:.5f}/{wmax:.5f} amplitude {amp:.4f}; fig5 peaks {peaks5}")


def test_6_conserved(report, rng):
    worst = {"c0_err": 0.0, "c1_err": 0.0, "c2_err": 0.0}
    params = [FIG1[0], FIG2[0], FIG3[0]] + [random_params(rng) for _ in range(3)]
    for seed, p in enumerate(params):
        inv = checker.oscillator_invariants(p, n_samples=100, seed=seed)
        for k in worst:
            worst[k] = max(worst[k], inv[k])
        cs = osc.conserved(p)
        c2_closed = p.A ** 2 * cs.c1 / ((p.A ** 2 + p.B ** 2) * cs.c0)
        t20 = rng.uniform(0.0, 4.0 * math.pi, 20)
        worst["c2_err"] = max(worst["c2_err"], float(np.max(np.abs(osc.c2_expression(t20, p) - c2_closed)) / c2_closed))
    ok = all(v < 1e-9 for v in worst.values())
    report(6, "conserved quantities", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_7_fit(report):
    c = FitConstraints(17.437, 0.68, 1.4706)
    closed = fitter.fit_closed_form(c)
    ok = abs(closed.params.A - 0.4624) < 1e-6 and abs(closed.b0 + 17.437) < 1e-6
    truth = OscillatorParams(0.4624, 1.0, 0.0, -HALF_PI)
    exact = fitter.constraints_from_params(truth, -17.437)
    worst = 0.0
    # bounded 1% relative perturbation of every observable
    for seed in range(20):
        noise = 1.0 + np.random.default_rng(seed).uniform(-0.01, 0.01, size=3)
        obs = np.array([exact.amplitude, exact.width_min, exact.width_max]) * noise
        fit = fitter.fit_least_squares(FitConstraints(*obs))
        worst = max(worst, abs(fit.params.A / 0.4624 - 1.0))
    ok &= worst < 0.03
    report(7, "fit round-trip", ok,
           f"A {closed.params.A:.7f}, b0 {closed.b0:.4f}, noisy worst A error {100 * worst:.2f}%")


def test_8_units(report):
    u = convert_units(20.0, LI7_MASS_AMU)
    ok = abs(u.lx_microns / 21.22 - 1.0) < 5e-3 and abs(u.period_ms / 310.0 - 1.0) < 0.02
    report(8, "units", ok, f"l_x {u.lx_microns:.3f} um, T {u.period_ms:.2f} ms")


def test_9_gauge(report):
    worst = 0.0
    for p, ts in (FIG1, FIG2, FIG3):
        x = np.linspace(*pk.train_window(0.3, p, ts), 513)
        for t in (0.0, 0.3, 1.7, 4.0):
            ref = pk.psi_axial(x, t, p, ts)
            for s in (0.5, 2.0, 10.0):
                q = OscillatorParams(s * p.A, s * p.B, p.alpha, p.beta)
                got = pk.psi_axial(x, t, q, replace(ts, b0=s * ts.b0))
                worst = max(worst, float(np.max(np.abs(got - ref))))
    report(9, "gauge", worst <= 1e-12, f"max |delta psi| = {worst:.1e}")
