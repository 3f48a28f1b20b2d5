import math

import numpy as np
import pytest

from wavetrain import oscillator as osc
from wavetrain import packet as pk
from wavetrain.packet import ComplexField, TrainSpec

from conftest import COHERENT, FIG1, FIG2, FIG3, HALF_PI, random_params


def _dense_norm(p, ts, t, points=8001):
    lo, hi = pk.train_window(t, p, ts)
    x = np.linspace(lo, hi, points)
    return np.sum(np.abs(pk.psi_axial(x, t, p, ts)) ** 2) * (x[1] - x[0])


def test_trainspec_validation():
    with pytest.raises(ValueError):
        TrainSpec(-1)
    with pytest.raises(ValueError):
        TrainSpec(65)
    with pytest.raises(ValueError):
        TrainSpec(2, omega_r=0.0)
    assert TrainSpec(3, 1.0, 9.0).with_n(5) == TrainSpec(5, 1.0, 9.0)


def test_xi_zero_at_center(rng):
    p, ts = FIG3
    t = rng.uniform(0, 10, 20)
    np.testing.assert_allclose(pk.xi(osc.center_orbit(t, p, ts.b0), t, p, ts), 0.0, atol=1e-12)
    assert pk.xi(-5.0, 0.0, *FIG1) == pytest.approx(0.0, abs=1e-15)


def test_xi_collapse_set():
    p, ts = FIG2
    # sqrt(c0) = 0.1, rho(0) = 0.01
    assert pk.xi(0.01, 0.0, p, ts) == pytest.approx(math.sqrt(p.c0) * 0.01 / osc.rho(0.0, p), rel=1e-14)
    assert pk.xi(0.01, 0.0, p, ts) == pytest.approx(0.1, rel=1e-12)


def test_coefficients_examples():
    p, ts = FIG1
    assert pk.coefficients(0.0, p, ts).f == pytest.approx(-5.0, rel=1e-14)
    for t in np.linspace(0, 6, 13):
        assert abs(pk.coefficients(t, p, ts).b) == pytest.approx(5.0, rel=1e-14)


def test_coefficient_identities(rng):
    for p in (FIG2[0], FIG3[0], random_params(rng)):
        for t in rng.uniform(0, 6, 5):
            c = pk.coefficients(t, p, TrainSpec(3, 1.2))
            assert c.e ** 2 == pytest.approx(osc.theta_dot(t, p), rel=1e-10)
            assert c.c.real == pytest.approx(0.5 * osc.theta_dot(t, p), rel=1e-10)
            assert c.c.imag == pytest.approx(-osc.rho_dot(t, p) / (2 * osc.rho(t, p)), rel=1e-10, abs=1e-14)


def test_coefficient_odes(rng):
    h = 1e-4
    for p in (FIG3[0], random_params(rng), random_params(rng)):
        ts = TrainSpec(4, -2.5, 40.0)
        for t in rng.uniform(0, 6, 4):
            st = [pk.coefficients(t + k * h, p, ts) for k in (-2, -1, 1, 2)]
            c = pk.coefficients(t, p, ts)

            def d(attr):
                v = [getattr(s, attr) for s in st]
                return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)

            fdot = d("f")
            assert abs(1j * d("c") - (2 * c.c ** 2 - 0.5)) < 1e-6
            assert abs(1j * d("b") - 2 * c.b * c.c) < 1e-6
            assert abs(1j * d("e") - (2 * c.c * c.e - c.e ** 3)) < 1e-6
            assert abs(1j * fdot - (c.b * c.e - c.e ** 2 * c.f)) < 1e-6
            rhs = 1j * c.f * fdot - c.b ** 2 / 2 + c.c + ts.omega_r + ts.n * c.e ** 2
            assert abs(1j * d("a_n") / c.a_n - rhs) < 1e-6


def test_coefficients_reassemble_psi(rng):
    p, ts = random_params(rng), TrainSpec(5, 0.8)
    t = 0.7
    c = pk.coefficients(t, p, ts)
    x = np.linspace(-4, 4, 21)
    from wavetrain.special_fn import hermite_phys
    # a_n H_n(e x - f) exp(b x - c x^2 - f^2/2)
    rebuilt = c.a_n * hermite_phys(ts.n, c.e * x - c.f) * np.exp(c.b * x - c.c * x * x - c.f ** 2 / 2)
    np.testing.assert_allclose(rebuilt, pk.psi_axial(x, t, p, ts), rtol=1e-10, atol=1e-14)


def test_parity_about_center():
    p, ts = FIG1
    t = 0.9
    d = np.linspace(0, 3, 31)
    xc = osc.center_orbit(t, p, ts.b0)
    np.testing.assert_allclose(np.abs(pk.psi_axial(xc + d, t, p, ts)), np.abs(pk.psi_axial(xc - d, t, p, ts)),
                               rtol=1e-10, atol=1e-15)


def test_collapse_norm_and_peak_ratio():
    p, ts = FIG2
    for t in (0.0, math.pi / 4, HALF_PI):
        assert _dense_norm(p, ts, t) == pytest.approx(1.0, abs=1e-9)
    peaks = []
    for t in (0.0, HALF_PI):
        lo, hi = pk.train_window(t, p, ts)
        x = np.linspace(lo, hi, 200001)
        peaks.append(np.max(np.abs(pk.psi_axial(x, t, p, ts)) ** 2))
    assert peaks[1] / peaks[0] == pytest.approx(0.01, rel=1e-4)


def test_normalization_random_sets(rng):
    for n in (0, 1, 5, 10):
        p = random_params(rng)
        ts = TrainSpec(n, rng.uniform(-3, 3))
        for t in rng.uniform(0, 10, 10):
            assert _dense_norm(p, ts, t) == pytest.approx(1.0, abs=1e-9)


def test_psi_full_transverse_factor_and_norm():
    p, ts = FIG1
    lr = pk.transverse_length(ts)
    x = np.linspace(-15, 15, 6001)
    full = pk.psi_full(x, 0.0, 0.0, 0.4, p, ts)
    np.testing.assert_allclose(np.abs(full) ** 2, np.abs(pk.psi_axial(x, 0.4, p, ts)) ** 2 / (math.pi * lr ** 2),
                               rtol=1e-13)
    y = np.linspace(-8 * lr, 8 * lr, 801)
    # separable: x-integral times the transverse double integral on a grid
    ax = np.sum(np.abs(pk.psi_axial(x, 0.4, p, ts)) ** 2) * (x[1] - x[0])
    tr = np.abs(pk.psi_full(0.0, y[:, None], y[None, :], 0.4, p, ts) / pk.psi_axial(0.0, 0.4, p, ts)) ** 2
    assert ax * np.sum(tr) * (y[1] - y[0]) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_psi_full_rejects_inconsistent_ratio():
    p, ts = FIG1
    assert pk.psi_full(0.1, 0.0, 0.0, 0.0, p, ts, lr_ratio=math.sqrt(40.0)) == pk.psi_full(0.1, 0, 0, 0.0, p, ts)
    with pytest.raises(ValueError, match="inconsistent"):
        pk.psi_full(0.1, 0.0, 0.0, 0.0, p, ts, lr_ratio=6.0)


def test_eleven_maxima_at_start():
    from scipy.signal import find_peaks
    p, ts = FIG1
    x = np.linspace(-15, 15, 8001)
    dens = np.abs(pk.psi_full(x, 0.0, 0.0, 0.0, p, ts)) ** 2
    assert len(find_peaks(dens)[0]) == 11


def test_energy_levels():
    assert pk.energy_level(*FIG1) == pytest.approx(63.0, rel=1e-15)
    assert pk.energy_level(*FIG2) == pytest.approx(565.0525, rel=1e-14)
    p = FIG3[0]
    cs = osc.conserved(p)
    assert pk.energy_level(p, TrainSpec(4, 0.0, 40.0)) == pytest.approx(4.5 * cs.c1 / cs.c0 + 40.0, rel=1e-15)
    e = [pk.energy_level(p, TrainSpec(n, -17.437)) for n in range(12)]
    np.testing.assert_allclose(np.diff(e), cs.c1 / cs.c0, rtol=1e-12)


@pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
def test_gauge_invariance_of_samples(s):
    p, ts = FIG3
    x = np.linspace(-30, 30, 401)
    for t in (0.0, 0.8, 2.9):
        a = pk.psi_axial(x, t, p, ts)
        b = pk.psi_axial(x, t, p.scaled(s), TrainSpec(ts.n, s * ts.b0, ts.omega_r))
        assert np.max(np.abs(a - b)) <= 1e-12


def test_density_periodicity(rng):
    p = random_params(rng)
    x = np.linspace(-8, 8, 161)
    ts = TrainSpec(3, 1.5)
    for t in (0.3, 1.9):
        np.testing.assert_allclose(np.abs(pk.psi_axial(x, t + 2 * math.pi, p, ts)) ** 2,
                                   np.abs(pk.psi_axial(x, t, p, ts)) ** 2, atol=1e-10)
        ts0 = TrainSpec(3, 0.0)
        np.testing.assert_allclose(np.abs(pk.psi_axial(x, t + math.pi, p, ts0)) ** 2,
                                   np.abs(pk.psi_axial(x, t, p, ts0)) ** 2, atol=1e-10)


def test_coherent_state_is_rigid_gaussian():
    p, ts = COHERENT
    x = np.linspace(-10, 10, 401)
    for t in np.linspace(0, 2 * math.pi, 7):
        xc = osc.center_orbit(t, p, ts.b0)
        expected = np.exp(-(x - xc) ** 2) / math.sqrt(math.pi)
        np.testing.assert_allclose(np.abs(pk.psi_axial(x, t, p, ts)) ** 2, expected, atol=1e-14)


def test_window_edges_decay():
    for n in (0, 3, 10, 30, 64):
        for p, b0 in ((FIG1[0], -5.0), (FIG2[0], 0.0), (FIG3[0], -17.437)):
            ts = TrainSpec(n, b0)
            for t in (0.0, 0.7, HALF_PI):
                lo, hi = pk.train_window(t, p, ts)
                assert abs(pk.psi_axial(lo, t, p, ts)) < 1e-12
                assert abs(pk.psi_axial(hi, t, p, ts)) < 1e-12


def test_complex_field_and_sampling():
    with pytest.raises(ValueError):
        ComplexField({"x": np.zeros(3)}, np.zeros(4, complex))
    f = pk.sample_axial(np.linspace(-1, 1, 5), [0.0, 0.5], *FIG1)
    assert f.samples.shape == (2, 5)
    assert f.density.dtype == np.float64
    assert isinstance(pk.psi_axial(0.3, 0.2, *FIG1), complex)
