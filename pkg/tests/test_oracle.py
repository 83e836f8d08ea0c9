import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mimnoise import noise, oracle, validation
from mimnoise.errors import ExceptionalPointError, InsufficientRecordError, TimestepTooLargeError, UndrivenModeError
from mimnoise.params import DriveConfig, GenericDissipation, SystemParams, derive
from mimnoise.steady_state import solve_steady_state

from strategies import drives, system_params

P = SystemParams(J=3.0, kappa_L=1.0, kappa_R=0.3)
D = DriveConfig(0.4, 1.0, 0.3)
KB = derive(P).kappa_bar
DT = 0.01 / oracle.max_rate(P, D)


@given(system_params(), drives(), st.floats(-10, 10))
def test_freq_solve_matches_exact(p, d, w):
    try:
        ex = noise.amplitudes_exact(np.array([w]), p, d)
    except (UndrivenModeError, ExceptionalPointError):
        assume(False)
    orc = oracle.freq_solve(np.array([w]), p, d)
    # exact zeros come out as rounding noise on the amplitude scale G sqrt(kappa)
    floor = 1e-12 * solve_steady_state(p, d).G * math.sqrt(p.kappa_L + p.kappa_R)
    scale = math.sqrt(orc.sff[0])
    assert abs(orc.a_L[0] - ex.a_L[0]) <= 1e-9 * scale + floor
    assert abs(orc.a_R[0] - ex.a_R[0]) <= 1e-9 * scale + floor


def test_ring_subset_passes():
    chk = validation.check_oracle_ring(n_draws=50, seed=3)
    assert chk.passed, chk.detail


def test_ring_detects_sign_fault(monkeypatch):
    original = noise.amplitudes_exact

    def faulty(omega, p, d, eps="exact"):
        # flip the sign of the detuning inside the closed form only
        return original(omega, p, replace(d, delta=-d.delta), eps)

    monkeypatch.setattr(noise, "amplitudes_exact", faulty)
    chk = validation.check_oracle_ring(n_draws=20, seed=3)
    assert not chk.passed


def test_one_port_has_no_right_amplitude():
    p = SystemParams(J=2.0, kappa_L=1.0, kappa_R=0.0)
    amps = oracle.freq_solve(np.linspace(-3, 3, 11), p, DriveConfig(0.2))
    assert np.all(amps.a_R == 0)


def test_symmetric_cavity_drift_is_diagonal():
    p = SystemParams(J=2.0, kappa_L=0.7, kappa_R=0.7)
    m = oracle.LinearSystem.two_port(p, DriveConfig(0.0)).drift
    assert m[0, 1] == 0 and m[1, 0] == 0


@given(system_params(), drives())
def test_drift_is_stable(p, d):
    eig = np.linalg.eigvals(oracle.LinearSystem.two_port(p, d).drift)
    assert np.all(eig.real < 0)


def test_mean_field_matches_steady_state():
    ss = solve_steady_state(P, D)
    abar = oracle.LinearSystem.two_port(P, D).mean_field()
    assert abar[0] == pytest.approx(ss.a_plus, rel=1e-12)
    assert abar[1] == pytest.approx(ss.a_minus, rel=1e-12)


def test_generic_oracle_requires_left_drive():
    gd = GenericDissipation.from_two_port(P)
    with pytest.raises(ValueError):
        oracle.freq_solve_generic(np.array([0.0]), gd, P.J, D)


def test_generic_oracle_matches_two_port():
    d = DriveConfig(0.4)
    w = np.linspace(-4, 4, 21)
    a = oracle.freq_solve(w, P, d)
    b = oracle.freq_solve_generic(w, GenericDissipation.from_two_port(P), P.J, d, P.g)
    np.testing.assert_allclose(b.sff, a.sff, rtol=1e-10)


# -- time domain ---------------------------------------------------------------


def test_fixed_seed_is_bit_identical():
    a = oracle.simulate(P, D, DT, 2000, seed=7)
    b = oracle.simulate(P, D, DT, 2000, seed=7)
    c = oracle.simulate(P, D, DT, 2000, seed=8)
    for key in a.samples:
        np.testing.assert_array_equal(a.samples[key], b.samples[key])
    assert not np.array_equal(a.samples["f_opt"], c.samples["f_opt"])


def test_noiseless_relaxes_to_fixed_point():
    n = int(math.ceil(10 / KB / DT))
    b = oracle.simulate(P, D, DT, n + 1, noise=False, start="vacuum")
    ss = solve_steady_state(P, D)
    # slowest decay is kappa_bar / 2, so exp(-5) remains after 10 / kappa_bar
    assert abs(b.samples["a_plus"][-1] - ss.a_plus) < 1.1 * math.exp(-5) * abs(ss.a_plus)


def test_noiseless_steady_start_stays_put():
    b = oracle.simulate(P, D, DT, 500, noise=False)
    np.testing.assert_allclose(b.samples["a_plus"], b.mean_field[0], rtol=1e-12)
    np.testing.assert_allclose(b.samples["f_opt"], 0.0, atol=1e-12)


def test_ensemble_mean_matches_steady_state():
    n = int(5 / KB / DT)
    finals = np.array([oracle.simulate(P, D, DT, n, seed=s).samples["a_plus"][-1] for s in range(100)])
    target = solve_steady_state(P, D).a_plus
    for part in (np.real, np.imag):
        se = part(finals).std(ddof=1) / math.sqrt(finals.size)
        assert abs(part(finals).mean() - part(target)) < 3 * se


def test_euler_is_first_order():
    errs = []
    for dt in (DT, DT / 2):
        n = int(round(2 / dt))
        e = oracle.simulate(P, D, dt, n, noise=False, start="vacuum", method="euler")
        x = oracle.simulate(P, D, dt, n, noise=False, start="vacuum")
        errs.append(abs(e.samples["a_plus"][-1] - x.samples["a_plus"][-1]))
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)


def test_noise_variance_normalisation():
    b = oracle.simulate(P, D, DT, 20000, seed=1)
    # E|xi|^2 dt = 1, split evenly between quadratures
    v = np.mean(np.abs(b.samples["xi_L"]) ** 2) * DT
    assert v == pytest.approx(1.0, rel=0.03)
    assert np.mean(b.samples["xi_L"].real ** 2) * DT == pytest.approx(0.5, rel=0.05)


def test_timestep_guard():
    with pytest.raises(TimestepTooLargeError):
        oracle.simulate(P, D, 0.2 / oracle.max_rate(P, D), 10)


def test_unknown_method():
    with pytest.raises(ValueError):
        oracle.simulate(P, D, DT, 10, method="rk4")


def test_short_record_rejected():
    b = oracle.simulate(P, D, DT, 1000, seed=0)
    assert b.duration < 50 / KB
    with pytest.raises(InsufficientRecordError):
        oracle.estimate_transfer(b, KB)


def test_too_few_samples_per_segment():
    with pytest.raises(InsufficientRecordError):
        oracle.welch_transfer(np.ones(20), np.ones(20), 0.1, n_segments=32)


def test_zero_coupling_gives_zero_transfer():
    p = replace(P, g=0.0)
    b = oracle.simulate(p, D, DT, int(60 / KB / DT), seed=2)
    est = oracle.estimate_transfer(b, KB)
    assert np.all(est.a_hat == 0)


def test_welch_bias_on_single_pole():
    # y' = -gam y + x, transfer 1/(gam - i w); segments span 100/gam
    gam, dt = 1.0, 0.01
    rng = np.random.default_rng(5)
    n = 400_000
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2 * dt)
    decay = math.exp(-gam * dt)
    gain = (1 - decay) / gam
    y = np.empty(n, dtype=complex)
    cur = 0j
    for k in range(n):
        y[k] = cur
        cur = decay * cur + gain * x[k]
    w, h, sigma, k = oracle.welch_transfer(x, y, dt, n_segments=39)
    h = h * np.exp(-0.5j * w * dt)
    band = np.abs(w) <= 5 * gam
    ratio = h[band] * (gam - 1j * w[band])
    assert abs(np.mean(ratio) - 1) < 0.01
    z = np.abs(h[band] - 1 / (gam - 1j * w[band])) / sigma[band]
    assert np.mean(z < 3) >= 0.95


def test_monte_carlo_amplitudes():
    chk = validation.check_monte_carlo(seed=11)
    assert chk.passed, chk.detail


def test_monte_carlo_reproduces_one_port_dip():
    p = SystemParams(J=10.0, kappa_L=1.0, kappa_R=0.0)
    d = DriveConfig(0.0)
    kb = derive(p).kappa_bar
    dt = 0.05 / oracle.max_rate(p, d)
    b = oracle.simulate(p, d, dt, int(400 / kb / dt), seed=4)
    est = oracle.estimate_transfer(b, kb, n_segments=16)
    s = est.sff
    near0 = s[np.argmin(np.abs(est.omega))]
    wing = s[np.abs(np.abs(est.omega) - 3 * kb) < 0.5 * kb].mean()
    assert near0 < 0.1 * wing
