import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mimnoise.errors import UndrivenModeError
from mimnoise.params import DriveConfig, SystemParams, derive
from mimnoise.steady_state import (
    adiabatic_mode,
    coupling_scalars,
    drive_ratio,
    eps_m_large_j,
    mode_drives,
    quad_coupling,
    solve_steady_state,
)

from strategies import drives, system_params


def residual(p, d, ss):
    dv = derive(p)
    dp, dm = mode_drives(p, d)
    r1 = -(dv.kappa_bar / 2 - 1j * d.delta) * ss.a_plus - dv.delta_kappa / 2 * ss.a_minus + dp
    r2 = -(dv.kappa_bar / 2 + 1j * (2 * p.J - d.delta)) * ss.a_minus - dv.delta_kappa / 2 * ss.a_plus + dm
    return max(abs(r1), abs(r2)) / max(abs(dp), abs(dm))


def test_one_port_left_right_ratio():
    # the R mode is slaved to L through (J - delta) a_R = J a_L
    for J, delta in ((2.0, 0.3), (5.0, -1.0), (0.7, 0.2)):
        p = SystemParams(J=J, kappa_L=1.0, kappa_R=0.0)
        a_l, a_r = solve_steady_state(p, DriveConfig(delta)).lr_amplitudes()
        assert abs(a_r / a_l) == pytest.approx(J / abs(J - delta), rel=1e-12)


def test_symmetric_cavity_decouples():
    p = SystemParams(J=3.0, kappa_L=0.8, kappa_R=0.8)
    ss = solve_steady_state(p, DriveConfig(0.0))
    drive = math.sqrt(0.4)
    assert ss.a_plus == pytest.approx(drive / 0.4, rel=1e-14)
    assert ss.a_minus == pytest.approx(drive / (0.4 + 6j), rel=1e-14)


@given(system_params(), drives())
def test_steady_state_residual(p, d):
    try:
        ss = solve_steady_state(p, d)
    except UndrivenModeError:
        assume(False)
    assert residual(p, d, ss) < 1e-10


@given(system_params(), drives(), st.floats(0.1, 10))
def test_linearity_in_drive(p, d, scale):
    try:
        a = solve_steady_state(p, d)
        b = solve_steady_state(p, DriveConfig(d.delta, d.alpha_L * scale, d.alpha_R * scale))
    except UndrivenModeError:
        assume(False)
    assert b.a_plus == pytest.approx(a.a_plus * scale, rel=1e-12)
    assert b.G == pytest.approx(a.G * scale, rel=1e-12)
    assert b.eps_m == pytest.approx(a.eps_m, rel=1e-10, abs=1e-12 * p.J)


def test_lambda_values():
    p = SystemParams(J=2.0, kappa_L=1.0, kappa_R=1.0)
    assert drive_ratio(p, DriveConfig(0.0, 1.0, 0.0)) == 1
    assert drive_ratio(p, DriveConfig(0.0, 0.0, 1.0)) == -1
    assert drive_ratio(p, DriveConfig(0.0, 1.0, 1.0)) == 0


def test_coupling_scalars_match_definitions():
    p = SystemParams(J=4.0, kappa_L=1.0, kappa_R=0.3, g=0.7)
    d = DriveConfig(0.2, 1.0, 0.5j)
    ss = solve_steady_state(p, d)
    G, eps, lam = coupling_scalars(ss, p, d)
    assert G == pytest.approx(0.7 * abs(ss.a_plus))
    assert np.conj(eps) / (2 * p.J) == pytest.approx(ss.a_minus / ss.a_plus)
    assert lam == pytest.approx(drive_ratio(p, d))


def test_undriven_symmetric_mode():
    # equal and opposite port drives leave <a+> = 0 when kappa_L = kappa_R
    p = SystemParams(J=2.0, kappa_L=1.0, kappa_R=1.0)
    with pytest.raises(UndrivenModeError):
        solve_steady_state(p, DriveConfig(0.0, 1.0, -1.0))


def test_eps_m_vanishes_for_one_port_at_zero_detuning():
    # <a_R> = <a_L> exactly here, so <a-> and eps_m vanish at every J
    for J in (10.0, 100.0, 1000.0):
        ss = solve_steady_state(SystemParams(J=J, kappa_L=1.0, kappa_R=0.0), DriveConfig(0.0))
        assert abs(ss.eps_m) <= 1e-12


def test_eps_m_approaches_its_limit_as_inverse_j():
    Js = np.array([10.0, 100.0, 1000.0])
    errs = []
    for J in Js:
        p = SystemParams(J=J, kappa_L=1.0, kappa_R=0.0)
        d = DriveConfig(0.3)
        errs.append(abs(solve_steady_state(p, d).eps_m - eps_m_large_j(p, d)))
    slope = np.polyfit(np.log(Js), np.log(errs), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_eps_m_large_j_limit():
    errs = []
    for J in (30.0, 300.0):
        p = SystemParams(J=J, kappa_L=1.0, kappa_R=0.4)
        d = DriveConfig(0.3, 1.0, 0.2)
        errs.append(abs(solve_steady_state(p, d).eps_m - eps_m_large_j(p, d)))
    assert errs[1] < errs[0] / 8


def test_adiabatic_mode_limits():
    p = SystemParams(J=2.0, kappa_L=1.0, kappa_R=0.2, g=0.5, omega_c=100.0)
    m0 = adiabatic_mode(0.0, p)
    assert m0.kappa_plus == pytest.approx(0.6)
    assert m0.omega_plus == pytest.approx(98.0)
    assert adiabatic_mode(1e9, p).kappa_plus == pytest.approx(1.0, rel=1e-9)
    assert adiabatic_mode(-1e9, p).kappa_plus == pytest.approx(0.2, rel=1e-8)


def test_adiabatic_mode_slope_and_curvature():
    p = SystemParams(J=2.0, kappa_L=1.0, kappa_R=0.2, g=0.5)
    h = 1e-4
    k = adiabatic_mode(np.array([-h, h]), p).kappa_plus
    slope = (k[1] - k[0]) / (2 * h)
    assert slope == pytest.approx(p.g * 0.4 / p.J, rel=1e-6)
    h = 1e-3
    w = adiabatic_mode(np.array([-h, 0.0, h]), p).omega_plus
    curv = (w[0] - 2 * w[1] + w[2]) / h**2
    assert curv == pytest.approx(-p.g**2 / p.J, rel=1e-5)
    assert quad_coupling(p) == pytest.approx(0.5 * abs(curv), rel=1e-5)


@given(system_params(), st.floats(-100, 100))
def test_adiabatic_invariants(p, x):
    m = adiabatic_mode(np.array([x, -x]), p)
    assert m.omega_plus[0] == pytest.approx(m.omega_plus[1])
    lo, hi = min(p.kappa_L, p.kappa_R), max(p.kappa_L, p.kappa_R)
    assert np.all(m.kappa_plus >= lo - 1e-12) and np.all(m.kappa_plus <= hi + 1e-12)
    assert np.allclose(m.kappa_plus + m.kappa_minus, p.kappa_L + p.kappa_R)


def test_quad_coupling_zero_g():
    assert quad_coupling(SystemParams(J=1.0, kappa_L=1.0, kappa_R=0.0, g=0.0)) == 0
