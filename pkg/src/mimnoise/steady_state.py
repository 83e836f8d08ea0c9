"""Classical driven steady state and the adiabatic-mode picture.

Mode equations (rotating frame, ``(+, -)`` ordering, noise dropped)::

    da+/dt = -(kbar/2 - i delta) a+ - (Dk/2) a- + D+
    da-/dt = -(kbar/2 + i(2J - delta)) a- - (Dk/2) a+ + D-

with ``D+- = sqrt(kL/2) aL +- sqrt(kR/2) aR``.  These are the signs of the
rotating-frame Hamiltonian ``-delta a+^dag a+ + (2J - delta) a-^dag a-``;
they put the ``+`` resonance at ``omega = -delta`` and the ``-`` resonance at
``omega = 2J - delta`` under ``X[omega] = int exp(i omega t) X(t) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyStateError, UndrivenModeError
from .params import (
    DriveConfig,
    GenericDissipation,
    SystemParams,
    derive,
    derive_generic,
    validate,
)


@dataclass(frozen=True)
class SteadyState:
    a_plus: complex
    a_minus: complex
    G: float
    eps_m: complex
    Lambda: complex | None

    def lr_amplitudes(self) -> tuple[complex, complex]:
        """Mean amplitudes of the localized left/right modes."""
        s = math.sqrt(0.5)
        return s * (self.a_plus + self.a_minus), s * (self.a_plus - self.a_minus)


@dataclass(frozen=True)
class AdiabaticMode:
    theta: np.ndarray
    omega_plus: np.ndarray
    kappa_plus: np.ndarray
    kappa_minus: np.ndarray


def mode_drives(p: SystemParams, d: DriveConfig) -> tuple[complex, complex]:
    sl = math.sqrt(p.kappa_L / 2) * complex(d.alpha_L)
    sr = math.sqrt(p.kappa_R / 2) * complex(d.alpha_R)
    return sl + sr, sl - sr


def _solve2(m11, m12, m21, m22, b1, b2):
    det = m11 * m22 - m12 * m21
    scale = max(abs(m11 * m22), abs(m12 * m21), 1e-300)
    if abs(det) <= 1e-14 * scale:
        raise DegenerateSteadyStateError("degenerate steady state")
    return (b1 * m22 - m12 * b2) / det, (m11 * b2 - m21 * b1) / det


def drive_ratio(p: SystemParams, d: DriveConfig) -> complex:
    """Lambda = (sqrt(kL) aL - sqrt(kR) aR) / (sqrt(kL) aL + sqrt(kR) aR)."""
    dp, dm = mode_drives(p, d)
    if dp == 0:
        raise UndrivenModeError("undriven symmetric mode: Lambda denominator is zero")
    return dm / dp


def _g_and_eps(a_plus: complex, a_minus: complex, g: float, J: float):
    if a_plus == 0:
        raise UndrivenModeError("undriven symmetric mode: <a+> = 0")
    return g * abs(a_plus), 2 * J * np.conj(a_minus / a_plus)


def solve_steady_state(p: SystemParams, d: DriveConfig) -> SteadyState:
    validate(p)
    if not d.is_driven:
        raise UndrivenModeError("no drive applied")
    dv = derive(p)
    kb, dk = dv.kappa_bar, dv.delta_kappa
    dp, dm = mode_drives(p, d)
    # 0 = M a + D  =>  (-M) a = D
    a_p, a_m = _solve2(
        kb / 2 - 1j * d.delta, dk / 2,
        dk / 2, kb / 2 + 1j * (2 * p.J - d.delta),
        dp, dm,
    )
    G, eps = _g_and_eps(a_p, a_m, p.g, p.J)
    lam = dm / dp if dp != 0 else None
    return SteadyState(complex(a_p), complex(a_m), float(G), complex(eps), lam)


def coupling_scalars(ss: SteadyState, p: SystemParams, d: DriveConfig):
    """(G, eps_m, Lambda): G = g|<a+>|, eps_m* / 2J = <a->/<a+>."""
    G, eps = _g_and_eps(ss.a_plus, ss.a_minus, p.g, p.J)
    return G, eps, drive_ratio(p, d)


def eps_m_large_j(p: SystemParams, d: DriveConfig) -> complex:
    """Leading large-J limit of eps_m, -conj(Lambda) (delta - i kbar/2) - i Dk/2."""
    dv = derive(p)
    lam = drive_ratio(p, d)
    return -np.conj(lam) * (d.delta - 0.5j * dv.kappa_bar) - 0.5j * dv.delta_kappa


def solve_steady_state_generic(
    gd: GenericDissipation, J: float, g: float, d: DriveConfig
) -> SteadyState:
    """Steady state of the single-driven-port model; ``alpha_L`` is the drive."""
    gv = derive_generic(gd, J)
    if d.alpha_R != 0:
        raise ValueError("generic dissipation has one driven port; alpha_R must be 0")
    alpha = complex(d.alpha_L)
    if alpha == 0:
        raise UndrivenModeError("no drive applied")
    a_p, a_m = _solve2(
        gv.kappa_plus / 2 - 1j * d.delta, gv.delta_kappa / 2,
        gv.delta_kappa / 2, gv.kappa_minus / 2 + 1j * (2 * J - d.delta),
        math.sqrt(gd.kappa_dr_plus) * alpha, math.sqrt(gd.kappa_dr_minus) * alpha,
    )
    G, eps = _g_and_eps(a_p, a_m, g, J)
    return SteadyState(complex(a_p), complex(a_m), float(G), complex(eps), None)


def adiabatic_mode(x, p: SystemParams) -> AdiabaticMode:
    """Lower adiabatic mode for a static displacement ``x`` (units of x_zpt).

    cot(2 theta) = g x / J, so theta runs from pi/2 (x -> -inf, mode on the
    right) through pi/4 (x = 0) to 0 (x -> +inf, mode on the left).
    """
    validate(p)
    gx = p.g * np.asarray(x, dtype=float)
    theta = 0.5 * np.arctan2(p.J, gx)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return AdiabaticMode(
        theta=theta,
        omega_plus=p.omega_c - np.hypot(p.J, gx),
        kappa_plus=c2 * p.kappa_L + s2 * p.kappa_R,
        kappa_minus=s2 * p.kappa_L + c2 * p.kappa_R,
    )


def quad_coupling(p: SystemParams) -> float:
    """Coefficient g^2 / 2J of the x^2 coupling after eliminating the - mode."""
    validate(p)
    return p.g**2 / (2 * p.J)
