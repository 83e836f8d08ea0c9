"""Output fields of the cavity and the position-information kernel.

With ``a_i^out = a_i^in - sqrt(kappa_i) a_i`` the output noise is
``B[omega] @ xi`` and a static-frame displacement ``x`` adds ``K[omega] x``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .noise import amplitudes_exact, amplitudes_large_j
from .oracle import LinearSystem
from .params import DriveConfig, SystemParams, derive
from .steady_state import drive_ratio, solve_steady_state

# columns of the (+, -) -> (L, R) basis change
_U = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


@dataclass(frozen=True)
class OutputTransfer:
    """``b_matrix`` has shape (..., 2, 2); ``x_kernel`` has shape (..., 2), ports (L, R)."""

    b_matrix: np.ndarray
    x_kernel: np.ndarray
    omega: np.ndarray


def output_transfer(omega, p: SystemParams, d: DriveConfig) -> OutputTransfer:
    """Input-to-output scattering matrix and the x-to-output kernel.

    ``x_kernel`` is derived by adding the linearized coupling
    ``i g (<a->, <a+>) x`` to the mode equations; it is quoted in the gauge
    where ``<a+>`` is real (left unfixed if ``<a+>`` vanishes).  It satisfies ``K = i B[omega] conj(A[omega])``
    with ``A`` the noise amplitudes, so ``|K_L|^2 + |K_R|^2 = S_FF``.
    """
    w = np.asarray(omega, dtype=float)
    sys = LinearSystem.two_port(p, d)
    chi_b = sys.susceptibility(w)
    out_map = np.diag([math.sqrt(p.kappa_L), math.sqrt(p.kappa_R)]) @ _U
    b = np.eye(2) - np.einsum("ij,...jk->...ik", out_map, chi_b)

    abar = np.linalg.solve(sys.drift, -sys.input_map @ sys.drive)
    # with <a+> = 0 there is no gauge to fix; |K|^2 is unaffected
    phase = abs(abar[0]) / abar[0] if abar[0] != 0 else 1.0
    src = 1j * p.g * np.array([abar[1], abar[0]]) * phase
    lhs = -1j * w[..., None, None] * np.eye(2) - sys.drift
    resp = np.linalg.solve(lhs, np.broadcast_to(src, w.shape + (2,))[..., None])[..., 0]
    kern = -np.einsum("ij,...j->...i", out_map, resp)
    return OutputTransfer(b, kern, w)


def kubo_kernel(omega, p: SystemParams, d: DriveConfig) -> np.ndarray:
    """``i B[omega] conj(A[omega])`` from the closed-form amplitudes."""
    tr = output_transfer(omega, p, d)
    a = amplitudes_exact(omega, p, d)
    amps = np.stack([np.conj(a.a_L), np.conj(a.a_R)], axis=-1)
    return 1j * np.einsum("...ij,...j->...i", tr.b_matrix, amps)


def _check_special_case(p: SystemParams, d: DriveConfig) -> None:
    if d.delta != 0 or abs(drive_ratio(p, d) - 1) > 1e-12:
        raise ValueError("time-domain kernel is only available for delta = 0, Lambda = 1")


def kernel_large_j(tau, p: SystemParams, d: DriveConfig) -> tuple[np.ndarray, float]:
    """Large-J left-port kernel as (smooth resonant samples, impulse weight).

    The impulse sits at ``tau = 0+`` and is never sampled, so the
    zero-frequency cancellation between the two parts stays exact.
    """
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0):
        raise ValueError("causality: tau must be >= 0")
    _check_special_case(p, d)
    kb = derive(p).kappa_bar
    scale = solve_steady_state(p, d).G / (2 * p.J) * math.sqrt(p.kappa_L / 2)
    return scale * (kb / 2) * np.exp(-kb / 2 * t), -scale


def kernel_resonant_integral(p: SystemParams, d: DriveConfig) -> float:
    """Closed-form integral of the resonant part over ``tau >= 0``."""
    _check_special_case(p, d)
    return solve_steady_state(p, d).G / (2 * p.J) * math.sqrt(p.kappa_L / 2)


def inverse_fourier(func, tau: float, epsabs: float = 1e-13, limit: int = 200) -> complex:
    """``(1/2pi) int exp(-i omega tau) func(omega) d omega`` for ``tau != 0``.

    Uses Fourier-weighted quadrature on the half line, which handles slowly
    decaying (~1/omega) transforms without truncation.
    """
    if tau == 0:
        raise ValueError("tau = 0 is not supported by the oscillatory quadrature")
    s = abs(tau)
    sgn = 1.0 if tau > 0 else -1.0

    def even(w):
        return complex(func(w)) + complex(func(-w))

    def odd(w):
        return complex(func(w)) - complex(func(-w))

    def q(f, kind):
        return integrate.quad(f, 0, np.inf, weight=kind, wvar=s, epsabs=epsabs, limlst=limit)[0]

    c_re = q(lambda w: even(w).real, "cos")
    c_im = q(lambda w: even(w).imag, "cos")
    s_re = q(lambda w: odd(w).real, "sin")
    s_im = q(lambda w: odd(w).imag, "sin")
    # exp(-i w tau) = cos(w s) - i sgn sin(w s)
    total = complex(c_re, c_im) - 1j * sgn * complex(s_re, s_im)
    return total / (2 * math.pi)


def resonant_pole_transform(tau, p: SystemParams, d: DriveConfig) -> np.ndarray:
    """Inverse transform of ``-i`` times the resonant pole of the large-J ``A_L``."""
    _check_special_case(p, d)
    kb = derive(p).kappa_bar
    pole_at = -d.delta - 0.5j * kb
    background = complex(amplitudes_large_j(1e300, p, d).a_L)
    w0 = 1.0
    # residue read off the amplitude at one frequency
    c = (complex(amplitudes_large_j(w0, p, d).a_L) - background) * (w0 - pole_at)

    def pole(w):
        return -1j * c / (w - pole_at)

    return np.array([inverse_fourier(pole, float(t)) for t in np.atleast_1d(tau)])


def _scattering_entry(p: SystemParams, d: DriveConfig, i: int, j: int):
    sys = LinearSystem.two_port(p, d)
    out_map = np.diag([math.sqrt(p.kappa_L), math.sqrt(p.kappa_R)]) @ _U
    (m00, m01), (m10, m11) = sys.drift.tolist()
    b0, b1 = sys.input_map[:, j].tolist()
    r0, r1 = out_map[i].tolist()

    def f(w):
        a00, a01, a10, a11 = -1j * w - m00, -m01, -m10, -1j * w - m11
        det = a00 * a11 - a01 * a10
        x0 = (a11 * b0 - a01 * b1) / det
        x1 = (a00 * b1 - a10 * b0) / det
        return -(r0 * x0 + r1 * x1)

    return f


def anticausal_leakage(p: SystemParams, d: DriveConfig, n_tau: int = 40, span: float = 20.0) -> float:
    """Energy fraction of ``B[omega] - I`` living at negative times.

    ``span`` sets the sampled window ``0 < |tau| <= span / kappa_bar``.
    """
    kb = derive(p).kappa_bar
    taus = np.linspace(span / kb / n_tau, span / kb, n_tau)
    ports = (0, 1) if p.kappa_R > 0 else (0,)
    pos = neg = 0.0
    with warnings.catch_warnings():
        # the anticausal integrals are zero to rounding; quad complains about that
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i in ports:
            for j in ports:
                f = _scattering_entry(p, d, i, j)
                pos += sum(abs(inverse_fourier(f, t)) ** 2 for t in taus)
                neg += sum(abs(inverse_fourier(f, -t)) ** 2 for t in taus)
    return neg / (pos + neg)


def fit_decay_rate(tau, values) -> float:
    """Least-squares slope of ``-log(values)`` against ``tau``."""
    slope = np.polyfit(np.asarray(tau, float), np.log(np.abs(values)), 1)[0]
    return -float(slope)
