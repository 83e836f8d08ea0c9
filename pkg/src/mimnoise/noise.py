"""Backaction noise amplitudes and the force noise spectral density.

Frequencies follow ``X[omega] = int exp(i omega t) X(t) dt``, so
``S_FF(+omega_m)`` is the cooling (emission) side and ``S_FF(-omega_m)`` the
heating side.  Amplitudes are quoted in the gauge where ``<a+>`` is real and
positive, which is what makes ``G = g |<a+>|`` appear without a phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ExceptionalPointError, ParameterError
from .params import (
    DriveConfig,
    GenericDissipation,
    SystemParams,
    derive,
    derive_generic,
    to_record,
)
from .steady_state import (
    drive_ratio,
    eps_m_large_j,
    solve_steady_state,
    solve_steady_state_generic,
)

VARIANTS = ("exact", "large_j", "one_port", "generic")


@dataclass(frozen=True)
class NoiseAmplitudes:
    """Port (or channel) amplitudes A_i[omega] multiplying the input noises."""

    a_L: np.ndarray
    a_R: np.ndarray
    variant: str
    omega: np.ndarray
    channels: tuple[str, str] = ("L", "R")

    @property
    def sff(self) -> np.ndarray:
        return np.abs(self.a_L) ** 2 + np.abs(self.a_R) ** 2


@dataclass
class SpectrumSeries:
    omegas: np.ndarray
    values: np.ndarray
    params_snapshot: dict
    variant: str
    meta: dict = field(default_factory=dict)


def normalize_variant(variant: str) -> str:
    v = variant.replace("-", "_")
    if v not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return v


def amplitudes_exact(omega, p: SystemParams, d: DriveConfig, eps: str = "exact") -> NoiseAmplitudes:
    """Two-pole amplitudes valid at any J.

    Parameters
    ----------
    omega : float or array_like
        Evaluation frequencies.
    eps : {"exact", "large_j"}
        Source of eps_m: the exact steady state (default) or its leading
        large-J limit.
    """
    w = np.asarray(omega, dtype=float)
    ss = solve_steady_state(p, d)
    dv = derive(p)
    if eps == "exact":
        em = ss.eps_m
    elif eps == "large_j":
        em = eps_m_large_j(p, d)
    else:
        raise ValueError(f"eps must be 'exact' or 'large_j', got {eps!r}")
    J, jt, dj = p.J, dv.j_tilde, dv.delta_j
    if jt == 0:
        raise ExceptionalPointError("two-pole form is singular at J = |delta_kappa| / 2; use the oracle")
    half_dk = 0.5j * dv.delta_kappa
    res = w + d.delta - dj + 0.5j * dv.kappa_bar
    off = res - 2 * jt
    out = []
    for s, kappa in ((1, p.kappa_L), (-1, p.kappa_R)):
        f = 1 + s * em / (2 * J)
        t1 = (em + (half_dk - s * dj) * f) / res
        t2 = (-s * 2 * J + (half_dk + s * dj) * f) / off
        out.append(1j / math.sqrt(2) * ss.G / (2 * jt) * math.sqrt(kappa) * (t1 - t2))
    return NoiseAmplitudes(out[0], out[1], "exact", w)


def amplitudes_large_j(omega, p: SystemParams, d: DriveConfig) -> NoiseAmplitudes:
    """Leading order in 1/J: a resonant pole interfering with a flat background."""
    w = np.asarray(omega, dtype=float)
    ss = solve_steady_state(p, d)
    kb = derive(p).kappa_bar
    lam_c = np.conj(drive_ratio(p, d))
    res = (-d.delta + 0.5j * kb) / (w + d.delta + 0.5j * kb) * lam_c
    pre = 1j / math.sqrt(2) * ss.G / (2 * p.J)
    a_l = pre * math.sqrt(p.kappa_L) * (res - 1)
    a_r = pre * math.sqrt(p.kappa_R) * (res + 1)
    return NoiseAmplitudes(a_l, a_r, "large_j", w)


def amplitudes_generic(
    omega,
    gd: GenericDissipation,
    J: float,
    d: DriveConfig,
    g: float = 1.0,
    as_printed: bool = False,
) -> NoiseAmplitudes:
    """Amplitudes for one driven channel plus one internal-loss channel.

    The returned pair is ``(A_dr, A_int)``.  Terms proportional to ``t_d`` or
    ``t_i`` are multiplied out against ``sqrt(kappa^+)`` so a channel that
    only touches the ``-`` mode stays finite.

    ``as_printed=True`` evaluates the bracket with the off-resonant
    numerator's ``DeltaJ`` sign flipped and ``kappa_-`` in the off-resonant
    pole, i.e. the form that disagrees with direct inversion once ``DeltaJ``
    or ``kappa_+ - kappa_-`` is nonzero.  Kept only for comparison reports.
    """
    w = np.asarray(omega, dtype=float)
    gv = derive_generic(gd, J)
    ss = solve_steady_state_generic(gd, J, g, d)
    em, dj, jt = ss.eps_m, gv.delta_j, gv.j_tilde
    if jt == 0:
        raise ExceptionalPointError("two-pole form is singular where the normal-mode poles merge")
    half_dk = 0.5j * gv.delta_kappa
    q = em / (2 * J)
    loss_factor = 1 + 0.5j * gv.small_delta_kappa / J
    res = w + d.delta - dj + 0.5j * gv.kappa_plus
    off_kappa = gv.kappa_minus if as_printed else gv.kappa_plus
    off = w + d.delta - dj - 2 * jt + 0.5j * off_kappa
    flip = -1 if as_printed else 1
    out = []
    for s, kp, km in (
        (1, gd.kappa_dr_plus, gd.kappa_dr_minus),
        (-1, gd.kappa_int_plus, gd.kappa_int_minus),
    ):
        # numerator = A + t*B; sqrt(kp)*t == sqrt(km)
        n1_a = em * loss_factor + half_dk - dj * q
        n1_b = s * half_dk * q - s * dj
        n2_a = half_dk + flip * dj * q
        n2_b = -s * 2 * J * loss_factor + s * half_dk * q + flip * s * dj
        rk, rm = math.sqrt(kp), math.sqrt(km)
        bracket = (rk * n1_a + rm * n1_b) / res - (rk * n2_a + rm * n2_b) / off
        out.append(1j * ss.G / (2 * jt) * bracket)
    return NoiseAmplitudes(out[0], out[1], "generic", w, channels=("dr", "int"))


def _two_port_generic(omega, p: SystemParams, d: DriveConfig) -> NoiseAmplitudes:
    amps = amplitudes_generic(omega, GenericDissipation.from_two_port(p), p.J, d, p.g)
    return NoiseAmplitudes(amps.a_L, amps.a_R, "generic", amps.omega)


def sff(omega, p: SystemParams, d: DriveConfig, variant: str = "exact") -> np.ndarray:
    """S_FF = |A_L|^2 + |A_R|^2 from the selected backend."""
    v = normalize_variant(variant)
    if v == "exact":
        return amplitudes_exact(omega, p, d).sff
    if v == "large_j":
        return amplitudes_large_j(omega, p, d).sff
    if v == "one_port":
        return sff_oneport_closed(omega, p, d)
    return _two_port_generic(omega, p, d).sff


def sff_large_j_closed(omega, p: SystemParams, d: DriveConfig) -> np.ndarray:
    """Sum of two Fano lineshapes: a flat floor plus one interfering resonance."""
    w = np.asarray(omega, dtype=float)
    ss = solve_steady_state(p, d)
    dv = derive(p)
    kb, r = dv.kappa_bar, dv.delta_kappa / dv.kappa_bar
    lam = drive_ratio(p, d)
    num = np.abs(r * (w + 2 * d.delta) + (d.delta + 0.5j * kb) * (lam - r)) ** 2
    den = np.abs(w + d.delta + 0.5j * kb) ** 2
    floor = p.kappa_L * p.kappa_R / kb**2
    return ss.G**2 / (4 * p.J**2) * kb * (floor + num / den)


def sff_oneport_closed(omega, p: SystemParams, d: DriveConfig) -> np.ndarray:
    """Closed form for kappa_R = 0, valid at any J (not a large-J expansion)."""
    if p.kappa_R != 0:
        raise ParameterError(f"one-port form requires kappa_R = 0, got {p.kappa_R}")
    if 2 * p.J == d.delta:
        raise ParameterError("one-port closed form is singular at delta = 2J")
    w = np.asarray(omega, dtype=float)
    ss = solve_steady_state(p, d)
    J, dl, kl = p.J, d.delta, p.kappa_L
    u = w + dl
    num = J * (w + 2 * dl) - dl * u
    den = 2 * J * (u + 0.25j * kl) - u * (u + 0.5j * kl)
    return 2 * ss.G**2 * kl / (2 * J - dl) ** 2 * np.abs(num / den) ** 2


def sff_generic_closed(
    omega, gd: GenericDissipation, J: float, d: DriveConfig, g: float = 1.0
) -> np.ndarray:
    """Leading-order spectrum for small internal loss."""
    w = np.asarray(omega, dtype=float)
    gv = derive_generic(gd, J)
    ss = solve_steady_state_generic(gd, J, g, d)
    dl, kp = d.delta, gv.kappa_plus
    driven = gd.kappa_dr_minus * np.abs(w + 2 * dl) ** 2
    # kappa_int^- |w + dl(1 - t_d/t_i) + i kp/2 (1 + t_d/t_i)|^2, with
    # sqrt(kappa_int^-)/t_i rewritten as sqrt(kappa_int^+)
    internal = np.abs(
        math.sqrt(gd.kappa_int_minus) * (w + dl + 0.5j * kp)
        + gv.t_d * math.sqrt(gd.kappa_int_plus) * (-dl + 0.5j * kp)
    ) ** 2
    return ss.G**2 / (4 * J**2) * (driven + internal) / np.abs(w + dl + 0.5j * kp) ** 2


def spectrum_series(grid, p: SystemParams, d: DriveConfig, variant: str = "exact") -> SpectrumSeries:
    w = np.asarray(grid, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("empty frequency grid")
    if w.size > 1 and not (np.all(np.diff(w) > 0) or np.all(np.diff(w) < 0)):
        raise ValueError("frequency grid must be strictly monotone")
    v = normalize_variant(variant)
    return SpectrumSeries(w, sff(w, p, d, v), to_record(p, d), v)
