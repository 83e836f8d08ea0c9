"""Cooling and QND figures of merit built from S_FF(+-omega_m).

Also provides a phonon-number jump simulator for the measurement regimes:
a birth-death process driven by the backaction rates plus a thermal bath,
observed through a boxcar-averaged record with one quantum of read noise
per measurement time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoNetDampingError, ParameterError
from .noise import sff
from .params import DriveConfig, SystemParams, derive, validate
from .steady_state import SteadyState, solve_steady_state


@dataclass(frozen=True)
class CoolingResult:
    gamma_opt: float
    n_eff: float
    s_plus: float
    s_minus: float


@dataclass(frozen=True)
class QndBudget:
    tau_meas: float
    tau_ba: np.ndarray
    ratio: float


@dataclass
class JumpTrace:
    times: np.ndarray
    n_true: np.ndarray
    signal: np.ndarray
    seed: int | None
    jump_times: np.ndarray
    levels: np.ndarray
    tau_meas: float
    samples_per_window: int
    meta: dict = field(default_factory=dict)


def sideband_rates(p: SystemParams, d: DriveConfig, variant: str = "exact") -> tuple[float, float]:
    """(S_FF(+omega_m), S_FF(-omega_m))."""
    s = sff(np.array([p.omega_m, -p.omega_m]), p, d, variant)
    return float(s[0]), float(s[1])


def cooling_figures(p: SystemParams, d: DriveConfig, variant: str = "exact") -> CoolingResult:
    s_plus, s_minus = sideband_rates(p, d, variant)
    gamma = s_plus - s_minus
    if abs(gamma) <= 1e-12 * (s_plus + s_minus) or gamma == 0:
        raise NoNetDampingError("no net optical damping: S_FF(+w_m) = S_FF(-w_m)")
    return CoolingResult(gamma, s_minus / gamma, s_plus, s_minus)


def delta_cold(omega_m: float, J: float) -> float:
    """Detuning that nulls the one-port heating spectrum.

    Evaluated as ``w/2 - (w/2)^2 / (J + sqrt(J^2 + (w/2)^2))``, algebraically
    equal to ``w/2 + J - sqrt(J^2 + (w/2)^2)`` without the cancellation at
    large ``J``.
    """
    if omega_m <= 0 or J <= 0:
        raise ParameterError("omega_m and J must be > 0")
    h = 0.5 * omega_m
    return h - h * h / (J + math.hypot(J, h))


def _small_kr_occupancy_per_kr(p: SystemParams) -> float:
    x = p.omega_m / (2 * p.J)
    root = math.sqrt(1 + x * x)
    return (
        2.25 * (root - 5 / 3 * x) ** 2 / p.kappa_L
        + (root - 3 * x) ** 2 * p.kappa_L / (16 * p.omega_m**2)
    )


def cooling_small_kr(p: SystemParams, d: DriveConfig | None = None) -> CoolingResult:
    """Leading order in kappa_R for a left-port drive at the cold detuning.

    ``d`` supplies the drive amplitude; its detuning is replaced by
    ``delta_cold``.  Gamma is evaluated in its printed form, which divides
    by ``n_eff / kappa_R``; ``s_plus``/``s_minus`` are then implied by the
    defining identities.
    """
    validate(p)
    d = d or DriveConfig(0.0)
    if d.alpha_R != 0:
        raise ValueError("small-kappa_R expansion assumes a left-port drive")
    dc = delta_cold(p.omega_m, p.J)
    G = solve_steady_state(p, replace(d, delta=dc)).G
    per_kr = _small_kr_occupancy_per_kr(p)
    n_eff = per_kr * p.kappa_R
    gamma = 2 * G**2 / p.J**2 * dc**2 / (p.omega_m**2 * per_kr)
    return CoolingResult(gamma, n_eff, gamma * (n_eff + 1), gamma * n_eff)


def tau_meas(p: SystemParams, ss: SteadyState) -> float:
    """Time to resolve one phonon, J^2 kappa_L / (G^2 g^2), unit prefactor."""
    denom = ss.G**2 * p.g**2
    return math.inf if denom == 0 else p.J**2 * p.kappa_L / denom


def tau_ba(n: int, p: SystemParams, d: DriveConfig, variant: str = "exact") -> float:
    """Backaction lifetime of Fock state ``n``; ``inf`` when both rates vanish."""
    if n < 0:
        raise ValueError("n must be >= 0")
    s_plus, s_minus = sideband_rates(p, d, variant)
    rate = (1 + n) * s_minus + n * s_plus
    return math.inf if rate == 0 else 1.0 / rate


def tau_ba_large_j(n: int, p: SystemParams, d: DriveConfig) -> float:
    """Large-J closed form for a left-port drive at zero detuning."""
    kb = derive(p).kappa_bar
    h = kb / 2
    wm2 = p.omega_m**2
    G = solve_steady_state(p, d).G
    bracket = (h * wm2 + p.kappa_R * h * h) / (wm2 + h * h)
    return 1.0 / (G**2 / p.J**2 * bracket * (n + 0.5))


def lifetime_bracket(p: SystemParams) -> float:
    h = derive(p).kappa_bar / 2
    wm2 = p.omega_m**2
    return (h * wm2 + p.kappa_R * h * h) / (wm2 + h * h)


def qnd_budget(p: SystemParams, d: DriveConfig, n_max: int = 3, variant: str = "exact") -> QndBudget:
    tm = tau_meas(p, solve_steady_state(p, d))
    taus = np.array([tau_ba(n, p, d, variant) for n in range(n_max + 1)])
    ratio = 0.0 if math.isinf(taus[1]) else tm / taus[1]
    return QndBudget(tm, taus, ratio)


def qnd_ratio(p: SystemParams, d: DriveConfig, variant: str = "exact") -> float:
    """tau_meas / tau_BA,1; zero when the n = 1 state has no backaction decay."""
    return qnd_budget(p, d, 1, variant).ratio


# -- quantum jumps -------------------------------------------------------------


def simulate_jump_process(
    up_coef: float,
    down_coef: float,
    duration: float,
    tau_meas: float,
    seed: int | None = 0,
    n0: int = 0,
    samples_per_window: int = 20,
    max_jumps: int = 5_000_000,
) -> JumpTrace:
    """Birth-death process with rates ``(n+1) up_coef`` and ``n down_coef``.

    The population grows without bound when ``up_coef >= down_coef``;
    exceeding ``max_jumps`` events raises ``RuntimeError``.

    The raw record ``n + noise`` is sampled every ``tau_meas / samples_per_window``
    with noise chosen so that a trailing boxcar over ``tau_meas`` has unit
    standard deviation; ``signal`` is that boxcar average.
    """
    if not duration > 0:
        raise ValueError("duration must be > 0")
    if up_coef < 0 or down_coef < 0:
        raise ValueError("rates must be >= 0")
    if not (math.isfinite(tau_meas) and tau_meas > 0):
        raise ValueError("tau_meas must be finite and > 0")
    rng = np.random.default_rng(seed)
    t, n = 0.0, int(n0)
    jump_times, levels = [0.0], [n]
    while True:
        up, down = (n + 1) * up_coef, n * down_coef
        total = up + down
        if total <= 0:
            break
        t += rng.exponential(1.0 / total)
        if t >= duration:
            break
        n += 1 if rng.random() * total < up else -1
        if len(jump_times) > max_jumps:
            raise RuntimeError(f"more than {max_jumps} jumps; is up_coef >= down_coef?")
        jump_times.append(t)
        levels.append(n)

    k = samples_per_window
    dt = tau_meas / k
    times = np.arange(int(round(duration / dt))) * dt
    jt, lv = np.array(jump_times), np.array(levels)
    n_true = lv[np.searchsorted(jt, times, side="right") - 1]
    raw = n_true + rng.normal(0.0, math.sqrt(k), times.size)
    csum = np.concatenate([[0.0], np.cumsum(raw)])
    hi = np.arange(1, times.size + 1)
    lo = np.maximum(0, hi - k)
    signal = (csum[hi] - csum[lo]) / (hi - lo)
    return JumpTrace(times, n_true, signal, seed, jt, lv, tau_meas, k)


def simulate_jumps(
    p: SystemParams,
    d: DriveConfig,
    duration: float,
    seed: int | None = 0,
    variant: str = "exact",
    backaction: bool = True,
    samples_per_window: int = 20,
) -> JumpTrace:
    """Jump trace with golden-rule backaction rates and a thermal bath.

    Up-rate ``(n+1)(S_FF(-w_m) + gamma n_th)``, down-rate
    ``n(S_FF(+w_m) + gamma (n_th + 1))``.  ``backaction=False`` keeps only
    the thermal part.
    """
    if not duration > 0:
        raise ValueError("duration must be > 0")
    s_plus, s_minus = sideband_rates(p, d, variant) if backaction else (0.0, 0.0)
    tm = tau_meas(p, solve_steady_state(p, d))
    up = s_minus + p.gamma * p.n_th
    down = s_plus + p.gamma * (p.n_th + 1) if (s_plus or p.gamma) else 0.0
    trace = simulate_jump_process(up, down, duration, tm, seed, 0, samples_per_window)
    trace.meta.update(s_plus=s_plus, s_minus=s_minus, up_coef=up, down_coef=down)
    return trace


def count_plateaus(trace: JumpTrace) -> tuple[int, int]:
    """(number of jumps, number of resolvable excited plateaus).

    A plateau is resolvable when ``n >= 1`` holds for at least one
    measurement time and the boxcar windows lying entirely inside it average
    to within half a phonon of ``n``.
    """
    n = trace.n_true
    k = trace.samples_per_window
    change = np.flatnonzero(np.diff(n)) + 1
    starts, ends = np.r_[0, change], np.r_[change, n.size]
    resolved = 0
    for s, e in zip(starts, ends):
        level = n[s]
        if level < 1 or e - s < k:
            continue
        inside = trace.signal[s + k - 1 : e]
        if abs(inside.mean() - level) < 0.5:
            resolved += 1
    return len(trace.jump_times) - 1, resolved


# -- regimes -------------------------------------------------------------------


def with_qnd_ratio(
    p: SystemParams, d: DriveConfig, n: int, target: float, variant: str = "exact"
) -> SystemParams:
    """Rescale ``g`` so that ``tau_meas / tau_BA,n`` equals ``target``.

    The ratio scales as ``1/g^2`` at fixed drive, so one evaluation fixes g.
    """
    tm = tau_meas(p, solve_steady_state(p, d))
    current = tm / tau_ba(n, p, d, variant)
    if current == 0 or not math.isfinite(current):
        raise ValueError(f"tau_BA,{n} has no backaction contribution to rescale")
    return replace(p, g=p.g * math.sqrt(current / target))


def jump_regime(name: str, thermal_up: float = 0.25, n_th: float = 10.0):
    """Parameters for the three illustrative measurement regimes.

    ``name`` is one of ``"none"`` (thermal jumps only), ``"slow"``
    (tau_BA,0 = 2 tau_meas, symmetric cavity at zero detuning) or ``"fast"``
    (tau_BA,1 = tau_meas / 2, one-port cavity at the cold detuning).
    ``thermal_up`` is the bath up-rate ``gamma n_th`` in units of 1/tau_meas.

    Returns
    -------
    (SystemParams, DriveConfig, backaction_enabled)
    """
    wm = 0.25
    if name == "fast":
        p = SystemParams(J=10.0, kappa_L=1.0, kappa_R=0.0, omega_m=wm)
        d = DriveConfig(delta_cold(wm, 10.0))
        p = with_qnd_ratio(p, d, 1, 2.0)
    elif name in ("slow", "none"):
        p = SystemParams(J=10.0, kappa_L=1.0, kappa_R=1.0, omega_m=wm)
        d = DriveConfig(0.0)
        p = with_qnd_ratio(p, d, 0, 0.5)
    else:
        raise ValueError(f"unknown regime {name!r}")
    tm = tau_meas(p, solve_steady_state(p, d))
    p = replace(p, gamma=thermal_up / (n_th * tm), n_th=n_th)
    return p, d, name != "none"
