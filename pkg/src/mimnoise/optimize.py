"""Derivative-free minimisation over detuning and/or tunnel coupling.

A dense scan locates the basin; golden-section search refines inside the
bracketing grid cells.  Ties on the scan go to the smallest variable value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .backaction import cooling_figures, delta_cold
from .errors import NoNetDampingError
from .noise import sff
from .params import DriveConfig, SystemParams

_INV_PHI = (math.sqrt(5) - 1) / 2

OBJECTIVES = ("s_minus", "n_eff")
VARIABLES = ("delta", "J", "both")


@dataclass
class ScanResult:
    x: float | tuple[float, float]
    value: float
    scan_x: np.ndarray
    scan_values: np.ndarray
    scan_best: float


def golden_section(f, a: float, b: float, rtol: float = 1e-8, max_iter: int = 500) -> float:
    """Minimiser of a unimodal ``f`` on ``[a, b]``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= rtol * max(abs(a), abs(b), 1e-300):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def _finite(v: float) -> float:
    return v if math.isfinite(v) else math.inf


def minimize_scalar(f, lo: float, hi: float, n: int = 512, log: bool = False,
                    rtol: float = 1e-8) -> ScanResult:
    """Dense scan of ``n`` points then golden-section refinement.

    Non-finite objective values count as ``+inf``.
    """
    if n < 3 or not hi > lo:
        raise ValueError("need hi > lo and at least 3 scan points")
    xs = np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)
    vals = np.array([_finite(f(float(x))) for x in xs])
    if not np.isfinite(vals).any():
        raise ValueError("objective undefined over the entire range")
    i = int(np.argmin(vals))  # first occurrence: smallest x
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    x = golden_section(lambda t: _finite(f(t)), float(a), float(b), rtol)
    fx = _finite(f(x))
    if fx > vals[i]:
        x, fx = float(xs[i]), float(vals[i])
    return ScanResult(x, fx, xs, vals, float(vals[i]))


def minimize_2d(f, lo: tuple[float, float], hi: tuple[float, float], n: int = 512,
                log: tuple[bool, bool] = (False, False), rtol: float = 1e-8,
                sweeps: int = 50) -> ScanResult:
    """Grid scan in two variables then alternating golden-section sweeps."""
    axes = [np.geomspace(lo[k], hi[k], n) if log[k] else np.linspace(lo[k], hi[k], n) for k in (0, 1)]
    vals = np.array([[_finite(f(float(u), float(v))) for v in axes[1]] for u in axes[0]])
    if not np.isfinite(vals).any():
        raise ValueError("objective undefined over the entire range")
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    box = [(axes[0][max(i - 1, 0)], axes[0][min(i + 1, n - 1)]),
           (axes[1][max(j - 1, 0)], axes[1][min(j + 1, n - 1)])]
    x = [float(axes[0][i]), float(axes[1][j])]
    for _ in range(sweeps):
        prev = list(x)
        x[0] = golden_section(lambda t: _finite(f(t, x[1])), *box[0], rtol=rtol)
        x[1] = golden_section(lambda t: _finite(f(x[0], t)), *box[1], rtol=rtol)
        if all(abs(x[k] - prev[k]) <= rtol * max(abs(x[k]), 1e-300) for k in (0, 1)):
            break
    fx = _finite(f(*x))
    best = float(vals[i, j])
    if fx > best:
        x, fx = [float(axes[0][i]), float(axes[1][j])], best
    return ScanResult((x[0], x[1]), fx, np.stack(np.meshgrid(*axes, indexing="ij")), vals, best)


def make_objective(p: SystemParams, d: DriveConfig, objective: str, variable: str,
                   variant: str = "exact", delta_rule: str | None = None):
    """Objective as a function of the chosen variable(s).

    ``delta_rule="cold"`` ties the detuning to ``delta_cold(omega_m, J)``
    whenever J is varied.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if variable not in VARIABLES:
        raise ValueError(f"variable must be one of {VARIABLES}")

    def value(delta: float, J: float) -> float:
        q = replace(p, J=J)
        dd = replace(d, delta=delta)
        try:
            if objective == "s_minus":
                return float(sff(np.array([-q.omega_m]), q, dd, variant)[0])
            res = cooling_figures(q, dd, variant)
        except (NoNetDampingError, ArithmeticError, ValueError):
            return math.inf
        return res.n_eff if res.gamma_opt > 0 else math.inf

    def pick_delta(J: float) -> float:
        return delta_cold(p.omega_m, J) if delta_rule == "cold" else d.delta

    if variable == "delta":
        return lambda x: value(x, p.J)
    if variable == "J":
        return lambda x: value(pick_delta(x), x)
    return lambda x, y: value(x, y)


def optimize(p: SystemParams, d: DriveConfig, objective: str, variable: str,
             bounds, n: int = 512, variant: str = "exact", delta_rule: str | None = None,
             log: bool = False, rtol: float = 1e-8) -> ScanResult:
    f = make_objective(p, d, objective, variable, variant, delta_rule)
    if variable == "both":
        (dlo, dhi), (jlo, jhi) = bounds
        return minimize_2d(f, (dlo, jlo), (dhi, jhi), n, (False, log), rtol)
    lo, hi = bounds
    return minimize_scalar(f, lo, hi, n, log, rtol)
