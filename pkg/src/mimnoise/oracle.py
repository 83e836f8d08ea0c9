"""Independent backends used to certify the closed-form amplitudes.

``freq_solve`` inverts the linear Langevin system frequency by frequency and
linearizes ``F = g(a+^dag a- + a-^dag a+)`` around the mean field; it shares
no algebra with the two-pole formulas in :mod:`mimnoise.noise`.  ``simulate``
integrates the same equations in time with classical complex white noise and
``estimate_transfer`` recovers the amplitudes from the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, signal

from .errors import InsufficientRecordError, TimestepTooLargeError, UndrivenModeError
from .noise import NoiseAmplitudes
from .params import DriveConfig, GenericDissipation, SystemParams, validate, validate_generic

# Welch variance inflation for a Hann window at 50% overlap
_HANN_OVERLAP_CORR = 0.167


@dataclass(frozen=True)
class LinearSystem:
    """``da/dt = drift @ a + input_map @ (alpha + xi)`` in ``(+, -)`` ordering.

    For the two-port cavity ``alpha``/``xi`` are indexed by port ``(L, R)``;
    for generic dissipation by channel ``(dr, int)``.
    """

    drift: np.ndarray
    input_map: np.ndarray
    drive: np.ndarray
    g: float

    @classmethod
    def two_port(cls, p: SystemParams, d: DriveConfig) -> "LinearSystem":
        validate(p)
        kl, kr, J, dl = p.kappa_L, p.kappa_R, p.J, d.delta
        # damping -(kL a_L^2 + kR a_R^2)/2 rotated into the +/- basis
        kb, dk = (kl + kr) / 2, (kl - kr) / 2
        drift = np.array(
            [[-(kb / 2 - 1j * dl), -dk / 2], [-dk / 2, -(kb / 2 + 1j * (2 * J - dl))]]
        )
        rl, rr = math.sqrt(kl / 2), math.sqrt(kr / 2)
        imap = np.array([[rl, rr], [rl, -rr]], dtype=complex)
        return cls(drift, imap, np.array([d.alpha_L, d.alpha_R], dtype=complex), p.g)

    @classmethod
    def generic(cls, gd: GenericDissipation, J: float, d: DriveConfig, g: float) -> "LinearSystem":
        validate_generic(gd)
        kp = gd.kappa_dr_plus + gd.kappa_int_plus
        km = gd.kappa_dr_minus + gd.kappa_int_minus
        dk = math.sqrt(gd.kappa_dr_plus * gd.kappa_dr_minus) - math.sqrt(
            gd.kappa_int_plus * gd.kappa_int_minus
        )
        drift = np.array(
            [[-(kp / 2 - 1j * d.delta), -dk / 2], [-dk / 2, -(km / 2 + 1j * (2 * J - d.delta))]]
        )
        imap = np.array(
            [
                [math.sqrt(gd.kappa_dr_plus), math.sqrt(gd.kappa_int_plus)],
                [math.sqrt(gd.kappa_dr_minus), -math.sqrt(gd.kappa_int_minus)],
            ],
            dtype=complex,
        )
        return cls(drift, imap, np.array([d.alpha_L, 0.0], dtype=complex), g)

    def mean_field(self) -> np.ndarray:
        a = np.linalg.solve(self.drift, -self.input_map @ self.drive)
        if a[0] == 0:
            raise UndrivenModeError("undriven symmetric mode")
        return a

    def susceptibility(self, omega) -> np.ndarray:
        """(-i omega - M)^-1 @ input_map, shape (..., 2, 2)."""
        w = np.asarray(omega, dtype=float)
        lhs = -1j * w[..., None, None] * np.eye(2) - self.drift
        return np.linalg.solve(lhs, np.broadcast_to(self.input_map, lhs.shape))

    def force_coefficients(self) -> np.ndarray:
        """Weights of (da+, da-) in the xi-part of the linearized force, in the real-<a+> gauge."""
        a = self.mean_field()
        phase = a[0] / abs(a[0])
        return self.g * np.array([np.conj(a[1]), np.conj(a[0])]) * phase


def _amplitudes(sys: LinearSystem, omega, variant: str, channels) -> NoiseAmplitudes:
    w = np.asarray(omega, dtype=float)
    chi_b = sys.susceptibility(w)
    c = sys.force_coefficients()
    amps = np.einsum("m,...mj->...j", c, chi_b)
    return NoiseAmplitudes(amps[..., 0], amps[..., 1], variant, w, channels)


def freq_solve(omega, p: SystemParams, d: DriveConfig) -> NoiseAmplitudes:
    """Amplitudes by direct inversion of the two-port Langevin equations."""
    return _amplitudes(LinearSystem.two_port(p, d), omega, "oracle", ("L", "R"))


def freq_solve_generic(omega, gd: GenericDissipation, J: float, d: DriveConfig, g: float = 1.0):
    if d.alpha_R != 0:
        raise ValueError("generic dissipation has one driven port; alpha_R must be 0")
    return _amplitudes(LinearSystem.generic(gd, J, d, g), omega, "oracle", ("dr", "int"))


# -- time domain ---------------------------------------------------------------


@dataclass
class TrajectoryBundle:
    dt: float
    samples: dict
    seed: int | None
    mean_field: np.ndarray
    gauge_phase: complex
    method: str

    @property
    def duration(self) -> float:
        return self.dt * len(self.samples["f_opt"])


def max_rate(p: SystemParams, d: DriveConfig) -> float:
    return max(0.5 * (p.kappa_L + p.kappa_R), 2 * p.J, abs(d.delta))


def simulate(
    p: SystemParams,
    d: DriveConfig,
    dt: float,
    n_steps: int,
    seed: int | None = 0,
    method: str = "exact",
    noise: bool = True,
    start: str = "steady",
) -> TrajectoryBundle:
    """Integrate the driven Langevin equations with complex white noise.

    Parameters
    ----------
    method : {"exact", "euler"}
        ``"exact"`` steps the linear system with its matrix exponential,
        holding each noise sample constant over its step; ``"euler"`` is
        plain Euler-Maruyama.
    start : {"steady", "vacuum"}
        Initial mode amplitudes: the mean field or zero.

    Notes
    -----
    Noise samples have ``E|xi_k|^2 = 1/dt`` so that ``xi_k dt`` is a Wiener
    increment of unit two-sided flux.  ``f_opt`` is the force linearized
    about the mean field, ``2 g Re(<a+>* da- + <a->* da+)``.
    """
    limit = 0.1 / max_rate(p, d)
    if not dt < limit:
        raise TimestepTooLargeError(f"timestep too large: dt={dt} must be < {limit:.3g}")
    sys = LinearSystem.two_port(p, d)
    abar = sys.mean_field()
    rng = np.random.default_rng(seed)
    if noise:
        xi = (rng.standard_normal((n_steps, 2)) + 1j * rng.standard_normal((n_steps, 2))) / math.sqrt(2 * dt)
    else:
        xi = np.zeros((n_steps, 2), dtype=complex)

    M, B = sys.drift, sys.input_map
    if method == "exact":
        phi = linalg.expm(M * dt)
        psi = np.linalg.solve(M, (phi - np.eye(2)) @ B)
        forcing = xi @ psi.T
        step_mat, offset = phi, abar - phi @ abar
    elif method == "euler":
        forcing = xi @ (B * dt).T
        step_mat = np.eye(2) + M * dt
        offset = (B @ sys.drive) * dt
    else:
        raise ValueError(f"unknown method {method!r}")

    a = np.empty((n_steps, 2), dtype=complex)
    cur = abar.copy() if start == "steady" else np.zeros(2, dtype=complex)
    m00, m01, m10, m11 = (complex(v) for v in step_mat.ravel())
    o0, o1 = complex(offset[0]), complex(offset[1])
    x0, x1 = complex(cur[0]), complex(cur[1])
    f0, f1 = forcing[:, 0].tolist(), forcing[:, 1].tolist()
    out0, out1 = [0j] * n_steps, [0j] * n_steps
    for k in range(n_steps):
        out0[k], out1[k] = x0, x1
        x0, x1 = m00 * x0 + m01 * x1 + o0 + f0[k], m10 * x0 + m11 * x1 + o1 + f1[k]
    a[:, 0], a[:, 1] = out0, out1
    bound = 1e8 * (np.abs(abar).max() + 1.0)
    if not np.all(np.isfinite(a)) or np.abs(a).max() > bound:
        raise TimestepTooLargeError("timestep too large: trajectory diverged")

    da = a - abar
    f_opt = 2 * p.g * np.real(np.conj(abar[0]) * da[:, 1] + np.conj(abar[1]) * da[:, 0])
    samples = {
        "a_plus": a[:, 0], "a_minus": a[:, 1],
        "xi_L": xi[:, 0], "xi_R": xi[:, 1], "f_opt": f_opt,
    }
    return TrajectoryBundle(dt, samples, seed, abar, abar[0] / abs(abar[0]), method)


@dataclass
class TransferEstimate:
    omega: np.ndarray
    a_hat: np.ndarray  # (2, n_bins), ports L, R
    sigma: np.ndarray  # (2, n_bins), std of the complex error
    n_segments: int

    @property
    def sff(self) -> np.ndarray:
        return np.sum(np.abs(self.a_hat) ** 2, axis=0)


def welch_transfer(x_in, y_out, dt: float, n_segments: int = 32):
    """H1 transfer estimate ``y/x`` with per-bin standard error.

    Uses a Hann window with 50% overlap.  Frequencies are returned as angular
    frequencies in the ``exp(+i omega t)`` convention, ascending.
    """
    x_in, y_out = np.asarray(x_in), np.asarray(y_out)
    n = x_in.size
    nperseg = int(2 * n // (n_segments + 1))
    if nperseg < 8:
        raise InsufficientRecordError("record too short for the requested segment count")
    kw = dict(fs=1.0 / dt, window="hann", nperseg=nperseg, noverlap=nperseg // 2,
              detrend=False, return_onesided=False, scaling="density")
    f, pxy = signal.csd(x_in, y_out, **kw)
    _, pxx = signal.csd(x_in, x_in, **kw)
    _, pyy = signal.csd(y_out, y_out, **kw)
    pxx, pyy = pxx.real, pyy.real
    h = pxy / pxx
    k = (n - nperseg) // (nperseg - nperseg // 2) + 1
    n_eff = k / (1 + 2 * _HANN_OVERLAP_CORR**2)
    resid = np.clip(pyy - np.abs(pxy) ** 2 / pxx, 0.0, None)
    sigma = np.sqrt(resid / (pxx * n_eff))
    omega = -2 * np.pi * f
    order = np.argsort(omega)
    return omega[order], h[order], sigma[order], k


def estimate_transfer(bundle: TrajectoryBundle, kappa_bar: float | None = None,
                      n_segments: int = 32) -> TransferEstimate:
    """Recover A_L, A_R from a simulated record.

    The cross-spectrum of the force against each injected noise, divided by
    the noise auto-spectrum, gives the amplitude directly; the conjugate-noise
    terms are uncorrelated with ``xi`` and only add variance.
    """
    if kappa_bar is not None and bundle.duration < 50 / kappa_bar:
        raise InsufficientRecordError(
            f"record length {bundle.duration:.3g} < 50/kappa_bar = {50 / kappa_bar:.3g}"
        )
    s = bundle.samples
    est, sig = [], []
    for key in ("xi_L", "xi_R"):
        w, h, sg, k = welch_transfer(s[key], s["f_opt"], bundle.dt, n_segments)
        # noise sample k drives the state over [t_k, t_k + dt]: half-step delay
        est.append(h * np.exp(-0.5j * w * bundle.dt) * bundle.gauge_phase)
        sig.append(sg)
    return TransferEstimate(w, np.array(est), np.array(sig), k)
