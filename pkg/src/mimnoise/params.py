"""Physical parameters of the two-mode cavity and their derived scalars.

All rates live in one user-chosen frequency unit (typically multiples of
``kappa_L``).  ``omega_c`` is kept for bookkeeping only; the dynamics are
written in the frame rotating at the drive frequency.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import (
    NegativeRateError,
    NonFiniteError,
    ParameterError,
    UndrivenChannelError,
    ZeroSplittingError,
)


@dataclass(frozen=True)
class SystemParams:
    """Constants of the membrane-in-the-middle model.

    Attributes
    ----------
    omega_c : float
        Bare optical frequency (unused by the rotating-frame dynamics).
    J : float
        Tunnel coupling between the left and right modes; normal modes are
        split by ``2 J``.
    kappa_L, kappa_R : float
        Energy decay rates through the two ports.
    g : float
        Single-photon optomechanical coupling.
    omega_m : float
        Mechanical frequency.
    gamma : float
        Mechanical energy damping.
    n_th : float
        Thermal occupancy of the mechanical bath (jump simulator only).
    """

    J: float
    kappa_L: float
    kappa_R: float
    g: float = 1.0
    omega_m: float = 1.0
    gamma: float = 0.0
    n_th: float = 0.0
    omega_c: float = 0.0


@dataclass(frozen=True)
class DriveConfig:
    """Drive detuning from the ``+`` mode and complex input amplitudes."""

    delta: float
    alpha_L: complex = 1.0
    alpha_R: complex = 0.0

    @property
    def is_driven(self) -> bool:
        return abs(self.alpha_L) > 0 or abs(self.alpha_R) > 0


@dataclass(frozen=True)
class DerivedParams:
    kappa_bar: float
    delta_kappa: float
    j_tilde: complex
    delta_j: complex


@dataclass(frozen=True)
class GenericDissipation:
    """Couplings of the ``+``/``-`` normal modes to a driven and an internal channel."""

    kappa_dr_plus: float
    kappa_dr_minus: float
    kappa_int_plus: float = 0.0
    kappa_int_minus: float = 0.0

    @classmethod
    def from_two_port(cls, p: SystemParams) -> "GenericDissipation":
        """Left port as the driven channel, right port as internal loss."""
        return cls(p.kappa_L / 2, p.kappa_L / 2, p.kappa_R / 2, p.kappa_R / 2)


@dataclass(frozen=True)
class GenericDerived:
    kappa_plus: float
    kappa_minus: float
    kappa_dr: float
    kappa_int: float
    kappa_bar: float
    small_delta_kappa: float
    delta_kappa: float
    t_d: float
    t_i: float
    j_tilde: complex
    delta_j: complex


def _check_finite(obj) -> None:
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not cmath.isfinite(complex(v)):
            raise NonFiniteError(f"non-finite field {f.name}={v!r}")


def validate(p: SystemParams) -> SystemParams:
    """Return ``p`` unchanged if it is physically consistent, else raise."""
    _check_finite(p)
    if p.J <= 0:
        raise ZeroSplittingError(f"zero mode splitting: J={p.J} must be > 0")
    for name in ("kappa_L", "kappa_R", "gamma", "n_th"):
        if getattr(p, name) < 0:
            raise NegativeRateError(f"negative decay rate: {name}={getattr(p, name)}")
    if p.kappa_L + p.kappa_R <= 0:
        raise ParameterError("kappa_L + kappa_R must be > 0")
    if p.omega_m <= 0:
        raise ParameterError(f"omega_m={p.omega_m} must be > 0")
    return p


def validate_drive(d: DriveConfig) -> DriveConfig:
    _check_finite(d)
    return d


def derive(p: SystemParams) -> DerivedParams:
    validate(p)
    kbar = 0.5 * (p.kappa_L + p.kappa_R)
    dk = 0.5 * (p.kappa_L - p.kappa_R)
    jt = cmath.sqrt(p.J**2 - (dk / 2) ** 2)
    # J - Jt written without the cancellation at large J
    return DerivedParams(kbar, dk, jt, (dk / 2) ** 2 / (p.J + jt))


def validate_generic(gd: GenericDissipation) -> GenericDissipation:
    _check_finite(gd)
    for f in fields(gd):
        if getattr(gd, f.name) < 0:
            raise NegativeRateError(f"negative decay rate: {f.name}={getattr(gd, f.name)}")
    kp = gd.kappa_dr_plus + gd.kappa_int_plus
    km = gd.kappa_dr_minus + gd.kappa_int_minus
    if kp <= 0 and km <= 0:
        raise ParameterError("both normal modes are undamped")
    return gd


def derive_generic(gd: GenericDissipation, J: float) -> GenericDerived:
    """Scalars of the generic single-driven-port dissipation model.

    ``t_i`` is reported as 0 when the internal channel does not touch the
    ``+`` mode; callers only ever use it multiplied by ``sqrt(kappa_int_plus)``.
    """
    validate_generic(gd)
    if not math.isfinite(J) or J <= 0:
        raise ZeroSplittingError(f"zero mode splitting: J={J} must be > 0")
    if gd.kappa_dr_plus == 0:
        raise UndrivenChannelError("undriven + channel: kappa_dr_plus = 0")
    kp = gd.kappa_dr_plus + gd.kappa_int_plus
    km = gd.kappa_dr_minus + gd.kappa_int_minus
    kdr = gd.kappa_dr_plus + gd.kappa_dr_minus
    kint = gd.kappa_int_plus + gd.kappa_int_minus
    small_dk = 0.5 * (kp - km)
    dk = math.sqrt(gd.kappa_dr_plus * gd.kappa_dr_minus) - math.sqrt(
        gd.kappa_int_plus * gd.kappa_int_minus
    )
    t_d = math.sqrt(gd.kappa_dr_minus / gd.kappa_dr_plus)
    t_i = math.sqrt(gd.kappa_int_minus / gd.kappa_int_plus) if gd.kappa_int_plus > 0 else 0.0
    j_c = J + 0.5j * small_dk
    jt = cmath.sqrt(j_c**2 - (dk / 2) ** 2)
    return GenericDerived(
        kappa_plus=kp,
        kappa_minus=km,
        kappa_dr=kdr,
        kappa_int=kint,
        kappa_bar=0.5 * (kdr + kint),
        small_delta_kappa=small_dk,
        delta_kappa=dk,
        t_d=t_d,
        t_i=t_i,
        j_tilde=jt,
        delta_j=(dk / 2) ** 2 / (j_c + jt),
    )


# -- flat JSON records ---------------------------------------------------------

PARAM_KEYS = (
    "omega_c", "J", "kappa_L", "kappa_R", "g", "omega_m", "gamma", "n_th",
    "delta", "alpha_L_re", "alpha_L_im", "alpha_R_re", "alpha_R_im",
)
_DEFAULTS = {"gamma": 0.0, "n_th": 0.0, "omega_c": 0.0,
             "alpha_R_re": 0.0, "alpha_R_im": 0.0, "alpha_L_im": 0.0}
_REQUIRED = ("J", "kappa_L", "kappa_R", "g", "omega_m", "delta", "alpha_L_re")


def from_record(rec: dict) -> tuple[SystemParams, DriveConfig]:
    """Build params and drive from a flat record keyed by field name.

    ``delta`` may be the string ``"cold"`` to request the one-port
    cancellation detuning for the record's ``omega_m`` and ``J``.
    """
    missing = [k for k in _REQUIRED if k not in rec]
    if missing:
        raise ParameterError(f"missing keys: {', '.join(missing)}")
    r = {**_DEFAULTS, **{k: rec[k] for k in PARAM_KEYS if k in rec}}
    try:
        p = SystemParams(
            J=float(r["J"]), kappa_L=float(r["kappa_L"]), kappa_R=float(r["kappa_R"]),
            g=float(r["g"]), omega_m=float(r["omega_m"]), gamma=float(r["gamma"]),
            n_th=float(r["n_th"]), omega_c=float(r["omega_c"]),
        )
        if r["delta"] == "cold":
            h = p.omega_m / 2
            # w/2 + J - sqrt(J^2 + (w/2)^2) without cancellation at large J
            delta = h - h * h / (p.J + math.hypot(p.J, h))
        else:
            delta = float(r["delta"])
        d = DriveConfig(
            delta=delta,
            alpha_L=complex(float(r["alpha_L_re"]), float(r["alpha_L_im"])),
            alpha_R=complex(float(r["alpha_R_re"]), float(r["alpha_R_im"])),
        )
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"bad parameter value: {exc}") from exc
    return validate(p), validate_drive(d)


def to_record(p: SystemParams, d: DriveConfig) -> dict:
    rec = asdict(p)
    rec.update(
        delta=d.delta,
        alpha_L_re=complex(d.alpha_L).real, alpha_L_im=complex(d.alpha_L).imag,
        alpha_R_re=complex(d.alpha_R).real, alpha_R_im=complex(d.alpha_R).imag,
    )
    return rec


def load_record(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            rec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(rec, dict):
        raise ParameterError("config must be a flat JSON object")
    return rec
