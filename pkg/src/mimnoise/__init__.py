"""Backaction noise, cooling and QND figures for a two-mode optomechanical cavity."""

from .backaction import (
    CoolingResult,
    QndBudget,
    cooling_figures,
    cooling_small_kr,
    delta_cold,
    qnd_ratio,
    simulate_jumps,
    tau_ba,
    tau_meas,
)
from .noise import (
    NoiseAmplitudes,
    amplitudes_exact,
    amplitudes_generic,
    amplitudes_large_j,
    sff,
    spectrum_series,
)
from .params import DriveConfig, GenericDissipation, SystemParams, derive, derive_generic, validate
from .steady_state import solve_steady_state

__version__ = "0.1.0"
