"""Angle-of-arrival superposition simulator for radar target stimulators."""

from ._core import (
    AoasimError,
    AttenuationSet,
    Scenario,
    calibrate,
    estimate,
    predict_peak,
    run_grid,
    solve,
    synthesize,
    wavelength,
)

__all__ = [
    "AoasimError",
    "AttenuationSet",
    "Scenario",
    "calibrate",
    "estimate",
    "predict_peak",
    "run_grid",
    "solve",
    "synthesize",
    "wavelength",
]
