"""Parameter estimation for resonance-fluorescence data."""

from .dephasing import DephasingScan, LawFit, dephasing_power_scan
from .estimators import G2Fitter, SBRFitter, SpectrumFitter, VisibilityFitter
from .lineshape import LorentzianFit, TripletFit, fit_lorentzian, fit_mollow_triplet
from .problem import (
    MODEL_PARAMETERS,
    FitProblem,
    FitResult,
    FreeParameter,
    default_sigma,
    evaluate_model,
    fit,
)

__all__ = [
    "MODEL_PARAMETERS",
    "FitProblem",
    "FitResult",
    "FreeParameter",
    "default_sigma",
    "evaluate_model",
    "fit",
    "dephasing_power_scan",
    "DephasingScan",
    "LawFit",
    "fit_mollow_triplet",
    "TripletFit",
    "fit_lorentzian",
    "LorentzianFit",
    "SpectrumFitter",
    "G2Fitter",
    "VisibilityFitter",
    "SBRFitter",
]
