"""Resonance fluorescence of a driven two-level emitter near the Heitler regime.

Closed-form spectra and correlation functions, an optical-Bloch oracle,
instrument models, Monte Carlo photon streams and least-squares fitting.
"""

from .bloch import (
    BlochVector,
    correlators_oracle,
    field_correlation_oracle,
    g2_oracle,
    spectrum_oracle,
    steady_state,
    wiener_khinchin_spectrum,
)
from .closed_form import (
    MollowCoefficients,
    coherent_fraction,
    coherent_fraction_report,
    g1_incoherent_closed,
    g2_bin_averaged,
    g2_closed,
    mollow_coefficients,
    spectrum_incoherent_closed,
    spectrum_total,
)
from .exceptions import (
    ConfigError,
    HeitlerError,
    IntegrationError,
    InvalidParameterError,
    NoEmissionError,
    ResolutionError,
    UnsupportedConfigurationError,
)
from .params import TwoLevelParams, coherence_linewidth_convert, natural_linewidth, rabi_from_power
from .traces import CorrelationTrace, PoleSum, SpectrumTrace

__version__ = "0.1.0"

__all__ = [
    "TwoLevelParams",
    "rabi_from_power",
    "coherence_linewidth_convert",
    "natural_linewidth",
    "BlochVector",
    "steady_state",
    "field_correlation_oracle",
    "g2_oracle",
    "correlators_oracle",
    "spectrum_oracle",
    "wiener_khinchin_spectrum",
    "MollowCoefficients",
    "mollow_coefficients",
    "coherent_fraction",
    "coherent_fraction_report",
    "spectrum_incoherent_closed",
    "spectrum_total",
    "g1_incoherent_closed",
    "g2_closed",
    "g2_bin_averaged",
    "SpectrumTrace",
    "CorrelationTrace",
    "PoleSum",
    "HeitlerError",
    "InvalidParameterError",
    "UnsupportedConfigurationError",
    "NoEmissionError",
    "ResolutionError",
    "IntegrationError",
    "ConfigError",
]
