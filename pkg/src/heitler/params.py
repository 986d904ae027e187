"""Emitter parameters and unit conversions.

All rates and frequencies inside the package are angular (rad/s) and all
times are in seconds. Linear frequencies (Hz) appear only at the edges,
e.g. spectral grids and instrument widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InvalidParameterError

__all__ = [
    "TwoLevelParams",
    "rabi_from_power",
    "coherence_linewidth_convert",
    "natural_linewidth",
]

# relative slack on T2 <= 2 T1 so that t2 = 2 * t1 computed in floating point passes
_T2_SLACK = 1e-12


@dataclass(frozen=True)
class TwoLevelParams:
    """Driven two-level emitter.

    Parameters
    ----------
    t1 : float
        Excited-state lifetime in seconds. ``gamma = 1 / t1``.
    t2 : float
        Total dipole coherence time in seconds, ``t2 <= 2 * t1``.
    rabi : float
        Rabi frequency in rad/s.
    detuning : float
        Laser minus transition frequency in rad/s.
    """

    t1: float
    t2: float
    rabi: float
    detuning: float = 0.0

    def __post_init__(self):
        for name in ("t1", "t2", "rabi", "detuning"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
        if self.t1 <= 0:
            raise InvalidParameterError(f"t1 must be positive, got {self.t1}")
        if self.t2 <= 0:
            raise InvalidParameterError(f"t2 must be positive, got {self.t2}")
        if self.rabi < 0:
            raise InvalidParameterError(f"rabi must be non-negative, got {self.rabi}")
        if self.t2 > 2.0 * self.t1 * (1.0 + _T2_SLACK):
            raise InvalidParameterError(
                f"t2 = {self.t2:.6g} s exceeds the radiative limit 2*t1 = {2 * self.t1:.6g} s"
            )

    @classmethod
    def from_gamma_units(cls, t1, rabi_over_gamma, t2=None, detuning_over_gamma=0.0):
        """Build parameters with the drive quoted in units of ``1 / t1``."""
        t2 = 2.0 * t1 if t2 is None else t2
        return cls(t1=t1, t2=t2, rabi=rabi_over_gamma / t1, detuning=detuning_over_gamma / t1)

    @property
    def gamma(self):
        """Spontaneous emission rate ``1 / t1`` (1/s)."""
        return 1.0 / self.t1

    @property
    def pure_dephasing_rate(self):
        """``1/t2 - 1/(2 t1)``, clipped at zero against round-off."""
        return max(0.0, 1.0 / self.t2 - 0.5 / self.t1)

    @property
    def saturation(self):
        """On-resonance saturation parameter ``rabi**2 * t1 * t2``."""
        return self.rabi**2 * self.t1 * self.t2

    @property
    def is_resonant(self):
        return self.detuning == 0.0

    def replace(self, **changes):
        fields = {"t1": self.t1, "t2": self.t2, "rabi": self.rabi, "detuning": self.detuning}
        fields.update(changes)
        return TwoLevelParams(**fields)


def rabi_from_power(power_ratio, t1, t2_sat):
    """Rabi frequency (rad/s) for an excitation power ``P / P_sat``.

    Saturation is defined by ``rabi**2 * t1 * t2_sat = 1``.

    >>> t1 = 1.0
    >>> round(rabi_from_power(1.0, t1, 2 * t1) * t1 * math.sqrt(2), 12)
    1.0
    """
    if not math.isfinite(power_ratio) or power_ratio < 0:
        raise InvalidParameterError(f"power_ratio must be >= 0, got {power_ratio}")
    if t1 <= 0 or t2_sat <= 0:
        raise InvalidParameterError("t1 and t2_sat must be positive")
    return math.sqrt(power_ratio / (t1 * t2_sat))


def coherence_linewidth_convert(value, direction):
    """Convert between a coherence time and a Lorentzian FWHM.

    ``fwhm = 1 / (2 pi tau)``; the relation is its own inverse.

    Parameters
    ----------
    value : float
        Coherence time in seconds (``direction="tau_to_fwhm"``) or FWHM in Hz
        (``direction="fwhm_to_tau"``).
    direction : {"tau_to_fwhm", "fwhm_to_tau"}
    """
    if direction not in ("tau_to_fwhm", "fwhm_to_tau"):
        raise InvalidParameterError(f"unknown direction {direction!r}")
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"value must be positive, got {value}")
    return 1.0 / (2.0 * math.pi * value)


def natural_linewidth(t1):
    """Radiative FWHM in Hz, ``1 / (2 pi t1)``."""
    return coherence_linewidth_convert(t1, "tau_to_fwhm")
