"""Power dependence of the pure-dephasing rate extracted from a set of fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidParameterError

__all__ = ["LawFit", "DephasingScan", "dephasing_power_scan"]


@dataclass(frozen=True)
class LawFit:
    """``gamma_d = intercept + slope * x`` with ``x`` = rabi or rabi**2."""

    slope: float
    intercept: float
    slope_stderr: float
    chi2: float
    r_squared: float


@dataclass(frozen=True)
class DephasingScan:
    rabi: np.ndarray
    gamma_d: np.ndarray
    gamma_d_stderr: np.ndarray
    linear: LawFit
    quadratic: LawFit

    @property
    def preferred(self):
        """``"linear"`` or ``"quadratic"``, whichever leaves the smaller chi-square."""
        return "linear" if self.linear.chi2 <= self.quadratic.chi2 else "quadratic"


def _weighted_line(x, y, sigma):
    w = 1.0 / sigma**2
    design = np.column_stack([np.ones_like(x), x])
    a = design.T @ (design * w[:, None])
    coef = np.linalg.solve(a, design.T @ (w * y))
    cov = np.linalg.inv(a)
    resid = y - design @ coef
    chi2 = float(np.sum(w * resid**2))
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    r2 = 1.0 - chi2 / ss_tot if ss_tot > 0 else 1.0
    return LawFit(float(coef[1]), float(coef[0]), float(np.sqrt(cov[1, 1])), chi2, r2)


def dephasing_power_scan(fits, rabi=None) -> DephasingScan:
    """Regress the pure-dephasing rate against Rabi frequency and its square.

    Parameters
    ----------
    fits : sequence of FitResult
        Each with ``t1`` fixed and ``t2`` estimated. The Rabi frequency is
        taken from the fit's fixed parameters unless ``rabi`` is given.
    rabi : sequence of float, optional
        Rabi frequencies (rad/s) tagging each fit.

    Notes
    -----
    ``gamma_d = 1/t2 - 1/(2 t1)``; its error is propagated from the ``t2``
    standard error. The regression is weighted by those errors (unit
    weights when every error is zero).
    """
    fits = list(fits)
    if len(fits) < 3:
        raise InvalidParameterError("need at least three fits")
    om = np.array(rabi if rabi is not None else [f.fixed["rabi"] for f in fits], dtype=float)
    if np.unique(om).size < 3:
        raise InvalidParameterError("need at least three distinct Rabi frequencies")
    t1 = np.array([f.value("t1") for f in fits])
    t2 = np.array([f.value("t2") for f in fits])
    t2_err = np.array([f.stderr.get("t2", 0.0) for f in fits])
    gd = 1.0 / t2 - 0.5 / t1
    gd_err = t2_err / t2**2
    if np.all(gd_err == 0):
        gd_err = np.ones_like(gd)
    else:
        gd_err = np.where(gd_err > 0, gd_err, gd_err[gd_err > 0].min())
    return DephasingScan(
        rabi=om,
        gamma_d=gd,
        gamma_d_stderr=gd_err,
        linear=_weighted_line(om, gd, gd_err),
        quadratic=_weighted_line(om**2, gd, gd_err),
    )
