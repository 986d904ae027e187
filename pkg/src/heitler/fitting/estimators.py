"""scikit-learn style wrappers around :func:`heitler.fitting.fit`.

Each estimator takes the fixed physics as constructor arguments, learns
the free parameters in ``fit(X, y)`` and evaluates the fitted model in
``predict(X)``. ``X`` is the measurement axis (a 1-D array or a single
column) in SI units: Hz for spectra, seconds for correlations, ``P/P_sat``
for power sweeps.

>>> import numpy as np
>>> from heitler.fitting import G2Fitter
>>> t1 = 760e-12
>>> tau = np.linspace(0, 8 * t1, 60)
>>> truth = G2Fitter(t1=t1, rabi=0.6 / t1, t2=1.4e-9, scale=500.0)
>>> y = truth.model_at(tau)
>>> est = G2Fitter(t1=t1, rabi=0.6 / t1, t2=1.0e-9, scale=400.0).fit(tau, y)
>>> round(est.estimates_["t2"] * 1e9, 6)
1.4
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_grid, check_sigma, check_targets
from ..exceptions import InvalidParameterError
from .problem import MODEL_PARAMETERS, FitProblem, FreeParameter, evaluate_model, fit

__all__ = ["SpectrumFitter", "G2Fitter", "VisibilityFitter", "SBRFitter"]


class _CurveFitter(RegressorMixin, BaseEstimator):
    """Shared machinery; subclasses set ``_model`` and ``_bounds``."""

    _model = None

    def _parameter_values(self):
        return {name: getattr(self, name) for name in MODEL_PARAMETERS[self._model]}

    def _bounds(self, name, value):
        return 0.0, np.inf

    def _initial(self, name, X, y):
        value = getattr(self, name)
        if value is None:
            raise InvalidParameterError(f"{name} needs a starting value")
        return float(value)

    def _problem(self, X, y, sigma=None):
        free = {}
        fixed = {}
        for name in MODEL_PARAMETERS[self._model]:
            if name in self.free:
                init = self._initial(name, X, y)
                lo, hi = self._bounds(name, init)
                free[name] = FreeParameter(min(max(init, lo), hi), lo, hi)
            else:
                value = getattr(self, name)
                if value is None:
                    raise InvalidParameterError(f"fixed parameter {name} has no value")
                fixed[name] = float(value)
        unknown = set(self.free) - set(MODEL_PARAMETERS[self._model])
        if unknown:
            raise InvalidParameterError(f"cannot free unknown parameters {sorted(unknown)}")
        return FitProblem(self._model, X, y, fixed, free, sigma, getattr(self, "irf", None))

    def fit(self, X, y, sigma=None):
        """Estimate the free parameters.

        Parameters
        ----------
        X : array_like, shape (n,) or (n, 1)
        y : array_like, shape (n,)
        sigma : array_like, optional
            Per-point standard deviations. Defaults to Poisson errors for
            count data and unit weights otherwise.
        """
        X = check_grid(X)
        y = check_targets(y, X.size)
        sigma = check_sigma(sigma, X.size)
        problem = self._problem(X, y, sigma)
        self.result_ = fit(problem, bootstrap=self.bootstrap, seed=self.random_state)
        self.estimates_ = dict(self.result_.estimates)
        self.stderr_ = dict(self.result_.stderr)
        self.params_ = {**problem.fixed, **self.estimates_}
        self.n_features_in_ = 1
        return self

    def _evaluate(self, X, values):
        X = check_grid(X)
        problem = FitProblem.__new__(FitProblem)
        problem.model = self._model
        problem.fixed = values
        problem.free = {}
        problem.irf = getattr(self, "irf", None)
        return evaluate_model(problem, {}, X)

    def predict(self, X):
        check_is_fitted(self, "result_")
        return self._evaluate(X, self.params_)

    def model_at(self, X):
        """Evaluate the model at the constructor values (no fitting)."""
        return self._evaluate(X, {k: float(v) for k, v in self._parameter_values().items()})


class SpectrumFitter(_CurveFitter):
    """Scanning Fabry-Perot spectrum: counts versus cavity detuning (Hz).

    ``scale`` is the detected emission rate behind the cavity (counts per
    bin when the cavity transmits everything); ``offset`` the flat background.
    """

    _model = "fp_spectrum"

    def __init__(self, t1, rabi, laser_linewidth, cavity_fwhm, t2=None, scale=None,
                 center=0.0, offset=0.0, free=("t2", "scale"), bootstrap=0, random_state=None):
        self.t1 = t1
        self.rabi = rabi
        self.laser_linewidth = laser_linewidth
        self.cavity_fwhm = cavity_fwhm
        self.t2 = t2
        self.scale = scale
        self.center = center
        self.offset = offset
        self.free = free
        self.bootstrap = bootstrap
        self.random_state = random_state

    def _initial(self, name, X, y):
        if name == "t2" and self.t2 is None:
            return 2.0 * self.t1
        if name == "scale" and self.scale is None:
            return float(np.trapezoid(np.clip(y - self.offset, 0, None), X)) / (0.5 * np.pi * self.cavity_fwhm)
        return super()._initial(name, X, y)

    def _bounds(self, name, value):
        if name == "t2":
            return 0.02 * self.t1, 2.0 * self.t1
        if name in ("center", "offset"):
            return -np.inf, np.inf
        return 0.0, np.inf


class G2Fitter(_CurveFitter):
    """Intensity correlation histogram: coincidences versus delay (s)."""

    _model = "g2_curve"

    def __init__(self, t1, rabi, t2=None, scale=None, offset=0.0, irf=None,
                 free=("t2", "scale"), bootstrap=0, random_state=None):
        self.t1 = t1
        self.rabi = rabi
        self.t2 = t2
        self.scale = scale
        self.offset = offset
        self.irf = irf
        self.free = free
        self.bootstrap = bootstrap
        self.random_state = random_state

    def _initial(self, name, X, y):
        if name == "t2" and self.t2 is None:
            return 2.0 * self.t1
        if name == "scale" and self.scale is None:
            far = np.abs(X) > 5.0 * self.t1
            return float(np.median(y[far] if far.any() else y))
        return super()._initial(name, X, y)

    def _bounds(self, name, value):
        if name == "t2":
            return 0.02 * self.t1, 2.0 * self.t1
        if name == "offset":
            return -np.inf, np.inf
        return 0.0, np.inf


class VisibilityFitter(_CurveFitter):
    """Michelson fringe visibility versus delay (s).

    ``scale`` is the setup visibility; ``coherent_tau`` the coherence time of
    the elastic component, bounded by ``laser_tau``.
    """

    _model = "visibility_curve"

    def __init__(self, t1, rabi, laser_tau, t2=None, scale=1.0, coherent_tau=None,
                 free=("t2", "scale", "coherent_tau"), bootstrap=0, random_state=None):
        self.t1 = t1
        self.rabi = rabi
        self.laser_tau = laser_tau
        self.t2 = t2
        self.scale = scale
        self.coherent_tau = coherent_tau
        self.free = free
        self.bootstrap = bootstrap
        self.random_state = random_state

    def _initial(self, name, X, y):
        if name == "t2" and self.t2 is None:
            return 2.0 * self.t1
        if name == "coherent_tau" and self.coherent_tau is None:
            return 0.5 * self.laser_tau
        return super()._initial(name, X, y)

    def _bounds(self, name, value):
        if name == "t2":
            return 0.02 * self.t1, 2.0 * self.t1
        if name == "scale":
            return 1e-6, 1.0
        if name == "coherent_tau":
            return 1e-3 * self.laser_tau, self.laser_tau
        return 0.0, np.inf


class SBRFitter(_CurveFitter):
    """Signal-to-background ratio versus ``P / P_sat``.

    ``scale`` is the collection efficiency; leakage and dark rate are in
    counts/s. The ratio is unchanged when all three are multiplied by the
    same factor, so the efficiency is held fixed by default.
    """

    _model = "sbr_curve"

    def __init__(self, t1, t2, scale, leakage_per_power=None, dark_rate=None,
                 free=("leakage_per_power", "dark_rate"), bootstrap=0, random_state=None):
        self.t1 = t1
        self.t2 = t2
        self.scale = scale
        self.leakage_per_power = leakage_per_power
        self.dark_rate = dark_rate
        self.free = free
        self.bootstrap = bootstrap
        self.random_state = random_state

    def _bounds(self, name, value):
        if name == "scale":
            return 0.0, 1.0
        return 0.0, np.inf
