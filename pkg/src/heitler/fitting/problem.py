"""Weighted nonlinear least squares for spectra, correlations and SBR curves.

Lifetime and Rabi frequency are normally held fixed while the coherence
time ``t2`` and an overall scale float, as in the usual analysis of
resonance-fluorescence data. Every model is the physics pipeline of
:mod:`heitler.closed_form` and :mod:`heitler.instrument` evaluated on the
data grid.

Optimizer: bounded trust-region least squares (``scipy.optimize.least_squares``,
``method="trf"``) on parameters scaled by their starting magnitude, stopping
on a relative step below 1e-8 or a relative cost change below 1e-10, with a
budget of 500 function evaluations. If that start does not converge, a
small grid of bound-spanning starts is tried and the best result kept.
Standard errors come from the Jacobian at the optimum.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..closed_form import g2_closed, spectrum_total
from ..exceptions import InvalidParameterError
from ..instrument import (
    BackgroundModel,
    InstrumentResponse,
    convolve_lorentzian,
    irf_convolve_correlation,
    michelson_visibility,
    sbr_curves,
)
from ..params import TwoLevelParams

__all__ = [
    "MODEL_PARAMETERS",
    "FreeParameter",
    "FitProblem",
    "FitResult",
    "evaluate_model",
    "fit",
    "default_sigma",
]

MODEL_PARAMETERS = {
    # x: cavity detuning (Hz); y: counts/s
    "fp_spectrum": ("t1", "rabi", "t2", "scale", "laser_linewidth", "cavity_fwhm", "center", "offset"),
    # x: delay (s); y: coincidences
    "g2_curve": ("t1", "rabi", "t2", "scale", "offset"),
    # x: delay (s); y: fringe visibility
    "visibility_curve": ("t1", "rabi", "t2", "scale", "coherent_tau", "laser_tau"),
    # x: P / P_sat; y: signal-to-background ratio
    "sbr_curve": ("t1", "t2", "scale", "leakage_per_power", "dark_rate"),
}

COUNT_MODELS = ("fp_spectrum", "g2_curve")

XTOL = 1e-8
FTOL = 1e-10
MAX_EVALUATIONS = 500


@dataclass(frozen=True)
class FreeParameter:
    init: float
    lower: float = -np.inf
    upper: float = np.inf

    def __post_init__(self):
        if not self.lower <= self.init <= self.upper:
            raise InvalidParameterError(
                f"initial value {self.init} outside bounds [{self.lower}, {self.upper}]"
            )


@dataclass
class FitProblem:
    """Model choice, data and the split into fixed and free parameters.

    ``free`` maps names to :class:`FreeParameter` (tuples ``(init, lower,
    upper)`` are accepted). ``sigma`` defaults to Poisson errors for count
    models and unit weights otherwise.
    """

    model: str
    x: np.ndarray
    y: np.ndarray
    fixed: dict
    free: dict
    sigma: np.ndarray | None = None
    irf: InstrumentResponse | None = None

    def __post_init__(self):
        if self.model not in MODEL_PARAMETERS:
            raise InvalidParameterError(f"unknown model {self.model!r}")
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.x.shape != self.y.shape:
            raise InvalidParameterError("x and y differ in length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise InvalidParameterError("data contain non-finite values")
        free = {}
        for name, spec in self.free.items():
            free[name] = spec if isinstance(spec, FreeParameter) else FreeParameter(*spec)
        self.free = free
        self.fixed = {k: float(v) for k, v in self.fixed.items()}
        overlap = set(self.free) & set(self.fixed)
        if overlap:
            raise InvalidParameterError(f"parameters both free and fixed: {sorted(overlap)}")
        names = set(MODEL_PARAMETERS[self.model])
        assigned = set(self.free) | set(self.fixed)
        if assigned != names:
            missing = sorted(names - assigned)
            extra = sorted(assigned - names)
            raise InvalidParameterError(f"{self.model}: missing {missing}, unknown {extra}")
        if self.model == "sbr_curve" and {"scale", "leakage_per_power", "dark_rate"} <= set(self.free):
            # the ratio is invariant under a common rescaling of all three
            raise InvalidParameterError("sbr_curve: fix one of scale, leakage_per_power, dark_rate")
        if "t2" in self.free:
            if "t1" not in self.fixed:
                raise InvalidParameterError("t1 must be fixed when t2 is free")
            limit = 2.0 * self.fixed["t1"]
            spec = self.free["t2"]
            if spec.upper > limit:
                self.free["t2"] = FreeParameter(min(spec.init, limit), spec.lower, limit)
        if self.sigma is not None:
            self.sigma = np.asarray(self.sigma, dtype=float).ravel()
            if self.sigma.shape != self.y.shape or np.any(self.sigma <= 0):
                raise InvalidParameterError("sigma must be positive and match y")
        if self.y.size < 2 * len(self.free):
            raise InvalidParameterError("need at least twice as many data points as free parameters")

    @property
    def free_names(self):
        return tuple(n for n in MODEL_PARAMETERS[self.model] if n in self.free)

    def weights_sigma(self):
        if self.sigma is not None:
            return self.sigma
        return default_sigma(self.model, self.y)

    def digest(self):
        h = hashlib.sha256()
        h.update(self.model.encode())
        for arr in (self.x, self.y, self.weights_sigma()):
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        h.update(json.dumps(self.fixed, sort_keys=True).encode())
        h.update(json.dumps({k: [v.init, v.lower, v.upper] for k, v in self.free.items()}, sort_keys=True).encode())
        return h.hexdigest()


def default_sigma(model, y):
    """Poisson ``sqrt(counts)`` (floored at 1) for count data, ones otherwise."""
    if model in COUNT_MODELS:
        return np.sqrt(np.maximum(y, 1.0))
    return np.ones_like(y)


@dataclass
class FitResult:
    estimates: dict
    stderr: dict
    residual_norm: float
    iterations: int
    converged: bool
    chi2: float = math.nan
    dof: int = 0
    message: str = ""
    fixed: dict = field(default_factory=dict)
    model: str = ""
    digest: str = ""
    covariance: np.ndarray | None = field(default=None, repr=False)
    bootstrap_stderr: dict | None = None

    @property
    def reduced_chi2(self):
        return self.chi2 / self.dof if self.dof > 0 else math.nan

    def value(self, name):
        if name in self.estimates:
            return self.estimates[name]
        return self.fixed[name]

    def to_dict(self):
        out = {
            "model": self.model,
            "estimates": dict(self.estimates),
            "stderr": dict(self.stderr),
            "fixed": dict(self.fixed),
            "residual_norm": self.residual_norm,
            "chi2": self.chi2,
            "dof": self.dof,
            "iterations": self.iterations,
            "converged": self.converged,
            "message": self.message,
            "input_digest": self.digest,
        }
        if self.bootstrap_stderr is not None:
            out["bootstrap_stderr"] = dict(self.bootstrap_stderr)
        return out


def _emitter(p):
    return TwoLevelParams(t1=p["t1"], t2=p["t2"], rabi=p.get("rabi", 0.0))


def _fp_spectrum(x, p, _irf):
    params = _emitter(p)
    nu = np.asarray(x, dtype=float) - p["center"]
    order = np.argsort(nu, kind="stable")
    grid = nu[order]
    # spectrum traces need a strictly increasing grid; evaluate on the unique values
    uniq, inverse = np.unique(grid, return_inverse=True)
    if uniq.size == 1:
        uniq = np.array([uniq[0], uniq[0] + 1.0])
    spec = convolve_lorentzian(spectrum_total(params, p["laser_linewidth"], uniq), p["cavity_fwhm"])
    emission = spec.coherent_lines.area + spec.incoherent_lines.area
    shape = spec.total[inverse] / emission * (0.5 * np.pi * p["cavity_fwhm"])
    out = np.empty_like(nu)
    out[order] = shape
    return p["scale"] * out + p["offset"]


def _g2_curve(x, p, irf):
    params = _emitter(p)
    tau = np.abs(np.asarray(x, dtype=float))
    if irf is None or irf.kind == "delta":
        g = g2_closed(params, tau).values
    else:
        if irf.kind == "tabulated":
            spacing = min(params.t1 / 50.0, np.min(np.diff(irf.grid)))
            support = max(abs(irf.grid[0]), abs(irf.grid[-1]))
        else:
            spacing = min(params.t1 / 50.0, irf.fwhm / 20.0)
            support = 6.0 * irf.fwhm
        span = max(tau.max(), 1.1 * support, 10 * params.t1) + 2.0 * support
        fine = np.arange(0.0, span + spacing, spacing)
        view = irf_convolve_correlation(g2_closed(params, fine), irf)
        g = np.interp(np.asarray(x, dtype=float), view.delays, view.values)
    return p["scale"] * g + p["offset"]


def _visibility_curve(x, p, _irf):
    params = _emitter(p)
    scale = p["scale"]
    if not 0 < scale <= 1:
        raise InvalidParameterError("visibility scale must lie in (0, 1]")
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    uniq, inverse = np.unique(x[order], return_inverse=True)
    v = michelson_visibility(params, p["laser_tau"], p["coherent_tau"], scale, uniq).values
    out = np.empty_like(x)
    out[order] = v[inverse]
    return out


def _sbr_curve(x, p, _irf):
    params = TwoLevelParams(t1=p["t1"], t2=p["t2"], rabi=0.0)
    bg = BackgroundModel(p["leakage_per_power"], p["dark_rate"], p["scale"])
    return sbr_curves(x, params, bg).sbr


_MODELS = {
    "fp_spectrum": _fp_spectrum,
    "g2_curve": _g2_curve,
    "visibility_curve": _visibility_curve,
    "sbr_curve": _sbr_curve,
}


def evaluate_model(problem: FitProblem, params=None, x=None):
    """Model prediction on the data grid (or ``x``) for a complete parameter map.

    ``params`` may list only the free parameters; fixed values fill the rest.
    Unphysical values (e.g. ``t2 > 2 t1``) raise before any evaluation.
    """
    full = dict(problem.fixed)
    if params is None:
        params = {k: v.init for k, v in problem.free.items()}
    full.update(params)
    missing = set(MODEL_PARAMETERS[problem.model]) - set(full)
    if missing:
        raise InvalidParameterError(f"parameter map incomplete, missing {sorted(missing)}")
    if "t2" in full and full["t2"] > 2.0 * full["t1"] * (1 + 1e-12):
        raise InvalidParameterError("t2 exceeds 2*t1")
    grid = problem.x if x is None else np.asarray(x, dtype=float)
    return _MODELS[problem.model](grid, full, problem.irf)


def _scales(problem):
    scales = []
    for name in problem.free_names:
        spec = problem.free[name]
        s = abs(spec.init)
        if s == 0:
            width = spec.upper - spec.lower
            s = width if np.isfinite(width) and width > 0 else 1.0
        scales.append(s)
    return np.array(scales)


def _solve(problem, theta0, scales, sigma):
    names = problem.free_names
    lower = np.array([problem.free[n].lower for n in names]) / scales
    upper = np.array([problem.free[n].upper for n in names]) / scales
    theta0 = np.clip(theta0, lower, upper)

    def residuals(theta):
        pmap = dict(zip(names, theta * scales))
        try:
            model = evaluate_model(problem, pmap)
        except InvalidParameterError:
            return np.full(problem.y.size, 1e150)
        return (model - problem.y) / sigma

    return optimize.least_squares(
        residuals,
        theta0,
        bounds=(lower, upper),
        method="trf",
        xtol=XTOL,
        ftol=FTOL,
        gtol=1e-12,
        max_nfev=MAX_EVALUATIONS,
        x_scale=1.0,
    )


def _starts(problem, scales):
    """Bound-spanning multi-start grid in scaled coordinates."""
    per_param = []
    for name, s in zip(problem.free_names, scales):
        spec = problem.free[name]
        if np.isfinite(spec.lower) and np.isfinite(spec.upper):
            pts = spec.lower + (spec.upper - spec.lower) * np.array([0.1, 0.5, 0.9])
        else:
            pts = spec.init * np.array([0.5, 1.0, 2.0]) if spec.init else np.array([-1.0, 0.0, 1.0])
            pts = np.clip(pts, spec.lower, spec.upper)
        per_param.append(pts / s)
    combos = list(itertools.product(*per_param))
    if len(combos) > 27:
        rng = np.random.default_rng(0)
        combos = [combos[i] for i in rng.choice(len(combos), 27, replace=False)]
    return [np.array(c) for c in combos]


def fit(problem: FitProblem, multistart=True, bootstrap=0, seed=None) -> FitResult:
    """Minimize the weighted squared residuals of ``problem``.

    Parameters
    ----------
    problem : FitProblem
    multistart : bool
        Retry from bound-spanning starts when the first start fails.
    bootstrap : int
        Number of parametric (Poisson or Gaussian) resamples used for an
        additional ``bootstrap_stderr``; 0 disables.
    seed : int, optional
        Seed for the bootstrap resamples.

    Returns
    -------
    FitResult
        ``converged`` is False with the best-so-far estimates when the budget
        runs out.
    """
    sigma = problem.weights_sigma()
    scales = _scales(problem)
    names = problem.free_names
    theta0 = np.array([problem.free[n].init for n in names]) / scales
    best = _solve(problem, theta0, scales, sigma)
    total_nfev = best.nfev
    if not best.success and multistart:
        for start in _starts(problem, scales):
            trial = _solve(problem, start, scales, sigma)
            total_nfev += trial.nfev
            if trial.cost < best.cost or (trial.success and not best.success and trial.cost <= best.cost * (1 + 1e-9)):
                best = trial
    estimates = {n: float(v) for n, v in zip(names, best.x * scales)}
    resid = best.fun
    chi2 = float(resid @ resid)
    dof = problem.y.size - len(names)
    cov = _covariance(best.jac, scales)
    absolute = problem.sigma is not None or problem.model in COUNT_MODELS
    if not absolute and dof > 0:
        cov = cov * (chi2 / dof)
    stderr = {n: float(math.sqrt(max(cov[i, i], 0.0))) for i, n in enumerate(names)}
    result = FitResult(
        estimates=estimates,
        stderr=stderr,
        residual_norm=float(math.sqrt(chi2)),
        iterations=int(total_nfev),
        converged=bool(best.success),
        chi2=chi2,
        dof=dof,
        message=str(best.message),
        fixed=dict(problem.fixed),
        model=problem.model,
        digest=problem.digest(),
        covariance=cov,
    )
    if bootstrap:
        result.bootstrap_stderr = _bootstrap(problem, result, bootstrap, seed)
    return result


def _covariance(jac, scales):
    jac = np.asarray(jac)
    cov_theta = np.linalg.pinv(jac.T @ jac)
    return cov_theta * np.outer(scales, scales)


def _bootstrap(problem, result, n, seed):
    rng = np.random.default_rng(seed)
    model = evaluate_model(problem, result.estimates)
    sigma = problem.weights_sigma()
    draws = {k: [] for k in result.estimates}
    for _ in range(n):
        if problem.model in COUNT_MODELS and problem.sigma is None:
            y = rng.poisson(np.clip(model, 0, None)).astype(float)
            s = None
        else:
            y = model + rng.normal(0.0, sigma)
            s = problem.sigma
        free = {k: FreeParameter(result.estimates[k], v.lower, v.upper) for k, v in problem.free.items()}
        sub = FitProblem(problem.model, problem.x, y, problem.fixed, free, s, problem.irf)
        r = fit(sub, multistart=False)
        for k, v in r.estimates.items():
            draws[k].append(v)
    return {k: float(np.std(v, ddof=1)) for k, v in draws.items()}
