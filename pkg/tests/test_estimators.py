import doctest

import numpy as np
import pytest
from sklearn.base import clone

from heitler.exceptions import InvalidParameterError
from heitler.fitting import G2Fitter, SBRFitter, SpectrumFitter, VisibilityFitter, estimators
from heitler.instrument import InstrumentResponse

from conftest import MHZ, NS, T1


def test_module_doctest():
    result = doctest.testmod(estimators)
    assert result.attempted > 0 and result.failed == 0


def test_params_roundtrip_and_clone():
    est = G2Fitter(t1=T1, rabi=0.6 / T1, t2=1.2 * NS, scale=10.0)
    params = est.get_params()
    assert params["t1"] == T1 and params["free"] == ("t2", "scale")
    est.set_params(t2=1.0 * NS, offset=2.0)
    copy = clone(est)
    assert copy.get_params() == est.get_params()
    assert not hasattr(copy, "result_")


def test_predict_before_fit_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        G2Fitter(t1=T1, rabi=0.6 / T1).predict(np.linspace(0, 1e-9, 5))


def test_g2_fit_predict_and_score():
    tau = np.linspace(-6 * T1, 6 * T1, 97)
    y = G2Fitter(t1=T1, rabi=0.6 / T1, t2=1.3 * NS, scale=900.0).model_at(tau)
    est = G2Fitter(t1=T1, rabi=0.6 / T1).fit(tau, y)
    assert est.estimates_["t2"] == pytest.approx(1.3 * NS, rel=1e-4)
    assert np.allclose(est.predict(tau), y, rtol=1e-5)
    assert est.score(tau.reshape(-1, 1), y) > 0.999999


def test_g2_fit_with_gaussian_timing():
    tau = np.linspace(-8 * T1, 8 * T1, 129)
    irf = InstrumentResponse.gaussian(0.4 * NS)
    y = G2Fitter(t1=T1, rabi=0.6 / T1, t2=1.3 * NS, scale=900.0, irf=irf).model_at(tau)
    est = G2Fitter(t1=T1, rabi=0.6 / T1, irf=irf).fit(tau, y)
    assert est.estimates_["t2"] == pytest.approx(1.3 * NS, rel=1e-3)


def test_spectrum_fitter_default_starts():
    x = np.linspace(-400 * MHZ, 400 * MHZ, 321)
    kw = dict(t1=T1, rabi=0.6 / T1, laser_linewidth=2 * np.pi * 3 * MHZ, cavity_fwhm=29 * MHZ)
    y = SpectrumFitter(**kw, t2=1.25 * NS, scale=2e4).model_at(x)
    est = SpectrumFitter(**kw).fit(x, y)
    assert est.estimates_["t2"] == pytest.approx(1.25 * NS, rel=1e-4)
    assert est.estimates_["scale"] == pytest.approx(2e4, rel=1e-4)


def test_visibility_fitter_recovers_coherence_time():
    d = np.linspace(0, 150 * NS, 61)
    truth = VisibilityFitter(t1=T1, rabi=0.22 / T1, laser_tau=53 * NS, t2=2 * T1, scale=0.97, coherent_tau=22 * NS)
    est = VisibilityFitter(t1=T1, rabi=0.22 / T1, laser_tau=53 * NS, scale=0.9).fit(d, truth.model_at(d))
    assert est.estimates_["coherent_tau"] == pytest.approx(22 * NS, rel=1e-4)
    assert est.estimates_["scale"] == pytest.approx(0.97, rel=1e-4)


def test_sbr_fitter():
    p = np.geomspace(1e-3, 100, 40)
    y = SBRFitter(t1=T1, t2=2 * T1, scale=0.01, leakage_per_power=200.0, dark_rate=990.0).model_at(p)
    est = SBRFitter(t1=T1, t2=2 * T1, scale=0.01, leakage_per_power=50.0, dark_rate=50.0).fit(p, y, sigma=0.01 * y)
    assert est.estimates_["leakage_per_power"] == pytest.approx(200.0, rel=1e-4)
    assert est.estimates_["dark_rate"] == pytest.approx(990.0, rel=1e-4)


def test_bootstrap_is_seeded():
    tau = np.linspace(-6 * T1, 6 * T1, 97)
    y = np.random.default_rng(0).poisson(G2Fitter(t1=T1, rabi=0.6 / T1, t2=1.3 * NS, scale=900.0).model_at(tau))
    a = G2Fitter(t1=T1, rabi=0.6 / T1, bootstrap=10, random_state=5).fit(tau, y)
    b = G2Fitter(t1=T1, rabi=0.6 / T1, bootstrap=10, random_state=5).fit(tau, y)
    assert a.result_.bootstrap_stderr == b.result_.bootstrap_stderr


def test_invalid_inputs():
    tau = np.linspace(0, 5 * T1, 20)
    with pytest.raises(InvalidParameterError):
        G2Fitter(t1=T1, rabi=1e9, free=("t2", "bogus")).fit(tau, np.ones_like(tau))
    with pytest.raises(InvalidParameterError):
        G2Fitter(t1=T1, rabi=None, free=("t2", "scale")).fit(tau, np.ones_like(tau))
    with pytest.raises(ValueError):
        G2Fitter(t1=T1, rabi=1e9).fit(tau, np.ones(tau.size + 1))
