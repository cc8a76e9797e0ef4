"""Scikit-learn facade over the maximum-likelihood fitter."""

import numpy as np
import pytest
from sklearn.base import clone

import netkernel as nk
from netkernel.errors import InvalidParamsError


@pytest.fixture(scope="module")
def design_and_y():
    net = nk.generate("river_tree", {"depth": 3}, seed=5)
    pts = nk.sample_points(net, 8, seed=1)
    times = np.random.default_rng(2).random(8)
    design = nk.SpaceTimeDesign(network=net, points=pts, times=times)
    truth = nk.model_T(0.9, nk.network_diameter(net) / 3.0, 0.2)
    y = nk.simulate(design, nk.SimSpec(truth, 0.1, seed=3), 1)[0]
    return design, y


class TestEstimator:
    def test_get_set_params(self):
        est = nk.NetworkKernelRegressor(model="C2", nugget=0.05)
        params = est.get_params()
        assert params["model"] == "C2" and params["nugget"] == 0.05
        est.set_params(n_starts=1)
        assert est.n_starts == 1

    def test_clone(self):
        est = nk.NetworkKernelRegressor(model="C2", max_iter=500)
        copy = clone(est)
        assert copy.get_params() == est.get_params()

    def test_fit_sets_attributes(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor(n_starts=1).fit(design, y)
        assert est.sigma2_ > 0 and est.c_s_ > 0 and est.c_t_ > 0
        assert np.isfinite(est.loglik_)
        assert isinstance(est.converged_, bool)
        assert est.n_iter_ >= 1
        assert est.result_.estimates == (est.sigma2_, est.c_s_, est.c_t_)

    def test_matches_functional_fit(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor(n_starts=1).fit(design, y)
        direct = nk.fit(design, "T", y, nugget=0.1, n_starts=1)
        assert est.result_ == direct

    def test_score_is_loglik_at_fit(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor(n_starts=1).fit(design, y)
        assert est.score(design, y) == pytest.approx(est.loglik_, rel=1e-12)

    def test_kernel_reconstruction(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor(n_starts=1).fit(design, y)
        k = est.kernel_()
        assert k.sigma2 == est.sigma2_ and k.c_S == est.c_s_
        assert k.metric == "geodesic"

    def test_callable_model(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor(model=nk.model_C2, n_starts=1,
                                        max_iter=300)
        est.fit(design, y)
        assert est.kernel_().phi == nk.model_C2(1.0, 1.0, 1.0).phi

    def test_unfitted_errors(self, design_and_y):
        design, y = design_and_y
        est = nk.NetworkKernelRegressor()
        with pytest.raises(InvalidParamsError):
            est.score(design, y)
        with pytest.raises(InvalidParamsError):
            est.kernel_()

    def test_rejects_plain_arrays(self):
        est = nk.NetworkKernelRegressor()
        with pytest.raises(InvalidParamsError):
            est.fit(np.zeros((4, 2)), np.zeros(4))
