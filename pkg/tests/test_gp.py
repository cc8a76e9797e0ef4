"""Gaussian-process layer: covariance assembly, exact log-likelihood,
simulation, and maximum-likelihood fitting.

Reference log-density values were computed independently with mpmath
(40 digits) and frozen here.
"""

import math

import numpy as np
import pytest

import netkernel as nk
from netkernel.errors import InvalidParamsError
from netkernel.gp import _chol_lower, default_init

from netkernel.kernels import GenCauchy, GneitingKernel, GneitingPsi


def same_spot_design(net, times, time_kind="linear"):
    p = net.point_at_vertex(net.vertex_ids[0])
    return nk.SpaceTimeDesign(network=net, points=[p] * len(times),
                              times=np.asarray(times, dtype=float),
                              time_kind=time_kind)


def unit_time_kernel():
    """G(0, 0) = 1 and G(0, c_T) = 1/2 exactly."""
    return GneitingKernel(sigma2=1.0, c_S=1.0, c_T=1.0, alpha=1.0, beta=1.0,
                          phi=GenCauchy(b_S=1.0, delta_S=1.0),
                          psi=GneitingPsi(a_T=1.0))


@pytest.fixture()
def river_design(river):
    pts = nk.sample_points(river, 8, seed=21)
    times = np.random.default_rng(3).random(8)
    return nk.SpaceTimeDesign(network=river, points=pts, times=times)


class TestDesign:
    def test_basic_properties(self, river_design):
        assert river_design.n == 8
        assert river_design.distances("geodesic").metric == "geodesic"

    def test_length_mismatch_rejected(self, path3):
        with pytest.raises(InvalidParamsError):
            nk.SpaceTimeDesign(network=path3,
                               points=[path3.point_at_vertex(0)],
                               times=[0.0, 1.0])

    def test_empty_rejected(self, path3):
        with pytest.raises(InvalidParamsError):
            nk.SpaceTimeDesign(network=path3, points=[], times=[])

    def test_nonfinite_time_rejected(self, path3):
        with pytest.raises(InvalidParamsError):
            nk.SpaceTimeDesign(network=path3,
                               points=[path3.point_at_vertex(0)],
                               times=[float("nan")])

    def test_circular_time_range_enforced(self, path3):
        p = [path3.point_at_vertex(0)]
        with pytest.raises(InvalidParamsError):
            nk.SpaceTimeDesign(network=path3, points=p,
                               times=[2 * np.pi], time_kind="circular")
        ok = nk.SpaceTimeDesign(network=path3, points=p, times=[3.0],
                                time_kind="circular")
        assert ok.time_kind == "circular"

    def test_unknown_time_kind_rejected(self, path3):
        with pytest.raises(InvalidParamsError):
            nk.SpaceTimeDesign(network=path3,
                               points=[path3.point_at_vertex(0)],
                               times=[0.0], time_kind="weekly")


class TestCovarianceMatrix:
    def test_single_point_with_nugget(self, path3):
        design = same_spot_design(path3, [0.0])
        cov = nk.covariance_matrix(design, nk.model_T(0.9, 100.0, 0.2),
                                   nugget=0.1)
        assert cov.shape == (1, 1)
        assert cov[0, 0] == pytest.approx(1.0, rel=1e-15)

    def test_zero_nugget_is_plain_gram(self, river_design):
        spec = nk.model_T(0.9, 100.0, 0.2)
        cov = nk.covariance_matrix(river_design, spec)
        dm = river_design.distances("geodesic")
        want = nk.gram(spec, dm, river_design.times)
        assert np.array_equal(cov, want)

    def test_entrywise_against_kernel(self, path3):
        pts = [path3.point_at_vertex(i) for i in (0, 1, 2)]
        times = np.array([0.0, 0.5, 2.0])
        design = nk.SpaceTimeDesign(network=path3, points=pts, times=times)
        spec = nk.model_T(0.9, 4.0, 0.5)
        cov = nk.covariance_matrix(design, spec, nugget=0.25)
        d = nk.geodesic_matrix(path3, pts).values
        for i in range(3):
            for j in range(3):
                want = spec.evaluate(d[i, j], abs(times[i] - times[j]))
                if i == j:
                    want += 0.25
                assert cov[i, j] == pytest.approx(want, rel=1e-15)

    def test_time_kind_mismatch_rejected(self, path3):
        design = same_spot_design(path3, [0.0, 1.0])
        circ = nk.CircularKernel(sigma2=1.0, c_S=1.0,
                                 family=nk.Poisson(lam=1.0),
                                 phi=nk.Matern(nu=0.5))
        with pytest.raises(InvalidParamsError):
            nk.covariance_matrix(design, circ)

    def test_negative_nugget_rejected(self, path3):
        design = same_spot_design(path3, [0.0])
        with pytest.raises(InvalidParamsError):
            nk.covariance_matrix(design, nk.model_T(0.9, 100.0, 0.2),
                                 nugget=-0.1)

    def test_cholesky_round_trip(self, river_design):
        cov = nk.covariance_matrix(river_design,
                                   nk.model_T(0.9, 100.0, 0.2), nugget=0.1)
        low = _chol_lower(cov)
        err = np.linalg.norm(low @ low.T - cov) / np.linalg.norm(cov)
        assert err <= 1e-10


class TestLoglik:
    def test_two_by_two_reference(self, path3):
        # covariance [[1.1, 0.5], [0.5, 1.1]], y = (1, -1)
        design = same_spot_design(path3, [0.0, 1.0])
        got = nk.loglik(design, unit_time_kernel(), 0.1,
                        np.array([1.0, -1.0]))
        assert got == pytest.approx(-3.4841327358158846, rel=1e-12)

    def test_single_point_standard_normal(self, path3):
        design = same_spot_design(path3, [0.0])
        spec = nk.model_T(1.0, 1.0, 1.0)  # G(0,0) = 1
        assert nk.loglik(design, spec, 0.0, np.array([0.0])) == \
            pytest.approx(-0.91893853320467274, rel=1e-14)
        assert nk.loglik(design, spec, 0.0, np.array([1.0])) == \
            pytest.approx(-1.4189385332046727, rel=1e-14)

    def test_matches_direct_formula(self, river_design):
        spec = nk.model_C2(0.9, 100.0, 0.2)
        y = np.random.default_rng(11).standard_normal(river_design.n)
        got = nk.loglik(river_design, spec, 0.1, y)
        cov = nk.covariance_matrix(river_design, spec, 0.1)
        sign, logdet = np.linalg.slogdet(cov)
        want = -0.5 * (river_design.n * math.log(2 * math.pi) + logdet
                       + y @ np.linalg.solve(cov, y))
        assert sign == 1.0
        assert got == pytest.approx(want, rel=1e-12)

    def test_permutation_invariant(self, river):
        pts = nk.sample_points(river, 6, seed=13)
        times = np.random.default_rng(5).random(6)
        y = np.random.default_rng(6).standard_normal(6)
        spec = nk.model_T(0.9, 100.0, 0.2)
        base = nk.loglik(nk.SpaceTimeDesign(river, pts, times), spec, 0.1, y)
        perm = [4, 2, 0, 5, 1, 3]
        shuffled = nk.loglik(
            nk.SpaceTimeDesign(river, [pts[i] for i in perm], times[perm]),
            spec, 0.1, y[perm])
        assert shuffled == pytest.approx(base, rel=1e-10)

    def test_shape_checked(self, path3):
        design = same_spot_design(path3, [0.0, 1.0])
        with pytest.raises(InvalidParamsError):
            nk.loglik(design, unit_time_kernel(), 0.1, np.zeros(3))


class TestSimulate:
    def test_rows_depend_only_on_seed_and_index(self, river_design):
        sim = nk.SimSpec(kernel=nk.model_T(0.9, 100.0, 0.2), nugget=0.1,
                         seed=77)
        three = nk.simulate(river_design, sim, n_reps=3)
        five = nk.simulate(river_design, sim, n_reps=5)
        assert three.shape == (3, river_design.n)
        assert np.array_equal(five[:3], three)

    def test_different_seeds_differ(self, river_design):
        a = nk.simulate(river_design,
                        nk.SimSpec(nk.model_T(0.9, 100.0, 0.2), 0.1, 1), 2)
        b = nk.simulate(river_design,
                        nk.SimSpec(nk.model_T(0.9, 100.0, 0.2), 0.1, 2), 2)
        assert not np.allclose(a, b)

    def test_empirical_covariance(self, river):
        pts = nk.sample_points(river, 5, seed=31)
        times = np.random.default_rng(8).random(5)
        design = nk.SpaceTimeDesign(network=river, points=pts, times=times)
        spec = nk.model_T(0.9, 100.0, 0.2)
        cov = nk.covariance_matrix(design, spec, nugget=0.1)
        draws = nk.simulate(design, nk.SimSpec(spec, 0.1, seed=123),
                            n_reps=10_000)
        emp = draws.T @ draws / draws.shape[0]
        tol = 0.05 * float(np.max(np.diag(cov)))
        assert np.max(np.abs(emp - cov)) <= tol
        ratios = np.diag(emp) / np.diag(cov)
        assert np.all(ratios > 0.95) and np.all(ratios < 1.05)

    def test_bad_rep_count_rejected(self, river_design):
        sim = nk.SimSpec(nk.model_T(0.9, 100.0, 0.2), 0.1, 0)
        with pytest.raises(InvalidParamsError):
            nk.simulate(river_design, sim, n_reps=0)

    def test_negative_nugget_rejected(self):
        with pytest.raises(InvalidParamsError):
            nk.SimSpec(nk.model_T(0.9, 100.0, 0.2), -0.1, 0)


class TestFit:
    def test_default_init_values(self, river_design):
        y = np.zeros(river_design.n)
        sigma2, c_s, c_t = default_init(river_design, y, nugget=0.1)
        assert sigma2 == pytest.approx(1e-4)  # floor for flat data
        assert c_s == pytest.approx(nk.network_diameter(
            river_design.network) / 4.0)
        assert c_t > 0

    def test_improves_on_start(self, river):
        pts = nk.sample_points(river, 12, seed=41)
        times = np.random.default_rng(42).random(12)
        design = nk.SpaceTimeDesign(network=river, points=pts, times=times)
        truth = nk.model_T(0.9, nk.network_diameter(river) / 3.0, 0.2)
        y = nk.simulate(design, nk.SimSpec(truth, 0.1, seed=9), 1)[0]
        init = (0.5, nk.network_diameter(river) / 8.0, 0.5)
        res = nk.fit(design, "T", y, nugget=0.1, init=init, n_starts=1)
        start_ll = nk.loglik(design, nk.model_T(*init), 0.1, y)
        assert res.loglik >= start_ll - 1e-9
        truth_ll = nk.loglik(design, truth, 0.1, y)
        assert res.loglik >= truth_ll - 1e-6

    def test_flat_data_hits_sigma2_floor(self, river):
        pts = nk.sample_points(river, 6, seed=51)
        design = nk.SpaceTimeDesign(network=river, points=pts,
                                    times=np.linspace(0, 1, 6))
        res = nk.fit(design, "T", np.zeros(6), nugget=0.1, n_starts=1)
        assert res.converged
        assert res.sigma2 == pytest.approx(1e-6, rel=1e-6)

    def test_callable_family(self, river):
        pts = nk.sample_points(river, 6, seed=52)
        design = nk.SpaceTimeDesign(network=river, points=pts,
                                    times=np.linspace(0, 1, 6))
        y = np.random.default_rng(2).standard_normal(6)
        res = nk.fit(design, nk.model_C2, y, nugget=0.1, n_starts=1,
                     max_iter=300)
        assert isinstance(res, nk.FitResult)
        assert res.estimates == (res.sigma2, res.c_S, res.c_T)

    def test_deterministic(self, river):
        pts = nk.sample_points(river, 6, seed=53)
        design = nk.SpaceTimeDesign(network=river, points=pts,
                                    times=np.linspace(0, 1, 6))
        y = np.random.default_rng(4).standard_normal(6)
        a = nk.fit(design, "T", y, nugget=0.1)
        b = nk.fit(design, "T", y, nugget=0.1)
        assert a == b

    def test_unknown_family_rejected(self, river_design):
        with pytest.raises(InvalidParamsError):
            nk.fit(river_design, "T3", np.zeros(river_design.n))

    def test_bad_init_rejected(self, river_design):
        with pytest.raises(InvalidParamsError):
            nk.fit(river_design, "T", np.zeros(river_design.n),
                   init=(1.0, -1.0, 1.0))
