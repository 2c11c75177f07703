import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bivariate_shared_exponential, random_model
from renewcov import (
    DimensionError,
    GaussianApprox,
    ModelError,
    ModelSpec,
    NotPositiveDefiniteError,
    cycle_moments,
    expected_min_bivariate,
    pd_threshold,
    summarize,
)
from renewcov.gaussian import is_positive_definite

T0_EXACT = (math.sqrt(731.0) - 3.0) / 38.0


@pytest.fixture(scope="module")
def benchmark_approx():
    return GaussianApprox.from_summary(
        summarize(cycle_moments(bivariate_shared_exponential()))
    )


class TestParamsAt:
    def test_refined_covariance_at_one(self, benchmark_approx):
        mean, cov = benchmark_approx.params_at(1.0)
        assert mean.tolist() == [0.0, -0.125]
        assert cov.tolist() == [[1.5, 0.875], [0.875, 41.0 / 64.0]]

    def test_plain_clt_toggles(self, benchmark_approx):
        mean, cov = benchmark_approx.params_at(3.0, use_b=False, use_d=False)
        assert mean.tolist() == [3.0, 2.25]
        assert cov.tolist() == [[3.0, 1.125], [1.125, 3 * 0.4375]]

    def test_below_threshold_raises_with_t0(self, benchmark_approx):
        with pytest.raises(NotPositiveDefiniteError) as err:
            benchmark_approx.params_at(0.5, use_d=True)
        assert err.value.t0 == pytest.approx(T0_EXACT, abs=1e-6)

    def test_no_offset_works_below_threshold(self, benchmark_approx):
        _, cov = benchmark_approx.params_at(0.5, use_d=False)
        assert cov[0, 0] == 0.5

    def test_negative_time_rejected(self, benchmark_approx):
        with pytest.raises(ValueError):
            benchmark_approx.params_at(-1.0)


class TestPdThreshold:
    def test_benchmark_bisection_matches_closed_form(self, benchmark_approx):
        # independently derived root of det(C t + D) = (38 t^2 + 6 t - 19)/128
        assert benchmark_approx.t0 == pytest.approx(T0_EXACT, abs=1e-8)
        assert not benchmark_approx.always_pd

    def test_pd_offset_means_always_valid(self):
        assert pd_threshold(np.eye(2), np.eye(2)) == 0.0

    def test_eigenvalue_crossing(self):
        t0 = pd_threshold(np.eye(2), np.diag([-1.0, 0.0]))
        assert t0 == pytest.approx(1.0, abs=1e-9)

    def test_rejects_non_pd_rate(self):
        with pytest.raises(ModelError):
            pd_threshold(np.array([[1.0, 1.0], [1.0, 1.0]]), np.eye(2))

    def test_rejects_asymmetric(self):
        with pytest.raises(ModelError):
            pd_threshold(np.array([[1.0, 0.5], [0.0, 1.0]]), np.eye(2))

    def test_threshold_brackets_pd_transition(self, benchmark_approx):
        C, D = benchmark_approx.cov_rate, benchmark_approx.cov_offset
        t0 = benchmark_approx.t0
        assert is_positive_definite(C * (t0 + 1e-6) + D)
        assert not is_positive_definite(C * (t0 - 1e-6) + D)

    @pytest.mark.parametrize("seed", range(100))
    def test_monotone_pd_structure(self, seed):
        # predicate false up to t0, true beyond, on randomized (C PD, D sym)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        a = rng.normal(size=(n, n))
        C = a @ a.T + 0.05 * np.eye(n)
        b = rng.normal(size=(n, n))
        D = (b + b.T) / 2 - 0.5 * np.eye(n) * rng.uniform(0, 2)
        t0 = pd_threshold(C, D)
        for t in np.linspace(0.0, t0 - 1e-6, 4):
            if t0 > 1e-6:
                assert not is_positive_definite(C * t + D)
        for t in np.linspace(t0 + 1e-6, t0 + 10.0, 5):
            assert is_positive_definite(C * t + D)


class TestExpectedMinBivariate:
    def test_degenerate_identical(self):
        assert expected_min_bivariate(1.5, 1.5, 2.0, 2.0, 2.0) == 1.5

    def test_independent_standard_normals(self):
        assert expected_min_bivariate(0, 0, 1, 1, 0) == pytest.approx(
            -1.0 / math.sqrt(math.pi), abs=1e-9
        )

    def test_separated_means(self):
        assert expected_min_bivariate(-10.0, 10.0, 1.0, 1.0, 0.0) == pytest.approx(
            -10.0, abs=1e-8
        )

    def test_invalid_variance(self):
        with pytest.raises(ValueError):
            expected_min_bivariate(0, 0, -1.0, 1.0, 0.0)

    def test_covariance_bound(self):
        with pytest.raises(ValueError):
            expected_min_bivariate(0, 0, 1.0, 1.0, 1.5)

    @given(
        st.floats(-50, 50),
        st.floats(-50, 50),
        st.floats(0, 10),
        st.floats(0, 10),
        st.floats(-1, 1),
    )
    @settings(max_examples=300)
    def test_swap_symmetry(self, mw, mv, vw, vv, rho):
        cov = rho * math.sqrt(vw * vv)
        a = expected_min_bivariate(mw, mv, vw, vv, cov)
        b = expected_min_bivariate(mv, mw, vv, vw, cov)
        assert a == pytest.approx(b, abs=1e-14 * max(1.0, abs(mw), abs(mv)))

    @given(
        st.floats(-5, 5),
        st.floats(-5, 5),
        st.floats(0.1, 10),
        st.floats(0.1, 10),
        st.floats(-0.99, 0.99),
    )
    @settings(max_examples=300)
    def test_below_min_of_means(self, mw, mv, vw, vv, rho):
        cov = rho * math.sqrt(vw * vv)
        value = expected_min_bivariate(mw, mv, vw, vv, cov)
        assert value <= min(mw, mv) + 1e-12
        # strict when the difference W - V is genuinely random and the means
        # are close enough for the overlap to matter
        theta = math.sqrt(vw + vv - 2 * cov)
        if theta > 0.1 and abs(mw - mv) < 3 * theta:
            assert value < min(mw, mv)

    @pytest.mark.parametrize("seed", range(20))
    def test_monte_carlo_agreement(self, seed):
        rng = np.random.default_rng(3000 + seed)
        mw, mv = rng.uniform(-5, 5, 2)
        vw, vv = rng.uniform(0.1, 4.0, 2)
        rho = rng.uniform(-0.95, 0.95)
        cov = rho * math.sqrt(vw * vv)
        n = 1_000_000
        z = rng.multivariate_normal([mw, mv], [[vw, cov], [cov, vv]], size=n)
        mins = z.min(axis=1)
        se = mins.std(ddof=1) / math.sqrt(n)
        assert expected_min_bivariate(mw, mv, vw, vv, cov) == pytest.approx(
            mins.mean(), abs=4 * se
        )


class TestExpectedMinOfApprox:
    def test_identical_coordinates_reduce_to_mean(self):
        base = bivariate_shared_exponential()
        spec = ModelSpec(
            components=base.components,
            time=base.time,
            rewards=(base.rewards[0], base.rewards[0]),
            reward_names=("x", "x2"),
            delay=base.delay,
        )
        g = GaussianApprox.from_summary(summarize(cycle_moments(spec)))
        assert g.t0 is None  # degenerate rate matrix: no threshold
        t = 7.0
        want = g.mean_rate[0] * t + g.mean_offset[0]
        assert g.expected_min(t) == pytest.approx(want, rel=1e-12)
        assert g.expected_min(t, use_d=False) == pytest.approx(want, rel=1e-12)

    def test_dimension_guard(self):
        spec = random_model(3, L=3)
        g = GaussianApprox.from_summary(summarize(cycle_moments(spec)))
        with pytest.raises(DimensionError):
            g.expected_min(5.0)

    def test_growth_dominates_large_t(self, benchmark_approx):
        # with both refinements off, m(t)/t approaches the smaller growth rate
        t = 1e6
        value = benchmark_approx.expected_min(t, use_b=False, use_d=False)
        assert value / t == pytest.approx(min(benchmark_approx.mean_rate), rel=1e-2)
