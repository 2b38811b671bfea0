import math

import numpy as np
import pytest

from gvswap import (
    Family,
    ParameterError,
    SingularConfigurationError,
    SubordinatorSpec,
    expected_cov_approx,
    expected_cov_matrix,
    expected_cov_series,
    expected_var_leg,
    sqrt_series_coefficients,
)
from gvswap.covariance import _product_mean_and_variance

from .conftest import make_params
from .oracles import exact_sqrt_binomial


def deterministic_entry(params, i, j):
    """gamma_ij sigma_i0 sigma_j0 (1 - e^(-lam T)) / (lam T) for zero drivers."""
    lam, T = params.lam, params.horizon
    g = 1.0 if i == j else float(params.gamma[i, j])
    s = math.sqrt(params.assets[i].sigma0_sq * params.assets[j].sigma0_sq)
    return g * s * (1.0 - math.exp(-lam * T)) / (lam * T)


class TestSeriesCoefficients:
    def test_first_values(self):
        c = sqrt_series_coefficients(4)
        assert np.allclose(c, [1.0, 0.5, -0.125, 0.0625, -0.0390625])

    def test_exact_binomials_through_order_ten(self):
        c = sqrt_series_coefficients(10)
        for k in range(11):
            assert c[k] == float(exact_sqrt_binomial(k))


class TestVarianceLegs:
    def test_zero_drivers_closed_form(self, zero_params):
        for i in range(3):
            value, diag = expected_var_leg(i, zero_params)
            assert value == pytest.approx(deterministic_entry(zero_params, i, i), abs=1e-10)
            assert diag["jump_term"] == 0.0

    def test_zero_initial_variance_zero_driver(self):
        params = make_params(spec=SubordinatorSpec(Family.ZERO), sigma0_sq=[0.0, 0.0, 0.0])
        for i in range(3):
            value, _ = expected_var_leg(i, params)
            assert value == 0.0

    def test_closed_form_gamma(self, base_params):
        # (1/T) int E[sigma^2] dt has an elementary antiderivative
        p = base_params
        lam, T = p.lam, p.horizon
        for i in range(3):
            s0 = p.assets[i].sigma0_sq
            k1 = p.asset_cumulant_sequence(i, 1)[0]
            decay_integral = (1.0 - math.exp(-lam * T)) / lam
            want = (s0 * decay_integral + k1 * (T - decay_integral)) / T
            want += p.assets[i].rho ** 2 * p.lam * p.triple.z1.cumulant(2)
            got, _ = expected_var_leg(i, p)
            assert got == pytest.approx(want, rel=1e-10)

    def test_jump_conventions(self, base_params):
        cons, _ = expected_var_leg(0, base_params, jump_convention="consistent")
        printed, _ = expected_var_leg(0, base_params, jump_convention="printed")
        jump = base_params.assets[0].rho ** 2 * base_params.lam * base_params.triple.z1.cumulant(2)
        assert cons - printed == pytest.approx(jump * (1 - 1 / base_params.horizon), rel=1e-9)

    def test_bad_index(self, base_params):
        with pytest.raises(ParameterError):
            expected_var_leg(3, base_params)


class TestDegenerateClosedForms:
    @pytest.mark.parametrize("pair", [(0, 1), (1, 2), (2, 0)])
    def test_series_reduces_to_deterministic(self, zero_params, pair):
        value, _ = expected_cov_series(pair, zero_params)
        assert value == pytest.approx(deterministic_entry(zero_params, *pair), abs=1e-10)

    @pytest.mark.parametrize("pair", [(0, 1), (1, 2), (2, 0)])
    def test_approx_reduces_to_deterministic(self, zero_params, pair):
        value, _ = expected_cov_approx(pair, zero_params)
        assert value == pytest.approx(deterministic_entry(zero_params, *pair), abs=1e-10)

    def test_routes_equal_in_deterministic_limit(self, zero_params):
        for pair in [(0, 1), (1, 2), (2, 0)]:
            s, _ = expected_cov_series(pair, zero_params)
            a, _ = expected_cov_approx(pair, zero_params)
            assert s == pytest.approx(a, abs=1e-12)


class TestSeriesRoute:
    def test_cross_route_agreement(self, base_params):
        for pair in [(0, 1), (1, 2), (2, 0)]:
            s, ds = expected_cov_series(pair, base_params)
            a, da = expected_cov_approx(pair, base_params)
            tol = max(0.02 * abs(a), 2 * (ds["quad_error"] + da["quad_error"]))
            assert abs(s - a) <= tol

    def test_symmetry_in_pair_order(self, base_params):
        for i, j in [(0, 1), (1, 2), (2, 0)]:
            v1, _ = expected_cov_series((i, j), base_params)
            v2, _ = expected_cov_series((j, i), base_params)
            assert v1 == v2

    def test_no_correlation_no_leverage_vanishes(self):
        params = make_params(gamma=np.eye(3))
        for pair in [(0, 1), (1, 2), (2, 0)]:
            value, _ = expected_cov_series(pair, params)
            assert value == 0.0
            value, _ = expected_cov_approx(pair, params)
            assert value == 0.0

    def test_monotone_in_brownian_correlation(self, base_params):
        values = []
        for g in (-0.5, 0.0, 0.5):
            gamma = np.eye(3)
            gamma[0, 1] = gamma[1, 0] = g
            params = make_params(rho=tuple(a.rho for a in base_params.assets), gamma=gamma)
            v, _ = expected_cov_series((0, 1), params)
            values.append(v)
        assert values[0] < values[1] < values[2]

    def test_tail_diagnostic_small_at_default_order(self, base_params):
        _, diag = expected_cov_series((0, 1), base_params)
        assert diag["series_tail"] < 1e-6

    def test_printed_normalization_differs(self, base_params):
        v_cons, _ = expected_cov_series((0, 1), base_params, normalization="consistent")
        v_printed, _ = expected_cov_series((0, 1), base_params, normalization="printed")
        assert v_cons != v_printed

    def test_fixed_center_matches_adaptive(self, base_params):
        for pair in [(0, 1), (2, 0)]:
            v_a, _ = expected_cov_series(pair, base_params, center="adaptive")
            v_f, _ = expected_cov_series(pair, base_params, center="fixed")
            assert v_f == pytest.approx(v_a, rel=1e-3)

    def test_fixed_center_argument_within_unit_ball(self, base_params):
        _, diag = expected_cov_series((0, 1), base_params, center="fixed")
        assert abs(diag["argument_t0"]) < 1.0

    def test_singular_configuration_pair12(self):
        params = make_params(r2=0.0)
        with pytest.raises(SingularConfigurationError):
            expected_cov_series((1, 2), params)
        ok_pairs = [(0, 1), (2, 0)]
        for pair in ok_pairs:  # the two-leg pairs stay well defined at r2 = 0
            expected_cov_series(pair, params)

    def test_unknown_options_rejected(self, base_params):
        with pytest.raises(ParameterError):
            expected_cov_series((0, 1), base_params, normalization="bogus")
        with pytest.raises(ParameterError):
            expected_cov_series((0, 1), base_params, center="bogus")


class TestEngineEquivalence:
    """The stable multinomial regrouping must equal the factorized leg-product
    sums wherever the latter are well conditioned."""

    def test_two_leg_pairs_match_leg_products(self, base_params):
        import math as _math

        from gvswap import series_leg_product
        from gvswap.covariance import _PairSeriesEngine

        p_max = 4
        for pair, r in (((0, 1), base_params.triple.r2), ((2, 0), base_params.triple.r3)):
            engine = _PairSeriesEngine(base_params, pair, p_max, False)
            s = _math.sqrt(1 - r * r)
            for t in (0.5, 2.0, 10.0):
                M = engine.product_moments(t)
                lam = base_params.lam
                for p in range(p_max + 1):
                    total = sum(
                        _math.comb(p, u)
                        * r**u
                        * s ** (p - u)
                        * series_leg_product(base_params, pair, p, u, t)
                        for u in range(p + 1)
                    )
                    scaled = total * _math.exp(-2 * p * lam * t)
                    assert scaled == pytest.approx(M[p], rel=1e-9)

    def test_three_leg_pair_matches_leg_products(self, base_params):
        import math as _math

        from gvswap import series_leg_product_12
        from gvswap.covariance import _PairSeriesEngine

        tr = base_params.triple
        ratio = tr.r3 / tr.r2
        s2 = _math.sqrt(1 - tr.r2**2)
        s3 = _math.sqrt(1 - tr.r3**2)
        p_max = 3
        engine = _PairSeriesEngine(base_params, (1, 2), p_max, False)
        lam = base_params.lam
        for t in (0.5, 2.0):
            M = engine.product_moments(t)
            for p in range(p_max + 1):
                total = 0.0
                for u in range(p + 1):
                    for v in range(u + 1):
                        for w in range(u - v + 1):
                            total += (
                                _math.comb(p, u)
                                * _math.comb(u, v)
                                * _math.comb(u - v, w)
                                * ratio ** (u - w)
                                * s2 ** (p - v - w)
                                * s3 ** (p - u + w)
                                * series_leg_product_12(base_params, p, u, v, w, t)
                            )
                scaled = total * _math.exp(-2 * p * lam * t)
                assert scaled == pytest.approx(M[p], rel=1e-7)


class TestApproxRoute:
    def test_integrand_at_zero_is_initial_vol_product(self, base_params):
        m, v = _product_mean_and_variance(base_params, (0, 1), 0.0)
        s0 = base_params.sigma0_sq
        assert m == pytest.approx(s0[0] * s0[1], rel=1e-14)
        assert v == pytest.approx(0.0, abs=1e-30)

    def test_product_mean_matches_series_first_moment(self, base_params):
        # the two routes share no code for E[sigma_i^2 sigma_j^2]
        from gvswap.covariance import _PairSeriesEngine

        for pair in [(0, 1), (1, 2), (2, 0)]:
            engine = _PairSeriesEngine(base_params, pair, 2, False)
            for t in (0.5, 5.0, 50.0, 252.0):
                m_engine = engine.product_moments(t)[1]
                m_direct, _ = _product_mean_and_variance(base_params, pair, t)
                assert m_direct == pytest.approx(m_engine, rel=1e-11)

    def test_product_variance_matches_series_second_moment(self, base_params):
        from gvswap.covariance import _PairSeriesEngine

        for pair in [(0, 1), (1, 2), (2, 0)]:
            engine = _PairSeriesEngine(base_params, pair, 2, False)
            for t in (0.5, 5.0, 50.0, 252.0):
                m = engine.product_moments(t)
                var_engine = m[2] - m[1] ** 2
                _, var_direct = _product_mean_and_variance(base_params, pair, t)
                assert var_direct == pytest.approx(var_engine, rel=1e-9)

    def test_works_at_r2_zero(self):
        params = make_params(r2=0.0)
        value, _ = expected_cov_approx((1, 2), params)
        assert np.isfinite(value)


@pytest.fixture(scope="module")
def ig_params():
    # kappa_1 = a/b = 5e-5 at a fluctuation scale comparable to the gamma
    # base fixture
    spec = SubordinatorSpec(Family.INVERSE_GAUSSIAN, 0.0335, 670.0)
    return make_params(spec=spec, rho=(0.0, 0.0, 0.0))


class TestInverseGaussianDrivers:
    """Pipeline-level coverage of the second driver family."""

    def test_cross_route_agreement(self, ig_params):
        for pair in [(0, 1), (1, 2), (2, 0)]:
            s, _ = expected_cov_series(pair, ig_params)
            a, _ = expected_cov_approx(pair, ig_params)
            assert s == pytest.approx(a, rel=0.02)

    def test_simulation_smoke(self, ig_params):
        from gvswap import SimulationConfig, mc_expected_cov

        config = SimulationConfig(n_paths=2000, n_steps=504, seed=53)
        mc = mc_expected_cov(ig_params, config)
        stderr = np.array(mc.diagnostics["stderr"])
        analytic = expected_cov_matrix(ig_params, "approx")
        z = np.abs(analytic.entries - mc.entries) / stderr
        assert z.max() < 5.0


class TestMatrixAssembly:
    def test_zero_driver_matrix_diagonal(self):
        params = make_params(
            spec=SubordinatorSpec(Family.ZERO),
            gamma=np.eye(3),
            sigma0_sq=[1e-4, 2e-4, 3e-4],
        )
        m = expected_cov_matrix(params, "series")
        want = np.diag([deterministic_entry(params, i, i) for i in range(3)])
        assert np.allclose(m.entries, want, atol=1e-12)

    def test_series_vs_approx_entrywise(self, base_params):
        ms = expected_cov_matrix(base_params, "series")
        ma = expected_cov_matrix(base_params, "approx")
        rel = np.abs(ms.entries - ma.entries) / np.abs(ma.entries)
        assert rel.max() < 0.02

    def test_symmetric_and_diagnostics_populated(self, base_params):
        m = expected_cov_matrix(base_params, "approx")
        assert np.array_equal(m.entries, m.entries.T)
        assert set(m.diagnostics) == {"00", "11", "22", "01", "12", "02"}

    def test_json_round_trip(self, base_params):
        from gvswap import ExpectedCovMatrix

        m = expected_cov_matrix(base_params, "approx")
        d = m.to_json_dict()
        assert len(d["entries"]) == 9
        back = ExpectedCovMatrix.from_json_dict(d)
        assert np.allclose(back.entries, m.entries)
        assert back.method == "approx"

    def test_unknown_method_rejected(self, base_params):
        with pytest.raises(ParameterError):
            expected_cov_matrix(base_params, "mc")

    def test_asymmetric_entries_rejected(self):
        from gvswap import ExpectedCovMatrix

        bad = np.array([[1.0, 0.2, 0.0], [0.1, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(ParameterError):
            ExpectedCovMatrix(entries=bad, method="fixture", diagnostics={})
