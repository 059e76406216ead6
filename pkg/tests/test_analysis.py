import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import TABLE3, random_density
from jointpol.analysis import (
    ERROR_PATTERN,
    ESTIMATOR_WEIGHTS,
    classify,
    correlations,
    error_covariance,
    propagate_errors,
    visibilities,
)
from jointpol.core import expectation
from jointpol.design import paper_design, symmetric_design, theoretical_visibilities
from jointpol.errors import DomainError, WitnessError
from jointpol.simulator import CountTable, joint_probabilities
from jointpol.states import XX, YY, ZZ, InputCorrelations, NoiseModel, noisy_singlet, singlet

# Error-pattern layout: rows outcome1 (a, b, c, d), columns outcome2.
TABLE_I = [
    ["11", "10", "01", "00"],
    ["10", "11", "00", "01"],
    ["01", "00", "11", "10"],
    ["00", "01", "10", "11"],
]

count_tables = arrays(np.int64, (4, 4), elements=st.integers(0, 50000)).filter(lambda a: a.sum() > 0)


def singlet_table(scale=3200):
    return np.rint(joint_probabilities(singlet(), paper_design()) * scale).astype(int)


def test_error_pattern_matches_table_i():
    assert ERROR_PATTERN.tolist() == TABLE_I


class TestClassify:
    def test_table3(self):
        e = classify(TABLE3)
        n = TABLE3 / TABLE3.sum()
        by_hand = {ij: sum(n[r, c] for r in range(4) for c in range(4) if TABLE_I[r][c] == ij) / 4
                   for ij in ("00", "01", "10", "11")}
        assert e.e00 == pytest.approx(by_hand["00"], abs=1e-15)
        assert e.e11 == pytest.approx(by_hand["11"], abs=1e-15)
        assert (e.e00, e.e01, e.e10, e.e11) == pytest.approx((0.0938, 0.0898, 0.0607, 0.0057), abs=2e-4)
        assert e.total_counts == 160577

    def test_uniform(self):
        e = classify(np.full((4, 4), 7))
        assert np.allclose(e.values, 1 / 16)

    def test_ideal_singlet(self):
        e = classify(CountTable(singlet_table()))
        assert e.values == pytest.approx([3 / 32, 3 / 32, 1 / 16, 0], abs=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            classify(np.zeros((4, 4), dtype=int))

    @settings(max_examples=100)
    @given(count_tables)
    def test_normalization_identity(self, n):
        assert 4 * classify(n).values.sum() == pytest.approx(1, abs=1e-9)

    @settings(max_examples=50)
    @given(count_tables, st.integers(2, 40))
    def test_scale_invariant(self, n, k):
        a, b = classify(n), classify(n * k)
        assert np.allclose(a.values, b.values, atol=1e-14)
        ca, cb = correlations(a), correlations(b)
        assert (ca.c_xx_exp, ca.c_yy_exp, ca.c_prod_exp) == pytest.approx(
            (cb.c_xx_exp, cb.c_yy_exp, cb.c_prod_exp), abs=1e-13)


class TestCorrelations:
    def test_table3(self):
        c = correlations(classify(TABLE3))
        assert (c.c_xx_exp, c.c_yy_exp, c.c_prod_exp) == pytest.approx((-0.469, -0.236, -0.204), abs=1e-3)

    def test_uniform(self):
        c = correlations(classify(np.ones((4, 4))))
        assert (c.c_xx_exp, c.c_yy_exp, c.c_prod_exp) == pytest.approx((0, 0, 0), abs=1e-15)

    def test_ideal_singlet(self):
        c = correlations(classify(singlet_table()))
        assert (c.c_xx_exp, c.c_yy_exp, c.c_prod_exp) == pytest.approx((-0.5, -0.25, -0.25), abs=1e-15)

    def test_cell_level_definition(self):
        # <x1x2>_exp is just the sign-weighted mean over cells
        n = TABLE3 / TABLE3.sum()
        xs = np.array([1, 1, -1, -1])
        ys = np.array([1, -1, 1, -1])
        c = correlations(classify(TABLE3))
        assert c.c_xx_exp == pytest.approx((np.outer(xs, xs) * n).sum(), abs=1e-15)
        assert c.c_prod_exp == pytest.approx((np.outer(xs * ys, xs * ys) * n).sum(), abs=1e-15)

    def test_operator_level_oracle(self):
        # exact probabilities reproduce v^2 <XX>, v_y^2 <YY>, c^2 <ZZ>
        rng = np.random.default_rng(8)
        for _ in range(100):
            rho = random_density(rng)
            d = symmetric_design(rng.uniform(1, 89), rng.uniform(-89, 89))
            tv = theoretical_visibilities(d)
            c = correlations(classify(joint_probabilities(rho, d)))
            assert c.c_xx_exp == pytest.approx(tv.v_x ** 2 * expectation(rho, XX), abs=1e-12)
            assert c.c_yy_exp == pytest.approx(tv.v_y ** 2 * expectation(rho, YY), abs=1e-12)
            assert c.c_prod_exp == pytest.approx(tv.c_magnitude ** 2 * expectation(rho, ZZ), abs=1e-12)

    def test_sign_inversion_fitted_state(self, measured_corrs):
        from jointpol.states import fit_noise, product_bounds
        rho = noisy_singlet(fit_noise(measured_corrs).model)
        c = correlations(classify(joint_probabilities(rho, paper_design())))
        assert product_bounds(measured_corrs).lower >= 0.8106 - 1e-12
        assert c.c_prod_exp < 0


class TestVisibilities:
    def test_table3(self, measured_corrs):
        r = visibilities(classify(TABLE3), measured_corrs)
        assert r.vx2 == pytest.approx(0.491, abs=3e-3)
        assert r.vy2 == pytest.approx(0.276, abs=4e-3)
        assert r.c2_interval[0] == pytest.approx(-0.252, abs=2e-3)
        assert r.c2_interval[1] == pytest.approx(-0.204, abs=2e-3)
        assert r.imag_c_interval == pytest.approx((0.452, 0.502), abs=2e-3)
        assert r.c2_negative and not r.fragile
        assert r.c2_observed == r.c2_interval[1] and r.c2_scaled == r.c2_interval[0]

    def test_ideal_singlet(self):
        r = visibilities(classify(singlet_table()), InputCorrelations(-1, -1))
        assert (r.vx2, r.vy2) == pytest.approx((0.5, 0.25), abs=1e-15)
        assert r.c2_interval == pytest.approx((-0.25, -0.25), abs=1e-15)
        assert r.imag_c_interval == pytest.approx((0.5, 0.5), abs=1e-15)
        assert (r.vx, r.vy) == pytest.approx((np.sqrt(0.5), 0.5))

    def test_zero_product(self, measured_corrs):
        e = classify(np.ones((4, 4)))
        r = visibilities(e, measured_corrs)
        assert r.c2_interval == (0.0, 0.0)
        assert r.imag_c_interval is None

    def test_positive_product_interval_order(self):
        n = np.ones((4, 4))
        n[ERROR_PATTERN == "00"] = 10
        r = visibilities(classify(n), InputCorrelations(-0.9, -0.9))
        assert 0 < r.c2_observed == r.c2_interval[0] < r.c2_interval[1] == r.c2_scaled
        assert r.imag_c_interval is None

    def test_witness_failure(self):
        with pytest.raises(WitnessError):
            visibilities(classify(TABLE3), InputCorrelations(-0.5, -0.5))

    def test_product_only(self, measured_corrs):
        r = visibilities(classify(TABLE3), measured_corrs, product_only=True)
        full = visibilities(classify(TABLE3), measured_corrs)
        assert r.vx2 == full.vx2 and r.c2_interval == full.c2_interval
        assert r.vx is None and r.imag_c_interval is None

    def test_fragile_flag(self):
        corrs = InputCorrelations(-0.52, -0.5, se_xx=0.02, se_yy=0.02)
        r = visibilities(classify(TABLE3), corrs)
        assert r.fragile

    def test_report_dict(self, measured_corrs):
        d = visibilities(classify(TABLE3), measured_corrs).to_dict()
        assert d["c2_negative"] is True
        assert d["inputs"]["c_xx"] == -0.9551


def numeric_gradient_se(n, quantity, h=1e-3):
    w = ESTIMATOR_WEIGHTS[quantity]
    f = lambda m: (w * m).sum() / m.sum()
    grad = np.zeros((4, 4))
    for idx in np.ndindex(4, 4):
        up, dn = n.astype(float).copy(), n.astype(float).copy()
        up[idx] += h
        dn[idx] -= h
        grad[idx] = (f(up) - f(dn)) / (2 * h)
    return np.sqrt((grad ** 2 * n).sum())


class TestPropagation:
    @pytest.mark.parametrize("q", sorted(ESTIMATOR_WEIGHTS))
    def test_delta_matches_finite_differences(self, q):
        assert propagate_errors(TABLE3, q) == pytest.approx(numeric_gradient_se(TABLE3, q), rel=1e-6)

    def test_table3_c_xx(self):
        assert propagate_errors(TABLE3, "c_xx_exp") == pytest.approx(0.003, abs=1e-3)

    @pytest.mark.parametrize("q", sorted(ESTIMATOR_WEIGHTS))
    def test_scaling_halves(self, q):
        a = propagate_errors(TABLE3, q)
        b = propagate_errors(TABLE3 * 4, q)
        assert b == pytest.approx(a / 2, rel=0.01)

    def test_bootstrap_agrees(self):
        for q in ("c_prod_exp", "c_xx_exp", "e11"):
            d = propagate_errors(TABLE3, q)
            b = propagate_errors(TABLE3, q, method="bootstrap", replicates=10000, seed=3)
            assert abs(b - d) / d < 0.15

    def test_bootstrap_seeded(self):
        a = propagate_errors(TABLE3, "e00", "bootstrap", 500, seed=4)
        b = propagate_errors(TABLE3, "e00", "bootstrap", 500, seed=4)
        c = propagate_errors(TABLE3, "e00", "bootstrap", 500, seed=5)
        assert a == b and a != c

    def test_correlation_se_consistent_with_direct(self):
        c = correlations(classify(TABLE3))
        assert c.se_xx == pytest.approx(propagate_errors(TABLE3, "c_xx_exp"), rel=1e-12)
        assert c.se_prod == pytest.approx(propagate_errors(TABLE3, "c_prod_exp"), rel=1e-12)

    def test_covariance_singular_by_normalization(self):
        cov = error_covariance(TABLE3, ["e00", "e01", "e10", "e11"])
        assert np.ones(4) @ cov @ np.ones(4) == pytest.approx(0, abs=1e-18)

    def test_unknown(self):
        with pytest.raises(ValueError):
            propagate_errors(TABLE3, "nope")
        with pytest.raises(ValueError):
            propagate_errors(TABLE3, "e00", method="jackknife")
