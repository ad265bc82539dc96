import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singosc.special import gamma_ratio, hyp2f1_terminating, jacobi_p, log_gamma


def test_log_gamma_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert log_gamma(11.0) == pytest.approx(math.log(3628800), rel=1e-15)


def test_log_gamma_relative_accuracy():
    xs = np.concatenate([
        np.geomspace(1e-8, 1e4, 600),
        np.linspace(0.05, 3.5, 400),
        1 + np.geomspace(1e-12, 0.4, 40) * np.repeat([1, -1], 20),
        2 + np.geomspace(1e-12, 0.4, 40) * np.repeat([1, -1], 20),
    ])
    worst = 0.0
    with mpmath.workdps(40):
        for x in xs:
            ref = mpmath.loggamma(mpmath.mpf(float(x)))
            if ref != 0:
                worst = max(worst, float(abs((log_gamma(x) - ref) / ref)))
    assert worst < 1e-13


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_gamma(0.0)


class TestGammaRatio:
    def test_equal_arguments(self):
        assert gamma_ratio(2.7, 2.7).value == 1.0

    def test_vacuum_weight_boundary(self):
        # Gamma(2)/Gamma(1) at n = 1, j = -1/2
        assert gamma_ratio(2.0, 1.0).value == pytest.approx(1.0, rel=1e-15)

    def test_functional_equation(self):
        assert gamma_ratio(3.5, 1.5).value == pytest.approx(3.75, rel=1e-15)

    def test_reverse_offset(self):
        assert gamma_ratio(1.5, 3.5).value == pytest.approx(1 / 3.75, rel=1e-15)

    @given(st.floats(0.01, 50.0), st.integers(0, 40))
    def test_product_path_matches_log_path(self, b, k):
        prod = gamma_ratio(b + k, b)
        direct = log_gamma(b + k) - log_gamma(b)
        assert prod.sign == 1
        assert abs(prod.value - math.exp(direct)) <= 1e-12 * prod.value


class TestHypergeometric:
    def test_empty_series(self):
        assert hyp2f1_terminating(0, 3.3, 1.7, 12.0) == 1.0

    def test_one_term(self):
        assert hyp2f1_terminating(1, 2.5, 4.0, 0.3) == pytest.approx(1 - 2.5 * 0.3 / 4.0)

    def test_three_terms(self):
        assert hyp2f1_terminating(2, 2.0, 1.0, 0.5) == pytest.approx(-0.25, abs=1e-15)

    def test_exact_mode_returns_fraction(self):
        val = hyp2f1_terminating(2, 2.0, 1.0, 0.5, exact=True)
        assert val == Fraction(-1, 4)

    def test_pole_before_termination(self):
        with pytest.raises(ValueError):
            hyp2f1_terminating(3, 1.0, -1.0, 0.2)

    def test_against_mpmath(self):
        for S, b, c, z in [(5, 7.3, 2.0, 0.4), (8, 10.5, 3.0, 0.9), (3, -0.2, 0.7, -2.0)]:
            ref = float(mpmath.hyp2f1(-S, b, c, z))
            assert hyp2f1_terminating(S, b, c, z) == pytest.approx(ref, rel=1e-12)

    @given(st.integers(0, 8), st.floats(0.1, 20), st.floats(1.0, 10.0), st.floats(-0.9, 0.9))
    def test_polynomial_round_trip(self, S, b, c, z):
        # a degree-S polynomial is fixed by S+1 samples
        nodes = np.linspace(-0.95, 0.95, S + 1)
        vals = [hyp2f1_terminating(S, b, c, x) for x in nodes]
        coef = np.polynomial.polynomial.polyfit(nodes, vals, S)
        rebuilt = np.polynomial.polynomial.polyval(z, coef)
        direct = hyp2f1_terminating(S, b, c, z)
        scale = max(1.0, max(abs(v) for v in vals))
        assert abs(rebuilt - direct) <= 1e-11 * scale


class TestJacobi:
    def test_degree_zero(self):
        assert jacobi_p(0, 0.3, 2.0, -0.4) == 1.0

    def test_degree_one(self):
        a, b, x = 1.5, 0.25, 0.2
        assert jacobi_p(1, a, b, x) == pytest.approx((a + 1) + (a + b + 2) * (x - 1) / 2)

    def test_degree_two_against_hypergeometric(self):
        # P_n^(a,b)(1 - 2r) = binom(n+a, n) 2F1(-n, n+a+b+1; a+1; r)
        n, a, b, x = 2, 1.0, 0.5, 0.3
        r = (1 - x) / 2
        via_hyp = math.comb(3, 2) * hyp2f1_terminating(n, n + a + b + 1, a + 1, r)
        assert jacobi_p(n, a, b, x) == pytest.approx(via_hyp, rel=1e-14)
        assert jacobi_p(n, a, b, x) == pytest.approx(-0.2090625, rel=1e-14)

    def test_vectorized(self):
        xs = np.linspace(-1, 1, 5)
        out = jacobi_p(4, 0.5, 1.5, xs)
        assert out.shape == (5,)
        assert out[2] == pytest.approx(jacobi_p(4, 0.5, 1.5, 0.0))

    @given(st.integers(0, 60), st.floats(-0.99, 30), st.floats(-0.99, 30))
    def test_value_at_one(self, n, a, b):
        expected = math.exp(math.lgamma(n + a + 1) - math.lgamma(n + 1) - math.lgamma(a + 1))
        assert jacobi_p(n, a, b, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_against_mpmath_in_range(self):
        for n, a, b, x in [(6, 150.0, 1.5, -0.8), (12, 3.0, 0.0, 0.1), (30, 0.0, 0.5, 0.77)]:
            ref = float(mpmath.jacobi(n, a, b, x))
            assert jacobi_p(n, a, b, x) == pytest.approx(ref, rel=1e-11)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            jacobi_p(2, -1.0, 0.0, 0.1)
