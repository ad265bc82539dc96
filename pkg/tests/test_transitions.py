import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import taylor_coefficients, w_mpmath
from singosc.errors import PoleError, RangeError
from singosc.su11 import make_model
from singosc.transitions import (
    adiabatic_invariant_diagnostic,
    adiabatic_invariant_ratio,
    build_table,
    energy_level,
    generating_g0,
    generating_g1,
    row_probabilities,
    transition_probability,
    transition_probability_hypergeometric,
    vacuum_probability,
)

BOUNDARY = make_model(-1.0, allow_boundary=True)
G0 = make_model(0.0)


class TestLevels:
    def test_ground_level(self):
        assert energy_level(make_model(3.0), 0, 1.0) == 2.0

    def test_plug_in(self):
        assert energy_level(G0, 2, 0.5) == pytest.approx(2.75)

    @given(st.floats(-0.99, 10), st.integers(0, 100), st.floats(0.01, 10))
    def test_equidistant(self, g, n, omega):
        model = make_model(g)
        gap = energy_level(model, n + 1, omega) - energy_level(model, n, omega)
        assert gap == pytest.approx(2 * omega, rel=1e-9)


class TestTransitionProbability:
    @pytest.mark.parametrize("g", [-0.99, 0.0, 1.0, 8.0])
    def test_identity_at_zero_rho(self, g):
        model = make_model(g)
        for m in range(6):
            for n in range(6):
                assert transition_probability(model, m, n, 0.0) == (1.0 if m == n else 0.0)

    def test_boundary_geometric(self):
        assert transition_probability(BOUNDARY, 0, 2, 0.5) == pytest.approx(0.125, rel=1e-14)

    def test_boundary_first_level_node(self):
        # 2F1(-1, 2; 1; rho) = 1 - 2 rho vanishes at rho = 1/2
        assert transition_probability(BOUNDARY, 1, 1, 0.5) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("m,n,rho", [(0, 1, 0.3), (3, 7, 0.45), (9, 2, 0.8), (5, 40, 0.6)])
    def test_against_mpmath(self, m, n, rho):
        model = make_model(2.5)
        ref = w_mpmath(model.j, m, n, rho)
        assert transition_probability(model, m, n, rho) == pytest.approx(ref, rel=1e-11)

    def test_symmetric(self):
        model = make_model(2.0)
        assert abs(transition_probability(model, 3, 5, 0.3)
                   - transition_probability(model, 5, 3, 0.3)) < 1e-12

    def test_large_levels_do_not_overflow(self):
        w = transition_probability(G0, 300, 600, 0.5)
        assert 0.0 <= w < 1.0 and math.isfinite(w)

    @pytest.mark.parametrize("rho", [-0.1, 1.0, 1 - 1e-10, float("nan")])
    def test_range_error(self, rho):
        with pytest.raises(RangeError):
            transition_probability(G0, 0, 1, rho)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-0.99, 12), st.integers(0, 12), st.integers(0, 40), st.floats(0.0, 0.95))
    def test_forms_agree(self, g, m, n, rho):
        model = make_model(g)
        a = transition_probability(model, m, n, rho)
        b = transition_probability_hypergeometric(model, m, n, rho)
        assert 0.0 <= a <= 1.0 + 1e-12
        assert abs(a - b) <= 1e-10 * max(a, b) + 1e-300


class TestVacuum:
    def test_zero_level(self):
        rho = 0.3
        assert vacuum_probability(G0, 0, rho) == pytest.approx((1 - rho) ** 1.5, rel=1e-14)

    @pytest.mark.parametrize("n", [0, 1, 5, 30])
    def test_boundary_geometric(self, n):
        assert vacuum_probability(BOUNDARY, n, 0.4) == pytest.approx(0.4**n * 0.6, rel=1e-13)

    def test_frozen_value(self):
        assert vacuum_probability(G0, 1, 0.36) == pytest.approx(0.27648, rel=1e-13)

    @given(st.floats(-0.99, 12), st.integers(0, 200), st.floats(0.0, 0.99))
    def test_matches_general_formula(self, g, n, rho):
        model = make_model(g)
        a = vacuum_probability(model, n, rho)
        b = transition_probability(model, 0, n, rho)
        assert abs(a - b) <= 1e-12 * max(a, b) + 1e-300


class TestTable:
    def test_identity(self):
        t = build_table(G0, 0.0, 4, 4)
        assert np.array_equal(t.w, np.eye(5))
        assert np.all(t.row_tail_mass == 0)

    def test_symmetric_block_and_tails(self):
        t = build_table(make_model(2.0), 0.3, 6, 9)
        assert np.array_equal(t.w[:7, :7], t.w[:7, :7].T)
        assert np.all(t.row_tail_mass >= -1e-10)
        assert np.all((t.w >= 0) & (t.w <= 1))

    def test_rows_sum_to_one(self):
        rho = 0.5
        max_n = max(row_probabilities(G0, m, rho).size for m in range(4)) + 5
        t = build_table(G0, rho, 3, max_n)
        assert np.all(np.abs(t.row_tail_mass) < 1e-10)

    def test_read_only(self):
        t = build_table(G0, 0.2, 2, 2)
        with pytest.raises(ValueError):
            t.w[0, 0] = 0.0


class TestRows:
    @pytest.mark.parametrize("g", [-0.99, 0.0, 1.0, 8.0])
    @pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
    def test_unitarity(self, g, rho):
        model = make_model(g)
        for m in range(7):
            row = row_probabilities(model, m, rho)
            assert abs(math.fsum(row) - 1.0) < 1e-10

    def test_zero_rho_row(self):
        assert list(row_probabilities(G0, 2, 0.0)) == [0.0, 0.0, 1.0]


class TestGeneratingFunctions:
    def test_normalization(self):
        for rho in (0.0, 0.2, 0.7):
            assert generating_g0(G0, rho, 1.0) == pytest.approx(1.0, abs=1e-14)
            assert generating_g1(G0, rho, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_at_origin(self):
        rho = 0.35
        assert generating_g0(G0, rho, 0.0).real == pytest.approx(transition_probability(G0, 0, 0, rho))
        assert generating_g1(G0, rho, 0.0).real == pytest.approx(transition_probability(G0, 1, 0, rho))
        assert generating_g1(G0, rho, 0.0).real == pytest.approx(1.5 * rho * (1 - rho) ** 1.5)

    def test_boundary_geometric_sum(self):
        # sum_n rho^n (1-rho) z^n by partial sums
        rho, z = 0.5, 0.5
        partial = math.fsum(rho**n * (1 - rho) * z**n for n in range(200))
        assert generating_g0(BOUNDARY, rho, z).real == pytest.approx(partial, rel=1e-14)
        assert partial == pytest.approx(2 / 3, rel=1e-14)

    @pytest.mark.parametrize("fn,m", [(generating_g0, 0), (generating_g1, 1)])
    def test_taylor_coefficients(self, fn, m):
        rho = 0.4
        coef = taylor_coefficients(lambda z: fn(G0, rho, z), 20)
        w = np.array([transition_probability(G0, m, n, rho) for n in range(21)])
        assert np.max(np.abs(coef - w)) < 1e-10

    def test_pole(self):
        with pytest.raises(PoleError):
            generating_g0(G0, 0.5, 2.0)
        with pytest.raises(PoleError):
            generating_g1(G0, 0.25, 4.0)

    def test_beyond_radius(self):
        # analytic continuation past |z| = 1/rho on the principal branch
        val = generating_g0(G0, 0.5, -5.0)
        assert val == pytest.approx((0.5 / 3.5) ** 1.5)


class TestAdiabaticInvariant:
    def test_closed_form(self):
        assert adiabatic_invariant_ratio(G0, 0, 0.0) == 1.0
        assert adiabatic_invariant_ratio(G0, 3, 0.5) == 3.0

    def test_boundary_geometric_mean(self):
        rho = 0.3
        d = adiabatic_invariant_diagnostic(BOUNDARY, 0, rho)
        # geometric mean rho/(1-rho), shifted by 1/2 and scaled by 2
        assert (rho / (1 - rho) + 0.5) / 0.5 == pytest.approx((1 + rho) / (1 - rho))
        assert d.residual < 1e-12

    @pytest.mark.parametrize("g", [0.0, 2.0])
    @pytest.mark.parametrize("rho", [0.2, 0.6])
    def test_arbitrary_level(self, g, rho):
        model = make_model(g)
        for m in range(5):
            d = adiabatic_invariant_diagnostic(model, m, rho)
            assert d.residual < 1e-8
            assert d.tail_mass < 1e-12
