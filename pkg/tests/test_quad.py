import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopial import funcspace as fs
from hopial import quad
from hopial.errors import BudgetExceeded, DomainError, NonIntegrable


class TestIntegrate:
    def test_linear(self, unit):
        res = quad.integrate(fs.PowerLaw(1.0, 1.0), unit)
        assert res.value == pytest.approx(0.5, abs=1e-12)
        assert res.subdivisions >= 1

    def test_inverse_sqrt_vs_antiderivative_oracle(self, unit):
        # oracle: the antiderivative of t^(-1/2) is 2 sqrt(t)
        res = quad.integrate(fs.PowerLaw(1.0, -0.5), unit)
        assert res.value == pytest.approx(2.0 * math.sqrt(1.0), abs=1e-8)

    def test_divergent_detected_structurally(self, unit):
        with pytest.raises(NonIntegrable):
            quad.integrate(fs.PowerLaw(1.0, -1.0), unit)
        with pytest.raises(NonIntegrable):
            quad.integrate(fs.Power(fs.PowerLaw(1.0, 2.0), -0.75), unit)

    @pytest.mark.parametrize("alpha", [-0.9, -0.5, -0.1, 0.5, 3.0])
    def test_singular_rule_consistency(self, unit, alpha):
        res = quad.integrate(fs.PowerLaw(1.0, alpha), unit)
        exact = 1.0 / (alpha + 1.0)
        assert abs(res.value - exact) <= 1e-7 * exact

    def test_right_endpoint_singularity(self, unit):
        res = quad.integrate(fs.ShiftedPowerLaw(1.0, -0.5), unit)
        assert res.value == pytest.approx(2.0, rel=1e-8)

    def test_both_endpoints_singular(self, unit):
        spec = fs.Product([fs.PowerLaw(1.0, -0.5), fs.ShiftedPowerLaw(1.0, -0.5)])
        res = quad.integrate(spec, unit)
        assert res.value == pytest.approx(math.pi, rel=1e-7)

    def test_additivity_over_random_specs(self, unit):
        # integral over (a,c) + (c,b) matches (a,b) within summed errors
        rng = np.random.default_rng(12)
        fam = fs.RandomPiecewiseLinear(4, (0.1, 2.0), seed=21, interval=unit)
        specs = fs.sample_family(fam, 50) + [
            fs.Sum([fs.Constant(0.3), fs.PowerLaw(float(c), float(a))])
            for c, a in rng.uniform([0.2, 0.0], [2.0, 2.0], size=(50, 2))
        ]
        for spec in specs:
            c = float(rng.uniform(0.2, 0.8))
            whole = quad.integrate(spec, unit)
            left = quad.integrate(spec, fs.Interval(0.0, c), home=unit)
            right = quad.integrate(spec, fs.Interval(c, 1.0), home=unit)
            tol = (
                whole.abs_error_estimate
                + left.abs_error_estimate
                + right.abs_error_estimate
                + 1e-12 * abs(whole.value)
            )
            assert abs(left.value + right.value - whole.value) <= max(tol, 1e-13)

    def test_monotone_in_interval_for_nonnegative(self, unit):
        spec = fs.Sum([fs.Constant(0.1), fs.PowerLaw(1.0, 0.7)])
        small = quad.integrate(spec, fs.Interval(0.0, 0.6), home=unit)
        large = quad.integrate(spec, unit)
        assert large.value >= small.value - 1e-12

    def test_raw_callable_open_rule_and_inflation(self, unit):
        spec_res = quad.integrate(fs.PowerLaw(1.0, 2.0), unit)
        raw_res = quad.integrate(lambda x: x**2, unit, tol=1e-9)
        assert raw_res.value == pytest.approx(spec_res.value, rel=1e-10)
        # inflation applies only to structure-free callables
        assert raw_res.abs_error_estimate >= spec_res.abs_error_estimate

    def test_budget_exceeded(self, unit):
        wiggly = lambda x: np.sin(200.0 / (x + 0.01))
        with pytest.raises(BudgetExceeded):
            quad.integrate(wiggly, unit, tol=1e-12, max_panels=12)

    def test_tolerance_domain(self, unit):
        with pytest.raises(DomainError):
            quad.integrate(fs.Constant(1.0), unit, tol=0.5)
        with pytest.raises(DomainError):
            quad.integrate(fs.Constant(1.0), unit, tol=1e-15)

    def test_rel_error_property(self, unit):
        res = quad.integrate(fs.Exponential(1.0, 1.0), unit)
        assert res.rel_error <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(0.0, 5.0), min_size=2, max_size=8),
        st.floats(1e-3, 1.0),
    )
    def test_piecewise_linear_matches_trapezoid_oracle(self, values, width):
        # independent oracle: the exact integral of a linear interpolant is
        # the trapezoid sum of its knots
        xs = np.linspace(0.0, width, len(values))
        spec = fs.PiecewiseLinear(list(zip(xs, values)))
        interval = fs.Interval(0.0, width)
        exact = float(np.trapezoid(values, xs))
        res = quad.integrate(spec, interval)
        assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-13)


class TestCumulative:
    def test_identity_exact_at_knots(self, unit):
        table = quad.cumulative(fs.Constant(1.0), unit, 16)
        assert np.allclose(table.values, table.grid, atol=1e-14)
        assert table.values[0] == 0.0

    def test_linear_integrand_analytic(self, unit):
        # analytic oracle: integral of 2t is t^2
        table = quad.cumulative(fs.PowerLaw(2.0, 1.0), unit, 32)
        assert table.value_at(0.5) == pytest.approx(0.25, abs=1e-10)

    def test_hat_total_is_triangle_area(self, unit):
        # triangle area oracle: base 1, height 0.5
        hat = fs.PiecewiseLinear([(0, 0), (0.5, 0.5), (1, 0)])
        table = quad.cumulative(hat, unit, 16)
        assert table.value_at(1.0) == pytest.approx(0.25, abs=1e-12)

    def test_values_nondecreasing_for_nonnegative(self, unit):
        table = quad.cumulative(fs.PowerLaw(1.0, 0.5), unit, 24)
        assert np.all(np.diff(table.values) >= -1e-15)

    def test_table_path_interpolation(self, unit):
        # Product has no closed antiderivative: forced through the table
        spec = fs.Product([fs.PowerLaw(1.0, 1.0), fs.Exponential(1.0, 1.0)])
        table = quad.cumulative(spec, unit, 64)
        assert table.interpolation_order == 3
        exact = lambda x: (x - 1.0) * math.exp(x) + 1.0
        for x in (0.13, 0.5, 0.86):
            assert table.value_at(x) == pytest.approx(exact(x), abs=5e-9)
        assert table.query_error < 1e-7

    def test_minimum_grid_size(self, unit):
        with pytest.raises(DomainError):
            quad.cumulative(fs.Constant(1.0), unit, 8)


class TestSup:
    def test_tail_integral_sup_at_left(self, unit):
        # g(x) = 1 - x: monotone tail integral of r = 1
        tail = fs.tail_integral_spec(fs.Constant(1.0), unit)
        res = quad.sup_on_interval(tail, unit)
        assert res.arg == pytest.approx(0.0, abs=1e-9)
        assert res.value == pytest.approx(1.0, abs=1e-10)

    def test_constant(self, unit):
        res = quad.sup_on_interval(fs.Constant(3.0), unit)
        assert res.value == pytest.approx(3.0)

    def test_parabola_calculus_oracle(self, unit):
        spec = fs.Product([fs.PowerLaw(1.0, 1.0), fs.ShiftedPowerLaw(1.0, 1.0)])
        res = quad.sup_on_interval(spec, unit)
        assert res.arg == pytest.approx(0.5, abs=1e-8)
        assert res.value == pytest.approx(0.25, abs=1e-12)

    def test_audit_invariant(self, unit):
        spec = fs.PiecewiseLinear([(0, 0.1), (0.311, 2.3), (0.7, 0.4), (1, 1.1)])
        res = quad.sup_on_interval(spec, unit)
        xs = np.linspace(0.0, 1.0, 1024)
        assert res.value >= float(np.max(fs.evaluate_array(spec, xs, unit))) - 1e-12

    def test_open_interval_inset_for_singular(self, unit):
        res = quad.sup_on_interval(fs.PowerLaw(1.0, -0.25), unit)
        assert math.isfinite(res.value)
        assert res.arg > 0.0

    def test_evaluation_failure_raises(self, unit):
        with pytest.raises(DomainError):
            quad.sup_on_interval(lambda x: np.full_like(x, np.nan), unit)
