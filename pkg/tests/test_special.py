import math

import numpy as np
import pytest

from hopial import special as sp
from hopial.errors import DomainError

P = sp.BoydParams


class TestGamma:
    def test_identity(self):
        assert sp.gamma(1.0) == pytest.approx(1.0, rel=1e-13)

    def test_factorial(self):
        assert sp.gamma(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half_is_sqrt_pi(self):
        # derived from the sqrt(pi) identity
        assert sp.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
        assert sp.gamma(0.5) == pytest.approx(1.772453850905516, rel=1e-12)

    def test_against_reference_on_working_range(self):
        for x in np.linspace(0.1, 30.0, 300):
            mine = sp.gamma(float(x))
            ref = math.gamma(float(x))
            assert abs(mine - ref) <= 1e-12 * ref

    def test_recurrence(self):
        for x in np.linspace(0.1, 20.0, 120):
            lhs = sp.gamma(float(x) + 1.0)
            rhs = float(x) * sp.gamma(float(x))
            assert abs(lhs - rhs) <= 1e-11 * abs(rhs)

    def test_domain(self):
        with pytest.raises(DomainError):
            sp.gamma(0.0)
        with pytest.raises(DomainError):
            sp.gamma(-2.5)


class TestSigma:
    def test_hand_values(self):
        assert sp.boyd_sigma(P(1, 1, 2)) == pytest.approx(1.0, rel=1e-14)
        assert sp.boyd_sigma(P(2, 1, 2)) == pytest.approx(1.0, rel=1e-14)
        assert sp.boyd_sigma(P(1, 0, 2)) == pytest.approx(math.sqrt(3.0), rel=1e-14)

    def test_requires_eta_below_s(self):
        with pytest.raises(DomainError):
            sp.boyd_sigma(P(1, 2, 2))


class TestBoydI:
    def test_eta_one_collapses(self):
        # eta = 1 kills both t-dependent brackets; the integrand is t^(1/nu-1)
        assert sp.boyd_I(P(1, 1, 2)) == pytest.approx(1.0, rel=1e-12)
        assert sp.boyd_I(P(2, 1, 3)) == pytest.approx(2.0, rel=1e-10)

    def test_eta_zero_against_midpoint_oracle(self):
        # integrand reduces to (1-t)^(-1/2); brute-force midpoint oracle
        n = 400_000
        t = (np.arange(n) + 0.5) / n
        oracle = float(np.mean((1.0 - t) ** (-0.5)))
        mine = sp.boyd_I(P(1, 0, 2))
        assert mine == pytest.approx(2.0, rel=1e-8)
        assert abs(oracle - mine) < 2e-3  # midpoint rule converges slowly here

    def test_two_resolution_agreement_over_grid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            nu = float(rng.uniform(0.5, 4.0))
            s = float(rng.uniform(1.2, 4.0))
            eta = float(rng.uniform(0.0, s - 0.1))
            coarse = sp.boyd_I_result(P(nu, eta, s), tol=1e-8)
            fine = sp.boyd_I_result(P(nu, eta, s), tol=5e-9)
            assert abs(fine.value - coarse.value) <= max(
                coarse.abs_error_estimate + fine.abs_error_estimate, 1e-12
            )


class TestBoydN:
    def test_overlap_identity(self):
        # the two independent constant formulas meet at this point
        assert sp.boyd_N(P(1, 1, 2)) == pytest.approx(0.5, abs=1e-10)
        assert sp.boyd_L(1, 1) == pytest.approx(0.5, abs=1e-12)

    def test_eta_zero_value(self):
        # N(1,0,2) = sigma^{-1} with I = 2: 1/sqrt(3)
        assert sp.boyd_N(P(1, 0, 2)) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-8)

    def test_sharp_for_cubed_case(self):
        # the (2,1,2) constant must dominate the ratio of y = x on (0,1)
        assert sp.boyd_N(P(2, 1, 2)) == pytest.approx(1.0 / 3.0, rel=1e-10)

    def test_positive_on_random_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            nu = float(rng.uniform(0.3, 5.0))
            s = float(rng.uniform(1.1, 4.0))
            eta = float(rng.uniform(0.0, s - 0.05))
            assert sp.boyd_N(P(nu, eta, s)) > 0.0


class TestBoydL:
    def test_l21_derived(self):
        assert sp.boyd_L(2, 1) == pytest.approx(1.0 / 6.0, abs=1e-12)

    def test_modes_differ_by_gamma_ratio_power(self):
        derived = sp.boyd_L(4, 2)
        printed = sp.boyd_L(4, 2, mode="as_printed")
        ratio = sp.gamma(1.5 + 0.25) / (sp.gamma(1.5) * sp.gamma(0.25))
        assert derived == pytest.approx(printed * ratio**3, rel=1e-12)

    def test_modes_agree_at_unit_exponent(self):
        assert sp.boyd_L(1, 1) == pytest.approx(
            sp.boyd_L(1, 1, mode="as_printed"), rel=1e-14
        )

    def test_positive_on_grid(self):
        for nu in (0.5, 1.0, 2.5, 4.0):
            for eta in (1.0, 1.5, 2.0, 3.0):
                assert sp.boyd_L(nu, eta) > 0.0
                assert sp.boyd_L(nu, eta, mode="as_printed") > 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            sp.boyd_L(0.0, 1.0)
        with pytest.raises(DomainError):
            sp.boyd_L(1.0, 0.5)
        with pytest.raises(DomainError):
            sp.boyd_L(1.0, 1.0, mode="sideways")
