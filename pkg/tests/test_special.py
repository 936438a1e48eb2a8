from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import special as sp_special

from ignis.errors import DomainError, QuadratureError
from ignis.quadrature import gk15, integrate
from ignis.special import EULER_GAMMA, LN2, debye1, digamma


class TestDigamma:
    def test_known_values(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * LN2, rel=1e-13)
        assert digamma(0.5) == pytest.approx(-1.9635100260, abs=1e-10)
        assert digamma(2.0) == pytest.approx(0.4227843351, abs=1e-10)

    def test_recurrence_grid(self):
        x = np.linspace(0.5, 50.0, 2000)
        assert np.max(np.abs(digamma(x + 1) - digamma(x) - 1 / x)) <= 1e-10

    def test_against_scipy(self):
        x = np.concatenate([np.geomspace(1e-3, 1e3, 500), [5.999, 6.0, 6.001]])
        assert np.max(np.abs(digamma(x) / sp_special.psi(x) - 1)) <= 1e-10

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            digamma(x)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 100.0))
    def test_duplication_formula(self, x):
        # psi(2x) = ln 2 + (psi(x) + psi(x + 1/2)) / 2
        lhs = digamma(2 * x)
        rhs = LN2 + 0.5 * (digamma(x) + digamma(x + 0.5))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestDebye:
    def test_limit_at_zero(self):
        assert debye1(0.0) == 1.0
        assert debye1(1e-10) == pytest.approx(1.0, abs=1e-9)

    def test_value_at_one(self):
        assert debye1(1.0) == pytest.approx(0.7775046341, abs=1e-9)

    @pytest.mark.parametrize("x", [0.3, 1.0, 5.0, 20.0])
    def test_reflection(self, x):
        assert debye1(-x) == pytest.approx(debye1(x) + x / 2, abs=1e-9)

    @pytest.mark.parametrize("x", [0.1, 2.0, 5.0, 20.0, 50.0])
    def test_against_scipy_quad(self, x):
        ref = sp_integrate.quad(lambda t: t / math.expm1(t), 0, x, epsabs=1e-13, epsrel=1e-12, limit=200)[0] / x
        assert debye1(x) == pytest.approx(ref, abs=1e-9)


class TestQuadrature:
    def test_polynomial_exact(self):
        val, err = gk15(lambda t: 3 * t ** 2 + 2 * t, 0.0, 2.0)
        assert val == pytest.approx(12.0, rel=1e-14)
        assert err < 1e-12

    @pytest.mark.parametrize("f,a,b,exact", [
        (np.sin, 0.0, math.pi, 2.0),
        (lambda t: 1 / np.sqrt(t), 0.0, 1.0, 2.0),
        (lambda t: np.log(t), 0.0, 1.0, -1.0),
        (lambda t: np.exp(-t), 0.0, 30.0, -math.expm1(-30.0)),
    ])
    def test_against_exact(self, f, a, b, exact):
        val, _ = integrate(f, a, b)
        assert val == pytest.approx(exact, abs=1e-9)

    def test_open_rule_never_touches_endpoints(self):
        seen = []

        def f(t):
            seen.append(np.asarray(t).copy())
            return np.log(t) + np.log1p(-t)

        val, _ = integrate(f, 0.0, 1.0)
        pts = np.concatenate(seen)
        assert np.all((pts > 0) & (pts < 1))
        assert val == pytest.approx(-2.0, abs=1e-9)

    def test_non_convergence(self):
        with pytest.raises(QuadratureError):
            integrate(lambda t: 1 / t, 0.0, 1.0, limit=20)
