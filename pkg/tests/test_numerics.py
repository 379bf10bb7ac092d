"""Quadrature and finite-difference plumbing against known integrals."""

import math

import numpy as np
import pytest

from hrl.functions import PolyGaussian, PolynomialBump
from hrl.closed_forms import CoshExtremal
from hrl.numerics import (
    DEFAULT_QUADRATURE,
    Grid,
    GridFunction,
    QuadratureConfig,
    QuadratureError,
    composite_simpson,
    derivative_matrix,
    fd_derivative,
    integrate_halfline,
    integrate_line,
    odd_power,
)


class TestLineQuadrature:
    def test_gaussian(self):
        val = integrate_line(lambda s: np.exp(-s * s), DEFAULT_QUADRATURE)
        assert val == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_sech_squared(self):
        def sech2(s):
            # overflow-safe sech^2
            e = np.exp(-np.abs(s))
            return (2.0 * e / (1.0 + e * e)) ** 2

        assert integrate_line(sech2, DEFAULT_QUADRATURE) == pytest.approx(
            2.0, rel=1e-12)

    def test_half_gaussian_interval(self):
        val = integrate_line(lambda s: np.exp(-s * s), DEFAULT_QUADRATURE,
                             interval=(-math.inf, 0.0))
        assert val == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-12)

    def test_linearity_and_monotonicity(self):
        f = lambda s: np.exp(-s * s)
        g = lambda s: 1.0 / (1.0 + s ** 4)
        cfg = DEFAULT_QUADRATURE
        combined = integrate_line(lambda s: 2.0 * f(s) + 3.0 * g(s), cfg)
        assert combined == pytest.approx(
            2.0 * integrate_line(f, cfg) + 3.0 * integrate_line(g, cfg), rel=1e-11)
        assert integrate_line(g, cfg) <= integrate_line(
            lambda s: g(s) + f(s), cfg)

    def test_cosh_power_against_truncated_simpson(self):
        # independent composite rule on a window wide enough for the decay
        F = CoshExtremal(2.0, 4.0, 1.0)
        q = 4.0
        adaptive = integrate_line(lambda s: np.abs(F.phi(s, 0)) ** q,
                                  DEFAULT_QUADRATURE)
        s = np.linspace(-40.0, 40.0, 160001)
        brute = composite_simpson(np.abs(F.phi(s, 0)) ** q, s[1] - s[0])
        assert adaptive == pytest.approx(brute, rel=1e-9)

    def test_divergent_integrand_raises(self):
        with pytest.raises(QuadratureError):
            integrate_line(lambda s: 1.0 / (1.0 + np.abs(s)), DEFAULT_QUADRATURE)


class TestHalflineQuadrature:
    def test_exponential_moment(self):
        val = integrate_halfline(lambda r: r * np.exp(-r), DEFAULT_QUADRATURE)
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_weighted_bump_closed_form(self):
        # int_1^3 r (1 - (r-2)^2)^2 dr = 32/15 by hand
        bump = PolynomialBump(center=2.0, halfwidth=1.0, m=2)
        val = integrate_halfline(lambda r: r * bump.value(r, 0),
                                 DEFAULT_QUADRATURE)
        assert val == pytest.approx(32.0 / 15.0, rel=1e-10)

    def test_exponential_integral_oracle(self):
        import scipy.special as sp
        val = integrate_halfline(lambda r: np.exp(-r) / (1.0 + r),
                                 DEFAULT_QUADRATURE)
        assert val == pytest.approx(math.e * sp.exp1(1.0), rel=1e-12)


class TestQuadratureConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)

    def test_loose_config_still_converges(self):
        cfg = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-8, max_subdivisions=200)
        val = integrate_line(lambda s: np.exp(-s * s), cfg)
        assert val == pytest.approx(math.sqrt(math.pi), rel=1e-7)


class TestGrid:
    def test_properties(self):
        grid = Grid(L=10.0, N=2001)
        pts = grid.points()
        assert pts.shape == (2001,)
        assert pts[0] == -10.0 and pts[-1] == 10.0
        assert grid.h == pytest.approx(20.0 / 2000)
        assert 0.0 in pts

    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(L=10.0, N=2000)  # even
        with pytest.raises(ValueError):
            Grid(L=10.0, N=1)
        with pytest.raises(ValueError):
            Grid(L=0.0, N=11)

    def test_grid_function_clamps_endpoints(self):
        grid = Grid(L=5.0, N=11)
        gf = GridFunction(grid, np.ones(11))
        assert gf.values[0] == 0.0 and gf.values[-1] == 0.0
        assert gf.values[5] == 1.0
        raw = GridFunction(grid, np.ones(11), clamp=False)
        assert raw.values[0] == 1.0

    def test_from_callable_and_integrate(self):
        grid = Grid(L=12.0, N=4097)
        gf = GridFunction.from_callable(grid, lambda s: np.exp(-s * s))
        assert gf.integrate() == pytest.approx(math.sqrt(math.pi), rel=1e-8)
        assert gf.integrate() == pytest.approx(
            np.trapezoid(gf.values, dx=grid.h), rel=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            GridFunction(Grid(L=1.0, N=11), np.ones(12))


class TestFiniteDifferences:
    def test_first_derivative_second_order(self):
        errs = []
        for N in (401, 801):
            grid = Grid(L=4.0, N=N)
            s = grid.points()
            D = derivative_matrix(grid, 1)
            err = np.max(np.abs(D @ np.sin(s) - np.cos(s))[2:-2])
            errs.append(err)
        ratio = errs[0] / errs[1]
        assert 3.5 <= ratio <= 4.5

    def test_second_derivative_exact_on_quadratic(self):
        grid = Grid(L=3.0, N=301)
        s = grid.points()
        D2 = derivative_matrix(grid, 2)
        interior = (D2 @ (s * s))[1:-1]
        assert np.max(np.abs(interior - 2.0)) <= 1e-8

    def test_fourth_derivative_convergence(self):
        # composed second-difference stencil, still O(h^2) overall
        target = lambda s: np.exp(-s * s)
        d4 = lambda s: (16 * s ** 4 - 48 * s ** 2 + 12) * np.exp(-s * s)
        errs = []
        for N in (401, 801):
            grid = Grid(L=6.0, N=N)
            s = grid.points()
            approx = fd_derivative(GridFunction.from_callable(grid, target), 4)
            err = np.max(np.abs(approx.values[4:-4] - d4(s)[4:-4]))
            errs.append(err)
        ratio = errs[0] / errs[1]
        assert 3.0 <= ratio <= 5.0

    def test_third_is_composition(self):
        grid = Grid(L=2.0, N=41)
        D1 = derivative_matrix(grid, 1)
        D2 = derivative_matrix(grid, 2)
        D3 = derivative_matrix(grid, 3)
        assert np.allclose(D3.toarray() if hasattr(D3, "toarray") else D3,
                           (D1 @ D2).toarray() if hasattr(D1 @ D2, "toarray")
                           else D1 @ D2)

    def test_order_range(self):
        grid = Grid(L=1.0, N=11)
        with pytest.raises(ValueError):
            derivative_matrix(grid, 0)
        with pytest.raises(ValueError):
            derivative_matrix(grid, 5)


class TestScalarHelpers:
    def test_odd_power(self):
        # |t|^{p-2} t, the p-energy gradient map
        assert odd_power(np.array(2.0), 3.0) == pytest.approx(4.0)
        assert odd_power(np.array(-2.0), 3.0) == pytest.approx(-4.0)
        # p < 2 must not blow up at the origin
        assert odd_power(np.array(0.0), 1.5) == 0.0
        vals = odd_power(np.array([-3.0, 0.0, 3.0]), 1.2)
        assert vals[0] == -vals[2] and vals[1] == 0.0

    def test_composite_simpson_cubic_exact(self):
        x = np.linspace(0.0, 1.0, 21)
        y = x ** 3
        assert composite_simpson(y, x[1] - x[0]) == pytest.approx(0.25, rel=1e-14)

    def test_composite_simpson_needs_odd_count(self):
        with pytest.raises(ValueError):
            composite_simpson(np.ones(10), 0.1)
