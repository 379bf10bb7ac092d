"""Log-radial transport: round trips, operator factorizations, norm identities."""

import math

import numpy as np
import pytest

from hrl.emden import (
    DilatedProfile,
    InverseTransported,
    OperatorChain,
    TransportedProfile,
    apply_B,
    apply_chain,
    apply_L,
    laplacian_identity_check,
    norm_chain,
    norm_identity,
    radial_power_integral,
    sphere_area,
    transform_Tk,
    transform_inverse,
)
from hrl.functions import ExpLine, LinComb, PolyGaussian, PolynomialBump, Shifted
from hrl.numerics import DEFAULT_QUADRATURE, integrate_halfline
from hrl.params import A_h, H_shift, ProblemParams, gamma_h, hardy_H, positivity_check


def _draw_admissible(rng, k, n_max=10, p_min=1.2, alpha_max=3.0):
    while True:
        n = int(rng.integers(2, n_max))
        p = float(rng.uniform(p_min, 3.5))
        alpha = float(rng.uniform(-alpha_max, alpha_max))
        params = ProblemParams(n, p, alpha, k=k)
        if positivity_check(params)[0]:
            return params


class TestSphereArea:
    def test_low_dimensions(self):
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)
        assert sphere_area(4) == pytest.approx(2.0 * math.pi ** 2, rel=1e-14)

    def test_gaussian_moment_crosscheck(self):
        # omega_n * int_0^inf r^{n-1} e^{-r^2} dr = pi^{n/2}
        for n in (2, 3, 4, 7):
            def moment_density(r, n=n):
                # evaluate in log space so huge r never overflows
                with np.errstate(divide="ignore", over="ignore"):
                    return np.exp((n - 1) * np.log(r) - r * r)

            moment = integrate_halfline(moment_density, DEFAULT_QUADRATURE)
            assert sphere_area(n) * moment == pytest.approx(
                math.pi ** (n / 2.0), rel=1e-11)

    def test_dimension_floor(self):
        with pytest.raises(ValueError):
            sphere_area(1)


class TestTransport:
    def test_round_trip(self):
        rng = np.random.default_rng(30)
        g = PolyGaussian(coeffs=(0.5, 1.0, -0.3), s0=0.2, sigma=1.4)
        for params in (ProblemParams(5, 2.0, 0.0, k=2),
                       ProblemParams(3, 1.7, -0.8, k=1)):
            back = transform_inverse(transform_Tk(g, params), params)
            s = rng.uniform(-6.0, 6.0, size=50)
            for order in (0, 1):
                assert back.value(s, order) == pytest.approx(
                    g.value(s, order), rel=1e-12, abs=1e-12)

    def test_power_prefactor(self):
        # (n, p, alpha, k) = (5, 2, 0, 2) carries exponent 1/2
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        u = transform_Tk(g, params)
        assert u.H == pytest.approx(0.5)
        r = np.array([0.3, 1.0, 2.7])
        assert u.value(r) == pytest.approx(
            r ** -0.5 * g.value(-np.log(r), 0), rel=1e-13)

    def test_zero_exponent_is_pure_substitution(self):
        params = ProblemParams(4, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(1.0, 0.2), sigma=0.8)
        u = transform_Tk(g, params)
        assert u.value(np.array([1.0])) == pytest.approx(g.value(np.array([0.0]), 0))

    def test_linearity(self):
        params = ProblemParams(6, 2.5, 0.5, k=2)
        g1 = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        g2 = PolyGaussian(coeffs=(0.0, 1.0), s0=-0.5, sigma=1.2)
        combo = LinComb((g1, g2), (2.0, -0.7))
        r = np.geomspace(0.2, 5.0, 17)
        lhs = transform_Tk(combo, params).value(r)
        rhs = (2.0 * transform_Tk(g1, params).value(r)
               - 0.7 * transform_Tk(g2, params).value(r))
        assert lhs == pytest.approx(rhs, rel=1e-14)

    def test_annulus_support_becomes_compact(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        bump = PolynomialBump(center=0.5, halfwidth=1.0, m=8)
        u = transform_Tk(bump, params)
        g = transform_inverse(u, params)
        outside = np.array([-2.0, 1.8, 7.0])
        assert np.all(g.value(outside, 0) == 0.0)
        lo, hi = g.quad_interval()
        assert lo <= -0.5 and hi >= 1.5

    def test_dilation_is_translation_downstairs(self):
        # rho-dilation with the natural power leaves the line profile
        # unchanged up to a shift by log(rho)
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(0.4, 1.0), s0=0.3, sigma=1.2)
        u = transform_Tk(g, params)
        for rho in (0.5, 3.0):
            moved = transform_inverse(DilatedProfile(u, params, rho), params)
            s = np.linspace(-4.0, 4.0, 21)
            assert moved.value(s, 0) == pytest.approx(
                g.value(s - math.log(rho), 0), rel=1e-12, abs=1e-14)


class TestOperatorFactors:
    def test_second_order_factor_on_exponentials(self):
        mu, A, gamma = 0.7, 0.3, 1.1
        g = ExpLine(mu)
        s = np.linspace(-2.0, 2.0, 9)
        got = apply_L(g, A, gamma).value(s, 0)
        assert got == pytest.approx(
            (mu * mu - 2 * A * mu - gamma) * np.exp(mu * s), rel=1e-12)

    def test_first_order_factors_compose(self):
        mu, H = -0.4, 1.3
        g = ExpLine(mu)
        s = np.linspace(-1.0, 1.0, 7)
        both = apply_B(apply_B(g, H, -1), H, +1)
        assert both.value(s, 0) == pytest.approx(
            (mu + H) * (mu - H) * np.exp(mu * s), rel=1e-12)
        with pytest.raises(ValueError):
            apply_B(g, H, 0)

    def test_chain_eigenvalue_consistency(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            m = int(rng.integers(1, 4))
            A_vec = tuple(rng.uniform(-1.0, 1.0, size=m))
            g_vec = tuple(float(rng.uniform(0.0, 2.0) - a * a) + a * a
                          for a in A_vec)  # keep A^2 + gamma >= 0
            g_vec = tuple(rng.uniform(0.0, 2.0, size=m))
            chain = OperatorChain(A_vec, g_vec,
                                  ("H", float(rng.uniform(-1.5, 1.5))))
            mu = float(rng.uniform(-1.2, 1.2))
            g = ExpLine(mu)
            s = np.linspace(-1.5, 1.5, 11)
            got = apply_chain(g, chain).value(s, 0)
            assert got == pytest.approx(
                chain.eigenvalue(mu) * np.exp(mu * s), rel=1e-12, abs=1e-12)

    def test_chain_validation(self):
        with pytest.raises(ValueError):
            OperatorChain((0.1,), (0.2, 0.3))
        with pytest.raises(ValueError):
            OperatorChain((0.1,), (-4.0,))
        with pytest.raises(ValueError):
            OperatorChain((0.1,), (0.2,), ("bogus", 1.0))
        assert OperatorChain((0.1, 0.2), (0.3, 0.4), ("lambda", 0.5)).order == 5

    def test_norm_chain_second_order(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        chain = norm_chain(params)
        assert chain.A_vec == (A_h(params, 2),)
        assert chain.gamma_vec == (gamma_h(params, 2),)
        assert chain.first_order is None
        g = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        s = np.linspace(-2.0, 2.0, 9)
        manual = apply_L(g, A_h(params, 2), gamma_h(params, 2))
        assert apply_chain(g, chain).value(s, 0) == pytest.approx(
            manual.value(s, 0), rel=1e-13)

    def test_norm_chain_odd_order_has_drift_factor(self):
        params = ProblemParams(7, 2.0, 0.5, k=3)
        chain = norm_chain(params)
        assert chain.first_order == ("H", hardy_H(params))
        assert chain.order == 3


class TestDifferentialIdentities:
    def test_laplacian_of_transported_profile(self):
        # absolute residual bound, so keep the power prefactors moderate
        rng = np.random.default_rng(32)
        for _ in range(20):
            h = int(rng.integers(2, 5))
            params = _draw_admissible(rng, k=h, n_max=7, p_min=1.5, alpha_max=2.0)
            coeffs = tuple(rng.uniform(-1.0, 1.0, size=int(rng.integers(1, 4))))
            g = PolyGaussian(coeffs=coeffs, s0=float(rng.uniform(-0.5, 0.5)),
                             sigma=float(rng.uniform(0.8, 1.6)))
            assert laplacian_identity_check(g, params, h) <= 1e-8

    def test_gradient_sign_convention(self):
        # d/dr of the order-2 transport is minus the order-1 transport of
        # the raising factor applied at the shifted exponent
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(0.3, 1.0), sigma=1.1)
        u = transform_Tk(g, params)
        lowered = transform_Tk(apply_B(g, H_shift(params, 2), +1),
                               ProblemParams(5, 2.0, 0.0, k=1), k=1)
        r = np.geomspace(0.2, 4.0, 15)
        assert u.value(r, 1) == pytest.approx(-lowered.value(r), rel=1e-11)

    def test_iterated_laplacian_even(self):
        # Delta^m applied to the order-2m transport equals the plain
        # substitution transport of the full operator chain image
        rng = np.random.default_rng(33)
        g = PolyGaussian(coeffs=(1.0, -0.2, 0.4), sigma=1.2)
        r = np.geomspace(0.2, 5.0, 25)
        for m in (1, 2):
            params = _draw_admissible(rng, k=2 * m)
            u = transform_Tk(g, params)
            lhs = u.nabla_power(2 * m).value(r)
            rhs = TransportedProfile(apply_chain(g, norm_chain(params)),
                                     params, k=0).value(r)
            scale = np.max(np.abs(rhs)) + 1.0
            assert np.max(np.abs(lhs - rhs)) <= 1e-7 * scale

    def test_iterated_laplacian_odd(self):
        rng = np.random.default_rng(34)
        g = PolyGaussian(coeffs=(0.6, 1.0), s0=0.1, sigma=1.0)
        r = np.geomspace(0.2, 5.0, 25)
        for m in (1, 2):
            k = 2 * m + 1
            params = _draw_admissible(rng, k=k)
            u = transform_Tk(g, params)
            A_vec = tuple(A_h(params, 2 * h + 1) for h in range(1, m + 1))
            g_vec = tuple(gamma_h(params, 2 * h + 1) for h in range(1, m + 1))
            chain = OperatorChain(A_vec, g_vec, None)
            lhs = u.nabla_power(2 * m).value(r)
            rhs = TransportedProfile(apply_chain(g, chain), params, k=1).value(r)
            scale = np.max(np.abs(rhs)) + 1.0
            assert np.max(np.abs(lhs - rhs)) <= 1e-7 * scale


class TestNormIdentity:
    def test_second_order_case(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(1.0, 0.3), sigma=1.1)
        lhs, rhs = norm_identity(g, params)
        assert lhs == pytest.approx(rhs, rel=1e-6)
        assert lhs > 0

    def test_first_order_case(self):
        params = ProblemParams(3, 2.5, 0.5, k=1)
        g = PolyGaussian(coeffs=(0.2, 1.0), s0=-0.3, sigma=0.9)
        lhs, rhs = norm_identity(g, params)
        assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_degenerate_parameters_rejected(self):
        with pytest.raises(ValueError):
            norm_identity(PolyGaussian(coeffs=(1.0,)),
                          ProblemParams(4, 2.0, 0.0, k=2))

    def test_translation_invariance_of_line_side(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(1.0, -0.5), sigma=1.3)
        _, rhs = norm_identity(g, params)
        _, rhs_shift = norm_identity(Shifted(g, 1.7), params)
        assert rhs == pytest.approx(rhs_shift, rel=1e-9)

    def test_power_integral_against_direct_quadrature(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        g = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        u = transform_Tk(g, params)
        pr = u.nabla_power(0)
        w = params.n - 1.0
        via_line = radial_power_integral(pr, w, 2.0)

        def density(r):
            # the tails carry no mass; avoid inf * 0 at extreme radii
            if r < 1e-8 or r > 1e8:
                return 0.0
            return r ** w * u.value(r) ** 2

        direct = integrate_halfline(density, DEFAULT_QUADRATURE)
        assert via_line == pytest.approx(direct, rel=1e-10)
