"""Explicit extremal profiles: shapes, conserved quantities, cross-checks."""

import math

import numpy as np
import pytest

from hrl.closed_forms import (
    BiharmonicExtremal,
    BorderlineProfile,
    ConvolutionExtremal,
    CoshExtremal,
    CriticalBiharmonicExtremal,
    PLaplaceExtremal,
    eval_F,
    eval_Phi,
    eval_U1,
    eval_U2,
    eval_U_cor,
    eval_Utilde,
    hamiltonian,
)
from hrl.emden import apply_B, sphere_area
from hrl.functions import LinComb, Shifted
from hrl.numerics import DEFAULT_QUADRATURE, integrate_halfline, odd_power
from hrl.params import ProblemParams, beta_exponent, hardy_H
from hrl.variational import QuotientSpec, quotient


def _windowed(f, lo=1e-10, hi=1e10):
    """Zero out the massless extreme tails so power weights never overflow."""

    def g(r):
        if r < lo or r > hi:
            return 0.0
        return f(r)

    return g


class TestLineExtremal:
    def test_reference_amplitude(self):
        F = CoshExtremal(2.0, 4.0, 1.0)
        assert F.value(np.array([0.0]), 0)[0] == pytest.approx(math.sqrt(2.0),
                                                               rel=1e-14)

    def test_even_profile_when_p_is_two(self):
        F = CoshExtremal(2.0, 5.0, 0.7)
        s = np.linspace(0.1, 8.0, 17)
        assert F.value(s, 0) == pytest.approx(F.value(-s, 0), rel=1e-13)

    def test_momentum_matches_definition(self):
        for (p, q, lam) in ((2.0, 4.0, 1.0), (1.5, 3.0, -0.8), (3.0, 5.0, 2.0)):
            F = CoshExtremal(p, q, lam)
            s = np.linspace(-20.0, 20.0, 401)
            drift = F.value(s, 1) - lam * F.value(s, 0)
            expect = odd_power(drift, p)
            assert np.max(np.abs(F.phi(s, 0) - expect)) <= 1e-9

    def test_momentum_sign_opposes_drift(self):
        s = np.linspace(-5.0, 5.0, 11)
        assert np.all(CoshExtremal(2.0, 4.0, 1.3).phi(s, 0) < 0.0)
        assert np.all(CoshExtremal(2.0, 4.0, -1.3).phi(s, 0) > 0.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            CoshExtremal(2.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            CoshExtremal(2.0, 4.0, 0.0)

    def test_wrappers_delegate(self):
        F = CoshExtremal(1.8, 3.3, 0.9)
        s = np.array([-1.0, 0.4])
        assert eval_F(s, F) == pytest.approx(F.value(s, 0))
        assert eval_Phi(s, F) == pytest.approx(F.phi(s, 0))


class TestConservation:
    def test_vanishes_along_orbit(self):
        rng = np.random.default_rng(40)
        s = np.linspace(-25.0, 25.0, 2001)
        for _ in range(5):
            p = float(rng.uniform(1.2, 4.0))
            q = float(p + rng.uniform(0.5, 4.0))
            lam = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0))
            F = CoshExtremal(p, q, lam)
            H = hamiltonian(F.value(s, 0), F.phi(s, 0), lam, p, q)
            assert np.max(np.abs(H)) <= 1e-9

    def test_zero_state(self):
        assert hamiltonian(np.array(0.0), np.array(0.0), 1.0, 2.0, 4.0) == 0.0

    def test_cross_term_is_negative(self):
        F = CoshExtremal(2.5, 4.5, 1.1)
        s = np.linspace(-10.0, 10.0, 101)
        f, phi = F.value(s, 0), F.phi(s, 0)
        mask = np.abs(f) > 1e-12
        assert np.all(1.1 * f[mask] * phi[mask] < 0.0)

    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            hamiltonian(np.array(1.0), np.array(1.0), 0.5, 1.0, 4.0)


class TestSecondOrderLineExtremal:
    def test_two_representations_agree(self):
        for (A, H) in ((0.3, 1.1), (0.8, -0.6)):
            gamma = H * H + 2.0 * A * H
            G = ConvolutionExtremal(2.0, 4.0, A, gamma, H)
            s = np.linspace(-6.0, 6.0, 20)
            series = G.value(s, 0)
            direct = np.array([G.convolution_form(float(x)) for x in s])
            assert series == pytest.approx(direct, rel=1e-8)

    def test_first_order_factor_recovers_line_extremal(self):
        A, H = 0.3, 1.1
        G = ConvolutionExtremal(2.0, 4.0, A, H * H + 2 * A * H, H)
        s = np.linspace(-4.0, 4.0, 15)
        got = apply_B(G, H, +1).value(s, 0)
        assert got == pytest.approx(G.F.value(s, 0), rel=1e-8)

    def test_decays_at_both_ends(self):
        G = ConvolutionExtremal(2.0, 4.0, 0.3, 1.87, 1.1)
        far = np.abs(G.value(np.array([-14.0, 14.0]), 0))
        assert np.all(far < 1e-3 * abs(G.value(np.array([0.0]), 0)[0]))

    def test_constraint_enforced(self):
        with pytest.raises(ValueError):
            ConvolutionExtremal(2.0, 4.0, 0.3, 1.0, 1.1)
        with pytest.raises(ValueError):
            ConvolutionExtremal(2.0, 4.0, 0.5, 0.0, 0.0)


class TestFirstOrderRadialExtremal:
    def test_value_at_one(self):
        params = ProblemParams(5, 2.0, 0.0, q=3.0)
        U = PLaplaceExtremal(params)
        assert U.value(np.array([1.0]))[0] == pytest.approx(
            U.amp * 2.0 ** (2.0 / (2.0 - 3.0)), rel=1e-13)

    def test_monotone_decreasing_in_main_branch(self):
        params = ProblemParams(5, 2.0, 0.0, q=3.0)
        vals = eval_U1(np.geomspace(0.01, 100.0, 60), params)
        assert np.all(np.diff(vals) < 0.0)
        assert vals[-1] < 1e-4 * vals[0]

    def test_excluded_weight(self):
        with pytest.raises(ValueError):
            PLaplaceExtremal(ProblemParams(5, 2.0, -3.0, q=3.0))

    def test_rayleigh_quotient_attains_line_constant(self):
        n, p, alpha, q = 5, 2.0, 0.0, 3.0
        params = ProblemParams(n, p, alpha, q=q)
        U = PLaplaceExtremal(params)
        beta = beta_exponent(params, 1)
        omega = sphere_area(n)
        num = omega * integrate_halfline(
            _windowed(lambda r: r ** (n - 1 + alpha) * U.value(r, 1) ** 2),
            DEFAULT_QUADRATURE)
        den = omega * integrate_halfline(
            _windowed(lambda r: r ** (n - 1 - beta) * abs(U.value(r, 0)) ** q),
            DEFAULT_QUADRATURE)
        nd = num / den ** (p / q)
        lam = -hardy_H(params)
        line = quotient(QuotientSpec(kind="M_pq", p=p, q=q, lam=lam),
                        CoshExtremal(p, q, lam))
        assert nd == pytest.approx(omega ** ((q - p) / q) * line, rel=1e-4)


class TestFourthOrderRadialExtremals:
    def test_branch_shapes(self):
        up = ProblemParams(5, 2.0, 0.5, k=2, q=3.0)
        U = BiharmonicExtremal(up)
        assert U.from_infinity
        r = np.geomspace(0.05, 50.0, 40)
        vals = U.value(r, 0)
        assert np.all(np.diff(vals) < 0.0) and vals[-1] < 1e-3 * vals[0]

        down = ProblemParams(5, 2.0, -2.0, k=2, q=3.0)
        V = BiharmonicExtremal(down)
        assert not V.from_infinity
        vals = V.value(r, 0)
        assert np.all(np.diff(vals) > 0.0)
        assert V.value(np.array([1e-9]), 0)[0] <= 1e-8 * vals[-1]

    def test_degenerate_lines_excluded(self):
        with pytest.raises(ValueError):
            BiharmonicExtremal(ProblemParams(5, 2.0, -1.0, k=2, q=3.0))
        with pytest.raises(ValueError):
            BiharmonicExtremal(ProblemParams(5, 2.0, 5.0, k=2, q=3.0))

    def test_critical_profile_matches_unweighted_branch(self):
        # the alpha = 0 fourth-order profile at the first-order critical
        # exponent collapses to the dedicated critical-case formula
        n, p = 5, 2.0
        q = n * p / (n - p)
        params = ProblemParams(n, p, 0.0, k=2, q=q)
        r = np.geomspace(0.1, 5.0, 10)
        assert eval_U2(r, params) == pytest.approx(eval_U_cor(r, n, p), rel=1e-8)

    def test_critical_profile_dimension_floor(self):
        with pytest.raises(ValueError):
            CriticalBiharmonicExtremal(4, 2.0)


class TestBorderlineProfile:
    def test_closed_form_in_dimension_four(self):
        prof = BorderlineProfile(4)
        r = np.geomspace(0.01, 50.0, 30)
        vals, deriv = eval_Utilde(r, 4)
        assert vals == pytest.approx(2.0 * math.sqrt(2.0) * np.arctan(r * r),
                                     rel=1e-10)
        assert prof.k_amp == pytest.approx(4.0 * math.sqrt(2.0), rel=1e-14)
        assert deriv == pytest.approx(prof.k_amp * r / (1.0 + r ** 4), rel=1e-12)

    def test_laplacian_closed_form(self):
        prof = BorderlineProfile(4)
        assert prof.laplacian_closed_form(np.array([1.0]))[0] == pytest.approx(
            4.0 * math.sqrt(2.0), rel=1e-13)
        r = np.geomspace(0.05, 20.0, 25)
        assert prof.laplacian_value(r, 4) == pytest.approx(
            prof.laplacian_closed_form(r), rel=1e-8)

    def test_dimension_floor(self):
        with pytest.raises(ValueError):
            BorderlineProfile(2)


class TestQuotientInvariances:
    def test_translation_and_sign(self):
        p, q, lam = 2.0, 4.0, 1.0
        spec = QuotientSpec(kind="M_pq", p=p, q=q, lam=lam)
        F = CoshExtremal(p, q, lam)
        base = quotient(spec, F)
        assert quotient(spec, Shifted(F, 1.2)) == pytest.approx(base, rel=1e-9)
        assert quotient(spec, LinComb((F,), (-1.0,))) == pytest.approx(base,
                                                                       rel=1e-9)
