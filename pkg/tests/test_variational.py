"""Rayleigh quotients: spec validation, closed forms, the grid minimizer,
rescaled families, and randomized inequality checks."""

import numpy as np
import pytest

from hrl.closed_forms import CoshExtremal
from hrl.emden import sphere_area, transform_Tk
from hrl.functions import DerivativeCombination, PolyGaussian, ScaledArg
from hrl.numerics import Grid, GridFunction
from hrl.params import ProblemParams, critical_exponent, hardy_H
from hrl.variational import (
    FAMILY_KINDS,
    INEQUALITY_KINDS,
    MinimizeError,
    MinimizeOptions,
    QuotientSpec,
    extremal_quotient,
    minimize,
    quotient,
    sharpness_family,
    sobolev_constants,
    verify_inequality,
)

# quadrature value of the (2, 4, 1) line quotient, pinned once
V_241 = 2.309401076758503


class TestSpecValidation:
    def test_m_kinds_need_rate(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="M_pq", p=2.0, q=4.0)
        QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=0.0)  # zero allowed

    def test_semilinear_needs_q_above_p(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="M_pq", p=2.0, q=2.0, lam=1.0)

    def test_j_kinds_need_all_coefficients(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="J_pq", p=2.0, q=4.0, A=0.3, gamma=1.87)
        with pytest.raises(ValueError):
            QuotientSpec(kind="J_p", p=2.0, A=0.3)

    def test_factor_discriminant(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="I_p", p=2.0, A_vec=(0.1,), gamma_vec=(-3.0,))

    def test_hardy1d_needs_weight(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="hardy1d", p=2.0)

    def test_nd_kind_needs_matching_p(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="rellich_nd", p=3.0,
                         params=ProblemParams(5, 2.0, 0.0, k=2))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            QuotientSpec(kind="bogus", p=2.0)


class TestClosedForms:
    def test_linear_kinds(self):
        assert QuotientSpec(kind="M_p", p=1.7, lam=1.3).closed_form() == \
            pytest.approx(abs(1.3) ** 1.7, rel=1e-14)
        assert QuotientSpec(kind="I_p", p=2.0, A_vec=(0.4,),
                            gamma_vec=(0.2,)).closed_form() == \
            pytest.approx(0.2 ** 2, rel=1e-14)
        assert QuotientSpec(kind="M_chain", p=2.0, lam=0.9, A_vec=(0.3,),
                            gamma_vec=(0.5,)).closed_form() == \
            pytest.approx(0.9 ** 2 * 0.5 ** 2, rel=1e-14)
        assert QuotientSpec(kind="hardy1d", p=2.0, a=0.4).closed_form() == \
            pytest.approx(0.09, rel=1e-12)

    def test_constrained_second_order(self):
        # on the constraint surface the value collapses to |gamma/H|^p
        spec = QuotientSpec(kind="J_p", p=2.5, A=0.3, gamma=1.87, H=1.1)
        assert spec.closed_form() == pytest.approx(abs(1.87 / 1.1) ** 2.5,
                                                   rel=1e-13)
        free = QuotientSpec(kind="J_p", p=2.0, A=0.7, gamma=0.0, H=0.0)
        assert free.closed_form() == pytest.approx(1.4 ** 2, rel=1e-13)
        off = QuotientSpec(kind="J_p", p=2.0, A=0.3, gamma=0.4, H=1.1)
        assert off.closed_form() is None

    def test_nd_constants(self):
        spec = QuotientSpec(kind="rellich_nd", p=2.0,
                            params=ProblemParams(5, 2.0, 0.0, k=2))
        assert spec.closed_form() == pytest.approx(1.5625, rel=1e-14)

    def test_degenerate_flags(self):
        assert QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=0.0).degenerate()
        assert QuotientSpec(kind="I_pq", p=2.0, q=3.0, A=0.4,
                            gamma=0.0).degenerate()
        assert QuotientSpec(kind="J_pq", p=2.0, q=4.0, A=0.5, gamma=0.0,
                            H=-1.0).degenerate()
        assert not QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0).degenerate()

    def test_attainment_flags(self):
        assert QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0).attained()
        assert QuotientSpec(kind="M_p", p=2.0, lam=1.0).attained() is False
        assert QuotientSpec(kind="hardy1d", p=2.0, a=0.3).attained() is False
        nd = QuotientSpec(kind="rellich_nd", p=2.0, q=3.0,
                          params=ProblemParams(5, 2.0, 0.0, k=2, q=3.0))
        assert nd.attained()


class TestQuotientEvaluation:
    def test_scaling_invariance(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        g = PolyGaussian(coeffs=(1.0, 0.3), sigma=1.2)
        grid = Grid(L=15.0, N=513)
        gf = GridFunction.from_callable(grid, lambda s: g.value(s, 0))
        scaled = GridFunction(grid, 7.5 * gf.values)
        assert quotient(spec, scaled) == pytest.approx(quotient(spec, gf),
                                                       rel=1e-12)

    def test_line_route_matches_grid_route(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        g = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        line_val = quotient(spec, g)
        grid = Grid(L=20.0, N=2049)
        grid_val = quotient(spec, GridFunction.from_callable(
            grid, lambda s: g.value(s, 0)))
        # grid route differentiates with O(h^2) stencils
        assert grid_val == pytest.approx(line_val, rel=1e-3)

    def test_zero_rate_first_order_bound(self):
        # at (A, gamma) = (0, 1) the product constant is 1; any profile
        # sits at or above it
        spec = QuotientSpec(kind="I_p", p=2.0, A_vec=(0.0,), gamma_vec=(1.0,))
        val = quotient(spec, PolyGaussian(coeffs=(1.0,), sigma=1.0))
        assert val >= 1.0

    def test_line_extremal_attains_reference(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        F = CoshExtremal(2.0, 4.0, 1.0)
        assert quotient(spec, F) == pytest.approx(V_241, rel=1e-9)
        assert extremal_quotient(spec) == pytest.approx(V_241, rel=1e-9)

    def test_grid_quotients_respect_closed_forms(self):
        # every closed-form kind: no grid profile may dip below the constant
        grid = Grid(L=18.0, N=769)
        g = GridFunction.from_callable(
            grid, lambda s: np.exp(-0.4 * s * s) * (1.0 + 0.2 * s))
        cases = [
            QuotientSpec(kind="M_p", p=1.7, lam=1.3),
            QuotientSpec(kind="I_p", p=2.0, A_vec=(0.4,), gamma_vec=(0.2,)),
            QuotientSpec(kind="M_chain", p=2.0, lam=0.9, A_vec=(0.3,),
                         gamma_vec=(0.5,)),
            QuotientSpec(kind="J_p", p=2.5, A=0.3, gamma=1.87, H=1.1),
            QuotientSpec(kind="hardy1d", p=2.0, a=0.4),
        ]
        for spec in cases:
            cf = spec.closed_form()
            assert quotient(spec, g) >= cf - 1e-6 * (1.0 + cf), spec.kind


class TestReductionIdentity:
    def test_nd_quotient_equals_line_quotients(self):
        # order-2 ratio against the first derivative, on the weight line
        # where the drift vanishes: three equivalent computations
        n, p, q = 3, 2.0, 4.0
        alpha = 2.0 * p - n
        params = ProblemParams(n, p, alpha, k=2, j=1, q=q)
        base = PolyGaussian(coeffs=(0.4, 1.0), s0=0.3, sigma=1.2)
        omega = sphere_area(n) ** ((q - p) / q)

        nd = quotient(QuotientSpec(kind="rellich_nd", p=p, q=q, params=params),
                      base)
        constrained = omega * quotient(
            QuotientSpec(kind="J_pq", p=p, q=q, A=(n - 2.0) / 2.0, gamma=0.0,
                         H=0.0), base)
        reduced = omega * quotient(
            QuotientSpec(kind="M_pq", p=p, q=q, lam=float(n - 2)),
            DerivativeCombination(base, (0.0, 1.0)))
        assert nd == pytest.approx(constrained, rel=1e-8)
        assert nd == pytest.approx(reduced, rel=1e-8)


class TestMinimizer:
    def test_recovers_line_constant(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        res = minimize(spec, options=MinimizeOptions(grid=Grid(L=18.0, N=769)))
        assert res.converged
        assert res.value == pytest.approx(V_241, rel=2e-2)
        assert res.attained

    def test_value_matches_minimizer_quotient(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        res = minimize(spec, options=MinimizeOptions(grid=Grid(L=15.0, N=513)))
        assert res.value == pytest.approx(quotient(spec, res.minimizer),
                                          rel=1e-12)

    def test_history_is_monotone(self):
        spec = QuotientSpec(kind="M_pq", p=1.5, q=3.0, lam=-0.8)
        res = minimize(spec, options=MinimizeOptions(grid=Grid(L=15.0, N=513)))
        hist = np.asarray(res.history)
        assert np.all(np.diff(hist) <= 1e-10 * (1.0 + np.abs(hist[:-1])))

    def test_unattained_infimum_approached_from_above(self):
        spec = QuotientSpec(kind="M_p", p=2.0, lam=1.0)
        cf = spec.closed_form()
        vals = []
        for L in (8.0, 16.0):
            res = minimize(spec, options=MinimizeOptions(grid=Grid(L=L, N=513)))
            vals.append(res.value)
        assert vals[0] > vals[1] > cf

    def test_degenerate_spec_reports_not_fails(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=0.0)
        res = minimize(spec, options=MinimizeOptions(grid=Grid(L=10.0, N=257)))
        assert res.degenerate
        assert res.attained is False

    def test_zero_initial_profile_rejected(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0)
        grid = Grid(L=10.0, N=257)
        with pytest.raises(MinimizeError):
            minimize(spec, init=GridFunction(grid, np.zeros(grid.N)),
                     options=MinimizeOptions(grid=grid))


class TestSharpnessFamilies:
    def test_kinds_frozen(self):
        assert FAMILY_KINDS == ("squeeze", "radial", "halfline",
                                "singular_hardy")

    def test_radial_family_descends_toward_constant(self):
        params = ProblemParams(5, 2.0, 0.0, k=2)
        vals = sharpness_family("radial", PolyGaussian(coeffs=(1.0,)),
                                (1e-1, 1e-2), params=params)
        assert vals[0] > vals[1] > 1.5625

    def test_singular_weight_scaling_is_exact_power(self):
        base = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        p = 2.0
        vals = sharpness_family("singular_hardy", base, (1.0, 0.25, 1e-2), p=p)
        assert vals[1] == pytest.approx(0.25 ** p * vals[0], rel=1e-9)
        assert vals[2] == pytest.approx(1e-2 ** p * vals[0], rel=1e-9)

    def test_squeeze_family_vanishes_for_degenerate_spec(self):
        spec = QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=0.0)
        base = PolyGaussian(coeffs=(1.0,), sigma=1.0)
        vals = sharpness_family("squeeze", base, (1.0, 1e-3), spec=spec)
        assert vals[1] < 1e-3 * vals[0]

    def test_halfline_family_approaches_weight_constant(self):
        vals = sharpness_family("halfline", PolyGaussian(coeffs=(1.0,)),
                                (1e-1, 3e-2, 1e-2), a=0.2, p=1.5)
        cf = QuotientSpec(kind="hardy1d", p=1.5, a=0.2).closed_form()
        assert vals[0] > vals[1] > vals[2] > cf
        assert vals[2] == pytest.approx(cf, rel=5e-2)

    def test_epsilon_range_enforced(self):
        with pytest.raises(ValueError):
            sharpness_family("radial", PolyGaussian(coeffs=(1.0,)), (0.0, 0.5),
                             params=ProblemParams(5, 2.0, 0.0, k=2))
        with pytest.raises(ValueError):
            sharpness_family("bogus", PolyGaussian(coeffs=(1.0,)), (0.5,))


class TestInequalityVerification:
    def test_kinds_frozen(self):
        assert INEQUALITY_KINDS == ("hardy", "rellich", "poly",
                                    "halfline_first", "halfline_second")

    def test_first_order_weighted(self):
        report = verify_inequality(ProblemParams(3, 2.0, 0.0), kind="hardy",
                                   samples=25, seed=7)
        assert report.violations == 0
        assert report.constant == pytest.approx(0.25, rel=1e-14)
        assert report.min_quotient >= 0.25

    def test_second_order_weighted(self):
        report = verify_inequality(ProblemParams(5, 2.0, 0.0, k=2),
                                   kind="rellich", samples=15, seed=3)
        assert report.violations == 0
        assert report.min_quotient >= 1.5625 * (1.0 - 1e-6)

    def test_interpolating_order(self):
        report = verify_inequality(ProblemParams(6, 2.5, 1.0), kind="poly",
                                   samples=15, seed=5, m=1)
        expect = abs(6 - (6 + 1.0) / 2.5) ** 2.5
        assert report.constant == pytest.approx(expect, rel=1e-13)
        assert report.violations == 0

    def test_halfline_operators(self):
        for kind in ("halfline_first", "halfline_second"):
            report = verify_inequality(kind=kind, samples=15, seed=11,
                                       tau=1.0, lam=0.5, p=2.0)
            assert report.violations == 0, kind

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            verify_inequality(ProblemParams(3, 2.0), kind="sobolev")

    def test_missing_halfline_parameters(self):
        with pytest.raises(ValueError):
            verify_inequality(kind="halfline_first", tau=1.0)


class TestSobolevConstants:
    def test_second_order_interpolating_case(self):
        params = ProblemParams(5, 2.0, 0.0, k=2, j=1)
        report = sobolev_constants(
            params, options=MinimizeOptions(grid=Grid(L=20.0, N=1025)))
        assert report.converged
        assert report.value > 0.0
        assert report.q == pytest.approx(critical_exponent(params, 1))
        omega = sphere_area(5) ** ((report.q - 2.0) / report.q)
        assert report.omega_factor == pytest.approx(omega, rel=1e-12)
        assert report.value == pytest.approx(
            report.one_d_value * report.omega_factor, rel=1e-12)
        # critical exponent means the lower-order weight vanishes
        assert report.beta == pytest.approx(0.0, abs=1e-12)

    def test_weighted_case_rejected(self):
        with pytest.raises(ValueError):
            sobolev_constants(ProblemParams(5, 2.0, 1.0, k=1))
