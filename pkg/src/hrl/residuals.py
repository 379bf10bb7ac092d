"""Euler-Lagrange residuals, conservation checks, and integrability flags
for the explicit extremal profiles.

Every check here evaluates an identity the closed forms are supposed to
satisfy and reports the worst deviation over a sample grid, normalized
pointwise by the largest participating term so that a residual is never
small merely because every term vanishes.  Derivatives of the profiles
themselves are analytic; outer derivatives of nonlinear fluxes are
finite-differenced (five-point stencils), so halving the step should
shrink a clean report by roughly sixteen and certainly by more than
three; a report that refuses to shrink is flagging a modeling error,
not discretization noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .params import (ProblemParams, beta_exponent, positivity_check)
from .closed_forms import (BorderlineProfile, ConvolutionExtremal,
                           CoshExtremal, hamiltonian)
from .emden import RadialProfile
from .numerics import (DEFAULT_QUADRATURE, Grid, GridFunction,
                       QuadratureConfig, derivative_matrix, integrate_line,
                       odd_power)

__all__ = [
    "ResidualReport", "FSystemReport", "HLEReport",
    "default_radial_grid", "default_line_grid",
    "residual_f_system", "residual_g_equation", "g_identity_residual",
    "residual_radial_p_laplace", "residual_radial_biharmonic",
    "phi_identity_residual", "hle_system_check", "integrability_flags",
]


def default_radial_grid() -> np.ndarray:
    """400 log-uniform sample radii on [1e-2, 1e2]."""
    return np.geomspace(1e-2, 1e2, 400)


def default_line_grid() -> np.ndarray:
    """2001 uniform sample points on [-25, 25]."""
    return np.linspace(-25.0, 25.0, 2001)


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    max_rel: float
    sample_points: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class FSystemReport:
    """First-order system residual plus the conserved-energy residual."""
    system: ResidualReport
    conservation: ResidualReport


def _report(points: np.ndarray, residuals: np.ndarray,
            scales: np.ndarray) -> ResidualReport:
    """max_rel divides by the pointwise term scale floored at 1e-12 of its
    global maximum: far-tail samples sit at the quadrature noise floor,
    and dividing noise by noise there would report ratios of order one
    for residuals that are absolutely negligible."""
    residuals = np.asarray(residuals, dtype=float)
    floor = 1e-12 * max(float(np.max(scales)), 1e-270)
    rel = np.abs(residuals) / np.maximum(scales, floor)
    return ResidualReport(max_abs=float(np.max(np.abs(residuals))),
                          max_rel=float(np.max(rel)),
                          sample_points=np.asarray(points, dtype=float),
                          residuals=residuals)


def _diff5(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
           h: np.ndarray) -> np.ndarray:
    """Five-point central first derivative with per-point step."""
    return (fun(x - 2.0 * h) - 8.0 * fun(x - h)
            + 8.0 * fun(x + h) - fun(x + 2.0 * h)) / (12.0 * h)


def _diff5_second(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                  h: np.ndarray) -> np.ndarray:
    """Five-point central second derivative with per-point step."""
    return (-fun(x + 2.0 * h) + 16.0 * fun(x + h) - 30.0 * fun(x)
            + 16.0 * fun(x - h) - fun(x - 2.0 * h)) / (12.0 * h * h)


# -- first-order extremal ----------------------------------------------------


def residual_f_system(F: CoshExtremal, s_grid: Optional[np.ndarray] = None,
                      phi_mode: str = "analytic",
                      fd_step: float = 1e-3) -> FSystemReport:
    """Residuals of the first-order Hamiltonian system at the profile F.

    The pair (f, phi) with phi the conjugate momentum must satisfy

        f' = lam f + |phi|^{p'-2} phi,
        -phi' = lam phi + |f|^{q-2} f,

    and the energy lam f phi + |f|^q/q + |phi|^{p'}/p' is conserved; the
    orbit is homoclinic to 0, so the conserved value is exactly zero and
    the conservation report is an absolute check.  f-derivatives are
    always analytic; phi' is analytic by default and five-point
    differenced when phi_mode = "differenced".
    """
    if phi_mode not in ("analytic", "differenced"):
        raise ValueError("phi_mode must be 'analytic' or 'differenced'")
    s = default_line_grid() if s_grid is None else np.asarray(s_grid, float)
    p, q, lam = F.p, F.q, F.lam
    pc = p / (p - 1.0)
    f0 = F.value(s, 0)
    f1 = F.value(s, 1)
    phi0 = F.phi(s, 0)
    if phi_mode == "analytic":
        phi1 = F.phi(s, 1)
    else:
        h = np.full_like(s, fd_step)
        phi1 = _diff5(lambda x: F.phi(x, 0), s, h)
    r1 = f1 - lam * f0 - odd_power(phi0, pc)
    r2 = -phi1 - lam * phi0 - odd_power(f0, q)
    s1 = np.maximum(np.abs(f1), np.maximum(np.abs(lam * f0),
                                           np.abs(phi0) ** (pc - 1.0)))
    s2 = np.maximum(np.abs(phi1), np.maximum(np.abs(lam * phi0),
                                             np.abs(f0) ** (q - 1.0)))
    system = _report(s, np.maximum(np.abs(r1), np.abs(r2)),
                     np.maximum(s1, s2))

    energy = hamiltonian(f0, phi0, lam, p, q)
    e_scale = np.maximum(np.abs(lam * f0 * phi0),
                         np.maximum(np.abs(f0) ** q / q,
                                    np.abs(phi0) ** pc / pc))
    conservation = _report(s, energy, np.maximum(e_scale, 1.0))
    return FSystemReport(system=system, conservation=conservation)


# -- second-order extremal ---------------------------------------------------


def _g_orders(G: ConvolutionExtremal,
              s: np.ndarray) -> Tuple[np.ndarray, ...]:
    """(G, G', G'', G''') with a single quadrature pass for the order-0
    values; higher orders come from the derivative recursion against the
    analytic first-order profile."""
    sgn = math.copysign(1.0, G.H)
    g0 = G.value(s, 0)
    f0 = G.F.value(s, 0)
    f1 = G.F.value(s, 1)
    f2 = G.F.value(s, 2)
    g1 = sgn * f0 - G.H * g0
    g2 = sgn * f1 - G.H * g1
    g3 = sgn * f2 - G.H * g2
    return g0, g1, g2, g3


def residual_g_equation(G: ConvolutionExtremal,
                        s_grid: Optional[np.ndarray] = None) -> ResidualReport:
    """Residual of the second-order Euler-Lagrange equation at G:

        (|w|^{p-2} w)' + (gamma/H) |w|^{p-2} w - |B|^{q-2} B,
        w = -(G'' - 2A G' - gamma G),  B = G' + H G.

    The compatibility constraint on (A, gamma, H) is enforced by the
    profile's own constructor.
    """
    s = default_line_grid() if s_grid is None else np.asarray(s_grid, float)
    p, q = G.p, G.q
    A, gamma, H = G.A, G.gamma, G.H
    g0, g1, g2, g3 = _g_orders(G, s)
    w = -(g2 - 2.0 * A * g1 - gamma * g0)
    wp = -(g3 - 2.0 * A * g2 - gamma * g1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (p - 1.0) * np.abs(w) ** (p - 2.0) * wp
    t2 = (gamma / H) * odd_power(w, p)
    b = g1 + H * g0
    t3 = odd_power(b, q)
    res = t1 + t2 - t3
    scale = np.maximum(np.abs(t1), np.maximum(np.abs(t2), np.abs(t3)))
    return _report(s, res, scale)


def g_identity_residual(G: ConvolutionExtremal,
                        s_grid: Optional[np.ndarray] = None,
                        fd_step: float = 5e-3) -> ResidualReport:
    """Residual of the factorization identity G' + H G = (sign H) F.

    G' is five-point differenced from order-0 quadrature values, so the
    check is independent of the derivative recursion that the equation
    residual leans on.  The mirrored branch (H < 0) reproduces the
    reflected first-order profile, hence the sign factor.
    """
    s = default_line_grid() if s_grid is None else np.asarray(s_grid, float)
    h = np.full_like(s, fd_step)
    g1 = _diff5(lambda x: G.value(x, 0), s, h)
    b = g1 + G.H * G.value(s, 0)
    f0 = math.copysign(1.0, G.H) * G.F.value(s, 0)
    res = b - f0
    scale = np.maximum(np.abs(b), np.abs(f0))
    return _report(s, res, scale)


# -- radial equations --------------------------------------------------------


def residual_radial_p_laplace(U: RadialProfile, params: ProblemParams,
                              r_grid: Optional[np.ndarray] = None,
                              fd_step: float = 1e-3) -> ResidualReport:
    """Strong-form residual of the weighted second-order equation

        -r^{1-n} (r^{n-1+alpha} |U'|^{p-2} U')' = r^{w} |U|^{q-2} U,
        w = -n + q (n - p + alpha)/p,

    with analytic U' inside the flux and a five-point differenced outer
    derivative (step fd_step relative to r).
    """
    if params.q is None:
        raise ValueError("params.q is required")
    n, p, alpha, q = params.n, params.p, params.alpha, params.q
    r = default_radial_grid() if r_grid is None else np.asarray(r_grid, float)

    def flux(x: np.ndarray) -> np.ndarray:
        return x ** (n - 1.0 + alpha) * odd_power(U.value(x, 1), p)

    vp = _diff5(flux, r, fd_step * r)
    t1 = -r ** (1.0 - n) * vp
    w = -n + q * (n - p + alpha) / p
    t2 = r ** w * odd_power(U.value(r, 0), q)
    res = t1 - t2
    scale = np.maximum(np.abs(t1), np.abs(t2))
    return _report(r, res, scale)


_TEST_BANK_WIDTH = 0.7


def _test_bank(n_tests: int) -> np.ndarray:
    """Centers (in log r) of the radial test-function bank."""
    return np.linspace(-2.0, 2.0, n_tests)


def residual_radial_biharmonic(U: RadialProfile, params: ProblemParams,
                               form: str = "weak",
                               r_grid: Optional[np.ndarray] = None,
                               fd_step: float = 1e-3, n_tests: int = 10,
                               config: QuadratureConfig = DEFAULT_QUADRATURE
                               ) -> ResidualReport:
    """Residual of the weighted fourth-order equation

        Delta(r^alpha |Delta U|^{p-2} Delta U)
            + div(r^{-beta} |grad U|^{q-2} grad U) = 0

    with beta the first-order denominator exponent.  The default weak
    form tests the equation against a bank of log-Gaussian radial bumps
    (two integrations by parts move all outer derivatives onto the test
    functions, so only analytic U', Delta U enter); the strong form
    differences the fluxes directly and is noisier near r = 0.
    """
    if params.q is None:
        raise ValueError("params.q is required")
    if form not in ("weak", "strong"):
        raise ValueError("form must be 'weak' or 'strong'")
    n, p, alpha, q = params.n, params.p, params.alpha, params.q
    beta = beta_exponent(params, 1)

    def lap(x: np.ndarray) -> np.ndarray:
        return U.value(x, 2) + (n - 1.0) / x * U.value(x, 1)

    if form == "strong":
        r = (default_radial_grid() if r_grid is None
             else np.asarray(r_grid, float))

        def wflux(x: np.ndarray) -> np.ndarray:
            return x ** alpha * odd_power(lap(x), p)

        def vflux(x: np.ndarray) -> np.ndarray:
            return x ** (n - 1.0 - beta) * odd_power(U.value(x, 1), q)

        h = fd_step * r
        wp = _diff5(wflux, r, h)
        wpp = _diff5_second(wflux, r, h)
        t1 = wpp + (n - 1.0) / r * wp
        t2 = r ** (1.0 - n) * _diff5(vflux, r, h)
        res = t1 + t2
        scale = np.maximum(np.abs(t1), np.abs(t2))
        return _report(r, res, scale)

    sig = _TEST_BANK_WIDTH
    centers = _test_bank(n_tests)
    res = np.empty(n_tests)
    scales = np.empty(n_tests)
    for i, c in enumerate(centers):
        def chi(t: float) -> Tuple[float, float, float]:
            z = (t - c) / sig
            v = math.exp(-0.5 * z * z)
            return v, -z / sig * v, (z * z - 1.0) / (sig * sig) * v

        def lead(t: float) -> float:
            # r^{n+alpha-2} |Delta U|^{p-2} Delta U (psi_tt + (n-2) psi_t)
            r_ = math.exp(t)
            _, dt, dtt = chi(t)
            m = float(odd_power(lap(np.asarray(r_)), p))
            return r_ ** (n + alpha - 2.0) * m * (dtt + (n - 2.0) * dt)

        def lower(t: float) -> float:
            # r^{n-beta-1} |U'|^{q-2} U' psi_t
            r_ = math.exp(t)
            _, dt, _ = chi(t)
            m = float(odd_power(U.value(np.asarray(r_), 1), q))
            return r_ ** (n - beta - 1.0) * m * dt

        window = (c - 8.0 * sig, c + 8.0 * sig)
        i1 = integrate_line(lead, config, interval=window)
        i2 = integrate_line(lower, config, interval=window)
        a1 = integrate_line(lambda t: abs(lead(t)), config, interval=window)
        a2 = integrate_line(lambda t: abs(lower(t)), config, interval=window)
        res[i] = i1 - i2
        scales[i] = max(a1, a2)
    return _report(centers, res, scales)


def phi_identity_residual(n: int = 4,
                          r_grid: Optional[np.ndarray] = None,
                          fd_step: float = 1e-3) -> ResidualReport:
    """Residual of the borderline momentum identity at p = n/2:

        (|Delta U|^{p-2} Delta U)' + |U'|^{q*-2} U' = 0,

    where q* is the critical exponent for the order gap 1 (q* = n at the
    borderline).  The Laplacian enters through its closed form and the
    outer derivative is five-point differenced.
    """
    prof = BorderlineProfile(n)
    p = n / 2.0
    qstar = float(n)
    r = (np.geomspace(1e-2, 5e1, 400) if r_grid is None
         else np.asarray(r_grid, float))

    def momentum(x: np.ndarray) -> np.ndarray:
        return odd_power(prof.laplacian_closed_form(x), p)

    mp = _diff5(momentum, r, fd_step * r)
    t2 = odd_power(prof.value(r, 1), qstar)
    res = mp + t2
    scale = np.maximum(np.abs(mp), np.abs(t2))
    return _report(r, res, scale)


# -- second-order system bookkeeping ----------------------------------------


@dataclass(frozen=True)
class HLEReport:
    """Exponent bookkeeping of the coupled second-order system, plus weak
    residuals of the system at a supplied minimizer."""
    a: float
    b: float
    hyperbola_residual: float
    admissible: bool
    system: Optional[ResidualReport] = None
    closure_max: Optional[float] = None


def hle_system_check(params: ProblemParams,
                     minimizer: Optional[GridFunction] = None,
                     n_tests: int = 10) -> HLEReport:
    """Checks of the equivalent coupled system for the fourth-order
    problem: u paired with v = -r^alpha |Delta u|^{p-2} Delta u solves

        -Delta u = r^a |v|^{p'-2} v,      a = -alpha/(p-1),
        -Delta v = r^b |u|^{q-2} u,       b = -(order-2 denominator exponent),

    and the exponents sit on the line (a+n)/p' + (b+n)/q = n-2
    identically in the parameters.

    With a grid minimizer of the order-(2,0) quotient supplied, the
    minimizer is rescaled so the Euler-Lagrange multiplier (the ratio
    of its numerator and denominator line integrals) becomes one, and
    the second equation is tested weakly against the log-Gaussian bank;
    the first equation is algebraic (it closes the definition of v), so
    its round-trip maximum is reported separately as ``closure_max``.
    """
    if params.q is None or not params.q > params.p:
        raise ValueError("params.q > p is required")
    n, p, alpha, q = params.n, params.p, params.alpha, params.q
    pc = p / (p - 1.0)
    a = -alpha / (p - 1.0)
    b = -beta_exponent(params, 2)
    hyper = (a + n) / pc + (b + n) / q - (n - 2.0)
    tol = 1e-10 * (1.0 + abs(a) + abs(b) + n)
    admissible = abs(a + n) > tol and abs(b + n) > tol
    if minimizer is None:
        return HLEReport(a=a, b=b, hyperbola_residual=hyper,
                         admissible=admissible)

    grid = minimizer.grid
    s = grid.points()
    d1 = derivative_matrix(grid, 1)
    d2 = derivative_matrix(grid, 2)
    H = (n + alpha) / p - 2.0
    g0 = minimizer.values
    d1g = d1 @ g0
    d2g = d2 @ g0
    # u = r^{-H} g(-log r):  Delta u = r^{-(H+2)} Lg,
    # L = H(H+2-n) + (2H+2-n) d/ds + d^2/ds^2
    lap0 = H * (H + 2.0 - n) * g0 + (2.0 * H + 2.0 - n) * d1g + d2g
    num = float(np.trapezoid(np.abs(lap0) ** p, dx=grid.h))
    den = float(np.trapezoid(np.abs(g0) ** q, dx=grid.h))
    if den <= 0.0:
        raise ValueError("minimizer is identically zero")
    scale = (num / den) ** (1.0 / (q - p))
    gv = scale * g0
    g1 = scale * d1g
    g2 = scale * d2g
    lap_u = scale * lap0
    av = (H + 2.0) * (p - 1.0) - alpha
    phi = -odd_power(lap_u, p)
    p1 = d1 @ phi
    p2 = d2 @ phi
    lap_v = av * (av + 2.0 - n) * phi + (2.0 * av + 2.0 - n) * p1 + p2

    def expc(e: float) -> np.ndarray:
        return np.exp(np.clip(e * s, -700.0, 700.0))

    # all r-powers written as exponentials of s = -log r;
    # residual integrand is (-Delta v) - r^b |u|^{q-2} u, times r^{n-1} dr
    termB1 = -lap_v * expc(av + 2.0 - n)
    termB2 = odd_power(gv, q) * expc(H * (q - 1.0) - b - n)
    # closure of the first equation: r^a |v|^{p'-2} v must reproduce
    # -Delta u after the odd-power round trip
    rhsA = odd_power(phi, pc) * expc(H + 2.0 - n)
    lhsA = -lap_u * expc(H + 2.0 - n)
    closure = float(np.max(np.abs(lhsA - rhsA)))

    h = grid.h
    wts = np.full(len(s), h)
    wts[0] = wts[-1] = h / 2.0
    centers = _test_bank(n_tests)
    sig = _TEST_BANK_WIDTH
    res = np.empty(n_tests)
    scales = np.empty(n_tests)
    for i, c in enumerate(centers):
        chi = np.exp(-0.5 * ((s - c) / sig) ** 2)
        i1 = float(wts @ (chi * termB1))
        i2 = float(wts @ (chi * termB2))
        res[i] = i1 - i2
        scales[i] = max(float(wts @ np.abs(chi * termB1)),
                        float(wts @ np.abs(chi * termB2)))
    report = _report(centers, res, scales)
    return HLEReport(a=a, b=b, hyperbola_residual=hyper,
                     admissible=admissible, system=report,
                     closure_max=closure)


# -- integrability classification -------------------------------------------


def _tail_class(shells: List[float]) -> bool:
    """True when the shell increments indicate a convergent integral.

    Log-divergent integrals produce near-constant increments per decade;
    convergent ones decay geometrically or vanish outright.
    """
    total = sum(shells)
    last, prev = shells[-1], shells[-2]
    if last <= max(1e-9 * total, 1e-300):
        return True
    return last < 0.4 * prev


def integrability_flags(U: RadialProfile, params: ProblemParams,
                        decades: int = 5,
                        config: QuadratureConfig = DEFAULT_QUADRATURE
                        ) -> Tuple[bool, bool, bool]:
    """Convergence flags (True = finite) of the three weighted energies

        int |Delta U|^p dx,  int r^{-p} |grad U|^p dx,  int r^{-2p} |U|^p dx

    classified by comparing quadrature increments over growing decade
    shells [10^m, 10^{m+1}] and [10^{-m-1}, 10^{-m}] against a
    divergence detector (constant increments mean logarithmic growth).
    """
    n, p = params.n, params.p

    def f_lap(r: float) -> float:
        x = np.asarray(r)
        d = float(U.value(x, 2) + (n - 1.0) / r * U.value(x, 1))
        return abs(d) ** p * r ** (n - 1.0)

    def f_grad(r: float) -> float:
        return (abs(float(U.value(np.asarray(r), 1))) ** p
                * r ** (n - 1.0 - p))

    def f_val(r: float) -> float:
        return (abs(float(U.value(np.asarray(r), 0))) ** p
                * r ** (n - 1.0 - 2.0 * p))

    flags = []
    for f in (f_lap, f_grad, f_val):
        shells = []
        for m in range(decades):
            lo, hi = 10.0 ** m, 10.0 ** (m + 1)
            outer = integrate_line(f, config, interval=(lo, hi))
            inner = integrate_line(f, config, interval=(1.0 / hi, 1.0 / lo))
            shells.append(outer + inner)
        flags.append(_tail_class(shells))
    return tuple(flags)
