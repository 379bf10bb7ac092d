"""Rayleigh quotients of the reduced one-dimensional problems, a grid
minimizer for the attained ones, rescaled families that expose sharpness
of the non-attained ones, and randomized inequality verification.

Quotient kinds (all ratios are homogeneous of degree zero):

    M_p        int |g' - lam g|^p ds / int |g|^p ds
    M_pq       int |g' - lam g|^p ds / (int |g|^q ds)^{p/q}
    I_p        int |L g|^p ds / int |g|^p ds,   L = prod (D^2 - 2A_h D - gamma_h)
    I_pq       same numerator (single factor) over the L^q denominator
    J_p        int |L g|^p ds / int |g' + H g|^p ds
    J_pq       int |L g|^p ds / (int |g' + H g|^q ds)^{p/q}
    M_chain    int |LL g' - lam LL g|^p ds / int |g|^p ds
    hardy1d    the weighted half-line ratio int r^a |v'|^p dr / int r^{a-p}|v|^p dr,
               reduced by v(r) = r^{-c} g(-log r) to M_p with rate (p-1-a)/p
    rellich_nd the n-dimensional weighted ratio of a transported profile,
               int |x|^alpha |nabla^k u|^p dx over the order-j weighted
               L^q norm, u = r^{-H} g(-log r)

Closed-form infima, where they exist, live on ``QuotientSpec.closed_form``;
kinds whose infimum is zero (a vanishing gamma factor, a zero rate) are
flagged degenerate and are never minimized.  The minimizer runs projected
gradient descent on the manifold {denominator = 1}; degree-0 homogeneity
makes the renormalization after each step loss-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .closed_forms import ConvolutionExtremal, CoshExtremal
from .emden import (OperatorChain, PoweredRadial, TransportedProfile,
                    norm_chain, radial_power_integral, sphere_area)
from .functions import (DerivativeCombination, ExpLine, LineFunction,
                        PolyGaussian, PolynomialBump, ScaledArg)
from .numerics import (DEFAULT_QUADRATURE, Grid, GridFunction,
                       QuadratureConfig, derivative_matrix, integrate_line,
                       odd_power)
from .params import (ProblemParams, beta_exponent, gamma_h, hardy_H,
                     hardy_halfline_constant, intermediate_constant,
                     positivity_check, rellich_constant)

KINDS = ("M_p", "M_pq", "I_p", "I_pq", "J_p", "J_pq",
         "M_chain", "hardy1d", "rellich_nd")
_SEMILINEAR = ("M_pq", "I_pq", "J_pq")

_COEFF_SEED = ExpLine(0.0)  # carrier for coefficient-only computations


class MinimizeError(RuntimeError):
    """Raised when the descent diverges or the spec admits no descent."""


def _canonical_kind(kind: str) -> str:
    for k in KINDS:
        if kind.lower() == k.lower():
            return k
    raise ValueError(f"unknown quotient kind {kind!r}")


@dataclass(frozen=True)
class QuotientSpec:
    """One reduced quotient with its parameters.

    Only the fields a kind needs must be set: lam for M-kinds, (A, gamma)
    for I-kinds, (A, gamma, H) for J-kinds, factor vectors for chains,
    the weight exponent a for hardy1d, and params for rellich_nd.
    """

    kind: str
    p: float
    q: Optional[float] = None
    lam: Optional[float] = None
    A: Optional[float] = None
    gamma: Optional[float] = None
    H: Optional[float] = None
    A_vec: Tuple[float, ...] = ()
    gamma_vec: Tuple[float, ...] = ()
    a: Optional[float] = None
    params: Optional[ProblemParams] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _canonical_kind(self.kind))
        object.__setattr__(self, "A_vec", tuple(float(x) for x in self.A_vec))
        object.__setattr__(self, "gamma_vec",
                           tuple(float(x) for x in self.gamma_vec))
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.kind in _SEMILINEAR:
            if self.q is None or not self.q > self.p:
                raise ValueError(f"{self.kind} needs q > p")
        elif self.kind == "rellich_nd":
            if self.q is not None and not self.q > self.p:
                raise ValueError("q must exceed p when given")
        elif self.q is not None:
            raise ValueError(f"{self.kind} takes no q")
        if self.kind in ("M_p", "M_pq", "M_chain") and self.lam is None:
            raise ValueError(f"{self.kind} needs lam")
        if self.kind in ("I_pq", "J_p", "J_pq"):
            if self.A is None or self.gamma is None:
                raise ValueError(f"{self.kind} needs A and gamma")
        if self.kind in ("J_p", "J_pq") and self.H is None:
            raise ValueError(f"{self.kind} needs H")
        if self.kind == "M_chain" and not self.A_vec:
            raise ValueError("M_chain needs factor vectors")
        if self.kind == "I_p" and not self.A_vec and (self.A is None
                                                      or self.gamma is None):
            raise ValueError("I_p needs (A, gamma) or factor vectors")
        if self.kind == "hardy1d" and self.a is None:
            raise ValueError("hardy1d needs the weight exponent a")
        if self.kind == "rellich_nd":
            if self.params is None:
                raise ValueError("rellich_nd needs params")
            if self.params.p != self.p:
                raise ValueError("p must match params.p")
            pq = self.params.q
            if self.q is not None and pq is not None and self.q != pq:
                raise ValueError("q conflicts with params.q")
        if len(self.A_vec) != len(self.gamma_vec):
            raise ValueError("factor vectors must have equal length")
        for A, g in self.factors():
            if A * A + g < 0:
                raise ValueError(f"A^2 + gamma < 0 for factor ({A}, {g})")

    # -- structure -------------------------------------------------------

    def factors(self) -> Tuple[Tuple[float, float], ...]:
        """The second-order factors (A_h, gamma_h) the numerator uses."""
        if self.kind in ("I_p", "M_chain") and self.A_vec:
            return tuple(zip(self.A_vec, self.gamma_vec))
        if self.kind in ("I_p", "I_pq", "J_p", "J_pq"):
            return ((float(self.A), float(self.gamma)),)
        return ()

    @property
    def mu(self) -> float:
        """Reduced first-order rate of the half-line Hardy quotient."""
        if self.kind != "hardy1d":
            raise ValueError("mu is defined for hardy1d only")
        return (self.p - 1.0 - self.a) / self.p

    def den_power(self) -> float:
        if self.kind in _SEMILINEAR:
            return float(self.q)
        if self.kind == "rellich_nd":
            qq = self.q if self.q is not None else self.params.q
            return float(qq) if qq is not None else float(self.p)
        return float(self.p)

    def _j(self) -> int:
        return self.params.j if self.params.j is not None else 0

    def numerator_coeffs(self) -> np.ndarray:
        """Coefficients c_m of the numerator operator sum c_m d^m/ds^m."""
        if self.kind in ("M_p", "M_pq"):
            return np.array([-self.lam, 1.0])
        if self.kind == "hardy1d":
            return np.array([-self.mu, 1.0])
        if self.kind in ("I_pq", "J_p", "J_pq"):
            return OperatorChain((self.A,), (self.gamma,)).op_coeffs()
        if self.kind == "I_p":
            A_vec, g_vec = zip(*self.factors())
            return OperatorChain(A_vec, g_vec).op_coeffs()
        if self.kind == "M_chain":
            return OperatorChain(self.A_vec, self.gamma_vec,
                                 ("lambda", self.lam)).op_coeffs()
        return norm_chain(self.params).op_coeffs()

    def denominator_coeffs(self) -> np.ndarray:
        if self.kind in ("J_p", "J_pq"):
            return np.array([self.H, 1.0])
        if self.kind == "rellich_nd" and self._j() > 0:
            return _carrier_coeffs(self.params, self._j())
        return np.array([1.0])

    def omega_factor(self) -> float:
        """Sphere-measure bookkeeping of the n-dimensional ratio."""
        if self.kind != "rellich_nd":
            return 1.0
        qq = self.den_power()
        return sphere_area(self.params.n) ** ((qq - self.p) / qq)

    # -- known values ----------------------------------------------------

    def _tol(self) -> float:
        scale = sum(abs(x) for x in (self.lam or 0.0, self.A or 0.0,
                                     self.gamma or 0.0, self.H or 0.0))
        return 1e-12 * (1.0 + scale)

    def closed_form(self) -> Optional[float]:
        """The infimum where it is known in closed form, else None."""
        p, tol = self.p, self._tol()
        if self.kind == "M_p":
            return abs(self.lam) ** p
        if self.kind == "hardy1d":
            return hardy_halfline_constant(self.a, p)
        if self.kind == "I_p":
            out = 1.0
            for _, g in self.factors():
                out *= abs(g) ** p
            return out
        if self.kind == "M_chain":
            out = abs(self.lam) ** p
            for g in self.gamma_vec:
                out *= abs(g) ** p
            return out
        if self.kind == "J_p":
            if abs(self.gamma) <= tol and abs(self.H) <= tol:
                return abs(2.0 * self.A) ** p
            if abs(self.H) > tol and abs(self.H ** 2 + 2.0 * self.A * self.H
                                         - self.gamma) <= tol:
                return abs(self.gamma / self.H) ** p
            return None
        if self.kind == "M_pq" and abs(self.lam) <= tol:
            return 0.0
        if self.kind == "I_pq" and abs(self.gamma) <= tol:
            return 0.0
        if self.kind == "J_pq" and abs(self.gamma) <= tol \
                and abs(self.H + 2.0 * self.A) <= tol:
            return 0.0
        if self.kind == "rellich_nd" and self.den_power() == self.p:
            if self._j() == 0:
                return rellich_constant(self.params).value
            return intermediate_constant(self.params).value
        return None

    def degenerate(self) -> bool:
        """True when the infimum is zero and no minimizer exists."""
        cf = self.closed_form()
        if cf is not None and cf == 0.0:
            return True
        if self.kind in _SEMILINEAR or self.kind == "M_chain":
            if any(abs(g) <= self._tol() for _, g in self.factors()):
                return True
        if self.kind == "J_pq" and abs(self.gamma) <= self._tol() \
                and abs(self.H) <= self._tol() and abs(self.A) <= self._tol():
            return True  # collapses to a zero-rate first-order quotient
        if self.kind == "rellich_nd" and self.den_power() > self.p:
            return not positivity_check(self.params)[0]
        return False

    def attained(self) -> Optional[bool]:
        """Whether the infimum is attained; None when not settled."""
        tol = self._tol()
        if self.degenerate():
            return False
        if self.kind in ("M_p", "hardy1d"):
            return False
        if self.kind == "I_p":
            return False if len(self.factors()) == 1 else None
        if self.kind == "M_pq":
            return abs(self.lam) > tol
        if self.kind == "I_pq":
            return abs(self.gamma) > tol
        if self.kind == "J_pq":
            if abs(self.gamma) > tol:
                return True
            return False  # zero gamma: limit of first-order profiles
        if self.kind == "rellich_nd":
            if self.den_power() == self.p:
                return False
            return positivity_check(self.params)[0]
        return None

    def decay_rate_hint(self) -> float:
        """Expected exponential decay rate of a minimizer, for seeding."""
        rates: List[float] = []
        if self.lam is not None:
            rates.append(abs(self.lam))
        if self.H is not None:
            rates.append(abs(self.H))
        for A, g in self.factors():
            rates.append(math.sqrt(A * A + g))
        if self.kind == "hardy1d":
            rates.append(abs(self.mu))
        if self.kind == "rellich_nd":
            ch = norm_chain(self.params)
            for A, g in zip(ch.A_vec, ch.gamma_vec):
                rates.append(math.sqrt(A * A + g))
            if ch.first_order is not None:
                rates.append(abs(ch.first_order[1]))
        rates = [r for r in rates if r > 1e-12]
        return min(rates) if rates else 1.0

    def decay_pair(self) -> Tuple[float, float]:
        """Left and right decay rates (s -> -inf, s -> +inf) of the expected
        minimizer.

        Seeding the descent with the matching asymmetric profile is not a
        cosmetic speedup: the first-order kinds are mirror symmetric as
        functionals (s -> -s swaps the sign of the rate), so the best even
        profile is a stationary saddle, and a symmetric start never leaves
        its invariant subspace.
        """
        tol = self._tol()
        roots: List[float] = []
        if self.kind in ("M_p", "M_pq", "M_chain") and self.lam is not None:
            lam = self.lam
            if abs(lam) > tol and self.p > 1.0:
                # sech-power extremal rates: lam on one side, lam/(p-1) on
                # the other, sides swapping with the sign of lam
                if lam > 0:
                    return (lam, lam / (self.p - 1.0))
                return (-lam / (self.p - 1.0), -lam)
        if self.kind == "hardy1d" and self.mu is not None:
            mu = self.mu
            if abs(mu) > tol and self.p > 1.0:
                if mu > 0:
                    return (mu, mu / (self.p - 1.0))
                return (-mu / (self.p - 1.0), -mu)
        for A, g in self.factors():
            r = math.sqrt(max(A * A + g, 0.0))
            roots.extend((A + r, A - r))
        if self.kind == "rellich_nd":
            ch = norm_chain(self.params)
            for A, g in zip(ch.A_vec, ch.gamma_vec):
                r = math.sqrt(max(A * A + g, 0.0))
                roots.extend((A + r, A - r))
            if ch.first_order is not None:
                roots.append(ch.first_order[1])
        hint = self.decay_rate_hint()
        left = min([r for r in roots if r > tol], default=hint)
        right = min([-r for r in roots if r < -tol], default=hint)
        return (left, right)


def _carrier_coeffs(params: ProblemParams, j: int) -> np.ndarray:
    """Line coefficients of the flat carrier of the j-th derivative stack
    of a transported order-k profile (sign convention of the stack)."""
    pr = PoweredRadial(_COEFF_SEED, float((params.n + params.alpha) / params.p
                                          - params.k), (1.0,))
    for _ in range(j // 2):
        pr = pr.laplacian(params.n)
    if j % 2:
        pr = pr.derivative()
    return np.asarray(pr.coeffs, dtype=float)


# -- quotient evaluation ---------------------------------------------------


def _trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.N, grid.h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _diff_power(grid: Grid, order: int) -> scipy.sparse.csr_matrix:
    if order <= 4:
        return derivative_matrix(grid, order)
    M = derivative_matrix(grid, 4)
    rem = order - 4
    while rem >= 2:
        M = (derivative_matrix(grid, 2) @ M).tocsr()
        rem -= 2
    if rem:
        M = (derivative_matrix(grid, 1) @ M).tocsr()
    return M


def _operator_matrix(grid: Grid, coeffs: np.ndarray) -> scipy.sparse.csr_matrix:
    op = coeffs[0] * scipy.sparse.identity(grid.N, format="csr")
    for m, c in enumerate(coeffs[1:], start=1):
        if c != 0.0:
            op = op + c * _diff_power(grid, m)
    return op.tocsr()


def _staggered_ops(grid: Grid, coeffs: np.ndarray
                   ) -> Tuple[scipy.sparse.csr_matrix,
                              scipy.sparse.csr_matrix, np.ndarray]:
    """Midpoint discretization (c0 + c1 d/ds, identity) for first-order
    numerators: forward difference and two-point average, second-order
    accurate at cell centers.

    The centered first-difference matrix has a checkerboard null mode, so
    descent on a quotient whose top numerator order is one can park
    denominator mass in grid-scale oscillation that the numerator never
    sees and dive below the true infimum.  The staggered pair has no null
    mode.  Higher-order numerators are immune: their leading term contains
    the three-point second difference, which blows up on the checkerboard.
    """
    N, h = grid.N, grid.h
    ones = np.ones(N - 1)
    rows = np.repeat(np.arange(N - 1), 2)
    cols = np.column_stack([np.arange(N - 1),
                            np.arange(1, N)]).ravel()
    diff = scipy.sparse.csr_matrix(
        (np.column_stack([-ones, ones]).ravel() / h, (rows, cols)),
        shape=(N - 1, N))
    avg = scipy.sparse.csr_matrix(
        (np.full(2 * (N - 1), 0.5), (rows, cols)), shape=(N - 1, N))
    num_op = (coeffs[1] * diff + coeffs[0] * avg).tocsr()
    return num_op, avg, np.full(N - 1, h)


def _quotient_grid(spec: QuotientSpec, g: GridFunction) -> float:
    w = _trapezoid_weights(g.grid)
    num_op = _operator_matrix(g.grid, spec.numerator_coeffs())
    den_op = _operator_matrix(g.grid, spec.denominator_coeffs())
    dq = spec.den_power()
    num = float(w @ np.abs(num_op @ g.values) ** spec.p)
    den = float(w @ np.abs(den_op @ g.values) ** dq)
    if den == 0.0:
        raise ValueError("zero denominator")
    return spec.omega_factor() * num / den ** (spec.p / dq)


def _lp_line(f: LineFunction, e: float, config: QuadratureConfig) -> float:
    def integrand(s: float) -> float:
        return abs(float(f.value(np.asarray(s), 0))) ** e
    return integrate_line(integrand, config, interval=f.quad_interval())


def _quotient_line(spec: QuotientSpec, g: LineFunction,
                   config: QuadratureConfig) -> float:
    if spec.kind == "rellich_nd":
        pm = spec.params
        j, qq = spec._j(), spec.den_power()
        tp = TransportedProfile(g, pm, pm.k)
        area = sphere_area(pm.n)
        num = area * radial_power_integral(
            tp.nabla_power(pm.k), pm.n - 1.0 + pm.alpha, pm.p, config)
        beta = beta_exponent(pm, pm.k - j, q=qq)
        den = area * radial_power_integral(
            tp.nabla_power(j), pm.n - 1.0 - beta, qq, config)
        if den == 0.0:
            raise ValueError("zero denominator")
        return num / den ** (pm.p / qq)
    num = _lp_line(DerivativeCombination(g, spec.numerator_coeffs()),
                   spec.p, config)
    dc = spec.denominator_coeffs()
    den_f = g if len(dc) == 1 and dc[0] == 1.0 else DerivativeCombination(g, dc)
    dq = spec.den_power()
    den = _lp_line(den_f, dq, config)
    if den == 0.0:
        raise ValueError("zero denominator")
    return num / den ** (spec.p / dq)


def quotient(spec: QuotientSpec, g: Union[GridFunction, LineFunction],
             config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Value of the spec's ratio at g.

    Grid functions use finite-difference derivatives and trapezoid sums;
    line functions use analytic derivatives and adaptive quadrature.  For
    rellich_nd the grid route evaluates the reduced one-dimensional ratio
    (times the sphere-measure factor) while the line route evaluates the
    weighted radial integrals themselves, so the two routes agree only
    because the reduction is exact.
    """
    if isinstance(g, GridFunction):
        return _quotient_grid(spec, g)
    return _quotient_line(spec, g, config)


def extremal_quotient(spec: QuotientSpec,
                      config: QuadratureConfig = DEFAULT_QUADRATURE
                      ) -> Optional[float]:
    """Quotient of the known closed-form extremal profile, where one
    exists: the sech-power profile for first-order semilinear kinds, its
    one-sided convolution when the parameters satisfy the compatibility
    constraint H^2 + 2AH - gamma = 0, and their transported images for
    the n-dimensional ratios.  Returns None when no profile is known."""
    tol = spec._tol()
    if spec.degenerate():
        return None
    if spec.kind == "M_pq":
        return _quotient_line(spec, CoshExtremal(spec.p, spec.q, spec.lam),
                              config)
    if spec.kind == "J_pq":
        if abs(spec.gamma) <= tol and abs(spec.H) <= tol:
            ref = QuotientSpec("M_pq", p=spec.p, q=spec.q, lam=2.0 * spec.A)
            return extremal_quotient(ref, config)
        if abs(spec.H) > tol and abs(spec.H ** 2 + 2.0 * spec.A * spec.H
                                     - spec.gamma) <= tol:
            G = ConvolutionExtremal(spec.p, spec.q, spec.A, spec.gamma,
                                    spec.H, config=config)
            return _quotient_line(spec, G, config)
        return None
    if spec.kind == "rellich_nd" and spec.den_power() > spec.p:
        pm = spec.params
        if pm.k == 1:
            F = CoshExtremal(pm.p, spec.den_power(), -hardy_H(pm))
            return _quotient_line(spec, F, config)
        if pm.k == 2 and spec._j() == 1:
            from .params import A_h, H_shift
            G = ConvolutionExtremal(pm.p, spec.den_power(), A_h(pm, 2),
                                    gamma_h(pm, 2), H_shift(pm, 2),
                                    config=config)
            return _quotient_line(spec, G, config)
        return None
    return None


# -- grid minimization -----------------------------------------------------


@dataclass(frozen=True)
class MinimizeOptions:
    grid: Grid = field(default_factory=Grid)
    max_iters: int = 3000
    rel_tol: float = 1e-9
    window: int = 50
    anneal_decades: int = 7
    round_iters: int = 400
    gn_damping: float = 1e-10
    gn_backtracks: int = 12
    max_backtracks: int = 80


@dataclass
class MinimizeResult:
    value: float
    minimizer: Optional[GridFunction]
    iterations: int
    converged: bool
    history: List[float]
    attained: Optional[bool] = None
    degenerate: bool = False


def _phi(t: np.ndarray, e: float, delta: float) -> np.ndarray:
    """|t|^{e-2} t, smoothed to (t^2 + delta^2)^{(e-2)/2} t when delta > 0."""
    if delta == 0.0:
        return odd_power(t, e)
    return (t * t + delta * delta) ** (0.5 * (e - 2.0)) * t


def _window_converged(history: Sequence[float], window: int,
                      tol: float) -> bool:
    if len(history) < window + 1:
        return False
    drop = history[-window - 1] - history[-1]
    return drop <= tol * max(abs(history[-1]), 1e-300)


def minimize(spec: QuotientSpec, init: Optional[GridFunction] = None,
             options: Optional[MinimizeOptions] = None) -> MinimizeResult:
    """Projected gradient descent for the spec's quotient.

    The iterate lives on the manifold {denominator integral = 1}; degree-0
    homogeneity makes the renormalization after each step loss-free.  Each
    iteration first tries the gradient preconditioned by the damped
    normal matrix of the reweighted numerator operator (the natural metric
    for these ratios, exact at p = 2), re-projected onto the constraint
    tangent, and falls back to a spectral-stepped plain gradient when the
    preconditioned step does not strictly descend.  For exponents below 2
    the objective is annealed through smoothed rounds, large delta to
    small, with the line search accepting on the round's own smoothed
    ratio; the unsmoothed ratio differs from the last smoothed one by at
    most delta^p times the total weight, which the schedule puts far below
    the convergence tolerance.  Recorded history is only ever the raw
    ratio from the final unsmoothed round, so it is non-increasing.

    The boundary values are pinned to zero for every kind (the iterate is
    the vector of interior nodes).  Order-one numerators need the pin
    because their staggered difference has an exact geometric null vector
    an unpinned descent can fall into, reporting a spurious zero; the
    node-centered higher-order operators need it because their one-sided
    closure rows undercount the energy of a profile parked against the
    window edge, so translation drift would otherwise slide the minimizer
    off the grid and fake a lower infimum there.

    ``converged`` means the quotient was numerically stationary at exit:
    either the windowed relative drop fell below ``rel_tol`` or both step
    candidates failed to descend strictly at machine precision.
    """
    opts = options or MinimizeOptions()
    if spec.degenerate():
        return MinimizeResult(value=0.0, minimizer=None, iterations=0,
                              converged=False, history=[],
                              attained=False, degenerate=True)

    grid = init.grid if init is not None else opts.grid
    num_c = spec.numerator_coeffs()
    staggered = len(num_c) == 2
    if staggered:
        num_full, den_full, w = _staggered_ops(grid, num_c)
        w_num = w_den = w
    else:
        w_num = w_den = _trapezoid_weights(grid)
        num_full = _operator_matrix(grid, num_c)
        den_full = _operator_matrix(grid, spec.denominator_coeffs())
    num_op = num_full[:, 1:-1].tocsr()
    den_op = den_full[:, 1:-1].tocsr()
    num_opT = num_op.T.tocsr()
    den_opT = den_op.T.tocsr()
    identity = scipy.sparse.identity(num_op.shape[1], format="csc")
    p = spec.p
    dq = spec.den_power()
    factor = spec.omega_factor()

    if init is not None:
        x = init.values[1:-1].copy()
    else:
        rate_l, rate_r = spec.decay_pair()
        s = grid.points()[1:-1]
        x = 1.0 / (np.exp(-rate_l * (s + 1.0)) + np.exp(rate_r * (s - 1.0)))

    def den_int(vec: np.ndarray) -> float:
        return float(w_den @ np.abs(den_op @ vec) ** dq)

    def raw_q(vec: np.ndarray) -> float:
        return (factor * float(w_num @ np.abs(num_op @ vec) ** p)
                / den_int(vec) ** (p / dq))

    d0 = den_int(x)
    if d0 <= 0.0 or not math.isfinite(d0):
        raise MinimizeError("initial profile has zero denominator")
    x = x * d0 ** (-1.0 / dq)
    if not math.isfinite(raw_q(x)):
        raise MinimizeError("quotient not finite at the initial profile")

    smoothing = (p < 2.0) or (dq < 2.0)
    delta_scale = float(np.max(np.abs(num_op @ x))) or 1.0
    if smoothing:
        deltas = [1e-2 * 0.1 ** k * delta_scale
                  for k in range(opts.anneal_decades)] + [0.0]
    else:
        deltas = [0.0]
    weight_floor = 1e-14 * delta_scale

    history: List[float] = []
    iterations = 0
    converged = False

    for delta in deltas:
        final_round = delta == 0.0

        def smooth_q(vec: np.ndarray) -> float:
            dv = den_int(vec)
            if dv <= 0.0:
                return math.inf
            nv = num_op @ vec
            return (factor * float(w_num @ (nv * nv + delta * delta)
                                   ** (0.5 * p)) / dv ** (p / dq))

        Q = smooth_q(x)
        if final_round:
            history.append(Q)
        eta = None
        prev_x: Optional[np.ndarray] = None
        prev_proj: Optional[np.ndarray] = None
        round_cap = (opts.max_iters if final_round
                     else min(opts.round_iters,
                              max(opts.max_iters - iterations - 200, 0)))
        stationary = False
        for _ in range(round_cap):
            if iterations >= opts.max_iters:
                break
            iterations += 1
            nv = num_op @ x
            dv = den_op @ x
            grad_num = p * factor * (num_opT @ (w_num * _phi(nv, p, delta)))
            grad_den = dq * (den_opT @ (w_den * _phi(dv, dq, delta)))
            gg = float(grad_den @ grad_den)
            if gg <= 0.0 or not math.isfinite(gg):
                break
            proj = grad_num - (float(grad_num @ grad_den) / gg) * grad_den
            if not np.all(np.isfinite(proj)):
                break

            accepted = False
            # preconditioned candidate: damped normal matrix of the
            # reweighted numerator, solution re-projected onto the tangent
            dk = max(delta, weight_floor)
            wk = w_num * (p * factor) * (nv * nv + dk * dk) ** (0.5 * p - 1.0)
            K = (num_opT @ scipy.sparse.diags(wk) @ num_op).tocsc()
            damping = opts.gn_damping * float(K.diagonal().max() or 1.0)
            try:
                d = scipy.sparse.linalg.splu(K + damping * identity
                                             ).solve(proj)
                d -= (float(grad_den @ d) / gg) * grad_den
                step = 1.0
                for _bt in range(opts.gn_backtracks):
                    y = x - step * d
                    dy = den_int(y)
                    if dy > 0.0 and math.isfinite(dy):
                        y = y * dy ** (-1.0 / dq)
                        Qy = smooth_q(y)
                        if math.isfinite(Qy) and Qy < Q:
                            accepted = True
                            break
                    step *= 0.5
            except RuntimeError:
                # singular factorization; the gradient branch still runs
                pass

            if not accepted:
                # spectral (Barzilai-Borwein) trial step, kept monotone by
                # the backtracking acceptance below
                if prev_x is not None:
                    s_vec = x - prev_x
                    y_vec = proj - prev_proj
                    sy = float(s_vec @ y_vec)
                    if sy > 0.0 and math.isfinite(sy):
                        eta = min(max(float(s_vec @ s_vec) / sy, 1e-16), 1e6)
                if eta is None:
                    pn = float(np.linalg.norm(proj))
                    eta = (float(np.linalg.norm(x)) / (10.0 * pn)
                           if pn > 0.0 else 1e-3)
                step = eta
                for _bt in range(opts.max_backtracks):
                    y = x - step * proj
                    dy = den_int(y)
                    if dy > 0.0 and math.isfinite(dy):
                        y = y * dy ** (-1.0 / dq)
                        Qy = smooth_q(y)
                        if math.isfinite(Qy) and Qy < Q:
                            accepted = True
                            break
                    step *= 0.5
                if accepted:
                    eta = step * 1.3
            prev_x = x.copy()
            prev_proj = proj.copy()
            if not accepted:
                # neither candidate descends strictly at float precision
                stationary = True
                break
            x, Q = y, Qy
            if final_round:
                history.append(Q)
                if _window_converged(history, opts.window, opts.rel_tol):
                    converged = True
                    break
        if final_round:
            converged = converged or stationary
            break

    full = np.zeros(grid.N)
    full[1:-1] = x
    minimizer = GridFunction(grid, full, clamp=True)
    value = quotient(spec, minimizer)
    return MinimizeResult(value=value, minimizer=minimizer,
                          iterations=iterations, converged=converged,
                          history=history, attained=spec.attained(),
                          degenerate=False)


# -- sharpness families ----------------------------------------------------

FAMILY_KINDS = ("squeeze", "radial", "halfline", "singular_hardy")


def sharpness_family(kind: str, base: LineFunction,
                     epsilons: Sequence[float], *,
                     spec: Optional[QuotientSpec] = None,
                     params: Optional[ProblemParams] = None,
                     a: Optional[float] = None, p: Optional[float] = None,
                     config: QuadratureConfig = DEFAULT_QUADRATURE
                     ) -> List[float]:
    """Quotient values along the argument-rescaled family g_eps(s) = g(eps s).

    The three weighted-space sharpness constructions all reduce to this
    single family: the radial one multiplies by a power of |x| that the
    transport absorbs, and the half-line one carries a prefactor that
    cancels by homogeneity.  Kinds:

      squeeze         any explicit spec (the generic vanishing families)
      radial          the pure order-k weighted ratio for params
      halfline        the half-line Hardy ratio with weight exponent a
      singular_hardy  the same at the zero-rate weight a = p - 1

    Quadrature subdivisions are scaled with 1/eps because the rescaled
    profiles spread over windows of width ~ 1/eps.
    """
    if kind not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}")
    eps_list = [float(e) for e in epsilons]
    if any(not 0.0 < e <= 1.0 for e in eps_list):
        raise ValueError("epsilons must lie in (0, 1]")
    if kind == "squeeze":
        if spec is None:
            raise ValueError("squeeze family needs spec")
        sp = spec
    elif kind == "radial":
        if params is None:
            raise ValueError("radial family needs params")
        pure = ProblemParams(n=params.n, p=params.p, alpha=params.alpha,
                             k=params.k)
        sp = QuotientSpec("rellich_nd", p=params.p, params=pure)
    elif kind == "halfline":
        if a is None or p is None:
            raise ValueError("halfline family needs a and p")
        sp = QuotientSpec("hardy1d", p=p, a=a)
    else:
        if p is None:
            raise ValueError("singular_hardy family needs p")
        sp = QuotientSpec("hardy1d", p=p, a=p - 1.0)

    out = []
    for e in eps_list:
        cfg = replace(config, max_subdivisions=min(
            20000, max(config.max_subdivisions, int(200.0 / e))))
        out.append(quotient(sp, ScaledArg(base, e), config=cfg))
    return out


# -- randomized inequality verification ------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    kind: str
    constant: float
    samples: int
    violations: int
    min_quotient: float
    seed: int


INEQUALITY_KINDS = ("hardy", "rellich", "poly",
                    "halfline_first", "halfline_second")


def _random_line(rng: np.random.Generator) -> LineFunction:
    """Gaussian-times-polynomial draw; every fourth draw is a compactly
    supported polynomial bump to vary the tail behavior."""
    if rng.uniform() < 0.25:
        return PolynomialBump(center=rng.uniform(-2.0, 2.0),
                              halfwidth=rng.uniform(0.5, 2.0), m=8)
    while True:
        deg = int(rng.integers(0, 5))
        coeffs = rng.uniform(-1.0, 1.0, size=deg + 1)
        if np.max(np.abs(coeffs)) >= 0.1:
            break
    return PolyGaussian(coeffs, s0=rng.uniform(-3.0, 3.0),
                        sigma=rng.uniform(0.5, 2.0))


def verify_inequality(params: Optional[ProblemParams] = None,
                      kind: str = "hardy", samples: int = 200,
                      seed: int = 0, *, tau: Optional[float] = None,
                      lam: Optional[float] = None, p: Optional[float] = None,
                      m: int = 1, slack: float = 1e-6,
                      config: QuadratureConfig = DEFAULT_QUADRATURE
                      ) -> InequalityReport:
    """Randomized check that lhs >= constant * rhs * (1 - slack) on smooth
    test profiles.

    The n-dimensional kinds draw a line profile, transport it, and compute
    both weighted radial integrals by quadrature (no reduction identity is
    assumed on either side).  Violations are counted, never raised; the
    report carries the smallest observed lhs/rhs ratio.
    """
    if kind not in INEQUALITY_KINDS:
        raise ValueError(f"unknown inequality kind {kind!r}")
    rng = np.random.default_rng(seed)
    halfline = kind.startswith("halfline")
    if halfline:
        if tau is None or lam is None or p is None:
            raise ValueError(f"{kind} needs tau, lam, p")
        from .params import halfline_operator_constants
        c1, c2 = halfline_operator_constants(tau, lam, p)
        constant = c1 if kind == "halfline_first" else c2
    else:
        if params is None:
            raise ValueError(f"{kind} needs params")
        if kind == "hardy":
            constant = abs(hardy_H(params)) ** params.p
        elif kind == "rellich":
            constant = rellich_constant(params).value
        else:
            if m < 1:
                raise ValueError("m must be >= 1")
            constant = abs(params.n - (params.n + params.alpha)
                           / params.p) ** params.p

    violations = 0
    min_quotient = math.inf
    for _ in range(samples):
        g = _random_line(rng)
        if halfline:
            # v(r) = r^{2-(1+tau)/p} g(-log r): the flat normalization
            pr = PoweredRadial(g, (1.0 + tau) / p - 2.0, (1.0,))
            lhs = radial_power_integral(pr.laplacian(lam), tau, p, config)
            if kind == "halfline_first":
                rhs = radial_power_integral(pr.derivative(), tau - p, p,
                                            config)
            else:
                rhs = radial_power_integral(pr, tau - 2.0 * p, p, config)
        else:
            n, pp, alpha = params.n, params.p, params.alpha
            if kind == "hardy":
                tp = TransportedProfile(g, params, 1)
                lhs = radial_power_integral(tp.nabla_power(1),
                                            n - 1.0 + alpha, pp, config)
                rhs = radial_power_integral(tp.nabla_power(0),
                                            n - 1.0 + alpha - pp, pp, config)
            elif kind == "rellich":
                k = params.k
                tp = TransportedProfile(g, params, k)
                lhs = radial_power_integral(tp.nabla_power(k),
                                            n - 1.0 + alpha, pp, config)
                rhs = radial_power_integral(tp.nabla_power(0),
                                            n - 1.0 + alpha - k * pp, pp,
                                            config)
            else:
                pk = ProblemParams(n=n, p=pp, alpha=alpha, k=2 * m)
                tp = TransportedProfile(g, pk, 2 * m)
                lhs = radial_power_integral(tp.nabla_power(2 * m),
                                            n - 1.0 + alpha, pp, config)
                rhs = radial_power_integral(tp.nabla_power(2 * m - 1),
                                            n - 1.0 + alpha - pp, pp, config)
        if rhs <= 0.0:
            continue
        ratio = lhs / rhs
        min_quotient = min(min_quotient, ratio)
        if lhs < constant * rhs * (1.0 - slack):
            violations += 1
    return InequalityReport(kind=kind, constant=constant, samples=samples,
                            violations=violations,
                            min_quotient=min_quotient, seed=seed)


# -- unweighted Sobolev bookkeeping -----------------------------------------


@dataclass(frozen=True)
class SobolevReport:
    n: int
    p: float
    k: int
    j: int
    q: float
    value: float
    one_d_value: float
    omega_factor: float
    beta: float
    iterations: int
    converged: bool


def sobolev_constants(params: ProblemParams,
                      options: Optional[MinimizeOptions] = None
                      ) -> SobolevReport:
    """Minimized critical-exponent constant at zero weight.

    Runs the grid minimizer on the reduced order-(k, j) ratio at the
    critical q for the order gap k - j; the returned value includes the
    sphere-measure factor, and the reduced one-dimensional infimum is
    reported alongside it.  Requires alpha = 0 and n > kp.
    """
    if params.alpha != 0.0:
        raise ValueError("sobolev constants are the alpha = 0 case")
    from .params import critical_exponent
    j = params.j if params.j is not None else 0
    qc = critical_exponent(params, params.k - j)
    full = ProblemParams(n=params.n, p=params.p, alpha=0.0, k=params.k,
                         j=j, q=qc)
    spec = QuotientSpec("rellich_nd", p=params.p, q=qc, params=full)
    res = minimize(spec, options=options)
    beta = beta_exponent(full, full.k - j, q=qc)
    return SobolevReport(n=params.n, p=params.p, k=params.k, j=j, q=qc,
                         value=res.value,
                         one_d_value=res.value / spec.omega_factor(),
                         omega_factor=spec.omega_factor(), beta=beta,
                         iterations=res.iterations, converged=res.converged)
