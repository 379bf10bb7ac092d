"""Transport between weighted radial profiles on (0, infinity) and
functions on the line, plus the operator calculus that goes with it.

A radial profile u and a line function g are linked by

    u(r) = r^{-H} g(-log r),      H = (n + alpha)/p - k,

and every radial derivative of u keeps this shape with the exponent
raised: u^(i)(r) = r^{-H-i} Psi_i(-log r), where Psi_i is a constant-
coefficient derivative combination of g. Keeping the power and the line
part separate until the final evaluation ("PoweredRadial") is what makes
the weighted integrals computable without overflow: after r = e^{-s} the
weight exponents cancel analytically.

The second-order operators L g = g'' - 2A g' - gamma g and first-order
B g = g' +- H g close the calculus: the radial Laplacian acts on
transported functions as an L with shifted indices, and m-fold Laplacians
correspond to chains of L factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .functions import DerivativeCombination, LineFunction
from .numerics import QuadratureConfig, DEFAULT_QUADRATURE, integrate_line
from .params import ProblemParams, A_h, H_shift, gamma_h, hardy_H, positivity_check

_EXP_CLAMP = 700.0


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (log-Gamma evaluated)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return 2.0 * math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n))


def _shift_table(H: float, orders: int) -> List[np.ndarray]:
    """Coefficient rows c with Psi_i = sum_j c[i][j] g^{(j)} for the
    recursion Psi_{i+1} = -[(H + i) Psi_i + Psi_i']."""
    rows = [np.array([1.0])]
    for i in range(orders):
        prev = rows[-1]
        nxt = np.zeros(len(prev) + 1)
        nxt[: len(prev)] = -(H + i) * prev
        nxt[1:] -= prev
        rows.append(nxt)
    return rows


def _inverse_shift_table(H: float, orders: int) -> List[np.ndarray]:
    """Coefficient rows c with Theta_i = sum_j c[i][j] r^j u^{(j)} for the
    recursion Theta_{i+1} = -(H Theta_i + r Theta_i'); here the drift
    picks up the column index j (the power of r), not the row index."""
    rows = [np.array([1.0])]
    for _ in range(orders):
        prev = rows[-1]
        nxt = np.zeros(len(prev) + 1)
        nxt[: len(prev)] = -(H + np.arange(len(prev))) * prev
        nxt[1:] -= prev
        rows.append(nxt)
    return rows


class RadialProfile:
    """u(r) on r > 0 with radial derivatives up to k_max."""

    k_max: int = 0
    params: Optional[ProblemParams] = None

    def value(self, r, order: int = 0):
        raise NotImplementedError

    def __call__(self, r):
        return self.value(r, 0)

    def laplacian_value(self, r, n: int):
        """u'' + (n-1) u'/r pointwise."""
        r = np.asarray(r, dtype=float)
        return self.value(r, 2) + (n - 1.0) / r * self.value(r, 1)


@dataclass(frozen=True)
class PoweredRadial:
    """The function r -> r^{-a} * B(-log r) with B = sum_j coeffs[j] g^{(j)}.

    Closed under radial differentiation and the radial Laplacian; the
    line part B is exposed as a LineFunction for flat 1-D integrals.
    """

    g: LineFunction
    a: float
    coeffs: Tuple[float, ...]

    def line_part(self) -> LineFunction:
        return DerivativeCombination(self.g, list(self.coeffs))

    def derivative(self) -> "PoweredRadial":
        c = np.asarray(self.coeffs)
        nxt = np.zeros(len(c) + 1)
        nxt[: len(c)] = -self.a * c
        nxt[1:] -= c
        return PoweredRadial(self.g, self.a + 1.0, tuple(nxt))

    def laplacian(self, n: int) -> "PoweredRadial":
        d1 = self.derivative()
        d2 = d1.derivative()
        c = npoly.polyadd(np.asarray(d2.coeffs),
                          (n - 1.0) * np.asarray(d1.coeffs))
        return PoweredRadial(self.g, self.a + 2.0, tuple(np.atleast_1d(c)))

    def value(self, r):
        r = np.asarray(r, dtype=float)
        s = -np.log(r)
        line = self.line_part().value(s, 0)
        expo = np.clip(self.a * s, -_EXP_CLAMP, _EXP_CLAMP)
        return np.exp(expo) * line


class TransportedProfile(RadialProfile):
    """u = r^{-H} g(-log r) with analytic radial derivatives."""

    def __init__(self, g: LineFunction, params: ProblemParams, k: Optional[int] = None):
        if k is None:
            k = params.k
        self.g = g
        self.params = params
        self.k = k
        self.H = H_shift(params, k)
        self.k_max = g.k_max
        self._table = _shift_table(self.H, min(g.k_max, 12))

    def _powered(self, order: int) -> PoweredRadial:
        if order >= len(self._table):
            raise ValueError(f"derivative order {order} not available")
        return PoweredRadial(self.g, self.H + order, tuple(self._table[order]))

    def value(self, r, order: int = 0):
        return self._powered(order).value(r)

    def nabla_power(self, k: int) -> PoweredRadial:
        """The k-th gradient magnitude carrier: Delta^m u for k = 2m,
        (Delta^m u)' for k = 2m + 1 (radial convention |nabla^k u|)."""
        pr = self._powered(0)
        for _ in range(k // 2):
            pr = pr.laplacian(self.params.n)
        if k % 2 == 1:
            pr = pr.derivative()
        return pr


class DilatedProfile(RadialProfile):
    """u_rho(r) = rho^{(n-kp+alpha)/p} u(rho r), the quotient-invariant
    rescaling of the k-th order problem."""

    def __init__(self, base: RadialProfile, params: ProblemParams, rho: float):
        if rho <= 0:
            raise ValueError("rho must be positive")
        self.base = base
        self.params = params
        self.rho = float(rho)
        self.sigma = (params.n - params.k * params.p + params.alpha) / params.p
        self.k_max = base.k_max

    def value(self, r, order: int = 0):
        r = np.asarray(r, dtype=float)
        return (self.rho ** (self.sigma + order)
                * self.base.value(self.rho * r, order))


class InverseTransported(LineFunction):
    """g(s) = e^{-Hs} u(e^{-s}) recovered from a radial profile.

    Derivatives follow the same shift recursion as the forward map,
    with Theta_i = sum_j c_ij r^j u^{(j)}(r). Evaluation is intended for
    moderate windows of s; the factors are balanced when u itself is a
    transported profile.
    """

    def __init__(self, u: RadialProfile, params: ProblemParams, k: Optional[int] = None):
        if k is None:
            k = params.k
        self.u = u
        self.params = params
        self.H = H_shift(params, k)
        self.k_max = u.k_max
        self._table = _inverse_shift_table(self.H, min(u.k_max, 12))
        self.support = None
        self.decay_rates = None

    def value(self, s, order: int = 0):
        if order >= len(self._table):
            raise ValueError(f"derivative order {order} not available")
        s = np.asarray(s, dtype=float)
        r = np.exp(np.clip(-s, -_EXP_CLAMP, _EXP_CLAMP))
        acc = np.zeros_like(s, dtype=float)
        for jj, c in enumerate(self._table[order]):
            if c != 0.0:
                acc = acc + c * r ** jj * self.u.value(r, jj)
        pref = np.exp(np.clip(-self.H * s, -_EXP_CLAMP, _EXP_CLAMP))
        return pref * acc

    def quad_interval(self):
        if isinstance(self.u, TransportedProfile):
            return self.u.g.quad_interval()
        return None


def transform_Tk(g: LineFunction, params: ProblemParams,
                 k: Optional[int] = None) -> TransportedProfile:
    """u(r) = r^{-H_{alpha,k}} g(-log r)."""
    return TransportedProfile(g, params, k)


def transform_inverse(u: RadialProfile, params: ProblemParams,
                      k: Optional[int] = None) -> LineFunction:
    """g(s) = r^{H_{alpha,k}} u(r) at r = e^{-s}; inverse of transform_Tk."""
    return InverseTransported(u, params, k)


def apply_L(g: LineFunction, A: float, gamma: float) -> LineFunction:
    """g'' - 2A g' - gamma g."""
    return DerivativeCombination(g, [-gamma, -2.0 * A, 1.0])


def apply_B(g: LineFunction, H: float, sign: int = +1) -> LineFunction:
    """g' + H g (sign=+1) or g' - H g (sign=-1)."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    return DerivativeCombination(g, [sign * H, 1.0])


@dataclass(frozen=True)
class OperatorChain:
    """Factors of the composite operator L_1 ... L_m, optionally followed
    by a first-order factor: lambda-type gives Lg' - lambda Lg, H-type
    gives Lg' + H Lg."""

    A_vec: Tuple[float, ...]
    gamma_vec: Tuple[float, ...]
    first_order: Optional[Tuple[str, float]] = None

    def __post_init__(self):
        if len(self.A_vec) != len(self.gamma_vec):
            raise ValueError("A_vec and gamma_vec must have equal length")
        for A, g in zip(self.A_vec, self.gamma_vec):
            if A * A + g < 0:
                raise ValueError(f"A^2 + gamma < 0 for factor (A={A}, gamma={g})")
        if self.first_order is not None and self.first_order[0] not in ("lambda", "H"):
            raise ValueError("first_order kind must be 'lambda' or 'H'")

    @property
    def order(self) -> int:
        return 2 * len(self.A_vec) + (1 if self.first_order else 0)

    def op_coeffs(self) -> np.ndarray:
        """Coefficients c_j of the operator sum_j c_j d^j/ds^j."""
        poly = np.array([1.0])
        for A, g in zip(self.A_vec, self.gamma_vec):
            poly = npoly.polymul(poly, [-g, -2.0 * A, 1.0])
        if self.first_order is not None:
            kind, val = self.first_order
            lin = [-val, 1.0] if kind == "lambda" else [val, 1.0]
            poly = npoly.polymul(poly, lin)
        return np.atleast_1d(poly)

    def eigenvalue(self, mu: float) -> float:
        """Action on e^{mu s}."""
        out = 1.0
        for A, g in zip(self.A_vec, self.gamma_vec):
            out *= mu * mu - 2.0 * A * mu - g
        if self.first_order is not None:
            kind, val = self.first_order
            out *= (mu - val) if kind == "lambda" else (mu + val)
        return out


def apply_chain(g: LineFunction, chain: OperatorChain) -> LineFunction:
    return DerivativeCombination(g, chain.op_coeffs())


def norm_chain(params: ProblemParams) -> OperatorChain:
    """The operator whose 1-D L^p norm equals the order-k weighted energy:
    even k = 2m uses factors (A_{2h}, gamma_{2h}); odd k = 2m+1 uses
    (A_{2h+1}, gamma_{2h+1}) followed by the H-type factor H_alpha."""
    k = params.k
    if k % 2 == 0:
        m = k // 2
        A_vec = tuple(A_h(params, 2 * h) for h in range(1, m + 1))
        g_vec = tuple(gamma_h(params, 2 * h) for h in range(1, m + 1))
        return OperatorChain(A_vec, g_vec, None)
    m = (k - 1) // 2
    A_vec = tuple(A_h(params, 2 * h + 1) for h in range(1, m + 1))
    g_vec = tuple(gamma_h(params, 2 * h + 1) for h in range(1, m + 1))
    return OperatorChain(A_vec, g_vec, ("H", hardy_H(params)))


def radial_power_integral(pr: PoweredRadial, w: float, p: float,
                          config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """integral over (0, inf) of r^w |pr(r)|^p dr.

    Computed after r = e^{-s}, where the integrand is
    e^{(a p - w - 1)s} |B(s)|^p; for transported profiles the exponent
    cancels to zero analytically, so nothing overflows. The residual
    exponent is kept in the integrand rather than assumed away.
    """
    line = pr.line_part()
    expo = pr.a * p - w - 1.0
    interval = line.quad_interval()

    def integrand(s: float) -> float:
        e = expo * s
        if e < -_EXP_CLAMP:
            return 0.0
        b = line.value(np.asarray(s), 0)
        if b == 0.0:
            return 0.0
        return math.exp(min(e, _EXP_CLAMP)) * abs(float(b)) ** p

    return integrate_line(integrand, config, interval=interval)


def norm_identity(g: LineFunction, params: ProblemParams,
                  config: QuadratureConfig = DEFAULT_QUADRATURE) -> Tuple[float, float]:
    """Both sides of the energy identity for u = T_k g.

    lhs: the n-dimensional weighted integral of |nabla^k u|^p, computed by
    radial quadrature through the Laplacian recursion.
    rhs: omega_n times the 1-D integral of the operator-chain image of g.
    The two routes build their integrands from different recursions.
    """
    ok, offending = positivity_check(params)
    if not ok:
        raise ValueError(f"degenerate constant, factors vanish: {offending}")
    n, p, alpha, k = params.n, params.p, params.alpha, params.k
    u = TransportedProfile(g, params, k)
    pr = u.nabla_power(k)
    lhs = sphere_area(n) * radial_power_integral(pr, n - 1.0 + alpha, p, config)

    chain = norm_chain(params)
    image = apply_chain(g, chain)

    def integrand(s: float) -> float:
        return abs(float(image.value(np.asarray(s), 0))) ** p

    rhs = sphere_area(n) * integrate_line(integrand, config,
                                          interval=image.quad_interval())
    return (lhs, rhs)


def laplacian_identity_check(g: LineFunction, params: ProblemParams, h: int,
                             radii: Optional[np.ndarray] = None) -> float:
    """Max absolute gap between Delta(T_h g) and T_{h-2}(L g) with the
    index-h operator L, over sample radii."""
    if h < 2:
        raise ValueError("h must be >= 2")
    if radii is None:
        radii = np.geomspace(0.1, 10.0, 40)
    u = TransportedProfile(g, params, h)
    lhs = u.laplacian_value(radii, params.n)
    Lg = apply_L(g, A_h(params, h), gamma_h(params, h))
    rhs = TransportedProfile(Lg, params, h - 2).value(radii, 0)
    return float(np.max(np.abs(lhs - rhs)))
