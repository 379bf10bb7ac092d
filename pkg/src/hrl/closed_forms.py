"""Closed-form extremal profiles and their Hamiltonian structure.

Four families of explicit minimizers are implemented, each with analytic
derivatives (differencing cannot reach the conservation-law tolerances):

CoshExtremal (F)      the first-order line extremal
                      F(s) = k_F e^{c1 s} cosh(c2 s)^{p/(p-q)}
ConvolutionExtremal (G) the second-order line extremal, an exponential
                      convolution of F under the constraint
                      H^2 + 2AH - gamma = 0
PLaplaceExtremal (U1) the radial extremal of the weighted p-Laplace
                      equation, U(r) = amp (1 + r^E)^{p/(p-q)}
BiharmonicExtremal (U2), CriticalBiharmonicExtremal, BorderlineProfile
                      the radial extremals of the weighted fourth-order
                      problem (tail integral, its unweighted critical
                      case, and the borderline n = 2p profile)

All power-law and cosh factors are evaluated in log scale; t = x/(1+x)
substitutions turn repeated differentiation into polynomial recursions.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import expit

from .emden import RadialProfile
from .functions import ExpCoshPower, LineFunction
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, integrate_line
from .params import ProblemParams, hardy_H

_EXP_CLAMP = 700.0
_LOG_TINY = -745.0


def _softplus(x):
    """log(1 + e^x), overflow-safe."""
    x = np.asarray(x, dtype=float)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def _exp_or_zero(logv):
    logv = np.asarray(logv, dtype=float)
    return np.where(logv > _LOG_TINY,
                    np.exp(np.clip(logv, _LOG_TINY, _EXP_CLAMP)), 0.0)


class CoshExtremal(LineFunction):
    """Minimizer of int |f' - lam f|^p / (int |f|^q)^{p/q}, q > p > 1.

    F(s) = k_F e^{c1 s} cosh(c2 s)^{p/(p-q)} with
    k_F = (q (p/(p-1))^{p-1} |lam/2|^p)^{1/(q-p)},
    c1 = lam(p-2)/(2(p-1)), c2 = lam(q-p)/(2(p-1)).
    The conjugate momentum Phi = |F' - lam F|^{p-2}(F' - lam F) has the
    same exp-cosh shape and is provided in closed form.
    """

    k_max = 16

    def __init__(self, p: float, q: float, lam: float):
        if not (q > p > 1):
            raise ValueError("need q > p > 1")
        if lam == 0:
            raise ValueError("lam must be nonzero")
        self.p = float(p)
        self.q = float(q)
        self.lam = float(lam)
        self.k_F = (q * (p / (p - 1.0)) ** (p - 1.0)
                    * abs(lam / 2.0) ** p) ** (1.0 / (q - p))
        self.c1 = lam * (p - 2.0) / (2.0 * (p - 1.0))
        self.c2 = lam * (q - p) / (2.0 * (p - 1.0))
        self._core = ExpCoshPower(self.k_F, self.c1, self.c2, p / (p - q))
        self.decay_rates = self._core.decay_rates
        # Phi = phi_sign * |C| e^{(p-1)(c1+c2)s} cosh(c2 s)^{q(p-1)/(p-q)}
        C = (self.k_F * p / (2.0 * (p - 1.0))) ** (p - 1.0) * abs(lam) ** (p - 2.0) * lam
        self.phi_sign = -math.copysign(1.0, lam)
        self._phi_core = ExpCoshPower(abs(C), (p - 1.0) * (self.c1 + self.c2),
                                      self.c2, q * (p - 1.0) / (p - q))

    def value(self, s, order: int = 0):
        return self._core.value(s, order)

    def quad_interval(self):
        return self._core.quad_interval()

    def phi(self, s, order: int = 0):
        """Conjugate momentum Phi and its derivatives."""
        return self.phi_sign * self._phi_core.value(s, order)

    def phi_function(self) -> LineFunction:
        from .functions import LinComb
        return LinComb([self._phi_core], [self.phi_sign])


class ConvolutionExtremal(LineFunction):
    """Minimizer of the second-order quotient under H^2 + 2AH - gamma = 0.

    Evaluated from the incomplete power integral (substituted t = e^{-u}
    so the integrand is a single exponential of u), which coincides with
    the exponential convolution e^{-Hs} int e^{Ht} F(t) dt of the
    first-order extremal with lam = gamma/H; ``convolution_form`` exposes
    the latter independently. Derivative recursion:
    G^{(i)} = sign(H) F^{(i-1)} - H G^{(i-1)}.
    """

    k_max = 12

    def __init__(self, p: float, q: float, A: float, gamma: float, H: float,
                 config: QuadratureConfig = DEFAULT_QUADRATURE):
        if not (q > p > 1):
            raise ValueError("need q > p > 1")
        if gamma == 0 or H == 0:
            raise ValueError("gamma and H must be nonzero")
        if A * A + gamma < 0:
            raise ValueError("need A^2 + gamma >= 0")
        scale = 1.0 + H * H + abs(A * H) + abs(gamma)
        if abs(H * H + 2 * A * H - gamma) > 1e-10 * scale:
            raise ValueError("constraint H^2 + 2AH - gamma = 0 violated")
        self.p, self.q = float(p), float(q)
        self.A, self.gamma, self.H = float(A), float(gamma), float(H)
        self.lam = gamma / H
        self.config = config
        self.F = CoshExtremal(p, q, self.lam)
        self.k_G = (q * (p / (p - 1.0)) ** (p - 1.0)
                    * abs(self.lam) ** p) ** (1.0 / (q - p))
        # decay of the convolution: the free rate survives on one side,
        # the e^{-H|s|} screening caps the other
        rho_m, rho_p = self.F.decay_rates
        if H > 0:
            self.decay_rates = (rho_m, min(H, rho_p))
        else:
            self.decay_rates = (min(-H, rho_m), rho_p)
        self._log_kG = math.log(self.k_G)
        self._sigma = self.lam * (q - p) / (p - 1.0)
        self._b = p / (p - q)

    def _primary_log_integrand(self, u: float, s: float) -> float:
        # k_G t^{lam/((p-1)H)... } power integrand after t = e^{-u},
        # with the e^{-Hs} prefactor folded in to keep everything finite
        return (self._log_kG - self.lam * u / (self.p - 1.0)
                - self.H * (s - u) + self._b * float(_softplus(-self._sigma * u)))

    def _g_scalar(self, s: float) -> float:
        if self.H > 0:
            def f(v: float) -> float:
                lg = self._primary_log_integrand(s - v, s)
                return math.exp(lg) if lg > _LOG_TINY else 0.0
        else:
            def f(v: float) -> float:
                lg = self._primary_log_integrand(s + v, s)
                return math.exp(lg) if lg > _LOG_TINY else 0.0
        return integrate_line(f, self.config, interval=(0.0, np.inf))

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        if order == 0:
            if s.ndim == 0:
                return np.asarray(self._g_scalar(float(s)))
            return np.array([self._g_scalar(float(x)) for x in s])
        sgn = math.copysign(1.0, self.H)
        return (sgn * self.F.value(s, order - 1)
                - self.H * self.value(s, order - 1))

    def convolution_form(self, s: float) -> float:
        """e^{-Hs} int e^{Ht} F(t) dt with the t-integral truncated at s
        (from below for H > 0, from above for H < 0); the independent
        representation used to cross-check the primary evaluation."""
        s = float(s)
        if self.H > 0:
            def f(v: float) -> float:
                return math.exp(-self.H * v) * float(self.F.value(np.asarray(s - v), 0))
        else:
            def f(v: float) -> float:
                return math.exp(self.H * v) * float(self.F.value(np.asarray(s + v), 0))
        return integrate_line(f, self.config, interval=(0.0, np.inf))

    def quad_interval(self):
        rm, rp = self.decay_rates
        head = 745.0 + abs(self._log_kG)
        return (-head / rm, head / rp)


def _power_tail_polys(cache: list, i: int) -> np.ndarray:
    """Q_0 = 1, Q_{i+1}(t) = (rows are built by the owner recursion)."""
    return cache[i]


class _PowerCore:
    """V(r) = r^a (1 + r^sigma)^B with derivative recursion
    V^{(i)} = r^{a-i}(1+r^sigma)^B Q_i(t), t = r^sigma/(1+r^sigma),
    Q_{i+1} = (a + B sigma t - i) Q_i + sigma t (1 - t) Q_i'."""

    def __init__(self, a: float, sigma: float, B: float):
        self.a, self.sigma, self.B = float(a), float(sigma), float(B)
        self._polys = [np.array([1.0])]

    def _poly(self, i: int) -> np.ndarray:
        while len(self._polys) <= i:
            k = len(self._polys) - 1
            Qk = self._polys[-1]
            lin = npoly.polymul([self.a - k, self.B * self.sigma], Qk)
            if len(Qk) > 1:
                dq = npoly.polyder(Qk)
                lin = npoly.polyadd(lin, self.sigma
                                    * npoly.polymul([0.0, 1.0, -1.0], dq))
            self._polys.append(np.atleast_1d(lin))
        return self._polys[i]

    def value(self, r, i: int = 0):
        r = np.asarray(r, dtype=float)
        lr = np.log(r)
        t = expit(self.sigma * lr)
        logv = (self.a - i) * lr + self.B * _softplus(self.sigma * lr)
        return npoly.polyval(t, self._poly(i)) * _exp_or_zero(logv)


class PLaplaceExtremal(RadialProfile):
    """Radial extremal of the weighted p-Laplace problem:
    U(r) = amp (1 + r^E)^{p/(p-q)} with E = (n-p+alpha)(q-p)/(p(p-1)).

    Coincides with the transport of the first-order line extremal at
    lam = -H_alpha (checked numerically in the tests, sign included).
    """

    k_max = 8

    def __init__(self, params: ProblemParams):
        if params.q is None:
            raise ValueError("params.q is required")
        n, p, alpha, q = params.n, params.p, params.alpha, params.q
        base = n - p + alpha
        if base == 0.0:
            raise ValueError("alpha = p - n is excluded (no extremal)")
        self.params = params
        self.amp = (q / p * abs(base) ** p
                    / (p - 1.0) ** (p - 1.0)) ** (1.0 / (q - p))
        self.E = base * (q - p) / (p * (p - 1.0))
        self.B = p / (p - q)
        self._core = _PowerCore(0.0, self.E, self.B)

    def value(self, r, order: int = 0):
        return self.amp * self._core.value(r, order)


class BiharmonicExtremal(RadialProfile):
    """Radial extremal of the weighted fourth-order problem.

    U'(r) = -+ k r^{1 - alpha/(p-1)} (1 + r^sigma)^{p/(p-q)} with the
    minus sign and a tail integral from r to infinity when
    alpha > 2p - n, the plus sign and an integral from 0 to r when
    alpha < 2p - n; sigma = (np-n-alpha)(q-p)/(p(p-1)).
    """

    k_max = 6

    def __init__(self, params: ProblemParams,
                 config: QuadratureConfig = DEFAULT_QUADRATURE):
        if params.q is None:
            raise ValueError("params.q is required")
        n, p, alpha, q = params.n, params.p, params.alpha, params.q
        if alpha == 2.0 * p - n or alpha == float(n) * p - n:
            raise ValueError("alpha on a degenerate line, no extremal")
        self.params = params
        self.config = config
        base = n * p - n - alpha
        self.k_amp = (q / p * abs(base) ** p
                      / (p - 1.0) ** (p - 1.0)) ** (1.0 / (q - p))
        self.a_pow = 1.0 - alpha / (p - 1.0)
        self.sigma = base * (q - p) / (p * (p - 1.0))
        self.B = p / (p - q)
        self.from_infinity = alpha > 2.0 * p - n
        self._core = _PowerCore(self.a_pow, self.sigma, self.B)
        # integrand of the defining integral, as a function of u = log t
        self._log_c = math.log(self.k_amp)

    def _tail_scalar(self, r: float) -> float:
        def f(u: float) -> float:
            lg = (self._log_c + (self.a_pow + 1.0) * u
                  + self.B * float(_softplus(self.sigma * u)))
            return math.exp(lg) if lg > _LOG_TINY else 0.0

        lr = math.log(r)
        if self.from_infinity:
            return integrate_line(f, self.config, interval=(lr, np.inf))
        return integrate_line(f, self.config, interval=(-np.inf, lr))

    def value(self, r, order: int = 0):
        r = np.asarray(r, dtype=float)
        if order == 0:
            if r.ndim == 0:
                return np.asarray(self._tail_scalar(float(r)))
            return np.array([self._tail_scalar(float(x)) for x in r])
        sign = -1.0 if self.from_infinity else 1.0
        return sign * self.k_amp * self._core.value(r, order - 1)


class CriticalBiharmonicExtremal(RadialProfile):
    """The unweighted critical-exponent case (n > 2p):
    U(r) = n^{(n-p)/p} (n(p-1)/(n-p))^{(n-p)/p^2}
           int_r^inf s (1 + s^{p*})^{(p-n)/p} ds."""

    k_max = 6

    def __init__(self, n: int, p: float,
                 config: QuadratureConfig = DEFAULT_QUADRATURE):
        if not n > 2 * p:
            raise ValueError("requires n > 2p")
        self.n, self.p = int(n), float(p)
        self.config = config
        self.p_star = n * p / (n - p)
        self.amp = (n ** ((n - p) / p)
                    * (n * (p - 1.0) / (n - p)) ** ((n - p) / p ** 2))
        self.B = (p - n) / p
        self._core = _PowerCore(1.0, self.p_star, self.B)
        self._log_c = math.log(self.amp)

    def _tail_scalar(self, r: float) -> float:
        def f(u: float) -> float:
            lg = (self._log_c + 2.0 * u
                  + self.B * float(_softplus(self.p_star * u)))
            return math.exp(lg) if lg > _LOG_TINY else 0.0

        return integrate_line(f, self.config, interval=(math.log(r), np.inf))

    def value(self, r, order: int = 0):
        r = np.asarray(r, dtype=float)
        if order == 0:
            if r.ndim == 0:
                return np.asarray(self._tail_scalar(float(r)))
            return np.array([self._tail_scalar(float(x)) for x in r])
        return -self.amp * self._core.value(r, order - 1)


class BorderlineProfile(RadialProfile):
    """The n = 2p borderline profile: U'(r) = k r (1 + r^n)^{-1} with
    k = n (n-2)^{2/n}; U itself integrates from 0 (free constant).
    Its p-energy of the Laplacian is finite while the |x|^{-2p} weighted
    p-norm diverges (log at infinity)."""

    k_max = 6

    def __init__(self, n: int, config: QuadratureConfig = DEFAULT_QUADRATURE):
        if n < 3:
            raise ValueError("n must be >= 3")
        self.n = int(n)
        self.p = n / 2.0
        self.config = config
        self.k_amp = n * (n - 2.0) ** (2.0 / n)
        self._core = _PowerCore(1.0, float(n), -1.0)

    def _from_zero_scalar(self, r: float) -> float:
        def f(u: float) -> float:
            lg = 2.0 * u - float(_softplus(self.n * u))
            return self.k_amp * math.exp(lg) if lg > _LOG_TINY else 0.0

        return integrate_line(f, self.config, interval=(-np.inf, math.log(r)))

    def value(self, r, order: int = 0):
        r = np.asarray(r, dtype=float)
        if order == 0:
            if r.ndim == 0:
                return np.asarray(self._from_zero_scalar(float(r)))
            return np.array([self._from_zero_scalar(float(x)) for x in r])
        return self.k_amp * self._core.value(r, order - 1)

    def laplacian_closed_form(self, r):
        """n k (1 + r^n)^{-2}, the closed form of the radial Laplacian."""
        r = np.asarray(r, dtype=float)
        lg = -2.0 * _softplus(self.n * np.log(r))
        return self.n * self.k_amp * _exp_or_zero(lg)


def hamiltonian(f, phi, lam: float, p: float, q: float):
    """lam f phi + |f|^q / q + |phi|^{p'} / p' (conserved along orbits)."""
    if not (p > 1 and q > 1):
        raise ValueError("p and q must exceed 1")
    f = np.asarray(f, dtype=float)
    phi = np.asarray(phi, dtype=float)
    pc = p / (p - 1.0)
    return lam * f * phi + np.abs(f) ** q / q + np.abs(phi) ** pc / pc


def eval_F(s, F: CoshExtremal):
    return F.value(s, 0)


def eval_F_prime(s, F: CoshExtremal):
    return F.value(s, 1)


def eval_Phi(s, F: CoshExtremal):
    return F.phi(s, 0)


def eval_G(s, G: ConvolutionExtremal):
    return G.value(s, 0)


def eval_U1(r, params: ProblemParams):
    return PLaplaceExtremal(params).value(r, 0)


def eval_U2(r, params: ProblemParams):
    return BiharmonicExtremal(params).value(r, 0)


def eval_U_cor(r, n: int, p: float):
    return CriticalBiharmonicExtremal(n, p).value(r, 0)


def eval_Utilde(r, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """(value, derivative) of the borderline profile."""
    prof = BorderlineProfile(n)
    return (prof.value(r, 0), prof.value(r, 1))
