"""Smooth profiles on the line with analytic derivatives.

Everything downstream (transport to radial profiles, norm identities,
quotients, residuals) consumes a ``LineFunction``: an object that can
evaluate g and its derivatives g', g'', ... at arbitrary points, and that
knows its decay class (compact support, or exponential rates at the two
ends). The concrete families here are closed under differentiation:

PolyGaussian    P(s) exp(-(s-s0)^2 / sigma^2), the random test profile
PolynomialBump  (1 - t^2)^m on a window, zero outside (annulus profiles)
ExpCoshPower    amp e^{a s} cosh(c s)^b, the shape of the 1-D extremals
ExpLine         plain exponential e^{mu s} (eigenfunction checks)

plus combinators for derivative combinations, linear combinations,
argument scaling and shifting.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

_LOG_TINY = -745.0  # exp underflows to 0 below this


def _log_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


class LineFunction:
    """A real function on the line with derivatives up to ``k_max``.

    decay_rates: (rho_minus, rho_plus) such that |g(s)| <~ e^{rho_minus s}
    as s -> -inf and |g(s)| <~ e^{-rho_plus s} as s -> +inf; None when the
    decay class is faster than exponential or the support is compact.
    support: (a, b) when g vanishes identically outside [a, b], else None.
    """

    k_max: int = 0
    decay_rates: Optional[Tuple[float, float]] = None
    support: Optional[Tuple[float, float]] = None

    def value(self, s, order: int = 0):
        raise NotImplementedError

    def __call__(self, s):
        return self.value(s, 0)

    def quad_interval(self) -> Optional[Tuple[float, float]]:
        """A finite window outside which the function is negligible."""
        return self.support


class PolyGaussian(LineFunction):
    """P(s) exp(-(s - s0)^2 / sigma^2) with polynomial P."""

    k_max = 64
    support = None
    decay_rates = None  # super-exponential

    def __init__(self, coeffs: Sequence[float], s0: float = 0.0,
                 sigma: float = 1.0):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if not coeffs.any():
            raise ValueError("polynomial part must be nontrivial")
        self.coeffs = coeffs
        self.s0 = float(s0)
        self.sigma = float(sigma)
        # rewrite P(s) = Q(t), t = s - s0; differentiation stays polynomial:
        # (Q e^{-t^2/sig^2})' = (Q' - (2/sig^2) t Q) e^{-t^2/sig^2}
        shift = npoly.Polynomial([self.s0, 1.0])
        q0 = npoly.Polynomial(coeffs)(shift).coef
        self._qs: List[np.ndarray] = [np.atleast_1d(q0)]

    def _poly(self, order: int) -> np.ndarray:
        while len(self._qs) <= order:
            q = self._qs[-1]
            dq = npoly.polyder(q) if len(q) > 1 else np.zeros(1)
            self._qs.append(npoly.polysub(dq, (2.0 / self.sigma ** 2)
                                          * npoly.polymulx(q)))
        return self._qs[order]

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        t = s - self.s0
        expo = -(t / self.sigma) ** 2
        w = np.where(expo > _LOG_TINY, np.exp(np.maximum(expo, _LOG_TINY)), 0.0)
        return npoly.polyval(t, self._poly(order)) * w

    def quad_interval(self) -> Tuple[float, float]:
        w = self.sigma * 32.0  # exp(-32^2) ~ 1e-445, dead even with poly growth
        return (self.s0 - w, self.s0 + w)


class PolynomialBump(LineFunction):
    """(1 - t^2)^m on |t| < 1, t = (s - center)/halfwidth; zero outside.

    C^{m-1} across the endpoints, so derivatives up to m-2 are continuous
    and piecewise smooth; keep m comfortably above the order you need.
    """

    decay_rates = None

    def __init__(self, center: float = 0.0, halfwidth: float = 1.0,
                 m: int = 8):
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if m < 2:
            raise ValueError("m must be at least 2")
        self.center = float(center)
        self.halfwidth = float(halfwidth)
        self.m = m
        self.k_max = m - 2
        self.support = (self.center - self.halfwidth,
                        self.center + self.halfwidth)
        base = np.zeros(2 * m + 1)
        # (1 - t^2)^m expanded by binomial theorem
        for i in range(m + 1):
            base[2 * i] = (-1.0) ** i * float(math.comb(m, i))
        self._polys: List[np.ndarray] = [base]

    def _poly(self, order: int) -> np.ndarray:
        while len(self._polys) <= order:
            prev = self._polys[-1]
            d = npoly.polyder(prev) if len(prev) > 1 else np.zeros(1)
            self._polys.append(np.atleast_1d(d))
        return self._polys[order]

    def value(self, s, order: int = 0):
        if order > self.k_max:
            raise ValueError(f"order {order} exceeds k_max {self.k_max}")
        s = np.asarray(s, dtype=float)
        t = (s - self.center) / self.halfwidth
        inside = np.abs(t) < 1.0
        out = np.zeros_like(t)
        out[inside] = npoly.polyval(t[inside], self._poly(order))
        return out / self.halfwidth ** order


class ExpCoshPower(LineFunction):
    """amp * e^{a s} * cosh(c s)^b, amp > 0.

    Derivatives are R_k(tanh(c s)) times the function itself, with the
    polynomials R_k generated by R_0 = 1,
    R_{k+1}(t) = (a + b c t) R_k(t) + c (1 - t^2) R_k'(t).
    Evaluation goes through log scale so large |s| never overflows.
    """

    k_max = 64
    support = None

    def __init__(self, amp: float, a: float, c: float, b: float):
        if amp <= 0:
            raise ValueError("amp must be positive")
        self.amp = float(amp)
        self.a = float(a)
        self.c = float(c)
        self.b = float(b)
        self._rs: List[np.ndarray] = [np.array([1.0])]
        rate_plus = -(self.a + self.b * abs(self.c))
        rate_minus = self.a - self.b * abs(self.c)
        self.decay_rates = (rate_minus, rate_plus)

    def _poly(self, order: int) -> np.ndarray:
        while len(self._rs) <= order:
            r = self._rs[-1]
            term1 = npoly.polymul([self.a, self.b * self.c], r)
            if len(r) > 1:
                term2 = self.c * npoly.polymul([1.0, 0.0, -1.0], npoly.polyder(r))
                nxt = npoly.polyadd(term1, term2)
            else:
                nxt = term1
            self._rs.append(np.atleast_1d(nxt))
        return self._rs[order]

    def log_value(self, s) -> np.ndarray:
        """log of the (positive) function itself."""
        s = np.asarray(s, dtype=float)
        return np.log(self.amp) + self.a * s + self.b * _log_cosh(self.c * s)

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        lg = self.log_value(s)
        g = np.where(lg > _LOG_TINY, np.exp(np.maximum(lg, _LOG_TINY)), 0.0)
        if order == 0:
            return g
        t = np.tanh(self.c * s)
        return npoly.polyval(t, self._poly(order)) * g

    def quad_interval(self) -> Optional[Tuple[float, float]]:
        rm, rp = self.decay_rates
        if rm <= 0 or rp <= 0:
            return None
        head = np.log(self.amp) + 745.0
        return (-head / rm, head / rp)


class ExpLine(LineFunction):
    """e^{mu s}; eigenfunction of every constant-coefficient operator."""

    k_max = 64
    support = None

    def __init__(self, mu: float):
        self.mu = float(mu)

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        return self.mu ** order * np.exp(np.clip(self.mu * s, _LOG_TINY, 700.0))


class DerivativeCombination(LineFunction):
    """sum_j coeffs[j] * g^{(j)} for a base LineFunction g.

    This is the closure of LineFunctions under constant-coefficient
    differential operators; composing two combinations multiplies the
    coefficient polynomials.
    """

    def __init__(self, base: LineFunction, coeffs: Sequence[float]):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if isinstance(base, DerivativeCombination):
            coeffs = npoly.polymul(coeffs, base.op_coeffs)
            base = base.base
        self.base = base
        self.op_coeffs = np.atleast_1d(coeffs)
        self.k_max = base.k_max - (len(self.op_coeffs) - 1)
        if self.k_max < 0:
            raise ValueError("base function lacks the required derivatives")
        self.support = base.support
        self.decay_rates = base.decay_rates

    def value(self, s, order: int = 0):
        if order > self.k_max:
            raise ValueError(f"order {order} exceeds k_max {self.k_max}")
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s, dtype=float)
        for jj, c in enumerate(self.op_coeffs):
            if c != 0.0:
                out = out + c * self.base.value(s, order + jj)
        return out

    def quad_interval(self):
        return self.base.quad_interval()


class LinComb(LineFunction):
    """coeffs[0]*f0 + coeffs[1]*f1 + ..."""

    def __init__(self, funcs: Sequence[LineFunction], coeffs: Sequence[float]):
        if len(funcs) != len(coeffs) or not funcs:
            raise ValueError("funcs and coeffs must be equal-length, nonempty")
        self.funcs = list(funcs)
        self.coeffs = [float(c) for c in coeffs]
        self.k_max = min(f.k_max for f in funcs)
        supports = [f.support for f in funcs]
        if all(sp is not None for sp in supports):
            self.support = (min(sp[0] for sp in supports),
                            max(sp[1] for sp in supports))
        else:
            self.support = None
        rates = [f.decay_rates for f in funcs]
        if any(r is None for r in rates):
            self.decay_rates = None
        else:
            self.decay_rates = (min(r[0] for r in rates),
                                min(r[1] for r in rates))

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s, dtype=float)
        for c, f in zip(self.coeffs, self.funcs):
            if c != 0.0:
                out = out + c * f.value(s, order)
        return out

    def quad_interval(self):
        ivs = [f.quad_interval() for f in self.funcs]
        if any(iv is None for iv in ivs):
            return None
        return (min(iv[0] for iv in ivs), max(iv[1] for iv in ivs))


class ScaledArg(LineFunction):
    """g(eps * s); derivatives pick up eps^order."""

    def __init__(self, base: LineFunction, eps: float):
        if eps == 0:
            raise ValueError("eps must be nonzero")
        self.base = base
        self.eps = float(eps)
        self.k_max = base.k_max
        if base.support is not None:
            a, b = base.support
            lo, hi = a / self.eps, b / self.eps
            self.support = (min(lo, hi), max(lo, hi))
        if base.decay_rates is not None and self.eps > 0:
            rm, rp = base.decay_rates
            self.decay_rates = (rm * self.eps, rp * self.eps)

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        return self.eps ** order * self.base.value(self.eps * s, order)

    def quad_interval(self):
        iv = self.base.quad_interval()
        if iv is None:
            return None
        lo, hi = iv[0] / self.eps, iv[1] / self.eps
        return (min(lo, hi), max(lo, hi))


class Shifted(LineFunction):
    """g(s - s0)."""

    def __init__(self, base: LineFunction, s0: float):
        self.base = base
        self.s0 = float(s0)
        self.k_max = base.k_max
        if base.support is not None:
            self.support = (base.support[0] + s0, base.support[1] + s0)
        self.decay_rates = base.decay_rates

    def value(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        return self.base.value(s - self.s0, order)

    def quad_interval(self):
        iv = self.base.quad_interval()
        if iv is None:
            return None
        return (iv[0] + self.s0, iv[1] + self.s0)


def central_difference_check(g: LineFunction, order: int,
                             points: Sequence[float],
                             h: float = 1e-5) -> float:
    """Max relative deviation of g^{(order)} from differencing g^{(order-1)}.

    Relative to the larger of the analytic value and the typical scale of
    g^{(order)} over the points, so near-zeros do not blow up the ratio.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    pts = np.asarray(points, dtype=float)
    exact = g.value(pts, order)
    approx = (g.value(pts + h, order - 1) - g.value(pts - h, order - 1)) / (2 * h)
    scale = max(np.max(np.abs(exact)), 1e-30)
    return float(np.max(np.abs(exact - approx) / scale))
