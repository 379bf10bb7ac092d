"""Problem parameters and every closed-form constant of the theory.

The inequalities live on weighted spaces over R^n with weight |x|^alpha,
derivative order k, exponent p, an optional intermediate order j and an
optional higher integrability exponent q. All sharp constants are
products of the linear factors

    H_{alpha,k} = (n + alpha)/p - k
    gamma_{alpha,h} = ((n + alpha)/p - h)(n - 2 + h - (n + alpha)/p)

raised to the power p; degeneracy (a vanishing factor) is tracked
explicitly since the constants are continuous in alpha and cross zero on
known lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple


@dataclass(frozen=True)
class ProblemParams:
    """Indices (n, p, alpha, k, j, q) of one weighted inequality."""

    n: int
    p: float
    alpha: float = 0.0
    k: int = 1
    j: Optional[int] = None
    q: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be an integer >= 1")
        if self.j is not None:
            if int(self.j) != self.j or not (0 <= self.j <= self.k - 1):
                raise ValueError("j must be an integer in [0, k-1]")
        if self.q is not None and not self.q > self.p:
            raise ValueError("q must exceed p")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    def zero_tol(self) -> float:
        """Factor-size threshold below which a constant counts as zero."""
        return 1e-10 * (1.0 + abs(self.n) + abs(self.alpha))


@dataclass(frozen=True)
class ConstantReport:
    """A sharp constant as a product of |factor|^p pieces.

    value: the product of factors
    log_value: sum of log factors (-inf when degenerate), safe for
        parameter ranges where the plain product over/underflows
    degenerate: true iff some factor vanishes (within the zero tolerance)
    factors: the individual |base|^p factors after tolerance snapping
    """

    value: float
    degenerate: bool
    factors: Tuple[float, ...]
    log_value: float


def _report(bases: List[float], p: float, tol: float) -> ConstantReport:
    factors = []
    degenerate = False
    log_value = 0.0
    value = 1.0
    for b in bases:
        if abs(b) <= tol:
            factors.append(0.0)
            degenerate = True
        else:
            f = abs(b) ** p
            factors.append(f)
            log_value += p * math.log(abs(b))
            value *= f
    if degenerate:
        value = 0.0
        log_value = -math.inf
    return ConstantReport(value=value, degenerate=degenerate,
                          factors=tuple(factors), log_value=log_value)


def hardy_H(params: ProblemParams) -> float:
    """H_alpha = (n + alpha)/p - 1, the first-order drift."""
    return (params.n + params.alpha) / params.p - 1.0


def H_shift(params: ProblemParams, k: int) -> float:
    """H_{alpha,k} = (n + alpha)/p - k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return (params.n + params.alpha) / params.p - k


def gamma_h(params: ProblemParams, h: int) -> float:
    """gamma_{alpha,h} = ((n+alpha)/p - h)(n - 2 + h - (n+alpha)/p)."""
    if h < 1:
        raise ValueError("h must be >= 1")
    t = (params.n + params.alpha) / params.p
    return (t - h) * (params.n - 2.0 + h - t)


def A_h(params: ProblemParams, h: int) -> float:
    """A_h = (n-2)/2 - H_{alpha,h}; pairs with gamma_h so that
    A_h^2 + gamma_h = ((n-2)/2)^2 and H_h^2 + 2 A_h H_h - gamma_h = 0."""
    if h < 1:
        raise ValueError("h must be >= 1")
    return (params.n - 2.0) / 2.0 - H_shift(params, h)


def rellich_constant(params: ProblemParams) -> ConstantReport:
    """Sharp constant of the k-th order inequality between the |x|^alpha
    energy of nabla^k u and the |x|^{alpha-kp} norm of u (radial u).

    k = 1 is the Hardy constant |H_alpha|^p; even k = 2m gives
    prod_{h=1..m} |gamma_{alpha,2h}|^p; odd k = 2m+1 multiplies the Hardy
    factor into the shifted product.
    """
    p, k = params.p, params.k
    tol = params.zero_tol()
    if k == 1:
        return _report([hardy_H(params)], p, tol)
    if k % 2 == 0:
        m = k // 2
        bases = [gamma_h(params, 2 * h) for h in range(1, m + 1)]
    else:
        m = (k - 1) // 2
        bases = [hardy_H(params)]
        bases += [gamma_h(params, 2 * h + 1) for h in range(1, m + 1)]
    return _report(bases, p, tol)


def intermediate_constant(params: ProblemParams) -> ConstantReport:
    """Sharp constant between the order-k energy and the order-j one.

    delta_j = n - 1 - (n+alpha)/p + k - j enters the odd-j branches; the
    branch index i (j = 2i or 2i+1) always lands in range for
    1 <= j <= k-1, but the bounds are checked defensively.
    """
    if params.j is None:
        raise ValueError("params.j is required")
    k, j, p = params.k, params.j, params.p
    if not (1 <= j <= k - 1):
        raise ValueError("j must satisfy 1 <= j <= k-1")
    tol = params.zero_tol()
    t = (params.n + params.alpha) / params.p
    delta_j = params.n - 1.0 - t + k - j

    if k % 2 == 0:
        m = k // 2
        if j % 2 == 0:
            i = j // 2
            if not (1 <= i <= m - 1):
                raise ValueError("even-even branch index out of range")
            bases = [gamma_h(params, 2 * h) for h in range(1, m - i + 1)]
        else:
            i = (j - 1) // 2
            if not (0 <= i <= m - 1):
                raise ValueError("even-odd branch index out of range")
            bases = [delta_j]
            bases += [gamma_h(params, 2 * h) for h in range(1, m - i)]
    else:
        m = (k - 1) // 2
        if j % 2 == 0:
            i = j // 2
            if not (1 <= i <= m):
                raise ValueError("odd-even branch index out of range")
            bases = [hardy_H(params)]
            bases += [gamma_h(params, 2 * h + 1) for h in range(1, m - i + 1)]
        else:
            i = (j - 1) // 2
            if not (0 <= i <= m - 1):
                raise ValueError("odd-odd branch index out of range")
            bases = [hardy_H(params), delta_j]
            bases += [gamma_h(params, 2 * h + 1) for h in range(1, m - i)]
    return _report(bases, p, tol)


def beta_exponent(params: ProblemParams, order: int,
                  q: Optional[float] = None) -> float:
    """beta_{order,q} = n - q (n - order*p + alpha)/p.

    q defaults to params.q; an explicit q (even q <= p) may be passed for
    exponent bookkeeping outside the q > p regime.
    """
    if q is None:
        q = params.q
    if q is None:
        raise ValueError("q is required")
    if not (1 <= order <= params.k):
        raise ValueError("order must be in [1, k]")
    return params.n - q * (params.n - order * params.p + params.alpha) / params.p


def critical_exponent(params: ProblemParams, order: int) -> float:
    """np/(n - order*p), defined only for n > order*p."""
    if order < 1:
        raise ValueError("order must be >= 1")
    denom = params.n - order * params.p
    if denom <= 0:
        raise ValueError(f"critical exponent undefined: n <= {order}*p")
    return params.n * params.p / denom


def positivity_check(params: ProblemParams) -> Tuple[bool, List[str]]:
    """Whether the order-k sharp constant is strictly positive.

    Returns (ok, offending) where offending names the vanishing factors.
    """
    tol = params.zero_tol()
    offending = []
    k = params.k
    if k % 2 == 0:
        m = k // 2
        for h in range(1, m + 1):
            if abs(gamma_h(params, 2 * h)) <= tol:
                offending.append(f"gamma_{{alpha,{2 * h}}}")
    else:
        m = (k - 1) // 2
        if abs(hardy_H(params)) <= tol:
            offending.append("H_alpha")
        for h in range(1, m + 1):
            if abs(gamma_h(params, 2 * h + 1)) <= tol:
                offending.append(f"gamma_{{alpha,{2 * h + 1}}}")
    return (not offending, offending)


def nonradial_rellich_p2(n: int, alpha: float) -> float:
    """Second-order sharp constant over all (not only radial) functions
    at p = 2: min over integers i >= 0 of |gamma_{alpha,2} + i(n-2+i)|^2.

    The spherical-harmonic level i contributes i(n-2+i), which is
    increasing in i, so the scan stops once it exceeds 2|gamma| + 1.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    g2 = gamma_h(ProblemParams(n=n, p=2.0, alpha=alpha, k=2), 2)
    best = abs(g2) ** 2
    i = 1
    while True:
        ev = i * (n - 2.0 + i)
        best = min(best, abs(g2 + ev) ** 2)
        if ev > 2.0 * abs(g2) + 1.0:
            return best
        i += 1


def halfline_operator_constants(tau: float, lam: float, p: float) -> Tuple[float, float]:
    """Sharp constants of the half-line inequalities bounding the
    r^{tau-p} |v'|^p and r^{tau-2p} |v|^p norms by the
    r^tau |v'' + (lam-1) v'/r|^p energy."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    c1 = abs((tau + 1.0 - lam * p) / p) ** p
    c2 = abs((tau + 1.0 - lam * p) * (tau + 1.0 - 2.0 * p) / p ** 2) ** p
    return (c1, c2)


def hardy_halfline_constant(a: float, p: float) -> float:
    """|(a+1-p)/p|^p: the sharp constant of the 1-D weighted Hardy
    inequality between r^a |w'|^p and r^{a-p} |w|^p on (0, infinity)."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    return abs((a + 1.0 - p) / p) ** p
