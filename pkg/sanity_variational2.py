"""Scratch battery for families, randomized checks, and route identities."""
import math
import time

import numpy as np

from hrl.params import ProblemParams, rellich_constant
from hrl.functions import PolyGaussian, DerivativeCombination
from hrl.numerics import Grid, GridFunction
from hrl.variational import (MinimizeOptions, QuotientSpec, quotient,
                             sharpness_family, sobolev_constants,
                             verify_inequality)


def check_family(label, vals, target, eps):
    mono = all(vals[i + 1] <= vals[i] * (1.0 + 1e-12) for i in range(len(vals) - 1))
    rel = (vals[-1] - target) / target if target else float("nan")
    print(f"{label:28s} vals {['%.6g' % v for v in vals]} target {target:.6g}"
          f" rel@{eps[-1]:g} {rel:+.2e} mono {mono}")
    return mono, rel


def main():
    g = PolyGaussian([1.0], s0=0.0, sigma=1.0)
    eps = [1e-1, 1e-2, 1e-3]

    # Pure order-k radial ratios approach the product constant from above.
    pm = ProblemParams(n=5, p=2.0, alpha=0.0, k=2)
    vals = sharpness_family("radial", g, eps, params=pm)
    mono, rel = check_family("radial(5,2,0,2)", vals, 1.5625, eps)
    assert mono and abs(rel) < 5e-2

    pm2 = ProblemParams(n=4, p=3.0, alpha=1.0, k=3)
    tgt2 = rellich_constant(pm2).value
    vals = sharpness_family("radial(4,3,1,3)", g, eps, params=pm2) \
        if False else sharpness_family("radial", g, eps, params=pm2)
    mono, rel = check_family("radial(4,3,1,3)", vals, tgt2, eps)
    assert mono and abs(rel) < 5e-2

    # Half-line Hardy family, and its zero-rate weight where the values
    # scale exactly like eps^p.
    vals = sharpness_family("halfline", g, eps, a=0.2, p=1.5)
    mono, rel = check_family("halfline(a=.2,p=1.5)", vals, 0.2 ** 1.5, eps)
    assert mono and abs(rel) < 5e-2

    p = 1.5
    vals = sharpness_family("singular_hardy", g, [1.0] + eps, p=p)
    ratios = [v / vals[0] for v in vals[1:]]
    exact = [e ** p for e in eps]
    err = max(abs(r - x) / x for r, x in zip(ratios, exact))
    print(f"{'singular_hardy(p=1.5)':28s} ratio err {err:.2e}")
    assert err < 1e-9

    # Degenerate kinds: the squeeze family collapses the quotient.
    for label, sp in [
            ("squeeze M_pq(0)", QuotientSpec("M_pq", p=2.0, q=4.0, lam=0.0)),
            ("squeeze J_pq(.5,0,-1)", QuotientSpec("J_pq", p=2.0, q=4.0,
                                                   A=0.5, gamma=0.0, H=-1.0)),
            ("squeeze I_pq(.4,0)", QuotientSpec("I_pq", p=2.0, q=3.0,
                                                A=0.4, gamma=0.0))]:
        v1 = sharpness_family("squeeze", g, [1.0], spec=sp)[0]
        v3 = sharpness_family("squeeze", g, [1e-3], spec=sp)[0]
        print(f"{label:28s} v(1) {v1:.6g} v(1e-3) {v3:.6g} ratio {v3 / v1:.2e}")
        assert sp.degenerate()
        assert v3 < 1e-3 * v1

    # Closed-form kinds: any grid quotient sits above the infimum, and the
    # squeeze family lands within 5% of it.
    grid = Grid()
    s = grid.points()
    gf = GridFunction(grid, np.exp(-np.abs(s)) * (1.0 + 0.3 * np.sin(s)),
                      clamp=True)
    cf_specs = [
        QuotientSpec("M_p", p=1.7, lam=1.3),
        QuotientSpec("I_p", p=2.0, A=0.4, gamma=0.2),
        QuotientSpec("M_chain", p=2.0, lam=0.9, A_vec=(0.3,), gamma_vec=(0.5,)),
        QuotientSpec("J_p", p=2.0, A=0.7, gamma=0.0, H=0.0),
        QuotientSpec("J_p", p=2.5, A=0.3, gamma=1.87, H=1.1),
    ]
    for sp in cf_specs:
        cf = sp.closed_form()
        qv = quotient(sp, gf)
        fam = sharpness_family("squeeze", g, eps, spec=sp)
        ok = qv >= cf - 1e-6 and abs(fam[-1] - cf) / cf < 5e-2
        mono = all(fam[i + 1] <= fam[i] * (1 + 1e-12) for i in range(len(fam) - 1))
        print(f"{sp.kind:8s} cf {cf:.6g} grid_q {qv:.6g} fam@1e-3 {fam[-1]:.6g}"
              f" mono {mono} ok {ok}")
        assert ok and mono

    # Non-attainment flags.
    assert QuotientSpec("I_p", p=2.0, A=0.4, gamma=0.2).attained() is False
    assert QuotientSpec("J_pq", p=2.0, q=4.0, A=0.5, gamma=0.0,
                        H=0.0).attained() is False
    assert QuotientSpec("M_pq", p=2.0, q=4.0, lam=1.0).attained() is True

    # Randomized inequality checks, small sample counts.
    t0 = time.perf_counter()
    for kind, kw in [("hardy", dict(params=ProblemParams(3, 2.0, 0.5))),
                     ("rellich", dict(params=ProblemParams(5, 2.0, 0.0, k=2))),
                     ("poly", dict(params=ProblemParams(6, 2.5, 1.0), m=1)),
                     ("halfline_first", dict(tau=1.0, lam=0.5, p=2.0)),
                     ("halfline_second", dict(tau=1.0, lam=0.5, p=2.0))]:
        rep = verify_inequality(kind=kind, samples=30, seed=7, **kw)
        print(f"verify {kind:16s} const {rep.constant:.6g} viol"
              f" {rep.violations}/{rep.samples} min_q {rep.min_quotient:.6g}")
        assert rep.violations == 0, kind
    print(f"verify_inequality block {time.perf_counter() - t0:.1f}s")

    # Sobolev bookkeeping: (3,2,1) against the quadrature oracle value,
    # (5,2,2,1) existence and positivity.
    rep = sobolev_constants(ProblemParams(n=3, p=2.0, k=1))
    talenti = 3.0 * (math.pi / 2.0) ** (4.0 / 3.0)
    rel = (rep.value - talenti) / talenti
    print(f"sobolev(3,2,1) value {rep.value:.8f} rel {rel:+.2e} q {rep.q}"
          f" conv {rep.converged}")
    assert abs(rel) < 3e-2 and rep.q == 6.0

    rep2 = sobolev_constants(ProblemParams(n=5, p=2.0, k=2, j=1))
    print(f"sobolev(5,2,2,1) value {rep2.value:.8f} q {rep2.q}"
          f" conv {rep2.converged} iters {rep2.iterations}")
    assert rep2.value > 0 and rep2.converged

    # Second-order reduction identity: the (k=2, j=1) ratio at weight
    # 2p-n, the second-order line kind at (A, 0, 0) with 2A = n-2, and the
    # first-order kind at lam = n-2 on the derivative all agree.
    n, p, q = 3, 2.0, 4.0
    pm = ProblemParams(n=n, p=p, alpha=2.0 * p - n, k=2, j=1, q=q)
    sp_nd = QuotientSpec("rellich_nd", p=p, q=q, params=pm)
    base = PolyGaussian([0.4, 1.0], s0=0.3, sigma=1.2)
    q_nd = quotient(sp_nd, base)
    sp_j = QuotientSpec("J_pq", p=p, q=q, A=(n - 2) / 2.0, gamma=0.0, H=0.0)
    q_j = sp_nd.omega_factor() * quotient(sp_j, base)
    sp_m = QuotientSpec("M_pq", p=p, q=q, lam=float(n - 2))
    q_m = sp_nd.omega_factor() * quotient(
        sp_m, DerivativeCombination(base, np.array([0.0, 1.0])))
    print(f"route identity: nd {q_nd:.12g} J {q_j:.12g} M′ {q_m:.12g}")
    print(f"  rel nd-J {abs(q_nd - q_j) / q_nd:.2e}"
          f" rel J-M {abs(q_j - q_m) / q_j:.2e}")
    assert abs(q_nd - q_j) / q_nd < 1e-8
    assert abs(q_j - q_m) / q_j < 1e-8

    print("sanity_variational2 OK")


if __name__ == "__main__":
    main()
