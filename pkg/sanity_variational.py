"""Scratch battery for the quotient minimizer. Not part of the package."""
import math
import time

import numpy as np

from hrl.params import ProblemParams
from hrl.numerics import Grid, GridFunction
from hrl.variational import MinimizeOptions, QuotientSpec, minimize, quotient

CASES = [
    ("M_pq(2,4,1)", QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=1.0),
     2.309401076758503),
    ("M_pq(1.5,3,-0.8)", QuotientSpec(kind="M_pq", p=1.5, q=3.0, lam=-0.8),
     1.697056274847714),
    ("M_pq(3,5,2)", QuotientSpec(kind="M_pq", p=3.0, q=5.0, lam=2.0),
     13.381856323195532),
    ("J_pq(A=.3,H=1.1)", QuotientSpec(kind="J_pq", p=2.0, q=4.0, A=0.3,
                                      gamma=1.87, H=1.1),
     5.118854038421751),
]


def run_case(label, spec, target, opts):
    t0 = time.perf_counter()
    res = minimize(spec, options=opts)
    dt = time.perf_counter() - t0
    rel = (res.value - target) / target
    hist = np.asarray(res.history)
    mono = bool(np.all(np.diff(hist) <= 1e-12 * np.maximum(np.abs(hist[:-1]), 1e-300)))
    qv = quotient(spec, res.minimizer)
    print(f"{label:22s} Q {res.value:.10f} rel {rel:+.2e} iters {res.iterations}"
          f" conv {res.converged} mono {mono} q==v {abs(qv - res.value) < 1e-13}"
          f" {dt:.2f}s")
    return rel, mono, res


def main():
    opts = MinimizeOptions()
    for label, spec, target, in CASES:
        rel, mono, res = run_case(label, spec, target, opts)
        assert abs(rel) < 1e-2, (label, rel)
        assert mono, label
        assert res.converged, label

    # Sobolev n=3, p=2, k=1 via the reduced line quotient; Talenti constant.
    par = ProblemParams(n=3, p=2.0, k=1, j=0, q=6.0)
    spec = QuotientSpec(kind="rellich_nd", p=2.0, q=6.0, params=par)
    talenti = 3.0 * (math.pi / 2.0) ** (4.0 / 3.0)
    t0 = time.perf_counter()
    res = minimize(spec, options=opts)
    dt = time.perf_counter() - t0
    rel = (res.value - talenti) / talenti
    print(f"{'sobolev(3,2,1)':22s} Q {res.value:.10f} rel {rel:+.2e}"
          f" iters {res.iterations} conv {res.converged} {dt:.2f}s")
    assert abs(rel) < 3e-2, rel

    # Degenerate kind: lam=0 makes the infimum 0 and unattained.
    dg = minimize(QuotientSpec(kind="M_pq", p=2.0, q=4.0, lam=0.0), options=opts)
    print(f"{'degenerate lam=0':22s} value {dg.value} degenerate {dg.degenerate}"
          f" conv {dg.converged}")
    assert dg.degenerate and dg.value == 0.0

    # hardy1d, mu > 0: infimum mu^p, not attained; grid value sits above.
    hspec = QuotientSpec(kind="hardy1d", p=1.5, a=0.2)
    hres = minimize(hspec, options=opts)
    hrel = (hres.value - 0.2 ** 1.5) / 0.2 ** 1.5
    print(f"{'hardy1d(p=1.5,mu=.2)':22s} Q {hres.value:.10f} rel {hrel:+.2e}"
          f" iters {hres.iterations} conv {hres.converged}"
          f" attained {hres.attained}")
    assert hres.value >= 0.2 ** 1.5 * (1.0 - 1e-9)

    # Explicit init path: start from a blunt gaussian, M_pq(2,4,1).
    g = Grid()
    s = g.points()
    init = GridFunction(g, np.exp(-0.5 * (s - 0.7) ** 2), clamp=True)
    ires = minimize(CASES[0][1], init=init, options=opts)
    irel = (ires.value - CASES[0][2]) / CASES[0][2]
    print(f"{'M_pq(2,4,1) init':22s} Q {ires.value:.10f} rel {irel:+.2e}"
          f" iters {ires.iterations} conv {ires.converged}")
    assert abs(irel) < 1e-2

    print("sanity_variational OK")


if __name__ == "__main__":
    main()
