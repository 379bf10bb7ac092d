"""Scratch battery for the residuals module. Not part of the package."""
import time

import numpy as np

from hrl.params import ProblemParams, A_h, gamma_h, hardy_H
from hrl.closed_forms import (BiharmonicExtremal, ConvolutionExtremal,
                              CoshExtremal, CriticalBiharmonicExtremal,
                              BorderlineProfile, PLaplaceExtremal)
from hrl.functions import PolynomialBump
from hrl.emden import TransportedProfile
from hrl.residuals import (g_identity_residual, hle_system_check,
                           integrability_flags, phi_identity_residual,
                           residual_f_system, residual_g_equation,
                           residual_radial_biharmonic,
                           residual_radial_p_laplace)


def main():
    t0 = time.perf_counter()

    # First-order system, both exponent branches, and the sign flip.
    for p, q, lam in [(2.0, 4.0, 1.0), (1.5, 3.0, -0.8)]:
        rep = residual_f_system(CoshExtremal(p, q, lam))
        print(f"f_system({p},{q},{lam}) system {rep.system.max_abs:.2e}"
              f" conserv {rep.conservation.max_abs:.2e}")
        assert rep.system.max_abs <= 1e-6
        assert rep.conservation.max_abs <= 1e-9
    r_plus = residual_f_system(CoshExtremal(2.0, 4.0, 1.0))
    r_minus = residual_f_system(CoshExtremal(2.0, 4.0, -1.0))
    d = abs(r_plus.system.max_abs - r_minus.system.max_abs)
    print(f"f_system sign flip delta {d:.2e}")
    assert d <= 1e-12

    rep = residual_f_system(CoshExtremal(2.0, 4.0, 1.0),
                            phi_mode="differenced", fd_step=2e-2)
    rep2 = residual_f_system(CoshExtremal(2.0, 4.0, 1.0),
                             phi_mode="differenced", fd_step=1e-2)
    print(f"f_system differenced step ratio"
          f" {rep.system.max_abs / rep2.system.max_abs:.1f}")
    assert rep.system.max_abs / rep2.system.max_abs >= 3.0

    # Second-order extremal: equation residual both H signs, identity.
    for A, H in ((0.3, 1.0), (0.8, -0.6)):
        gamma = H * H + 2.0 * A * H
        G = ConvolutionExtremal(2.0, 4.0, A, gamma, H)
        rep = residual_g_equation(G)
        print(f"g_equation(H={H}) max_abs {rep.max_abs:.2e}"
              f" max_rel {rep.max_rel:.2e}")
        assert rep.max_abs <= 1e-6
        idr = g_identity_residual(G, s_grid=np.linspace(-15.0, 15.0, 301))
        print(f"g_identity(H={H}) max_abs {idr.max_abs:.2e}")
        assert idr.max_abs <= 1e-8

    # Weighted second-order radial equation.
    for n, p, q, alpha in [(3, 2.0, 4.0, 0.0), (4, 2.0, 3.0, 1.0),
                           (3, 2.0, 4.0, -1.5)]:
        pm = ProblemParams(n=n, p=p, alpha=alpha, k=1, q=q)
        U = PLaplaceExtremal(pm)
        rep = residual_radial_p_laplace(
            U, pm, r_grid=np.geomspace(0.05, 20.0, 400))
        print(f"p_laplace{(n, p, q, alpha)} max_rel {rep.max_rel:.2e}")
        assert rep.max_rel <= 1e-5

    # Fourth-order equation, weak form: critical case and both branches.
    Uc = CriticalBiharmonicExtremal(5, 2.0)
    pmc = ProblemParams(n=5, p=2.0, alpha=0.0, k=2, j=1, q=10.0 / 3.0)
    rep = residual_radial_biharmonic(Uc, pmc)
    print(f"biharmonic critical weak max_rel {rep.max_rel:.2e}")
    assert rep.max_rel <= 1e-6

    for alpha in (0.5, -2.0):
        pm = ProblemParams(n=5, p=2.0, alpha=alpha, k=2, j=1, q=3.0)
        U = BiharmonicExtremal(pm)
        rep = residual_radial_biharmonic(U, pm)
        print(f"biharmonic alpha={alpha} weak max_rel {rep.max_rel:.2e}"
              f" (branch {'tail' if U.from_infinity else 'head'})")
        assert rep.max_rel <= 1e-6

    rep_s = residual_radial_biharmonic(
        Uc, pmc, form="strong", r_grid=np.geomspace(0.1, 10.0, 100),
        fd_step=1e-2)
    rep_s2 = residual_radial_biharmonic(
        Uc, pmc, form="strong", r_grid=np.geomspace(0.1, 10.0, 100),
        fd_step=5e-3)
    print(f"biharmonic strong {rep_s.max_rel:.2e} halved"
          f" {rep_s2.max_rel:.2e} ratio {rep_s.max_abs / rep_s2.max_abs:.1f}")
    assert rep_s.max_abs / rep_s2.max_abs >= 3.0

    # Borderline momentum identity.
    rep = phi_identity_residual(4, r_grid=np.geomspace(0.01, 50.0, 400))
    print(f"phi_identity(n=4) max_abs {rep.max_abs:.2e}")
    assert rep.max_abs <= 1e-8

    # Exponent bookkeeping: hyperbola holds for random valid params.
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 12))
        p = float(rng.uniform(1.1, 4.0))
        alpha = float(rng.uniform(-3.0, 3.0))
        q = float(rng.uniform(p + 0.1, p + 4.0))
        pm = ProblemParams(n=n, p=p, alpha=alpha, k=2, j=0, q=q)
        rep = hle_system_check(pm)
        worst = max(worst, abs(rep.hyperbola_residual))
    print(f"hyperbola worst residual {worst:.2e}")
    assert worst <= 1e-13

    # System residual at the grid minimizer.
    from hrl.variational import QuotientSpec, minimize
    pm = ProblemParams(n=5, p=2.0, alpha=0.0, k=2, j=0, q=3.0)
    spec = QuotientSpec("rellich_nd", p=2.0, q=3.0, params=pm)
    res = minimize(spec)
    rep = hle_system_check(pm, minimizer=res.minimizer)
    print(f"hle system max_rel {rep.system.max_rel:.2e}"
          f" closure {rep.closure_max:.2e} value {res.value:.6f}"
          f" conv {res.converged}")
    assert rep.system.max_rel <= 5e-2
    assert rep.closure_max <= 1e-10

    # Integrability triples.
    pm4 = ProblemParams(n=4, p=2.0)
    flags = integrability_flags(BorderlineProfile(4), pm4)
    print(f"integrability borderline {flags}")
    assert flags == (True, True, False)

    pm5 = ProblemParams(n=5, p=2.0)
    flags = integrability_flags(CriticalBiharmonicExtremal(5, 2.0), pm5)
    print(f"integrability critical {flags}")
    assert flags == (True, True, True)

    bump = TransportedProfile(PolynomialBump(center=0.5, halfwidth=1.0, m=8),
                              ProblemParams(n=4, p=2.0, k=2), 2)
    flags = integrability_flags(bump, pm4)
    print(f"integrability annulus {flags}")
    assert flags == (True, True, True)

    print(f"sanity_residuals OK {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
