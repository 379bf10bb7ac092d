"""HTTP API over the toolkit.

Each command endpoint accepts a flat JSON body mirroring the CLI flags,
runs the corresponding library call, and returns a single result record
(schema-versioned, inputs echoed, timing isolated in its own block so
records are byte-comparable without it).  Domain validation failures
surface as 422 responses whose detail names the offending field; the
CLI maps those to exit code 2.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .params import (ProblemParams, intermediate_constant, rellich_constant)
from .numerics import Grid
from .functions import PolyGaussian
from .closed_forms import (BiharmonicExtremal, BorderlineProfile,
                           CoshExtremal, ConvolutionExtremal,
                           CriticalBiharmonicExtremal, PLaplaceExtremal)
from .variational import (MinimizeError, MinimizeOptions, QuotientSpec,
                          extremal_quotient, minimize, sharpness_family,
                          verify_inequality)
from . import residuals as res_mod
from .records import SCHEMA_VERSION, SWEEP_COLUMNS, make_record

app = FastAPI(title="hrl", version=__version__)


def _invalid(message: str) -> None:
    raise HTTPException(status_code=422, detail=message)


def _need(values: Dict[str, Any], context: str, *fields: str) -> None:
    for f in fields:
        if values.get(f) is None:
            _invalid(f"{context} requires field '{f}'")


class ResultRecordModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_ver: int = Field(default=SCHEMA_VERSION, alias="schema")
    version: str
    command: str
    seed: Optional[int] = None
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]
    timing: Dict[str, Optional[float]]


class HealthModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    status: str
    version: str
    schema_ver: int = Field(default=SCHEMA_VERSION, alias="schema")


@app.get("/healthz", response_model=HealthModel)
def healthz() -> HealthModel:
    return HealthModel(status="ok", version=__version__)


# -- parameter plumbing ------------------------------------------------------


def _build_params(n: Optional[int], p: Optional[float], alpha: float,
                  k: int = 1, j: Optional[int] = None,
                  q: Optional[float] = None,
                  context: str = "params") -> ProblemParams:
    _need({"n": n, "p": p}, context, "n", "p")
    try:
        return ProblemParams(n=n, p=p, alpha=alpha, k=k, j=j, q=q)
    except (ValueError, TypeError) as exc:
        _invalid(str(exc))


class ConstantsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=2)
    p: float = Field(gt=1.0)
    alpha: float = 0.0
    k: int = Field(default=1, ge=1)
    j: Optional[int] = Field(default=None, ge=1)


@app.post("/constants", response_model=ResultRecordModel)
def constants(req: ConstantsRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    params = _build_params(req.n, req.p, req.alpha, req.k, req.j)
    try:
        rep = (rellich_constant(params) if req.j is None
               else intermediate_constant(params))
    except ValueError as exc:
        _invalid(str(exc))
    outputs = {
        "value": rep.value,
        "degenerate": rep.degenerate,
        "factors": list(rep.factors),
        "log_value": rep.log_value,
    }
    return make_record("constants", req.model_dump(), outputs,
                       seconds=time.perf_counter() - t0)


# -- closed-form extremal evaluation ----------------------------------------

_LINE_KINDS = ("cosh", "convolution")
_RADIAL_KINDS = ("p_laplace", "biharmonic", "critical_biharmonic",
                 "borderline")


class ExtremalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["cosh", "convolution", "p_laplace", "biharmonic",
                  "critical_biharmonic", "borderline"]
    p: Optional[float] = None
    q: Optional[float] = None
    lam: Optional[float] = None
    A: Optional[float] = None
    gamma: Optional[float] = None
    H: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=2)
    alpha: float = 0.0
    points: Optional[List[float]] = None
    order: int = Field(default=0, ge=0, le=4)


def _default_points(kind: str) -> np.ndarray:
    if kind in _LINE_KINDS:
        return np.linspace(-10.0, 10.0, 101)
    return np.geomspace(1e-2, 1e2, 101)


@app.post("/extremal", response_model=ResultRecordModel)
def extremal(req: ExtremalRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    pts = np.asarray(req.points, dtype=float) if req.points \
        else _default_points(req.kind)
    if req.kind in _RADIAL_KINDS and np.any(pts <= 0.0):
        _invalid("points must be positive for radial kinds")
    try:
        if req.kind == "cosh":
            _need(d, "cosh extremal", "p", "q", "lam")
            prof = CoshExtremal(req.p, req.q, req.lam)
        elif req.kind == "convolution":
            _need(d, "convolution extremal", "p", "q", "A", "gamma", "H")
            prof = ConvolutionExtremal(req.p, req.q, req.A, req.gamma, req.H)
        elif req.kind == "p_laplace":
            params = _build_params(req.n, req.p, req.alpha, 1, None, req.q,
                                   context="p_laplace extremal")
            prof = PLaplaceExtremal(params)
        elif req.kind == "biharmonic":
            params = _build_params(req.n, req.p, req.alpha, 2, None, req.q,
                                   context="biharmonic extremal")
            prof = BiharmonicExtremal(params)
        elif req.kind == "critical_biharmonic":
            _need(d, "critical biharmonic extremal", "n", "p")
            prof = CriticalBiharmonicExtremal(req.n, req.p)
        else:
            _need(d, "borderline profile", "n")
            prof = BorderlineProfile(req.n)
        values = prof.value(pts, req.order)
    except ValueError as exc:
        _invalid(str(exc))
    outputs: Dict[str, Any] = {"points": pts, "values": values,
                               "order": req.order}
    if req.kind == "borderline" and req.order == 0:
        outputs["laplacian"] = prof.laplacian_closed_form(pts)
    rates = getattr(prof, "decay_rates", None)
    if rates is not None:
        outputs["decay_rates"] = list(rates)
    return make_record("extremal", d, outputs,
                       seconds=time.perf_counter() - t0)


# -- randomized inequality verification -------------------------------------


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["hardy", "rellich", "poly",
                  "halfline_first", "halfline_second"] = "hardy"
    n: Optional[int] = Field(default=None, ge=2)
    p: Optional[float] = Field(default=None, gt=1.0)
    alpha: float = 0.0
    k: int = Field(default=1, ge=1)
    m: int = Field(default=1, ge=1)
    tau: Optional[float] = None
    lam: Optional[float] = None
    samples: int = Field(default=200, ge=1, le=100000)
    seed: int = 0
    slack: float = Field(default=1e-6, ge=0.0)


@app.post("/verify", response_model=ResultRecordModel)
def verify(req: VerifyRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    try:
        if req.kind.startswith("halfline"):
            _need(d, req.kind, "tau", "lam", "p")
            rep = verify_inequality(kind=req.kind, samples=req.samples,
                                    seed=req.seed, tau=req.tau, lam=req.lam,
                                    p=req.p, slack=req.slack)
        else:
            kk = req.k if req.kind != "poly" else 2 * req.m
            params = _build_params(req.n, req.p, req.alpha, kk,
                                   context=f"{req.kind} verification")
            rep = verify_inequality(params=params, kind=req.kind,
                                    samples=req.samples, seed=req.seed,
                                    m=req.m, slack=req.slack)
    except ValueError as exc:
        _invalid(str(exc))
    outputs = {
        "constant": rep.constant,
        "samples": rep.samples,
        "violations": rep.violations,
        "min_quotient": rep.min_quotient,
        "passed": rep.violations == 0,
        "slack": req.slack,
    }
    return make_record("verify", d, outputs, seed=req.seed,
                       seconds=time.perf_counter() - t0)


# -- sharpness families ------------------------------------------------------

_DEFAULT_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


class SharpnessRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["squeeze", "radial", "halfline", "singular_hardy"]
    epsilons: List[float] = Field(default_factory=lambda:
                                  list(_DEFAULT_EPSILONS))
    n: Optional[int] = Field(default=None, ge=2)
    p: Optional[float] = Field(default=None, gt=1.0)
    alpha: float = 0.0
    k: int = Field(default=1, ge=1)
    a: Optional[float] = None
    spec_kind: Optional[str] = None
    q: Optional[float] = None
    lam: Optional[float] = None
    A: Optional[float] = None
    gamma: Optional[float] = None
    H: Optional[float] = None


def _build_spec(req: SharpnessRequest) -> QuotientSpec:
    """The quotient being squeezed; mirrors the family dispatch so the
    record can carry the reference value and degeneracy flag."""
    if req.kind == "radial":
        params = _build_params(req.n, req.p, req.alpha, req.k,
                               context="radial family")
        return QuotientSpec("rellich_nd", p=req.p, params=params)
    if req.kind == "halfline":
        _need(req.model_dump(), "halfline family", "a", "p")
        return QuotientSpec("hardy1d", p=req.p, a=req.a)
    if req.kind == "singular_hardy":
        _need(req.model_dump(), "singular_hardy family", "p")
        return QuotientSpec("hardy1d", p=req.p, a=req.p - 1.0)
    _need(req.model_dump(), "squeeze family", "spec_kind", "p")
    params = None
    if req.spec_kind == "rellich_nd":
        params = _build_params(req.n, req.p, req.alpha, req.k, None, req.q,
                               context="squeeze family")
    return QuotientSpec(req.spec_kind, p=req.p, q=req.q, lam=req.lam,
                        A=req.A, gamma=req.gamma, H=req.H, a=req.a,
                        params=params)


@app.post("/sharpness", response_model=ResultRecordModel)
def sharpness(req: SharpnessRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    base = PolyGaussian((1.0,))
    try:
        spec = _build_spec(req)
        quotients = sharpness_family(req.kind, base, req.epsilons,
                                     spec=spec if req.kind == "squeeze"
                                     else None,
                                     params=spec.params, a=spec.a, p=spec.p)
        reference = spec.closed_form()
        if reference is None:
            reference = extremal_quotient(spec)
        degenerate = spec.degenerate()
    except ValueError as exc:
        _invalid(str(exc))
    mono = all(b < a for a, b in zip(quotients, quotients[1:]))
    outputs: Dict[str, Any] = {
        "epsilons": [float(e) for e in req.epsilons],
        "quotients": quotients,
        "monotone_decreasing": mono,
        "reference": reference,
        "degenerate": degenerate,
    }
    if reference is not None and reference > 0.0 and quotients:
        outputs["final_rel_gap"] = (quotients[-1] - reference) / reference
    return make_record("sharpness", d, outputs,
                       seconds=time.perf_counter() - t0)


# -- variational minimization ------------------------------------------------


class MinimizeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec_kind: str = "rellich_nd"
    p: float = Field(gt=1.0)
    q: Optional[float] = None
    lam: Optional[float] = None
    A: Optional[float] = None
    gamma: Optional[float] = None
    H: Optional[float] = None
    a: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=2)
    alpha: float = 0.0
    k: int = Field(default=1, ge=1)
    j: Optional[int] = Field(default=None, ge=0)
    grid_l: float = Field(default=30.0, gt=0.0)
    grid_n: int = Field(default=4097, ge=33)
    max_iters: int = Field(default=3000, ge=1)
    rel_tol: float = Field(default=1e-9, gt=0.0)
    include_history: bool = True
    include_profile: bool = False


@app.post("/minimize", response_model=ResultRecordModel)
def minimize_endpoint(req: MinimizeRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    try:
        params = None
        if req.spec_kind == "rellich_nd":
            params = _build_params(req.n, req.p, req.alpha, req.k, req.j,
                                   req.q, context="rellich_nd minimization")
        spec = QuotientSpec(req.spec_kind, p=req.p, q=req.q, lam=req.lam,
                            A=req.A, gamma=req.gamma, H=req.H, a=req.a,
                            params=params)
        opts = MinimizeOptions(grid=Grid(L=req.grid_l, N=req.grid_n),
                               max_iters=req.max_iters, rel_tol=req.rel_tol)
        result = minimize(spec, options=opts)
        reference = spec.closed_form()
        if reference is None:
            reference = extremal_quotient(spec)
    except (ValueError, MinimizeError) as exc:
        _invalid(str(exc))
    outputs: Dict[str, Any] = {
        "value": result.value,
        "iterations": result.iterations,
        "converged": result.converged,
        "degenerate": result.degenerate,
        "attained": result.attained,
        "reference": reference,
        "grid": {"L": req.grid_l, "N": req.grid_n},
        "rel_tol": req.rel_tol,
    }
    if reference is not None and reference > 0.0:
        outputs["rel_gap"] = (result.value - reference) / reference
    if req.include_history:
        outputs["history"] = result.history
    if req.include_profile and result.minimizer is not None:
        outputs["minimizer"] = {"points": result.minimizer.grid.points(),
                                "values": result.minimizer.values}
    return make_record("minimize", d, outputs,
                       seconds=time.perf_counter() - t0)


# -- residual checks ---------------------------------------------------------

_CHECKS = ("f_system", "g_equation", "g_identity", "p_laplace",
           "biharmonic", "critical_biharmonic", "phi_identity", "hle",
           "integrability")


class ResidualRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    check: Literal["f_system", "g_equation", "g_identity", "p_laplace",
                   "biharmonic", "critical_biharmonic", "phi_identity",
                   "hle", "integrability"]
    p: Optional[float] = None
    q: Optional[float] = None
    lam: Optional[float] = None
    A: Optional[float] = None
    gamma: Optional[float] = None
    H: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=2)
    alpha: float = 0.0
    form: Literal["weak", "strong"] = "weak"
    phi_mode: Literal["analytic", "differenced"] = "analytic"
    fd_step: Optional[float] = Field(default=None, gt=0.0)
    n_tests: int = Field(default=10, ge=1, le=100)
    profile: Literal["borderline", "critical", "biharmonic"] = "borderline"
    with_minimizer: bool = False
    grid_l: float = Field(default=30.0, gt=0.0)
    grid_n: int = Field(default=4097, ge=33)
    tolerance: Optional[float] = Field(default=None, gt=0.0)


def _report_dict(rep: res_mod.ResidualReport) -> Dict[str, Any]:
    return {"max_abs": rep.max_abs, "max_rel": rep.max_rel}


def _run_residual(req: ResidualRequest) -> Dict[str, Any]:
    d = req.model_dump()
    if req.check == "f_system":
        _need(d, "f_system check", "p", "q", "lam")
        F = CoshExtremal(req.p, req.q, req.lam)
        kw = {"phi_mode": req.phi_mode}
        if req.fd_step is not None:
            kw["fd_step"] = req.fd_step
        rep = res_mod.residual_f_system(F, **kw)
        out = {"system": _report_dict(rep.system),
               "conservation": _report_dict(rep.conservation)}
        out["headline"] = max(rep.system.max_abs, rep.conservation.max_abs)
        return out
    if req.check in ("g_equation", "g_identity"):
        _need(d, req.check + " check", "p", "q", "A", "gamma", "H")
        G = ConvolutionExtremal(req.p, req.q, req.A, req.gamma, req.H)
        if req.check == "g_equation":
            rep = res_mod.residual_g_equation(G)
        elif req.fd_step is not None:
            rep = res_mod.g_identity_residual(G, fd_step=req.fd_step)
        else:
            rep = res_mod.g_identity_residual(G)
        out = {"report": _report_dict(rep), "headline": rep.max_abs}
        return out
    if req.check == "p_laplace":
        params = _build_params(req.n, req.p, req.alpha, 1, None, req.q,
                               context="p_laplace check")
        U = PLaplaceExtremal(params)
        kw = {}
        if req.fd_step is not None:
            kw["fd_step"] = req.fd_step
        rep = res_mod.residual_radial_p_laplace(U, params, **kw)
        return {"report": _report_dict(rep), "headline": rep.max_rel}
    if req.check == "biharmonic":
        params = _build_params(req.n, req.p, req.alpha, 2, None, req.q,
                               context="biharmonic check")
        U = BiharmonicExtremal(params)
        rep = res_mod.residual_radial_biharmonic(U, params, form=req.form)
        return {"report": _report_dict(rep), "form": req.form,
                "headline": rep.max_rel}
    if req.check == "critical_biharmonic":
        _need(d, "critical_biharmonic check", "n", "p")
        if not req.n > 2 * req.p:
            _invalid("critical_biharmonic check requires n > 2p "
                     "(field 'n')")
        qc = req.n * req.p / (req.n - 2 * req.p)
        params = ProblemParams(n=req.n, p=req.p, alpha=0.0, k=2, q=qc)
        U = CriticalBiharmonicExtremal(req.n, req.p)
        rep = res_mod.residual_radial_biharmonic(U, params, form=req.form)
        return {"report": _report_dict(rep), "q_critical": qc,
                "form": req.form, "headline": rep.max_rel}
    if req.check == "phi_identity":
        _need(d, "phi_identity check", "n")
        rep = res_mod.phi_identity_residual(req.n)
        return {"report": _report_dict(rep), "headline": rep.max_abs}
    if req.check == "hle":
        params = _build_params(req.n, req.p, req.alpha, 2, None, req.q,
                               context="hle check")
        minimizer = None
        if req.with_minimizer:
            spec = QuotientSpec("rellich_nd", p=req.p, q=req.q,
                                params=params)
            opts = MinimizeOptions(grid=Grid(L=req.grid_l, N=req.grid_n))
            minimizer = minimize(spec, options=opts).minimizer
        rep = res_mod.hle_system_check(params, minimizer=minimizer,
                                       n_tests=req.n_tests)
        out = {"a": rep.a, "b": rep.b,
               "hyperbola_residual": rep.hyperbola_residual,
               "admissible": rep.admissible}
        headline = abs(rep.hyperbola_residual)
        if rep.system is not None:
            out["system"] = _report_dict(rep.system)
            out["closure_max"] = rep.closure_max
            headline = max(headline, rep.system.max_rel, rep.closure_max)
        out["headline"] = headline
        return out
    # integrability
    if req.profile == "borderline":
        _need(d, "integrability check", "n")
        p_val = req.n / 2.0
        params = ProblemParams(n=req.n, p=p_val, alpha=0.0, k=2,
                               q=p_val + 1.0)
        U = BorderlineProfile(req.n)
    elif req.profile == "critical":
        _need(d, "integrability check", "n", "p")
        if not req.n > 2 * req.p:
            _invalid("critical profile requires n > 2p (field 'n')")
        qc = req.n * req.p / (req.n - 2 * req.p)
        params = ProblemParams(n=req.n, p=req.p, alpha=0.0, k=2, q=qc)
        U = CriticalBiharmonicExtremal(req.n, req.p)
    else:
        params = _build_params(req.n, req.p, req.alpha, 2, None, req.q,
                               context="integrability check")
        U = BiharmonicExtremal(params)
    flags = res_mod.integrability_flags(U, params)
    return {"laplacian_energy_finite": flags[0],
            "gradient_norm_finite": flags[1],
            "value_norm_finite": flags[2]}


@app.post("/residual", response_model=ResultRecordModel)
def residual(req: ResidualRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    try:
        outputs = _run_residual(req)
    except ValueError as exc:
        _invalid(str(exc))
    if req.tolerance is not None and "headline" in outputs:
        outputs["tolerance"] = req.tolerance
        outputs["within_tolerance"] = outputs["headline"] <= req.tolerance
    return make_record("residual", d, outputs,
                       seconds=time.perf_counter() - t0)


# -- parameter sweeps --------------------------------------------------------

_SWEEP_FIELDS = {
    "constants": ("n", "p", "alpha", "k", "j"),
    "sharpness": ("n", "p", "alpha", "k", "a", "epsilon"),
}
_INT_FIELDS = ("n", "k", "j")
_MAX_COMBINATIONS = 100000


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["constants", "sharpness"]
    kind: Optional[Literal["squeeze", "radial", "halfline",
                           "singular_hardy"]] = None
    n: Optional[int] = Field(default=None, ge=2)
    p: Optional[float] = Field(default=None, gt=1.0)
    alpha: float = 0.0
    k: int = Field(default=1, ge=1)
    j: Optional[int] = Field(default=None, ge=1)
    a: Optional[float] = None
    ranges: Dict[str, List[float]] = Field(default_factory=dict)
    seed: int = 0


def _sweep_combos(req: SweepRequest) -> List[Dict[str, Any]]:
    fields = _SWEEP_FIELDS[req.command]
    for name in req.ranges:
        if name not in fields:
            _invalid(f"field '{name}' is not sweepable for "
                     f"command '{req.command}'")
    base = {"n": req.n, "p": req.p, "alpha": req.alpha, "k": req.k,
            "j": req.j, "a": req.a, "epsilon": None}
    count = 1
    for vals in req.ranges.values():
        count *= len(vals)
    if count > _MAX_COMBINATIONS:
        _invalid(f"sweep size {count} exceeds {_MAX_COMBINATIONS} "
                 "(field 'ranges')")
    combos: List[Dict[str, Any]] = [dict()]
    for name in fields:
        if name not in req.ranges:
            continue
        vals = req.ranges[name]
        if name in _INT_FIELDS:
            for v in vals:
                if float(v) != int(v):
                    _invalid(f"range for integer field '{name}' contains "
                             f"non-integer value {v}")
        combos = [dict(c, **{name: (int(v) if name in _INT_FIELDS
                                    else float(v))})
                  for c in combos for v in vals]
    out = []
    for c in combos:
        row = dict(base)
        row.update(c)
        out.append(row)
    return out


def _sweep_workers() -> int:
    env = os.environ.get("HRL_THREADS", "")
    try:
        cap = int(env)
    except ValueError:
        cap = 0
    if cap >= 1:
        return cap
    return min(8, os.cpu_count() or 1)


def _constants_row(combo: Dict[str, Any]) -> Dict[str, Any]:
    params = ProblemParams(n=combo["n"], p=combo["p"], alpha=combo["alpha"],
                           k=combo["k"], j=combo["j"])
    rep = (rellich_constant(params) if combo["j"] is None
           else intermediate_constant(params))
    return {"n": combo["n"], "p": combo["p"], "alpha": combo["alpha"],
            "k": combo["k"], "j": combo["j"], "value": rep.value,
            "degenerate": rep.degenerate, "log_value": rep.log_value}


def _sharpness_row(kind: str, combo: Dict[str, Any]) -> Dict[str, Any]:
    eps = combo["epsilon"] if combo["epsilon"] is not None else 1e-2
    base = PolyGaussian((1.0,))
    if kind == "radial":
        params = ProblemParams(n=combo["n"], p=combo["p"],
                               alpha=combo["alpha"], k=combo["k"])
        spec = QuotientSpec("rellich_nd", p=combo["p"], params=params)
        vals = sharpness_family("radial", base, [eps], params=params)
    elif kind == "halfline":
        spec = QuotientSpec("hardy1d", p=combo["p"], a=combo["a"])
        vals = sharpness_family("halfline", base, [eps], a=combo["a"],
                                p=combo["p"])
    else:
        spec = QuotientSpec("hardy1d", p=combo["p"], a=combo["p"] - 1.0)
        vals = sharpness_family("singular_hardy", base, [eps],
                                p=combo["p"])
    return {"kind": kind, "n": combo["n"], "p": combo["p"],
            "alpha": combo["alpha"], "k": combo["k"], "a": combo["a"],
            "epsilon": eps, "quotient": vals[0],
            "reference": spec.closed_form()}


@app.post("/sweep", response_model=ResultRecordModel)
def sweep(req: SweepRequest) -> Dict[str, Any]:
    t0 = time.perf_counter()
    d = req.model_dump()
    combos = _sweep_combos(req)
    if req.command == "sharpness":
        if req.kind is None or req.kind == "squeeze":
            _invalid("sharpness sweep requires field 'kind' in "
                     "{radial, halfline, singular_hardy}")
        worker = lambda c: _sharpness_row(req.kind, c)
        needed = {"radial": ("n", "p"), "halfline": ("a", "p"),
                  "singular_hardy": ("p",)}[req.kind]
    else:
        worker = _constants_row
        needed = ("n", "p")
    rows: List[Dict[str, Any]] = []
    if combos:
        for c in combos:
            for f in needed:
                if c.get(f) is None:
                    _invalid(f"{req.command} sweep requires field '{f}'")
        try:
            with ThreadPoolExecutor(max_workers=_sweep_workers()) as pool:
                rows = list(pool.map(worker, combos))
        except ValueError as exc:
            _invalid(str(exc))
    header = list(SWEEP_COLUMNS[req.command])
    outputs = {"header": header, "rows": rows, "count": len(rows)}
    return make_record("sweep", d, outputs, seed=req.seed,
                       seconds=time.perf_counter() - t0)
