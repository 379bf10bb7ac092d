"""Command line front end.

A thin client over the HTTP service: flags (or a JSON config file, with
flags winning) are resolved into a RunConfig, the matching endpoint is
driven in process through an ASGI transport unless --server points at a
live instance, and the result record is written as canonical JSON (CSV
or a JSON row array for sweeps).

Exit codes: 0 success, 1 verification failure (an inequality violation
or a residual above the requested tolerance), 2 invalid input; invalid
input diagnostics name the offending field.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import httpx

from . import __version__
from .records import csv_table, dumps

_TIMEOUT = 600.0


@dataclass(frozen=True)
class Opt:
    name: str                      # underscore form; service field name
    typ: str                       # int | float | str | bool | floats
    default: Any = None
    required: bool = False
    choices: Optional[Tuple[str, ...]] = None
    client_only: bool = False      # consumed here, never sent to the API


_CLIENT = (
    Opt("config", "str", client_only=True),
    Opt("output", "str", client_only=True),
    Opt("format", "str", default="json", choices=("json", "csv"),
        client_only=True),
    Opt("server", "str", client_only=True),
)

_EXTREMAL_KINDS = ("cosh", "convolution", "p_laplace", "biharmonic",
                   "critical_biharmonic", "borderline")
_VERIFY_KINDS = ("hardy", "rellich", "poly",
                 "halfline_first", "halfline_second")
_FAMILY = ("squeeze", "radial", "halfline", "singular_hardy")
_CHECKS = ("f_system", "g_equation", "g_identity", "p_laplace",
           "biharmonic", "critical_biharmonic", "phi_identity", "hle",
           "integrability")

COMMANDS: Dict[str, Tuple[Opt, ...]] = {
    "constants": (
        Opt("n", "int", required=True),
        Opt("p", "float", required=True),
        Opt("alpha", "float", 0.0),
        Opt("k", "int", 1),
        Opt("j", "int"),
    ),
    "extremal": (
        Opt("kind", "str", required=True, choices=_EXTREMAL_KINDS),
        Opt("p", "float"),
        Opt("q", "float"),
        Opt("lam", "float"),
        Opt("A", "float"),
        Opt("gamma", "float"),
        Opt("H", "float"),
        Opt("n", "int"),
        Opt("alpha", "float", 0.0),
        Opt("points", "floats"),
        Opt("order", "int", 0),
    ),
    "verify": (
        Opt("kind", "str", "hardy", choices=_VERIFY_KINDS),
        Opt("n", "int"),
        Opt("p", "float"),
        Opt("alpha", "float", 0.0),
        Opt("k", "int", 1),
        Opt("m", "int", 1),
        Opt("tau", "float"),
        Opt("lam", "float"),
        Opt("samples", "int", 200),
        Opt("seed", "int", 0),
        Opt("slack", "float", 1e-6),
    ),
    "sharpness": (
        Opt("kind", "str", required=True, choices=_FAMILY),
        Opt("epsilons", "floats", [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]),
        Opt("n", "int"),
        Opt("p", "float"),
        Opt("alpha", "float", 0.0),
        Opt("k", "int", 1),
        Opt("a", "float"),
        Opt("spec-kind", "str"),
        Opt("q", "float"),
        Opt("lam", "float"),
        Opt("A", "float"),
        Opt("gamma", "float"),
        Opt("H", "float"),
    ),
    "minimize": (
        Opt("spec-kind", "str", "rellich_nd"),
        Opt("p", "float", required=True),
        Opt("q", "float"),
        Opt("lam", "float"),
        Opt("A", "float"),
        Opt("gamma", "float"),
        Opt("H", "float"),
        Opt("a", "float"),
        Opt("n", "int"),
        Opt("alpha", "float", 0.0),
        Opt("k", "int", 1),
        Opt("j", "int"),
        Opt("grid-l", "float", 30.0),
        Opt("grid-n", "int", 4097),
        Opt("max-iters", "int", 3000),
        Opt("rel-tol", "float", 1e-9),
        Opt("include-history", "bool", True),
        Opt("include-profile", "bool", False),
    ),
    "residual": (
        Opt("check", "str", required=True, choices=_CHECKS),
        Opt("p", "float"),
        Opt("q", "float"),
        Opt("lam", "float"),
        Opt("A", "float"),
        Opt("gamma", "float"),
        Opt("H", "float"),
        Opt("n", "int"),
        Opt("alpha", "float", 0.0),
        Opt("form", "str", "weak", choices=("weak", "strong")),
        Opt("phi-mode", "str", "analytic",
            choices=("analytic", "differenced")),
        Opt("fd-step", "float"),
        Opt("n-tests", "int", 10),
        Opt("profile", "str", "borderline",
            choices=("borderline", "critical", "biharmonic")),
        Opt("with-minimizer", "bool", False),
        Opt("grid-l", "float", 30.0),
        Opt("grid-n", "int", 4097),
        Opt("tolerance", "float"),
    ),
    "sweep": (
        Opt("command", "str", required=True,
            choices=("constants", "sharpness")),
        Opt("kind", "str", choices=_FAMILY),
        Opt("n", "int"),
        Opt("p", "float"),
        Opt("alpha", "float", 0.0),
        Opt("k", "int", 1),
        Opt("j", "int"),
        Opt("a", "float"),
        Opt("seed", "int", 0),
    ),
    "serve": (
        Opt("host", "str", "127.0.0.1", client_only=True),
        Opt("port", "int", 8000, client_only=True),
    ),
}


@dataclass
class RunConfig:
    """Fully resolved invocation: defaults, config file, then flags."""

    command: str
    options: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"command": self.command, "options": dict(self.options)}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "RunConfig":
        return cls(command=d["command"], options=dict(d.get("options", {})))


class UsageError(Exception):
    pass


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _parse_floats(text: Any) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated float list, "
                         f"got {text!r}")


def _parse_range(item: str) -> Tuple[str, List[float]]:
    """field=lo:hi:count (inclusive linear grid) or field=v1,v2,..."""
    if "=" not in item:
        raise UsageError(f"range {item!r} must look like field=lo:hi:count "
                         "or field=v1,v2,...")
    name, spec = item.split("=", 1)
    name = name.strip().replace("-", "_")
    spec = spec.strip()
    if spec == "":
        return name, []
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"range for '{name}' must be lo:hi:count")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"range for '{name}' must be numeric lo:hi:count")
        if count < 0:
            raise UsageError(f"range count for '{name}' must be >= 0")
        if count == 0:
            return name, []
        if count == 1:
            return name, [lo]
        step = (hi - lo) / (count - 1)
        return name, [lo + i * step for i in range(count)]
    return name, _parse_floats(spec)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrl", description=__doc__.splitlines()[0],
        allow_abbrev=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)
    for cmd, opts in COMMANDS.items():
        sp = sub.add_parser(cmd, allow_abbrev=False)
        extra = _CLIENT if cmd != "serve" else ()
        for opt in opts + extra:
            flag = _flag(opt.name)
            if opt.typ == "bool":
                sp.add_argument(flag, dest=opt.name.replace("-", "_"),
                                action=argparse.BooleanOptionalAction,
                                default=None)
            elif opt.typ == "int":
                sp.add_argument(flag, dest=opt.name.replace("-", "_"),
                                type=int, default=None)
            elif opt.typ == "float":
                sp.add_argument(flag, dest=opt.name.replace("-", "_"),
                                type=float, default=None)
            else:
                # floats arrive as raw strings so config-file lists and
                # flag strings share one parsing path
                sp.add_argument(flag, dest=opt.name.replace("-", "_"),
                                type=str, default=None,
                                choices=opt.choices)
        if cmd == "sweep":
            sp.add_argument("--range", dest="ranges", action="append",
                            default=None, metavar="FIELD=SPEC")
    return parser


def _load_config(path: str) -> Dict[str, Any]:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in raw.items()}


def resolve_config(cmd: str, ns: argparse.Namespace) -> RunConfig:
    """Merge precedence: flag > config file > declared default."""
    opts = COMMANDS[cmd] + (_CLIENT if cmd != "serve" else ())
    cfg_path = getattr(ns, "config", None)
    file_vals: Dict[str, Any] = {}
    if cfg_path:
        file_vals = _load_config(cfg_path)
        known = {o.name.replace("-", "_") for o in opts}
        if cmd == "sweep":
            known |= {"range", "ranges"}
        for key in file_vals:
            if key not in known:
                raise UsageError(f"config file key '{key}' is not a flag "
                                 f"of command '{cmd}'")
    resolved: Dict[str, Any] = {}
    for opt in opts:
        attr = opt.name.replace("-", "_")
        val = getattr(ns, attr, None)
        if val is None and attr in file_vals:
            val = file_vals[attr]
        if val is None:
            val = opt.default
        if val is not None:
            if opt.typ == "floats":
                val = _parse_floats(val)
            elif opt.typ == "int":
                try:
                    val = int(val)
                except (TypeError, ValueError):
                    raise UsageError(f"flag {_flag(opt.name)} expects an "
                                     f"integer, got {val!r}")
            elif opt.typ == "float":
                try:
                    val = float(val)
                except (TypeError, ValueError):
                    raise UsageError(f"flag {_flag(opt.name)} expects a "
                                     f"number, got {val!r}")
            elif opt.typ == "bool":
                if not isinstance(val, bool):
                    raise UsageError(f"flag {_flag(opt.name)} expects "
                                     f"true/false, got {val!r}")
            elif opt.choices and val not in opt.choices:
                raise UsageError(f"flag {_flag(opt.name)} must be one of "
                                 f"{', '.join(opt.choices)}; got {val!r}")
        if opt.required and val is None:
            raise UsageError(f"missing required flag {_flag(opt.name)} "
                             f"for command '{cmd}'")
        resolved[attr] = val
    if cmd == "sweep":
        flag_ranges = getattr(ns, "ranges", None)
        items = flag_ranges if flag_ranges is not None else \
            file_vals.get("range", file_vals.get("ranges"))
        ranges: Dict[str, List[float]] = {}
        if isinstance(items, dict):
            ranges = {str(k).replace("-", "_"): _parse_floats(v)
                      for k, v in items.items()}
        elif items:
            for item in items:
                name, vals = _parse_range(str(item))
                ranges[name] = vals
        resolved["ranges"] = ranges
    return RunConfig(command=cmd, options=resolved)


# -- transport ---------------------------------------------------------------


def _request(path: str, body: Dict[str, Any],
             server: Optional[str]) -> Tuple[int, Any]:
    if server:
        try:
            with httpx.Client(base_url=server, timeout=_TIMEOUT) as client:
                resp = client.post(path, json=body)
        except httpx.HTTPError as exc:
            raise UsageError(f"cannot reach server {server}: {exc}")
        return resp.status_code, resp.json()

    from .service import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://hrl",
                                     timeout=_TIMEOUT) as client:
            return await client.post(path, json=body)

    resp = asyncio.run(go())
    return resp.status_code, resp.json()


def _diagnostic(detail: Any) -> str:
    if isinstance(detail, list):
        parts = []
        for entry in detail:
            if isinstance(entry, dict):
                loc = [str(x) for x in entry.get("loc", [])
                       if x not in ("body",)]
                msg = entry.get("msg", "invalid value")
                parts.append((".".join(loc) + ": " if loc else "") + msg)
            else:
                parts.append(str(entry))
        return "; ".join(parts)
    if isinstance(detail, dict):
        return json.dumps(detail)
    return str(detail)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _outcome(cmd: str, record: Dict[str, Any]) -> int:
    outputs = record.get("outputs", {})
    if cmd == "verify" and outputs.get("passed") is False:
        return 1
    if cmd == "residual" and outputs.get("within_tolerance") is False:
        return 1
    return 0


def run(config: RunConfig) -> int:
    """Dispatch one resolved invocation; returns the exit code."""
    cmd = config.command
    opts = dict(config.options)
    if cmd == "serve":
        import uvicorn
        uvicorn.run("hrl.service:app", host=opts.get("host", "127.0.0.1"),
                    port=int(opts.get("port", 8000)))
        return 0

    output = opts.pop("output", None)
    fmt = opts.pop("format", None) or "json"
    server = opts.pop("server", None)
    opts.pop("config", None)
    if fmt == "csv" and cmd != "sweep":
        raise UsageError("csv output is only available for sweep")

    service_fields = {o.name.replace("-", "_") for o in COMMANDS[cmd]
                      if not o.client_only}
    body = {k: v for k, v in opts.items()
            if v is not None and (k in service_fields or k == "ranges")}
    status, payload = _request("/" + cmd, body, server)
    if status == 422:
        detail = payload.get("detail") if isinstance(payload, dict) \
            else payload
        sys.stderr.write("invalid input: " + _diagnostic(detail) + "\n")
        return 2
    if status != 200:
        sys.stderr.write(f"server error (status {status}): "
                         f"{_diagnostic(payload)}\n")
        return 2

    if cmd == "sweep":
        outputs = payload.get("outputs", {})
        rows = outputs.get("rows", [])
        header = outputs.get("header", [])
        if fmt == "csv":
            _emit(csv_table(rows, header), output)
        else:
            _emit(dumps(rows), output)
        return 0
    _emit(dumps(payload), output)
    return _outcome(cmd, payload)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help; keep the contract
        return int(exc.code or 0)
    try:
        config = resolve_config(ns.cmd, ns)
        return run(config)
    except UsageError as exc:
        sys.stderr.write("invalid input: " + str(exc) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
