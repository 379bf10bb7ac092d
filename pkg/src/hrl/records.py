"""Canonical result records: deterministic JSON and CSV emission.

Records are plain dicts assembled by the service layer.  This module owns
the single serialization path both the HTTP layer and the CLI write to
disk, so byte-identical output for identical inputs is a property of the
code rather than a convention: floats are printed with 17 significant
digits (enough to reproduce the double exactly on re-parse), dictionary
insertion order is preserved, and non-finite values become JSON null.
CSV cells keep nan/inf literals instead, since the tables feed numeric
readers that understand them.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    return "%.17g" % x


def to_jsonable(obj: Any) -> Any:
    """numpy scalars/arrays and dataclasses reduced to plain containers."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def _emit(obj: Any, out: List[str], indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad1 = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad1)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad1 + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Canonical JSON text (trailing newline included)."""
    out: List[str] = []
    _emit(to_jsonable(obj), out, indent, 0)
    out.append("\n")
    return "".join(out)


def make_record(command: str, inputs: Dict[str, Any],
                outputs: Dict[str, Any], *, seed: Optional[int] = None,
                seconds: Optional[float] = None,
                version: Optional[str] = None) -> Dict[str, Any]:
    if version is None:
        from . import __version__ as version
    return {
        "schema": SCHEMA_VERSION,
        "version": version,
        "command": command,
        "seed": seed,
        "inputs": to_jsonable(inputs),
        "outputs": to_jsonable(outputs),
        "timing": {"seconds": seconds},
    }


def strip_timing(record: Dict[str, Any]) -> Dict[str, Any]:
    """Copy without the timing block, for byte-identity comparisons."""
    return {k: v for k, v in record.items() if k != "timing"}


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format_float(x)
    return str(v)


def csv_table(rows: Sequence[Dict[str, Any]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_csv_cell(row.get(col)) for col in header])
    return buf.getvalue()


# column order is part of the output contract; rows may carry extra keys
# (ignored by the CSV) but never fewer
SWEEP_COLUMNS: Dict[str, Sequence[str]] = {
    "constants": ("n", "p", "alpha", "k", "j",
                  "value", "degenerate", "log_value"),
    "sharpness": ("kind", "n", "p", "alpha", "k", "a",
                  "epsilon", "quotient", "reference"),
}
