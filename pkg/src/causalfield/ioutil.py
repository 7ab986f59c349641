"""Config schema and atomic, byte-stable artifact writing.

Reruns with the same config and build must produce identical bytes, so
the writers here avoid every nondeterministic ingredient: no timestamps,
no filesystem paths inside artifacts, sorted JSON keys, and shortest
round-trip float formatting. Files land via temp-then-rename in the
target directory, so readers never observe partial artifacts.
"""

from __future__ import annotations

import io
import csv
import json
import os
import tempfile

import jsonschema

from .errors import SchemaError
from .lattice import LatticeSpec

__all__ = [
    "CONFIG_SCHEMA",
    "load_config",
    "validate_config",
    "merge_config",
    "resolved_model",
    "format_cell",
    "render_csv",
    "render_json",
    "atomic_write",
]

# published experiment schema; unknown sections and keys are violations,
# since a typo that silently falls back to a default poisons comparisons
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer", "minimum": 2},
                "a": {"type": "number", "exclusiveMinimum": 0},
                "m": {"type": "number", "minimum": 0},
                "mu": {"type": "number", "minimum": 0},
            },
        },
        "region": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "l": {"type": "number"},
                "r": {"type": "number"},
                "shrink": {"type": "number", "minimum": 0},
            },
        },
        "wave": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "center": {"type": "number"},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "k0": {"type": "number"},
                "amplitude": {"type": "number"},
                "kind": {"type": "string", "enum": ["standing", "right"]},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "steps": {"type": "integer", "minimum": 1},
                "dt": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


def load_config(path: str | None) -> dict:
    """Read a JSON config; None means an empty override.

    Unparseable or non-object content is a schema violation; unreadable
    files raise OSError untouched so the caller can map them to the I/O
    exit path.
    """
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"config {path} must be a JSON object")
    return obj


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "top level"
        raise SchemaError(f"config rejected at {where}: {exc.message}") from exc


def merge_config(defaults: dict, override: dict) -> dict:
    """Two-level merge of a validated override into command defaults."""
    out = {k: dict(v) for k, v in defaults.items()}
    for section, body in override.items():
        out.setdefault(section, {}).update(body)
    return out


def resolved_model(cfg: dict) -> LatticeSpec:
    """Model section as a LatticeSpec.

    A massless model with no explicit regulator gets mu = 1e-3 / a: the
    periodic chain needs the zero mode lifted, and that value keeps the
    regulator below any scale the sweeps resolve.
    """
    mc = cfg["model"]
    if "mu" in mc:
        mu = mc["mu"]
    elif mc["m"] == 0.0:
        mu = 1e-3 / mc["a"]
    else:
        mu = 0.0
    return LatticeSpec(n=mc["N"], a=mc["a"], m=mc["m"], mu=mu)


def format_cell(v) -> str:
    """Shortest round-trip text for one CSV cell."""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool,)):
        return str(int(v))
    if isinstance(v, (int,)):
        return str(v)
    return repr(float(v))


def render_csv(header: str, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header.split(","))
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _plain(obj):
    """Recursive conversion to json-serializable builtins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)


def render_json(obj: dict) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def atomic_write(path: str, text: str) -> None:
    """Write text to path via temp-then-rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
