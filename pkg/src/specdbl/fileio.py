"""JSON documents for sets and refinement traces.

Two formats, both plain JSON with sorted keys and two-space indentation:

  specdbl-set    orders of the ambient group plus the member coordinates
  specdbl-trace  a full refinement run: config, input, result, step records,
                 and the audit computed at write time

Writing is canonical (same document, same bytes), so a load/save cycle of a
set file reproduces it exactly.  Trace files carry enough to rebuild the
RefineResult and re-run the audit against the stored one.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Optional

from .groups import ElementSet, FiniteAbelianGroup
from .refine import RefineConfig, RefineResult, RefineTraceStep, audit_trace

__all__ = [
    "FileFormatError",
    "write_set_file",
    "read_set_file",
    "write_trace_file",
    "read_trace_file",
]

SET_FORMAT = "specdbl-set"
TRACE_FORMAT = "specdbl-trace"


class FileFormatError(ValueError):
    """Raised when a document cannot be read or does not match its schema."""


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read ({exc})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return doc


def _field(doc: dict, name: str, kind, path) -> object:
    if name not in doc:
        raise FileFormatError(f"{path}: missing field {name!r}")
    value = doc[name]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise FileFormatError(f"{path}: field {name!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise FileFormatError(f"{path}: field {name!r} must be {kind.__name__}")
    return value


def _check_header(doc: dict, expected: str, path) -> None:
    fmt = _field(doc, "format", str, path)
    if fmt != expected:
        raise FileFormatError(f"{path}: format {fmt!r}, expected {expected!r}")
    version = _field(doc, "version", int, path)
    if version != 1:
        raise FileFormatError(f"{path}: unsupported version {version}")


def _coords_of(members: ElementSet) -> list:
    return [[int(x) for x in row] for row in members.coords()]


def _set_from(orders: list, elements: list, path, label: str) -> ElementSet:
    if not isinstance(orders, list) or not all(
        isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in orders
    ):
        raise FileFormatError(f"{path}: field 'orders' must be a list of positive integers")
    try:
        group = FiniteAbelianGroup(tuple(orders))
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    if not isinstance(elements, list):
        raise FileFormatError(f"{path}: field {label!r} must be a list")
    for row in elements:
        if not isinstance(row, list) or len(row) != len(orders) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in row
        ):
            raise FileFormatError(
                f"{path}: field {label!r} must contain coordinate rows of length {len(orders)}"
            )
    try:
        return ElementSet.from_coords(group, elements)
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: field {label!r}: {exc}") from exc


def write_set_file(path, members: ElementSet, metadata: Optional[dict] = None) -> None:
    doc = {
        "format": SET_FORMAT,
        "version": 1,
        "orders": list(members.group.orders),
        "elements": _coords_of(members),
        "metadata": metadata or {},
    }
    Path(path).write_text(_dump(doc))


def read_set_file(path) -> tuple[ElementSet, dict]:
    doc = _load_json(path)
    _check_header(doc, SET_FORMAT, path)
    members = _set_from(doc.get("orders"), doc.get("elements"), path, "elements")
    metadata = _field(doc, "metadata", dict, path)
    return members, metadata


def _config_dict(cfg: RefineConfig) -> dict:
    return dataclasses.asdict(cfg)


def write_trace_file(path, result: RefineResult, original: ElementSet) -> None:
    if original.group.orders != result.a_star.group.orders:
        raise ValueError("the original set lives in a different group than the result")
    audit = audit_trace(result)
    doc = {
        "format": TRACE_FORMAT,
        "version": 1,
        "theorem": result.theorem,
        "config": _config_dict(result.config),
        "orders": list(original.group.orders),
        "input_elements": _coords_of(original),
        "a_star": _coords_of(result.a_star),
        "rho_star": result.rho_star,
        "terminated": result.terminated,
        "certified": result.certified,
        "initial_size": result.initial_size,
        "measured": result.measured,
        "steps": [dataclasses.asdict(s) for s in result.trace],
        "audit": audit.to_dict(),
    }
    Path(path).write_text(_dump(doc))


_STEP_FIELDS = {f.name for f in dataclasses.fields(RefineTraceStep)}
_CONFIG_FIELDS = {f.name for f in dataclasses.fields(RefineConfig)}


def read_trace_file(path) -> tuple[RefineResult, ElementSet, dict]:
    """Rebuild (result, original input set, stored audit dict) from a trace file."""
    doc = _load_json(path)
    _check_header(doc, TRACE_FORMAT, path)
    theorem = _field(doc, "theorem", int, path)
    if theorem not in (1, 2):
        raise FileFormatError(f"{path}: field 'theorem' must be 1 or 2")

    raw_cfg = _field(doc, "config", dict, path)
    if set(raw_cfg) != _CONFIG_FIELDS:
        raise FileFormatError(f"{path}: field 'config' has the wrong keys")
    try:
        cfg = RefineConfig(**raw_cfg)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: field 'config': {exc}") from exc

    orders = doc.get("orders")
    original = _set_from(orders, doc.get("input_elements"), path, "input_elements")
    a_star = _set_from(orders, doc.get("a_star"), path, "a_star")

    steps = _field(doc, "steps", list, path)
    trace = []
    for i, raw in enumerate(steps):
        if not isinstance(raw, dict) or set(raw) != _STEP_FIELDS:
            raise FileFormatError(f"{path}: step {i} has the wrong keys")
        try:
            trace.append(RefineTraceStep(**raw))
        except TypeError as exc:
            raise FileFormatError(f"{path}: step {i}: {exc}") from exc

    terminated = _field(doc, "terminated", str, path)
    if terminated not in ("finished", "budget_exhausted", "inconclusive"):
        raise FileFormatError(f"{path}: unknown terminated state {terminated!r}")

    result = RefineResult(
        theorem=theorem,
        a_star=a_star,
        rho_star=_field(doc, "rho_star", float, path),
        terminated=terminated,
        certified=bool(_field(doc, "certified", bool, path)),
        trace=tuple(trace),
        measured=_field(doc, "measured", dict, path),
        config=cfg,
        initial_size=_field(doc, "initial_size", int, path),
    )
    audit = _field(doc, "audit", dict, path)
    return result, original, audit
