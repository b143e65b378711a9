"""JSON/CSV reading and writing for graphs, potentials and reports.

Graph files hold ``{"vertices": [...], "edges": [[u, v], ...]}`` with string
vertex names. Potential files hold ``{"window": [l, r], "values": {...}}``
where each key is a window word with symbols separated by single spaces.
Reports are written with every real at 17 significant digits and keys in a
fixed order, so the same inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .graph import DirectedGraph, GraphError
from .potentials import LocallyConstantPotential, PotentialError


class InputError(ValueError):
    """Malformed input file; the message names the offending field."""


def _read_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _vertex_name(v, where: str) -> str:
    if not isinstance(v, str) or not v or any(c.isspace() for c in v):
        raise InputError(f"{where}: vertex identifiers must be nonempty strings without whitespace, got {v!r}")
    return v


def graph_from_dict(data, source: str = "graph") -> DirectedGraph:
    if not isinstance(data, dict):
        raise InputError(f"{source}: expected an object with 'vertices' and 'edges'")
    for key in ("vertices", "edges"):
        if key not in data:
            raise InputError(f"{source}: missing field '{key}'")
    if not isinstance(data["vertices"], list):
        raise InputError(f"{source}: field 'vertices' must be a list")
    if not isinstance(data["edges"], list):
        raise InputError(f"{source}: field 'edges' must be a list")
    verts = [_vertex_name(v, f"{source}: field 'vertices'") for v in data["vertices"]]
    edges = []
    for e in data["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InputError(f"{source}: field 'edges' entries must be [u, v] pairs, got {e!r}")
        edges.append(tuple(_vertex_name(v, f"{source}: field 'edges'") for v in e))
    try:
        return DirectedGraph(verts, edges)
    except GraphError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_graph(path) -> DirectedGraph:
    return graph_from_dict(_read_json(path), str(path))


def graph_to_dict(g: DirectedGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in sorted(g.edges)]}


def potential_from_dict(data, g: DirectedGraph, source: str = "potential") -> LocallyConstantPotential:
    if not isinstance(data, dict):
        raise InputError(f"{source}: expected an object with 'window' and 'values'")
    for key in ("window", "values"):
        if key not in data:
            raise InputError(f"{source}: missing field '{key}'")
    win = data["window"]
    if not (isinstance(win, list) and len(win) == 2 and all(isinstance(t, int) for t in win)):
        raise InputError(f"{source}: field 'window' must be [l, r] with integers")
    if not isinstance(data["values"], dict):
        raise InputError(f"{source}: field 'values' must be an object")
    values = {}
    for key, val in data["values"].items():
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise InputError(f"{source}: field 'values' entry {key!r} is not a finite number")
        values[tuple(key.split(" "))] = float(val)
    theta = data.get("theta")
    try:
        return LocallyConstantPotential(g, tuple(win), values, theta)
    except PotentialError as exc:
        raise InputError(f"{source}: field 'values': {exc}") from None


def load_potential(path, g: DirectedGraph) -> LocallyConstantPotential:
    return potential_from_dict(_read_json(path), g, str(path))


def potential_to_dict(phi: LocallyConstantPotential) -> dict:
    return {"window": list(phi.window),
            "values": {" ".join(map(str, w)): float(v) for w, v in sorted(phi.table.items())}}


def load_manifest(path) -> list[Path]:
    """Graph paths listed in a manifest (a list, or ``{"graphs": [...]}``), relative to it."""
    data = _read_json(path)
    if isinstance(data, dict):
        if "graphs" not in data:
            raise InputError(f"{path}: missing field 'graphs'")
        data = data["graphs"]
    if not isinstance(data, list) or not data or not all(isinstance(p, str) for p in data):
        raise InputError(f"{path}: field 'graphs' must be a nonempty list of paths")
    base = Path(path).parent
    return [base / p for p in data]


def fmt_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with reals at 17 significant digits."""
    pad = " " * indent

    def enc(o, level):
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt_real(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            o = o.tolist()
        inner = pad * (level + 1)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{inner}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad * level + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if not any(isinstance(v, (dict, list, tuple, np.ndarray)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(inner + enc(v, level + 1) for v in o) + "\n" + pad * level + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return enc(obj, 0) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_real(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
