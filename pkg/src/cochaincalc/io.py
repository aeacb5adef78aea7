"""Mesh documents (JSON) and experiment output (CSV rows, JSON summaries).

Mesh document::

    {
      "format": "cochaincalc-mesh", "version": 1,
      "dim": 2,
      "vertices": [[x, y], ...],
      "simplices": [[i, j, k], ...],
      "charts": [[[x, y], [x, y], [x, y]], ...],      # optional
      "edge_lengths": [l0, l1, ...],                  # optional
      "cycles": {"a1": {"edges": [...], "signs": [...]}, ...},
      "metadata": {...}
    }

Geometry comes from ``charts`` (per-simplex coordinates, vertices in sorted
id order, simplices in the order given) when present, else from
``edge_lengths`` (indexed like the sorted edge table), else from the global
``vertices``. A cycle is either ``{"edges", "signs"}`` with ids into the
sorted edge table, a list of oriented vertex pairs ``[[u, v], ...]``, or a
list of signed edge ids (only usable when edge 0 is not traversed backwards).
"""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .complex import build_complex
from .exceptions import ComplexError, GeometryError, MeshFormatError
from .geometry import GeometricRealization, Mesh, _chain_from_path

FORMAT = "cochaincalc-mesh"
VERSION = 1


def _fail(field: str, msg: str):
    raise MeshFormatError(f"{field}: {msg}")


def _parse_cycle(name, entry, complex_) -> np.ndarray:
    field = f"cycles.{name}"
    E = complex_.count(1)
    if isinstance(entry, dict):
        edges, signs = entry.get("edges"), entry.get("signs")
        if not isinstance(edges, list) or not isinstance(signs, list) or len(edges) != len(signs):
            _fail(field, "expected {'edges': [...], 'signs': [...]} of equal length")
        chain = np.zeros(E, dtype=np.int64)
        for k, (e, s) in enumerate(zip(edges, signs)):
            if not isinstance(e, int) or not 0 <= e < E:
                _fail(f"{field}.edges[{k}]", f"edge id {e!r} out of range [0, {E})")
            if s not in (1, -1):
                _fail(f"{field}.signs[{k}]", f"sign must be +1 or -1, got {s!r}")
            chain[e] += s
        return chain
    if not isinstance(entry, list):
        _fail(field, "expected a list or an object")
    if all(isinstance(p, list) and len(p) == 2 for p in entry):
        try:
            return _chain_from_path(complex_, [tuple(p) for p in entry])
        except KeyError as exc:
            _fail(field, str(exc))
    chain = np.zeros(E, dtype=np.int64)
    for k, e in enumerate(entry):
        if not isinstance(e, int) or abs(e) >= E:
            _fail(f"{field}[{k}]", f"signed edge id {e!r} out of range")
        chain[abs(e)] += -1 if e < 0 else 1
    return chain


def mesh_from_document(doc: dict) -> Mesh:
    """Validate a parsed mesh document and build the mesh."""
    if not isinstance(doc, dict):
        _fail("<root>", "expected a JSON object")
    if doc.get("format", FORMAT) != FORMAT:
        _fail("format", f"expected {FORMAT!r}, got {doc.get('format')!r}")
    if doc.get("version", VERSION) != VERSION:
        _fail("version", f"unsupported version {doc.get('version')!r}")
    for key in ("dim", "simplices"):
        if key not in doc:
            _fail(key, "missing required field")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        _fail("dim", f"expected a positive integer, got {dim!r}")
    simp = doc["simplices"]
    if not isinstance(simp, list) or not simp:
        _fail("simplices", "expected a non-empty list")
    verts = doc.get("vertices")
    nv = len(verts) if isinstance(verts, list) else None
    for k, s in enumerate(simp):
        if not isinstance(s, list) or len(s) != dim + 1:
            _fail(f"simplices[{k}]", f"expected {dim + 1} vertex ids, got {s!r}")
        for v in s:
            if not isinstance(v, int) or v < 0 or (nv is not None and v >= nv):
                _fail(f"simplices[{k}]", f"vertex id {v!r} out of range")
    try:
        complex_ = build_complex(simp)
    except ComplexError as exc:
        _fail("simplices", str(exc))
    tops = np.array(simp, dtype=np.int64)
    try:
        if "charts" in doc:
            charts = np.asarray(doc["charts"], dtype=float)
            if charts.shape[:2] != (len(simp), dim + 1):
                _fail("charts", f"expected shape ({len(simp)}, {dim + 1}, d), got {charts.shape}")
            order = np.argsort(tops, axis=1)
            charts = np.take_along_axis(charts, order[:, :, None], axis=1)
            perm = np.array([complex_.index(s) for s in tops])
            reordered = np.empty_like(charts)
            reordered[perm] = charts
            real = GeometricRealization.from_charts(reordered)
        elif "edge_lengths" in doc:
            lengths = np.asarray(doc["edge_lengths"], dtype=float)
            if lengths.shape != (complex_.count(1),):
                _fail("edge_lengths", f"expected {complex_.count(1)} lengths, got {lengths.shape}")
            real = GeometricRealization.from_edge_lengths(complex_, lengths)
        elif verts is not None:
            pts = np.asarray(verts, dtype=float)
            if pts.ndim != 2 or pts.shape[0] != complex_.num_vertices:
                _fail("vertices", f"expected {complex_.num_vertices} coordinate rows")
            real = GeometricRealization.from_vertex_coords(complex_, pts)
        else:
            _fail("vertices", "no geometry: give vertices, charts or edge_lengths")
    except GeometryError as exc:
        _fail("geometry", str(exc))
    except ValueError as exc:
        if isinstance(exc, MeshFormatError):
            raise
        _fail("geometry", f"malformed numeric data ({exc})")
    cycles = {}
    raw = doc.get("cycles", {}) or {}
    if not isinstance(raw, dict):
        _fail("cycles", "expected an object mapping names to cycles")
    for name, entry in raw.items():
        cycles[name] = _parse_cycle(name, entry, complex_)
    return Mesh(complex_, real, cycles, dict(doc.get("metadata", {})))


def load_mesh(path) -> Mesh:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                              f"{exc.msg}") from None
    return mesh_from_document(doc)


def mesh_to_document(mesh: Mesh) -> dict:
    cx, real = mesh.complex, mesh.realization
    doc = {"format": FORMAT, "version": VERSION, "dim": cx.dim,
           "simplices": cx.simplices[cx.dim].tolist()}
    if real.coords is not None:
        charts = np.asarray(real.coords, dtype=float)
        doc["charts"] = charts.tolist()
        # a global embedding exists when every chart agrees on shared vertices
        pts = np.zeros((cx.num_vertices, charts.shape[2]))
        pts[cx.simplices[cx.dim].ravel()] = charts.reshape(-1, charts.shape[2])
        doc["vertices"] = pts.tolist()
    else:
        lengths = np.zeros(cx.count(1))
        lengths[cx.top_faces[1].ravel()] = real.local_edge_lengths().ravel()
        doc["edge_lengths"] = lengths.tolist()
    doc["cycles"] = {name: {"edges": np.nonzero(ch)[0].tolist(),
                            "signs": [int(x) for x in ch[np.nonzero(ch)[0]]]}
                     for name, ch in mesh.cycles.items()}
    doc["metadata"] = to_jsonable(mesh.metadata)
    return doc


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_document(mesh)))


def to_jsonable(obj):
    """Convert numpy arrays, Fractions and complex numbers for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(obj.real)), "im": to_jsonable(float(obj.imag))}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=True))


def write_csv(header, rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    return v
