"""Geometric realizations of simplicial complexes and built-in meshes.

A realization stores, for every top simplex, the metric tensor of its edge
vectors (``E^T E``), the Gram matrix of barycentric differentials and the
volume. Flat charts (per-simplex vertex coordinates) are kept when available
so smooth forms can be pulled back; periodic domains such as the flat torus
are handled by giving each simplex an unwrapped chart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import SimplicialComplex, build_complex
from .exceptions import GeometryError


def _exact_sqrt(x):
    """Square root of a Fraction, exact when it is a perfect square."""
    if isinstance(x, Fraction) and x >= 0:
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
    return math.sqrt(x)


def _inverse_exact(mat):
    """Gauss-Jordan inverse of a small square matrix of Fractions."""
    k = len(mat)
    a = [[Fraction(mat[r][c]) for c in range(k)] + [Fraction(int(r == c)) for c in range(k)]
         for r in range(k)]
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col] != 0), None)
        if piv is None:
            raise GeometryError("singular metric tensor")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(k):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[k:] for row in a]


def _det_exact(mat):
    k = len(mat)
    if k == 0:
        return Fraction(1)
    if k == 1:
        return mat[0][0]
    return sum((-1) ** c * mat[0][c] * _det_exact([row[:c] + row[c + 1:] for row in mat[1:]])
               for c in range(k))


def gram_from_metric(metric: np.ndarray) -> np.ndarray:
    """Gram matrix of d(mu_0..mu_n) from the metric tensor of edge vectors.

    The rows/columns for mu_1..mu_n are the inverse metric; mu_0 is fixed by
    the relation sum_i d(mu_i) = 0.
    """
    metric = np.asarray(metric)
    T, n, _ = metric.shape
    if metric.dtype == object:
        ginv = np.array([_inverse_exact(m.tolist()) for m in metric], dtype=object)
        ginv = ginv.reshape(T, n, n)
    else:
        ginv = np.linalg.inv(metric)
    gram = np.zeros((T, n + 1, n + 1), dtype=metric.dtype)
    if metric.dtype == object:
        gram[...] = Fraction(0)
    gram[:, 1:, 1:] = ginv
    gram[:, 0, 1:] = -ginv.sum(axis=1)
    gram[:, 1:, 0] = -ginv.sum(axis=2)
    gram[:, 0, 0] = ginv.sum(axis=(1, 2))
    return gram


@dataclass(frozen=True, eq=False)
class GeometricRealization:
    """Per-top-simplex flat metric data.

    Attributes
    ----------
    metric : ndarray, shape (T, n, n)
        Inner products of the edge vectors ``p_k - p_0``.
    gram : ndarray, shape (T, n+1, n+1)
        Pointwise inner products of the barycentric differentials.
    volume : ndarray, shape (T,)
    coords : ndarray or None, shape (T, n+1, d)
        Chart coordinates of each simplex's vertices in sorted vertex order.
    exact : bool
        True when metric data are Fractions.
    """

    metric: np.ndarray
    gram: np.ndarray
    volume: np.ndarray
    coords: np.ndarray | None = None
    exact: bool = False

    @property
    def dim(self) -> int:
        return self.metric.shape[1]

    @classmethod
    def from_metric(cls, metric, coords=None) -> "GeometricRealization":
        metric = np.asarray(metric)
        exact = metric.dtype == object
        n = metric.shape[1]
        if exact:
            dets = np.array([_det_exact(m.tolist()) for m in metric], dtype=object)
            if any(d <= 0 for d in dets):
                raise GeometryError("degenerate simplex (non-positive metric determinant)")
            volume = np.array([_exact_sqrt(d) / math.factorial(n) for d in dets], dtype=object)
        else:
            dets = np.linalg.det(metric) if n else np.ones(len(metric))
            scale = np.max(np.abs(metric)) ** n if metric.size else 1.0
            if np.any(dets <= 1e-14 * scale):
                raise GeometryError("degenerate simplex (zero volume)")
            volume = np.sqrt(dets) / math.factorial(n)
        return cls(metric, gram_from_metric(metric), volume, coords, exact)

    @classmethod
    def from_charts(cls, coords) -> "GeometricRealization":
        """Realization from per-simplex vertex coordinates, shape (T, n+1, d)."""
        coords = np.asarray(coords)
        edges = coords[:, 1:, :] - coords[:, :1, :]
        if coords.dtype == object:
            metric = np.einsum("tad,tbd->tab", edges, edges)
        else:
            metric = np.einsum("tad,tbd->tab", edges, edges)
        return cls.from_metric(metric, coords)

    @classmethod
    def from_vertex_coords(cls, complex_: SimplicialComplex, points) -> "GeometricRealization":
        """Realization from one global embedding of the vertices."""
        points = np.asarray(points)
        if points.ndim == 1:
            points = points[:, None]
        return cls.from_charts(points[complex_.simplices[complex_.dim]])

    @classmethod
    def from_edge_lengths(cls, complex_: SimplicialComplex, lengths) -> "GeometricRealization":
        """Realization from edge lengths via the law of cosines."""
        lengths = np.asarray(lengths)
        n = complex_.dim
        edge_ids = complex_.top_faces[1]
        local_edges = [(a, b) for a in range(n + 1) for b in range(a + 1, n + 1)]
        slot = {e: k for k, e in enumerate(local_edges)}
        sq = lengths[edge_ids] ** 2
        metric = np.zeros((len(edge_ids), n, n), dtype=sq.dtype)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                la = sq[:, slot[(0, a)]]
                lb = sq[:, slot[(0, b)]]
                lab = 0 if a == b else sq[:, slot[(min(a, b), max(a, b))]]
                metric[:, a - 1, b - 1] = (la + lb - lab) / 2
        return cls.from_metric(metric)

    def scaled(self, factor: float) -> "GeometricRealization":
        """Uniformly rescale lengths by ``factor``."""
        coords = None if self.coords is None else self.coords * factor
        return GeometricRealization.from_metric(self.metric * factor**2, coords)

    def local_edge_lengths(self) -> np.ndarray:
        """Edge lengths per top simplex, columns in local lexicographic edge order."""
        n = self.dim
        g = self.metric
        cols = []
        for a in range(n + 1):
            for b in range(a + 1, n + 1):
                if a == 0:
                    sq = g[:, b - 1, b - 1]
                else:
                    sq = g[:, a - 1, a - 1] + g[:, b - 1, b - 1] - 2 * g[:, a - 1, b - 1]
                cols.append(np.sqrt(np.asarray(sq, dtype=float)))
        return np.stack(cols, axis=1)

    def gradients(self) -> np.ndarray:
        """Ambient gradients of mu_0..mu_n per simplex, shape (T, n+1, d)."""
        if self.coords is None:
            raise GeometryError("realization has no chart coordinates")
        coords = np.asarray(self.coords, dtype=float)
        edges = coords[:, 1:, :] - coords[:, :1, :]
        ginv = np.linalg.inv(np.asarray(self.metric, dtype=float))
        grads = np.einsum("tab,tbd->tad", ginv, edges)
        return np.concatenate([-grads.sum(axis=1, keepdims=True), grads], axis=1)

    def face_coords(self, complex_: SimplicialComplex, j: int) -> np.ndarray:
        """Chart coordinates of every j-simplex, shape (N_j, j+1, d)."""
        from itertools import combinations

        if self.coords is None:
            raise GeometryError("realization has no chart coordinates")
        top, slot = complex_.coface_representative(j)
        local = np.array(list(combinations(range(complex_.dim + 1), j + 1)))
        return self.coords[top[:, None], local[slot]]


@dataclass
class Mesh:
    """A complex with its realization and optional named 1-cycles."""

    complex: SimplicialComplex
    realization: GeometricRealization
    cycles: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _chain_from_path(complex_, pairs) -> np.ndarray:
    chain = np.zeros(complex_.count(1), dtype=np.int64)
    for u, v in pairs:
        idx, sign = complex_.oriented((u, v))
        chain[idx] += sign
    return chain


def _sorted_charts(tops, charts):
    """Sort each simplex's vertices and permute its chart rows to match."""
    order = np.argsort(tops, axis=1)
    tops_sorted = np.take_along_axis(tops, order, axis=1)
    charts_sorted = np.take_along_axis(charts, order[:, :, None], axis=1)
    return tops_sorted, charts_sorted


def _complex_with_charts(tops, charts):
    tops_sorted, charts_sorted = _sorted_charts(np.asarray(tops), np.asarray(charts))
    complex_ = build_complex(tops_sorted)
    # build_complex orders top simplices lexicographically
    perm = np.array([complex_.index(s) for s in tops_sorted])
    reordered = np.empty_like(charts_sorted)
    reordered[perm] = charts_sorted
    return complex_, reordered


def circle(n: int, exact: bool = False, length=1) -> Mesh:
    """Uniform circle of total length ``length`` with ``n`` segments.

    Vertex i sits at i*length/n; the cycle ``a`` is the sum of the edges
    oriented v_i -> v_{i+1}.
    """
    if n < 3:
        raise ValueError("circle needs at least 3 segments")
    h = Fraction(length) / n if exact else float(length) / n
    tops = [(i, (i + 1) % n) for i in range(n)]
    charts = np.array([[[i * h], [(i + 1) * h]] for i in range(n)],
                      dtype=object if exact else float)
    complex_, charts = _complex_with_charts(tops, charts)
    real = GeometricRealization.from_charts(charts)
    cyc = {"a1": _chain_from_path(complex_, tops)}
    return Mesh(complex_, real, cyc, {"kind": "circle", "n": n, "length": float(length)})


def interval(segments: int = 1, exact: bool = False, length=1) -> Mesh:
    """Subdivided interval [0, length] (not closed)."""
    h = Fraction(length) / segments if exact else float(length) / segments
    tops = [(i, i + 1) for i in range(segments)]
    charts = np.array([[[i * h], [(i + 1) * h]] for i in range(segments)],
                      dtype=object if exact else float)
    complex_, charts = _complex_with_charts(tops, charts)
    real = GeometricRealization.from_charts(charts)
    return Mesh(complex_, real, {}, {"kind": "interval", "segments": segments})


def lattice_torus(period_a: complex = 1.0, period_b: complex = 1j, nx: int = 8,
                  ny: int | None = None, jitter: float = 0.0, seed: int = 0) -> Mesh:
    """Flat torus C / (Z period_a + Z period_b), triangulated on an nx x ny grid.

    Vertex (i, j) sits at i/nx*period_a + j/ny*period_b. Cycles ``a1`` and ``b1``
    run along the two periods, so the smooth period matrix is
    period_b / period_a when Im(period_b / period_a) > 0.

    ``jitter`` moves every vertex by a seeded random offset of at most that
    fraction of a grid step along each period, which breaks the translation
    symmetry of the lattice (regular lattices reproduce constant forms and
    hence the smooth periods exactly).
    """
    ny = nx if ny is None else ny
    if nx < 3 or ny < 3:
        raise ValueError("torus resolution must be at least 3 in each direction")
    pa = np.array([complex(period_a).real, complex(period_a).imag]) / nx
    pb = np.array([complex(period_b).real, complex(period_b).imag]) / ny

    def vid(i, j):
        return (i % nx) + nx * (j % ny)

    if not 0 <= jitter < 0.5:
        raise ValueError("jitter must lie in [0, 0.5)")
    offsets = np.random.default_rng(seed).uniform(-jitter, jitter, size=(nx * ny, 2))

    tops, charts = [], []
    for j in range(ny):
        for i in range(nx):
            for tri in (((i, j), (i + 1, j), (i, j + 1)),
                        ((i + 1, j), (i + 1, j + 1), (i, j + 1))):
                tops.append([vid(*p) for p in tri])
                charts.append([(p[0] + offsets[vid(*p), 0]) * pa + (p[1] + offsets[vid(*p), 1]) * pb
                               for p in tri])
    complex_, charts = _complex_with_charts(tops, charts)
    real = GeometricRealization.from_charts(charts)
    cyc = {
        "a1": _chain_from_path(complex_, [(vid(i, 0), vid(i + 1, 0)) for i in range(nx)]),
        "b1": _chain_from_path(complex_, [(vid(0, j), vid(0, j + 1)) for j in range(ny)]),
    }
    meta = {"kind": "torus", "period_a": [float(complex(period_a).real), float(complex(period_a).imag)],
            "period_b": [float(complex(period_b).real), float(complex(period_b).imag)],
            "nx": nx, "ny": ny, "jitter": jitter, "seed": seed}
    return Mesh(complex_, real, cyc, meta)


def flat_torus(a: float = 1.0, b: float = 1.0, res: int = 8, jitter: float = 0.0,
               seed: int = 0) -> Mesh:
    """Rectangular a x b flat torus; ``res`` cells along the shorter side."""
    short = min(a, b)
    nx = max(3, round(res * a / short))
    ny = max(3, round(res * b / short))
    mesh = lattice_torus(a, 1j * b, nx, ny, jitter, seed)
    mesh.metadata.update({"a": a, "b": b, "res": res})
    return mesh


def subdivide(complex_: SimplicialComplex, realization: GeometricRealization,
              cycles: dict | None = None):
    """Midpoint subdivision: 1 -> 2 for curves, 1 -> 4 for surfaces.

    Returns ``(complex, realization, cycles)``; each cycle is re-expressed on
    the sub-edges.
    """
    n = complex_.dim
    if n not in (1, 2):
        raise ValueError(f"subdivision supports dimension 1 or 2, got {n}")
    if realization.coords is None:
        raise GeometryError("subdivision needs chart coordinates")
    nv = complex_.num_vertices
    tops = complex_.simplices[n]
    coords = realization.coords
    edge_ids = complex_.top_faces[1]
    mid = nv + edge_ids  # new vertex per edge
    new_tops, new_charts = [], []
    half = Fraction(1, 2) if realization.exact else 0.5
    if n == 1:
        for t in range(len(tops)):
            u, v = tops[t]
            m = mid[t, 0]
            cu, cv = coords[t]
            cm = (cu + cv) * half
            new_tops += [[u, m], [m, v]]
            new_charts += [[cu, cm], [cm, cv]]
    else:
        for t in range(len(tops)):
            v0, v1, v2 = tops[t]
            m01, m02, m12 = mid[t]
            c0, c1, c2 = coords[t]
            c01, c02, c12 = (c0 + c1) * half, (c0 + c2) * half, (c1 + c2) * half
            new_tops += [[v0, m01, m02], [v1, m01, m12], [v2, m02, m12], [m01, m02, m12]]
            new_charts += [[c0, c01, c02], [c1, c01, c12], [c2, c02, c12], [c01, c02, c12]]
    charts = np.array(new_charts, dtype=coords.dtype)
    new_complex, charts = _complex_with_charts(new_tops, charts)
    new_real = GeometricRealization.from_charts(charts)
    new_cycles = {}
    for name, chain in (cycles or {}).items():
        out = np.zeros(new_complex.count(1), dtype=np.int64)
        for e in np.nonzero(chain)[0]:
            u, v = complex_.simplices[1][e]
            m = nv + e
            out[new_complex.index((u, m))] += chain[e]  # u < m, sorted
            out[new_complex.index((v, m))] -= chain[e]  # [m, v] = -[v, m]
        new_cycles[name] = out
    return new_complex, new_real, new_cycles


def subdivide_mesh(mesh: Mesh) -> Mesh:
    c, r, cyc = subdivide(mesh.complex, mesh.realization, mesh.cycles)
    meta = dict(mesh.metadata)
    meta["level"] = meta.get("level", 0) + 1
    return Mesh(c, r, cyc, meta)


def mesh_and_fullness(complex_: SimplicialComplex, realization: GeometricRealization):
    """Mesh size (longest edge) and fullness min vol / mesh^n."""
    vol = np.asarray(realization.volume, dtype=float)
    if np.any(vol <= 0):
        raise GeometryError("degenerate simplex with zero volume")
    eta = float(realization.local_edge_lengths().max())
    theta = float(vol.min() / eta**complex_.dim)
    return eta, theta


def conformal_factor(amplitude: float = 0.3):
    """phi(x, y) for the metric exp(2 phi)(dx^2 + dy^2) on the unit square torus."""
    def phi(x, y):
        return amplitude * (np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
                            + 0.5 * np.sin(2 * np.pi * y))
    return phi


def conformal_torus(res: int = 8, amplitude: float = 0.3) -> Mesh:
    """Unit square torus with the non-flat metric exp(2 phi)(dx^2 + dy^2).

    Each edge gets its length in the conformal metric along the straight
    chart segment (Gauss-Legendre, 6 points); triangles are then flat with
    those lengths. The metric is conformal to the flat one, so the smooth
    period matrix is still i, but the triangulation no longer reproduces it
    exactly.
    """
    from numpy.polynomial.legendre import leggauss

    base = lattice_torus(1.0, 1j, res)
    seg = base.realization.face_coords(base.complex, 1).astype(float)  # (E, 2, 2)
    x, w = leggauss(6)
    t = (x + 1) / 2
    pts = seg[:, :1, :] + t[None, :, None] * (seg[:, 1:, :] - seg[:, :1, :])
    phi = conformal_factor(amplitude)
    factor = np.exp(phi(pts[..., 0], pts[..., 1])) @ (w / 2)
    lengths = factor * np.linalg.norm(seg[:, 1] - seg[:, 0], axis=1)
    real = GeometricRealization.from_edge_lengths(base.complex, lengths)
    meta = dict(base.metadata, kind="conformal_torus", amplitude=amplitude, res=res)
    return Mesh(base.complex, real, base.cycles, meta)


def genus2_surface(res: int = 6, period_b: complex = 1j) -> Mesh:
    """Connected sum of two copies of a lattice torus (a genus-2 surface).

    One grid cell is cut out of each copy and the two square holes are glued
    along their boundaries. Every triangle keeps its flat chart, so the
    metric is flat away from the four glued vertices. Cycles a1, b1 live on
    the first copy and a2, b2 on the second; b2 is reversed so that the basis
    is canonical for the orientation propagated from the first copy.
    """
    if res < 4:
        raise ValueError("genus-2 surface needs res >= 4")
    base = lattice_torus(1.0, period_b, res)
    cx, charts = base.complex, np.asarray(base.realization.coords)
    nv = cx.num_vertices

    def vid(i, j):
        return (i % res) + res * (j % res)

    c = res // 2
    hole = {tuple(sorted((vid(c, c), vid(c + 1, c), vid(c, c + 1)))),
            tuple(sorted((vid(c + 1, c), vid(c + 1, c + 1), vid(c, c + 1))))}
    corners = {vid(c, c), vid(c + 1, c), vid(c, c + 1), vid(c + 1, c + 1)}
    relabel = np.zeros(nv, dtype=np.int64)
    fresh = iter(range(nv, 2 * nv))
    for v in range(nv):
        relabel[v] = v if v in corners else next(fresh)
    keep = [t for t, s in enumerate(cx.simplices[2]) if tuple(s) not in hole]
    tops = [cx.simplices[2][t] for t in keep] + [relabel[cx.simplices[2][t]] for t in keep]
    all_charts = np.concatenate([charts[keep], charts[keep]])
    complex_, all_charts = _complex_with_charts(np.array(tops), all_charts)
    real = GeometricRealization.from_charts(all_charts)
    row = [(vid(i, 0), vid(i + 1, 0)) for i in range(res)]
    col = [(vid(0, j), vid(0, j + 1)) for j in range(res)]
    cycles = {
        "a1": _chain_from_path(complex_, row),
        "b1": _chain_from_path(complex_, col),
        "a2": _chain_from_path(complex_, [(relabel[u], relabel[v]) for u, v in row]),
        "b2": -_chain_from_path(complex_, [(relabel[u], relabel[v]) for u, v in col]),
    }
    pb = complex(period_b)
    return Mesh(complex_, real, cycles, {"kind": "genus2", "res": res,
                                         "period_b": [pb.real, pb.imag]})
