"""Closed forms for the uniform circle, used as an oracle for the generic pipeline.

Indexing here is the natural one: vertex v_i at i/n and edge e_i running
from v_i to v_{i+1} (indices mod n). :func:`crosscheck` translates to the
sorted-simplex ids of a generated complex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import circle
from .hodge import HodgeContext
from .cup import whitney_mass_matrix


def _check(n: int) -> None:
    if n < 3:
        raise ValueError(f"circle oracle needs n >= 3, got {n}")


def analytic_mass_matrix(n: int) -> dict[int, np.ndarray]:
    """Exact Whitney mass matrices: B (vertices) and n*I (edges)."""
    _check(n)
    B = np.empty((n, n), dtype=object)
    B[...] = Fraction(0)
    for i in range(n):
        B[i, i] = Fraction(2, 3 * n)
        B[i, (i + 1) % n] = B[i, (i - 1) % n] = Fraction(1, 6 * n)
    E = np.empty((n, n), dtype=object)
    E[...] = Fraction(0)
    for i in range(n):
        E[i, i] = Fraction(n)
    return {0: B, 1: E}


def walk_count(n: int, k: int, i: int, j: int) -> int:
    """Entry (i, j) of D^k for the cyclic adjacency matrix D: closed-form binomial sum."""
    d = abs(i - j)
    total = 0
    lo = -((k + d) // n) - 1
    hi = (k - d) // n + 1
    for t in range(lo, hi + 1):
        top = k + d + n * t
        if top % 2 == 0 and 0 <= top // 2 <= k:
            total += math.comb(k, top // 2)
    return total


def inverse_vertex_mass_terms(n: int, count: int) -> list[np.ndarray]:
    """Terms (3n/2)(-1/4)^k D^k of the series for B^{-1}, k = 0..count-1."""
    _check(n)
    out = []
    for k in range(count):
        Dk = np.array([[walk_count(n, k, i, j) for j in range(n)] for i in range(n)], dtype=float)
        out.append(1.5 * n * (-0.25) ** k * Dk)
    return out


def series_length(n: int, tol: float = 1e-12) -> int:
    """Terms needed so the geometric tail bound 2^(1-k) * 3n/2 falls below tol."""
    k = 1
    while 2.0 ** (1 - k) * 1.5 * n >= tol:
        k += 1
    return k


def analytic_star(n: int, target: tuple[str, int], tol: float = 1e-12) -> np.ndarray:
    """Star of a vertex or edge basis cochain in natural indexing.

    ``target`` is ``("vertex", i)`` or ``("edge", i)``. Vertex stars are
    exact Fractions on edges; edge stars are floats on vertices, from the
    binomial series truncated by the a-priori tail bound.
    """
    _check(n)
    kind, i = target
    i %= n
    if kind == "vertex":
        out = np.empty(n, dtype=object)
        out[:] = [Fraction(0)] * n
        out[(i - 1) % n] += Fraction(1, 2 * n)
        out[i] += Fraction(1, 2 * n)
        return out
    if kind != "edge":
        raise ValueError(f"unknown target kind {kind!r}")
    K = series_length(n, tol)
    out = np.zeros(n)
    for m in range(n):
        s = 0.0
        for k in range(K):
            w = walk_count(n, k, m, i) + walk_count(n, k, m, (i + 1) % n)
            s += (-0.25) ** k * w
        out[m] = 0.75 * n * s
    return out


@dataclass
class CrosscheckReport:
    n: int
    mass_residual: float
    vertex_star_residual: float
    edge_star_residual: float
    exact_mass_match: bool

    @property
    def max_residual(self) -> float:
        return max(self.mass_residual, self.vertex_star_residual, self.edge_star_residual)

    def passed(self, tol: float = 1e-9) -> bool:
        return self.exact_mass_match and self.max_residual < tol


def _edge_map(complex_, n):
    """(ids, signs) of e_0..e_{n-1} in the generated complex."""
    pairs = [complex_.oriented((i, (i + 1) % n)) for i in range(n)]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def crosscheck(n: int) -> CrosscheckReport:
    """Compare generic assembly on the uniform circle with the closed forms."""
    _check(n)
    mesh = circle(n, exact=True)
    cx = mesh.complex
    ids, signs = _edge_map(cx, n)
    ana = analytic_mass_matrix(n)
    M0 = whitney_mass_matrix(0, cx, mesh.realization).exact
    M1 = whitney_mass_matrix(1, cx, mesh.realization).exact
    # vertex ids coincide with natural indices; edges need the map and signs
    M1n = M1[np.ix_(ids, ids)] * np.outer(signs, signs)
    exact_match = bool(np.all(M0 == ana[0]) and np.all(M1n == ana[1]))
    mass_res = max(float(np.abs((M0 - ana[0]).astype(float)).max()),
                   float(np.abs((M1n - ana[1]).astype(float)).max()))

    fmesh = circle(n)
    ctx = HodgeContext(fmesh.complex, fmesh.realization)
    fids, fsigns = _edge_map(fmesh.complex, n)
    S0, S1 = ctx.star(0), ctx.star(1)
    vres = eres = 0.0
    for i in range(n):
        generic_v = S0[fids, i] * fsigns
        vres = max(vres, float(np.abs(generic_v - analytic_star(n, ("vertex", i)).astype(float)).max()))
        generic_e = S1[:, fids[i]] * fsigns[i]
        eres = max(eres, float(np.abs(generic_e - analytic_star(n, ("edge", i))).max()))
    return CrosscheckReport(n, mass_res, vres, eres, exact_match)
