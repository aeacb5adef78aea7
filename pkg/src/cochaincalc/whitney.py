"""Whitney forms: the embedding W, the de Rham map R and exact integration.

On each top simplex a Whitney form is a polynomial in the barycentric
coordinates mu_0..mu_n times wedges of their differentials. Terms are kept
in a dictionary ``{(exponents, wedge_indices): coefficient}`` using local
vertex positions of the simplex. Coefficients may be floats or Fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .complex import Cochain, SimplicialComplex, check_cochain, permutation_sign
from .geometry import GeometricRealization, _det_exact
from .quadrature import simplex_quadrature


def canonical_wedge(indices) -> tuple[int, tuple]:
    """Sort wedge indices; returns (sign, sorted tuple), sign 0 on repeats."""
    sign = permutation_sign(indices)
    return sign, tuple(sorted(indices))


def mono_integral(exps) -> Fraction:
    """Integral of prod mu_i^e_i d mu_1 ^ ... ^ d mu_m over the oriented m-simplex."""
    m = len(exps) - 1
    num = math.prod(math.factorial(e) for e in exps)
    return Fraction(num, math.factorial(m + sum(exps)))


def _add_term(terms: dict, key, coef) -> None:
    if coef == 0:
        return
    val = terms.get(key, 0) + coef
    if val == 0:
        terms.pop(key, None)
    else:
        terms[key] = val


def whitney_local(order, n: int) -> dict:
    """Whitney form of the simplex with local vertex positions ``order``.

    ``order`` may be any ordering; the formula is alternating so the result
    carries the orientation of that ordering.
    """
    j = len(order) - 1
    terms: dict = {}
    fact = math.factorial(j)
    for i, p in enumerate(order):
        rest = order[:i] + order[i + 1:]
        sign, wedge = canonical_wedge(rest)
        exps = [0] * (n + 1)
        exps[p] = 1
        _add_term(terms, (tuple(exps), wedge), Fraction(fact * (-1) ** i * sign))
    return terms


@lru_cache(maxsize=None)
def reference_terms(n: int, j: int) -> tuple:
    """Whitney forms of all local j-faces of the reference n-simplex."""
    return tuple(tuple(whitney_local(f, n).items()) for f in combinations(range(n + 1), j + 1))


def wedge_terms(ta: dict, tb: dict) -> dict:
    out: dict = {}
    for (ea, ia), ca in ta.items():
        for (eb, ib), cb in tb.items():
            sign, wedge = canonical_wedge(ia + ib)
            if sign == 0:
                continue
            exps = tuple(x + y for x, y in zip(ea, eb))
            _add_term(out, (exps, wedge), sign * ca * cb)
    return out


def d_terms(terms: dict) -> dict:
    out: dict = {}
    for (exps, wedge), c in terms.items():
        for i, e in enumerate(exps):
            if e == 0:
                continue
            sign, w = canonical_wedge((i,) + wedge)
            if sign == 0:
                continue
            new = list(exps)
            new[i] -= 1
            _add_term(out, (tuple(new), w), sign * e * c)
    return out


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            _add_term(out, tuple(x + y for x, y in zip(ea, eb)), ca * cb)
    return out


def normal_form(terms: dict, n: int) -> dict:
    """Eliminate mu_0 and d mu_0 using sum mu_i = 1; keys refer to mu_1..mu_n."""
    out: dict = {}
    one = tuple([0] * n)
    # 1 - mu_1 - ... - mu_n
    mu0 = {one: 1}
    for i in range(n):
        e = [0] * n
        e[i] = 1
        mu0[tuple(e)] = -1
    for (exps, wedge), c in terms.items():
        poly = {tuple(exps[1:]): c}
        for _ in range(exps[0]):
            poly = _poly_mul(poly, mu0)
        if wedge and wedge[0] == 0:
            rest = wedge[1:]
            diffs = []
            for i in range(1, n + 1):
                sign, w = canonical_wedge((i,) + rest)
                if sign:
                    diffs.append((-sign, w))
        else:
            diffs = [(1, wedge)]
        for sign, w in diffs:
            for e, pc in poly.items():
                _add_term(out, (e, w), sign * pc)
    return out


@dataclass
class WhitneyForm:
    """Piecewise-polynomial form: local terms per top simplex."""

    degree: int
    dim: int
    pieces: dict = field(default_factory=dict)

    def __add__(self, other: "WhitneyForm") -> "WhitneyForm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = {t: dict(v) for t, v in self.pieces.items()}
        for t, terms in other.pieces.items():
            tgt = out.setdefault(t, {})
            for k, c in terms.items():
                _add_term(tgt, k, c)
        return WhitneyForm(self.degree, self.dim, out)

    def scale(self, s) -> "WhitneyForm":
        return WhitneyForm(self.degree, self.dim,
                           {t: {k: s * c for k, c in v.items()} for t, v in self.pieces.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def normal_form(self) -> dict:
        out = {}
        for t, terms in self.pieces.items():
            nf = normal_form(terms, self.dim)
            if nf:
                out[t] = nf
        return out

    def equals(self, other: "WhitneyForm", tol: float = 0.0) -> bool:
        """Equality after reduction to normal form (coefficient comparison)."""
        diff = (self - other).normal_form()
        return all(abs(c) <= tol for terms in diff.values() for c in terms.values())


def whitney_embed(c: Cochain, complex_: SimplicialComplex) -> WhitneyForm:
    """Whitney form of a cochain (symbolic, per top simplex)."""
    check_cochain(complex_, c)
    n, j = complex_.dim, c.degree
    if j > n:
        raise ValueError("cochain degree exceeds complex dimension")
    ref = reference_terms(n, j)
    pieces = {}
    faces = complex_.top_faces[j]
    for t in range(len(faces)):
        terms: dict = {}
        for a, fid in enumerate(faces[t]):
            coef = c.values[fid]
            if coef == 0:
                continue
            for key, w in ref[a]:
                _add_term(terms, key, coef * w)
        if terms:
            pieces[t] = terms
    return WhitneyForm(j, n, pieces)


def wedge(f: WhitneyForm, g: WhitneyForm) -> WhitneyForm:
    pieces = {}
    for t in f.pieces.keys() & g.pieces.keys():
        w = wedge_terms(f.pieces[t], g.pieces[t])
        if w:
            pieces[t] = w
    return WhitneyForm(f.degree + g.degree, f.dim, pieces)


def exterior_d(f: WhitneyForm) -> WhitneyForm:
    """Exterior derivative by differentiating barycentric monomials."""
    pieces = {}
    for t, terms in f.pieces.items():
        d = d_terms(terms)
        if d:
            pieces[t] = d
    return WhitneyForm(f.degree + 1, f.dim, pieces)


def restrict_integral(terms: dict, face) -> object:
    """Integral over the sub-face with local positions ``face`` (sorted)."""
    face = tuple(face)
    pos = {p: k for k, p in enumerate(face)}
    m = len(face) - 1
    total = 0
    for (exps, wedge_), c in terms.items():
        if any(e and p not in pos for p, e in enumerate(exps)):
            continue
        if any(w not in pos for w in wedge_) or len(wedge_) != m:
            continue
        local = [pos[w] for w in wedge_]
        missing = next((r for r in range(m + 1) if r not in local), 0)
        sign = (-1) ** missing
        total = total + c * sign * mono_integral([exps[p] for p in face])
    return total


def de_rham_whitney(f: WhitneyForm, complex_: SimplicialComplex) -> Cochain:
    """R applied to a Whitney form, by exact integration over each j-simplex."""
    j = f.degree
    top, slot = complex_.coface_representative(j)
    local = list(combinations(range(complex_.dim + 1), j + 1))
    vals = []
    for s in range(complex_.count(j)):
        terms = f.pieces.get(int(top[s]), {})
        vals.append(restrict_integral(terms, local[slot[s]]))
    exact = any(isinstance(v, Fraction) for v in vals)
    return Cochain(j, np.array(vals, dtype=object if exact else float))


def _wedge_det(gram, I, J):
    sub = gram[np.ix_(I, J)] if len(I) else np.ones((0, 0))
    if gram.dtype == object:
        return _det_exact(sub.tolist())
    return np.linalg.det(sub) if len(I) else 1.0


def integrate_product(f: WhitneyForm, g: WhitneyForm, realization: GeometricRealization):
    """Exact L2 inner product of two Whitney forms of equal degree."""
    if f.degree != g.degree:
        raise ValueError("degree mismatch in integrate_product")
    n = f.dim
    nfact = math.factorial(n)
    total = 0
    for t in f.pieces.keys() & g.pieces.keys():
        gram = realization.gram[t]
        vol = realization.volume[t]
        local = 0
        for (ea, ia), ca in f.pieces[t].items():
            for (eb, ib), cb in g.pieces[t].items():
                exps = [x + y for x, y in zip(ea, eb)]
                local = local + ca * cb * _wedge_det(gram, list(ia), list(ib)) * (
                    mono_integral(exps) * nfact)
        total = total + local * vol
    return total


def top_wedge_sign(wedge_: tuple, n: int) -> int:
    """Coefficient of d mu_1^...^d mu_n in d mu_K for a sorted n-subset K of 0..n."""
    missing = next(r for r in range(n + 1) if r not in wedge_)
    return (-1) ** missing


def integrate_top(f: WhitneyForm, signs) -> object:
    """Integral of a top-degree Whitney form over the oriented manifold."""
    n = f.dim
    if f.degree != n:
        raise ValueError("integrate_top needs a top-degree form")
    total = 0
    for t, terms in f.pieces.items():
        local = 0
        for (exps, w), c in terms.items():
            local = local + c * top_wedge_sign(w, n) * mono_integral(exps)
        total = total + signs[t] * local
    return total


# -- table-driven numerics ---------------------------------------------------

@lru_cache(maxsize=None)
def _mass_tables(n: int, j: int):
    """Per local face pair: {(I, J): weight} with weight independent of geometry."""
    ref = reference_terms(n, j)
    nfact = math.factorial(n)
    tables = {}
    for a, ta in enumerate(ref):
        for b, tb in enumerate(ref):
            acc: dict = {}
            for (ea, ia), ca in ta:
                for (eb, ib), cb in tb:
                    exps = [x + y for x, y in zip(ea, eb)]
                    _add_term(acc, (ia, ib), ca * cb * mono_integral(exps) * nfact)
            tables[a, b] = acc
    return tables


def local_mass_matrices(realization: GeometricRealization, j: int) -> np.ndarray:
    """Whitney inner products of the local j-faces, shape (T, F, F)."""
    n = realization.dim
    tables = _mass_tables(n, j)
    F = math.comb(n + 1, j + 1)
    gram = realization.gram
    T = len(gram)
    exact = realization.exact
    out = np.zeros((T, F, F), dtype=object if exact else float)
    if exact:
        out[...] = Fraction(0)
    det_cache: dict = {}
    for (a, b), acc in tables.items():
        val = 0
        for (I, J), w in acc.items():
            if (I, J) not in det_cache:
                if not I:
                    det_cache[I, J] = np.ones(T, dtype=object if exact else float)
                elif exact:
                    det_cache[I, J] = np.array(
                        [_det_exact(gram[t][np.ix_(I, J)].tolist()) for t in range(T)], dtype=object)
                else:
                    det_cache[I, J] = np.linalg.det(gram[:, list(I)][:, :, list(J)])
            val = val + (w if exact else float(w)) * det_cache[I, J]
        out[:, a, b] = val * realization.volume
    return out


@lru_cache(maxsize=None)
def reference_wedge_pairing(n: int, j: int) -> tuple:
    """Metric-free integrals of W(face_a) ^ W(face_b) over the reference simplex.

    Faces a have degree j and faces b degree n - j; entries are Fractions.
    """
    ra, rb = reference_terms(n, j), reference_terms(n, n - j)
    out = []
    for ta in ra:
        row = []
        for tb in rb:
            w = wedge_terms(dict(ta), dict(tb))
            row.append(sum((c * top_wedge_sign(k[1], n) * mono_integral(k[0])
                            for k, c in w.items()), Fraction(0)))
        out.append(tuple(row))
    return tuple(out)


@lru_cache(maxsize=None)
def reference_cup_via_whitney(m: int, j: int) -> tuple:
    """R(W a ^ W b) on the reference m-simplex for local faces of degree j, m - j."""
    return reference_wedge_pairing(m, j)


def wedge_components(vectors: np.ndarray) -> np.ndarray:
    """Components of v_1 ^ ... ^ v_j in the basis dx_I, I over j-subsets of coords.

    ``vectors`` has shape (..., j, d); returns (..., C(d, j)).
    """
    j, d = vectors.shape[-2], vectors.shape[-1]
    if j == 0:
        return np.ones(vectors.shape[:-2] + (1,))
    cols = []
    for I in combinations(range(d), j):
        cols.append(np.linalg.det(vectors[..., list(I)]))
    return np.stack(cols, axis=-1)


def evaluate_cochain(c: Cochain, complex_: SimplicialComplex, realization: GeometricRealization,
                     bary: np.ndarray) -> np.ndarray:
    """Pointwise ambient components of W c at barycentric points on every top simplex.

    Returns an array of shape (T, m, C(d, j)).
    """
    n, j = complex_.dim, c.degree
    grads = realization.gradients()  # (T, n+1, d)
    T, _, d = grads.shape
    ref = reference_terms(n, j)
    faces = complex_.top_faces[j]
    vals = np.asarray(c.values)
    out = np.zeros((T, len(bary), math.comb(d, j)), dtype=np.result_type(vals.dtype, float))
    comp_cache: dict = {}
    for a, terms in enumerate(ref):
        coef = vals[faces[:, a]]
        for (exps, w), cw in terms:
            if w not in comp_cache:
                comp_cache[w] = wedge_components(grads[:, list(w), :])  # (T, C)
            poly = np.prod(bary ** np.array(exps), axis=1)  # (m,)
            out += (float(cw) * coef)[:, None, None] * poly[None, :, None] * comp_cache[w][:, None, :]
    return out


def _as_components(values: np.ndarray, m: int) -> np.ndarray:
    values = np.asarray(values)
    return values.reshape(m, -1)


def de_rham(form, complex_: SimplicialComplex, realization: GeometricRealization,
            order: int = 4) -> Cochain:
    """Integrate a smooth form over every j-simplex using its chart.

    ``form`` needs a ``degree`` attribute and must map points of shape (m, d)
    to components of shape (m, C(d, degree)).
    """
    if order < 1:
        raise ValueError("quadrature order must be at least 1")
    j = form.degree
    pts = realization.face_coords(complex_, j).astype(float)  # (N, j+1, d)
    N, _, d = pts.shape
    bary, w = simplex_quadrature(j, order)
    x = np.einsum("qa,nad->nqd", bary, pts)  # (N, q, d)
    comps = _as_components(form(x.reshape(-1, d)), N * len(bary)).reshape(N, len(bary), -1)
    if j == 0:
        return Cochain(0, comps[:, 0, 0])
    edges = pts[:, 1:, :] - pts[:, :1, :]  # (N, j, d)
    pull = wedge_components(edges)  # (N, C(d, j)) = det(E[I, :])
    integrand = np.einsum("nqc,nc->nq", comps, pull)
    return Cochain(j, integrand @ w / math.factorial(j))
