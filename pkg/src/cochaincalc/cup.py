"""Combinatorial cup product, pairing matrices and Whitney mass matrices."""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .complex import (Cochain, FundamentalClass, SimplicialComplex, check_cochain,
                      permutation_sign)
from .exceptions import GeometryError, OrientationError
from .geometry import GeometricRealization
from .whitney import (de_rham_whitney, local_mass_matrices, reference_wedge_pairing,
                      wedge, whitney_embed)


def cup_coefficient(j: int, k: int) -> Fraction:
    return Fraction(math.factorial(j) * math.factorial(k), math.factorial(j + k + 1))


def _split_sign(S: tuple, x: int, T: tuple) -> int:
    """Orientation sign for sorted simplices S and T meeting in the vertex x."""
    s_rest = tuple(v for v in S if v != x)
    t_rest = tuple(v for v in T if v != x)
    return (permutation_sign(s_rest + (x,)) * permutation_sign((x,) + t_rest)
            * permutation_sign(s_rest + (x,) + t_rest))


def cup(sigma, tau, complex_: SimplicialComplex | None = None):
    """Cup product of two oriented simplices.

    Parameters
    ----------
    sigma, tau : sequence of int
        Vertex lists in any order (the order fixes the orientation).
    complex_ : SimplicialComplex, optional
        When given, the union must be a simplex of the complex.

    Returns
    -------
    (tuple, Fraction) or None
        The sorted union simplex with its coefficient, or None for zero.
    """
    sigma, tau = tuple(int(v) for v in sigma), tuple(int(v) for v in tau)
    shared = set(sigma) & set(tau)
    if len(shared) != 1:
        return None
    union = tuple(sorted(set(sigma) | set(tau)))
    if complex_ is not None and complex_.find(union) is None:
        return None
    (x,) = shared
    j, k = len(sigma) - 1, len(tau) - 1
    eps = (permutation_sign(sigma) * permutation_sign(tau)
           * _split_sign(tuple(sorted(sigma)), x, tuple(sorted(tau))))
    return union, eps * cup_coefficient(j, k)


@lru_cache(maxsize=None)
def reference_cup_table(j: int, k: int) -> tuple:
    """Nonzero products of faces of the reference (j+k)-simplex.

    Entries are ``(a, b, coefficient)`` with a, b indices of local faces in
    lexicographic order.
    """
    m = j + k
    fa = {f: i for i, f in enumerate(combinations(range(m + 1), j + 1))}
    fb = {f: i for i, f in enumerate(combinations(range(m + 1), k + 1))}
    out = []
    for S, a in fa.items():
        for T, b in fb.items():
            res = cup(S, T)
            if res is not None and len(res[0]) == m + 1:
                out.append((a, b, res[1]))
    return tuple(out)


_face_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def faces_of(complex_: SimplicialComplex, m: int, j: int) -> np.ndarray:
    """Ids of the j-faces of every m-simplex, shape (N_m, C(m+1, j+1))."""
    store = _face_cache.setdefault(complex_, {})
    if (m, j) not in store:
        local = list(combinations(range(m + 1), j + 1))
        simp = complex_.simplices[m]
        arr = np.empty((len(simp), len(local)), dtype=np.int64)
        index = complex_._index[j]
        for r, s in enumerate(simp):
            s = tuple(s)
            for c, loc in enumerate(local):
                arr[r, c] = index[tuple(s[i] for i in loc)]
        store[m, j] = arr
    return store[m, j]


@dataclass(frozen=True)
class CupTable:
    """Sparse trilinear table: (a ∪ b)[out] += weight * a[left] * b[right]."""

    j: int
    k: int
    out: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weight: np.ndarray  # Fractions (object)

    @property
    def weight_float(self) -> np.ndarray:
        return self.weight.astype(float)


def cup_table(complex_: SimplicialComplex, j: int, k: int) -> CupTable:
    m = j + k
    if m > complex_.dim:
        raise ValueError(f"degrees {j} + {k} exceed dimension {complex_.dim}")
    store = _face_cache.setdefault(complex_, {})
    key = ("cup", j, k)
    if key not in store:
        ref = reference_cup_table(j, k)
        fj, fk = faces_of(complex_, m, j), faces_of(complex_, m, k)
        N = complex_.count(m)
        out = np.repeat(np.arange(N), len(ref))
        left = np.concatenate([fj[:, [a for a, _, _ in ref]]], axis=0).ravel()
        right = fk[:, [b for _, b, _ in ref]].ravel()
        weight = np.tile(np.array([c for _, _, c in ref], dtype=object), N)
        store[key] = CupTable(j, k, out, left, right, weight)
    return store[key]


def cup_cochains(a: Cochain, b: Cochain, complex_: SimplicialComplex) -> Cochain:
    """Bilinear extension of :func:`cup` to cochains (real, complex or Fraction)."""
    check_cochain(complex_, a)
    check_cochain(complex_, b)
    tab = cup_table(complex_, a.degree, b.degree)
    av, bv = np.asarray(a.values), np.asarray(b.values)
    exact = av.dtype == object or bv.dtype == object
    w = tab.weight if exact else tab.weight_float
    vals = w * av[tab.left] * bv[tab.right]
    N = complex_.count(a.degree + b.degree)
    if exact:
        out = np.array([Fraction(0)] * N, dtype=object)
        np.add.at(out, tab.out, vals)
    else:
        out = np.zeros(N, dtype=np.result_type(av, bv, float))
        np.add.at(out, tab.out, vals)
    return Cochain(a.degree + b.degree, out)


def whitney_cup_cochains(a: Cochain, b: Cochain, complex_: SimplicialComplex) -> Cochain:
    """R(Wa ^ Wb) by exact polynomial integration (independent of :func:`cup`)."""
    return de_rham_whitney(wedge(whitney_embed(a, complex_), whitney_embed(b, complex_)),
                           complex_)


def evaluate_top(c: Cochain, fclass: FundamentalClass):
    """Pairing of a top-degree cochain with the fundamental class."""
    return np.dot(np.asarray(fclass.signs), np.asarray(c.values))


def pairing_matrix(j: int, complex_: SimplicialComplex, fclass: FundamentalClass | None,
                   exact: bool = False):
    """Matrix C_j with C_j[s, t] = (s ∪ t)[M], s of degree j, t of degree n - j."""
    if fclass is None:
        raise OrientationError("pairing matrix needs a fundamental class")
    n = complex_.dim
    tab = cup_table(complex_, j, n - j)
    signs = np.asarray(fclass.signs)[tab.out]
    shape = (complex_.count(j), complex_.count(n - j))
    if exact:
        mat = np.empty(shape, dtype=object)
        mat[...] = Fraction(0)
        for r, c, w, s in zip(tab.left, tab.right, tab.weight, signs):
            mat[r, c] += w * int(s)
        return mat
    return sparse.csr_matrix((tab.weight_float * signs, (tab.left, tab.right)), shape=shape)


def wedge_pairing_matrix(j: int, complex_: SimplicialComplex, fclass: FundamentalClass):
    """Dense matrix of the integrals of Wa ^ Wb over M (Whitney-polynomial oracle)."""
    n = complex_.dim
    ref = np.array(reference_wedge_pairing(n, j), dtype=float)
    fj, fk = complex_.top_faces[j], complex_.top_faces[n - j]
    out = np.zeros((complex_.count(j), complex_.count(n - j)))
    for t, s in enumerate(np.asarray(fclass.signs)):
        out[np.ix_(fj[t], fk[t])] += s * ref
    return out


@dataclass(eq=False)
class InnerProductMatrix:
    """Whitney inner product on degree-j cochains with a cached factorization."""

    degree: int
    matrix: sparse.csr_matrix
    exact: np.ndarray | None = None
    _lu: object = field(default=None, repr=False)

    def factor(self):
        if self._lu is None:
            csc = self.matrix.tocsc()
            try:
                lu = splu(csc, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                          options={"SymmetricMode": True})
            except RuntimeError as exc:
                raise GeometryError(f"mass matrix M_{self.degree} is singular") from exc
            if np.any(lu.U.diagonal() <= 0):
                raise GeometryError(f"mass matrix M_{self.degree} is not positive definite")
            self._lu = lu
        return self._lu

    def solve(self, rhs):
        """Apply M^{-1} (real factorization, complex right-hand sides allowed)."""
        rhs = np.asarray(rhs.toarray() if sparse.issparse(rhs) else rhs)
        lu = self.factor()
        if np.iscomplexobj(rhs):
            return lu.solve(np.ascontiguousarray(rhs.real)) + 1j * lu.solve(
                np.ascontiguousarray(rhs.imag))
        return lu.solve(np.asarray(rhs, dtype=float))

    def inner(self, x, y):
        """Hermitian inner product x^T M conj(y)."""
        return np.asarray(x) @ (self.matrix @ np.conj(np.asarray(y)))

    def norm(self, x) -> float:
        return float(np.sqrt(max(np.real(self.inner(x, x)), 0.0)))

    def __matmul__(self, other):
        return self.matrix @ other


def whitney_mass_matrix(j: int, complex_: SimplicialComplex,
                        realization: GeometricRealization) -> InnerProductMatrix:
    """Assemble M_j from per-simplex exact Whitney inner products.

    With an exact (Fraction) realization the rational matrix is kept in
    ``.exact`` next to the floating point copy.
    """
    if not 0 <= j <= complex_.dim:
        raise ValueError(f"degree {j} out of range")
    local = local_mass_matrices(realization, j)
    faces = complex_.top_faces[j]
    F = faces.shape[1]
    rows = np.repeat(faces, F, axis=1).ravel()
    cols = np.tile(faces, (1, F)).ravel()
    N = complex_.count(j)
    exact = None
    if realization.exact:
        exact = np.empty((N, N), dtype=object)
        exact[...] = Fraction(0)
        for r, c, v in zip(rows, cols, local.reshape(-1)):
            exact[r, c] += v
    mat = sparse.coo_matrix((local.reshape(-1).astype(float), (rows, cols)), shape=(N, N)).tocsr()
    mat.sum_duplicates()
    return InnerProductMatrix(j, mat, exact)


def associativity_defect(a: Cochain, b: Cochain, c: Cochain, complex_: SimplicialComplex,
                         realization: GeometricRealization | None = None):
    """(a ∪ b) ∪ c - a ∪ (b ∪ c) and its Whitney norm (when a realization is given)."""
    left = cup_cochains(cup_cochains(a, b, complex_), c, complex_)
    right = cup_cochains(a, cup_cochains(b, c, complex_), complex_)
    diff = left - right
    if realization is None:
        return diff, None
    M = whitney_mass_matrix(diff.degree, complex_, realization)
    return diff, M.norm(np.asarray(diff.values, dtype=float))
