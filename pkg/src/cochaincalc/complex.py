"""Ordered simplicial complexes, chains/cochains and boundary operators.

Simplices are stored as strictly increasing tuples of global vertex ids.
Orientation of a simplex written in any other vertex order is tracked by
the sign of the sorting permutation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import sparse

from .exceptions import ComplexError, OrientationError


def permutation_sign(seq) -> int:
    """Sign of the permutation that sorts ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for k in range(i + 1, len(seq)):
            if seq[i] > seq[k]:
                sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Ordered simplicial complex of dimension ``dim``.

    Attributes
    ----------
    dim : int
        Dimension n of the top simplices.
    simplices : list of ndarray
        ``simplices[j]`` is an ``(N_j, j + 1)`` integer array of sorted vertex
        ids, rows in lexicographic order.
    top_faces : list of ndarray
        ``top_faces[j]`` is ``(N_n, C(n+1, j+1))``; entry ``[t, a]`` is the id of
        the ``a``-th local j-face (lexicographic in local positions) of top
        simplex ``t``.
    nonmanifold_facets : ndarray
        Ids of (n-1)-simplices not bounding exactly two top simplices.
    """

    dim: int
    simplices: list
    top_faces: list
    nonmanifold_facets: np.ndarray
    _index: list = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.simplices[0])

    def count(self, j: int) -> int:
        return len(self.simplices[j])

    @property
    def shape(self) -> tuple:
        return tuple(len(s) for s in self.simplices)

    @property
    def is_closed_manifold(self) -> bool:
        return self.dim >= 1 and len(self.nonmanifold_facets) == 0

    def index(self, simplex) -> int:
        """Id of a simplex given as a vertex sequence (any order)."""
        key = tuple(sorted(int(v) for v in simplex))
        try:
            return self._index[len(key) - 1][key]
        except (KeyError, IndexError):
            raise KeyError(f"simplex {tuple(simplex)} is not in the complex") from None

    def find(self, simplex):
        """Id of ``simplex`` or None if absent."""
        key = tuple(sorted(int(v) for v in simplex))
        if not 1 <= len(key) <= self.dim + 1:
            return None
        return self._index[len(key) - 1].get(key)

    def oriented(self, simplex) -> tuple[int, int]:
        """(id, sign) for a simplex written in an arbitrary vertex order."""
        return self.index(simplex), permutation_sign(simplex)

    def coface_representative(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """For every j-simplex, one top simplex containing it and the local face slot."""
        faces = self.top_faces[j]
        flat = faces.ravel()
        _, first = np.unique(flat, return_index=True)
        return first // faces.shape[1], first % faces.shape[1]


def build_complex(top_simplices) -> SimplicialComplex:
    """Generate all faces of the given top simplices.

    Non-manifold input is accepted and recorded in ``nonmanifold_facets``;
    duplicate top simplices raise :class:`ComplexError`.
    """
    tops = [tuple(int(v) for v in s) for s in top_simplices]
    if not tops:
        raise ComplexError("no simplices given")
    size = len(tops[0])
    if any(len(s) != size for s in tops):
        raise ComplexError("top simplices must all have the same number of vertices")
    if any(v < 0 for s in tops for v in s):
        raise ComplexError("vertex ids must be non-negative")
    if any(len(set(s)) != size for s in tops):
        raise ComplexError("a simplex repeats a vertex")
    n = size - 1
    sorted_tops = [tuple(sorted(s)) for s in tops]
    if len(set(sorted_tops)) != len(sorted_tops):
        raise ComplexError("duplicate top simplices")

    tables = []
    index = []
    for j in range(n + 1):
        faces = sorted({f for s in sorted_tops for f in combinations(s, j + 1)})
        tables.append(np.array(faces, dtype=np.int64).reshape(len(faces), j + 1))
        index.append({f: i for i, f in enumerate(faces)})

    top_faces = []
    for j in range(n + 1):
        local = list(combinations(range(n + 1), j + 1))
        arr = np.empty((len(tables[n]), len(local)), dtype=np.int64)
        for t, s in enumerate(tables[n]):
            s = tuple(s)
            for a, loc in enumerate(local):
                arr[t, a] = index[j][tuple(s[i] for i in loc)]
        top_faces.append(arr)

    if n >= 1:
        counts = np.bincount(top_faces[n - 1].ravel(), minlength=len(tables[n - 1]))
        nonmanifold = np.nonzero(counts != 2)[0]
    else:
        nonmanifold = np.zeros(0, dtype=np.int64)
    return SimplicialComplex(n, tables, top_faces, nonmanifold, index)


def boundary_matrix(complex_: SimplicialComplex, j: int) -> sparse.csr_matrix:
    """Integer matrix of the boundary map C_j -> C_{j-1}.

    The coboundary C^{j-1} -> C^j is its transpose.
    """
    if not 1 <= j <= complex_.dim:
        raise ValueError(f"boundary degree must be in [1, {complex_.dim}], got {j}")
    simp = complex_.simplices[j]
    rows, cols, vals = [], [], []
    for col, s in enumerate(simp):
        for i in range(j + 1):
            face = tuple(np.delete(s, i))
            rows.append(complex_.index(face))
            cols.append(col)
            vals.append(-1 if i % 2 else 1)
    return sparse.csr_matrix(
        (np.array(vals, dtype=np.int64), (rows, cols)),
        shape=(complex_.count(j - 1), complex_.count(j)),
    )


def coboundary_matrix(complex_: SimplicialComplex, j: int) -> sparse.csr_matrix:
    """Coboundary C^j -> C^{j+1}, the transpose of the boundary of degree j+1."""
    return boundary_matrix(complex_, j + 1).T.tocsr()


def betti_numbers(complex_: SimplicialComplex) -> list[int]:
    """Real Betti numbers from dense matrix ranks (desk-scale complexes)."""
    ranks = [0]
    for j in range(1, complex_.dim + 1):
        ranks.append(int(np.linalg.matrix_rank(boundary_matrix(complex_, j).toarray())))
    ranks.append(0)
    return [complex_.count(j) - ranks[j] - ranks[j + 1] for j in range(complex_.dim + 1)]


@dataclass(frozen=True)
class Cochain:
    """Coefficient vector on the j-simplices of a complex."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Cochain(self.degree, self.values + other.values)

    def __sub__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Cochain(self.degree, self.values - other.values)

    def __mul__(self, scalar):
        return Cochain(self.degree, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Cochain(self.degree, -self.values)

    def __len__(self):
        return len(self.values)


def basis_cochain(complex_: SimplicialComplex, j: int, simplex, dtype=float) -> Cochain:
    """Delta cochain of a simplex (given as id or vertex sequence, any order)."""
    vals = np.zeros(complex_.count(j), dtype=dtype)
    if vals.dtype == object:
        vals[:] = [Fraction(0)] * len(vals)
    if np.isscalar(simplex):
        vals[int(simplex)] = 1
    else:
        idx, sign = complex_.oriented(simplex)
        vals[idx] = sign
    return Cochain(j, vals)


def check_cochain(complex_: SimplicialComplex, c: Cochain) -> None:
    if len(c.values) != complex_.count(c.degree):
        raise ValueError(
            f"cochain of degree {c.degree} has {len(c.values)} values, "
            f"complex has {complex_.count(c.degree)} simplices"
        )


@dataclass(frozen=True)
class FundamentalClass:
    """Top-degree chain with one sign per n-simplex."""

    signs: np.ndarray

    def as_chain(self) -> np.ndarray:
        return self.signs.astype(np.int64)


def fundamental_class(complex_: SimplicialComplex, seed: int = 0) -> FundamentalClass:
    """Orient every top simplex consistently, starting from ``seed`` with sign +1.

    Raises
    ------
    OrientationError
        If the complex is not a closed manifold or is not orientable.
    """
    if not complex_.is_closed_manifold:
        raise OrientationError(
            f"complex is not a closed manifold ({len(complex_.nonmanifold_facets)} bad facets)"
        )
    n = complex_.dim
    facets = complex_.top_faces[n - 1]
    # a facet opposite local vertex i has induced sign (-1)^i; local facet slot a
    # (lexicographic) omits vertex n - a
    induced = np.array([(-1) ** (n - a) for a in range(n + 1)])
    cofaces: dict[int, list] = {}
    for t in range(len(facets)):
        for a, f in enumerate(facets[t]):
            cofaces.setdefault(int(f), []).append((t, induced[a]))
    signs = np.zeros(len(facets), dtype=np.int64)
    signs[seed] = 1
    stack = [seed]
    while stack:
        t = stack.pop()
        for a, f in enumerate(facets[t]):
            for t2, s2 in cofaces[int(f)]:
                if t2 == t:
                    continue
                want = -signs[t] * induced[a] * s2
                if signs[t2] == 0:
                    signs[t2] = want
                    stack.append(t2)
                elif signs[t2] != want:
                    raise OrientationError("complex is not orientable")
    if np.any(signs == 0):
        raise OrientationError("complex is not connected; orient each component separately")
    return FundamentalClass(signs)


def chain_boundary(complex_: SimplicialComplex, j: int, chain: np.ndarray) -> np.ndarray:
    return boundary_matrix(complex_, j) @ np.asarray(chain)
