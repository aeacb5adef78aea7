"""Adjoint, Laplacian, Hodge decomposition and the combinatorial star.

Everything hangs off :class:`HodgeContext`, which caches the mass matrices
(with their factorizations), coboundaries and pairing matrices per degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .complex import (FundamentalClass, SimplicialComplex, betti_numbers, coboundary_matrix,
                      fundamental_class)
from .cup import InnerProductMatrix, pairing_matrix, whitney_mass_matrix
from .exceptions import OrientationError, SeriesDivergenceError
from .geometry import GeometricRealization

DENSE_LIMIT = 2000


class HodgeContext:
    """Operators of a realized complex, built lazily and cached.

    Parameters
    ----------
    complex_, realization
        The triangulation and its metric.
    fclass : FundamentalClass, optional
        Computed automatically for closed orientable complexes; the star is
        unavailable without it.
    zero_tol : float
        Relative eigenvalue threshold for harmonic cochains.
    mass_scale : float
        Multiplies every inner product matrix (a conformal rescaling).
    """

    def __init__(self, complex_: SimplicialComplex, realization: GeometricRealization,
                 fclass: FundamentalClass | None = None, zero_tol: float = 1e-9,
                 mass_scale: float = 1.0):
        self.complex = complex_
        self.realization = realization
        self.dim = complex_.dim
        if fclass is None and complex_.is_closed_manifold:
            try:
                fclass = fundamental_class(complex_)
            except OrientationError:
                fclass = None
        self.fclass = fclass
        self.zero_tol = zero_tol
        self.mass_scale = mass_scale
        self._cache: dict = {}

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def mass(self, j: int) -> InnerProductMatrix:
        def build():
            M = whitney_mass_matrix(j, self.complex, self.realization)
            if self.mass_scale != 1.0:
                M = InnerProductMatrix(j, (M.matrix * self.mass_scale).tocsr())
            return M
        return self._cached(("M", j), build)

    def d(self, j: int) -> sparse.csr_matrix:
        """Coboundary C^j -> C^{j+1} as a float matrix (zero outside 0 <= j < n)."""
        def build():
            if 0 <= j < self.dim:
                return coboundary_matrix(self.complex, j).astype(float)
            rows = self.complex.count(j + 1) if 0 <= j + 1 <= self.dim else 0
            cols = self.complex.count(j) if 0 <= j <= self.dim else 0
            return sparse.csr_matrix((rows, cols))
        return self._cached(("d", j), build)

    def pairing(self, j: int) -> sparse.csr_matrix:
        if self.fclass is None:
            raise OrientationError("star needs a closed oriented complex (no fundamental class)")
        return self._cached(("C", j), lambda: pairing_matrix(j, self.complex, self.fclass))

    def star(self, j: int) -> np.ndarray:
        """Dense matrix of the star C^j -> C^{n-j}."""
        return self._cached(("star", j), lambda: star(j, self))

    def delta_star(self, j: int) -> np.ndarray:
        return self._cached(("dstar", j), lambda: delta_star(j, self))

    def laplacian(self, j: int) -> np.ndarray:
        return self._cached(("lap", j), lambda: laplacian(j, self))

    def harmonic_basis(self, j: int) -> np.ndarray:
        return self._cached(("H", j), lambda: harmonic_basis(j, self))

    def betti(self) -> list[int]:
        return self._cached("betti", lambda: betti_numbers(self.complex))


def star(j: int, ctx: HodgeContext) -> np.ndarray:
    """Star matrix M_{n-j}^{-1} C_j^T via the cached factorization of M_{n-j}."""
    n = ctx.dim
    if not 0 <= j <= n:
        raise ValueError(f"degree {j} out of range")
    C = ctx.pairing(j)
    return ctx.mass(n - j).solve(C.T.toarray())


def delta_star(j: int, ctx: HodgeContext) -> np.ndarray:
    """Adjoint of the coboundary, C^j -> C^{j-1}: M_{j-1}^{-1} d_{j-1}^T M_j."""
    if not 0 <= j <= ctx.dim:
        raise ValueError(f"degree {j} out of range")
    if j == 0:
        return np.zeros((0, ctx.complex.count(0)))
    rhs = (ctx.d(j - 1).T @ ctx.mass(j).matrix).toarray()
    return ctx.mass(j - 1).solve(rhs)


def laplacian(j: int, ctx: HodgeContext) -> np.ndarray:
    """delta* delta + delta delta* on C^j (dense)."""
    N = ctx.complex.count(j)
    out = np.zeros((N, N))
    if j < ctx.dim:
        out += ctx.delta_star(j + 1) @ ctx.d(j).toarray()
    if j > 0:
        out += ctx.d(j - 1) @ ctx.delta_star(j)
    return out


def _null_space_sym(A, tol: float) -> np.ndarray:
    """Eigenvectors of the PSD matrix A with eigenvalue below tol * max eigenvalue."""
    N = A.shape[0]
    if N <= DENSE_LIMIT:
        dense = A.toarray() if sparse.issparse(A) else np.asarray(A)
        w, v = np.linalg.eigh(dense)
        top = max(w[-1], 0.0)
        return v[:, w <= tol * top] if top > 0 else v
    top = eigsh(A, k=1, which="LA", return_eigenvectors=False)[0]
    k = min(N - 2, 16)
    w, v = eigsh(A, k=k, sigma=-1e-6 * top, which="LM")
    return v[:, w <= tol * top]


def harmonic_basis(j: int, ctx: HodgeContext) -> np.ndarray:
    """M-orthonormal basis of harmonic j-cochains (columns).

    Harmonic cochains are the common null space of d_j and d_{j-1}^T M_j,
    computed from the stacked sparse operator.
    """
    M = ctx.mass(j).matrix
    blocks = []
    if j < ctx.dim:
        blocks.append(ctx.d(j))
    if j > 0:
        scale = abs(M).max()
        blocks.append((ctx.d(j - 1).T @ M) / scale)
    N = ctx.complex.count(j)
    if not blocks:
        return np.eye(N)
    Q = sparse.vstack(blocks).tocsr()
    H = _null_space_sym((Q.T @ Q).tocsr(), ctx.zero_tol)
    if H.shape[1] == 0:
        return H
    G = H.T @ (M @ H)
    L = np.linalg.cholesky((G + G.T) / 2)
    return sla.solve_triangular(L, H.T, lower=True).T


@dataclass
class HodgeDecomposition:
    exact: np.ndarray
    harmonic: np.ndarray
    coexact: np.ndarray
    exact_potential: np.ndarray
    coexact_potential: np.ndarray

    def parts(self):
        return self.exact, self.harmonic, self.coexact


def _mass_sqrt(ctx: HodgeContext, j: int) -> np.ndarray:
    """Upper Cholesky factor R with M_j = R^T R."""
    return ctx._cached(("R", j), lambda: np.linalg.cholesky(ctx.mass(j).matrix.toarray()).T)


def hodge_decompose(c, ctx: HodgeContext) -> HodgeDecomposition:
    """Split a j-cochain into exact + harmonic + coexact parts, M-orthogonally.

    The exact and coexact parts are least-squares fits in the M norm; the
    harmonic part is the projection onto :func:`harmonic_basis`.
    """
    j = c.degree
    vals = np.asarray(c.values, dtype=complex if np.iscomplexobj(c.values) else float)
    M = ctx.mass(j).matrix
    R = _mass_sqrt(ctx, j)
    H = ctx.harmonic_basis(j)
    harm = H @ (H.T @ (M @ vals))
    N = len(vals)
    if j > 0:
        D = ctx.d(j - 1).toarray()
        a1 = np.linalg.lstsq(R @ D, R @ vals, rcond=None)[0]
        exact = D @ a1
    else:
        a1, exact = np.zeros(0), np.zeros(N)
    if j < ctx.dim:
        Ds = ctx.delta_star(j + 1)
        a3 = np.linalg.lstsq(R @ Ds, R @ vals, rcond=None)[0]
        coexact = Ds @ a3
    else:
        a3, coexact = np.zeros(0), np.zeros(N)
    return HodgeDecomposition(exact, harm, coexact, a1, a3)


def orthogonality_residual(dec: HodgeDecomposition, ctx: HodgeContext, j: int,
                           original=None) -> float:
    """Largest normalized cross inner product among the parts (and reconstruction error)."""
    M = ctx.mass(j)
    parts = dec.parts()
    scale = max(M.norm(p) for p in parts + ((original,) if original is not None else ()))
    scale = scale if scale > 0 else 1.0
    res = 0.0
    for a in range(3):
        for b in range(a + 1, 3):
            res = max(res, abs(M.inner(parts[a], parts[b])) / scale**2)
    if original is not None:
        res = max(res, M.norm(np.asarray(original) - sum(parts)) / scale)
    return float(res)


# -- inverse by path sums -------------------------------------------------------

@dataclass
class WeightedCochainGraph:
    """Graph on j-simplices: edges join simplices in a common top simplex.

    The weight of an edge is the normalized inner product <s, t>/(|s||t|).
    """

    degree: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    size: int
    _adj: dict = field(default=None, repr=False)

    @classmethod
    def from_mass(cls, M: InnerProductMatrix) -> "WeightedCochainGraph":
        A = M.matrix.tocoo()
        d = np.sqrt(M.matrix.diagonal())
        off = A.row != A.col
        r, c = A.row[off], A.col[off]
        return cls(M.degree, r, c, A.data[off] / (d[r] * d[c]), M.matrix.shape[0])

    def adjacency(self) -> sparse.csr_matrix:
        """Weighted adjacency matrix A, so that D^{-1} M D^{-1} = I + A."""
        return sparse.csr_matrix((self.weights, (self.rows, self.cols)), shape=(self.size,) * 2)

    def path_weight(self, path) -> float:
        """Product of edge weights along a vertex sequence."""
        A = self.adjacency()
        w = 1.0
        for u, v in zip(path[:-1], path[1:]):
            w *= A[u, v]
        return float(w)

    def path_sum(self, source: int, target: int, length: int) -> float:
        """Sum of weights of all paths with ``length`` edges from source to target."""
        A = self.adjacency().tolil()
        nbrs = [list(zip(A.rows[i], A.data[i])) for i in range(self.size)]
        frontier = {source: 1.0}
        for _ in range(length):
            nxt: dict = {}
            for u, w in frontier.items():
                for v, a in nbrs[u]:
                    nxt[v] = nxt.get(v, 0.0) + w * a
            frontier = nxt
        return frontier.get(target, 0.0)


def spectral_radius(A) -> float:
    if A.shape[0] <= DENSE_LIMIT:
        w = np.linalg.eigvalsh(A.toarray() if sparse.issparse(A) else A)
        return float(np.max(np.abs(w)))
    return float(abs(eigsh(A, k=1, which="LM", return_eigenvectors=False)[0]))


def neumann_terms(M: InnerProductMatrix, count: int) -> list[np.ndarray]:
    """The first ``count`` matrices D^{-1} (-A)^i D^{-1} of the series."""
    A = WeightedCochainGraph.from_mass(M).adjacency()
    dinv = 1.0 / np.sqrt(M.matrix.diagonal())
    term = np.eye(M.matrix.shape[0])
    out = []
    for _ in range(count):
        out.append(dinv[:, None] * term * dinv[None, :])
        term = -(A @ term)
    return out


def neumann_inverse(j: int, ctx: HodgeContext | InnerProductMatrix, tol: float = 1e-12,
                    max_terms: int = 10000, window: int = 8, check_radius: bool = True):
    """M_j^{-1} as the alternating sum over weighted paths.

    Returns ``(approximation, number_of_terms)``. Raises
    :class:`SeriesDivergenceError` when the spectral radius of the weighted
    adjacency matrix is not below one, or when the term norms stop
    decreasing over ``window`` consecutive terms.
    """
    M = ctx if isinstance(ctx, InnerProductMatrix) else ctx.mass(j)
    A = WeightedCochainGraph.from_mass(M).adjacency()
    if check_radius:
        rho = spectral_radius(A)
        if rho >= 1 - 1e-12:
            raise SeriesDivergenceError(
                f"Neumann series diverges (spectral radius {rho:.6f} >= 1); "
                "use the factorized solve instead")
    dinv = 1.0 / np.sqrt(M.matrix.diagonal())
    N = A.shape[0]
    term = np.eye(N)
    total = term.copy()
    norms = [1.0]
    for k in range(1, max_terms + 1):
        term = -(A @ term)
        total += term
        norms.append(float(np.abs(term).max()))
        if norms[-1] < tol:
            return dinv[:, None] * total * dinv[None, :], k + 1
        if len(norms) > window and all(norms[-i] >= norms[-i - 1]
                                       for i in range(1, window + 1)):
            raise SeriesDivergenceError(
                "Neumann series terms stopped decreasing; use the factorized solve instead")
    raise SeriesDivergenceError(f"Neumann series did not reach tolerance in {max_terms} terms")
