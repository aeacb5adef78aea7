"""Holomorphic 1-cochains and period matrices of triangulated closed surfaces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import SimplicialComplex, boundary_matrix
from .exceptions import PeriodError
from .hodge import HodgeContext


def symplectic_form(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g))
    J[:g, g:] = np.eye(g)
    J[g:, :g] = -np.eye(g)
    return J


def _rel(a, b) -> float:
    """max|a - b| / max(1, max|a|, max|b|)."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.abs(a).max(initial=0)), float(np.abs(b).max(initial=0)))
    return float(np.abs(a - b).max(initial=0) / scale)


@dataclass
class HomologyBasis:
    """Integer 1-cycles a_1..a_g, b_1..b_g (rows of ``a`` and ``b``)."""

    a: np.ndarray
    b: np.ndarray
    names: tuple = ()

    @property
    def genus(self) -> int:
        return len(self.a)

    @property
    def chains(self) -> np.ndarray:
        """All 2g cycles stacked as rows, a-cycles first."""
        return np.vstack([self.a, self.b])

    @classmethod
    def from_cycles(cls, cycles: dict, complex_: SimplicialComplex | None = None) -> "HomologyBasis":
        """Build from a name -> chain mapping with keys a1..ag and b1..bg."""
        a_names = sorted((k for k in cycles if k.startswith("a")), key=lambda s: int(s[1:]))
        b_names = sorted((k for k in cycles if k.startswith("b")), key=lambda s: int(s[1:]))
        if not a_names or len(a_names) != len(b_names):
            raise PeriodError(
                f"homology basis needs matching cycles a1..ag and b1..bg, got {sorted(cycles)}")
        a = np.array([cycles[k] for k in a_names], dtype=np.int64)
        b = np.array([cycles[k] for k in b_names], dtype=np.int64)
        hb = cls(a, b, tuple(a_names + b_names))
        if complex_ is not None:
            hb.check_closed(complex_)
        return hb

    def check_closed(self, complex_: SimplicialComplex) -> None:
        bd = boundary_matrix(complex_, 1)
        for name, chain in zip(self.names or range(2 * self.genus), self.chains):
            if np.any(bd @ chain):
                raise PeriodError(f"cycle {name} is not closed")

    def intersection_residual(self, ctx: HodgeContext) -> float:
        """Mismatch between the cup pairing of harmonic cochains and the symplectic form.

        For closed cochains s, t the pairing (s ∪ t)[M] equals
        sum_i s(a_i) t(b_i) - s(b_i) t(a_i) exactly when the cycles form a
        canonical basis with the orientation of the fundamental class.
        """
        H = ctx.harmonic_basis(1)
        if H.shape[1] != 2 * self.genus:
            raise PeriodError(
                f"harmonic space has dimension {H.shape[1]}, basis has {2 * self.genus} cycles")
        X = self.chains @ H
        lhs = H.T @ (ctx.pairing(1) @ H)
        return _rel(lhs, X.T @ symplectic_form(self.genus) @ X)

    def validate(self, ctx: HodgeContext, tol: float = 1e-8) -> float:
        self.check_closed(ctx.complex)
        res = self.intersection_residual(ctx)
        if res > tol:
            raise PeriodError(
                f"cycles do not form a canonical homology basis (intersection residual {res:.2e})")
        return res


def periods(c, cycle, complex_: SimplicialComplex | None = None):
    """Value of a 1-cochain on a 1-cycle."""
    vals = np.asarray(getattr(c, "values", c))
    cycle = np.asarray(cycle)
    if complex_ is not None and np.any(boundary_matrix(complex_, 1) @ cycle):
        raise PeriodError("chain is not closed")
    return vals.T @ cycle


@dataclass
class HolomorphicBasis:
    """Columns are holomorphic 1-cochains with star = -i lambda."""

    cochains: np.ndarray
    scales: np.ndarray
    a_periods: np.ndarray = None  # [i, k] = sigma_k(a_i)
    b_periods: np.ndarray = None

    @property
    def genus(self) -> int:
        return self.cochains.shape[1]


@dataclass
class Splitting:
    """Star eigen-split of complex harmonic 1-cochains.

    ``eigenvalues`` lists -i lambda_k for the holomorphic columns, then
    +i lambda_k for their conjugates in ``antiholomorphic``.
    """

    holomorphic: HolomorphicBasis
    antiholomorphic: np.ndarray
    eigenvalues: np.ndarray
    real_part: float
    pairing_mismatch: float
    skew_defect: float
    star_matrix: np.ndarray = field(repr=False, default=None)


def complexify_and_split(ctx: HodgeContext, basis: HomologyBasis | None = None,
                         tol: float = 1e-8) -> Splitting:
    """Eigen-split the star on complex harmonic 1-cochains into +-i lambda parts.

    The star is restricted to harmonics by M-orthogonal projection, which in
    an M-orthonormal basis H is the real matrix S = H^T C_1^T H.
    """
    if ctx.dim != 2:
        raise PeriodError("holomorphic splitting needs a surface")
    H = ctx.harmonic_basis(1)
    if H.shape[1] == 0 or H.shape[1] % 2:
        raise PeriodError(f"harmonic 1-cochains have dimension {H.shape[1]}, expected 2g > 0")
    S = H.T @ (ctx.pairing(1).T @ H)
    eig = np.linalg.eigvals(S)
    top = np.abs(eig).max()
    real_part = float(np.abs(eig.real).max() / top)
    imag = np.sort(eig.imag)
    mismatch = float(np.abs(imag + imag[::-1]).max() / top)
    skew = float(np.abs(S + S.T).max() / top)
    if real_part > tol or mismatch > tol:
        raise PeriodError(
            f"star on harmonics is not a complex structure (real part {real_part:.2e}, "
            f"pair mismatch {mismatch:.2e})")
    mu, V = np.linalg.eigh(1j * (S - S.T) / 2)
    g = H.shape[1] // 2
    pos = mu > 0
    if pos.sum() != g:
        raise PeriodError("eigenvalues do not split evenly into +-i lambda")
    holo = H @ V[:, pos]
    out = HolomorphicBasis(holo, mu[pos])
    if basis is not None:
        out.a_periods = basis.a @ holo
        out.b_periods = basis.b @ holo
    return Splitting(out, holo.conj(), np.concatenate([-1j * mu[pos], 1j * mu[pos]]),
                     real_part, mismatch, skew, S)


def canonical_basis(holo: HolomorphicBasis, basis: HomologyBasis, cond_limit: float = 1e12
                    ) -> HolomorphicBasis:
    """Recombine so that the A-periods form the identity matrix."""
    A = basis.a @ holo.cochains
    if np.linalg.cond(A) > cond_limit:
        raise PeriodError("A-period matrix is numerically singular; check the homology basis")
    X = np.linalg.solve(A, np.eye(basis.genus))
    canon = holo.cochains @ X
    # the scales are only meaningful per eigenvector; keep them when g = 1
    scales = holo.scales if basis.genus == 1 else np.full(basis.genus, np.nan)
    return HolomorphicBasis(canon, scales, basis.a @ canon, basis.b @ canon)


@dataclass
class PeriodMatrix:
    matrix: np.ndarray
    symmetry_residual: float
    min_imag_eigenvalue: float
    basis: HolomorphicBasis
    splitting: Splitting

    def is_valid(self, tol: float = 1e-9) -> bool:
        return self.symmetry_residual < tol and self.min_imag_eigenvalue > 0


def period_matrix(ctx: HodgeContext, basis: HomologyBasis, validate_basis: bool = True
                  ) -> PeriodMatrix:
    """Pi[i, j] = sigma_i(b_j) for the canonical holomorphic basis."""
    if validate_basis:
        basis.validate(ctx)
    split = complexify_and_split(ctx, basis)
    canon = canonical_basis(split.holomorphic, basis)
    Pi = canon.b_periods.T
    sym = _rel(Pi, Pi.T)
    min_eig = float(np.linalg.eigvalsh(((Pi + Pi.T) / 2).imag).min())
    return PeriodMatrix(Pi, sym, min_eig, canon, split)


@dataclass
class RiemannReport:
    bilinear_residual: float
    norm_values: np.ndarray
    norm_relative_errors: np.ndarray

    @property
    def max_norm_error(self) -> float:
        return float(np.max(self.norm_relative_errors))


def validate_riemann_relations(holo: HolomorphicBasis, basis: HomologyBasis,
                               ctx: HodgeContext) -> RiemannReport:
    """Check sum(A_i B'_i - B_i A'_i) = 0 and the period formula for the norm.

    ``holo`` must hold eigenvectors (each with its own scale) for the norm
    check; the bilinear relation holds for any holomorphic cochains.
    """
    A = basis.a @ holo.cochains
    B = basis.b @ holo.cochains
    bil = A.T @ B - B.T @ A
    scale = max(1.0, float(np.abs(A).max() * np.abs(B).max()))
    bil_res = float(np.abs(bil).max() / scale)
    M = ctx.mass(1)
    vals, errs = [], []
    for k in range(holo.genus):
        lam = holo.scales[k]
        s = holo.cochains[:, k]
        formula = (1j / lam) * np.sum(A[:, k] * B[:, k].conj() - B[:, k] * A[:, k].conj())
        direct = M.inner(s, s).real
        vals.append(formula)
        errs.append(abs(formula - direct) / direct)
    return RiemannReport(bil_res, np.array(vals), np.array(errs))
