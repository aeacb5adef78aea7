"""Mesh-refinement experiments: errors per level and fitted log-log slopes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import forms as F
from .complex import Cochain
from .cup import cup_cochains
from .geometry import Mesh, circle, conformal_torus, flat_torus, mesh_and_fullness, subdivide_mesh
from .hodge import HodgeContext
from .periods import HomologyBasis, complexify_and_split, period_matrix
from .quadrature import simplex_quadrature
from .whitney import de_rham, evaluate_cochain

EXPERIMENTS = ("identity", "star", "wedge", "assoc", "periods")
COLUMNS = ("level", "eta", "fullness", "error", "slope_so_far", "lambda_dev", "star2_residual")


def l2_error(form, cochain: Cochain | None, mesh: Mesh, order: int = 6) -> float:
    """L2 norm of form - W(cochain) by per-simplex quadrature (cochain may be None)."""
    cx, real = mesh.complex, mesh.realization
    bary, w = simplex_quadrature(cx.dim, order)
    coords = np.asarray(real.coords, dtype=float)
    x = np.einsum("qa,tad->tqd", bary, coords)
    T, m, d = x.shape
    vals = form(x.reshape(-1, d)).reshape(T, m, -1)
    if cochain is not None:
        vals = vals - evaluate_cochain(cochain, cx, real, bary)
    per = F.pointwise_norm_sq(vals) @ w
    return float(np.sqrt(np.dot(np.asarray(real.volume, dtype=float), per)))


def fit_slope(etas, errors, discard_coarsest: bool = True) -> float:
    """Least-squares slope of log(error) against log(eta).

    NaN when fewer than two usable points remain or the errors vanish.
    """
    etas, errors = np.asarray(etas, float), np.asarray(errors, float)
    if discard_coarsest:
        etas, errors = etas[1:], errors[1:]
    ok = errors > 0
    if ok.sum() < 2:
        return float("nan")
    A = np.stack([np.log(etas[ok]), np.ones(ok.sum())], axis=1)
    return float(np.linalg.lstsq(A, np.log(errors[ok]), rcond=None)[0][0])


def star2_residual(ctx: HodgeContext, j: int = 1) -> float:
    """max over harmonic h of |star^2 h - (-1)^{j(n-j)} h| / |h| in the Whitney norm."""
    n = ctx.dim
    H = ctx.harmonic_basis(j)
    if H.shape[1] == 0:
        return float("nan")
    X = ctx.star(n - j) @ (ctx.star(j) @ H) - (-1) ** (j * (n - j)) * H
    M = ctx.mass(j)
    return max(M.norm(X[:, c]) / M.norm(H[:, c]) for c in range(H.shape[1]))


def lambda_deviation(ctx: HodgeContext) -> float:
    split = complexify_and_split(ctx)
    return float(np.max(np.abs(split.holomorphic.scales - 1)))


def level_meshes(geometry: str, levels, a: float = 1.0, b: float = 1.0, jitter: float = 0.0,
                 seed: int = 0, amplitude: float = 0.3):
    """Meshes for ``levels``: resolution (or segment count) 2**level.

    Flat tori and circles are refined by midpoint subdivision from the
    coarsest level; the conformal torus is regenerated per level.
    """
    levels = sorted(levels)
    if geometry == "conformal":
        return [conformal_torus(2 ** L, amplitude) for L in levels]
    if geometry == "torus":
        mesh = flat_torus(a, b, 2 ** levels[0], jitter, seed)
    elif geometry == "circle":
        mesh = circle(2 ** levels[0], length=a)
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    out = [mesh]
    for prev, L in zip(levels, levels[1:]):
        for _ in range(L - prev):
            mesh = subdivide_mesh(mesh)
        out.append(mesh)
    return out


def default_forms(experiment: str, geometry: str, a: float = 1.0, b: float = 1.0) -> list:
    if geometry == "circle":
        return {"identity": [F.circle_sin()], "star": [F.circle_dt()],
                "wedge": [F.circle_sin(), F.constant_form(1.0, 1, 0)],
                "assoc": [F.constant_form(1.0, 1, 0)] * 2 + [F.circle_sin()],
                "periods": []}[experiment]
    return {"identity": [F.x_dx(a)],
            "star": [F.torus_one_form(a, b)],
            "wedge": [F.torus_one_form(a, b), F.torus_one_form2(a, b)],
            "assoc": [F.torus_function(a, b), F.torus_function2(a, b), F.torus_one_form(a, b)],
            "periods": []}[experiment]


@dataclass
class ConvergenceReport:
    experiment: str
    geometry: str
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def etas(self) -> np.ndarray:
        return np.array([r["eta"] for r in self.records])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r["error"] for r in self.records])

    @property
    def slope(self) -> float:
        if len(self.records) < 3:
            return float("nan")
        return fit_slope(self.etas, self.errors)

    def rows(self) -> list[list]:
        return [[r[c] for c in COLUMNS] for r in self.records]

    def summary(self) -> dict:
        return {"experiment": self.experiment, "geometry": self.geometry, "config": self.config,
                "levels": len(self.records), "slope": self.slope,
                "final_error": float(self.errors[-1]) if self.records else None,
                "records": self.records}


def _level_error(experiment: str, mesh: Mesh, forms: list, ctx: HodgeContext, order: int,
                 oracle) -> float:
    cx, real = mesh.complex, mesh.realization
    if experiment == "identity":
        (w,) = forms
        return l2_error(w, de_rham(w, cx, real, order), mesh, order)
    if experiment == "star":
        (w,) = forms
        c = de_rham(w, cx, real, order)
        sc = Cochain(cx.dim - w.degree, ctx.star(w.degree) @ c.values)
        return l2_error(F.flat_star(w), sc, mesh, order)
    if experiment == "wedge":
        w1, w2 = forms
        prod = cup_cochains(de_rham(w1, cx, real, order), de_rham(w2, cx, real, order), cx)
        return l2_error(F.wedge_forms(w1, w2), prod, mesh, order)
    if experiment == "assoc":
        a, b, c = (de_rham(w, cx, real, order) for w in forms)
        diff = cup_cochains(cup_cochains(a, b, cx), c, cx) - cup_cochains(a, cup_cochains(b, c, cx), cx)
        return ctx.mass(diff.degree).norm(diff.values)
    if experiment == "periods":
        hb = HomologyBasis.from_cycles(mesh.cycles, cx)
        return float(np.abs(period_matrix(ctx, hb).matrix - oracle).max())
    raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")


def run_convergence(experiment: str, levels, geometry: str = "torus", forms: list | None = None,
                    a: float = 1.0, b: float = 1.0, jitter: float = 0.0, seed: int = 0,
                    order: int = 6, diagnostics: bool | None = None, amplitude: float = 0.3
                    ) -> ConvergenceReport:
    """Run one experiment over a refinement sequence.

    ``levels`` are exponents: level L has resolution (or segment count) 2**L.
    ``diagnostics`` toggles the lambda and star-squared columns (default: on
    for the star and periods experiments).
    """
    levels = sorted(set(int(L) for L in levels))
    if len(levels) < 2:
        raise ValueError("a convergence study needs at least 2 levels")
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    if geometry == "conformal" and experiment != "periods":
        raise ValueError("the conformal torus has no flat charts; only 'periods' is supported")
    if geometry == "circle" and experiment == "periods":
        raise ValueError("periods need a surface")
    forms = forms if forms is not None else default_forms(experiment, geometry, a, b)
    oracle = 1j if geometry == "conformal" else 1j * b / a
    if diagnostics is None:
        diagnostics = experiment in ("star", "periods")
    report = ConvergenceReport(experiment, geometry, config={
        "levels": levels, "a": a, "b": b, "jitter": jitter, "seed": seed, "order": order})
    for L, mesh in zip(levels, level_meshes(geometry, levels, a, b, jitter, seed, amplitude)):
        ctx = HodgeContext(mesh.complex, mesh.realization)
        eta, theta = mesh_and_fullness(mesh.complex, mesh.realization)
        err = _level_error(experiment, mesh, forms, ctx, order, oracle)
        lam = s2 = float("nan")
        if diagnostics:
            s2 = star2_residual(ctx, 1 if mesh.complex.dim == 2 else 0)
            if mesh.complex.dim == 2:
                lam = lambda_deviation(ctx)
        report.records.append({"level": L, "eta": eta, "fullness": theta, "error": err,
                               "slope_so_far": float("nan"), "lambda_dev": lam,
                               "star2_residual": s2})
        if len(report.records) >= 3:
            report.records[-1]["slope_so_far"] = report.slope
    etas = report.etas
    if np.any(np.diff(etas) >= 0):
        raise RuntimeError("mesh size did not decrease across levels")
    return report


def associativity_defect(forms: list, meshes: list, order: int = 6) -> list[tuple]:
    """(eta, |(Ra ∪ Rb) ∪ Rc - Ra ∪ (Rb ∪ Rc)|) per mesh."""
    out = []
    for mesh in meshes:
        ctx = HodgeContext(mesh.complex, mesh.realization)
        eta, _ = mesh_and_fullness(mesh.complex, mesh.realization)
        out.append((eta, _level_error("assoc", mesh, forms, ctx, order, None)))
    return out


def slope_is_defined(report: ConvergenceReport) -> bool:
    return not math.isnan(report.slope)
