"""Smooth test forms with closed-form star and wedge on flat charts.

A form of degree j in d coordinates maps points of shape (m, d) to
components of shape (m, C(d, j)), ordered like ``combinations(range(d), j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

TAU = 2 * np.pi


@dataclass(frozen=True)
class DifferentialForm:
    degree: int
    dim: int
    func: Callable
    name: str = ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        out = np.asarray(self.func(x), dtype=float)
        return out.reshape(len(x), math.comb(self.dim, self.degree))


def constant_form(value: float = 1.0, dim: int = 2, degree: int = 0) -> DifferentialForm:
    k = math.comb(dim, degree)
    vec = np.atleast_1d(np.asarray(value, dtype=float))
    vec = np.broadcast_to(vec, (k,))
    return DifferentialForm(degree, dim, lambda x: np.tile(vec, (len(x), 1)), f"const{degree}")


def flat_star(form: DifferentialForm) -> DifferentialForm:
    """Hodge star in orthonormal flat coordinates (d = 1 or 2)."""
    d, j, f = form.dim, form.degree, form
    if d == 1:
        return DifferentialForm(1 - j, 1, lambda x: f(x), f"*{f.name}")
    if d != 2:
        raise NotImplementedError("flat star implemented for d <= 2")
    if j == 1:
        def g(x):
            pq = f(x)
            return np.stack([-pq[:, 1], pq[:, 0]], axis=1)
        return DifferentialForm(1, 2, g, f"*{f.name}")
    return DifferentialForm(2 - j, 2, lambda x: f(x), f"*{f.name}")


def wedge_forms(f: DifferentialForm, g: DifferentialForm) -> DifferentialForm:
    """Pointwise wedge product (d <= 2)."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    d, j, k = f.dim, f.degree, g.degree
    if j + k > d:
        return constant_form(0.0, d, 0)
    if j == 0 or k == 0:
        return DifferentialForm(j + k, d, lambda x: f(x) * g(x), f"{f.name}^{g.name}")

    def h(x):  # two 1-forms in the plane
        a, b = f(x), g(x)
        return (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])[:, None]
    return DifferentialForm(2, 2, h, f"{f.name}^{g.name}")


def pointwise_norm_sq(values: np.ndarray) -> np.ndarray:
    """Squared norm of components in an orthonormal coordinate basis."""
    return np.sum(np.abs(values) ** 2, axis=-1)


# -- the trigonometric library on the a x b torus ---------------------------------

def torus_function(a: float = 1.0, b: float = 1.0) -> DifferentialForm:
    """f = sin(2 pi x / a) cos(2 pi y / b) + 0.5 cos(2 pi x / a)."""
    return DifferentialForm(0, 2, lambda x: np.sin(TAU * x[:, 0] / a) * np.cos(TAU * x[:, 1] / b)
                            + 0.5 * np.cos(TAU * x[:, 0] / a), "f")


def torus_function2(a: float = 1.0, b: float = 1.0) -> DifferentialForm:
    """g = cos(2 pi y / b) + 0.3 sin(2 pi (x / a + y / b))."""
    return DifferentialForm(0, 2, lambda x: np.cos(TAU * x[:, 1] / b)
                            + 0.3 * np.sin(TAU * (x[:, 0] / a + x[:, 1] / b)), "g")


def torus_one_form(a: float = 1.0, b: float = 1.0) -> DifferentialForm:
    """sin(2 pi x / a) dx + cos(2 pi (x / a + y / b)) dy."""
    def f(x):
        return np.stack([np.sin(TAU * x[:, 0] / a),
                         np.cos(TAU * (x[:, 0] / a + x[:, 1] / b))], axis=1)
    return DifferentialForm(1, 2, f, "w")


def torus_one_form2(a: float = 1.0, b: float = 1.0) -> DifferentialForm:
    """cos(2 pi y / b) dx + sin(2 pi x / a) sin(2 pi y / b) dy."""
    def f(x):
        return np.stack([np.cos(TAU * x[:, 1] / b),
                         np.sin(TAU * x[:, 0] / a) * np.sin(TAU * x[:, 1] / b)], axis=1)
    return DifferentialForm(1, 2, f, "v")


def x_dx(a: float = 1.0) -> DifferentialForm:
    """sin(2 pi x / a) dx, the identity-experiment form."""
    return DifferentialForm(1, 2, lambda x: np.stack([np.sin(TAU * x[:, 0] / a),
                                                      np.zeros(len(x))], axis=1), "sin(x)dx")


def circle_dt() -> DifferentialForm:
    return DifferentialForm(1, 1, lambda x: np.ones((len(x), 1)), "dt")


def circle_sin(k: int = 1) -> DifferentialForm:
    """sin(2 pi k t) dt on the unit circle."""
    return DifferentialForm(1, 1, lambda x: np.sin(TAU * k * x[:, :1]), f"sin({k}t)dt")


def forms_by_name(name: str, a: float = 1.0, b: float = 1.0) -> DifferentialForm:
    table = {
        "f": lambda: torus_function(a, b),
        "g": lambda: torus_function2(a, b),
        "w": lambda: torus_one_form(a, b),
        "v": lambda: torus_one_form2(a, b),
        "sindx": lambda: x_dx(a),
        "dt": circle_dt,
        "sint": circle_sin,
    }
    if name not in table:
        raise KeyError(f"unknown form {name!r}; choose from {sorted(table)}")
    return table[name]()


def form_components(dim: int, degree: int) -> list[tuple]:
    return list(combinations(range(dim), degree))
