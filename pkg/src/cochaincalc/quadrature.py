"""Quadrature rules on the reference simplex in barycentric coordinates."""
from __future__ import annotations

from functools import lru_cache
from math import ceil

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi


@lru_cache(maxsize=None)
def simplex_quadrature(n: int, degree: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed-product Gauss rule on the n-simplex, exact to ``degree``.

    Returns barycentric points, shape (m, n+1), and weights summing to one
    (i.e. fractions of the simplex volume).
    """
    if degree < 1:
        raise ValueError("quadrature order must be at least 1")
    if n == 0:
        return np.ones((1, 1)), np.ones(1)
    q = max(1, ceil((degree + 1) / 2))
    if n == 1:
        x, w = leggauss(q)
        t = (x + 1) / 2
        return np.stack([1 - t, t], axis=1), w / w.sum()
    if n == 2:
        xu, wu = roots_jacobi(q, 1.0, 0.0)
        xv, wv = leggauss(q)
        u = (xu + 1) / 2
        v = (xv + 1) / 2
        uu, vv = np.meshgrid(u, v, indexing="ij")
        ww = np.outer(wu, wv)
        s1 = uu.ravel()
        s2 = (vv * (1 - uu)).ravel()
        w = ww.ravel()
        pts = np.stack([1 - s1 - s2, s1, s2], axis=1)
        return pts, w / w.sum()
    raise NotImplementedError("quadrature implemented for n <= 2")
