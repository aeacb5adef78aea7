from fractions import Fraction

import numpy as np
import pytest

from cochaincalc import HodgeContext, circle
from cochaincalc.circle_oracle import (analytic_mass_matrix, analytic_star, crosscheck,
                                       inverse_vertex_mass_terms, series_length, walk_count)
from cochaincalc.hodge import neumann_terms


def cyclic_adjacency(n):
    D = np.zeros((n, n))
    for i in range(n):
        D[i, (i + 1) % n] = D[i, (i - 1) % n] = 1
    return D


def dense_edge_star(n, i):
    """B^{-1} applied to the pairing column of edge i, which is 1/2 at both endpoints."""
    B = analytic_mass_matrix(n)[0].astype(float)
    rhs = np.zeros(n)
    rhs[i] += 0.5
    rhs[(i + 1) % n] += 0.5
    return np.linalg.solve(B, rhs)


@pytest.mark.parametrize("n", [0, 2])
def test_small_n_rejected(n):
    with pytest.raises(ValueError):
        analytic_mass_matrix(n)
    with pytest.raises(ValueError):
        crosscheck(n)


@pytest.mark.parametrize("n", [3, 8, 31])
def test_vertex_mass_rows(n):
    B = analytic_mass_matrix(n)[0]
    assert all(sum(row) == Fraction(1, n) for row in B)
    assert np.all(analytic_mass_matrix(n)[1] == n * np.eye(n, dtype=int))


@pytest.mark.parametrize("n, k", [(5, 0), (5, 3), (6, 7), (9, 12)])
def test_walk_count_is_matrix_power(n, k):
    Dk = np.linalg.matrix_power(cyclic_adjacency(n), k)
    for i in range(n):
        for j in range(n):
            assert walk_count(n, k, i, j) == Dk[i, j]


def test_vertex_star_n10():
    s = analytic_star(10, ("vertex", 0))
    expected = [Fraction(1, 20), *[Fraction(0)] * 8, Fraction(1, 20)]
    assert list(s) == expected


@pytest.mark.parametrize("n", [10, 20, 51])
def test_edge_star_matches_dense_solve(n):
    for i in (0, n // 2):
        assert np.allclose(analytic_star(n, ("edge", i)), dense_edge_star(n, i), atol=1e-11)


def test_edge_star_profile_n20():
    s = dense_edge_star(20, 10)
    # symmetric about the edge and alternating in sign away from it
    assert s[10] == pytest.approx(s[11])
    assert np.all(np.sign([s[11 + k] for k in range(5)]) == [1, -1, 1, -1, 1])
    assert s[10] == pytest.approx(12.67949, abs=1e-5)


def test_edge_star_n50_value():
    assert analytic_star(50, ("edge", 0))[0] == pytest.approx(31.698729, abs=1e-4)


def test_unknown_target():
    with pytest.raises(ValueError):
        analytic_star(5, ("face", 0))


def test_series_length_tail_bound():
    K = series_length(40, 1e-12)
    assert 2.0 ** (1 - K) * 60 < 1e-12 <= 2.0 ** (2 - K) * 60


def test_inverse_terms_match_generic_series():
    n = 9
    mesh = circle(n)
    ctx = HodgeContext(mesh.complex, mesh.realization)
    generic = neumann_terms(ctx.mass(0), 6)
    for a, b in zip(inverse_vertex_mass_terms(n, 6), generic):
        assert np.allclose(a, b, atol=1e-12)


def test_crosscheck_passes():
    rep = crosscheck(24)
    assert rep.exact_mass_match
    assert rep.passed()
