import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cochaincalc import (ComplexError, OrientationError, basis_cochain, betti_numbers,
                         boundary_matrix, build_complex, circle, coboundary_matrix, flat_torus,
                         fundamental_class, interval, mesh_and_fullness, subdivide_mesh)
from cochaincalc.complex import permutation_sign
from cochaincalc.geometry import GeometricRealization

# minimal 6-vertex real projective plane
RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
       (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
TETRA_BOUNDARY = list(itertools.combinations(range(4), 3))


def parity_by_cycles(perm):
    """Sign from the cycle decomposition: (-1)^(n - #cycles)."""
    order = sorted(range(len(perm)), key=lambda i: perm[i])
    seen, cycles = set(), 0
    for i in range(len(order)):
        if i not in seen:
            cycles += 1
            while i not in seen:
                seen.add(i)
                i = order[i]
    return (-1) ** (len(perm) - cycles)


@given(st.permutations(list(range(6))))
def test_permutation_sign_matches_cycle_parity(p):
    assert permutation_sign(p) == parity_by_cycles(p)


def test_permutation_sign_repeats_is_zero():
    assert permutation_sign([1, 2, 1]) == 0


def test_face_counts_of_triangle():
    cx = build_complex([(2, 0, 1)])
    assert cx.shape == (3, 3, 1)
    assert cx.simplices[2].tolist() == [[0, 1, 2]]
    assert cx.simplices[1].tolist() == [[0, 1], [0, 2], [1, 2]]


def test_boundary_of_triangle():
    cx = build_complex([(0, 1, 2)])
    bd = boundary_matrix(cx, 2).toarray().ravel()
    # d[0,1,2] = [1,2] - [0,2] + [0,1]
    expected = np.zeros(3)
    expected[cx.index((1, 2))] = 1
    expected[cx.index((0, 2))] = -1
    expected[cx.index((0, 1))] = 1
    assert np.array_equal(bd, expected)


@pytest.mark.parametrize("tops", [TETRA_BOUNDARY, RP2, [(0, 1, 2, 3), (1, 2, 3, 4)]])
def test_boundary_squares_to_zero(tops):
    cx = build_complex(tops)
    for j in range(2, cx.dim + 1):
        assert not np.any((boundary_matrix(cx, j - 1) @ boundary_matrix(cx, j)).toarray())


def test_coboundary_is_transpose():
    cx = flat_torus(res=3).complex
    assert np.array_equal(coboundary_matrix(cx, 0).toarray(), boundary_matrix(cx, 1).toarray().T)


def test_boundary_degree_out_of_range():
    with pytest.raises(ValueError):
        boundary_matrix(build_complex([(0, 1)]), 2)


@pytest.mark.parametrize("tops, betti", [
    (TETRA_BOUNDARY, [1, 0, 1]),
    ([(i, (i + 1) % 5) for i in range(5)], [1, 1]),
    ([(0, 1), (1, 2)], [1, 0]),
])
def test_betti_numbers(tops, betti):
    assert betti_numbers(build_complex(tops)) == betti


def test_torus_betti_and_euler():
    cx = flat_torus(res=4).complex
    assert betti_numbers(cx) == [1, 2, 1]
    assert cx.shape[0] - cx.shape[1] + cx.shape[2] == 0


def test_subdivision_preserves_betti():
    mesh = flat_torus(res=3)
    fine = subdivide_mesh(mesh)
    assert fine.complex.count(2) == 4 * mesh.complex.count(2)
    assert betti_numbers(fine.complex) == betti_numbers(mesh.complex)


@pytest.mark.parametrize("bad", [[], [(0, 1), (0, 1, 2)], [(0, 0, 1)], [(0, 1, 2), (2, 1, 0)],
                                 [(-1, 0)]])
def test_build_complex_rejects(bad):
    with pytest.raises(ComplexError):
        build_complex(bad)


def test_index_and_oriented():
    cx = build_complex([(0, 1, 2)])
    assert cx.oriented((2, 0)) == (cx.index((0, 2)), -1)
    assert cx.find((0, 5)) is None
    with pytest.raises(KeyError):
        cx.index((0, 5))


def test_basis_cochain_sign():
    cx = build_complex([(0, 1, 2)])
    c = basis_cochain(cx, 1, (1, 0))
    assert c.values[cx.index((0, 1))] == -1
    assert c.values.sum() == -1


def test_fundamental_class_is_a_cycle():
    for cx in (flat_torus(res=4).complex, build_complex(TETRA_BOUNDARY), circle(7).complex):
        fc = fundamental_class(cx)
        assert not np.any(boundary_matrix(cx, cx.dim) @ fc.as_chain())
        assert fc.signs[0] == 1


def test_fundamental_class_seed_flips_nothing_but_the_reference():
    cx = build_complex(TETRA_BOUNDARY)
    a, b = fundamental_class(cx, 0), fundamental_class(cx, 2)
    assert np.array_equal(a.signs * a.signs[2], b.signs)


def test_nonorientable_raises():
    cx = build_complex(RP2)
    assert cx.is_closed_manifold
    with pytest.raises(OrientationError, match="orientable"):
        fundamental_class(cx)


def test_open_complex_has_no_fundamental_class():
    with pytest.raises(OrientationError):
        fundamental_class(interval(3).complex)


def test_mesh_size_and_fullness():
    assert mesh_and_fullness(*_mesh_parts(circle(4)))[1] == pytest.approx(1.0)
    assert mesh_and_fullness(*_mesh_parts(interval(1)))[0] == pytest.approx(1.0)
    cx = build_complex([(0, 1, 2)])
    real = GeometricRealization.from_vertex_coords(cx, [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    eta, theta = mesh_and_fullness(cx, real)
    assert eta == pytest.approx(1.0)
    assert theta == pytest.approx(math.sqrt(3) / 4)


def _mesh_parts(mesh):
    return mesh.complex, mesh.realization
