import math

import numpy as np
import pytest

from cochaincalc import HodgeContext, circle, flat_torus
from cochaincalc.convergence import (COLUMNS, fit_slope, l2_error, level_meshes,
                                     run_convergence, star2_residual)
from cochaincalc.forms import (constant_form, flat_star, forms_by_name, torus_one_form,
                               wedge_forms)
from cochaincalc.whitney import de_rham


def test_fit_slope_power_law():
    etas = 2.0 ** -np.arange(5)
    assert fit_slope(etas, 3 * etas**2) == pytest.approx(2.0)
    assert fit_slope(etas, 3 * etas**2, discard_coarsest=False) == pytest.approx(2.0)


def test_fit_slope_needs_two_points():
    assert math.isnan(fit_slope([1.0, 0.5], [1.0, 0.25]))
    assert math.isnan(fit_slope([1.0, 0.5, 0.25], [1.0, 0.0, 0.0]))


def test_needs_two_levels():
    with pytest.raises(ValueError):
        run_convergence("identity", [3])


@pytest.mark.parametrize("experiment, geometry", [("nope", "torus"), ("star", "conformal"),
                                                  ("periods", "circle")])
def test_invalid_combinations(experiment, geometry):
    with pytest.raises(ValueError):
        run_convergence(experiment, [2, 3], geometry)


def test_level_meshes_halve_eta():
    meshes = level_meshes("torus", [2, 3, 4])
    assert [m.complex.count(2) for m in meshes] == [32, 128, 512]
    with pytest.raises(ValueError):
        level_meshes("sphere", [1, 2])


def test_l2_error_of_constant_field():
    mesh = flat_torus(2.0, 1.0, res=3)
    one = constant_form(1.0, 2, 0)
    assert l2_error(one, None, mesh) == pytest.approx(math.sqrt(2.0))
    c = de_rham(one, mesh.complex, mesh.realization)
    assert l2_error(one, c, mesh) < 1e-14


def test_flat_star_and_wedge_forms():
    w = torus_one_form()
    x = np.array([[0.1, 0.7]])
    p, q = w(x)[0]
    assert np.allclose(flat_star(w)(x)[0], [-q, p])
    assert wedge_forms(w, w)(x)[0, 0] == pytest.approx(0.0)
    with pytest.raises(KeyError):
        forms_by_name("zeta")


def test_circle_star_is_exact():
    rep = run_convergence("star", [3, 5], "circle")
    assert rep.errors.max() < 1e-12


def test_circle_star_squared_is_plus_identity():
    mesh = circle(8)
    ctx = HodgeContext(mesh.complex, mesh.realization)
    assert star2_residual(ctx, 0) < 1e-12
    # the harmonic 0-cochain is the constant; star twice returns it with sign +1
    h = ctx.harmonic_basis(0)[:, 0]
    assert np.allclose(ctx.star(1) @ (ctx.star(0) @ h), h)


def test_identity_first_order_on_torus():
    rep = run_convergence("identity", [2, 3, 4, 5])
    assert 0.8 < rep.slope < 1.3
    assert rep.rows()[0][COLUMNS.index("level")] == 2
    assert np.all(np.diff(rep.errors) < 0)


def test_conformal_periods_converge():
    rep = run_convergence("periods", [2, 3, 4], "conformal")
    assert np.all(np.diff(rep.errors) < 0)
    assert rep.errors[-1] < 2e-3


def test_summary_is_complete():
    rep = run_convergence("wedge", [2, 3, 4])
    summary = rep.summary()
    assert summary["levels"] == 3
    assert set(summary["records"][0]) == set(COLUMNS)
    assert summary["final_error"] == rep.errors[-1]
