import csv
import json

import numpy as np
import pytest

from cochaincalc import HodgeContext, MeshFormatError, circle, flat_torus, genus2_surface
from cochaincalc.cli import main
from cochaincalc.io import load_mesh, mesh_from_document, mesh_to_document, save_mesh, to_jsonable


def roundtrip(mesh):
    return mesh_from_document(json.loads(json.dumps(mesh_to_document(mesh))))


@pytest.mark.parametrize("mesh", [flat_torus(1.0, 2.0, res=3, jitter=0.2), circle(5),
                                  genus2_surface(4)], ids=["torus", "circle", "genus2"])
def test_mesh_roundtrip(mesh):
    back = roundtrip(mesh)
    assert back.complex.shape == mesh.complex.shape
    assert np.allclose(back.realization.metric, mesh.realization.metric)
    assert set(back.cycles) == set(mesh.cycles)
    for name in mesh.cycles:
        assert np.array_equal(back.cycles[name], mesh.cycles[name])


def test_edge_length_documents():
    mesh = flat_torus(res=3)
    doc = mesh_to_document(mesh)
    cx = mesh.complex
    lengths = np.zeros(cx.count(1))
    lengths[cx.top_faces[1].ravel()] = mesh.realization.local_edge_lengths().ravel()
    doc = {k: v for k, v in doc.items() if k not in ("charts", "vertices")}
    doc["edge_lengths"] = lengths.tolist()
    back = mesh_from_document(doc)
    assert back.realization.coords is None
    assert np.allclose(back.realization.metric, mesh.realization.metric)


def test_cycle_as_vertex_pairs():
    doc = mesh_to_document(circle(4))
    doc["cycles"] = {"a1": [[0, 1], [1, 2], [2, 3], [3, 0]]}
    assert np.array_equal(mesh_from_document(doc).cycles["a1"], circle(4).cycles["a1"])


@pytest.mark.parametrize("patch, field", [
    ({"format": "obj"}, "format"),
    ({"dim": 0}, "dim"),
    ({"simplices": [[0, 1]]}, "simplices[0]"),
    ({"simplices": [[0, 1, 99]]}, "simplices[0]"),
    ({"cycles": {"a1": {"edges": [0], "signs": [2]}}}, "cycles.a1.signs[0]"),
    ({"cycles": {"a1": {"edges": [10**6], "signs": [1]}}}, "cycles.a1.edges[0]"),
    ({"charts": [[[0, 0]]]}, "charts"),
])
def test_schema_errors_name_the_field(patch, field):
    doc = mesh_to_document(flat_torus(res=3))
    doc.update(patch)
    with pytest.raises(MeshFormatError, match=field.replace("[", r"\[").replace("]", r"\]")):
        mesh_from_document(doc)


def test_missing_field():
    with pytest.raises(MeshFormatError, match="simplices"):
        mesh_from_document({"dim": 2})


def test_invalid_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2,\n  "simplices": [}')
    with pytest.raises(MeshFormatError, match="line 2"):
        load_mesh(path)


def test_to_jsonable():
    from fractions import Fraction
    out = to_jsonable({"z": 1 + 2j, "f": Fraction(1, 3), "a": np.arange(2), "n": float("nan")})
    assert out == {"z": {"re": 1.0, "im": 2.0}, "f": "1/3", "a": [0, 1], "n": None}


@pytest.fixture
def torus_file(tmp_path):
    path = tmp_path / "torus.json"
    assert main(["generate", "torus", "--res", "4", "--b", "2", "--out", str(path)]) == 0
    return path


def test_generate_and_star(torus_file, capsys):
    assert main(["star", "--mesh", str(torus_file), "--cochain", "e3"]) == 0
    assert "star" in capsys.readouterr().out


def test_periods_command(torus_file, tmp_path, capsys):
    out = tmp_path / "p.json"
    assert main(["periods", "--mesh", str(torus_file), "--json", str(out)]) == 0
    summary = json.loads(out.read_text())
    assert summary["pass"] is True
    assert summary["period_matrix"][0][0]["im"] == pytest.approx(2.0)


def test_periods_without_cycles_is_input_error(tmp_path, capsys):
    path = tmp_path / "t.json"
    doc = mesh_to_document(flat_torus(res=3))
    doc.pop("cycles")
    path.write_text(json.dumps(doc))
    assert main(["periods", "--mesh", str(path)]) == 2
    assert "cycles" in capsys.readouterr().err


def test_missing_mesh_file(tmp_path):
    assert main(["hodge", "--mesh", str(tmp_path / "nope.json")]) == 2
    assert main(["hodge"]) == 2


def test_bad_arguments():
    assert main(["converge"]) == 2
    assert main(["no-such-command"]) == 2


def test_hodge_command(torus_file):
    assert main(["hodge", "--mesh", str(torus_file), "--degree", "1"]) == 0


def test_cup_command(tmp_path, capsys):
    path = tmp_path / "i.json"
    assert main(["generate", "interval", "--out", str(path)]) == 0
    assert main(["cup", "--mesh", str(path), "--a", "v0", "--b", "v0", "--c", "e0"]) == 0
    out = capsys.readouterr().out
    assert "(1/4)" in out and "(1/2)" in out
    assert main(["cup", "--mesh", str(path), "--a", "x9", "--b", "v0"]) == 2


def test_circle_check_command(capsys):
    assert main(["circle-check", "--n", "12"]) == 0
    assert "max residual" in capsys.readouterr().out


def test_converge_csv(tmp_path):
    path = tmp_path / "c.csv"
    assert main(["converge", "--experiment", "identity", "--levels", "2", "4",
                 "--csv", str(path)]) == 0
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["level", "eta", "fullness", "error", "slope_so_far", "lambda_dev",
                       "star2_residual"]
    assert [r[0] for r in rows[1:]] == ["2", "3", "4"]


def test_output_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        mesh_path = tmp_path / f"m{k}.json"
        main(["generate", "torus", "--res", "3", "--jitter", "0.2", "--seed", "5",
              "--out", str(mesh_path)])
        js = tmp_path / f"p{k}.json"
        main(["periods", "--mesh", str(mesh_path), "--json", str(js)])
        outs.append((mesh_path.read_text(), js.read_text()))
    assert outs[0] == outs[1]


def test_loaded_mesh_gives_same_operators(torus_file):
    mesh = load_mesh(torus_file)
    ref = flat_torus(1.0, 2.0, res=4)
    a = HodgeContext(mesh.complex, mesh.realization).star(1)
    b = HodgeContext(ref.complex, ref.realization).star(1)
    assert np.allclose(a, b)


def test_save_mesh(tmp_path):
    path = tmp_path / "c.json"
    save_mesh(circle(6), path)
    assert load_mesh(path).complex.shape == (6, 6)
