import io
import json
from fractions import Fraction

import pytest

from sparseres.arith import MultiPoly
from sparseres.cli import load_system, main
from sparseres.geometry import Polytope
from sparseres.subdivision import mixed_subdivision

from conftest import BILINEAR_LIFTING, DATA, genres_resultant


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_analyze_three_polynomials(capsys):
    out = run_json(capsys, "analyze", DATA / "three_polys.json")
    assert out["essential"] == [[1, 2]] and out["codim"] == 1


def test_mixedvol(capsys):
    out = run_json(capsys, "mixedvol", DATA / "bilinear.json")
    assert out["mixed_volumes"] == [2, 2, 2]


def test_resultant_genres(capsys):
    out = run_json(capsys, "resultant", DATA / "genres.json")
    assert MultiPoly.from_json(out["resultant"]) == genres_resultant()
    assert len(out["resultant"]["terms"]) == 4


def test_resultant_specialized(capsys, tmp_path):
    data = json.loads((DATA / "genres.json").read_text())
    data["coefficients"] = [["3", "-1", "2"], ["5", "1/2"]]
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(data))
    out = run_json(capsys, "resultant", path, "--mode", "specialized")
    expected = genres_resultant().evaluate([3, -1, 2, 5, Fraction(1, 2)])
    assert Fraction(out["value"]) == expected
    mod = run_json(capsys, "resultant", path, "--mode", "specialized", "--prime", "101")
    assert int(mod["value"]) == expected.numerator * pow(expected.denominator, -1, 101) % 101


def test_respoly_ures_triangle(capsys):
    out = run_json(capsys, "respoly", DATA / "ures.json", "--project", "0,1,2")
    assert sorted(map(tuple, out["vertices"])) == [(0, 0, 2), (0, 2, 0), (2, 0, 0)]
    assert out["coordinates"] == ["u0", "u1", "u2"]


def test_respoly_stats_and_names(capsys):
    out = run_json(capsys, "respoly", DATA / "genres.json", "--emit", "stats")
    assert out["vertices"] == 3 and out["within_bound"]
    free = run_json(capsys, "respoly", DATA / "buchberger.json", "--project", "free")
    assert free["coordinates"] == ["y1", "y2", "y3"]
    assert sorted(map(tuple, free["vertices"])) == [(0, 2, 1), (4, 0, 0)]
    named = run_json(capsys, "respoly", DATA / "ures.json", "--project", "u0,u1,u2")
    assert sorted(map(tuple, named["vertices"])) == [(0, 0, 2), (0, 2, 0), (2, 0, 0)]


def test_interp_through_polytope_file(capsys, tmp_path):
    hrep = run_json(capsys, "respoly", DATA / "ures.json", "--project", "free", "--emit", "triangulation")
    path = tmp_path / "pi.json"
    path.write_text(json.dumps({"vertices": hrep["vertices"]}))
    out = run_json(capsys, "interp", DATA / "ures.json", "--project", "free", "--polytope", path)
    assert out["method"] == "values"
    assert out["text"] == "2*u0^2 + 4*u0*u1 - 4*u0*u2 - 8*u1*u2"
    kern = run_json(capsys, "interp", DATA / "buchberger.json", "--project", "free")
    assert kern["method"] == "kernel" and kern["text"] == "y1^4 - y2^2*y3"


def test_ce_matrix_and_subdivision(capsys):
    out = run_json(capsys, "ce-matrix", DATA / "bilinear.json", "--greedy")
    assert out["size"] == len(out["rows"]) == len(out["H"])
    lifting = ",".join(map(str, BILINEAR_LIFTING))
    sub = run_json(capsys, "subdivision", DATA / "bilinear.json", "--lifting", lifting)
    assert len(sub["cells"]) == 9 and sub["mixed_volumes"] == ["2", "2", "2"]
    A, _ = load_system(str(DATA / "bilinear.json"))
    assert sub == json.loads(json.dumps(mixed_subdivision(A, BILINEAR_LIFTING).to_json()
                                        | {"mixed_volumes": ["2", "2", "2"]}))


def test_koszul(capsys):
    out = run_json(capsys, "koszul", DATA / "bilinear.json", "--delta", "1/4,1/4")
    assert out["dims"][0] == 9 and out["exact"] is True
    assert out["determinant"] != "0"


def test_exit_code_for_failed_hypothesis(capsys):
    code, _, err = run(capsys, "ce-matrix", DATA / "three_polys.json")
    assert code == 2 and "EssentialProper" in err


def test_schema_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "supports": [[[0], ["x"]], [[0], [1]]]}))
    code, _, err = run(capsys, "analyze", bad)
    assert code == 1 and "/supports/0/1/0" in err
    bad.write_text(json.dumps({"n": 2, "supports": [[[0], [1]], [[0], [1]]]}))
    code, _, err = run(capsys, "analyze", bad)
    assert code == 1
    bad.write_text("{not json")
    assert run(capsys, "analyze", bad)[0] == 1
    assert run(capsys, "respoly", DATA / "genres.json", "--project", "zz")[0] == 1


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO((DATA / "genres.json").read_text()))
    out = run_json(capsys, "mixedvol", "-")
    assert out["mixed_volumes"] == [2, 2]


@pytest.mark.parametrize("cmd", [["respoly", "--emit", "hrep"], ["ce-matrix"], ["koszul"],
                                 ["subdivision"], ["resultant", "--greedy"]])
def test_same_seed_same_bytes(capsys, cmd):
    argv = [cmd[0], DATA / "bilinear.json", "--seed", "5"] + cmd[1:]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]


def test_respoly_round_trip(capsys):
    out = run_json(capsys, "respoly", DATA / "genres.json", "--emit", "hrep")
    facets = run_json(capsys, "respoly", DATA / "genres.json")
    P = Polytope.from_json({"vertices": facets["vertices"], "facets": out["facets"],
                            "equations": out["equations"], "dim": out["dim"]})
    assert P == Polytope.from_json({"vertices": facets["vertices"]})


def test_plot(capsys, tmp_path):
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"vertices": [[0, 0], [2, 0], [0, 2]]}))
    code, out, _ = run(capsys, "plot", tri)
    assert code == 0 and out.startswith("<svg") and out.count("<circle") == 3
    cube = tmp_path / "cube.json"
    cube.write_text(json.dumps({"vertices": [[a, b, c] for a in (0, 1) for b in (0, 1) for c in (0, 1)]}))
    code, out, _ = run(capsys, "plot", cube)
    lines = out.splitlines()
    assert code == 0
    assert sum(line.startswith("v ") for line in lines) == 8
    assert sum(line.startswith("f ") for line in lines) == 6
