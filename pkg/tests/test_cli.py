import json

import pytest

from nondivhom.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gallery_list(capsys):
    code, out, _ = _run(capsys, "gallery")
    assert code == 0
    assert "st_2d" in out.split()


def test_gallery_export_json_is_deterministic(capsys):
    _, a, _ = _run(capsys, "gallery", "st_2d")
    _, b, _ = _run(capsys, "gallery", "st_2d")
    assert a == b
    assert json.loads(a)["name"] == "st_2d"


def test_unknown_gallery_exits_one(capsys):
    code, _, err = _run(capsys, "classify", "--gallery", "nope")
    assert code == 1 and "nope" in err


@pytest.mark.parametrize("N", ["8", "1024", "abc"])
def test_resolution_bounds(capsys, N):
    with pytest.raises(SystemExit) as info:
        main(["tensor", "--gallery", "st_2d", "--resolution", N])
    assert info.value.code == 1


def test_source_is_required_and_exclusive(capsys):
    with pytest.raises(SystemExit) as info:
        main(["classify"])
    assert info.value.code == 1
    with pytest.raises(SystemExit):
        main(["classify", "--gallery", "st_2d", "--input", "x.json"])


def test_classify_table(capsys):
    code, out, _ = _run(capsys, "classify", "--gallery", "st_2d", "--resolution", "32",
                        "--format", "table")
    assert code == 0
    assert out.startswith("verdict     TypeEps")
    assert "c_1^11 = -2.4867959858e-03" in out


def test_classify_unresolved_exit_code(capsys):
    # a tolerance far below roundoff makes the gap test fail
    code, out, _ = _run(capsys, "classify", "--gallery", "separable_diag", "--resolution",
                        "16", "--tolerance", "1e-30")
    assert code == 2
    assert json.loads(out)["verdict"] == "Unresolved"


def test_tensor_csv_and_output_file(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = _run(capsys, "tensor", "--gallery", "st_2d", "--resolution", "32",
                        "--format", "csv", "--output", str(path))
    assert code == 0 and out == ""
    lines = path.read_text().splitlines()
    assert lines[0] == "j,k,l,c" and len(lines) == 7


def test_input_file(capsys, tmp_path):
    spec = {"dimension": 2, "entries": {"11": "2 + sin(2*pi*y1)*cos(2*pi*y2)", "22": 1.0}}
    path = tmp_path / "a.json"
    path.write_text(json.dumps(spec))
    code, out, _ = _run(capsys, "invariant", "--input", str(path), "--resolution", "16")
    assert code == 0
    assert json.loads(out)["mean"] == pytest.approx(1.0)


def test_missing_input_file(capsys, tmp_path):
    code, _, err = _run(capsys, "tensor", "--input", str(tmp_path / "none.json"))
    assert code == 1 and err.startswith("error:")


def test_verify_echoes_seed(capsys):
    code, out, _ = _run(capsys, "verify", "thm11", "--trials", "2", "--seed", "17")
    assert code == 0
    d = json.loads(out)
    assert d["seed"] == 17 and d["passed"]


def test_verify_table(capsys):
    code, out, _ = _run(capsys, "verify", "lemma32", "--format", "table")
    assert code == 0 and out.startswith("lemma32: PASS")


def test_rate_constant_preset(capsys):
    code, out, err = _run(capsys, "rate", "--preset", "constant_2d", "--interior")
    assert code == 0
    assert out.splitlines()[0] == "epsilon,error_u,error_z"
    assert "Degenerate" in err


def test_rate_input_spec(capsys, tmp_path):
    spec = {"field": {"dimension": 2, "entries": {"11": 1.0, "22": 2.0}}, "f": "1",
            "g": "0", "epsilons": [0.25, 0.2, 1 / 6, 0.125], "resolution": 16}
    path = tmp_path / "r.json"
    path.write_text(json.dumps(spec))
    code, out, _ = _run(capsys, "rate", "--input", str(path), "--format", "json")
    assert code == 0
    assert json.loads(out)["flags"] == ["Degenerate"]
