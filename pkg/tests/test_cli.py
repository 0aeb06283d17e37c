import json

import pytest

from friedlab.cli import main
from friedlab.lattice_data import dumps, save_classes, synthesize_classes


@pytest.fixture()
def classes_file(tmp_path):
    path = tmp_path / "c.json"
    save_classes(synthesize_classes(seed=7, count=50), path)
    return path


def test_verify_all_passes(capsys):
    assert main(["verify-all", "--preset", "sl2c"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    # the literal Harish-Chandra comparison is reported but does not gate the exit code
    assert "info hc_casimir_literal" in out


def test_verify_all_corrupt(capsys):
    assert main(["verify-all", "--preset", "sl2c", "--corrupt", "theta"]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("kind", ["structure_constant", "negate_B", "torus"])
def test_model_validate_corrupt(kind, capsys):
    assert main(["model", "validate", "sl2c", "--corrupt", kind]) == 1


def test_bad_rep_is_usage_error(capsys):
    assert main(["rep", "info", "--rep", "9,x"]) == 2
    cap = capsys.readouterr()
    assert "usage error" in cap.err + cap.out


def test_unknown_command(capsys):
    assert main(["bogus"]) == 2


def test_missing_file(tmp_path, capsys):
    assert main(["zeta", "ruelle", "--classes", str(tmp_path / "nope.json")]) == 3


def test_factor_check_json(classes_file, capsys):
    assert main(["zeta", "factor-check", "--classes", str(classes_file), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["exit_code"] == 0
    (check,) = doc["checks"]
    assert check["name"] == "factorization" and check["residual"] <= 1e-10


def test_json_deterministic(classes_file, capsys):
    args = ["zeta", "conj-check", "--classes", str(classes_file), "--json"]
    main(args)
    a = json.loads(capsys.readouterr().out)
    main(args)
    b = json.loads(capsys.readouterr().out)
    for doc in (a, b):
        for c in doc["checks"]:
            c.pop("elapsed")
    assert a == b


def test_empty_classes(tmp_path, capsys):
    path = tmp_path / "e.json"
    path.write_text(dumps(synthesize_classes(seed=1, count=0)))
    assert main(["zeta", "factor-check", "--classes", str(path), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["data"]["log_ruelle"] == []


def test_elliptic_record_listed(tmp_path, capsys):
    doc = json.loads(dumps(synthesize_classes(seed=1, count=3)))
    doc["records"][1]["a_part"] = [0.0]
    path = tmp_path / "ell.json"
    path.write_text(json.dumps(doc))
    assert main(["zeta", "factor-check", "--classes", str(path)]) == 1
    out = capsys.readouterr().out
    assert doc["records"][1]["id"] in out


def test_lattice_synth_round_trip(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["lattice", "synth", "--count", "10", "--seed", "3", "--out-file", str(out)]) == 0
    assert out.read_text() == dumps(synthesize_classes(seed=3, count=10))
    assert main(["lattice", "validate", "--classes", str(out)]) == 0


def test_lattice_enumerate_diag(capsys):
    assert main(["lattice", "enumerate", "--gens", "diag2", "--max-len", "5", "--json"]) == 0
