import json

import pytest

from app.cli import main, parse_torus
from app.biquotient.errors import InvalidInputError


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_check_circle_with_oracle(capsys):
    code, out = run(capsys, "check", "circle", "1", "0", "0", "1", "--oracle", "12")
    assert code == 0
    report = json.loads(out.out)
    assert report["verdict"]["status"] == "free"
    assert report["diffeo"] == "S3xS2"
    assert report["w2"] == 0
    assert report["provenance"] == "both"


def test_check_torus(capsys):
    code, out = run(capsys, "check", "torus", "1,1,0,0/0,2,1,1")
    assert code == 0
    report = json.loads(out.out)
    assert report["diffeo"] == "S2xS2"
    assert report["normalized"] == [1, 2, 0, 1]


def test_check_csv(capsys):
    code, out = run(capsys, "check", "circle", "3", "2", "1", "0", "--format", "csv")
    assert code == 0
    header, row = out.out.strip().splitlines()
    assert header.startswith("raw_weights,")
    assert "S3twistS2" in row


def test_check_rejects_zero_weights(capsys, caplog):
    code, _ = run(capsys, "check", "circle", "0", "0", "0", "0")
    assert code == 1
    assert "1001" in caplog.text


def test_check_rejects_non_integer(capsys):
    code, _ = run(capsys, "check", "circle", "1", "x", "0", "1")
    assert code == 1


def test_argument_errors_exit_with_one():
    with pytest.raises(SystemExit) as info:
        main(["check", "circle", "1", "0", "0"])
    assert info.value.code == 1


def test_classify(capsys):
    code, out = run(capsys, "classify", "circle", "3", "2", "1", "0")
    assert code == 0
    assert out.out.strip() == "S3twistS2"

    code, out = run(capsys, "classify", "torus", "1,1,0,2/0,1,1,1", "--format", "json")
    assert code == 0
    assert json.loads(out.out)["diffeo"] == "CP2+CP2"


def test_classify_rejection_logs_witness(capsys, caplog):
    code, _ = run(capsys, "classify", "circle", "1", "1", "1", "1")
    assert code == 1
    assert "1004" in caplog.text
    assert "见证" in caplog.text


def test_catalog(capsys):
    code, out = run(capsys, "catalog", "5", "--json")
    assert code == 0
    assert len(json.loads(out.out)) == 2

    code, out = run(capsys, "catalog", "4", "--manifold", "S4")
    assert code == 0
    lines = out.out.strip().splitlines()
    assert len(lines) == 6
    assert lines[1].split()[:3] == ["S4", "Sp(2)", "Sp(1)²"]

    code, _ = run(capsys, "catalog", "7")
    assert code == 1


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", "--dim", "5", "--bound", "2")
    assert code == 0
    payload = json.loads(out.out)
    assert {"S3xS2", "S3twistS2"} <= set(payload["summary"]["histogram"])
    assert len(payload["reports"]) == payload["summary"]["canonical_count"]

    code, out = run(capsys, "enumerate", "--dim", "5", "--bound", "0")
    assert json.loads(out.out)["summary"]["histogram"] == {}

    code, out = run(capsys, "enumerate", "--dim", "4", "--format", "csv")
    assert code == 0
    assert json.loads(out.err.strip().splitlines()[-1])["histogram"].keys() == {"S2xS2", "CP2-CP2", "CP2+CP2"}


def test_verify(capsys):
    code, out = run(capsys, "verify", "--bound", "1", "--samples", "20", "--ring-checks", "10")
    assert code == 0
    assert json.loads(out.out)["passed"] is True

    code, out = run(capsys, "verify", "--bound", "1", "--samples", "5", "--ring-checks", "10", "--inject-fault")
    assert code == 2
    assert json.loads(out.out)["mismatch_count"] > 0


def test_parse_torus_checks_shape():
    with pytest.raises(InvalidInputError):
        parse_torus("1,1,0,0")
    with pytest.raises(InvalidInputError):
        parse_torus("1,1,0/0,2,1,1")
