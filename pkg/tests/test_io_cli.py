import json
import math

import numpy as np
import pytest

from semiop.cli import main
from semiop.io import (
    ProblemError,
    analysis_from_dict,
    analysis_to_dict,
    decode_matrix,
    encode_matrix,
    parse_problem,
)
from semiop.radii import INFINITE, analyze
from semiop.semispace import make_context


def write(tmp_path, doc, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


JORDAN = {"A": [[1, 0], [0, 1]], "T": [[1, 1], [0, 1]]}
SWAP = {"A": [[1, 0], [0, 0]], "T": [[0, 1], [1, 0]]}
ASA = {"A": [[2, 0, 2], [0, 1, 0], [2, 0, 2]], "T": [[1, 0, 1], [0, 0, 0], [0, 0, 0]]}
HYP = {"A": [[1, 1], [1, 1]], "T": [[2, 2], [0, 0]]}


def test_matrix_roundtrip():
    M = np.array([[1, 2 + 3j], [-0.5j, 1e-300]])
    assert np.array_equal(decode_matrix(encode_matrix(M)), M)


def test_parse_problem_variants():
    p = parse_problem({"A": [[1, 0], [0, 1]], "T": [[[0, 1], 0], [0, 1]], "tolerances": {"conv_tol": 1e-12}})
    assert p.T[0, 0] == 1j and p.config().conv_tol == 1e-12
    p = parse_problem({"A": [[1]], "tuple": [[[1]], [[2]]]})
    assert p.T is None and len(p.operators) == 2


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"T": [[1]]},
        {"A": [[1]]},
        {"A": [[1, 0]], "T": [[1]]},
        {"A": [[1, 0], [0, 1]], "T": [[1]]},
        {"A": [[1]], "T": [["x"]]},
        {"A": [[1]], "T": [[1]], "tolerances": {"bogus": 1}},
        {"A": [[1]], "T": [[1]], "tolerances": {"psd_tol": -1}},
        {"A": [[1]], "T": [[1]], "extra": 1},
        {"A": [[1]], "tuple": []},
    ],
)
def test_parse_problem_errors(doc):
    with pytest.raises(ProblemError):
        parse_problem(doc)


def test_analysis_report_roundtrip():
    ctx = make_context(np.eye(2))
    rep = analyze(ctx, np.array([[1, 1j], [0, 1]]), trace_n=6)
    doc = json.loads(json.dumps(analysis_to_dict(rep)))
    back = analysis_from_dict(doc)
    assert back.a_numerical_radius == rep.a_numerical_radius
    assert back.a_spectral_radius == rep.a_spectral_radius
    assert np.array_equal(back.sharp, rep.sharp)
    assert back.gelfand.estimates == rep.gelfand.estimates

    rep = analyze(make_context(np.diag([1.0, 0.0])), np.array([[0, 1], [1, 0]]))
    doc = json.loads(json.dumps(analysis_to_dict(rep)))
    assert doc["a_numerical_radius"] == {"value": None, "infinite": True}
    assert analysis_from_dict(doc).a_numerical_radius is INFINITE
    assert "Infinity" not in json.dumps(doc)


def test_cli_analyze(tmp_path, capsys):
    code, out, err = run(capsys, "analyze", write(tmp_path, JORDAN))
    assert code == 0 and "omega_A:      1.5" in out and not err
    code, out, _ = run(capsys, "analyze", write(tmp_path, SWAP))
    assert code == 0
    assert "omega_A: inf (T does not leave N(A) invariant; W_A(T) = C)" in out
    code, out, _ = run(capsys, "analyze", write(tmp_path, {"A": [[1, 0], [0, 1]], "T": [[0, 0], [0, 0]]}), "--json")
    doc = json.loads(out)
    assert doc["a_norm"] == doc["a_numerical_radius"] == doc["a_spectral_radius"] == 0.0
    code, out, _ = run(capsys, "analyze", write(tmp_path, JORDAN), "--trace", "--n-max", "5")
    assert "gelfand" in out and len([l for l in out.splitlines() if l.startswith("       ")]) >= 5


def test_cli_exit_codes(tmp_path, capsys):
    code, out, err = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err and not out
    code, _, err = run(capsys, "analyze", write(tmp_path, "{not json"))
    assert code == 2
    code, _, err = run(capsys, "analyze", write(tmp_path, {"A": [[1, 0], [0, -1]], "T": [[1, 0], [0, 1]]}))
    assert code == 3 and "lambda_min" in err
    code, _, err = run(capsys, "analyze", write(tmp_path, {"A": [[1, 1], [0, 1]], "T": [[1, 0], [0, 1]]}))
    assert code == 3
    code, _, _ = run(capsys, "analyze", write(tmp_path, JORDAN), "--tol-psd-tol", "-1")
    assert code == 2


def test_cli_tolerance_flags(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", write(tmp_path, JORDAN), "--json", "--tol-theta-grid", "16")
    assert code == 0 and json.loads(out)["a_numerical_radius"] == pytest.approx(1.5, abs=1e-9)


def test_cli_classify(tmp_path, capsys):
    code, out, _ = run(capsys, "classify", write(tmp_path, ASA), "--explain")
    assert code == 0 and "a_paranormal:    true" in out and "witness" in out
    code, out, _ = run(capsys, "classify", write(tmp_path, HYP), "--json")
    doc = json.loads(out)
    assert doc["a_normal"] is False and doc["a_hyponormal"] is True
    code, out, _ = run(capsys, "classify", write(tmp_path, {"A": [[1, 0], [0, 1]], "T": [[1, 0], [0, 1]]}), "--json")
    doc = json.loads(out)
    assert all(doc[k] for k in ("a_normal", "a_hyponormal", "a_paranormal", "a_normaloid", "a_spectraloid"))
    code, out, _ = run(capsys, "classify", write(tmp_path, SWAP))
    assert "not applicable" in out


def test_cli_verify(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--family", "generic", "--samples", "20", "--seed", "42", "--json")
    assert code == 0 and json.loads(out)["failures"] == 0
    code, out, _ = run(capsys, "verify", write(tmp_path, JORDAN))
    assert code == 0 and "r<=omega" in out
    code, out, _ = run(capsys, "verify", "--family", "square-zero", "--samples", "10", "--dims", "2..5")
    assert code == 0 and "omega=norm/2" in out
    code, _, _ = run(capsys, "verify", "--family", "generic", "--dims", "5..2")
    assert code == 2


def test_cli_verify_failure_exit(tmp_path, capsys, monkeypatch):
    from semiop import verify

    real = verify._leq
    monkeypatch.setattr(verify, "_leq", lambda *a, **k: real(*a[:2], 1.0, 0.0))
    code, _, _ = run(capsys, "verify", write(tmp_path, JORDAN))
    assert code == 1


def test_cli_jsr(tmp_path, capsys):
    code, out, _ = run(capsys, "jsr", write(tmp_path, {"A": [[1, 0], [0, 1]], "tuple": [[[1, 0], [0, 1]]] * 2}), "--json")
    assert json.loads(out)["final"] == pytest.approx(math.sqrt(2), abs=1e-9)
    code, out, _ = run(capsys, "jsr", write(tmp_path, {"A": [[1, 0], [0, 1]], "tuple": [[[0, 0], [0, 0]]] * 2}), "--json")
    assert json.loads(out)["final"] == 0.0
    single = {"A": [[2, 1], [1, 2]], "T": [[1, 2], [0.5, -1]]}
    path = write(tmp_path, single)
    _, out, _ = run(capsys, "jsr", path, "--json", "--depth", "50")
    jsr = json.loads(out)["final"]
    _, out, _ = run(capsys, "analyze", path, "--json")
    assert jsr == pytest.approx(json.loads(out)["a_spectral_radius"], abs=1e-6)
    code, _, err = run(capsys, "jsr", write(tmp_path, SWAP))
    assert code == 2 and "N(A)" in err


def test_cli_demo(capsys):
    code, out, _ = run(capsys, "demo", "list", "--json")
    doc = json.loads(out)
    assert len(doc["demos"]) == 2 and len(doc["registry"]) == 5
    code, out, _ = run(capsys, "demo", "ex01", "--half-n", "6", "--json")
    rows = json.loads(out)["table"]
    np.testing.assert_allclose([r[1] for r in rows], np.sqrt([2, 3, 4, 5, 6]), atol=1e-9)
    assert json.loads(out)["certificates"]["omega_A"] == {"value": None, "infinite": True}
    code, out, _ = run(capsys, "demo", "shift-z", "--n-max", "4")
    assert code == 0 and "n^-3" in out
    code, out, _ = run(capsys, "demo", "hyponormal-not-normal")
    assert code == 0 and "sharp" in out
    code, _, err = run(capsys, "demo", "nope")
    assert code == 2
