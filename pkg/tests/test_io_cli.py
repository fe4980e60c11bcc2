import io
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given

from kframe import FrameFamily, KreinSpace, analyze_jframe
from kframe.cli import main, parse_signature
from kframe.io import DocumentError, dumps_frame, format_number, loads_frame, read_frame, write_frame
from kframe.parseval import is_parseval

from conftest import jframes

DATA = Path(__file__).resolve().parent.parent / "data"
FAMILY = str(DATA / "doubled_basis.json")
OTHER = str(DATA / "doubled_basis_dual.json")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    text = out.getvalue()
    report = json.loads(text) if text.startswith("{\n  \"command\"") else text
    return code, report, err.getvalue()


def strip_timing(report):
    return {k: v for k, v in report.items() if k != "wall_time"}


class TestDocuments:
    def test_shipped_files_parse(self, doubled, doubled_dual):
        assert np.array_equal(read_frame(FAMILY).vectors, doubled.vectors)
        assert np.array_equal(read_frame(OTHER).vectors, doubled_dual.vectors)

    @given(jframes())
    def test_round_trip_byte_identical(self, F):
        text = dumps_frame(F)
        G = loads_frame(text)
        assert np.array_equal(G.vectors, F.vectors)
        assert dumps_frame(G) == text

    def test_labels_and_signed_zero(self, tmp_path):
        sp = KreinSpace((1, -1))
        F = FrameFamily(sp, np.array([[1 / 3, -0.0], [0.1 + 2j, 5.0]]), labels=["a", "b"])
        path = tmp_path / "f.json"
        write_frame(F, path)
        G = read_frame(path)
        assert list(G.labels) == ["a", "b"]
        assert np.signbit(G.vectors[0, 1].real)
        assert dumps_frame(G) == path.read_text()

    def test_seventeen_digits(self):
        x = 0.1 + 0.2
        assert float(format_number(x)) == x
        assert format_number(0.0) == "0"

    @pytest.mark.parametrize(
        "text, field, line",
        [
            ('{"schema_version": "2", "signature": [1], "vectors": []}', "schema_version", 1),
            ('{\n "schema_version": "1",\n "signature": [1, 0],\n "vectors": []}', "signature", 3),
            ('{\n "schema_version": "1",\n "signature": [1],\n "vectors": [[[1, 0], [2, 0]]]}',
             "vectors[0]", 4),
            ('{"schema_version": "1", "signature": [1], "vectors": [[[1, "x"]]]}', "vectors[0][0]", 1),
            ('{"schema_version": "1", "signature": [1], "vectors": [[[1]]]}', "vectors[0][0]", 1),
            ('{"schema_version": "1", "signature": [1], "vectors": [], "extra": 1}', "extra", 1),
            ('{"schema_version": "1", "signature": [1], "vectors": [[[1, 0]]], "labels": [1]}',
             "labels", 1),
        ],
    )
    def test_errors_name_line_and_field(self, text, field, line):
        with pytest.raises(DocumentError) as info:
            loads_frame(text)
        assert info.value.field == field and info.value.line == line

    def test_json_syntax_error_has_line(self):
        with pytest.raises(DocumentError) as info:
            loads_frame('{\n "schema_version": "1",\n oops}')
        assert info.value.line == 3


def test_parse_signature():
    assert parse_signature("++-") == parse_signature("+,+,-") == parse_signature("1,1,-1") == (1, 1, -1)
    with pytest.raises(ValueError):
        parse_signature("+,0")


class TestInspect:
    def test_doubled_basis(self):
        code, rep, _ = run("inspect", FAMILY)
        assert code == 0 and rep["verdicts"]["is_jframe"]
        assert rep["details"]["excess"] == 3
        assert all(v == pytest.approx(2.0) for v in rep["details"]["jframe_bounds"].values())
        assert rep["inputs"][0]["sha256"] and rep["tolerances"] == {"rtol": 1e-9, "tol": 1e-8}

    def test_hilbert_onb(self):
        code, rep, _ = run("inspect", DATA / "hilbert_onb.json")
        assert code == 0 and rep["verdicts"]["is_jframe"]
        S = np.array([[complex(*z) if isinstance(z, list) else z for z in row] for row in rep["details"]["S"]])
        assert np.allclose(S, np.eye(3))

    def test_neutral_vector(self):
        code, rep, err = run("inspect", DATA / "neutral.json")
        assert code == 0 and not rep["verdicts"]["is_jframe"]
        assert "neutral" in err and any("neutral" in d for d in rep["diagnostics"])

    def test_missing_and_malformed(self, tmp_path):
        assert run("inspect", tmp_path / "nope.json")[0] == 2
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": "1"}')
        code, _, err = run("inspect", bad)
        assert code == 2 and "signature" in err


class TestDual:
    def test_pair(self):
        code, rep, _ = run("dual", FAMILY, OTHER)
        assert code == 0
        assert rep["verdicts"]["is_dual"] and not rep["verdicts"]["is_jframe_dual"]
        assert rep["verdicts"]["w_range_criterion"] is False
        assert rep["details"]["N_plus_dim"] == 3

    def test_canonical(self, tmp_path, doubled):
        out = tmp_path / "canon.json"
        code, rep, _ = run("dual", FAMILY, "--canonical", "-o", out)
        assert code == 0 and rep["verdicts"]["canonical_dual"]
        assert np.allclose(read_frame(out).vectors, doubled.vectors / 2)

    def test_random(self):
        code, rep, _ = run("dual", FAMILY, "--random", 100, "--seed", 7)
        assert code == 0 and rep["verdicts"]["minimal_norm"]
        assert rep["seed"] == 7 and rep["residuals"]["worst_margin"] >= -1e-10
        again = run("dual", FAMILY, "--random", 100, "--seed", 7)[1]
        assert strip_timing(again) == strip_timing(rep)

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("KFRAME_SEED", "123")
        rep = run("dual", FAMILY, "--random", 5)[1]
        assert rep["seed"] == 123
        monkeypatch.setenv("KFRAME_SEED", "abc")
        assert run("dual", FAMILY, "--random", 5)[0] == 2

    def test_not_a_jframe_is_precondition(self):
        assert run("dual", DATA / "neutral.json", "--canonical")[0] == 3

    def test_needs_exactly_one_mode(self):
        assert run("dual", FAMILY)[0] == 2


class TestParseval:
    def test_check_fails_on_doubled_basis(self):
        code, rep, _ = run("parseval", "--check", FAMILY)
        assert code == 0 and not rep["verdicts"]["is_parseval"] and rep["verdicts"]["tests_agree"]

    def test_canonical_then_check(self, tmp_path, doubled):
        out = tmp_path / "p.json"
        code, rep, _ = run("parseval", "--canonical", FAMILY, "-o", out)
        assert code == 0 and rep["verdicts"]["canonical_parseval"]
        P = read_frame(out)
        assert np.allclose(P.vectors, doubled.vectors / np.sqrt(2))
        code, rep, _ = run("parseval", "--check", out)
        v = rep["verdicts"]
        assert v["is_parseval"] and v["operator_test"] and v["coisometry_test"] and v["projection_test"]
        assert v["coefficient_test"] and v["tests_agree"]

    def test_dilate(self, tmp_path):
        P = tmp_path / "p.json"
        run("parseval", "--canonical", FAMILY, "-o", P)
        D = tmp_path / "d.json"
        code, rep, _ = run("parseval", "--dilate", P, "-o", D)
        assert code == 0 and rep["verdicts"]["dilation"]
        assert rep["details"]["projection_rank"] == 3
        assert rep["residuals"]["recovery_residual"] < 1e-10
        doc = json.loads(D.read_text())
        assert len(doc["big_signature"]) == 6 and len(doc["projection"]) == 6

    def test_dilate_needs_parseval(self):
        assert run("parseval", "--dilate", FAMILY)[0] == 3


class TestGenerate:
    def test_zero_excess(self, tmp_path):
        out = tmp_path / "g.json"
        code, rep, _ = run("generate", "--dim", 3, "--signature", "++-", "--n-plus", 2,
                           "--n-minus", 1, "--seed", 1, "-o", out)
        assert code == 0 and rep["verdicts"]["is_jframe"] and rep["details"]["excess"] == 0
        assert read_frame(out).n == 3

    def test_excess_three_to_stdout(self):
        code, text, _ = run("generate", "--signature", "+,+,-", "--n-plus", 4, "--n-minus", 2, "--seed", 5)
        assert code == 0
        F = loads_frame(text)
        assert F.n == 6 and len(F.plus) == 4
        assert run("generate", "--signature", "+,+,-", "--n-plus", 4, "--n-minus", 2, "--seed", 5)[1] == text

    def test_unsorted_signature(self):
        text = run("generate", "--signature=-+-+", "--n-plus", 3, "--n-minus", 2, "--seed", 2)[1]
        F = loads_frame(text)
        assert F.space.signature == (-1, 1, -1, 1)
        assert analyze_jframe(F).is_jframe

    def test_infeasible(self):
        code, _, err = run("generate", "--dim", 3, "--signature", "++-", "--n-plus", 1, "--n-minus", 1)
        assert code == 3 and "n_plus" in err

    def test_dim_mismatch(self):
        assert run("generate", "--dim", 4, "--signature", "++-", "--n-plus", 2, "--n-minus", 1)[0] == 2


def test_reports_are_deterministic():
    a = strip_timing(run("inspect", FAMILY)[1])
    b = strip_timing(run("inspect", FAMILY)[1])
    assert a == b


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "kframe", "inspect", FAMILY], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["verdicts"]["is_jframe"]


def test_parseval_verdict_matches_library(tmp_path, doubled):
    path = tmp_path / "half.json"
    write_frame(doubled.scaled(2 ** -0.5), path)
    assert run("parseval", "--check", path)[1]["verdicts"]["is_parseval"] == is_parseval(read_frame(path))
