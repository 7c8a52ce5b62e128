import json

import pytest

from tkrank.cli import main
from tkrank.errors import EXIT_GUARD, EXIT_INPUT, EXIT_OK


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        code, _, _ = _run(capsys, "gen", "tripartition", "--n", "3", "--plant", "--seed", "1", "--out", str(path))
        assert code == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("algo", ["brute", "wht", "tensor"])
def test_solve_planted_instance(tmp_path, capsys, algo):
    path = tmp_path / "inst.json"
    _run(capsys, "gen", "tripartition", "--n", "3", "--plant", "--seed", "1", "--out", str(path))
    code, out, _ = _run(capsys, "solve", str(path), "--algo", algo, "--seed", "7", "--lambda", "10")
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["answer"] is True
    assert result["algo"] == algo


def test_solve_empty_instance_is_a_no(tmp_path, capsys):
    path = tmp_path / "inst.json"
    _run(capsys, "gen", "tripartition", "--n", "3", "--density", "0", "--seed", "1", "--out", str(path))
    for algo in ("brute", "tensor"):
        code, out, _ = _run(capsys, "solve", str(path), "--algo", algo, "--k", "1", "--lambda", "5", "--seed", "7")
        assert code == EXIT_OK
        assert json.loads(out)["answer"] is False


def test_solve_reports_trials_and_probability(tmp_path, capsys):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 2, "families": [[[1, 2]], [[3, 4]], [[1, 5]]]}))
    code, out, _ = _run(capsys, "solve", str(path), "--algo", "tensor", "--seed", "3")
    assert code == EXIT_OK
    result = json.loads(out)
    assert result == {"answer": False, "trials_used": 13, "p": "2/5", "algo": "tensor", "fallback": False}


def test_solve_set_cover(tmp_path, capsys):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps({"n": 6, "t": 3, "s": 2, "sets": [[1, 2], [3, 4], [5, 6], [1, 3]]}))
    code, out, _ = _run(capsys, "solve", str(path))
    assert code == EXIT_OK
    assert json.loads(out)["answer"] is True
    assert json.loads(out)["algo"] == "reduce+wht"


def test_malformed_json_exits_with_input_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 1, "families": [')
    code, _, err = _run(capsys, "solve", str(path))
    assert code == EXIT_INPUT
    assert "line 1" in err


def test_guard_exit_code(capsys):
    assert _run(capsys, "gen", "tripartition", "--n", "9")[0] == EXIT_GUARD
    assert _run(capsys, "tensor", "build-tk", "--k", "5")[0] == EXIT_GUARD


def test_invalid_parameters(capsys):
    assert _run(capsys, "bounds", "--modulus", "4")[0] == EXIT_INPUT
    assert _run(capsys, "bounds", "--k-max", "0")[0] == EXIT_INPUT
    assert _run(capsys, "nonsense")[0] == EXIT_INPUT


def test_decompose_then_verify(tmp_path, capsys):
    path = tmp_path / "t1.json"
    code, out, _ = _run(capsys, "tensor", "decompose", "--group", "--k", "1", "--out", str(path))
    assert code == EXIT_OK
    code, out, _ = _run(capsys, "tensor", "verify", str(path), "--k", "1")
    assert code == EXIT_OK
    assert "valid, rank 4" in out


def test_decompose_fallback_keeps_stdout_json(capsys):
    code, out, err = _run(capsys, "tensor", "decompose", "--k", "2", "--shifted")
    assert code == EXIT_OK
    assert len(json.loads(out)["terms"]) == 64
    assert "naive decomposition" in err


def test_max_entries_flag_guards_tensor_commands(tmp_path, capsys):
    assert _run(capsys, "tensor", "build-tk", "--k", "2", "--max-entries", "50")[0] == EXIT_GUARD
    assert _run(capsys, "tensor", "build-tk", "--k", "2", "--max-entries", "90")[0] == EXIT_OK
    assert _run(capsys, "tensor", "build-tk", "--k", "1", "--max-entries", "0")[0] == EXIT_INPUT
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 3, "families": [[[1, 2, 3]], [[4, 5, 6]], [[7, 8, 9]]]}))
    code, _, err = _run(capsys, "solve", str(path), "--algo", "tensor", "--k", "1", "--max-entries", "63")
    assert code == EXIT_GUARD
    assert "guard" in err


def test_verify_truncated_file(tmp_path, capsys):
    path = tmp_path / "t1.json"
    _run(capsys, "tensor", "decompose", "--k", "1", "--out", str(path))
    doc = json.loads(path.read_text())
    doc["terms"] = doc["terms"][:3]
    path.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "tensor", "verify", str(path), "--k", "1")
    assert code == EXIT_OK
    assert "invalid" in out


def test_build_tk_writes_sparse_tensor(capsys):
    code, out, _ = _run(capsys, "tensor", "build-tk", "--k", "1")
    assert code == EXIT_OK
    assert len(json.loads(out)["entries"]) == 6


def test_tensor_bounds(capsys):
    code, out, _ = _run(capsys, "tensor", "bounds", "--k", "2")
    assert code == EXIT_OK
    threshold = json.loads(out)["threshold"]
    assert (threshold["numerator"], threshold["denominator"]) == (640, 81)


def test_bounds_tables(capsys):
    code, out, _ = _run(capsys, "bounds", "--k-max", "12")
    assert code == EXIT_OK
    assert "Smallest k beating the 8^n algorithm: 11" in out
    code, out, _ = _run(capsys, "bounds", "--k-max", "12", "--json")
    assert json.loads(out)["smallest_k_beating_fourier"] == 11


def test_bench_saves_a_report(tmp_path, capsys):
    code, out, _ = _run(capsys, "bench", "--suite", "wht", "--sizes", "1,2", "--repetitions", "2", "--seed", "4")
    assert code == EXIT_OK
    saved = list((tmp_path / "outputs").glob("bench_*.json"))
    assert len(saved) == 1
    report = json.loads(saved[0].read_text())
    assert [row["n"] for row in report["rows"]] == [1, 2]
    assert all(row["answer"] for row in report["rows"])


def test_bench_answers_are_reproducible(tmp_path, capsys):
    answers = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        _run(capsys, "bench", "--suite", "brute", "--sizes", "2,3", "--seed", "9", "--out", str(path))
        answers.append([row["answer"] for row in json.loads(path.read_text())["rows"]])
    assert answers[0] == answers[1]


def test_bench_rejects_bad_sizes(capsys):
    assert _run(capsys, "bench", "--sizes", "a,b")[0] == EXIT_INPUT
    assert _run(capsys, "bench", "--sizes", "12")[0] == EXIT_GUARD


def test_selftest_quick_corpus(capsys):
    code, out, _ = _run(capsys, "selftest", "--seed", "5")
    assert code == EXIT_OK
    assert "❌" not in out
    assert out.count("✅") == 8


@pytest.mark.slow
def test_selftest_full_corpus(capsys):
    code, out, _ = _run(capsys, "selftest", "--full", "--seed", "5")
    assert code == EXIT_OK, out
