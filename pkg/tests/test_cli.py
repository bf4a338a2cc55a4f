import json
import subprocess
import sys

import pytest

from ncupper.problems import (bundled_problem_path, parse_problem,
                              parse_problem_dict, parse_word_tokens,
                              serialize_problem)
from ncupper.errors import InputError

BUNDLED = ["chsh", "reflection", "free-unitaries", "commutator-example"]


def run_cli(*args, env_extra=None):
    import os
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "ncupper.cli", *args],
                          capture_output=True, text=True, env=env)


class TestParsing:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_round_trip(self, name):
        p = parse_problem(bundled_problem_path(name))
        again = parse_problem_dict(serialize_problem(p))
        assert serialize_problem(again) == serialize_problem(p)
        assert again.objective == p.objective
        assert again.algebra == p.algebra

    def test_chsh_shape(self):
        p = parse_problem(bundled_problem_path("chsh"))
        kinds = {g.kind for g in p.algebra.generators}
        assert kinds == {"hermitian-unitary"}
        assert p.algebra.factor_tags == (0, 1)
        assert len(p.objective.terms) == 5  # four correlators + offset

    def test_non_self_adjoint_rejected(self):
        data = {
            "algebra": {"generators": [
                {"id": "b1", "kind": "hermitian-unitary"},
                {"id": "b2", "kind": "hermitian-unitary"}]},
            "objective": [{"coefficient": "1",
                           "word": [{"gen": "b1"}, {"gen": "b2"}]}],
        }
        with pytest.raises(InputError, match="f = f\\*"):
            parse_problem_dict(data)

    def test_unknown_kind_rejected(self):
        data = {
            "algebra": {"generators": [{"id": "x", "kind": "projector"}]},
            "objective": [],
        }
        with pytest.raises(InputError):
            parse_problem_dict(data)

    def test_word_tokens(self):
        p = parse_problem(bundled_problem_path("free-unitaries"))
        w = parse_word_tokens("u1 u2* u1", p.algebra)
        assert str(w) == "u1 u2* u1"
        assert parse_word_tokens("1", p.algebra).is_identity
        with pytest.raises(InputError):
            parse_word_tokens("nope", p.algebra)


class TestSolveCommand:
    def test_reflection_both(self, tmp_path):
        out = tmp_path / "r.json"
        r = run_cli("solve", str(bundled_problem_path("reflection")),
                    "--order", "1", "--out", str(out))
        assert r.returncode == 0
        rec = json.loads(out.read_text())
        assert rec["orders"][0]["lambda"]["value"] == "-1"
        assert rec["orders"][0]["eta"]["value"] == "-1"

    def test_chsh_lambda(self, tmp_path):
        out = tmp_path / "c.json"
        r = run_cli("solve", str(bundled_problem_path("chsh")),
                    "--hierarchy", "lambda", "--order", "2",
                    "--out", str(out), "--format", "machine")
        assert r.returncode == 0
        rec = json.loads(out.read_text())
        vals = [float(row["lambda"]["value"]) for row in rec["orders"]]
        assert vals[0] == pytest.approx(0.146, abs=0.005)
        assert vals[1] == pytest.approx(-0.016, abs=0.005)

    def test_chsh_eta(self, tmp_path):
        out = tmp_path / "c.json"
        r = run_cli("solve", str(bundled_problem_path("chsh")),
                    "--hierarchy", "eta", "--order", "2", "--out", str(out))
        assert r.returncode == 0
        rec = json.loads(out.read_text())
        vals = [float(row["eta"]["value"]) for row in rec["orders"]]
        assert vals[0] == pytest.approx(0.0, abs=0.005)
        assert vals[1] == pytest.approx(-0.066, abs=0.005)

    def test_missing_file_exit_2(self):
        r = run_cli("solve", "/nonexistent.problem")
        assert r.returncode == 2

    def test_budget_exit_3(self):
        r = run_cli("solve", str(bundled_problem_path("chsh")),
                    "--order", "2", "--budget", "5")
        assert r.returncode == 3

    def test_env_var_mirroring(self, tmp_path):
        out = tmp_path / "e.json"
        r = run_cli("solve", str(bundled_problem_path("reflection")),
                    "--out", str(out),
                    env_extra={"NCUPPER_ORDER": "1",
                               "NCUPPER_HIERARCHY": "eta"})
        assert r.returncode == 0
        rec = json.loads(out.read_text())
        assert len(rec["orders"]) == 1
        assert "lambda" not in rec["orders"][0]

    def test_flag_beats_env(self, tmp_path):
        out = tmp_path / "e.json"
        r = run_cli("solve", str(bundled_problem_path("reflection")),
                    "--order", "2", "--out", str(out),
                    env_extra={"NCUPPER_ORDER": "1"})
        assert r.returncode == 0
        rec = json.loads(out.read_text())
        assert len(rec["orders"]) == 2


class TestDeterminism:
    @pytest.mark.parametrize("name", ["chsh", "reflection"])
    def test_byte_identical_reruns(self, tmp_path, name):
        outs = []
        for i in (0, 1):
            out = tmp_path / f"{name}{i}.json"
            r = run_cli("solve", str(bundled_problem_path(name)),
                        "--order", "2", "--seed", "0", "--out", str(out))
            assert r.returncode == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_threads_change_nothing_in_machine_output(self, tmp_path):
        outs = []
        for t in ("1", "4"):
            out = tmp_path / f"t{t}.json"
            r = run_cli("solve", str(bundled_problem_path("chsh")),
                        "--order", "2", "--threads", t, "--out", str(out))
            assert r.returncode == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestOtherCommands:
    def test_weingarten_table(self):
        r = run_cli("weingarten", "--n", "2", "--d", "3")
        assert r.returncode == 0
        assert "(1, 1) -> 1/8" in r.stdout
        assert "(2,) -> -1/24" in r.stdout

    def test_mc_check(self):
        r = run_cli("mc-check", str(bundled_problem_path("free-unitaries")),
                    "u1 u2 u1* u2*", "--dim", "2", "--samples", "20000",
                    "--seed", "1")
        assert r.returncode == 0
        assert "exact      : 1/2" in r.stdout

    def test_mc_check_herm(self):
        r = run_cli("mc-check", str(bundled_problem_path("chsh")),
                    "b1 b2", "--dim", "2", "--samples", "5000")
        assert r.returncode == 0

    def test_eval_state_unit(self):
        r = run_cli("eval-state", str(bundled_problem_path("chsh")), "1")
        assert r.returncode == 0
        assert r.stdout.strip().startswith("1 =")

    def test_eval_state_single_letter(self):
        r = run_cli("eval-state", str(bundled_problem_path("chsh")), "b1")
        assert r.returncode == 0
        assert r.stdout.strip().startswith("0 =")

    def test_eval_state_parse_failure(self):
        r = run_cli("eval-state", str(bundled_problem_path("chsh")), "zz")
        assert r.returncode == 2
