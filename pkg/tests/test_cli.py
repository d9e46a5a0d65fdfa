import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogmac.cli_io import ProblemError, ProblemFile, RunManifest
from cogmac.cli_io.cli import main, read_manifest
from conftest import problem_path

SECTION_V = problem_path("parallel_p0.1.json")
MATCHED = problem_path("parallel_p0.1_matched.json")


def _h2(p):
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def test_shipped_problems_parse():
    for name in ("parallel_p0.1.json", "parallel_p0.1_matched.json", "parallel_p0.1_sparse_x1.json"):
        pb = ProblemFile.load(problem_path(name))
        assert pb.dims == (2, 2, 4)


@given(st.integers(0, 10_000))
def test_problem_round_trip(seed):
    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.ones(3), size=(2, 2))
    d = {"dims": [2, 2, 3], "W": W.tolist(), "q": rng.normal(size=(2, 2, 3)).tolist(),
         "P": rng.dirichlet(np.ones(4)).reshape(2, 2).tolist()}
    a = ProblemFile.from_dict(d)
    b = ProblemFile.loads(a.dumps())
    assert a.same_as(b)
    assert ProblemFile.loads(b.dumps()).dumps() == b.dumps()


def test_single_user_block_round_trip_and_induced_channel():
    a = ProblemFile.load(SECTION_V)
    d = a.to_dict()
    del d["W"], d["q"]
    b = ProblemFile.from_dict(d)
    np.testing.assert_array_equal(a.W, b.W)
    np.testing.assert_array_equal(a.q, b.q)
    assert a.same_as(ProblemFile.loads(a.dumps()))


@pytest.mark.parametrize("mutate,needle", [
    (lambda d: d["W"][0][0].__setitem__(0, 0.5), "W[0][0]: row sums"),
    (lambda d: d.__setitem__("dims", [2, 2]), "dims"),
    (lambda d: d.__setitem__("q", [[1.0]]), "q: expected shape"),
    (lambda d: d.__setitem__("P", [[0.5, 0.6], [0.0, 0.0]]), "P: entries sum"),
    (lambda d: d["single_user"].__setitem__("phi", [[0, 1], [2, 4]]), "single_user.phi"),
    (lambda d: d.__setitem__("extra", 1), "unknown fields"),
])
def test_schema_diagnostics_name_the_field(mutate, needle):
    d = ProblemFile.load(SECTION_V).to_dict()
    mutate(d)
    with pytest.raises(ProblemError, match=needle.replace("[", r"\[").replace("]", r"\]")):
        ProblemFile.from_dict(d)


def test_json_syntax_error_reports_line(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"dims": [2, 2, 4],\n "W": [1,}')
    with pytest.raises(ProblemError, match=r"bad.json:2:"):
        ProblemFile.load(f)


def test_manifest_hash_detects_tampering():
    m = RunManifest("region", {"kind": "lm"}, {"dims": [1, 1, 1]}, 0)
    d = m.to_dict()
    assert RunManifest.from_dict(d) == m
    d["problem"]["dims"] = [1, 1, 2]
    with pytest.raises(ValueError):
        RunManifest.from_dict(d)


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_region_lm_corner(tmp_path, capsys):
    out = tmp_path / "lm.json"
    code, _, _ = _run(["region", "--problem", SECTION_V, "--kind", "lm", "--grid", "5",
                       "-o", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    R1, R2 = doc["result"]["samples"][-1]
    assert R1 == pytest.approx(1.0) and R2 == pytest.approx(1 - _h2(0.1), abs=5e-3)
    assert doc["manifest"]["command"] == "region"
    side = json.loads((tmp_path / "lm.json.run.json").read_text())
    assert side["exit_code"] == 0 and "wall_clock_s" in side


def test_region_matched_csv(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, _ = _run(["region", "--problem", MATCHED, "--kind", "matched", "--grid", "3",
                       "--out", "csv", "-o", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# manifest: ") and lines[1] == "R1,R2max"
    r1, r2 = map(float, lines[-1].split(","))
    assert r1 + r2 == pytest.approx(2 - _h2(0.1), abs=5e-3)


def test_usage_errors_exit_one(capsys):
    assert _run(["region", "--problem", SECTION_V, "--kind", "lm", "--grid", "0"], capsys)[0] == 1
    assert _run(["region", "--kind", "lm"], capsys)[0] == 1
    assert _run(["region", "--problem", SECTION_V, "--kind", "nope"], capsys)[0] == 1
    assert _run(["region", "--problem", "/nonexistent.json", "--kind", "lm"], capsys)[0] == 1
    assert _run(["region", "--problem", SECTION_V, "--kind", "lm", "--dist", "sweep"], capsys)[0] == 1


def test_exponent_verdicts(capsys):
    code, out, err = _run(["exponent", "--problem", SECTION_V, "--R1", "1.2", "--R2", "0.6",
                           "--scheme", "bin", "--starts", "2"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["result"]["verdict"] == "outside"
    assert all(v == 0.0 for v in doc["result"]["components"].values())
    assert "outside" in err


def test_simulate_twice_is_byte_identical(tmp_path, capsys):
    args = ["simulate", "--problem", SECTION_V, "--n", "6", "--R1", "0.3", "--R2", "0.3",
            "--trials", "200", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(args + ["-o", str(a)], capsys)[0] == 0
    assert _run(args + ["-o", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_exact_side_by_side(capsys):
    code, out, _ = _run(["simulate", "--problem", SECTION_V, "--n", "4", "--R1", "0.25",
                         "--R2", "0.25", "--trials", "2000", "--exact"], capsys)
    res = json.loads(out)["result"]["exact"]
    assert code == 0
    for k in ("pe1_event", "pe2_event"):
        assert abs(res[k]["z"]) <= 3.0


def test_simulate_budget_message(capsys):
    code, _, err = _run(["simulate", "--problem", SECTION_V, "--n", "40", "--R1", "1.0",
                         "--trials", "10"], capsys)
    assert code == 1 and "lower" in err


def test_replay_reproduces_under_other_thread_counts(tmp_path, capsys, monkeypatch):
    out = tmp_path / "s.json"
    _run(["simulate", "--problem", SECTION_V, "--n", "5", "--R1", "0.4", "--R2", "0.2",
          "--trials", "100", "-o", str(out)], capsys)
    monkeypatch.setenv("COGMAC_THREADS", "3")
    code, _, _ = _run(["replay", str(out), "--check", "-o", str(tmp_path / "r.json")], capsys)
    assert code == 0
    assert (tmp_path / "r.json").read_bytes() == out.read_bytes()
    manifest, _ = read_manifest(out)
    assert manifest.params["trials"] == 100


def test_replay_detects_edits(tmp_path, capsys):
    out = tmp_path / "lm.csv"
    _run(["region", "--problem", SECTION_V, "--kind", "lm", "--grid", "3", "--out", "csv",
          "-o", str(out)], capsys)
    out.write_text(out.read_text() + "9,9\n")
    assert _run(["replay", str(out), "--check"], capsys)[0] == 3


def test_su_bound_reports_both_bounds(capsys):
    code, out, _ = _run(["su-bound", "--problem", SECTION_V], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert res["cognitive_bound"] == pytest.approx(2 - _h2(0.1), abs=5e-3)
    assert res["cognitive_bound"] >= res["lapidoth_bound"] - 1e-9


def test_su_bound_degenerate_second_input(tmp_path, capsys):
    d = {"dims": [2, 1, 2], "P": [[0.4], [0.6]],
         "single_user": {"X": 2, "W_su": [[0.9, 0.1], [0.2, 0.8]], "q_su": [[0, -1], [-2, 0]],
                         "phi": [[0], [1]]}}
    f = tmp_path / "su.json"
    f.write_text(json.dumps(d))
    code, out, _ = _run(["su-bound", "--problem", str(f)], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and res["gap"] == pytest.approx(0.0, abs=1e-6)


def test_region_sweep_takes_the_hull_over_sampled_inputs(capsys):
    code, out, _ = _run(["region", "--problem", SECTION_V, "--kind", "matched", "--grid", "5",
                         "--dist", "sweep", "3"], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert len(res["anchors"]) >= 3
    assert res["samples"][-1][0] + res["samples"][-1][1] <= 2 - _h2(0.1) + 1e-6
