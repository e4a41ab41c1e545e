import json

import pytest

from logweight import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compare_structured(capsys):
    code, out, err = run(capsys, "compare", "--scenario", "line-k3-q",
                         "--track", "dr", "--format", "structured")
    assert code == 0 and err == ""
    body = json.loads(out)
    assert body["equal"] is True
    gr = body["tracks"][0]["weight"]["gr"]
    assert gr == [[0, 0, 1], [2, 1, 2]]


def test_compare_human(capsys):
    code, out, _ = run(capsys, "compare", "--scenario", "line-k2-f3")
    assert code == 0
    assert "both routes agree" in out
    assert "gr_W(2) H^1: dim 1" in out


def test_weights_human_shows_compact_weight_zero(capsys):
    code, out, _ = run(capsys, "weights", "--scenario", "f5-conic-line")
    assert code == 0
    assert "gr_W(0) H_c^2: dim 1" in out


def test_unknown_scenario_exits_2(capsys):
    code, out, err = run(capsys, "weights", "--scenario", "no-such-thing")
    assert code == 2 and out == ""
    assert "scenario" in err


def test_invalid_file_names_field(tmp_path, capsys):
    bad = {"version": 1, "field": "Q", "mode": "tabulated", "n": 2,
           "components": 2,
           "strata": [
               {"subset": [], "components": [{"hodge": [[0, 0, 1]]}]},
               {"subset": [1], "components": [{"hodge": [[0, 0, 1]]}]},
               {"subset": [2], "components": [{"hodge": [[0, 0, 1]]}]},
               {"subset": [1, 2], "components": [{"hodge": [[0, 0, 1]]}]},
           ],
           "pullbacks": [
               {"from": [], "to": [1], "p": 0, "q": 0, "matrix": [[1]]},
               {"from": [], "to": [2], "p": 0, "q": 0, "matrix": [[1]]},
               {"from": [1], "to": [1, 2], "p": 0, "q": 0, "matrix": [[1]]},
               {"from": [2], "to": [1, 2], "p": 0, "q": 0, "matrix": [[-1]]},
           ]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, err = run(capsys, "weights", "--scenario", str(path))
    assert code == 2
    assert "non-functorial" in err and "pullbacks" in err


def test_broken_json_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "ss", "--scenario", str(path))
    assert code == 2 and "invalid JSON" in err


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "cone", "--scenario", "cone-plane",
                       "--format", "structured", "--out", str(target))
    assert code == 0 and out == ""
    body = json.loads(target.read_text())
    assert body["match"] is True
    assert body["weights"] == [[0, 0, 1], [1, 1, 1], [2, 2, 1], [3, 3, 1]]


def test_structured_output_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "ss", "--scenario", "line-k1-q", "--format",
                   "structured", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_selftest_reports_counts(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "11", "--format",
                       "structured")
    assert code == 0
    body = json.loads(out)
    assert body["seed"] == 11 and body["ok"]
    assert {s["name"]: s["count"] for s in body["suites"]} == {
        "decalage-page-shift": 200, "truncation-tower-maps": 120,
        "cube-totalization": 50}


def test_mathematical_mismatch_exits_1(monkeypatch, capsys):
    report = {"command": "selftest", "seed": 0, "ok": False,
              "suites": [{"name": "decalage-page-shift", "count": 1,
                          "failures": ["case 0: made up"]}]}
    monkeypatch.setattr(cli, "handle_selftest", lambda seed: report)
    code, out, _ = run(capsys, "selftest")
    assert code == 1
    assert "FAILED" in out


def test_compare_diff_rendering(monkeypatch, capsys):
    report = {"command": "compare", "scenario": "x", "field": "Q",
              "mode": "explicit", "equal": False, "ok": False,
              "tracks": [{"track": "dr", "equal": False,
                          "pole_order": {"h": [], "gr": [], "e1": []},
                          "weight": {"h": [], "gr": [[2, 1, 1]], "e1": []},
                          "diff": {"gr": [[2, 1, 0, 1]]}}]}
    monkeypatch.setattr(cli, "handle_compare", lambda s, t: report)
    code, out, _ = run(capsys, "compare", "--scenario", "x")
    assert code == 1
    assert "diff gr(2, 1): pole order 0 != weight 1" in out
    assert "DISAGREE" in out


def test_ss_human(capsys):
    code, out, _ = run(capsys, "ss", "--scenario", "line-k1-q",
                       "--track", "dr")
    assert code == 0
    assert "side: pole-order" in out and "page 1:" in out


def test_bad_track_choice_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["compare", "--scenario", "line-k0-q", "--track", "nope"])
    assert exc.value.code == 2


def test_dual_complex_human(capsys):
    code, out, _ = run(capsys, "dual-complex", "--scenario", "line-k3-f5")
    assert code == 0
    assert "reduced H^0: dim 2" in out and "(match)" in out
    code, out, _ = run(capsys, "dual-complex", "--scenario", "f5-conic-line")
    assert code == 0 and "not asserted" in out
