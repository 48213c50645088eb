import json
import subprocess
import sys

import pytest

from rectdecomp.cli import main


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def hook_file(tmp_path, capsys):
    path = tmp_path / "hook.json"
    assert main(["gen", "hook", "--out", str(path)]) == 0
    return str(path)


def test_gen_psi_dims(capsys):
    code, doc = run(capsys, "gen", "psi", "--m", "2")
    assert code == 0 and (doc["nx"], doc["ny"]) == (3, 3)
    assert doc["dims"] == [[0, 0, 1], [0, 1, 2], [1, 2, 2]]


def test_gen_is_deterministic(capsys):
    _, a = run(capsys, "gen", "random", "--shape", "3x2", "--seed", "4")
    _, b = run(capsys, "gen", "random", "--shape", "3x2", "--seed", "4")
    assert a == b


def test_rect_sum_round_trip(tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["gen", "rect-sum", "--shape", "4x4", "--count", "5", "--seed", "7", "--out", str(out)]) == 0
    truth = json.loads((tmp_path / "m.json.truth.json").read_text())
    code, doc = run(capsys, "decompose", "--in", str(out), "--certify")
    assert code == 0 and doc["certified"]
    key = lambda s: (s["shape"], s["multiplicity"])
    assert sorted(map(key, doc["summands"])) == sorted(map(key, truth["summands"]))


def test_check_weak_on_hook(capsys, hook_file):
    code, doc = run(capsys, "check", "--weak", "--in", hook_file)
    assert code == 1 and doc["verdict"] is False
    assert doc["witness"]["s"] == [1, 1] and doc["witness"]["t"] == [3, 2]


def test_check_local_matches_weak(capsys, hook_file, tmp_path):
    path = tmp_path / "r.json"
    for args in (["gen", "random", "--seed", "1", "--out", str(path)], ["gen", "psi", "--out", str(path)]):
        main(args)
        weak, _ = run(capsys, "check", "--weak", "--in", str(path))
        local, _ = run(capsys, "check", "--local", "rectangles", "--in", str(path))
        assert weak == local
    code, _ = run(capsys, "check", "--local", "rectangles_plus_top_hooks", "--in", hook_file)
    assert code == 0


def test_decompose_refusal_and_oracle(capsys, hook_file, tmp_path):
    code, doc = run(capsys, "decompose", "--in", hook_file)
    assert code == 1 and doc["weakly_exact"] is False
    path = tmp_path / "psi.json"
    main(["gen", "psi", "--m", "2", "--out", str(path)])
    code, doc = run(capsys, "oracle", "--in", str(path))
    assert code == 1 and doc["message"] == "NOT interval-decomposable"
    # the hook module is indecomposable and not an interval module
    code, _ = run(capsys, "oracle", "--in", hook_file)
    assert code == 1
    main(["gen", "interval-sum", "--shape", "3x2", "--seed", "3", "--out", str(path)])
    code, doc = run(capsys, "oracle", "--in", str(path))
    assert code == 0 and doc["interval_decomposable"]


def test_skeleton(capsys, tmp_path):
    path = tmp_path / "m.json"
    main(["gen", "rect-sum", "--shape", "3x3", "--seed", "2", "--out", str(path)])
    code, doc = run(capsys, "skeleton", "--in", str(path), "--point", "2,2")
    assert code == 0 and doc["checked"] and doc["point"] == [2, 2]
    code, _ = run(capsys, "skeleton", "--in", str(path), "--point", "9,9")
    assert code == 2


def test_input_errors(capsys, monkeypatch, tmp_path):
    code, _ = run(capsys, "check", "--weak", stdin="{bad", monkeypatch=monkeypatch)
    assert code == 2
    code, _ = run(capsys, "check", "--weak", "--in", str(tmp_path / "missing.json"))
    assert code == 2
    assert main(["gen", "random", "--shape", "3"]) == 2
    assert main(["gen", "random", "--p", "4"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--all"]) == 2  # --seed is mandatory


def test_validate(capsys, monkeypatch):
    code, doc = run(capsys, "validate", stdin='{"p":2,"nx":1,"ny":1,"dims":[[1]]}', monkeypatch=monkeypatch)
    assert code == 0 and doc["valid"]
    bad = ('{"p":2,"nx":2,"ny":2,"dims":[[1,1],[1,1]],"hmaps":{"1,1":[[1]],"1,2":[[1]]},'
           '"vmaps":{"1,1":[[1]],"2,1":[[0]]}}')
    code, doc = run(capsys, "validate", stdin=bad, monkeypatch=monkeypatch)
    assert code == 1 and doc["valid"] is False and doc["where"] == [1, 1]


def test_verify_single_suite(capsys):
    code, doc = run(capsys, "verify", "--suite", "7", "--seed", "1")
    assert code == 0 and doc["ok"] and [s["criterion"] for s in doc["suites"]] == [7]


def test_console_pipeline():
    gen = subprocess.run([sys.executable, "-m", "rectdecomp", "gen", "hook"], capture_output=True, text=True, check=True)
    chk = subprocess.run([sys.executable, "-m", "rectdecomp", "check", "--weak"], input=gen.stdout,
                         capture_output=True, text=True)
    assert chk.returncode == 1 and json.loads(chk.stdout)["verdict"] is False
