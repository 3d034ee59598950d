import json

import pytest

from symlab.cli import cli_main
from symlab.datasets import RatedDataset, identity_training_set


def run(capsys, *argv):
    code = cli_main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_theorem1_passes(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "1", "--learner", "pos-unigram",
                       "--symmetry", "yz-swap", "--dataset", "identity")
    assert code == 0 and out.startswith("PASS")


def test_check_theorem1_memorizer_sonority_json(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "1", "--learner", "memorizer",
                       "--symmetry", "reversal", "--dataset", "sonority", "--json")
    assert code == 0 and json.loads(out)["max_abs_deviation"] == 0.0


def test_check_theorem1_precondition(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "1", "--learner", "identity-oracle",
                       "--symmetry", "yz-swap", "--dataset", "identity")
    assert code == 1 and "precondition failed" in out and "YY" in out


def test_check_theorem2_oracle_fails(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "2", "--learner", "identity-oracle",
                       "--symmetry", "yz-swap", "--dataset", "identity", "--reps", "5")
    assert code == 1 and out.startswith("FAIL")


def test_check_theorem2_small_mlp(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "2", "--learner", "mlp", "--width", "8",
                       "--max-iterations", "20", "--symmetry", "pos-perm:2:(YZ)",
                       "--dataset", "identity", "--reps", "6")
    assert code == 0, out


def test_check_mlp_refuses_theorem1(capsys):
    code, _, err = run(capsys, "check", "--theorem", "1", "--learner", "mlp",
                       "--symmetry", "yz-swap", "--dataset", "identity")
    assert code == 1 and "theorem 2" in err


def test_usage_errors(capsys):
    assert run(capsys, "check", "--theorem", "3")[0] == 2
    assert run(capsys, "check", "--theorem", "1", "--learner", "memorizer",
               "--symmetry", "pos-perm:2:(Y", "--dataset", "eq1")[0] == 2
    assert run(capsys, "symmetry", "--symmetry", "reversal", "abc")[0] == 2
    assert run(capsys)[0] == 2


def test_dataset_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "dataset", "identity", "--seed", "4")
    assert code == 0
    assert RatedDataset.from_csv(out) == identity_training_set(4)
    code, out, _ = run(capsys, "dataset", "battery")
    assert code == 0 and len(out.split()) == 6
    out_file = tmp_path / "cb.csv"
    assert run(capsys, "dataset", "codebook", "--k", "8", "--out", str(out_file))[0] == 0
    assert len(out_file.read_text().splitlines()) == 27
    assert run(capsys, "dataset", "codebook", "--k", "4")[0] == 1


def test_symmetry_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "symmetry", "--symmetry", "reversal", "AB", "YZ")
    assert code == 0 and out == "AB\tBA\nYZ\tZY\n"
    code, out, _ = run(capsys, "symmetry", "--symmetry", "pos-perm:1:(ABC)", "--verify")
    assert code == 0 and "bijection on 676" in out
    path = tmp_path / "d.csv"
    path.write_text(identity_training_set(0).to_csv())
    code, out, _ = run(capsys, "symmetry", "--symmetry", "yz-swap", "--input", str(path), "--invariant")
    assert code == 0 and "is invariant" in out
    code, out, _ = run(capsys, "symmetry", "--symmetry", "reversal", "--input", str(path), "--invariant")
    assert code == 1
    code, out, _ = run(capsys, "symmetry", "--symmetry", "reversal", "--input", str(path))
    assert code == 0 and out.startswith("word,rating")


def test_run_and_report(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("SYMLAB_SEED", raising=False)
    out_dir = tmp_path / "r"
    code, out, _ = run(capsys, "run", "--repetitions", "3", "--width", "8", "--max-iterations", "10",
                       "--output-dir", str(out_dir), "--report")
    assert code == 0
    svgs = sorted(p.name for p in out_dir.glob("*.svg"))
    assert len(svgs) == 6 and (out_dir / "scores_table.txt").exists()
    (out_dir / "scores_table.txt").unlink()
    code, _, _ = run(capsys, "report", "--run-dir", str(out_dir), "--style", "table-text")
    assert code == 0 and (out_dir / "scores_table.txt").exists()
    assert run(capsys, "report", "--run-dir", str(tmp_path / "missing"))[0] == 2
