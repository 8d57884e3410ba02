import csv
import io

import pytest

from fairmit.harness.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def as_dict(out):
    return {row[0]: row[1] for row in list(csv.reader(io.StringIO(out)))[1:]}


@pytest.fixture
def scores(tmp_path):
    p = tmp_path / "scores.csv"
    p.write_text("id,label,score\n" + "".join(
        f"m{i},male,{0.3 + i / 40}\n" for i in range(20)) + "".join(f"f{i},female,{0.1 + i / 40}\n" for i in range(20)))
    return p


def test_evaluate(capsys, scores):
    code, out, _ = run(capsys, "evaluate", "--scores", str(scores))
    assert code == 0
    d = as_dict(out)
    assert int(d["total"]) == 40 and float(d["threshold"]) == 0.5


def test_evaluate_threshold_zero(capsys, scores):
    _, out, _ = run(capsys, "evaluate", "--scores", str(scores), "--threshold", "0")
    assert int(as_dict(out)["dpd"]) == 40


def test_threshold(capsys, scores):
    code, out, _ = run(capsys, "threshold", "--scores", str(scores), "--strategy", "equal-total")
    d = as_dict(out)
    assert code == 0 and float(d["objective"]) == 0 and int(d["dpd"]) == 0


def test_reweight(capsys):
    code, out, _ = run(capsys, "reweight", "--male", "1067", "--female", "2061")
    d = as_dict(out)
    assert code == 0 and round(float(d["w_male"]), 4) == 1.4658


def test_input_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,label,score\na,1,0.5\nb,0,0.2\nc,1,0.1\nd,0,1.2\n")
    code, _, err = run(capsys, "evaluate", "--scores", str(bad))
    assert code == 1 and ":5:" in err
    assert run(capsys, "reweight", "--male", "0", "--female", "3")[0] == 1


def test_config_error_exit_code(capsys, tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text("threshold = equal-odds\n")
    assert run(capsys, "experiment", "--config", str(conf), "--out", str(tmp_path / "r.csv"))[0] == 3
    assert run(capsys, "experiment", "--config", str(tmp_path / "none.conf"), "--out", "x.csv")[0] == 3


def test_divergence_exit_code(capsys, tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text("train.lr0 = 1e200\nsynthetic.source_count = 10\nsynthetic.target_count = 60\n"
                    "synthetic.image_height = 4\nsynthetic.image_width = 4\n")
    with pytest.warns(RuntimeWarning):
        code, _, err = run(capsys, "experiment", "--config", str(conf), "--out", str(tmp_path / "r.csv"))
    assert code == 2 and "diverged" in err


def test_synth(capsys, tmp_path):
    spec = tmp_path / "spec.conf"
    spec.write_text("source_count = 40\ntarget_count = 30\nimage_height = 4\nimage_width = 4\n")
    code, out, _ = run(capsys, "synth", "--spec", str(spec), "--out", str(tmp_path / "data"))
    assert code == 0
    assert (tmp_path / "data" / "source" / "index.csv").exists()
    assert "target,30" in out


def test_experiment_and_report(capsys, tmp_path):
    spec = tmp_path / "spec.conf"
    spec.write_text("source_count = 200\ntarget_count = 100\nimage_height = 4\nimage_width = 4\n")
    run(capsys, "synth", "--spec", str(spec), "--out", str(tmp_path / "data"))
    conf = tmp_path / "exp.conf"
    conf.write_text(f"""mode = matrix
transfer = no, yes
threshold = no, equal-false
data.source = {tmp_path / 'data' / 'source'}
data.target = {tmp_path / 'data' / 'target'}
model.hidden = 8
train.max_epochs = 2
""")
    out_csv = tmp_path / "res" / "results.csv"
    code, out, err = run(capsys, "experiment", "--config", str(conf), "--out", str(out_csv))
    assert code == 0, err
    assert out_csv.exists() and out_csv.with_suffix(".metrics.png").exists()
    assert out_csv.with_suffix(".curves.png").exists()
    assert len(out_csv.read_text().strip().split("\n")) == 5
    code, md, _ = run(capsys, "report", "--in", str(out_csv), "--format", "markdown",
                      "--figure", str(tmp_path / "fig.png"))
    assert code == 0 and md.startswith("| Network |") and (tmp_path / "fig.png").exists()
