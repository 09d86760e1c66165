import subprocess
import sys

import numpy as np
import pytest

from conftest import blobs
from kmcluster.cli import main
from kmcluster.io import read_csv


@pytest.fixture
def line_csv(tmp_path):
    p = tmp_path / "line.csv"
    p.write_text("x\n0\n1\n10\n11\n")
    return p


@pytest.fixture
def blobs_csv(tmp_path):
    x, truth = blobs([[0, 0], [50, 0], [25, 40]], 40, 1.0, np.random.default_rng(8))
    p = tmp_path / "blobs.csv"
    lines = ["a,b,group"] + [f"{float(r[0])!r},{float(r[1])!r},g{t}" for r, t in zip(x, truth)]
    p.write_text("\n".join(lines) + "\n")
    return p


def report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def labels_of(path):
    rows = path.read_text().strip().splitlines()[1:]
    return [int(r.split(",")[1]) for r in rows]


@pytest.mark.parametrize("method", ["proposed", "em_gmm"])
def test_cluster_line(method, line_csv, tmp_path, capsys):
    out = tmp_path / "labels.csv"
    assert main(["cluster", "--input", str(line_csv), "--k", "2", "--method", method, "--out", str(out)]) == 0
    labs = labels_of(out)
    assert labs[0] == labs[1] != labs[2] == labs[3]
    assert set(labs) == {1, 2}
    rep = report(capsys.readouterr().out)
    assert float(rep["ssq"]) == 1.0 and rep["method"] == method
    assert "cer" not in rep


def test_cluster_with_truth(blobs_csv, tmp_path, capsys):
    rpt = tmp_path / "r.txt"
    assert main(["cluster", "--input", str(blobs_csv), "--k", "3", "--truth-col", "group",
                 "--report", str(rpt), "--no-timing"]) == 0
    rep = report(capsys.readouterr().out)
    assert float(rep["cer"]) == 0.0 and "wall_time" not in rep
    assert report(rpt.read_text()) == rep


def test_exit_codes(line_csv, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cluster", "--input", str(line_csv)])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err
    assert main(["cluster", "--input", str(line_csv), "--k", "9"]) == 3
    assert main(["cluster", "--input", str(tmp_path / "missing.csv"), "--k", "2"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,x\n")
    assert main(["cluster", "--input", str(bad), "--k", "1"]) == 2
    assert main(["cluster", "--input", str(line_csv), "--k", "2", "--restarts", "3"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--scenario", "kmeans", "--phi", "-1", "--reps", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--scenario", "nope", "--phi", "1", "--reps", "1"])
    assert exc.value.code == 2


def test_gap_command(blobs_csv, tmp_path, capsys):
    out = tmp_path / "gap.csv"
    assert main(["gap", "--input", str(blobs_csv), "--truth-col", "group", "--kmax", "6",
                 "--b", "10", "--out", str(out)]) == 0
    assert "k_hat: 3" in capsys.readouterr().out
    table = read_csv(out)
    assert table.feature_names == ["k", "log_wk", "gap", "sk"]
    assert table.data[:, 0].tolist() == [1, 2, 3, 4, 5, 6]
    assert main(["gap", "--input", str(blobs_csv), "--truth-col", "group", "--kmax", "1", "--b", "3"]) == 0
    assert "k_hat: 1" in capsys.readouterr().err


def test_simulate_writes_summary(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--scenario", "kmeans", "--phi", "0.8", "--reps", "2",
                 "--methods", "proposed,hw", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "method,rep,cer,n_singletons,seconds" and len(lines) == 5
    summary = capsys.readouterr().out
    assert summary.startswith("proposed: reps=2") and "hw: " in summary


def test_stamps_command(tmp_path):
    out = tmp_path / "st.csv"
    assert main(["stamps", "--m-range", "1..2", "--reps", "2", "--methods", "proposed",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "method,m,reps,failed,mean_cer_pct"
    assert [l.split(",")[:2] for l in lines[1:]] == [["proposed", "1"], ["proposed", "2"]]


def two_blob_base(tmp_path):
    x, truth = blobs([[0, 0], [30, 0]], 50, 1.0, np.random.default_rng(4))
    p = tmp_path / "base.csv"
    p.write_text("a,b,g\n" + "\n".join(f"{float(r[0])!r},{float(r[1])!r},{t}" for r, t in zip(x, truth)) + "\n")
    return p


def stamp_cers(tmp_path, m_range, reps):
    out = tmp_path / "curve.csv"
    assert main(["stamps", "--input", str(two_blob_base(tmp_path)), "--truth-col", "g", "--m-range", m_range,
                 "--reps", str(reps), "--methods", "proposed", "--seed", "1", "--out", str(out)]) == 0
    return [float(l.split(",")[4]) / 100 for l in out.read_text().splitlines()[1:]]


def test_stamps_two_blobs_m5(tmp_path):
    assert stamp_cers(tmp_path, "5..5", 10)[0] < 0.02


def test_stamps_curve_flat(tmp_path):
    curve = stamp_cers(tmp_path, "1..15", 10)
    assert max(curve) - min(curve) < 0.05


def test_stamps_needs_truth_col(blobs_csv):
    assert main(["stamps", "--input", str(blobs_csv), "--reps", "1"]) == 2


def test_methods_all(tmp_path):
    out = tmp_path / "all.csv"
    assert main(["simulate", "--scenario", "kmeans", "--phi", "0.8", "--reps", "1", "--methods", "all",
                 "--seed", "3", "--out", str(out)]) == 0
    methods = [l.split(",")[0] for l in out.read_text().splitlines()[1:]]
    assert methods == ["proposed", "hw", "lloyd", "forgy", "macqueen", "hw_pp", "lloyd_pp",
                       "forgy_pp", "macqueen_pp", "em_gmm"]


def test_module_entry_point(line_csv):
    proc = subprocess.run([sys.executable, "-m", "kmcluster", "cluster", "--input", str(line_csv),
                           "--k", "2", "--no-timing"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ssq: 1.0" in proc.stdout
