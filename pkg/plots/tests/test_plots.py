import hashlib
from pathlib import Path

import numpy as np
import pytest

from zurn_plots import PlotSpec, SchemaError, load_values, render
from zurn_plots.cli import main


def write(path, text):
    Path(path).write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def labels_csv(tmp_path):
    rows = ["realization,ball_index,label_0"]
    rng = np.random.default_rng(3)
    for i, v in enumerate(rng.integers(-50, 200, size=400)):
        rows.append(f"0,{i},{v}")
    return write(tmp_path / "labels_final.csv", "\n".join(rows) + "\n")


@pytest.fixture
def a_csv(tmp_path):
    rows = ["realization,coord,a_final"]
    rng = np.random.default_rng(4)
    for i, v in enumerate(rng.gamma(2.0, 1 / 6, size=500)):
        rows.append(f"{i},0,{v:.17g}")
    return write(tmp_path / "a_final.csv", "\n".join(rows) + "\n")


def test_label_hist_renders(tmp_path, labels_csv):
    out = tmp_path / "h.png"
    spec = PlotSpec(input_csv=labels_csv, kind="label_hist", output_image=str(out))
    report = render(spec)
    assert out.exists() and out.stat().st_size > 0
    assert report["bins"] == 30
    assert sum(int(c) for c in report["counts"].split()) == 400


def test_a_hist_gamma_overlay(tmp_path, a_csv):
    out = tmp_path / "a.png"
    spec = PlotSpec(input_csv=a_csv, kind="a_hist", output_image=str(out), overlay="gamma")
    report = render(spec)
    assert out.exists()
    vals = load_values(spec)
    assert report["gamma_scale"] == pytest.approx(vals.mean() / 2, abs=1e-15)
    assert report["sign"] == 1


def test_custom_bin_count(tmp_path, a_csv):
    spec = PlotSpec(input_csv=a_csv, kind="a_hist", output_image=str(tmp_path / "x.png"), bins=12)
    report = render(spec)
    assert report["bins"] == 12
    assert len(report["counts"].split()) == 12


def test_identical_inputs_identical_report(tmp_path, a_csv, capsys):
    args = ["--kind", "a_hist", "--in", a_csv, "--out", str(tmp_path / "r.png"),
            "--overlay", "gamma"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_input_never_mutated(tmp_path, labels_csv):
    digest = hashlib.sha256(Path(labels_csv).read_bytes()).hexdigest()
    render(PlotSpec(input_csv=labels_csv, kind="label_hist", output_image=str(tmp_path / "m.png")))
    assert hashlib.sha256(Path(labels_csv).read_bytes()).hexdigest() == digest


def test_extra_column_rejected_with_diagnostic(tmp_path, capsys):
    bad = write(
        tmp_path / "bad.csv",
        "realization,coord,a_final,\n0,0,0.5,\n1,0,0.4,\n",
    )
    rc = main(["--kind", "a_hist", "--in", bad, "--out", str(tmp_path / "b.png")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "column mismatch" in err


def test_missing_column_rejected(tmp_path, capsys):
    bad = write(tmp_path / "bad2.csv", "realization,a_final\n0,0.5\n")
    rc = main(["--kind", "a_hist", "--in", bad, "--out", str(tmp_path / "b.png")])
    assert rc == 2
    assert "missing" in capsys.readouterr().err


def test_wrong_schema_for_kind_rejected(tmp_path, a_csv, capsys):
    rc = main(["--kind", "label_hist", "--in", a_csv, "--out", str(tmp_path / "b.png")])
    assert rc == 2


def test_missing_file_exits_2(tmp_path, capsys):
    rc = main(["--kind", "a_hist", "--in", str(tmp_path / "nope.csv"),
               "--out", str(tmp_path / "b.png")])
    assert rc == 2
