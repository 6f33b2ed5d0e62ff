import os
from pathlib import Path

import numpy as np
import pytest

from zurn.cli import main
from zurn.config import (
    ConfigError,
    ExperimentConfig,
    build_config,
    parse_config_file,
    parse_labels,
)
from zurn.csvio import fmt_value


def read(path):
    return Path(path).read_text(encoding="utf-8")


# --- config ---------------------------------------------------------------


def test_parse_labels_scalar_list():
    assert parse_labels("-1 1") == [[-1], [1]]
    assert parse_labels("5") == [[5]]
    assert parse_labels("-1, 1") == [[-1], [1]]


def test_parse_labels_vectors():
    assert parse_labels("1 0; 0 1") == [[1, 0], [0, 1]]
    # a single d>1 label needs a trailing semicolon to disambiguate
    assert parse_labels("1 0;") == [[1, 0]]


def test_parse_labels_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_labels("a b")
    with pytest.raises(ConfigError):
        parse_labels("   ")


def test_parse_config_file(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        """
        # an experiment
        initial_labels = 1 1
        additions = 100   # inline comment
        realizations = 7
        seed = 99
        checkpoints = 5 10
        bigint = true
        output_dir = results
        """
    )
    values = parse_config_file(cfg_file)
    assert values["initial_labels"] == [[1], [1]]
    assert values["additions"] == 100
    assert values["realizations"] == 7
    assert values["seed"] == 99
    assert values["checkpoints"] == [5, 10]
    assert values["bigint"] is True
    assert values["output_dir"] == "results"


def test_parse_config_rejects_unknown_key(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("not_a_key = 1\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg_file)


def test_parse_config_rejects_bad_line(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("just some words\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg_file)


def test_build_config_precedence(tmp_path, monkeypatch):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("seed = 1\nadditions = 10\nrealizations = 3\n")
    # config alone
    cfg = build_config(config_path=cfg_file, env={})
    assert cfg.seed == 1
    # env beats config
    cfg = build_config(config_path=cfg_file, env={"ZURN_SEED": "2"})
    assert cfg.seed == 2
    # flag beats env
    cfg = build_config(config_path=cfg_file, env={"ZURN_SEED": "2"}, overrides={"seed": 3})
    assert cfg.seed == 3
    assert cfg.additions == 10


def test_build_config_presets():
    cfg = build_config(preset="fig2b", overrides={"mode": "a-distribution"}, env={})
    assert cfg.initial_labels == [[1], [1]]
    assert cfg.additions == 4998
    assert cfg.realizations == 5000


def test_build_config_validates_checkpoints():
    with pytest.raises(ConfigError):
        build_config(overrides={"checkpoints": [2], "additions": 5}, env={})
    with pytest.raises(ConfigError):
        build_config(overrides={"checkpoints": [100], "additions": 5}, env={})


def test_config_validate_catches_dim_mismatch():
    with pytest.raises(ConfigError):
        ExperimentConfig(initial_labels=[[1, 2]], d=1).validate()


# --- csv formatting --------------------------------------------------------


def test_fmt_value_float_roundtrip():
    for x in (1 / 3, 0.1, 123456.789e-12, np.float64(2.0) / 3):
        assert float(fmt_value(float(x))) == float(x)
    assert fmt_value(7) == "7"
    assert fmt_value(True) == "1"


# --- CLI commands ----------------------------------------------------------


def test_simulate_zero_additions_preserves_initial(tmp_path):
    out = tmp_path / "o"
    rc = main(
        ["simulate", "--initial", "-1 1", "--additions", "0", "--seed", "3",
         "--out", str(out)]
    )
    assert rc == 0
    body = read(out / "labels_final.csv").splitlines()
    assert body == ["realization,ball_index,label_0", "0,0,-1", "0,1,1"]


def test_simulate_rerun_byte_identical(tmp_path):
    out = tmp_path / "a"
    args = ["simulate", "--initial", "-1 1", "--additions", "300", "--seed", "17",
            "--checkpoints", "100 302", "--out", str(out)]
    names = ("labels_final.csv", "a_trace.csv", "summary.csv", "manifest.txt")
    assert main(args) == 0
    first = {name: read(out / name) for name in names}
    assert main(args) == 0
    for name in names:
        assert read(out / name) == first[name]


def test_outputs_independent_of_worker_count(tmp_path):
    out = tmp_path / "w"
    base = ["a-distribution", "--initial", "1 1", "--additions", "60",
            "--realizations", "24", "--seed", "5", "--out", str(out)]
    assert main(base + ["--workers", "1"]) == 0
    serial = read(out / "a_final.csv")
    assert main(base + ["--workers", "2"]) == 0
    assert read(out / "a_final.csv") == serial


def test_a_distribution_zero_additions_exact(tmp_path):
    out = tmp_path / "o"
    rc = main(
        ["a-distribution", "--initial", "1 1", "--additions", "0",
         "--realizations", "2", "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    lines = read(out / "a_final.csv").splitlines()
    assert lines[0] == "realization,coord,a_final"
    vals = [float(l.split(",")[2]) for l in lines[1:]]
    assert vals == [1 / 3, 1 / 3]


def test_moments_check_deterministic_urn_exact(tmp_path):
    out = tmp_path / "o"
    rc = main(
        ["moments-check", "--initial", "1 1", "--additions", "1",
         "--realizations", "100", "--checkpoints", "3", "--seed", "2",
         "--out", str(out)]
    )
    assert rc == 0
    lines = read(out / "moments.csv").splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["mc_r"]) == 16.0
    assert float(row["mc_q"]) == 6.0
    assert float(row["exact_r"]) == 16.0
    assert float(row["exact_q"]) == 6.0
    assert float(row["stderr_r"]) == 0.0
    assert float(row["z_r"]) == 0.0


def test_moments_check_symmetric_urn_statistical(tmp_path):
    rc = main(
        ["moments-check", "--initial", "-1 1", "--additions", "8",
         "--realizations", "4000", "--checkpoints", "3 10", "--seed", "4",
         "--out", str(tmp_path / "o")]
    )
    assert rc == 0


def test_moments_check_requires_checkpoints(tmp_path):
    rc = main(
        ["moments-check", "--initial", "1 1", "--additions", "5",
         "--realizations", "3", "--out", str(tmp_path / "o")]
    )
    assert rc == 2


def test_limit_check_requires_length(tmp_path):
    rc = main(
        ["limit-check", "--initial", "1 1", "--additions", "10",
         "--realizations", "2", "--out", str(tmp_path / "o")]
    )
    assert rc == 2


def test_overflow_exit_codes(tmp_path):
    rc = main(
        ["simulate", "--initial", "3000000000", "--additions", "5",
         "--seed", "1", "--out", str(tmp_path / "s")]
    )
    assert rc == 3
    summary = read(tmp_path / "s" / "summary.csv").splitlines()
    assert summary[1].endswith(",1")  # overflow flag set
    rc = main(
        ["moments-check", "--initial", "3000000000", "--additions", "5",
         "--realizations", "2", "--checkpoints", "3", "--seed", "1",
         "--out", str(tmp_path / "m")]
    )
    assert rc == 3


def test_overflow_avoided_with_bigint(tmp_path):
    rc = main(
        ["simulate", "--initial", "3000000000", "--additions", "5",
         "--seed", "1", "--bigint", "--out", str(tmp_path / "s")]
    )
    assert rc == 0


def test_bad_config_path_exits_2(tmp_path):
    rc = main(["simulate", "--config", str(tmp_path / "missing.cfg")])
    assert rc == 2


def test_env_seed_used(tmp_path, monkeypatch):
    monkeypatch.setenv("ZURN_SEED", "123")
    out1 = tmp_path / "env"
    rc = main(["simulate", "--initial", "-1 1", "--additions", "50", "--out", str(out1)])
    assert rc == 0
    assert "seed = 123" in read(out1 / "manifest.txt")
    # flag wins over env
    out2 = tmp_path / "flag"
    main(["simulate", "--initial", "-1 1", "--additions", "50", "--seed", "9",
          "--out", str(out2)])
    assert "seed = 9" in read(out2 / "manifest.txt")


def test_manifest_echoes_config(tmp_path):
    out = tmp_path / "o"
    main(["simulate", "--initial", "1 1", "--additions", "3", "--seed", "6",
          "--out", str(out)])
    text = read(out / "manifest.txt")
    assert "command = simulate" in text
    assert "initial_labels = 1; 1" in text
    assert "additions = 3" in text


def test_fig1_preset_writes_5000_labels(tmp_path):
    out = tmp_path / "fig1"
    rc = main(["simulate", "--preset", "fig1", "--seed", "12", "--out", str(out)])
    assert rc == 0
    lines = read(out / "labels_final.csv").splitlines()
    assert lines[0] == "realization,ball_index,label_0"
    assert len(lines) == 1 + 5000


def test_fixed_point_writes_contraction_csv(tmp_path):
    out = tmp_path / "o"
    rc = main(["fixed-point", "--seed", "12", "--pool-size", "20000",
               "--trials", "20", "--out", str(out)])
    assert rc == 0
    lines = read(out / "fixedpoint.csv").splitlines()
    assert lines[0] == "iteration,distance,ratio"
    assert len(lines) == 12  # initial distance + 10 iterations
