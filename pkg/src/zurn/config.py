"""Experiment configuration: defaults, config-file parsing, presets.

The config file is a flat ``key = value`` text format with ``#`` comments.
Labels are whitespace-separated integers; for d > 1 the vectors are
semicolon-separated, e.g. ``initial_labels = 1 0; 0 1``.  Every key can
also be set by a CLI flag; precedence is config file < ZURN_SEED
environment variable < flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    """Malformed configuration (maps to exit code 2 in the CLI)."""


@dataclass
class ExperimentConfig:
    initial_labels: list = field(default_factory=lambda: [[-1], [1]])
    d: int = 1
    k: int = 2
    additions: int = 4998
    realizations: int = 1
    seed: int = 12
    checkpoints: list = field(default_factory=list)
    mode: str = "simulate"
    output_dir: str = "out"
    bigint: bool = False
    workers: int = 1
    # statistical thresholds (documented defaults; the limit theorems are
    # asymptotic, so finite-n values are pilot-calibrated, not theory)
    z_max: float = 4.0          # moments-check |z| gate
    a_mean_z_max: float = 3.0   # a-distribution mean-vs-oracle gate
    ks_exp_max: float = 0.05    # per-realization quenched KS vs Exp(1)
    ks_gamma_max: float = 0.03  # pooled added-ball KS vs Gamma(2,1)
    quenched_pass_frac: float = 0.99  # fraction of realizations that must meet ks_exp_max
    coupling_max: float = 0.1   # d=2 shared-gamma coupling statistic
    a_epsilon: float = 1e-6     # |a| below this excludes a realization from limit checks
    pool_size: int = 100_000    # fixed-point pool size
    trials: int = 100           # gamma-stationarity trial count
    trial_pool_size: int = 20_000
    contraction_steps: int = 10

    @property
    def tau0(self) -> int:
        return len(self.initial_labels)

    def validate(self) -> "ExperimentConfig":
        if not self.initial_labels:
            raise ConfigError("initial_labels must be nonempty")
        for lab in self.initial_labels:
            if len(lab) != self.d:
                raise ConfigError(
                    f"label {lab} has length {len(lab)}, expected d={self.d}"
                )
        if self.additions < 0:
            raise ConfigError(f"additions must be >= 0, got {self.additions}")
        if self.realizations < 1:
            raise ConfigError(f"realizations must be >= 1, got {self.realizations}")
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        n_final = self.tau0 + self.additions
        for c in self.checkpoints:
            if not (self.tau0 < c <= n_final):
                raise ConfigError(
                    f"checkpoint {c} outside ({self.tau0}, {n_final}]"
                )
        return self


PRESETS = {
    # one long realization of the symmetric start; final labels for histograms
    "fig1": dict(initial_labels=[[-1], [1]], d=1, additions=4998, realizations=1),
    # empirical distribution of the scaled-mean limit, symmetric start
    "fig2a": dict(initial_labels=[[-1], [1]], d=1, additions=4998, realizations=5000),
    # same protocol started from two 1-labels (limit mean 1/3)
    "fig2b": dict(initial_labels=[[1], [1]], d=1, additions=4998, realizations=5000),
    # two-coordinate urn for the shared-gamma coupling check
    "d2": dict(initial_labels=[[1, 1], [2, 1]], d=2, additions=4998, realizations=1),
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

_INT_KEYS = {"d", "k", "additions", "realizations", "seed", "workers",
             "pool_size", "trials", "trial_pool_size", "contraction_steps"}
_FLOAT_KEYS = {"z_max", "a_mean_z_max", "ks_exp_max", "ks_gamma_max",
               "quenched_pass_frac", "coupling_max", "a_epsilon"}
_STR_KEYS = {"mode", "output_dir"}
_BOOL_KEYS = {"bigint"}
_LIST_KEYS = {"initial_labels", "checkpoints"}


def parse_labels(text: str) -> list:
    """Parse ``-1 1`` (d=1) or ``1 0; 0 1`` (d>1) into a list of int vectors."""
    groups = [g.strip() for g in text.split(";") if g.strip()]
    if not groups:
        raise ConfigError(f"no labels in {text!r}")
    out = []
    for g in groups:
        try:
            vec = [int(tok) for tok in g.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"bad label {g!r}: {exc}") from None
        if not vec:
            raise ConfigError(f"empty label group in {text!r}")
        out.append(vec)
    if len(groups) == 1 and len(out[0]) > 1 and ";" not in text:
        # "−1 1" with no semicolons means several scalar labels
        out = [[v] for v in out[0]]
    return out


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        word = raw.lower()
        if word not in _BOOL_WORDS:
            raise ConfigError(f"bad boolean for {key}: {raw!r}")
        return _BOOL_WORDS[word]
    if key == "initial_labels":
        return parse_labels(raw)
    if key == "checkpoints":
        return [int(tok) for tok in raw.replace(",", " ").split()]
    if key in _STR_KEYS:
        return raw
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_file(path) -> dict:
    """Read a key=value config file into a dict of typed values."""
    text = Path(path).read_text(encoding="utf-8")
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        try:
            out[key] = _parse_value(key, raw)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return out


def build_config(
    config_path=None,
    preset: str | None = None,
    overrides: dict | None = None,
    env: dict | None = None,
) -> ExperimentConfig:
    """Assemble the effective config: defaults < file < preset < env seed < flags."""
    values: dict = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        values.update(PRESETS[preset])
    env = os.environ if env is None else env
    if "ZURN_SEED" in env:
        try:
            values["seed"] = int(env["ZURN_SEED"])
        except ValueError:
            raise ConfigError(f"ZURN_SEED must be an integer, got {env['ZURN_SEED']!r}") from None
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    if "initial_labels" in values and "d" not in values:
        values["d"] = len(values["initial_labels"][0])
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**values).validate()


def config_items(cfg: ExperimentConfig) -> list:
    """Stable (key, rendered-value) pairs for manifests and echoes."""
    items = []
    for f in sorted(fields(cfg), key=lambda f: f.name):
        val = getattr(cfg, f.name)
        if f.name == "initial_labels":
            val = "; ".join(" ".join(str(x) for x in lab) for lab in val)
        elif f.name == "checkpoints":
            val = " ".join(str(c) for c in val)
        items.append((f.name, str(val)))
    return items
