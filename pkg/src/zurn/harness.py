"""Experiment drivers behind the ``zurn`` CLI.

Each command runs M independent realizations (each with its own
seed-derived stream), reduces results in realization-index order regardless
of worker scheduling, writes the documented CSV files plus a manifest, and
returns a process exit code:

    0  all checks passed
    1  a statistical check failed
    2  configuration or I/O error
    3  arithmetic overflow with bigint disabled

Realizations are distributed over a process pool when ``workers > 1``;
because every realization owns stream ``(seed, realization_index)`` and the
reduction order is fixed, outputs are byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, fixedpoint, oracle
from .config import ConfigError, ExperimentConfig
from .csvio import write_csv, write_manifest
from .rng import RngStream
from .urn import UrnOverflowError, new_urn, run

EXIT_OK = 0
EXIT_STAT_FAIL = 1
EXIT_CONFIG = 2
EXIT_OVERFLOW = 3

# realization-index space for the fixed-point command's blocks, far above
# any realistic trial count so streams never collide
_FP_EXP_STATIONARY = 1_000_000
_FP_EXP_CONVERGE = 1_000_001
_FP_CONTRACTION = 1_000_002
_FP_K3 = 1_000_003

_worker_state = {}


def _init_worker(cfg: ExperimentConfig, mode: str):
    _worker_state["cfg"] = cfg
    _worker_state["mode"] = mode


def _worker_entry(index: int) -> dict:
    return _one_realization(_worker_state["cfg"], _worker_state["mode"], index)


def _one_realization(cfg: ExperimentConfig, mode: str, index: int) -> dict:
    rng = RngStream(cfg.seed, index)
    urn = new_urn(cfg.initial_labels, d=cfg.d, bigint=cfg.bigint)
    rec: dict = {"i": index, "overflow": False}
    trace: list = []
    recorder = (lambda snap: trace.append((snap.n, snap.a))) if cfg.checkpoints else None
    try:
        run(urn, cfg.additions, rng, k=cfg.k, checkpoints=cfg.checkpoints, recorder=recorder)
    except UrnOverflowError as exc:
        rec["overflow"] = True
        rec["overflow_at"] = exc.ball
        return rec
    rec["a_final"] = analysis.compute_a(urn).tolist()
    if mode == "simulate":
        if trace:  # validate the recorded trace before shipping it back
            analysis.ATrace([n for n, _ in trace], [a for _, a in trace])
        rec["trace"] = trace
        rec["labels"] = urn.labels
        rec["signc"] = [analysis.sign_concentration(urn, j) for j in range(cfg.d)]
    elif mode == "limit":
        a = np.asarray(rec["a_final"])
        rec["excluded"] = bool(np.any(np.abs(a) < cfg.a_epsilon))
        if not rec["excluded"]:
            n = urn.n
            if cfg.d == 1:
                normalized = analysis.normalized_labels(urn, "by_nA")
                rec["ks_exp"] = analysis.ks_statistic(
                    np.sort(normalized.values),
                    lambda x: oracle.limit_cdf(x, "exp_signed", 1.0),
                )
                rec["x_final_norm"] = float(urn.label_at(n - 1) / (n * a[0]))
            else:
                tail = min(500, cfg.additions)
                x_tail = urn.labels_array(dtype=np.float64)[-tail:]
                if cfg.d == 2:
                    rec["coupling"] = analysis.coordinate_coupling(x_tail, a)
    return rec


def _one_moments_realization(cfg: ExperimentConfig, index: int) -> dict:
    rng = RngStream(cfg.seed, index)
    urn = new_urn(cfg.initial_labels, d=cfg.d, bigint=cfg.bigint)
    rows = []
    run(
        urn,
        cfg.additions,
        rng,
        k=cfg.k,
        checkpoints=cfg.checkpoints,
        recorder=lambda snap: rows.append((snap.n, snap.r[0], snap.q[0])),
    )
    return {"i": index, "overflow": False, "rq": rows}


def _moments_worker_entry(index: int) -> dict:
    cfg = _worker_state["cfg"]
    try:
        return _one_moments_realization(cfg, index)
    except UrnOverflowError as exc:
        return {"i": index, "overflow": True, "overflow_at": exc.ball}


def _map_realizations(cfg: ExperimentConfig, mode: str, entry=None):
    """Yield per-realization records in index order, inline or via a pool."""
    indices = range(cfg.realizations)
    entry_fn = entry or _worker_entry
    if cfg.workers <= 1:
        _init_worker(cfg, mode)
        for i in indices:
            yield entry_fn(i)
        return
    chunk = max(1, cfg.realizations // (cfg.workers * 8))
    with ProcessPoolExecutor(
        max_workers=cfg.workers, initializer=_init_worker, initargs=(cfg, mode)
    ) as pool:
        yield from pool.map(entry_fn, indices, chunksize=chunk)


def _prepare_out(cfg: ExperimentConfig, command: str) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, cfg, command)
    return out


def cmd_simulate(cfg: ExperimentConfig) -> int:
    """Run realizations, dump final labels, the scaled-mean trace and a summary."""
    out = _prepare_out(cfg, "simulate")
    label_rows = []
    trace_rows = []
    summary_rows = []
    any_overflow = False
    for rec in _map_realizations(cfg, "simulate"):
        i = rec["i"]
        if rec["overflow"]:
            any_overflow = True
            for j in range(cfg.d):
                summary_rows.append((i, j, float("nan"), float("nan"), 0, 1))
            continue
        for ball_index, lab in enumerate(rec["labels"]):
            coords = (lab,) if cfg.d == 1 else lab
            label_rows.append((i, ball_index) + tuple(coords))
        for n, a in rec["trace"]:
            for j in range(cfg.d):
                trace_rows.append((i, n, j, a[j]))
        for j in range(cfg.d):
            sc = rec["signc"][j]
            summary_rows.append(
                (i, j, rec["a_final"][j], sc.fraction, int(sc.zero_a_fallback), 0)
            )
    header = ["realization", "ball_index"] + [f"label_{j}" for j in range(cfg.d)]
    write_csv(out / "labels_final.csv", header, label_rows)
    write_csv(out / "a_trace.csv", ["realization", "n", "coord", "a"], trace_rows)
    write_csv(
        out / "summary.csv",
        ["realization", "coord", "a_final", "sign_concentration", "zero_a_fallback", "overflow"],
        summary_rows,
    )
    print(f"simulate: wrote {len(label_rows)} label rows for {cfg.realizations} realization(s) to {out}")
    return EXIT_OVERFLOW if any_overflow else EXIT_OK


def cmd_a_distribution(cfg: ExperimentConfig) -> int:
    """Empirical distribution of the scaled mean across many realizations."""
    if cfg.realizations < 2:
        raise ConfigError("a-distribution needs at least 2 realizations")
    out = _prepare_out(cfg, "a-distribution")
    rows = []
    finals = []
    any_overflow = False
    for rec in _map_realizations(cfg, "a"):
        if rec["overflow"]:
            any_overflow = True
            continue
        finals.append(rec["a_final"])
        for j in range(cfg.d):
            rows.append((rec["i"], j, rec["a_final"][j]))
    write_csv(out / "a_final.csv", ["realization", "coord", "a_final"], rows)
    a = np.asarray(finals, dtype=float)
    s0 = [sum(lab[j] for lab in cfg.initial_labels) for j in range(cfg.d)]
    worst_z = 0.0
    for j in range(cfg.d):
        mean = float(a[:, j].mean())
        stderr = float(a[:, j].std(ddof=1) / np.sqrt(a.shape[0]))
        oracle_mean = s0[j] / (cfg.tau0 * (cfg.tau0 + 1))
        z = 0.0 if stderr == 0 and mean == oracle_mean else (
            float("inf") if stderr == 0 else (mean - oracle_mean) / stderr
        )
        worst_z = max(worst_z, abs(z))
        print(
            f"a-distribution coord {j}: mean={mean:.6g} stderr={stderr:.3g} "
            f"oracle={oracle_mean:.6g} z={z:+.3f}"
        )
    if any_overflow:
        return EXIT_OVERFLOW
    return EXIT_STAT_FAIL if worst_z > cfg.a_mean_z_max else EXIT_OK


def cmd_moments_check(cfg: ExperimentConfig) -> int:
    """Monte Carlo means of the squared-sum and sum-of-squares moments vs the
    exact recursion; |z| gate per checkpoint."""
    if cfg.d != 1:
        raise ConfigError("moments-check is a per-coordinate (d=1) check")
    if not cfg.checkpoints:
        raise ConfigError("moments-check needs explicit checkpoints")
    out = _prepare_out(cfg, "moments-check")
    per_cp_r = {n: [] for n in cfg.checkpoints}
    per_cp_q = {n: [] for n in cfg.checkpoints}
    for rec in _map_realizations(cfg, "moments", entry=_moments_worker_entry):
        if rec["overflow"]:
            print(f"moments-check: overflow in realization {rec['i']} at ball {rec['overflow_at']}; aborting")
            return EXIT_OVERFLOW
        for n, r, q in rec["rq"]:
            per_cp_r[n].append(r)
            per_cp_q[n].append(q)

    s0 = sum(lab[0] for lab in cfg.initial_labels)
    q0 = sum(lab[0] ** 2 for lab in cfg.initial_labels)
    start = oracle.MomentPair(float(s0 * s0), float(q0))
    rows = []
    worst = 0.0
    m = cfg.realizations
    for n in cfg.checkpoints:
        exact = oracle.moment_recursion(cfg.tau0, start, n)
        r_arr = np.asarray(per_cp_r[n], dtype=float)
        q_arr = np.asarray(per_cp_q[n], dtype=float)
        z_r = _zscore(r_arr, exact.r)
        z_q = _zscore(q_arr, exact.q)
        rows.append(
            (
                n,
                r_arr.mean(),
                q_arr.mean(),
                exact.r,
                exact.q,
                r_arr.std(ddof=1) / np.sqrt(m) if m > 1 else 0.0,
                q_arr.std(ddof=1) / np.sqrt(m) if m > 1 else 0.0,
                z_r,
                z_q,
            )
        )
        worst = max(worst, abs(z_r), abs(z_q))
        print(f"moments-check n={n}: z_r={z_r:+.3f} z_q={z_q:+.3f}")
    write_csv(
        out / "moments.csv",
        ["n", "mc_r", "mc_q", "exact_r", "exact_q", "stderr_r", "stderr_q", "z_r", "z_q"],
        rows,
    )
    return EXIT_STAT_FAIL if worst > cfg.z_max else EXIT_OK


def _zscore(samples: np.ndarray, exact: float) -> float:
    mean = samples.mean()
    if samples.size > 1:
        stderr = samples.std(ddof=1) / np.sqrt(samples.size)
    else:
        stderr = 0.0
    if stderr == 0:
        return 0.0 if mean == exact else float("inf")
    return float((mean - exact) / stderr)


def cmd_limit_check(cfg: ExperimentConfig) -> int:
    """Quenched draw-law and added-ball limit-law checks.

    d=1: every realization's labels, normalized by n times its own scaled
    mean, are KS-tested against Exp(1); the final added balls, same
    normalization, are pooled across realizations and KS-tested against
    Gamma(2,1).  d=2: the shared-gamma coupling statistic over the last 500
    balls.  Labels within a realization are dependent, so thresholds are
    empirical (documented config defaults), not distribution-theory
    quantiles.
    """
    n_final = cfg.tau0 + cfg.additions
    if n_final < 1000:
        raise ConfigError(f"limit-check needs at least 1000 balls, got {n_final}")
    if cfg.d > 2:
        raise ConfigError("limit-check supports d=1 and d=2")
    out = _prepare_out(cfg, "limit-check")
    rows = []
    pooled = []
    quenched_pass = 0
    quenched_total = 0
    excluded = 0
    coupling_ok = True
    any_overflow = False
    for rec in _map_realizations(cfg, "limit"):
        i = rec["i"]
        if rec["overflow"]:
            any_overflow = True
            continue
        if rec.get("excluded"):
            excluded += 1
            rows.append(("excluded_low_a", i, 0, rec["a_final"][0], cfg.a_epsilon, 1))
            continue
        if cfg.d == 1:
            ks = rec["ks_exp"]
            ok = ks < cfg.ks_exp_max
            quenched_total += 1
            quenched_pass += ok
            rows.append(("quenched_exp", i, 0, ks, cfg.ks_exp_max, int(ok)))
            pooled.append(rec["x_final_norm"])
        else:
            c = rec["coupling"]
            ok = c < cfg.coupling_max
            coupling_ok &= ok
            rows.append(("coordinate_coupling", i, -1, c, cfg.coupling_max, int(ok)))

    failed = False
    if cfg.d == 1 and pooled:
        pooled_arr = np.sort(np.asarray(pooled, dtype=float))
        ks_pool = analysis.ks_statistic(
            pooled_arr, lambda x: oracle.limit_cdf(x, "gamma2", 1.0)
        )
        ok = ks_pool < cfg.ks_gamma_max
        rows.append(("pooled_gamma", -1, 0, ks_pool, cfg.ks_gamma_max, int(ok)))
        frac = quenched_pass / quenched_total if quenched_total else 1.0
        print(
            f"limit-check: quenched pass {quenched_pass}/{quenched_total} "
            f"(need fraction {cfg.quenched_pass_frac}), pooled KS={ks_pool:.4f} "
            f"(max {cfg.ks_gamma_max}), excluded {excluded}"
        )
        failed = (not ok) or (frac < cfg.quenched_pass_frac)
    elif cfg.d == 2:
        print(f"limit-check: coupling ok={coupling_ok}, excluded {excluded}")
        failed = not coupling_ok
    write_csv(
        out / "limit_report.csv",
        ["check", "realization", "coord", "statistic", "threshold", "passed"],
        rows,
    )
    if any_overflow:
        return EXIT_OVERFLOW
    return EXIT_STAT_FAIL if failed else EXIT_OK


def cmd_fixed_point(cfg: ExperimentConfig) -> int:
    """Fixed-point battery: Gamma(2,1) stationarity trials, exponential
    stationarity and convergence, the coupled contraction factor, and the
    k=3 non-Gamma demonstration."""
    from scipy.stats import gamma as scipy_gamma

    out = _prepare_out(cfg, "fixed-point")
    m = cfg.pool_size
    failures = []

    # Gamma(2,1) stationarity: fresh pool, one k=2 iteration, two-sample KS
    mm = cfg.trial_pool_size
    crit = analysis.ks_critical(0.01, mm, mm)
    passes = 0
    for t in range(cfg.trials):
        rng = RngStream(cfg.seed, t)
        pool = fixedpoint.SamplePool(rng.gamma(2.0, 1.0, size=mm))
        pool = fixedpoint.iterate_pool(pool, 2, rng)
        fresh = rng.gamma(2.0, 1.0, size=mm)
        passes += analysis.ks_two_sample(pool.samples, fresh) <= crit
    need = int(np.ceil(0.95 * cfg.trials))
    print(f"fixed-point gamma stationarity: {passes}/{cfg.trials} trials pass at 0.01 (need {need})")
    if passes < need:
        failures.append("gamma_stationarity")

    # exponential stationarity: Exp(1) pool stays within 2x the fresh-pool floor
    rng = RngStream(cfg.seed, _FP_EXP_STATIONARY)
    pool = fixedpoint.SamplePool(rng.exponential(1.0, size=m))
    floor = _exp_floor(rng, m)
    worst = 0.0
    for _ in range(20):
        pool = fixedpoint.iterate_exp_pool(pool, rng)
        ks = analysis.ks_statistic(
            np.sort(pool.samples), lambda x: oracle.limit_cdf(x, "exp_signed", 1.0)
        )
        worst = max(worst, ks)
    print(f"fixed-point exp stationarity: max KS={worst:.5f} vs 2x floor={2 * floor:.5f}")
    if worst > 2 * floor:
        failures.append("exp_stationarity")

    # exponential convergence: mean-1 uniform start, 30 iterations
    rng = RngStream(cfg.seed, _FP_EXP_CONVERGE)
    pool = fixedpoint.SamplePool(rng.uniform(0.0, 2.0, size=m))
    for _ in range(30):
        pool = fixedpoint.iterate_exp_pool(pool, rng)
    ks = analysis.ks_statistic(
        np.sort(pool.samples), lambda x: oracle.limit_cdf(x, "exp_signed", 1.0)
    )
    floor = _exp_floor(rng, m)
    print(f"fixed-point exp convergence: KS={ks:.5f} vs 2x floor={2 * floor:.5f}")
    if ks > 2 * floor:
        failures.append("exp_convergence")

    # coupled contraction factor
    rng = RngStream(cfg.seed, _FP_CONTRACTION)
    p = fixedpoint.SamplePool(rng.gamma(2.0, 1.0, size=m))
    q = fixedpoint.SamplePool(rng.exponential(2.0, size=m))
    dists = fixedpoint.contraction_estimate(p, q, cfg.contraction_steps, rng)
    ratios = fixedpoint.step_ratios(dists)
    geo = float(np.exp(np.nanmean(np.log(ratios))))
    fp_rows = [(t, dists[t], ratios[t - 1] if t >= 1 else float("nan")) for t in range(len(dists))]
    write_csv(out / "fixedpoint.csv", ["iteration", "distance", "ratio"], fp_rows)
    print(f"fixed-point contraction: geometric-mean ratio={geo:.4f} (theory 2/3)")
    if not (0.55 <= geo <= 0.78):
        failures.append("contraction")

    # k=3 shape-stationary pool must fail the moment-fitted gamma KS test
    rng = RngStream(cfg.seed, _FP_K3)
    pool = fixedpoint.SamplePool(rng.exponential(1.0, size=m))
    for _ in range(60):
        pool = fixedpoint.iterate_pool(pool, 3, rng)
        pool = fixedpoint.SamplePool(pool.samples / pool.samples.mean())
    x = pool.samples
    shape = x.mean() ** 2 / x.var()
    scale = x.var() / x.mean()
    ks3 = analysis.ks_statistic(np.sort(x), lambda v: scipy_gamma.cdf(v, a=shape, scale=scale))
    crit3 = analysis.ks_critical(0.01, m)
    print(
        f"fixed-point k=3: moment-fitted gamma shape={shape:.3f}, "
        f"KS={ks3:.5f} vs crit={crit3:.5f} (must exceed)"
    )
    if ks3 <= crit3:
        failures.append("k3_non_gamma")

    if failures:
        print(f"fixed-point FAILED blocks: {', '.join(failures)}")
        return EXIT_STAT_FAIL
    return EXIT_OK


def _exp_floor(rng: RngStream, m: int, reps: int = 5) -> float:
    """Noise floor: mean two-sample KS between independent fresh Exp(1) pools."""
    return float(
        np.mean(
            [
                analysis.ks_two_sample(
                    rng.exponential(1.0, size=m), rng.exponential(1.0, size=m)
                )
                for _ in range(reps)
            ]
        )
    )


COMMANDS = {
    "simulate": cmd_simulate,
    "a-distribution": cmd_a_distribution,
    "moments-check": cmd_moments_check,
    "limit-check": cmd_limit_check,
    "fixed-point": cmd_fixed_point,
}
