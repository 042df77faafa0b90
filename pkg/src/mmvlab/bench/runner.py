"""Monte-Carlo sweep execution and aggregation.

Every trial derives its seed from (base_seed, experiment, sweep point,
trial index) through a stable hash, generates one instance, and feeds the
identical (A, Y) pair to every algorithm in the roster. Aggregation is a
deterministic reduction ordered by (algorithm, sweep point) no matter how
the work was scheduled, so reruns produce byte-identical CSV output apart
from the timing column.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import greedy, msbl, oracle, spl
from ..common import default_lambda, row_energies, top_k_rows
from ..instances import SignalSpec, add_noise, gen_bfs_init, make_instance
from ..linops import RankTolerance
from ..subspace import RankPolicy, estimate_subspace
from .config import BenchConfig

CSV_HEADER = "algorithm,sweep_var,sweep_value,trials,successes,success_rate,ci95,mean_iters,mean_seconds"

VERSION = "0.1.0"


@dataclass
class TrialRecord:
    algorithm: str
    sweep_value: float
    trial_index: int
    seed: int
    success: bool
    iters: int
    wall_time: float
    detected_rank: int | None = None
    degenerate: bool = False
    note: str = ""


@dataclass
class SweepResult:
    config: BenchConfig
    rows: list[dict]
    records: list[TrialRecord]

    def rate(self, algorithm: str, sweep_value) -> float:
        for row in self.rows:
            if row["algorithm"] == algorithm and row["sweep_value"] == sweep_value:
                return row["success_rate"]
        raise KeyError((algorithm, sweep_value))

    def halfwidth(self, algorithm: str, sweep_value) -> float:
        for row in self.rows:
            if row["algorithm"] == algorithm and row["sweep_value"] == sweep_value:
                return row["ci95"]
        raise KeyError((algorithm, sweep_value))


def support_estimate(scores, k: int) -> np.ndarray:
    """Indices of the k largest per-row scores (row l2 norms for a matrix),
    ties toward the lower index."""
    return top_k_rows(scores, k)


def trial_seed(base_seed: int, experiment: str, sweep_var: str, sweep_value, trial_index: int) -> int:
    """Stable 63-bit seed from the trial coordinates."""
    tag = f"{base_seed}|{experiment}|{sweep_var}={_fmt_value(sweep_value)}|{trial_index}"
    digest = hashlib.sha256(tag.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _fmt_value(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:g}"
    return str(v)


def _rank_policy(sub: dict) -> RankPolicy:
    if sub.get("rank_mode", "auto") == "fixed":
        return RankPolicy(mode="fixed", fixed_r=int(sub["fixed_r"]))
    return RankPolicy()


def _lambda_for(sub: dict, y, snr_db: float) -> float:
    if "lam" in sub:
        return float(sub["lam"])
    lam = default_lambda(y, snr_db)
    return lam * float(sub.get("lam_scale", 1.0))


def _spl_config(sub: dict, y, snr_db: float) -> spl.SplConfig:
    kwargs = {}
    for key in ("max_iters", "gamma_tol", "denom_tol", "gamma_cap",
                "anneal", "anneal_every", "anneal_factor", "anneal_floor"):
        if key in sub:
            kwargs[key] = sub[key]
    if "p" in sub:
        kwargs["p"] = sub["p"]
    if "psd_rel_tol" in sub:
        kwargs["psd_tol"] = RankTolerance(float(sub["psd_rel_tol"]))
    return spl.SplConfig(lam=_lambda_for(sub, y, snr_db), rank_policy=_rank_policy(sub), **kwargs)


def _msbl_config(sub: dict, y, snr_db: float) -> msbl.MsblConfig:
    kwargs = {k: sub[k] for k in ("max_iters", "gamma_tol", "gamma_floor", "prune_tol") if k in sub}
    return msbl.MsblConfig(lam=_lambda_for(sub, y, snr_db), **kwargs)


def run_trial(cfg: BenchConfig, sweep_value, trial_index: int) -> list[TrialRecord]:
    """Generate one instance and score every algorithm on it."""
    seed = trial_seed(cfg.base_seed, cfg.experiment, cfg.sweep_var, sweep_value, trial_index)
    point = {name: cfg.fixed_value(name, sweep_value) for name in ("m", "k", "snr_db", "N", "tau")}
    k = point["k"]

    spec = SignalSpec(
        m=point["m"], n=cfg.n, N=point["N"], k=k, r=cfg.r,
        tau=point["tau"],
        snr_db=math.inf if cfg.experiment == "local_minima" else point["snr_db"],
        matrix_kind=cfg.matrix_kind, seed=seed,
    )
    inst = make_instance(spec)
    true_support = inst.support

    gamma0 = None
    y = inst.Y
    if cfg.experiment == "local_minima":
        bfs_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
        x0 = gen_bfs_init(inst, cfg.s, int(bfs_ss.generate_state(1, dtype=np.uint64)[0]))
        gamma0 = row_energies(x0) / inst.N
        y = add_noise(inst.Y, point["snr_db"], int(noise_ss.generate_state(1, dtype=np.uint64)[0]))

    detected = None
    if any(alg in ("spl", "music", "samusic") for alg in cfg.algorithms):
        try:
            detected = estimate_subspace(y).r_hat
        except ValueError:
            detected = None

    records = []
    for alg in cfg.algorithms:
        sub = cfg.overrides.get(alg, {})
        rec = TrialRecord(
            algorithm=alg, sweep_value=sweep_value, trial_index=trial_index,
            seed=seed, success=False, iters=0, wall_time=0.0, detected_rank=detected,
        )
        start = time.perf_counter()
        try:
            if alg == "spl":
                res = spl.solve(inst.A, y, _spl_config(sub, y, point["snr_db"]), k=k, gamma0=gamma0)
                estimate, rec.iters, rec.detected_rank = res.support_estimate, res.iters, res.r_hat
                rec.degenerate = not np.any(row_energies(res.X_hat) > 0)
            elif alg == "msbl":
                res = msbl.solve(inst.A, y, _msbl_config(sub, y, point["snr_db"]), k=k, gamma0=gamma0)
                estimate, rec.iters = res.support_estimate, res.iters
                rec.degenerate = not np.any(row_energies(res.X_hat) > 0)
            elif alg == "music":
                estimate = greedy.music_recover(inst.A, y, greedy.GreedyConfig(k, _rank_policy(sub)))
                rec.iters = 1
            elif alg == "somp":
                estimate = greedy.somp_recover(inst.A, y, greedy.GreedyConfig(k))
                rec.iters = k
            elif alg == "samusic":
                estimate = greedy.samusic_recover(inst.A, y, greedy.GreedyConfig(k, _rank_policy(sub)))
                rec.iters = 1
            elif alg == "oracle":
                budget = oracle.OracleBudget(max_supports=int(sub.get("max_supports", 200_000)))
                supports, _ = oracle.brute_min_rank_support(inst.A, y, k, budget=budget)
                rec.degenerate = len(supports) > 1
                estimate = np.asarray(supports[0])
                rec.iters = 1
            else:  # pragma: no cover - config validation forbids this
                raise ValueError(f"unknown algorithm {alg}")
            rec.success = estimate.size == true_support.size and bool(np.all(estimate == true_support))
        except Exception as err:  # solver aborts count as failures, sweep continues
            rec.note = f"{type(err).__name__}: {err}"
        rec.wall_time = time.perf_counter() - start
        records.append(rec)
    return records


def run_sweep(cfg: BenchConfig, threads: int = 1) -> SweepResult:
    """Execute all (sweep point, trial) work items and aggregate rates."""
    points = list(cfg.sweep_values)
    jobs = [(value, t) for value in points for t in range(cfg.trials)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_records = list(pool.map(lambda job: run_trial(cfg, *job), jobs))
    else:
        all_records = [run_trial(cfg, value, t) for value, t in jobs]

    by_key: dict[tuple[str, float], list[TrialRecord]] = {}
    for batch in all_records:
        for rec in batch:
            by_key.setdefault((rec.algorithm, rec.sweep_value), []).append(rec)

    rows = []
    for alg in cfg.algorithms:
        for value in points:
            recs = sorted(by_key.get((alg, value), []), key=lambda r: r.trial_index)
            successes = sum(r.success for r in recs)
            trials = len(recs)
            rate = successes / trials
            rows.append({
                "algorithm": alg,
                "sweep_var": cfg.sweep_var,
                "sweep_value": value,
                "trials": trials,
                "successes": successes,
                "success_rate": rate,
                "ci95": 1.96 * math.sqrt(rate * (1.0 - rate) / trials),
                "mean_iters": sum(r.iters for r in recs) / trials,
                "mean_seconds": sum(r.wall_time for r in recs) / trials,
            })

    records = [rec for batch in all_records for rec in batch]
    records.sort(key=lambda r: (r.algorithm, r.sweep_value, r.trial_index))
    return SweepResult(config=cfg, rows=rows, records=records)


def render_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(
            ",".join([
                row["algorithm"],
                row["sweep_var"],
                _fmt_value(row["sweep_value"]),
                str(row["trials"]),
                str(row["successes"]),
                f"{row['success_rate']:.6f}",
                f"{row['ci95']:.6f}",
                f"{row['mean_iters']:.4f}",
                f"{row['mean_seconds']:.6f}",
            ])
        )
    return "\n".join(lines) + "\n"


def write_outputs(result: SweepResult, out_dir, name: str, notes: tuple[str, ...] = ()) -> Path:
    """Write <name>.csv plus a <name>.meta.json sidecar; returns the CSV path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    csv_path.write_text(render_csv(result), encoding="utf-8")
    meta = {
        "name": name,
        "version": VERSION,
        "config": result.config.to_dict(),
        "sweep_var": result.config.sweep_var,
        "csv_header": CSV_HEADER,
        "determinism": "rerunning with this config reproduces the CSV byte-for-byte "
                       "except the mean_seconds column",
        "notes": list(notes),
    }
    (out / f"{name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path
