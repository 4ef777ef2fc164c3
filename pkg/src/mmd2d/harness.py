"""Monte Carlo orchestration, sweeps, comparisons, the LLL oracle check and
the CSV/JSON writers."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .config import ExperimentConfig, with_overrides
from .game import exhaustive_optimum, is_nash_equilibrium, lll_run
from .metrics import AGGREGATED, TrialMetrics, aggregate
from .simulation import LinkRecord, TrialResult, links_game, run_trial, stream


@dataclass
class Experiment:
    label: str
    config: ExperimentConfig
    trials: list[TrialResult]
    summary: dict = field(default_factory=dict)

    @property
    def metrics(self) -> list[TrialMetrics]:
        return [t.metrics for t in self.trials]

    @property
    def converged(self) -> bool:
        return all(t.metrics.lll_converged for t in self.trials)


def _run_one(args):
    cfg, index = args
    return run_trial(cfg, index)


def run_trials(cfg: ExperimentConfig, n_trials: Optional[int] = None, workers: Optional[int] = None,
               first: int = 0) -> list[TrialResult]:
    """Trials ``first .. first+n-1`` in index order, sequentially or on a process pool.

    Each trial depends only on ``(cfg, index)``, so the worker count never
    changes the results.
    """
    n = cfg.run.n_trials if n_trials is None else n_trials
    workers = cfg.run.workers if workers is None else workers
    jobs = [(cfg, i) for i in range(first, first + n)]
    if workers <= 1 or n <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, n // (4 * workers))))


def monte_carlo(cfg: ExperimentConfig, label: Optional[str] = None, n_trials: Optional[int] = None,
                workers: Optional[int] = None) -> Experiment:
    trials = run_trials(cfg, n_trials, workers)
    exp = Experiment(label or cfg.run.name, cfg, trials)
    exp.summary = aggregate(exp.metrics)
    return exp


def sweep(cfg: ExperimentConfig, path: str, values: Sequence[Any], n_trials: Optional[int] = None,
          workers: Optional[int] = None) -> list[Experiment]:
    """One experiment per value of ``path``; all share the base seed."""
    if not values:
        raise ValueError("sweep needs at least one value")
    return [monte_carlo(with_overrides(cfg, {path: v}), f"{path}={v}", n_trials, workers) for v in values]


def compare(cfg: ExperimentConfig, associations: Sequence[str], strategies: Sequence[str],
            n_trials: Optional[int] = None, workers: Optional[int] = None) -> list[Experiment]:
    """Every association algorithm crossed with every beamwidth strategy, on
    identical topologies."""
    out = []
    for a in associations:
        for s in strategies:
            c = with_overrides(cfg, {"association.algorithm": a, "game.strategy": s})
            out.append(monte_carlo(c, f"{a}+{s}", n_trials, workers))
    return out


@dataclass(frozen=True)
class OracleRow:
    trial: int
    players: int
    theta_lll: float
    theta_opt: float
    ratio: float
    iterations: int
    converged: bool
    optimal: bool
    nash: bool


def oracle_check(cfg: ExperimentConfig, n_trials: Optional[int] = None, rel_tol: float = 1e-9,
                 trace: bool = False):
    """Compare log-linear learning with exhaustive search on small link games.

    Returns the per-trial rows and, if ``trace`` is set, the potential and
    best-response-gap trace of every run as ``(trial, iteration, theta, gap)``.
    """
    g = cfg.game
    rows, traces = [], []
    for i in range(cfg.run.n_trials if n_trials is None else n_trials):
        game, _ = links_game(cfg, i)
        _, theta_opt = exhaustive_optimum(game, g.exhaustive_budget)
        res = lll_run(game, stream(cfg.run.seed, i, 99), tau=g.tau, cap=g.update_cap, t_max=g.t_max,
                      prob_threshold=g.prob_threshold, max_iterations=g.max_iterations, trace_gap=trace)
        theta = game.potential(res.indices)
        ratio = theta / theta_opt if theta_opt != 0 else (1.0 if theta == 0 else math.inf)
        ok = abs(theta - theta_opt) <= rel_tol * max(1.0, abs(theta_opt))
        rows.append(OracleRow(i, game.n_players, theta, theta_opt, ratio, res.iterations, res.converged, ok,
                              is_nash_equilibrium(game, res.indices)))
        if trace:
            traces.extend((i, k, th, gp) for k, (th, gp) in enumerate(zip(res.theta_trace, res.gap_trace)))
    return rows, traces


# --- output -----------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _json_safe(v.tolist())
    return v


TRIAL_COLUMNS = ["experiment", "trial"] + TrialMetrics.field_names()
LINK_COLUMNS = ["experiment", "trial"] + [f.name for f in fields(LinkRecord)]
AGGREGATE_COLUMNS = ["experiment", "metric", "mean", "stderr", "n"]
CDF_COLUMNS = ["experiment", "metric", "value", "cdf"]


def write_results(experiments: Sequence[Experiment], out_dir, fmt: str = "csv",
                  command: str = "", extra: Optional[dict] = None) -> Path:
    """Write result tables plus ``manifest.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trial_rows = [[e.label, t.index] + [getattr(t.metrics, n) for n in TrialMetrics.field_names()]
                  for e in experiments for t in e.trials]
    link_rows = [[e.label, t.index] + list(asdict(r).values()) for e in experiments for t in e.trials for r in t.links]
    agg_rows, cdf_rows = [], []
    for e in experiments:
        for name in AGGREGATED:
            s = e.summary[name]["summary"]
            agg_rows.append([e.label, name, s.mean, s.stderr, s.n])
            cdf_rows.extend([e.label, name, x, c] for x, c in zip(e.summary[name]["grid"], e.summary[name]["cdf"]))
    if fmt == "csv":
        _write_csv(out / "trials.csv", TRIAL_COLUMNS, trial_rows)
        _write_csv(out / "links.csv", LINK_COLUMNS, link_rows)
        _write_csv(out / "aggregate.csv", AGGREGATE_COLUMNS, agg_rows)
        _write_csv(out / "cdf.csv", CDF_COLUMNS, cdf_rows)
    elif fmt == "json":
        doc = {
            "trials": [dict(zip(TRIAL_COLUMNS, r)) for r in trial_rows],
            "links": [dict(zip(LINK_COLUMNS, r)) for r in link_rows],
            "aggregate": [dict(zip(AGGREGATE_COLUMNS, r)) for r in agg_rows],
            "cdf": [dict(zip(CDF_COLUMNS, r)) for r in cdf_rows],
        }
        (out / "results.json").write_text(json.dumps(_json_safe(doc), indent=1, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    write_manifest(out, [e.config for e in experiments], [e.label for e in experiments], command, extra)
    return out


def write_oracle(rows: Sequence[OracleRow], traces, out_dir, fmt: str = "csv", cfg: Optional[ExperimentConfig] = None,
                 command: str = "") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = [f.name for f in fields(OracleRow)]
    if fmt == "csv":
        _write_csv(out / "oracle.csv", cols, [list(asdict(r).values()) for r in rows])
        _write_csv(out / "trace.csv", ["trial", "iteration", "theta", "best_response_gap"], traces)
    else:
        doc = {"oracle": [asdict(r) for r in rows],
               "trace": [dict(zip(["trial", "iteration", "theta", "best_response_gap"], t)) for t in traces]}
        (out / "results.json").write_text(json.dumps(_json_safe(doc), indent=1, sort_keys=True) + "\n")
    if cfg is not None:
        write_manifest(out, [cfg], ["oracle-check"], command)
    return out


def write_manifest(out: Path, configs: Sequence[ExperimentConfig], labels: Sequence[str], command: str = "",
                   extra: Optional[dict] = None) -> None:
    doc = {
        "command": command,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "experiments": [{"label": l, "config_sha256": c.digest(), "seed": c.run.seed, "n_trials": c.run.n_trials,
                         "config": c.to_dict()} for l, c in zip(labels, configs)],
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        doc.update(extra)
    (out / "manifest.json").write_text(json.dumps(_json_safe(doc), indent=1, sort_keys=True) + "\n")
