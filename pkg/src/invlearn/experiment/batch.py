"""Run a configuration over many seeds and analyse stored runs."""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..belief import loglik_profile
from ..equilibrium import br_fractile_check, contraction_report, forbidden_region, full_supports, nash_solve
from ..simulator import convergence_metric, permanent_exit_stage, run_simulation, trailing_means
from .config import ExperimentConfig, from_dict
from .io import OutputError, emit_belief_csv, emit_csv, read_trajectory_csv, write_table
from .svg import emit_svg_plot, render_svg

log = logging.getLogger(__name__)

SUMMARY_HEADER = (
    "seed", "status", "n_stages", "window", "mean_dev", "max_dev",
    "y1_tail", "y2_tail", "map1_tail", "map2_tail", "nash1", "nash2",
    "rejected_updates", "y2_in_u1", "y1_in_u2", "map1_exit", "map2_exit",
)
CONTRACTION_DEPTH = 50


@dataclass
class BatchSummary:
    output: Path
    nash: tuple[float, float]
    rows: list[dict] = field(default_factory=list)
    trajectories: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    timing: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _region_dict(region):
    def iv(i):
        return None if i is None else [i.lo, i.hi]
    return {"lower": iv(region.lower), "upper": iv(region.upper)}


def analysis_report(params, nash=None, depth: int = CONTRACTION_DEPTH) -> dict:
    """Equilibrium-side diagnostics that do not depend on any trajectory."""
    nash = nash or nash_solve(params)
    b1, b2 = full_supports(params)
    u1, u2 = forbidden_region(params, b1, b2, nash)
    rep = contraction_report(params, b1, b2, depth, nash)
    return {
        "nash": list(nash),
        "fractile_check": [br_fractile_check(params, 1, nash[1]), br_fractile_check(params, 2, nash[0])],
        "supports": {"b1": [b1.lo, b1.hi], "b2": [b2.lo, b2.hi]},
        "forbidden_region": {"u1": _region_dict(u1), "u2": _region_dict(u2)},
        "contraction": {
            "depth": depth,
            "nested": rep.nested(),
            "converged": rep.converged,
            "final_gap": rep.final_gap,
            "final_b1": [rep.final.b1.lo, rep.final.b1.hi],
            "final_b2": [rep.final.b2.lo, rep.final.b2.hi],
            "stages": [
                {"n": s.n, "b1": [s.b1.lo, s.b1.hi], "b2": [s.b2.lo, s.b2.hi],
                 "phi1": None if np.isnan(s.phi1) else s.phi1,
                 "phi2": None if np.isnan(s.phi2) else s.phi2}
                for s in rep.stages
            ],
        },
    }


def column_diagnostics(params, nash, cols: dict, window: int) -> dict:
    """Per-run statistics from trajectory columns (live or read from CSV)."""
    b1, b2 = full_supports(params)
    u1, u2 = forbidden_region(params, b1, b2, nash)
    eps = 2 * params.delta
    n = len(cols["y1"])
    w = min(window, n)
    dist = np.asarray(cols["dist_to_nash"])[-w:]
    return {
        "n_stages": n,
        "window": w,
        "mean_dev": float(dist.mean()),
        "max_dev": float(dist.max()),
        **{f"{k}_tail": float(np.mean(cols[k][-w:])) for k in ("y1", "y2", "map1", "map2")},
        "nash1": nash[0],
        "nash2": nash[1],
        "y2_in_u1": int(sum(u1.contains(v) for v in cols["y2"])),
        "y1_in_u2": int(sum(u2.contains(v) for v in cols["y1"])),
        "map1_exit": permanent_exit_stage(cols["map1"], u1, eps),
        "map2_exit": permanent_exit_stage(cols["map2"], u2, eps),
    }


def _run_one(args):
    sim_config, seed, n_stages = args
    start = time.perf_counter()
    try:
        t = run_simulation(sim_config, seed, n_stages)
    except Exception as e:  # isolate per-seed failures
        return seed, None, f"{type(e).__name__}: {e}", time.perf_counter() - start
    return seed, t, None, time.perf_counter() - start


def run_experiment_batch(config: ExperimentConfig, keep_trajectories: bool = False,
                         write_beliefs: bool = True) -> BatchSummary:
    """Run every seed, write per-seed CSVs, summary, analysis and plots.

    Layout under ``config.output``: ``resolved_config.json``,
    ``trajectories/seed_<s>.csv``, ``beliefs/seed_<s>_p<i>.csv`` (when
    snapshots are configured), ``summary.csv``, ``timing.csv``,
    ``analysis.json`` and ``plots/{actions,beliefs}.svg``. With
    ``write_beliefs=False`` snapshots stay in memory only.
    """
    out = Path(config.output)
    sim_config = config.simulation_config()
    params = sim_config.params
    nash = nash_solve(params)
    _write_json(out / "resolved_config.json", config.resolved())

    jobs = [(sim_config, s, config.n_stages) for s in config.seeds]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    summary = BatchSummary(out, nash)
    timing = summary.timing
    successful = []
    for seed, t, err, elapsed in results:
        timing.append((seed, elapsed))
        if err is not None:
            log.error("seed %s failed: %s", seed, err)
            summary.failures[seed] = err
            summary.rows.append({"seed": seed, "status": f"error: {err}"})
            continue
        emit_csv(t, out / "trajectories" / f"seed_{seed}.csv")
        if t.snapshots and write_beliefs:
            for player in (1, 2):
                emit_belief_csv(t, player, out / "beliefs" / f"seed_{seed}_p{player}.csv")
        cols = {k: t.column(k) for k in ("y1", "y2", "map1", "map2", "dist_to_nash")}
        row = {"seed": seed, "status": "ok", **column_diagnostics(params, nash, cols, config.window)}
        row["rejected_updates"] = sum(b.rejected_updates for b in t.final_beliefs)
        summary.rows.append(row)
        successful.append(t)
        if keep_trajectories:
            summary.trajectories[seed] = t

    write_table(out / "summary.csv", SUMMARY_HEADER,
                ([row.get(k, "") if row.get(k) is not None else "" for k in SUMMARY_HEADER] for row in summary.rows))
    write_table(out / "timing.csv", ("seed", "runtime_s"), timing)
    _write_json(out / "analysis.json", analysis_report(params, nash))
    if successful:
        for kind in ("actions", "beliefs"):
            emit_svg_plot(successful, kind, out / "plots" / f"{kind}.svg", nash)
    return summary


def _write_json(path: Path, data):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"{path}: {e.strerror or e}") from e


def load_run(out_dir) -> tuple[ExperimentConfig, dict[int, dict]]:
    """Config and trajectory columns of a stored batch."""
    out = Path(out_dir)
    cfg_path = out / "resolved_config.json"
    try:
        raw = json.loads(cfg_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise OutputError(f"{cfg_path}: {e.strerror or e}") from e
    config = from_dict(raw)
    runs = {}
    for p in sorted((out / "trajectories").glob("seed_*.csv"), key=lambda p: int(p.stem.split("_")[1])):
        runs[int(p.stem.split("_")[1])] = read_trajectory_csv(p)
    if not runs:
        raise OutputError(f"{out / 'trajectories'}: no trajectory files found")
    return config, runs


def analyze_run(out_dir, with_profile: bool = True) -> dict:
    """Contraction, forbidden-region and log-likelihood report for stored runs."""
    config, runs = load_run(out_dir)
    params = config.game_params()
    nash = nash_solve(params)
    report = analysis_report(params, nash)
    delta = params.delta
    per_seed = {}
    for seed, cols in runs.items():
        entry = column_diagnostics(params, nash, cols, config.window)
        if with_profile:
            for observer, s_key, y_key in ((1, "s1", "y1"), (2, "s2", "y2")):
                prof = loglik_profile(zip(cols[s_key], cols[y_key]), params, observer, config.likelihood)
                entry[f"profile{observer}_argmax"] = (int(np.argmax(prof)) + 0.5) * delta
        per_seed[str(seed)] = entry
    report["runs"] = per_seed
    _write_json(Path(out_dir) / "analysis.json", report)
    return report


def plot_run(out_dir, kinds=("actions", "beliefs")) -> list[Path]:
    config, runs = load_run(out_dir)
    nash = nash_solve(config.game_params())
    paths = []
    for kind in kinds:
        path = Path(out_dir) / "plots" / f"{kind}.svg"
        text = render_svg(list(runs.values()), kind, nash)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise OutputError(f"{path}: {e.strerror or e}") from e
        paths.append(path)
    return paths
