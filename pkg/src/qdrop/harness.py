"""Experiment orchestration: sweeps, cross tests, dropout comparison, assess.

Every experiment is a pure function of its configuration and master seed.
Trial streams are derived from labeled tuples, so adding depths or schemes
never perturbs other trials; parameter initializations are labeled without
the scheme, which pairs trials across schemes for matched comparisons.
Results are flushed incrementally (per-trial CSV rows in trial order plus an
aggregate JSON embedding the config digest, master seed, instance digest and
code version), and a manifest makes interrupted sweeps resumable.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .dropout import full_table, layer_tables, make_plan, eligible_clauses
from .instances import Instance, SpinConfig, load_instance, save_instance
from .landscape import LandscapeCurve, landscape_under_dropout, write_curves_csv
from .qaoa import OptimizerConfig, QaoaParams, Trajectory, optimize
from .sa import SaReport, SaSchedule, classify_difficulty, sa_assess, HARD_RATE, SIMPLE_RATE
from .seeding import rng_for

OUTPUT_ROOT_ENV = "QDROP_OUT_ROOT"

KINDS = ("sweep", "crosstest", "dropout_compare", "landscape", "assess")

CROSS_COMBOS = ("E-E", "E-H", "H-E", "H-H")


def default_trials(depth: int) -> int:
    """Per-depth trial counts: 100 up to p=20, 50 up to p=40, then 30."""
    if depth <= 20:
        return 100
    if depth <= 40:
        return 50
    return 30


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    instances: tuple[str, ...]
    depths: tuple[int, ...] = ()
    trials: int | None = None  # None -> default_trials(depth)
    scheme: str = "none"
    keep_fraction: float = 0.5
    fractions: tuple[float, ...] = (1.0, 0.75, 0.5)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    master_seed: int = 0
    out_dir: str | None = None
    threads: int = 1
    sa_trials: int = 1000
    make_plots: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not self.instances:
            raise ValueError("need at least one instance path")
        if any(d < 1 for d in self.depths):
            raise ValueError("depths must be positive")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be positive")

    @property
    def digest(self) -> str:
        payload = asdict(self)
        payload.pop("out_dir")
        payload.pop("threads")
        payload.pop("make_plots")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def output_dir(self) -> Path:
        root = Path(self.out_dir or os.environ.get(OUTPUT_ROOT_ENV, "runs"))
        return root / f"{self.kind}-{self.digest[:8]}"


@dataclass(frozen=True)
class AggregateEntry:
    depth: int
    scheme: str
    best: float
    mean: float
    std: float
    trials: int
    sa_rate: float


@dataclass(frozen=True)
class AggregateResult:
    entries: tuple[AggregateEntry, ...]

    def for_scheme(self, scheme: str) -> list[AggregateEntry]:
        return [e for e in self.entries if e.scheme == scheme]

    def entry(self, depth: int, scheme: str) -> AggregateEntry:
        for e in self.entries:
            if e.depth == depth and e.scheme == scheme:
                return e
        raise KeyError((depth, scheme))


# ---------------------------------------------------------------------------
# SA baseline, cached per instance


def _sa_cache_path(instance_path: str | Path) -> Path:
    p = Path(instance_path)
    return p.with_name(p.stem + ".sa.json")


def sa_baseline(
    inst: Instance,
    instance_path: str | Path | None = None,
    trials: int = 1000,
    sched: SaSchedule | None = None,
) -> SaReport:
    """Annealing assessment seeded from the instance digest, cached on disk."""
    sched = sched or SaSchedule()
    cache_key = {
        "instance_digest": inst.digest,
        "trials": trials,
        "schedule": [sched.t_start, sched.t_end, sched.n_sweeps, sched.flips_per_sweep],
    }
    cache_path = None if instance_path is None else _sa_cache_path(instance_path)
    if cache_path is not None and cache_path.exists():
        data = json.loads(cache_path.read_text())
        if {k: data.get(k) for k in cache_key} == cache_key:
            distractions = tuple(
                (SpinConfig.from_spins(d["config"]), int(d["energy"]))
                for d in data["distractions"]
            )
            return SaReport(data["R"], data["trials"], distractions, ())
    report = sa_assess(inst, sched, trials, ("sa-baseline", inst.digest))
    if cache_path is not None:
        payload = report.to_json_dict() | cache_key
        cache_path.write_text(json.dumps(payload, indent=2) + "\n")
    return report


def run_assess(
    instance_path: str | Path,
    trials: int = 1000,
    sched: SaSchedule | None = None,
) -> tuple[SaReport, str]:
    """Assess difficulty, persist the report and write the label back."""
    path = Path(instance_path)
    inst = load_instance(path)
    report = sa_baseline(inst, path, trials, sched)
    if report.success_rate > SIMPLE_RATE:
        label = "simple"
    elif report.success_rate < HARD_RATE:
        label = "hard"
    else:
        label = "intermediate"
    if label in ("simple", "hard") and inst.label != label:
        save_instance(replace(inst, label=label), path)
    return report, label


# ---------------------------------------------------------------------------
# one optimization trial


def _trial_task(args: tuple) -> tuple[int, float, float]:
    (inst, eligible, depth, scheme, keep_fraction, optimizer, master, kind, trial) = args
    params = QaoaParams.random(depth, rng_for(master, kind, depth, "params", trial))
    plan = make_plan(
        inst,
        eligible if scheme != "none" else (),
        scheme,
        keep_fraction if scheme != "none" else 1.0,
        depth,
        seed=(master, kind, depth, scheme, "plan", trial),
    )
    tables = layer_tables(inst, plan)
    traj = optimize(tables, full_table(inst), params, optimizer, inst.ground_pair())
    return trial, traj.final_cost, traj.final_success


def _map_trials(tasks: list[tuple], threads: int) -> list[tuple[int, float, float]]:
    if threads <= 1 or len(tasks) <= 1:
        results = [_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_trial_task, tasks, chunksize=1))
    return sorted(results)


# ---------------------------------------------------------------------------
# persistence helpers

TRIALS_HEADER = "depth,scheme,trial,final_cost,final_success\n"


def _write_manifest(out: Path, config: ExperimentConfig, done: list[str]) -> None:
    payload = {
        "config_digest": config.digest,
        "master_seed": config.master_seed,
        "version": __version__,
        "completed_groups": done,
    }
    (out / "manifest.json").write_text(json.dumps(payload, indent=2) + "\n")


def _load_resumable_rows(out: Path, config: ExperimentConfig) -> tuple[list[str], list[str]]:
    """Previously completed groups and their CSV rows, if resumable."""
    manifest = out / "manifest.json"
    trials_csv = out / "trials.csv"
    if not (manifest.exists() and trials_csv.exists()):
        return [], []
    try:
        data = json.loads(manifest.read_text())
    except json.JSONDecodeError:
        return [], []
    if data.get("config_digest") != config.digest:
        return [], []
    done = list(data.get("completed_groups", []))
    rows = trials_csv.read_text().splitlines()[1:]
    keep = [r for r in rows if f"{r.split(',')[0]}:{r.split(',')[1]}" in set(done)]
    return done, keep


def _result_meta(config: ExperimentConfig, instances: Sequence[Instance]) -> dict:
    return {
        "config_digest": config.digest,
        "master_seed": config.master_seed,
        "instance_digests": [inst.digest for inst in instances],
        "version": __version__,
    }


def _aggregate_rows(rows: list[str]) -> AggregateResult:
    """Recompute aggregates from CSV rows (depth,scheme,trial,cost,success)."""
    groups: dict[tuple[int, str], list[tuple[int, float]]] = {}
    for row in rows:
        depth_s, scheme, trial_s, _cost, succ = row.split(",")
        groups.setdefault((int(depth_s), scheme), []).append((int(trial_s), float(succ)))
    entries = []
    for (depth, scheme), vals in sorted(groups.items()):
        succ = np.array([s for _, s in sorted(vals)])
        entries.append(
            AggregateEntry(
                depth=depth,
                scheme=scheme,
                best=float(succ.max()),
                mean=float(succ.mean()),
                std=float(succ.std()),
                trials=len(succ),
                sa_rate=float("nan"),
            )
        )
    return AggregateResult(tuple(entries))


# ---------------------------------------------------------------------------
# experiments


def _sweep_schemes(config: ExperimentConfig, schemes: Sequence[str]) -> AggregateResult:
    """Shared engine for depth sweeps and the dropout comparison."""
    path = Path(config.instances[0])
    inst = load_instance(path)
    if inst.planted is None:
        raise ValueError("depth sweeps need an instance with a planted state")
    out = config.output_dir()
    out.mkdir(parents=True, exist_ok=True)

    report = sa_baseline(inst, path, config.sa_trials)
    needs_eligible = any(s != "none" for s in schemes)
    eligible: tuple[int, ...] = ()
    if needs_eligible:
        eligible = eligible_clauses(inst, [c for c, _ in report.distractions])

    done, rows = _load_resumable_rows(out, config)
    for depth in config.depths:
        for scheme in schemes:
            group = f"{depth}:{scheme}"
            if group in done:
                continue
            n_trials = config.trials or default_trials(depth)
            tasks = [
                (inst, eligible, depth, scheme, config.keep_fraction,
                 config.optimizer, config.master_seed, config.kind, t)
                for t in range(n_trials)
            ]
            for trial, cost_v, succ in _map_trials(tasks, config.threads):
                rows.append(f"{depth},{scheme},{trial},{cost_v!r},{succ!r}")
            done.append(group)
            (out / "trials.csv").write_text(TRIALS_HEADER + "\n".join(rows) + "\n")
            _write_manifest(out, config, done)

    agg = _aggregate_rows(rows)
    entries = tuple(
        replace(e, sa_rate=report.success_rate) for e in agg.entries
    )
    agg = AggregateResult(entries)

    payload = _result_meta(config, [inst]) | {
        "sa_rate": report.success_rate,
        "aggregates": [asdict(e) for e in agg.entries],
    }
    (out / "aggregate.json").write_text(json.dumps(payload, indent=2) + "\n")
    if config.make_plots:
        from . import plots

        name = "dropcompare.png" if len(schemes) > 1 else "sweep.png"
        plots.sweep_figure(agg, out / name)
    return agg


def run_depth_sweep(config: ExperimentConfig) -> AggregateResult:
    """Best/mean/std success probability per depth for one scheme."""
    return _sweep_schemes(config, [config.scheme])


def run_dropout_compare(config: ExperimentConfig) -> AggregateResult:
    """Regular QAOA against uniform and per-layer dropout on one instance."""
    return _sweep_schemes(config, ["none", "uniform", "per_layer"])


def run_cross_test(config: ExperimentConfig) -> dict[str, list[Trajectory]]:
    """All four circuit/cost pairings of an easy and a hard instance.

    The first configured instance supplies the easy problem (E), the second
    the hard one (H); a combo "X-Y" drives with X's clauses and scores cost
    and success against Y.  Both instances must share the planted pair.
    """
    if len(config.instances) != 2:
        raise ValueError("cross test needs exactly two instance paths (easy, hard)")
    easy = load_instance(config.instances[0])
    hard = load_instance(config.instances[1])
    if easy.planted is None or set(easy.ground_pair()) != set(hard.ground_pair()):
        raise ValueError("cross test instances must share the planted ground pair")
    depth = config.depths[0] if config.depths else 30
    inits = config.trials or 10
    out = config.output_dir()
    out.mkdir(parents=True, exist_ok=True)

    by_label = {"E": easy, "H": hard}
    results: dict[str, list[Trajectory]] = {}
    ground = easy.ground_pair()
    for combo in CROSS_COMBOS:
        cx, cy = combo.split("-")
        circuit, scored = by_label[cx], by_label[cy]
        cost_tbl = full_table(scored)
        trajs = []
        for init in range(inits):
            params = QaoaParams.random(
                depth, rng_for(config.master_seed, "crosstest", depth, "params", init)
            )
            tables = layer_tables(
                circuit, make_plan(circuit, (), "none", 1.0, depth, seed=0)
            )
            traj = optimize(tables, cost_tbl, params, config.optimizer, ground)
            trajs.append(traj)
            lines = ["epoch,cost,success_prob"]
            lines += [
                f"{e},{c!r},{s!r}"
                for e, c, s in zip(traj.epochs, traj.costs, traj.successes)
            ]
            (out / f"trajectory_{combo}_{init}.csv").write_text("\n".join(lines) + "\n")
        results[combo] = trajs

    payload = _result_meta(config, [easy, hard]) | {
        "depth": depth,
        "inits": inits,
        "final_success_mean": {
            combo: float(np.mean([t.final_success for t in trajs]))
            for combo, trajs in results.items()
        },
        "summaries": {
            combo: [t.summary_json_dict() for t in trajs]
            for combo, trajs in results.items()
        },
    }
    (out / "crosstest.json").write_text(json.dumps(payload, indent=2) + "\n")
    if config.make_plots:
        from . import plots

        plots.crosstest_figure(results, out / "crosstest.png")
    return results


def run_landscape(config: ExperimentConfig) -> list[tuple[float, LandscapeCurve]]:
    """Shell-minimum curves for the configured retain fractions."""
    path = Path(config.instances[0])
    inst = load_instance(path)
    if inst.planted is None:
        raise ValueError("landscape export needs a planted instance")
    out = config.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    entries = landscape_under_dropout(
        inst, inst.planted, config.fractions, seed=config.master_seed
    )
    write_curves_csv(out / "landscape.csv", entries)
    meta = _result_meta(config, [inst])
    (out / "landscape.json").write_text(json.dumps(meta, indent=2) + "\n")
    if config.make_plots:
        from . import plots

        plots.landscape_figure(entries, out / "landscape.png")
    return entries
