"""Command-line interface.

Subcommands mirror the pipeline: generate instances, assess them with
annealing, export landscapes, then run depth sweeps, the circuit/cost cross
test or the dropout comparison.  Every experiment writes plot-ready CSV plus
rendered PNG figures into one directory per run; reruns with the same
configuration and seed reproduce the files byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from .harness import (
    OUTPUT_ROOT_ENV,
    ExperimentConfig,
    run_assess,
    run_cross_test,
    run_depth_sweep,
    run_dropout_compare,
    run_landscape,
)
from .instances import SpinConfig, generate_paired, generate_planted, save_instance
from .qaoa import OptimizerConfig
from .seeding import rng_for

FAST_DEPTHS = (4, 8, 16)
FAST_TRIALS = 10
FAST_N = 10


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


out_option = click.option(
    "--out", default=None, help=f"Output root (default ${OUTPUT_ROOT_ENV} or ./runs)."
)
seed_option = click.option("--seed", default=0, show_default=True, help="Master seed.")
threads_option = click.option(
    "--threads", default=1, show_default=True, help="Worker processes for trials."
)
epochs_option = click.option(
    "--epochs", default=1000, show_default=True, help="Optimizer epochs per trial."
)
lr_option = click.option(
    "--lr", default=0.05, show_default=True, help="Optimizer learning rate."
)
no_plot_option = click.option(
    "--no-plot", is_flag=True, help="Skip rendering PNG figures."
)


@click.group()
def main() -> None:
    """Planted NAE3SAT workbench: annealing gauge, landscapes, dropout QAOA."""


@main.command()
@click.option("--n", default=16, show_default=True, help="Spin count.")
@click.option(
    "--mode",
    type=click.Choice(["sporadic", "concentrated", "paired"]),
    default="sporadic",
    show_default=True,
)
@click.option("--max-clauses", default=None, type=int, help="Clause budget (default 20n).")
@seed_option
@click.option("--out", default=".", show_default=True, help="Directory for instance files.")
def generate(n, mode, max_clauses, seed, out):
    """Generate planted instances with a unique ground pair."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    bits = int(rng_for(seed, "planted", n).integers(0, 1 << n))
    planted = SpinConfig(n, bits)
    if mode == "paired":
        easy, hard = generate_paired(n, planted, seed)
        for tag, inst in (("easy", easy), ("hard", hard)):
            path = out_dir / f"nae3sat_n{n}_{tag}_s{seed}.json"
            save_instance(inst, path)
            click.echo(f"wrote {path} ({inst.m} clauses, label={inst.label})")
    else:
        inst = generate_planted(n, planted, mode, seed, max_clauses)
        path = out_dir / f"nae3sat_n{n}_{mode}_s{seed}.json"
        save_instance(inst, path)
        click.echo(f"wrote {path} ({inst.m} clauses)")


@main.command()
@click.argument("instance", type=click.Path(exists=True))
@click.option("--trials", default=1000, show_default=True, help="Annealing trials.")
def assess(instance, trials):
    """Annealing success rate, difficulty label and distraction harvest."""
    report, label = run_assess(instance, trials)
    click.echo(f"R={report.success_rate:.4f} over {report.trials} trials -> {label}")
    click.echo(f"distractions: {len(report.distractions)}")
    if label == "simple":
        click.echo("instance is classically easy; no point in a quantum solver")


@main.command()
@click.argument("instance", type=click.Path(exists=True))
@click.option(
    "--fractions",
    default="1.0,0.75,0.5",
    show_default=True,
    help="Comma-separated clause retain fractions.",
)
@seed_option
@out_option
@no_plot_option
def landscape(instance, fractions, seed, out, no_plot):
    """Export Hamming-shell minimum-energy curves (CSV + figure)."""
    config = ExperimentConfig(
        kind="landscape",
        instances=(instance,),
        fractions=_parse_floats(fractions),
        master_seed=seed,
        out_dir=out,
        make_plots=not no_plot,
    )
    run_landscape(config)
    click.echo(f"landscape written to {config.output_dir()}")


def _optimizer(epochs: int, lr: float) -> OptimizerConfig:
    return OptimizerConfig(learning_rate=lr, epochs=epochs)


@main.command()
@click.argument("instance", type=click.Path(exists=True))
@click.option("--depths", default="10,20,30,40,50", show_default=True)
@click.option("--trials", default=None, type=int, help="Trials per depth (default: protocol).")
@click.option(
    "--scheme",
    type=click.Choice(["none", "uniform", "per_layer", "soft"]),
    default="none",
    show_default=True,
)
@click.option("--keep-fraction", default=0.5, show_default=True)
@click.option("--fast", is_flag=True, help=f"Small preset: depths {FAST_DEPTHS}, {FAST_TRIALS} trials.")
@epochs_option
@lr_option
@seed_option
@out_option
@threads_option
@no_plot_option
def sweep(instance, depths, trials, scheme, keep_fraction, fast, epochs, lr, seed, out, threads, no_plot):
    """Success probability versus circuit depth for one dropout scheme."""
    config = ExperimentConfig(
        kind="sweep",
        instances=(instance,),
        depths=FAST_DEPTHS if fast else _parse_ints(depths),
        trials=FAST_TRIALS if fast else trials,
        scheme=scheme,
        keep_fraction=keep_fraction,
        optimizer=_optimizer(epochs, lr),
        master_seed=seed,
        out_dir=out,
        threads=threads,
        make_plots=not no_plot,
    )
    agg = run_depth_sweep(config)
    for e in agg.entries:
        click.echo(
            f"p={e.depth:3d} {e.scheme:9s} best={e.best:.4f} "
            f"mean={e.mean:.4f}+-{e.std:.4f} (SA R={e.sa_rate:.4f})"
        )
    click.echo(f"results in {config.output_dir()}")


@main.command()
@click.argument("easy", type=click.Path(exists=True))
@click.argument("hard", type=click.Path(exists=True))
@click.option("--p", "depth", default=30, show_default=True, help="Circuit depth.")
@click.option("--trials", default=10, show_default=True, help="Random initializations.")
@epochs_option
@lr_option
@seed_option
@out_option
@no_plot_option
def crosstest(easy, hard, depth, trials, epochs, lr, seed, out, no_plot):
    """Graft each instance's circuit onto each cost function (4 pairings)."""
    config = ExperimentConfig(
        kind="crosstest",
        instances=(easy, hard),
        depths=(depth,),
        trials=trials,
        optimizer=_optimizer(epochs, lr),
        master_seed=seed,
        out_dir=out,
        make_plots=not no_plot,
    )
    results = run_cross_test(config)
    for combo, trajs in results.items():
        mean = float(np.mean([t.final_success for t in trajs]))
        click.echo(f"{combo}: mean final success {mean:.4f}")
    click.echo(f"results in {config.output_dir()}")


@main.command()
@click.argument("instance", type=click.Path(exists=True))
@click.option("--depths", default="10,20,30,40,50", show_default=True)
@click.option("--trials", default=None, type=int, help="Trials per depth (default: protocol).")
@click.option("--keep-fraction", default=0.5, show_default=True)
@click.option("--fast", is_flag=True, help=f"Small preset: depths {FAST_DEPTHS}, {FAST_TRIALS} trials.")
@epochs_option
@lr_option
@seed_option
@out_option
@threads_option
@no_plot_option
def dropcompare(instance, depths, trials, keep_fraction, fast, epochs, lr, seed, out, threads, no_plot):
    """Compare regular QAOA with uniform and per-layer dropout."""
    config = ExperimentConfig(
        kind="dropout_compare",
        instances=(instance,),
        depths=FAST_DEPTHS if fast else _parse_ints(depths),
        trials=FAST_TRIALS if fast else trials,
        keep_fraction=keep_fraction,
        optimizer=_optimizer(epochs, lr),
        master_seed=seed,
        out_dir=out,
        threads=threads,
        make_plots=not no_plot,
    )
    agg = run_dropout_compare(config)
    for e in agg.entries:
        click.echo(
            f"p={e.depth:3d} {e.scheme:9s} best={e.best:.4f} "
            f"mean={e.mean:.4f}+-{e.std:.4f} (SA R={e.sa_rate:.4f})"
        )
    click.echo(f"results in {config.output_dir()}")


if __name__ == "__main__":
    main()
