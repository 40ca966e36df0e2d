"""Hamming-shell energy landscapes around the planted ground state.

For each distance d the curve stores the minimum instance energy over every
configuration exactly d flips away from the planted state.  Simple instances
show one smooth basin; hard instances are rugged, with spurious interior
minima that trap local search.  Removing clauses can only lower shell minima,
which is what the dropout-smoothing curves quantify.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .dropout import EnergyTable, build_energy_table, retained_count
from .instances import Instance, SpinConfig, all_energies
from .seeding import rng_for

MAX_SCAN_SPINS = 26


@dataclass(frozen=True)
class LandscapeCurve:
    """Minimum energy per Hamming distance from a reference configuration."""

    n: int
    values: np.ndarray  # (n + 1,) float64
    normalized: np.ndarray | None = None

    def __post_init__(self):
        if self.values.shape != (self.n + 1,):
            raise ValueError("curve must have one value per distance 0..n")


def min_energy_by_distance(
    source: EnergyTable | Instance, reference: SpinConfig
) -> LandscapeCurve:
    """Exact shell minima from a single pass over all basis indices."""
    if isinstance(source, Instance):
        if source.n > MAX_SCAN_SPINS:
            raise ValueError(f"exhaustive scan limited to n<={MAX_SCAN_SPINS}")
        n, energies = source.n, all_energies(source)
    else:
        n, energies = source.n, source.energies
    if reference.n != n:
        raise ValueError("reference configuration has wrong spin count")
    out = np.full(n + 1, np.inf)
    _kernels.min_energy_per_shell(energies, reference.bits, n, out)
    return LandscapeCurve(n, out)


def shell_sizes(n: int, reference: SpinConfig) -> np.ndarray:
    """Number of configurations per Hamming shell (binomial coefficients)."""
    idx = np.arange(1 << n, dtype=np.int64) ^ reference.bits
    counts = np.zeros(n + 1, dtype=np.int64)
    lut = np.array([bin(v).count("1") for v in range(1 << 16)], dtype=np.int64)
    dist = lut[idx & 0xFFFF] + lut[(idx >> 16) & 0xFFFF]
    np.add.at(counts, dist, 1)
    return counts


def normalize_curve(curve: LandscapeCurve) -> LandscapeCurve:
    """Affine rescale of the values to [0, 1]; constant curves map to zeros."""
    lo, hi = float(curve.values.min()), float(curve.values.max())
    if hi == lo:
        return replace(curve, normalized=np.zeros_like(curve.values))
    return replace(curve, normalized=(curve.values - lo) / (hi - lo))


def normalize_family(
    curves: Sequence[LandscapeCurve], reference: LandscapeCurve
) -> list[LandscapeCurve]:
    """Rescale a family of curves by the reference curve's range.

    Keeps one shared scale so curves for different retain fractions remain
    comparable in a single overlay.
    """
    lo, hi = float(reference.values.min()), float(reference.values.max())
    if hi == lo:
        return [replace(c, normalized=np.zeros_like(c.values)) for c in curves]
    return [replace(c, normalized=(c.values - lo) / (hi - lo)) for c in curves]


def interior_local_minima(curve: LandscapeCurve) -> int:
    """Count of strict interior dips: v[d] < v[d-1] and v[d] < v[d+1]."""
    v = curve.values
    return int(np.sum((v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])))


def landscape_under_dropout(
    inst: Instance,
    reference: SpinConfig,
    retain_fractions: Sequence[float],
    eligible: Sequence[int] | None = None,
    seed=0,
) -> list[tuple[float, LandscapeCurve]]:
    """Shell-minimum curves for randomly retained clause subsets.

    For each fraction f all protected clauses are kept plus a random
    f-fraction of the eligible ones; the reference state stays a zero-energy
    minimizer of every retained sub-instance.  Curves carry normalized values
    on the shared scale of the full-instance curve.
    """
    if inst.planted is not None and reference.bits not in inst.ground_pair():
        raise ValueError("reference must be the planted state or its flip")
    fractions = [float(f) for f in retain_fractions]
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("retain fractions must lie in (0, 1]")
    elig = tuple(range(inst.m)) if eligible is None else tuple(sorted(set(eligible)))
    if elig and (elig[0] < 0 or elig[-1] >= inst.m):
        raise ValueError("eligible indices out of range")

    full = min_energy_by_distance(inst, reference)
    results: list[tuple[float, LandscapeCurve]] = []
    for pos, fraction in enumerate(fractions):
        if fraction == 1.0:
            curve = full
        else:
            rng = rng_for(seed, "landscape", pos, fraction)
            keep = retained_count(len(elig), fraction)
            kept = rng.choice(np.asarray(elig), size=keep, replace=False)
            weights = np.ones(inst.m)
            weights[np.setdiff1d(np.asarray(elig), kept)] = 0.0
            table = build_energy_table(inst, weights)
            curve = min_energy_by_distance(table, reference)
        results.append((fraction, curve))
    curves = normalize_family([c for _, c in results], full)
    return [(f, c) for (f, _), c in zip(results, curves)]


def write_curves_csv(path: str | Path, entries: Sequence[tuple[float, LandscapeCurve]]) -> None:
    """Columns: distance, energy, normalized_energy, retain_fraction."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance", "energy", "normalized_energy", "retain_fraction"])
        for fraction, curve in entries:
            norm = curve.normalized
            if norm is None:
                norm = normalize_curve(curve).normalized
            for d in range(curve.n + 1):
                writer.writerow(
                    [d, repr(float(curve.values[d])), repr(float(norm[d])), repr(fraction)]
                )
