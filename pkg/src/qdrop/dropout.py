"""Quantum-dropout plans and the per-layer driving-energy tables.

A plan assigns every clause a weight in [0, 1] per circuit layer.  Clauses
violated by at least one annealing distraction are "protected" (weight 1 in
every layer): they are what energetically separates the distractions from the
ground pair, so only the remaining clauses are eligible for dropout.  The
cost function never sees a plan; dropping clauses only reshapes the driving
layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .instances import Instance, SpinConfig, clause_energy
from .seeding import rng_for

SCHEMES = ("none", "uniform", "per_layer", "soft")

PHASE_LOOKUP_MAX_LEVELS = 4096


class PlanError(ValueError):
    """A dropout plan cannot be built from the given arguments."""


@dataclass(frozen=True)
class EnergyTable:
    """Diagonal clause Hamiltonian: one energy per computational-basis index."""

    n: int
    energies: np.ndarray  # (2**n,) float64
    full_weights: bool = False  # built with every clause at weight 1

    def __post_init__(self):
        if self.energies.shape != (1 << self.n,):
            raise ValueError("energy table size does not match spin count")

    @cached_property
    def _levels(self) -> tuple[np.ndarray, np.ndarray] | None:
        """(distinct values, per-index level) when few distinct values exist."""
        values, inverse = np.unique(self.energies, return_inverse=True)
        if values.size > PHASE_LOOKUP_MAX_LEVELS:
            return None
        return values, inverse.astype(np.int32)

    @property
    def min_energy(self) -> float:
        return float(self.energies.min())


def build_energy_table(inst: Instance, weights: Sequence[float]) -> EnergyTable:
    """Exact weighted clause-energy table over all 2**n basis indices."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (inst.m,):
        raise ValueError(f"need one weight per clause ({inst.m}), got shape {w.shape}")
    if w.size and (w.min() < 0.0 or w.max() > 1.0):
        raise ValueError("clause weights must lie in [0, 1]")
    out = np.empty(1 << inst.n, dtype=np.float64)
    _kernels.clause_energy_table(inst.clause_array(), w, inst.n, out)
    return EnergyTable(inst.n, out, full_weights=bool(np.all(w == 1.0)))


def full_table(inst: Instance) -> EnergyTable:
    """The all-clauses table used as the cost function."""
    return build_energy_table(inst, np.ones(inst.m))


@dataclass(frozen=True)
class DropoutPlan:
    """Per-layer clause weights for the driving Hamiltonians."""

    scheme: str
    p: int
    keep_fraction: float
    eligible: tuple[int, ...]
    layer_weights: np.ndarray  # (p, m) float64

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.layer_weights.shape[0] != self.p:
            raise ValueError("layer_weights must have one row per layer")

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "p": self.p,
            "keep_fraction": self.keep_fraction,
            "eligible": list(self.eligible),
            "layer_weights": self.layer_weights.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DropoutPlan":
        return cls(
            scheme=data["scheme"],
            p=int(data["p"]),
            keep_fraction=float(data["keep_fraction"]),
            eligible=tuple(int(i) for i in data["eligible"]),
            layer_weights=np.asarray(data["layer_weights"], dtype=np.float64),
        )


def eligible_clauses(inst: Instance, distractions: Iterable[SpinConfig]) -> tuple[int, ...]:
    """Indices of clauses satisfied by every distraction.

    With no distractions every clause is eligible.  Clauses violated by some
    distraction stay protected so the driving layers keep penalizing it.
    """
    eligible = []
    distractions = list(distractions)
    for idx, clause in enumerate(inst.clauses):
        if all(clause_energy(clause, d) == 0 for d in distractions):
            eligible.append(idx)
    return tuple(eligible)


def retained_count(n_eligible: int, keep_fraction: float) -> int:
    """Half-up rounding, at least one clause when any is eligible."""
    if n_eligible == 0:
        return 0
    return max(1, int(np.floor(keep_fraction * n_eligible + 0.5)))


def make_plan(
    inst: Instance,
    eligible: Sequence[int],
    scheme: str,
    keep_fraction: float = 0.5,
    p: int = 1,
    seed=0,
) -> DropoutPlan:
    """Build a dropout plan; deterministic in all arguments.

    uniform    one random subset of the eligible clauses, shared by all layers
    per_layer  an independent random subset per layer
    soft       i.i.d. uniform [0, 1] weight per (layer, eligible clause)
    none       every clause kept in every layer
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    if p < 1:
        raise ValueError("need at least one layer")
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in (0, 1]")
    eligible = tuple(sorted(set(int(i) for i in eligible)))
    if eligible and (eligible[0] < 0 or eligible[-1] >= inst.m):
        raise ValueError("eligible indices out of range")

    weights = np.ones((p, inst.m), dtype=np.float64)
    if scheme == "none":
        return DropoutPlan("none", p, 1.0, eligible, weights)

    if not eligible and keep_fraction < 1.0:
        raise PlanError(
            "no clauses are eligible for dropout; use scheme 'none' instead"
        )

    rng = rng_for(seed, "plan", scheme, p, keep_fraction)
    elig = np.asarray(eligible, dtype=np.int64)
    keep = retained_count(elig.size, keep_fraction)

    if scheme == "uniform":
        kept = rng.choice(elig, size=keep, replace=False) if elig.size else elig
        dropped = np.setdiff1d(elig, kept)
        weights[:, dropped] = 0.0
    elif scheme == "per_layer":
        for layer in range(p):
            kept = rng.choice(elig, size=keep, replace=False) if elig.size else elig
            dropped = np.setdiff1d(elig, kept)
            weights[layer, dropped] = 0.0
    else:  # soft
        weights[:, elig] = rng.random((p, elig.size))
    return DropoutPlan(scheme, p, keep_fraction, eligible, weights)


def layer_tables(inst: Instance, plan: DropoutPlan) -> list[EnergyTable]:
    """One driving table per layer, building each distinct weight row once."""
    cache: dict[bytes, EnergyTable] = {}
    tables = []
    for row in plan.layer_weights:
        key = row.tobytes()
        if key not in cache:
            cache[key] = build_energy_table(inst, row)
        tables.append(cache[key])
    return tables
