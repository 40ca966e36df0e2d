"""Classical baselines: Metropolis annealing and the pair-greedy analysis.

Annealing serves two purposes: the success rate over many seeded trials is
the difficulty gauge for an instance, and the final states of failed trials
("distractions", low-lying local minima) feed the dropout planner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .instances import (
    Instance,
    SpinConfig,
    coupling_matrix,
    ground_state_set,
    instance_energy,
)
from .seeding import seed_sequence

SIMPLE_RATE = 0.95
HARD_RATE = 0.10
MAX_DISTRACTIONS = 30


@dataclass(frozen=True)
class SaSchedule:
    """Geometric cooling schedule.

    Defaults put the start temperature at one clause violation (energy 4)
    and the end temperature far below the smallest gap.
    """

    t_start: float = 4.0
    t_end: float = 0.05
    n_sweeps: int = 300
    flips_per_sweep: int | None = None  # None -> one proposal per spin

    def __post_init__(self):
        if not self.t_start > self.t_end > 0:
            raise ValueError("schedule requires t_start > t_end > 0")
        if self.n_sweeps < 1:
            raise ValueError("schedule requires at least one sweep")
        if self.flips_per_sweep is not None and self.flips_per_sweep < 1:
            raise ValueError("flips_per_sweep must be positive")

    def step_temperatures(self, n: int) -> np.ndarray:
        """Temperature for every proposal step, sweeps repeated per flip."""
        flips = self.flips_per_sweep or n
        if self.n_sweeps == 1:
            sweep_temps = np.array([self.t_start])
        else:
            ratio = (self.t_end / self.t_start) ** (1.0 / (self.n_sweeps - 1))
            sweep_temps = self.t_start * ratio ** np.arange(self.n_sweeps)
        return np.repeat(sweep_temps, flips)


@dataclass(frozen=True)
class SaReport:
    success_rate: float
    trials: int
    distractions: tuple[tuple[SpinConfig, int], ...]
    per_trial_final: tuple[tuple[SpinConfig, int], ...]

    def to_json_dict(self) -> dict:
        return {
            "R": self.success_rate,
            "trials": self.trials,
            "distractions": [
                {"config": c.to_spins(), "energy": e} for c, e in self.distractions
            ],
        }


def _trial_draws(n: int, steps: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Start bits, proposal indices and acceptance uniforms for one chain."""
    rng = np.random.default_rng(seed)
    start = rng.integers(0, 2, size=n).astype(np.int8)
    proposals = rng.integers(0, n, size=steps, dtype=np.int64).astype(np.int32)
    uniforms = rng.random(steps)
    return start, proposals, uniforms


def _run_chains(inst: Instance, sched: SaSchedule, seeds) -> tuple[np.ndarray, np.ndarray]:
    """Run one annealing chain per seed; returns (final bit patterns, energies)."""
    n = inst.n
    temps = sched.step_temperatures(n)
    steps = temps.shape[0]
    trials = len(seeds)
    states = np.empty((trials, n), dtype=np.int8)
    proposals = np.empty((trials, steps), dtype=np.int32)
    uniforms = np.empty((trials, steps), dtype=np.float64)
    for t, seed in enumerate(seeds):
        start, props, unis = _trial_draws(n, steps, seed)
        states[t] = 1 - 2 * start  # bit 1 -> spin -1
        proposals[t] = props
        uniforms[t] = unis
    pair_energy = np.empty(trials, dtype=np.int64)
    _kernels.anneal_chains(states, coupling_matrix(inst), proposals, uniforms, temps, pair_energy)
    bits = ((states < 0).astype(np.uint64) << np.arange(n, dtype=np.uint64)).sum(axis=1)
    return bits.astype(np.int64), pair_energy + inst.m


def sa_run(inst: Instance, sched: SaSchedule, seed) -> tuple[SpinConfig, int]:
    """Single annealing run from a uniform random start; deterministic in seed."""
    bits, energies = _run_chains(inst, sched, [seed])
    return SpinConfig(inst.n, int(bits[0])), int(energies[0])


def _ground_bits(inst: Instance) -> frozenset[int]:
    if inst.planted is not None:
        return frozenset(inst.ground_pair())
    _, minimizers = ground_state_set(inst)
    return frozenset(c.bits for c in minimizers)


def sa_assess(
    inst: Instance,
    sched: SaSchedule,
    trials: int,
    seed,
    max_distractions: int = MAX_DISTRACTIONS,
) -> SaReport:
    """Success rate over independent trials plus deduplicated distractions.

    Trial t uses the stream derived from (seed, "sa-trial", t), so the report
    is identical however the trials are scheduled.  Distractions are the
    final states of failed trials, deduplicated up to global flip, sorted by
    (energy, bit pattern) and truncated to ``max_distractions``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    ground = _ground_bits(inst)
    seeds = [seed_sequence(seed, "sa-trial", t) for t in range(trials)]
    bits, energies = _run_chains(inst, sched, seeds)

    finals = tuple(
        (SpinConfig(inst.n, int(b)), int(e)) for b, e in zip(bits, energies)
    )
    hits = sum(1 for b in bits if int(b) in ground)

    mask = (1 << inst.n) - 1
    canon: dict[int, int] = {}
    for b, e in zip(bits, energies):
        b = int(b)
        if b in ground:
            continue
        canon.setdefault(min(b, b ^ mask), int(e))
    ranked = sorted(canon.items(), key=lambda kv: (kv[1], kv[0]))[:max_distractions]
    distractions = tuple((SpinConfig(inst.n, b), e) for b, e in ranked)

    return SaReport(
        success_rate=hits / trials,
        trials=trials,
        distractions=distractions,
        per_trial_final=finals,
    )


def classify_difficulty(
    inst: Instance,
    sched: SaSchedule | None = None,
    trials: int = 1000,
    seed=0,
) -> str:
    """simple (R > 0.95), hard (R < 0.10) or intermediate."""
    report = sa_assess(inst, sched or SaSchedule(), trials, seed)
    if report.success_rate > SIMPLE_RATE:
        return "simple"
    if report.success_rate < HARD_RATE:
        return "hard"
    return "intermediate"


# ---------------------------------------------------------------------------
# pair-greedy local analysis


@dataclass(frozen=True)
class GreedyStep:
    """One processed pair: what the analysis did and whether it agreed."""

    pair: tuple[int, int]
    count: int
    action: str  # seed | attach | merge | agree | conflict
    flipped_cluster: bool = False


def greedy_local_analysis(inst: Instance) -> tuple[SpinConfig, list[GreedyStep]]:
    """Anti-align spin pairs in order of descending clause co-occurrence.

    Pairs with equal counts are processed in lexicographic order.  Each pair
    seeds, extends or merges a cluster of relatively-oriented spins; merges
    keep the orientation of the cluster containing the pair's lower spin.
    Spins left unassigned at the end (spins in no clause) are set one at a
    time to whichever value does not increase the energy, +1 on ties.
    Deterministic by construction.
    """
    n = inst.n
    J = coupling_matrix(inst)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if J[a, b] > 0]
    pairs.sort(key=lambda p: (-J[p[0], p[1]], p))

    assign = [0] * n  # 0 = unassigned, else +-1
    cluster_of = [-1] * n
    members: dict[int, list[int]] = {}
    next_cluster = 0
    trace: list[GreedyStep] = []

    for a, b in pairs:
        count = int(J[a, b])
        if assign[a] == 0 and assign[b] == 0:
            assign[a], assign[b] = 1, -1
            cluster_of[a] = cluster_of[b] = next_cluster
            members[next_cluster] = [a, b]
            next_cluster += 1
            trace.append(GreedyStep((a, b), count, "seed"))
        elif assign[a] == 0 or assign[b] == 0:
            known, new = (a, b) if assign[a] != 0 else (b, a)
            assign[new] = -assign[known]
            cid = cluster_of[known]
            cluster_of[new] = cid
            members[cid].append(new)
            trace.append(GreedyStep((a, b), count, "attach"))
        elif cluster_of[a] == cluster_of[b]:
            action = "agree" if assign[a] != assign[b] else "conflict"
            trace.append(GreedyStep((a, b), count, action))
        else:
            keep, absorb = cluster_of[a], cluster_of[b]
            flip = assign[a] == assign[b]
            if flip:
                for s in members[absorb]:
                    assign[s] = -assign[s]
            for s in members[absorb]:
                cluster_of[s] = keep
            members[keep].extend(members.pop(absorb))
            trace.append(GreedyStep((a, b), count, "merge", flipped_cluster=flip))

    def energy_with(s: int, v: int) -> int:
        probe = [x if x != 0 else 1 for x in assign]
        probe[s] = v
        return instance_energy(inst, SpinConfig.from_spins(probe))

    for s in range(n):
        if assign[s] == 0:
            assign[s] = 1 if energy_with(s, 1) <= energy_with(s, -1) else -1

    return SpinConfig.from_spins(assign), trace
