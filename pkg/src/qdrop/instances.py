"""Not-all-equal 3-SAT instances with planted ground states.

The spin encoding is fixed project-wide: basis index ``b`` encodes spin ``i``
as +1 when bit ``i`` of ``b`` is clear and -1 when it is set, with spin 0 in
the least significant bit.  A ``SpinConfig`` therefore doubles as a
computational-basis index, and classical and statevector code share one
byte-exact convention.

A clause over spins ``(i, j, k)`` costs 0 when the three spins are not all
equal and 4 when they agree, so the instance energy is a nonnegative integer
and a planted assignment (together with its global flip) sits at energy 0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .seeding import rng_for

MAX_ENUM_SPINS = 28

LABELS = ("simple", "hard", "unclassified")


class GenerationError(RuntimeError):
    """Clause accumulation failed to produce a unique ground pair."""


class EnumerationLimitError(ValueError):
    """Exhaustive enumeration requested beyond the supported spin count."""


@dataclass(frozen=True)
class Clause:
    """An index triple in canonical sorted order."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if not 0 <= self.i < self.j < self.k:
            raise ValueError(f"clause indices must satisfy 0 <= i < j < k, got {self}")

    @classmethod
    def of(cls, a: int, b: int, c: int) -> "Clause":
        i, j, k = sorted((a, b, c))
        return cls(i, j, k)

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return ((self.i, self.j), (self.i, self.k), (self.j, self.k))


@dataclass(frozen=True)
class SpinConfig:
    """An n-spin +-1 assignment stored as a bit pattern (set bit = spin -1)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("spin count must be positive")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bit pattern {self.bits:#x} out of range for n={self.n}")

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> "SpinConfig":
        bits = 0
        for i, s in enumerate(spins):
            if s == -1:
                bits |= 1 << i
            elif s != 1:
                raise ValueError(f"spin values must be +-1, got {s}")
        return cls(len(spins), bits)

    def spin(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"spin index {i} out of range for n={self.n}")
        return -1 if (self.bits >> i) & 1 else 1

    def to_spins(self) -> list[int]:
        return [-1 if (self.bits >> i) & 1 else 1 for i in range(self.n)]

    def global_flip(self) -> "SpinConfig":
        return SpinConfig(self.n, self.bits ^ ((1 << self.n) - 1))

    def hamming(self, other: "SpinConfig") -> int:
        if other.n != self.n:
            raise ValueError("configurations have different spin counts")
        return (self.bits ^ other.bits).bit_count()

    @property
    def canonical_bits(self) -> int:
        """The lesser of the pattern and its global flip (Z2 representative)."""
        return min(self.bits, self.bits ^ ((1 << self.n) - 1))


def clause_energy(clause: Clause, config: SpinConfig) -> int:
    """0 when the three spins are not all equal, 4 when they agree."""
    if clause.k >= config.n:
        raise IndexError(f"clause {clause} out of range for n={config.n}")
    b = config.bits
    t = ((b >> clause.i) & 1) + ((b >> clause.j) & 1) + ((b >> clause.k) & 1)
    return 4 if t in (0, 3) else 0


@dataclass(frozen=True)
class Instance:
    """A clause set over n spins, optionally with its planted ground state."""

    n: int
    clauses: tuple[Clause, ...]
    planted: SpinConfig | None = None
    label: str | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("an NAE3SAT instance needs at least 3 spins")
        for c in self.clauses:
            if c.k >= self.n:
                raise ValueError(f"clause {c} out of range for n={self.n}")
        if self.planted is not None:
            if self.planted.n != self.n:
                raise ValueError("planted configuration has wrong spin count")
            for c in self.clauses:
                if clause_energy(c, self.planted) != 0:
                    raise ValueError(f"planted configuration violates clause {c}")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def clause_array(self) -> np.ndarray:
        """(m, 3) int64 view of the clause indices for the kernels."""
        if not self.clauses:
            return np.empty((0, 3), dtype=np.int64)
        return np.asarray([c.indices for c in self.clauses], dtype=np.int64)

    def ground_pair(self) -> tuple[int, int]:
        """Basis indices of the planted configuration and its global flip."""
        if self.planted is None:
            raise ValueError("instance has no planted configuration")
        return (self.planted.bits, self.planted.global_flip().bits)

    @property
    def digest(self) -> str:
        """Content hash of the problem (clauses + planted, label excluded)."""
        payload = {
            "n": self.n,
            "clauses": [list(c.indices) for c in self.clauses],
            "planted": None if self.planted is None else self.planted.to_spins(),
        }
        blob = json.dumps(payload, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def instance_energy(inst: Instance, config: SpinConfig) -> int:
    if config.n != inst.n:
        raise ValueError("configuration has wrong spin count")
    return sum(clause_energy(c, config) for c in inst.clauses)


def coupling_matrix(inst: Instance) -> np.ndarray:
    """(n, n) symmetric count of clauses containing each spin pair."""
    J = np.zeros((inst.n, inst.n), dtype=np.int64)
    for c in inst.clauses:
        for a, b in c.pairs:
            J[a, b] += 1
            J[b, a] += 1
    return J


def pairwise_energy(inst: Instance, config: SpinConfig) -> int:
    """Instance energy through the Ising form: sum J_ab s_a s_b + m."""
    J = coupling_matrix(inst)
    s = np.asarray(config.to_spins(), dtype=np.int64)
    return int(s @ J @ s) // 2 + inst.m


def all_energies(inst: Instance) -> np.ndarray:
    """Energy of every basis index, (2**n,) float64 of exact small integers."""
    if inst.n > MAX_ENUM_SPINS:
        raise EnumerationLimitError(
            f"enumeration over 2**{inst.n} states exceeds the n<={MAX_ENUM_SPINS} limit"
        )
    out = np.empty(1 << inst.n, dtype=np.float64)
    weights = np.ones(inst.m, dtype=np.float64)
    _kernels.clause_energy_table(inst.clause_array(), weights, inst.n, out)
    return out


def ground_state_set(inst: Instance) -> tuple[int, list[SpinConfig]]:
    """Exact minimum energy and every minimizing configuration."""
    table = all_energies(inst)
    emin = float(table.min())
    minimizers = [SpinConfig(inst.n, int(b)) for b in np.flatnonzero(table == emin)]
    return int(emin), minimizers


# ---------------------------------------------------------------------------
# planted-instance generation


def _satisfying_indices(clauses: list[Clause], n: int) -> np.ndarray:
    """Basis indices satisfying every clause so far (full scan)."""
    arr = np.asarray([c.indices for c in clauses], dtype=np.int64)
    out = np.empty(1 << n, dtype=np.float64)
    _kernels.clause_energy_table(arr, np.ones(len(clauses)), n, out)
    return np.flatnonzero(out == 0.0)


def _filter_satisfying(indices: np.ndarray, clause: Clause) -> np.ndarray:
    """Drop indices on which the three clause spins agree."""
    t = (
        ((indices >> clause.i) & 1)
        + ((indices >> clause.j) & 1)
        + ((indices >> clause.k) & 1)
    )
    return indices[(t != 0) & (t != 3)]


UNIQUENESS_CHECK_STRIDE = 5  # brute-force re-check cadence while accumulating


def _accumulate_sporadic(n, planted, rng, max_clauses):
    """Uniform planted-consistent triples until the ground pair is unique."""
    clauses: list[Clause] = []
    seen: set[tuple[int, int, int]] = set()
    sat: np.ndarray | None = None
    budget = 50 * max_clauses
    while len(clauses) < max_clauses:
        if budget <= 0:
            return None
        budget -= 1
        c = Clause.of(*(int(x) for x in rng.choice(n, size=3, replace=False)))
        if c.indices in seen or clause_energy(c, planted) != 0:
            continue
        seen.add(c.indices)
        clauses.append(c)
        if sat is not None:
            sat = _filter_satisfying(sat, c)
        if len(clauses) % UNIQUENESS_CHECK_STRIDE == 0 or sat is not None:
            if sat is None:
                sat = _satisfying_indices(clauses, n)
            if sat.size == 2:
                return clauses
    return None


def _aligned_pair_pool(n, planted, rng, pool_size, aligned_fraction):
    """Spin-pair pool with at least ``aligned_fraction`` pairs equal in planted."""
    spins = planted.to_spins()
    ups = [i for i in range(n) if spins[i] == 1]
    downs = [i for i in range(n) if spins[i] == -1]
    aligned = [(a, b) for grp in (ups, downs) for ai, a in enumerate(grp) for b in grp[ai + 1 :]]
    anti = [(a, b) if a < b else (b, a) for a in ups for b in downs]
    want_aligned = max(1, int(np.ceil(aligned_fraction * pool_size)))
    want_aligned = min(want_aligned, len(aligned))
    pool: list[tuple[int, int]] = []
    if aligned:
        idx = rng.choice(len(aligned), size=want_aligned, replace=False)
        pool.extend(aligned[i] for i in idx)
    remaining = pool_size - len(pool)
    if remaining > 0 and anti:
        idx = rng.choice(len(anti), size=min(remaining, len(anti)), replace=False)
        pool.extend(anti[i] for i in idx)
    return pool


def _accumulate_concentrated(
    n, planted, rng, max_clauses, pool_size, aligned_fraction, pool_bias
):
    """Clause sampling biased through a small pair pool, misleading pair-count greedy.

    A ``pool_bias`` fraction of clauses is forced to contain a pool pair; the
    remainder is drawn uniformly so that the accumulated set can still pin a
    unique ground pair (a pool-only clause family is too small for that).
    """
    pool = _aligned_pair_pool(n, planted, rng, pool_size, aligned_fraction)
    if not pool:
        return None
    spins = planted.to_spins()
    clauses: list[Clause] = []
    seen: set[tuple[int, int, int]] = set()
    sat: np.ndarray | None = None
    budget = 50 * max_clauses
    while len(clauses) < max_clauses:
        if budget <= 0:
            return None
        budget -= 1
        if rng.random() < pool_bias:
            a, b = pool[int(rng.integers(len(pool)))]
            third = int(rng.integers(n))
            if third in (a, b):
                continue
            if spins[a] == spins[b] and spins[third] == spins[a]:
                continue  # planted would violate the clause
            c = Clause.of(a, b, third)
        else:
            c = Clause.of(*(int(x) for x in rng.choice(n, size=3, replace=False)))
            if clause_energy(c, planted) != 0:
                continue
        if c.indices in seen:
            continue
        seen.add(c.indices)
        clauses.append(c)
        if sat is not None:
            sat = _filter_satisfying(sat, c)
        if len(clauses) % UNIQUENESS_CHECK_STRIDE == 0 or sat is not None:
            if sat is None:
                sat = _satisfying_indices(clauses, n)
            if sat.size == 2:
                return clauses
    return None


def _greedy_misled(inst: Instance) -> bool:
    """True when the pair-greedy analysis lands > 1 flip from the ground pair."""
    from .sa import greedy_local_analysis

    guess, _ = greedy_local_analysis(inst)
    d = guess.hamming(inst.planted)
    return min(d, inst.n - d) > 1


def _has_heavy_aligned_pair(inst: Instance, min_count: int = 3) -> bool:
    """Some pair aligned in the planted state appears in >= min_count clauses."""
    J = coupling_matrix(inst)
    spins = inst.planted.to_spins()
    for a in range(inst.n):
        for b in range(a + 1, inst.n):
            if J[a, b] >= min_count and spins[a] == spins[b]:
                return True
    return False


DEFAULT_POOL_ALIGNED_FRACTION = 1.0
DEFAULT_POOL_BIAS = 0.9


def generate_planted(
    n: int,
    planted: SpinConfig,
    mode: str,
    seed,
    max_clauses: int | None = None,
    max_attempts: int = 50,
    pool_size: int | None = None,
    aligned_fraction: float = DEFAULT_POOL_ALIGNED_FRACTION,
    pool_bias: float = DEFAULT_POOL_BIAS,
) -> Instance:
    """Accumulate planted-consistent clauses until the ground pair is unique.

    ``sporadic`` mode draws triples uniformly.  ``concentrated`` mode biases
    clauses through a small pool of spin pairs, most of them aligned in the
    planted state; an accepted instance must carry at least one aligned pair
    in three or more clauses and must mislead the pair-greedy local analysis.
    Deterministic in all arguments; raises GenerationError when no attempt
    succeeds (which is certain for heavily unbalanced planted states, whose
    consistent-clause family cannot pin a unique pair).
    """
    if mode not in ("sporadic", "concentrated"):
        raise ValueError(f"unknown generation mode {mode!r}")
    if n < 5 or n > MAX_ENUM_SPINS:
        # below n=5 the consistent-clause family can never pin a unique pair
        raise ValueError(f"spin count must be in [5, {MAX_ENUM_SPINS}], got {n}")
    if planted.n != n:
        raise ValueError("planted configuration has wrong spin count")
    if max_clauses is None:
        max_clauses = 20 * n
    if pool_size is None:
        pool_size = max(3, n // 4)

    for attempt in range(max_attempts):
        rng = rng_for(seed, "generate", mode, attempt)
        if mode == "sporadic":
            clauses = _accumulate_sporadic(n, planted, rng, max_clauses)
        else:
            clauses = _accumulate_concentrated(
                n, planted, rng, max_clauses, pool_size, aligned_fraction, pool_bias
            )
        if clauses is None:
            continue
        inst = Instance(n, tuple(clauses), planted)
        if mode == "concentrated" and not (
            _has_heavy_aligned_pair(inst) and _greedy_misled(inst)
        ):
            continue
        return inst
    raise GenerationError(
        f"no unique-ground-pair instance after {max_attempts} attempts "
        f"(n={n}, mode={mode}, max_clauses={max_clauses})"
    )


def generate_paired(
    n: int,
    planted: SpinConfig,
    seed,
    sa_trials: int = 1000,
    easy_rate: float = 0.95,
    hard_rate: float = 0.10,
    max_attempts: int = 50,
) -> tuple[Instance, Instance]:
    """A sporadic and a concentrated instance sharing one planted ground pair.

    Each side is regenerated with fresh derived seeds until the annealing
    success rate clears its threshold (> easy_rate for the sporadic instance,
    < hard_rate for the concentrated one).
    """
    from .sa import SaSchedule, sa_assess

    sched = SaSchedule()

    def filtered(mode: str, ok) -> Instance:
        for attempt in range(max_attempts):
            inst = generate_planted(n, planted, mode, (seed, mode, attempt))
            report = sa_assess(inst, sched, sa_trials, (seed, "paired-sa", mode, attempt))
            if ok(report.success_rate):
                label = "simple" if mode == "sporadic" else "hard"
                return replace(inst, label=label)
        raise GenerationError(
            f"no {mode} instance met its annealing threshold in {max_attempts} attempts"
        )

    easy = filtered("sporadic", lambda r: r > easy_rate)
    hard = filtered("concentrated", lambda r: r < hard_rate)
    return easy, hard


# ---------------------------------------------------------------------------
# JSON persistence


def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "clauses": [list(c.indices) for c in inst.clauses],
        "planted": None if inst.planted is None else inst.planted.to_spins(),
        "label": inst.label if inst.label in ("simple", "hard") else None,
    }


def instance_from_dict(data: dict) -> Instance:
    n = int(data["n"])
    clauses = []
    for triple in data["clauses"]:
        a, b, c = (int(x) for x in triple)
        if len({a, b, c}) != 3:
            raise ValueError(f"clause {triple} has repeated indices")
        if not all(0 <= x < n for x in (a, b, c)):
            raise ValueError(f"clause {triple} out of range for n={n}")
        clauses.append(Clause.of(a, b, c))
    planted = data.get("planted")
    config = None if planted is None else SpinConfig.from_spins([int(s) for s in planted])
    label = data.get("label")
    return Instance(n, tuple(clauses), config, label)


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))
