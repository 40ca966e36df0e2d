"""Exact statevector simulation of the alternating-layer circuit.

The state is a dense complex128 vector over all 2**n basis indices, with the
same bit convention as ``SpinConfig`` (bit i set = spin i is -1, spin 0 in
the least significant bit).  Driving layers are diagonal phase rotations by a
clause-energy table; mixing layers apply exp(i * beta * sigma_x) per qubit.
Gradients of the energy expectation are computed analytically in one reverse
sweep (adjoint method): forward-propagate the state, apply the cost table
once, then walk the layers backwards undoing each unitary on both vectors and
accumulating the two derivative inner products per layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dropout import EnergyTable

NORM_TOL = 1e-10
MOMENTUM = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class OptimizationError(RuntimeError):
    """The optimizer encountered a non-finite cost or gradient."""


@dataclass(frozen=True)
class QaoaParams:
    """Driving angles (gammas) and mixing angles (betas), one pair per layer."""

    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=np.float64)
        b = np.asarray(self.betas, dtype=np.float64)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)
        if g.shape != b.shape or g.ndim != 1 or g.size < 1:
            raise ValueError("gammas and betas must be 1-D arrays of equal length")
        if not (np.isfinite(g).all() and np.isfinite(b).all()):
            raise ValueError("angles must be finite")

    @property
    def p(self) -> int:
        return self.gammas.size

    @classmethod
    def random(cls, p: int, rng: np.random.Generator) -> "QaoaParams":
        """Both angle vectors i.i.d. uniform on (-pi, pi)."""
        return cls(rng.uniform(-np.pi, np.pi, p), rng.uniform(-np.pi, np.pi, p))


@dataclass(frozen=True)
class OptimizerConfig:
    """First-order optimizer settings.

    ``adam`` (default) rescales each step by a running RMS of the gradient;
    plain ``momentum`` is kept for comparison but stalls on deep circuits,
    where raw gradients span orders of magnitude across layers.
    """

    method: str = "adam"
    learning_rate: float = 0.05
    epochs: int = 1000
    record_every: int = 10

    def __post_init__(self):
        if self.method not in ("adam", "momentum"):
            raise ValueError(f"unsupported optimizer {self.method!r}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("need at least one epoch")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Recorded optimization history plus the final operating point."""

    epochs: np.ndarray
    costs: np.ndarray
    successes: np.ndarray
    final_params: QaoaParams
    final_cost: float
    final_success: float

    def summary_json_dict(self) -> dict:
        return {
            "final_cost": self.final_cost,
            "final_success": self.final_success,
            "params": {
                "gammas": self.final_params.gammas.tolist(),
                "betas": self.final_params.betas.tolist(),
            },
        }


def init_plus(n: int) -> np.ndarray:
    """|+>^n: every amplitude 2**(-n/2)."""
    if n < 1 or n > 26:
        raise ValueError(f"qubit count must be in [1, 26], got {n}")
    dim = 1 << n
    return np.full(dim, dim ** -0.5, dtype=np.complex128)


def _qubits_of(psi: np.ndarray) -> int:
    n = int(psi.shape[0]).bit_length() - 1
    if psi.shape[0] != 1 << n:
        raise ValueError("state length must be a power of two")
    return n


def apply_driving(psi: np.ndarray, table: EnergyTable, gamma: float) -> np.ndarray:
    """psi[b] *= exp(-i * gamma * E[b]), in place."""
    if table.energies.shape != psi.shape:
        raise ValueError("energy table does not match state dimension")
    _phase_inplace(psi, table, gamma)
    return psi


def _phase_inplace(psi: np.ndarray, table: EnergyTable, gamma: float) -> None:
    levels = table._levels
    if levels is not None:
        values, index = levels
        _kernels.apply_phase_lookup(psi, index, np.exp(-1j * gamma * values))
    else:
        _kernels.apply_phase_direct(psi, table.energies, gamma)


def apply_mixing(psi: np.ndarray, beta: float) -> np.ndarray:
    """Per-qubit [[cos b, i sin b], [i sin b, cos b]], in place."""
    n = _qubits_of(psi)
    _kernels.apply_mixing_inplace(psi.view(np.float64), n, np.cos(beta), np.sin(beta))
    return psi


def evolve(tables: list[EnergyTable], params: QaoaParams) -> np.ndarray:
    """Run the full circuit from |+>^n; returns a fresh state vector."""
    if len(tables) != params.p:
        raise ValueError(f"got {len(tables)} layer tables for p={params.p}")
    psi = init_plus(tables[0].n)
    for table, gamma, beta in zip(tables, params.gammas, params.betas):
        apply_driving(psi, table, gamma)
        apply_mixing(psi, beta)
    return psi


def cost(psi: np.ndarray, cost_table: EnergyTable) -> float:
    """Energy expectation <psi|H|psi> against the full clause table."""
    if not cost_table.full_weights:
        raise ValueError("cost must be evaluated against the full clause table")
    if cost_table.energies.shape != psi.shape:
        raise ValueError("energy table does not match state dimension")
    probs = psi.real**2 + psi.imag**2
    return float(probs @ cost_table.energies)


def success_probability(psi: np.ndarray, ground_pair: tuple[int, int]) -> float:
    """Summed squared overlap with the two ground basis states."""
    lo, hi = ground_pair
    total = abs(psi[lo]) ** 2
    if hi != lo:
        total += abs(psi[hi]) ** 2
    return float(total)


def _adjoint_sweep(
    tables: list[EnergyTable], params: QaoaParams, cost_table: EnergyTable
) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """Gradient, cost and final state in one forward + one backward pass."""
    p = params.p
    n = tables[0].n
    ket = evolve(tables, params)
    final = ket.copy()
    bra = ket * cost_table.energies
    cost_value = float(np.vdot(ket, bra).real)

    dgam = np.empty(p)
    dbet = np.empty(p)
    for m in range(p - 1, -1, -1):
        beta = params.betas[m]
        gamma = params.gammas[m]
        dbet[m] = -2.0 * _kernels.sum_bitflips_im_dot(bra, ket, n)
        cos_b, sin_b = np.cos(-beta), np.sin(-beta)
        _kernels.apply_mixing_inplace(ket.view(np.float64), n, cos_b, sin_b)
        _kernels.apply_mixing_inplace(bra.view(np.float64), n, cos_b, sin_b)
        dgam[m] = 2.0 * _kernels.weighted_im_dot(bra, ket, tables[m].energies)
        _phase_inplace(ket, tables[m], -gamma)
        _phase_inplace(bra, tables[m], -gamma)
    return dgam, dbet, cost_value, final


def gradient(
    tables: list[EnergyTable], params: QaoaParams, cost_table: EnergyTable
) -> tuple[np.ndarray, np.ndarray]:
    """Exact d<H>/dgamma and d<H>/dbeta via the adjoint reverse sweep."""
    if not cost_table.full_weights:
        raise ValueError("cost must be evaluated against the full clause table")
    dgam, dbet, _, _ = _adjoint_sweep(tables, params, cost_table)
    return dgam, dbet


def optimize(
    tables: list[EnergyTable],
    cost_table: EnergyTable,
    init_params: QaoaParams,
    config: OptimizerConfig,
    ground_pair: tuple[int, int],
) -> Trajectory:
    """Momentum descent on the energy expectation; deterministic throughout.

    Cost and success probability are recorded at every ``record_every``-th
    epoch (evaluated before that epoch's update) and once more at the final
    parameters.  Never stops early; a non-finite cost or gradient aborts.
    """
    if not cost_table.full_weights:
        raise ValueError("cost must be evaluated against the full clause table")
    if len(tables) != init_params.p:
        raise ValueError("layer tables and parameters disagree on depth")

    theta = np.concatenate([init_params.gammas, init_params.betas])
    p = init_params.p
    velocity = np.zeros_like(theta)
    second = np.zeros_like(theta)
    epochs_rec: list[int] = []
    costs_rec: list[float] = []
    succ_rec: list[float] = []

    for epoch in range(config.epochs):
        params = QaoaParams(theta[:p], theta[p:])
        dgam, dbet, cost_value, psi = _adjoint_sweep(tables, params, cost_table)
        grad = np.concatenate([dgam, dbet])
        if not (np.isfinite(cost_value) and np.isfinite(grad).all()):
            raise OptimizationError(
                f"non-finite cost or gradient at epoch {epoch} "
                f"(cost={cost_value!r}, lr={config.learning_rate})"
            )
        if epoch % config.record_every == 0:
            epochs_rec.append(epoch)
            costs_rec.append(cost_value)
            succ_rec.append(success_probability(psi, ground_pair))
        if config.method == "adam":
            velocity = MOMENTUM * velocity + (1 - MOMENTUM) * grad
            second = ADAM_BETA2 * second + (1 - ADAM_BETA2) * grad**2
            m_hat = velocity / (1 - MOMENTUM ** (epoch + 1))
            v_hat = second / (1 - ADAM_BETA2 ** (epoch + 1))
            theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        else:
            velocity = MOMENTUM * velocity - config.learning_rate * grad
            theta = theta + velocity

    final_params = QaoaParams(theta[:p], theta[p:])
    psi = evolve(tables, final_params)
    final_cost = cost(psi, cost_table)
    final_success = success_probability(psi, ground_pair)
    epochs_rec.append(config.epochs)
    costs_rec.append(final_cost)
    succ_rec.append(final_success)

    return Trajectory(
        epochs=np.asarray(epochs_rec, dtype=np.int64),
        costs=np.asarray(costs_rec),
        successes=np.asarray(succ_rec),
        final_params=final_params,
        final_cost=final_cost,
        final_success=final_success,
    )
