"""Numba-compiled inner loops.

Everything here is a plain array-in/array-out kernel; all problem-level logic
(seeding, validation, data model) lives in the public modules.  Kernels are
single-threaded on purpose: callers parallelize at the trial level with
processes, and deterministic results must not depend on a thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def clause_energy_table(clauses, weights, n, out):
    """Weighted clause-violation energy for every basis index.

    ``clauses`` is (m, 3) int64, ``weights`` (m,) float64, ``out`` (2**n,)
    float64.  Bit b of a basis index encodes spin b (set bit means spin -1);
    a clause contributes ``4 * weight`` exactly when its three spins agree.
    """
    dim = 1 << n
    m = clauses.shape[0]
    for b in range(dim):
        e = 0.0
        for c in range(m):
            t = (
                ((b >> clauses[c, 0]) & 1)
                + ((b >> clauses[c, 1]) & 1)
                + ((b >> clauses[c, 2]) & 1)
            )
            if t == 0 or t == 3:
                e += 4.0 * weights[c]
        out[b] = e


@njit(cache=True)
def apply_mixing_inplace(pf, n, cos_b, sin_b):
    """One transverse-field layer: per qubit, [[c, i s], [i s, c]].

    ``pf`` is the float64 view of the complex amplitudes (re/im interleaved),
    which lets the compiler vectorize the purely real arithmetic: the matrix
    has a real diagonal and an imaginary off-diagonal.
    """
    dim = pf.shape[0] >> 1
    for q in range(n):
        half = 1 << q
        step = half << 1
        for base in range(0, dim, step):
            for i0 in range(base, base + half):
                i1 = i0 + half
                ar = pf[2 * i0]
                ai = pf[2 * i0 + 1]
                br = pf[2 * i1]
                bi = pf[2 * i1 + 1]
                pf[2 * i0] = cos_b * ar - sin_b * bi
                pf[2 * i0 + 1] = cos_b * ai + sin_b * br
                pf[2 * i1] = cos_b * br - sin_b * ai
                pf[2 * i1 + 1] = cos_b * bi + sin_b * ar


@njit(cache=True)
def apply_phase_lookup(psi, level_index, level_phases):
    """psi[b] *= level_phases[level_index[b]] (quantized energy tables)."""
    for b in range(psi.shape[0]):
        psi[b] *= level_phases[level_index[b]]


@njit(cache=True)
def apply_phase_direct(psi, energies, gamma):
    """psi[b] *= exp(-i * gamma * energies[b]) without a lookup table."""
    for b in range(psi.shape[0]):
        x = gamma * energies[b]
        psi[b] *= complex(np.cos(x), -np.sin(x))


@njit(cache=True)
def sum_bitflips_im_dot(bra, ket, n):
    """Im <bra| sum_q X_q |ket> accumulated without materializing X|ket>."""
    dim = bra.shape[0]
    acc = 0.0
    for q in range(n):
        half = 1 << q
        step = half << 1
        for base in range(0, dim, step):
            for i0 in range(base, base + half):
                i1 = i0 + half
                z0 = bra[i0].conjugate() * ket[i1]
                z1 = bra[i1].conjugate() * ket[i0]
                acc += z0.imag + z1.imag
    return acc


@njit(cache=True)
def weighted_im_dot(bra, ket, energies):
    """sum_b energies[b] * Im(conj(bra[b]) * ket[b])."""
    acc = 0.0
    for b in range(bra.shape[0]):
        z = bra[b].conjugate() * ket[b]
        acc += energies[b] * z.imag
    return acc


@njit(cache=True)
def min_energy_per_shell(energies, center_bits, n, out):
    """Minimum table entry per Hamming distance from ``center_bits``.

    ``out`` has length n + 1 and must be pre-filled with +inf.
    """
    dim = energies.shape[0]
    for b in range(dim):
        v = b ^ center_bits
        d = 0
        while v:
            v &= v - 1
            d += 1
        if energies[b] < out[d]:
            out[d] = energies[b]


@njit(cache=True)
def anneal_chains(states, couplings, proposals, uniforms, temps, pair_energy):
    """Metropolis single-flip annealing, one independent chain per row.

    ``states``   (trials, n) int8 spins in {-1, +1}, mutated in place.
    ``couplings``(n, n) int64 symmetric pair counts, zero diagonal.
    ``proposals``(trials, steps) int32 spin index proposed at each step.
    ``uniforms`` (trials, steps) float64 acceptance draws.
    ``temps``    (steps,) float64 temperature at each step.
    ``pair_energy`` (trials,) int64 out: final sum_{a<b} J_ab s_a s_b.

    The full instance energy is ``pair_energy + n_clauses``; the constant
    cancels in every Metropolis ratio so the kernel never needs it.
    """
    trials, n = states.shape
    steps = proposals.shape[1]
    field = np.empty(n, dtype=np.int64)
    for t in range(trials):
        for a in range(n):
            acc = 0
            for b in range(n):
                acc += couplings[a, b] * states[t, b]
            field[a] = acc
        for k in range(steps):
            a = proposals[t, k]
            delta = -2 * states[t, a] * field[a]
            if delta <= 0 or uniforms[t, k] < np.exp(-delta / temps[k]):
                flipped = -states[t, a]
                states[t, a] = flipped
                for b in range(n):
                    field[b] += 2 * flipped * couplings[a, b]
        e = 0
        for a in range(n):
            e += field[a] * states[t, a]
        pair_energy[t] = e // 2
