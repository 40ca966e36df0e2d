import math

import numpy as np
import pytest

from qdrop.dropout import build_energy_table
from qdrop.instances import Clause, Instance, SpinConfig, generate_planted, instance_energy
from qdrop.landscape import (
    LandscapeCurve,
    interior_local_minima,
    landscape_under_dropout,
    min_energy_by_distance,
    normalize_curve,
    normalize_family,
    shell_sizes,
    write_curves_csv,
)


@pytest.fixture(scope="module")
def inst10():
    return generate_planted(10, SpinConfig(10, 0b0110010011), "sporadic", seed=4)


def brute_curve(inst, ref):
    """Independent oracle: direct scan with per-config energy calls."""
    vals = [math.inf] * (inst.n + 1)
    for b in range(1 << inst.n):
        d = bin(b ^ ref.bits).count("1")
        e = instance_energy(inst, SpinConfig(inst.n, b))
        vals[d] = min(vals[d], e)
    return vals


class TestMinEnergyByDistance:
    def test_matches_brute_force(self):
        inst = generate_planted(6, SpinConfig.from_spins([1, 1, 1, -1, -1, -1]), "sporadic", seed=1)
        curve = min_energy_by_distance(inst, inst.planted)
        assert curve.values.tolist() == brute_curve(inst, inst.planted)

    def test_single_clause_all_shells_zero(self):
        inst = Instance(3, (Clause(0, 1, 2),))
        ref = SpinConfig.from_spins([1, 1, -1])
        curve = min_energy_by_distance(inst, ref)
        assert curve.values.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_endpoints_zero_for_planted(self, inst10):
        curve = min_energy_by_distance(inst10, inst10.planted)
        assert curve.values[0] == 0.0 and curve.values[inst10.n] == 0.0

    def test_symmetry(self, inst10):
        curve = min_energy_by_distance(inst10, inst10.planted)
        assert (curve.values == curve.values[::-1]).all()

    def test_accepts_energy_table(self, inst10):
        table = build_energy_table(inst10, np.ones(inst10.m))
        a = min_energy_by_distance(table, inst10.planted)
        b = min_energy_by_distance(inst10, inst10.planted)
        assert (a.values == b.values).all()


class TestShellSizes:
    def test_binomials(self, inst10):
        sizes = shell_sizes(inst10.n, inst10.planted)
        assert sizes.sum() == 1 << inst10.n
        assert sizes.tolist() == [math.comb(inst10.n, d) for d in range(inst10.n + 1)]


class TestNormalize:
    def test_affine(self):
        curve = LandscapeCurve(2, np.array([0.0, 4.0, 8.0]))
        assert normalize_curve(curve).normalized.tolist() == [0.0, 0.5, 1.0]

    def test_constant_maps_to_zero(self):
        curve = LandscapeCurve(2, np.array([2.0, 2.0, 2.0]))
        assert normalize_curve(curve).normalized.tolist() == [0.0, 0.0, 0.0]

    def test_range_is_unit(self, inst10):
        curve = normalize_curve(min_energy_by_distance(inst10, inst10.planted))
        assert curve.normalized.min() == 0.0
        assert curve.normalized.max() == 1.0

    def test_family_shares_scale(self):
        ref = LandscapeCurve(2, np.array([0.0, 8.0, 0.0]))
        other = LandscapeCurve(2, np.array([0.0, 4.0, 0.0]))
        fam = normalize_family([ref, other], ref)
        assert fam[0].normalized.max() == 1.0
        assert fam[1].normalized.max() == 0.5


class TestRuggedness:
    def test_counts_strict_dips(self):
        curve = LandscapeCurve(6, np.array([0.0, 4.0, 2.0, 4.0, 2.0, 4.0, 0.0]))
        assert interior_local_minima(curve) == 2

    def test_smooth_basin_zero(self):
        curve = LandscapeCurve(4, np.array([0.0, 2.0, 4.0, 2.0, 0.0]))
        assert interior_local_minima(curve) == 0


class TestDropoutLandscape:
    def test_fraction_one_is_full_curve(self, inst10):
        entries = landscape_under_dropout(inst10, inst10.planted, [1.0], seed=0)
        full = min_energy_by_distance(inst10, inst10.planted)
        assert (entries[0][1].values == full.values).all()

    def test_ground_state_preserved(self, inst10):
        entries = landscape_under_dropout(inst10, inst10.planted, [0.5, 0.25], seed=1)
        for _, curve in entries:
            assert curve.values[0] == 0.0

    def test_pointwise_below_full(self, inst10):
        full = min_energy_by_distance(inst10, inst10.planted)
        entries = landscape_under_dropout(inst10, inst10.planted, [0.5], seed=2)
        assert (entries[0][1].values <= full.values).all()

    def test_rejects_bad_fraction(self, inst10):
        with pytest.raises(ValueError):
            landscape_under_dropout(inst10, inst10.planted, [0.0])

    def test_rejects_foreign_reference(self, inst10):
        bad = SpinConfig(inst10.n, inst10.planted.bits ^ 1)
        with pytest.raises(ValueError):
            landscape_under_dropout(inst10, bad, [0.5])


class TestCsv:
    def test_columns_and_rows(self, tmp_path, inst10):
        entries = landscape_under_dropout(inst10, inst10.planted, [1.0, 0.5], seed=3)
        path = tmp_path / "curves.csv"
        write_curves_csv(path, entries)
        lines = path.read_text().splitlines()
        assert lines[0] == "distance,energy,normalized_energy,retain_fraction"
        assert len(lines) == 1 + 2 * (inst10.n + 1)
        first = lines[1].split(",")
        assert first[0] == "0" and float(first[1]) == 0.0
