import json
from pathlib import Path

import numpy as np
import pytest

from qdrop.harness import (
    AggregateEntry,
    ExperimentConfig,
    default_trials,
    run_assess,
    run_cross_test,
    run_depth_sweep,
    run_dropout_compare,
    run_landscape,
    sa_baseline,
)
from qdrop.instances import (
    SpinConfig,
    generate_planted,
    load_instance,
    save_instance,
)
from qdrop.qaoa import OptimizerConfig


@pytest.fixture(scope="module")
def inst_path(tmp_path_factory):
    inst = generate_planted(8, SpinConfig(8, 0b01100101), "sporadic", seed=9)
    path = tmp_path_factory.mktemp("inst") / "easy8.json"
    save_instance(inst, path)
    return path


@pytest.fixture(scope="module")
def paired_paths(tmp_path_factory):
    planted = SpinConfig(8, 0b00101100)
    easy = generate_planted(8, planted, "sporadic", seed=5)
    hard = generate_planted(8, planted, "concentrated", seed=1)
    root = tmp_path_factory.mktemp("paired")
    pe, ph = root / "easy.json", root / "hard.json"
    save_instance(easy, pe)
    save_instance(hard, ph)
    return pe, ph


def small_config(inst_path, out, **overrides):
    defaults = dict(
        kind="sweep",
        instances=(str(inst_path),),
        depths=(2, 3),
        trials=3,
        optimizer=OptimizerConfig(epochs=10, record_every=10),
        master_seed=7,
        out_dir=str(out),
        sa_trials=100,
        make_plots=False,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestProtocol:
    def test_default_trials(self):
        assert default_trials(10) == 100
        assert default_trials(20) == 100
        assert default_trials(25) == 50
        assert default_trials(40) == 50
        assert default_trials(45) == 30
        assert default_trials(50) == 30

    def test_config_digest_stable(self, inst_path, tmp_path):
        a = small_config(inst_path, tmp_path)
        b = small_config(inst_path, tmp_path)
        assert a.digest == b.digest
        c = small_config(inst_path, tmp_path, master_seed=8)
        assert c.digest != a.digest

    def test_digest_ignores_runtime_fields(self, inst_path, tmp_path):
        a = small_config(inst_path, tmp_path, threads=1)
        b = small_config(inst_path, tmp_path, threads=4)
        assert a.digest == b.digest


class TestSaBaseline:
    def test_cached_roundtrip(self, inst_path):
        inst = load_instance(inst_path)
        first = sa_baseline(inst, inst_path, trials=100)
        cache = Path(str(inst_path).replace(".json", ".sa.json"))
        assert cache.exists()
        again = sa_baseline(inst, inst_path, trials=100)
        assert again.success_rate == first.success_rate
        assert [c.bits for c, _ in again.distractions] == [
            c.bits for c, _ in first.distractions
        ]

    def test_cache_invalidated_on_trials_change(self, inst_path):
        inst = load_instance(inst_path)
        a = sa_baseline(inst, inst_path, trials=100)
        b = sa_baseline(inst, inst_path, trials=150)
        assert b.trials == 150


class TestRunAssess:
    def test_labels_written_back(self, inst_path):
        report, label = run_assess(inst_path, trials=100)
        assert label == "simple"
        assert load_instance(inst_path).label == "simple"

    def test_rerun_identical(self, inst_path):
        a, _ = run_assess(inst_path, trials=100)
        b, _ = run_assess(inst_path, trials=100)
        assert a.success_rate == b.success_rate


class TestDepthSweep:
    def test_outputs_and_aggregates(self, inst_path, tmp_path):
        config = small_config(inst_path, tmp_path)
        agg = run_depth_sweep(config)
        assert {e.depth for e in agg.entries} == {2, 3}
        for e in agg.entries:
            assert e.trials == 3
            assert e.best >= e.mean
            assert e.std >= 0
            assert 0 <= e.mean <= 1
        out = config.output_dir()
        assert (out / "trials.csv").exists()
        assert (out / "aggregate.json").exists()

    def test_trials_csv_deterministic(self, inst_path, tmp_path):
        c1 = small_config(inst_path, tmp_path / "a")
        run_depth_sweep(c1)
        bytes1 = (c1.output_dir() / "trials.csv").read_bytes()
        c2 = small_config(inst_path, tmp_path / "b")
        run_depth_sweep(c2)
        bytes2 = (c2.output_dir() / "trials.csv").read_bytes()
        assert bytes1 == bytes2

    def test_aggregates_match_rows(self, inst_path, tmp_path):
        config = small_config(inst_path, tmp_path)
        agg = run_depth_sweep(config)
        rows = (config.output_dir() / "trials.csv").read_text().splitlines()[1:]
        for e in agg.entries:
            succ = np.array(
                sorted(
                    (int(r.split(",")[2]), float(r.split(",")[4]))
                    for r in rows
                    if int(r.split(",")[0]) == e.depth and r.split(",")[1] == e.scheme
                )
            )[:, 1]
            assert float(succ.max()) == e.best
            assert float(succ.mean()) == e.mean
            assert float(succ.std()) == e.std

    def test_metadata_embedded(self, inst_path, tmp_path):
        config = small_config(inst_path, tmp_path)
        run_depth_sweep(config)
        data = json.loads((config.output_dir() / "aggregate.json").read_text())
        assert data["config_digest"] == config.digest
        assert data["master_seed"] == 7
        assert data["instance_digests"] == [load_instance(inst_path).digest]
        assert "version" in data

    def test_resume_skips_completed_groups(self, inst_path, tmp_path):
        config = small_config(inst_path, tmp_path)
        run_depth_sweep(config)
        before = (config.output_dir() / "trials.csv").read_bytes()
        run_depth_sweep(config)  # second run resumes, must not change files
        assert (config.output_dir() / "trials.csv").read_bytes() == before

    def test_threads_do_not_change_results(self, inst_path, tmp_path):
        c1 = small_config(inst_path, tmp_path / "s")
        run_depth_sweep(c1)
        c2 = small_config(inst_path, tmp_path / "t", threads=2)
        run_depth_sweep(c2)
        assert (c1.output_dir() / "trials.csv").read_bytes() == (
            c2.output_dir() / "trials.csv"
        ).read_bytes()


class TestDropoutCompare:
    def test_three_schemes(self, paired_paths, tmp_path):
        _, hard = paired_paths
        config = small_config(hard, tmp_path, kind="dropout_compare", depths=(2,), trials=2)
        agg = run_dropout_compare(config)
        assert {e.scheme for e in agg.entries} == {"none", "uniform", "per_layer"}


class TestCrossTest:
    def test_four_combos(self, paired_paths, tmp_path):
        easy, hard = paired_paths
        config = ExperimentConfig(
            kind="crosstest",
            instances=(str(easy), str(hard)),
            depths=(3,),
            trials=2,
            optimizer=OptimizerConfig(epochs=5, record_every=5),
            master_seed=1,
            out_dir=str(tmp_path),
            make_plots=False,
        )
        results = run_cross_test(config)
        assert set(results) == {"E-E", "E-H", "H-E", "H-H"}
        assert all(len(v) == 2 for v in results.values())
        out = config.output_dir()
        assert (out / "trajectory_E-H_1.csv").exists()
        data = json.loads((out / "crosstest.json").read_text())
        assert set(data["final_success_mean"]) == set(results)

    def test_rejects_mismatched_pairs(self, inst_path, paired_paths, tmp_path):
        _, hard = paired_paths
        config = ExperimentConfig(
            kind="crosstest",
            instances=(str(inst_path), str(hard)),
            depths=(2,),
            trials=1,
            out_dir=str(tmp_path),
            make_plots=False,
        )
        with pytest.raises(ValueError):
            run_cross_test(config)


class TestLandscapeExport:
    def test_csv_written(self, inst_path, tmp_path):
        config = ExperimentConfig(
            kind="landscape",
            instances=(str(inst_path),),
            fractions=(1.0, 0.5),
            master_seed=3,
            out_dir=str(tmp_path),
            make_plots=False,
        )
        entries = run_landscape(config)
        assert [f for f, _ in entries] == [1.0, 0.5]
        lines = (config.output_dir() / "landscape.csv").read_text().splitlines()
        assert lines[0] == "distance,energy,normalized_energy,retain_fraction"
