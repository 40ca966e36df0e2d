"""Planted NAE3SAT workbench with a quantum-dropout QAOA simulator."""

__version__ = "0.1.0"

from .instances import (
    Clause,
    Instance,
    SpinConfig,
    clause_energy,
    coupling_matrix,
    generate_paired,
    generate_planted,
    ground_state_set,
    instance_energy,
    load_instance,
    save_instance,
)
from .sa import SaReport, SaSchedule, classify_difficulty, greedy_local_analysis, sa_assess, sa_run
from .dropout import DropoutPlan, EnergyTable, build_energy_table, eligible_clauses, full_table, layer_tables, make_plan
from .landscape import LandscapeCurve, landscape_under_dropout, min_energy_by_distance, normalize_curve
from .qaoa import OptimizerConfig, QaoaParams, Trajectory, evolve, gradient, init_plus, optimize, success_probability
from .harness import ExperimentConfig, run_assess, run_cross_test, run_depth_sweep, run_dropout_compare, run_landscape
