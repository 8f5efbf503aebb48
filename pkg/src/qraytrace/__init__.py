"""Simulated quantum ray tracing on tiny scenes.

Per pixel and colour channel, the superposed fixed-depth path tree is
evaluated into an oracle table. A comparator construction turns the table
mean into a marked-item count, and simulated quantum counting with Bayesian
MAP aggregation estimates that count. A Monte Carlo path tracer provides the
classical baseline.
"""
from .classical import TracerConfig, render_classical, sample_direction_uniform, trace_path_mc
from .counting import (
    BooleanOracle,
    CountingConfig,
    CountingOutcome,
    count_from_theta,
    counting_distribution,
    error_bound_check,
    grover_iteration,
    sample_outcome,
    simulate_counting_circuit,
    theta_from_count,
)
from .errors import ConfigError, SceneError
from .estimator import (
    ComparatorOracleSpec,
    FixedPointFormat,
    PosteriorEstimate,
    bayesian_map,
    build_comparator_oracle,
    comparator_f,
    estimate_mean,
    mean_from_count,
)
from .paths import (
    PathId,
    PathIdLayout,
    evaluate_oracle_table,
    lattice_point,
    map_hemisphere,
    trace_path_deterministic,
)
from .pipeline import RenderJob, ScalingReport, emit_distribution, render_quantum, render_reference, run_scaling_experiment
from .scene import Camera, Intersection, Material, Ray, Scene, Triangle, intersect_triangle, load_scene, nearest_chain, primary_ray

__version__ = "0.1.0"
