"""Curvature-driven curve construction on finite metric spaces.

The pipeline: validate a metric (metric), measure triple curvature energies
(curvature), test orderability (ordering), build multiscale nets (nets),
assemble a path through them (builder), and measure how well it covers the
mass (diagnostics).  datasets provides seeded synthetic inputs and cli the
command-line front end.
"""
from .builder import (BuildResult, CheckReport, CurveSnapshot, StepRecord,
                      build_curve, replay_steps)
from .config import Config, load_config, parse_config_text
from .curvature import (CpReport, EnergyReport, angle, beta, c2_k,
                        c2_of_sides, check_cp, in_t_k, local_c2, menger,
                        partial_defect)
from .datasets import (gen_cantor4, gen_circle, gen_lipschitz_graph,
                       gen_segment, gen_snowflake)
from .diagnostics import (CoverageReport, GateReport, coverage,
                          curve_distances, point_to_curve, proposition_gate)
from .errors import (DegenerateTripleError, InputError, MovingLemmaViolation,
                     PathInvariantError, StructuralError, TieBreakError)
from .metric import (FiniteMetricSpace, Measure, ball, diameter, distance,
                     mass, nearest_in, validate_metric)
from .nets import (CascadeResult, NetState, ScreenReport, advance_scale,
                   coarsest_scale, density_set, epsilon1_screen, find_dense_ball,
                   finest_scale, initial_state, run_cascade,
                   select_representative, separated_subset)
from .ordering import (OmegaResult, OrderabilityResult, angle_omega_witness,
                       find_order, in_omega, is_between_pattern,
                       is_valid_order, moving_lemma_i, moving_lemma_ii)

__version__ = "0.1.0"

__all__ = [
    "BuildResult", "CheckReport", "CurveSnapshot", "StepRecord",
    "build_curve", "replay_steps",
    "Config", "load_config", "parse_config_text",
    "CpReport", "EnergyReport", "angle", "beta", "c2_k", "c2_of_sides",
    "check_cp", "in_t_k", "local_c2", "menger", "partial_defect",
    "gen_cantor4", "gen_circle", "gen_lipschitz_graph", "gen_segment",
    "gen_snowflake",
    "CoverageReport", "GateReport", "coverage", "curve_distances",
    "point_to_curve", "proposition_gate",
    "DegenerateTripleError", "InputError", "MovingLemmaViolation",
    "PathInvariantError", "StructuralError", "TieBreakError",
    "FiniteMetricSpace", "Measure", "ball", "diameter", "distance", "mass",
    "nearest_in", "validate_metric",
    "CascadeResult", "NetState", "ScreenReport", "advance_scale",
    "coarsest_scale", "density_set", "epsilon1_screen", "find_dense_ball",
    "finest_scale", "initial_state", "run_cascade", "select_representative",
    "separated_subset",
    "OmegaResult", "OrderabilityResult", "angle_omega_witness", "find_order",
    "in_omega", "is_between_pattern", "is_valid_order", "moving_lemma_i",
    "moving_lemma_ii",
    "__version__",
]
