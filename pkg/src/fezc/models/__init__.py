"""Analytic runtime planners."""

from .bfgs import ToleranceConditionWarning, bfgs_gradient_tolerance
from .checkpoint import (CheckpointPlan, CheckpointScenario, brute_force_nopt, checkpoint_nopt,
                         checkpoint_runtime, runtime_components, runtime_implicit, runtime_literal,
                         solvable)
from .parareal import (MAX_ITERATIONS, ParallelPlan, ParallelScenario, communication_time,
                       efficiency, optimize_compression, parareal_error_factor,
                       parareal_iterations, parareal_runtime)
from .scenario import load_scenario, parse_scenario_text, parse_sweep, sweep

# measured cluster values used to illustrate the checkpoint model
REFERENCE_CHECKPOINT = dict(N=4, p_RS=7.74e-7, T_C=1e5, T_CP=245.583, T_R=545.583)

# A contemporary-cluster parareal setting: 64 subintervals, 10 s fine solves,
# 80 ms to ship one uncompressed state, and a coder spending 64 bits at full
# precision, i.e. t_C = t_C0 * log2(1/dc) / 64.
NOMINAL_PARAREAL = dict(N=64, rho=0.5, t_G=0.5, t_F=10.0, t_C0=0.08, c=0.08 / (64 * 0.6931471805599453),
                        TOL=1e-6, c0=1.0, rate=0.1)
