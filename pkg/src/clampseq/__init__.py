"""Fastener installation sequencing on a two-plate contact joint.

Library layout:

- :mod:`clampseq.model` — hole layout, grid stiffness, static condensation
- :mod:`clampseq.solver` — SPD solves and the box-constrained QP
- :mod:`clampseq.assembly` — the stateful install/refasten simulator
- :mod:`clampseq.heuristics` — sequencing policies and the run driver
- :mod:`clampseq.config` / :mod:`clampseq.cli` — scenario files and commands
"""
from .assembly import (
    ACTION_FORCE,
    DEFAULT_FASTENER_STIFFNESS,
    FORCE_BAND,
    INSTALL,
    REFASTEN,
    Action,
    ActionError,
    AssemblyState,
    FastenerState,
    GapStats,
    apply_action,
    is_converged,
    new_state,
    replay,
    simultaneous_closure,
    simultaneous_oracle,
    state_snapshot,
)
from .config import ConfigError, ScenarioConfig, load_config
from .geometry import convex_hull, hull_area, hull_perimeter
from .heuristics import (
    POLICY_NAMES,
    RunResult,
    Scenario,
    TraceStep,
    UnknownPolicyError,
    best_starter,
    loss,
    run_heuristic,
    sweep_starters,
)
from .model import (
    DEFAULT_EDGE_STIFFNESS,
    DEFAULT_GROUND_STIFFNESS,
    INITIAL_GAP,
    FullStiffness,
    Hole,
    HoleLayout,
    ReducedModel,
    build_full_stiffness,
    build_layout,
    default_model,
    schur_reduce,
)
from .solver import NumericalError, QpProblem, QpSolution, energy, solve_linear, solve_qp

__version__ = "0.1.0"
