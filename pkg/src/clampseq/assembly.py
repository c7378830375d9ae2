"""Clamp-up simulator: fastener actions, contact equilibrium, gap and force statistics.

A fastener is applied as a pure 1000 N force while it is being acted on;
afterwards it behaves as a linear spring anchored at the closure it saw at
that moment, so its load drifts as neighbors act. Equilibrium after every
action is the box-constrained QP "closure cannot exceed the initial gap".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import N_HOLES, ReducedModel
from .solver import QpProblem, solve_qp

INSTALL = "install"
REFASTEN = "refasten"

ACTION_FORCE = 1000.0  # N applied at every install / refasten
FORCE_BAND = 25.0  # N half-width of the acceptable load band

# Calibrated with the plate defaults: soft enough that accumulated load
# drift stays within tens of newtons, stiff enough that one neighboring
# install moves a fastener's load by well over a newton.
DEFAULT_FASTENER_STIFFNESS = 8.0  # N/mm


class ActionError(ValueError):
    """Action does not match hole occupancy (install on full / refasten on empty)."""


@dataclass(frozen=True)
class Action:
    hole: int
    kind: str

    def __post_init__(self):
        if self.kind not in (INSTALL, REFASTEN):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if not 0 <= self.hole < N_HOLES:
            raise ValueError(f"hole index {self.hole} out of range 0..{N_HOLES - 1}")


@dataclass(frozen=True)
class FastenerState:
    """One installed fastener: spring anchored at the closure of its last action."""

    hole: int
    anchor: float  # mm, closure at the last action on this fastener
    nominal: float  # N, always the action force
    stiffness: float  # N/mm


@dataclass(frozen=True)
class GapStats:
    """Population statistics over all holes; empty holes count as 0 N."""

    gap_mean: float
    gap_var: float
    gap_std: float
    force_mean: float
    force_var: float


@dataclass(frozen=True)
class AssemblyState:
    """Immutable simulator state; ``apply_action`` returns a new state."""

    model: ReducedModel
    installed: dict[int, FastenerState]
    closure: np.ndarray  # mm, per hole
    log: tuple[Action, ...]
    fastener_stiffness: float

    def gaps(self) -> np.ndarray:
        return self.model.initial_gaps - self.closure

    def current_forces(self) -> np.ndarray:
        forces = np.zeros(self.model.n_holes)
        for hole, f in self.installed.items():
            forces[hole] = f.nominal - f.stiffness * (self.closure[hole] - f.anchor)
        return forces

    def stats(self) -> GapStats:
        return compute_stats(self.gaps(), self.current_forces())


def compute_stats(gaps: np.ndarray, forces: np.ndarray) -> GapStats:
    return GapStats(
        gap_mean=float(np.mean(gaps)),
        gap_var=float(np.var(gaps)),
        gap_std=float(np.std(gaps)),
        force_mean=float(np.mean(forces)),
        force_var=float(np.var(forces)),
    )


def new_state(
    model: ReducedModel, fastener_stiffness: float = DEFAULT_FASTENER_STIFFNESS
) -> AssemblyState:
    """Empty assembly: no fasteners, uniform initial gap."""
    return AssemblyState(
        model=model,
        installed={},
        closure=np.zeros(model.n_holes),
        log=(),
        fastener_stiffness=fastener_stiffness,
    )


def apply_action(state: AssemblyState, action: Action) -> AssemblyState:
    """Act on a hole and re-solve equilibrium.

    The acted fastener enters the solve as a pure applied force, so it
    reads exactly the action force afterwards; every other installed
    fastener enters as its spring.
    """
    occupied = action.hole in state.installed
    if action.kind == INSTALL and occupied:
        raise ActionError(f"hole {action.hole} already has a fastener")
    if action.kind == REFASTEN and not occupied:
        raise ActionError(f"hole {action.hole} has no fastener to refasten")

    model = state.model
    hessian = model.stiffness.copy()
    load = np.zeros(model.n_holes)
    for hole, f in state.installed.items():
        if hole == action.hole:
            continue
        hessian[hole, hole] += f.stiffness
        load[hole] = f.nominal + f.stiffness * f.anchor
    load[action.hole] = ACTION_FORCE

    solution = solve_qp(QpProblem(hessian, load, model.initial_gaps))
    closure = solution.x

    stiffness = state.installed[action.hole].stiffness if occupied else state.fastener_stiffness
    installed = dict(state.installed)
    installed[action.hole] = FastenerState(
        hole=action.hole,
        anchor=float(closure[action.hole]),
        nominal=ACTION_FORCE,
        stiffness=stiffness,
    )
    return AssemblyState(
        model=model,
        installed=installed,
        closure=closure,
        log=state.log + (action,),
        fastener_stiffness=state.fastener_stiffness,
    )


def replay(
    model: ReducedModel,
    actions: tuple[Action, ...],
    fastener_stiffness: float = DEFAULT_FASTENER_STIFFNESS,
) -> AssemblyState:
    """Rebuild a state from its action log. Deterministic, bit-exact."""
    state = new_state(model, fastener_stiffness)
    for action in actions:
        state = apply_action(state, action)
    return state


def is_converged(state: AssemblyState, scenario_holes) -> bool:
    """All scenario holes installed and every installed load within the band."""
    if any(h not in state.installed for h in scenario_holes):
        return False
    forces = state.current_forces()
    return all(
        abs(forces[h] - ACTION_FORCE) <= FORCE_BAND for h in state.installed
    )


def simultaneous_closure(model: ReducedModel, scenario_holes) -> np.ndarray:
    """Closure field when every scenario fastener pulls its full force at once."""
    holes = sorted(scenario_holes)
    load = np.zeros(model.n_holes)
    load[holes] = ACTION_FORCE
    return solve_qp(QpProblem(model.stiffness, load, model.initial_gaps)).x


def simultaneous_oracle(model: ReducedModel, scenario_holes) -> GapStats:
    """Reference statistics of the hypothetical all-at-once installation."""
    holes = sorted(scenario_holes)
    if not holes:
        raise ValueError("scenario must contain at least one hole")
    gaps = model.initial_gaps - simultaneous_closure(model, holes)
    forces = np.zeros(model.n_holes)
    forces[holes] = ACTION_FORCE
    return compute_stats(gaps, forces)


def state_snapshot(state: AssemblyState) -> dict:
    """JSON-ready snapshot of a state (documented schema, see README)."""
    return {
        "schema_version": 1,
        "holes": [
            {
                "hole": f.hole,
                "anchor": f.anchor,
                "nominal": f.nominal,
                "stiffness": f.stiffness,
            }
            for _, f in sorted(state.installed.items())
        ],
        "gaps": [float(g) for g in state.gaps()],
        "forces": [float(f) for f in state.current_forces()],
        "log": [{"kind": a.kind, "hole": a.hole} for a in state.log],
    }
