"""Next-action policies for fastener sequencing, plus the common run driver.

Every policy is a pure function of (state, scenario): it inspects gaps,
forces, or a linear prediction and returns the next Action, or None when it
has nothing left to do. All ties break to the lowest hole index.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .assembly import (
    ACTION_FORCE,
    DEFAULT_FASTENER_STIFFNESS,
    INSTALL,
    REFASTEN,
    Action,
    AssemblyState,
    GapStats,
    apply_action,
    is_converged,
    new_state,
    simultaneous_oracle,
)
from .geometry import hull_area, hull_perimeter
from .model import N_HOLES, ReducedModel
from .solver import solve_linear

POLICY_NAMES = (
    "maxgap",
    "maxmindivide",
    "blockwise",
    "maxperim",
    "maxarea",
    "gapgradient",
    "kf",
)

# Scores within this relative band count as tied, so roundoff (e.g. between
# mirror-image candidates) cannot override the lowest-index rule.
_TIE_REL = 1e-9


class UnknownPolicyError(ValueError):
    """Policy name is not one of POLICY_NAMES."""


@dataclass(frozen=True)
class Scenario:
    """Which holes are eligible, where to start, and the stopping knobs."""

    holes: tuple[int, ...]
    start: int | None = None
    max_actions: int = 200
    n_divisor: int = 2
    variance_weight: float = 0.6  # weight of gap variance vs gap mean in the loss
    mean_tol: float = 0.01  # mm
    std_tol: float = 0.02  # mm
    force_floor: float = 990.0  # N, refasten threshold for maxperim/maxarea

    def __post_init__(self):
        holes = tuple(int(h) for h in self.holes)
        object.__setattr__(self, "holes", holes)
        if not holes:
            raise ValueError("scenario must contain at least one hole")
        if len(set(holes)) != len(holes):
            raise ValueError("scenario holes must be distinct")
        if min(holes) < 0 or max(holes) >= N_HOLES:
            raise ValueError(f"hole indices must lie in 0..{N_HOLES - 1}")
        if self.start is not None and self.start not in holes:
            raise ValueError(f"start hole {self.start} is not in the scenario")
        if self.n_divisor < 1:
            raise ValueError("n_divisor must be a positive integer")
        if not 0.0 <= self.variance_weight <= 1.0:
            raise ValueError("variance_weight must lie in [0, 1]")
        if self.max_actions < 0:
            raise ValueError("max_actions must be nonnegative")

    @property
    def sorted_holes(self) -> tuple[int, ...]:
        return tuple(sorted(self.holes))


@dataclass(frozen=True)
class TraceStep:
    """One row of a run trace; step 0 is the untouched assembly."""

    step: int
    action: Action | None
    stats: GapStats
    loss: float
    gaps: np.ndarray
    forces: np.ndarray


@dataclass(frozen=True)
class RunResult:
    sequence: tuple[Action, ...]
    trace: tuple[TraceStep, ...]
    converged: bool
    actions_used: int
    final_loss: float
    final_state: AssemblyState


def loss(state: AssemblyState, variance_weight: float) -> float:
    """Weighted mix of gap variance and gap mean over all holes."""
    st = state.stats()
    return variance_weight * st.gap_var + (1.0 - variance_weight) * st.gap_mean


def _pick(candidates, scores, largest=True) -> int:
    """Best-scoring candidate; near-ties (relative 1e-9) go to the lowest index.

    ``candidates`` must already be in ascending index order.
    """
    best = max(scores) if largest else min(scores)
    tol = _TIE_REL * max(1.0, abs(best))
    for hole, score in zip(candidates, scores):
        gap_to_best = best - score if largest else score - best
        if gap_to_best <= tol:
            return hole
    raise AssertionError("unreachable: best score not found among candidates")


def _kind_for(state: AssemblyState, hole: int) -> str:
    return REFASTEN if hole in state.installed else INSTALL


def _starter_action(state: AssemblyState, scenario: Scenario) -> Action:
    hole = scenario.start if scenario.start is not None else min(scenario.holes)
    return Action(hole, _kind_for(state, hole))


def max_gap_next(state: AssemblyState, scenario: Scenario) -> Action:
    """Act on the eligible hole with the largest gap."""
    if not state.log:
        return _starter_action(state, scenario)
    gaps = state.gaps()
    holes = scenario.sorted_holes
    hole = _pick(holes, [gaps[h] for h in holes], largest=True)
    return Action(hole, _kind_for(state, hole))


def max_min_divide_next(state: AssemblyState, scenario: Scenario) -> Action:
    """Act on the hole whose gap is closest to min + (max - min) / n."""
    if not state.log:
        return _starter_action(state, scenario)
    gaps = state.gaps()
    holes = scenario.sorted_holes
    values = [gaps[h] for h in holes]
    target = min(values) + (max(values) - min(values)) / scenario.n_divisor
    hole = _pick(holes, [abs(v - target) for v in values], largest=False)
    return Action(hole, _kind_for(state, hole))


def blockwise_next(state: AssemblyState, scenario: Scenario) -> Action:
    """Move to a neighboring block and act on its middle-of-the-range gap.

    The gap range (smallest/largest, and the block ranking) is taken over
    every hole of the block; only eligible holes are acted on.
    """
    if not state.log:
        return _starter_action(state, scenario)
    layout = state.model.layout
    gaps = state.gaps()
    scenario_set = set(scenario.holes)

    def eligible(block: int) -> list[int]:
        return sorted(set(layout.holes_in_block(block)) & scenario_set)

    def block_max_gap(block: int) -> float:
        return max(gaps[h] for h in layout.holes_in_block(block))

    last_block = layout.holes[state.log[-1].hole].block
    n_blocks = max(h.block for h in layout.holes) + 1
    adjacent = [
        b for b in (last_block - 1, last_block + 1) if 0 <= b < n_blocks and eligible(b)
    ]
    if adjacent:
        # Prefer the adjacent block with the larger maximum gap.
        target_block = _pick(adjacent, [block_max_gap(b) for b in adjacent], largest=True)
    else:
        # No eligible holes next door: nearest block (center distance) that has
        # any, preferring a move away from the current block.
        populated = [b for b in range(n_blocks) if b != last_block and eligible(b)]
        if not populated:
            populated = [b for b in range(n_blocks) if eligible(b)]
        center = layout.block_center_x(last_block)
        target_block = _pick(
            populated,
            [abs(layout.block_center_x(b) - center) for b in populated],
            largest=False,
        )
    block_gaps = [gaps[h] for h in layout.holes_in_block(target_block)]
    midpoint = (min(block_gaps) + max(block_gaps)) / 2.0
    holes = eligible(target_block)
    # Empty holes take precedence: otherwise the blockwise rule refastens the
    # mid-range installed hole forever and the block's last empties are never
    # installed (the extreme gap is never strictly closest to the midpoint).
    empties = [h for h in holes if h not in state.installed]
    candidates = empties if empties else holes
    hole = _pick(candidates, [abs(gaps[h] - midpoint) for h in candidates], largest=False)
    return Action(hole, _kind_for(state, hole))


def _footprint_next(state: AssemblyState, scenario: Scenario, score) -> Action | None:
    """Shared maxperim/maxarea rule: refasten weak fasteners, else grow the footprint."""
    installed = sorted(state.installed)
    if installed:
        forces = state.current_forces()
        values = [forces[h] for h in installed]
        if min(values) < scenario.force_floor:
            return Action(_pick(installed, values, largest=False), REFASTEN)
    empties = [h for h in scenario.sorted_holes if h not in state.installed]
    if not empties:
        return None
    if not installed:
        return _starter_action(state, scenario)
    positions = state.model.layout.positions()
    anchor_pts = positions[installed]
    if len(installed) < 2:
        scores = [float(np.linalg.norm(positions[h] - anchor_pts[0])) for h in empties]
    else:
        scores = [score(np.vstack([anchor_pts, positions[h]])) for h in empties]
    return Action(_pick(empties, scores, largest=True), INSTALL)


def maxperim_next(state: AssemblyState, scenario: Scenario) -> Action | None:
    """Install where the fastener footprint's hull perimeter grows the most."""
    return _footprint_next(state, scenario, hull_perimeter)


def maxarea_next(state: AssemblyState, scenario: Scenario) -> Action | None:
    """Install where the fastener footprint's hull area grows the most."""
    return _footprint_next(state, scenario, hull_area)


def gap_gradient_next(
    state: AssemblyState, scenario: Scenario, prev_gaps: np.ndarray
) -> Action | None:
    """Install at the empty hole whose gap dropped the most over the last step.

    Never refastens; ``prev_gaps`` is the gap field before the previous
    action and is threaded between calls by the driver.
    """
    empties = [h for h in scenario.sorted_holes if h not in state.installed]
    if not empties:
        return None
    if not state.log:
        return _starter_action(state, scenario)
    drops = prev_gaps - state.gaps()
    return Action(_pick(empties, [drops[h] for h in empties], largest=True), INSTALL)


def kf_next(state: AssemblyState, scenario: Scenario) -> Action:
    """Act where re-imposing full force moves the unconstrained prediction most.

    Candidates are scored by the Euclidean distance between the
    unconstrained equilibrium of the current spring system and the one with
    the candidate's force reset; the contact constraints are deliberately
    ignored here.
    """
    model = state.model
    hessian = model.stiffness.copy()
    load = np.zeros(model.n_holes)
    for hole, f in state.installed.items():
        hessian[hole, hole] += f.stiffness
        load[hole] = f.nominal + f.stiffness * f.anchor
    baseline = solve_linear(hessian, load)

    holes = scenario.sorted_holes
    scores = []
    for h in holes:
        h_mat = hessian
        b = load.copy()
        b[h] = ACTION_FORCE  # the candidate acts as a pure force
        if h in state.installed:
            h_mat = hessian.copy()
            h_mat[h, h] -= state.installed[h].stiffness  # its spring drops out
        predicted = solve_linear(h_mat, b)
        scores.append(float(np.linalg.norm(baseline - predicted)))
    hole = _pick(holes, scores, largest=True)
    return Action(hole, _kind_for(state, hole))


def _next_action(policy, state, scenario, prev_gaps):
    if policy == "maxgap":
        return max_gap_next(state, scenario)
    if policy == "maxmindivide":
        return max_min_divide_next(state, scenario)
    if policy == "blockwise":
        return blockwise_next(state, scenario)
    if policy == "maxperim":
        return maxperim_next(state, scenario)
    if policy == "maxarea":
        return maxarea_next(state, scenario)
    if policy == "gapgradient":
        return gap_gradient_next(state, scenario, prev_gaps)
    if policy == "kf":
        return kf_next(state, scenario)
    raise UnknownPolicyError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")


def _stopped(state, scenario, policy, oracle_stats) -> bool:
    if not is_converged(state, scenario.holes):
        return False
    if policy in ("maxperim", "maxarea"):
        st = state.stats()
        return (
            abs(st.gap_mean - oracle_stats.gap_mean) <= scenario.mean_tol
            and abs(st.gap_std - oracle_stats.gap_std) <= scenario.std_tol
        )
    return True


def run_heuristic(
    model: ReducedModel,
    scenario: Scenario,
    policy: str,
    fastener_stiffness: float = DEFAULT_FASTENER_STIFFNESS,
) -> RunResult:
    """Drive a policy until convergence, a no-action signal, or the action cap."""
    if policy not in POLICY_NAMES:
        raise UnknownPolicyError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")
    oracle_stats = (
        simultaneous_oracle(model, scenario.holes) if policy in ("maxperim", "maxarea") else None
    )
    state = new_state(model, fastener_stiffness)
    trace = [
        TraceStep(
            step=0,
            action=None,
            stats=state.stats(),
            loss=loss(state, scenario.variance_weight),
            gaps=state.gaps(),
            forces=state.current_forces(),
        )
    ]
    actions: list[Action] = []
    prev_gaps = state.gaps()
    while len(actions) < scenario.max_actions:
        if _stopped(state, scenario, policy, oracle_stats):
            break
        action = _next_action(policy, state, scenario, prev_gaps)
        if action is None:
            break
        prev_gaps = state.gaps()
        state = apply_action(state, action)
        actions.append(action)
        trace.append(
            TraceStep(
                step=len(actions),
                action=action,
                stats=state.stats(),
                loss=loss(state, scenario.variance_weight),
                gaps=state.gaps(),
                forces=state.current_forces(),
            )
        )
    return RunResult(
        sequence=tuple(actions),
        trace=tuple(trace),
        converged=is_converged(state, scenario.holes),
        actions_used=len(actions),
        final_loss=loss(state, scenario.variance_weight),
        final_state=state,
    )


def sweep_starters(
    model: ReducedModel,
    scenario: Scenario,
    fastener_stiffness: float = DEFAULT_FASTENER_STIFFNESS,
) -> list[tuple[int, RunResult]]:
    """Run the gap-gradient policy once per candidate starter hole."""
    return [
        (h, run_heuristic(model, replace(scenario, start=h), "gapgradient", fastener_stiffness))
        for h in scenario.sorted_holes
    ]


def best_starter(
    model: ReducedModel,
    scenario: Scenario,
    fastener_stiffness: float = DEFAULT_FASTENER_STIFFNESS,
) -> tuple[int, RunResult]:
    """Starter hole minimizing the final loss of a gap-gradient run."""
    rows = sweep_starters(model, scenario, fastener_stiffness)
    starters = [h for h, _ in rows]
    losses = [r.final_loss for _, r in rows]
    winner = _pick(starters, losses, largest=False)
    return winner, dict(rows)[winner]
