"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -v -s``
(or ``-rA``) to see them.
"""
import json
import time
from contextlib import contextmanager
from dataclasses import replace

import numpy as np
import pytest

from clampseq.assembly import ACTION_FORCE, INSTALL, Action, apply_action, new_state
from clampseq.cli import main
from clampseq.heuristics import Scenario, run_heuristic, sweep_starters
from clampseq.model import build_full_stiffness, build_layout, default_model
from clampseq.solver import QpProblem, solve_qp

from conftest import SCENARIO20_HOLES
from oracles import brute_force_box_qp, kkt_residuals, random_box_qp


@contextmanager
def criterion(number, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} ({name}): FAIL")
        raise
    print(f"ACCEPTANCE {number} ({name}): PASS")


@pytest.fixture(scope="module")
def policy_runs(model, scenario20):
    """Criterion-5 runs, shared with the non-penetration criterion."""
    runs = {}
    start = time.perf_counter()
    for policy in ("maxgap", "maxperim", "maxarea", "blockwise", "kf", "gapgradient"):
        runs[policy] = run_heuristic(model, scenario20, policy)
    return runs, time.perf_counter() - start


def test_criterion_1_condensation_exactness(model, rng):
    with criterion(1, "condensation exactness"):
        start = time.perf_counter()
        full = build_full_stiffness(build_layout())
        rows = full.hole_rows
        for _ in range(20):
            f_holes = rng.uniform(-1000.0, 1000.0, size=40)
            reduced = np.linalg.solve(model.stiffness, f_holes)
            f_full = np.zeros(full.matrix.shape[0])
            f_full[rows] = f_holes
            restricted = np.linalg.solve(full.matrix, f_full)[rows]
            np.testing.assert_allclose(reduced, restricted, rtol=1e-9, atol=1e-12)
        assert time.perf_counter() - start < 5.0


def test_criterion_2_qp_oracle_equivalence():
    with criterion(2, "QP active-set vs exhaustive enumeration"):
        start = time.perf_counter()
        rng = np.random.default_rng(987654321)
        for _ in range(1000):
            n = int(rng.integers(1, 13))
            h, b, ub = random_box_qp(rng, n)
            sol = solve_qp(QpProblem(h, b, ub))
            expected = brute_force_box_qp(h, b, ub)
            np.testing.assert_allclose(sol.x, expected, atol=1e-8)
            stat, feas, comp, neg = kkt_residuals(h, b, ub, sol.x, sol.multipliers)
            assert stat <= 1e-8 * max(1.0, np.abs(b).max())
            assert feas <= 1e-8 and comp <= 1e-8 and neg <= 1e-8
        assert time.perf_counter() - start < 60.0


def test_criterion_3_force_exactness_and_drift(model, scenario20):
    with criterion(3, "acted force exactness and neighbor drift"):
        for policy in ("maxgap", "kf"):
            result = run_heuristic(model, scenario20, policy)
            for step in result.trace[1:]:
                assert abs(step.forces[step.action.hole] - ACTION_FORCE) <= 1e-9
        s = apply_action(new_state(model), Action(10, INSTALL))
        s = apply_action(s, Action(11, INSTALL))
        drift = abs(s.current_forces()[10] - ACTION_FORCE)
        assert 1.0 < drift < 900.0


def test_criterion_4_calibration_gate(model):
    with criterion(4, "single-install closure between 2 and 5 mm"):
        closures = []
        for hole in range(40):
            s = apply_action(new_state(model), Action(hole, INSTALL))
            closures.append(s.closure[hole])
        assert min(closures) >= 2.0
        assert max(closures) <= 5.0


def test_criterion_5_termination(policy_runs, scenario20):
    with criterion(5, "policy termination on the 20-hole scenario"):
        runs, elapsed = policy_runs
        for policy in ("maxgap", "maxperim", "maxarea", "blockwise", "kf"):
            result = runs[policy]
            assert result.converged, f"{policy} did not converge"
            assert result.actions_used <= 200
        gg = runs["gapgradient"]
        assert gg.actions_used == len(scenario20.holes)
        assert all(a.kind == INSTALL for a in gg.sequence)
        assert len({a.hole for a in gg.sequence}) == len(scenario20.holes)
        assert elapsed < 30.0


def test_criterion_6_gapgradient_loss_shape(model, scenario20, policy_runs):
    with criterion(6, "loss decrease and starter sweep argmin"):
        runs, _ = policy_runs
        initial_loss = runs["gapgradient"].trace[0].loss
        assert initial_loss == pytest.approx(2.4, abs=1e-12)
        assert runs["gapgradient"].final_loss < initial_loss
        rows = sweep_starters(model, scenario20)
        assert len(rows) == len(scenario20.holes)
        losses = [r.final_loss for _, r in rows]
        winners = [h for (h, r) in rows if r.final_loss == min(losses)]
        assert len(winners) == 1  # well-defined argmin


def test_criterion_7_determinism_and_symmetry(model, tmp_path):
    with criterion(7, "byte-identical reruns and mirror equivariance"):
        config = tmp_path / "scenario.json"
        config.write_text(
            json.dumps({"schema_version": 1, "holes": list(SCENARIO20_HOLES)}),
            encoding="utf-8",
        )
        outs = (tmp_path / "a", tmp_path / "b")
        for out in outs:
            assert main(["run", str(config), "--algo", "maxperim", "--out", str(out)]) == 0
        files = sorted(p.name for p in outs[0].iterdir())
        assert files
        for name in files:
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name

        perm = model.layout.mirror_permutation()
        cases = [
            ("maxgap", SCENARIO20_HOLES, 3),
            ("gapgradient", (1, 5, 8, 12, 22, 30, 33), 5),
            ("kf", (2, 6, 9, 15, 24, 31), None),
        ]
        for policy, holes, start in cases:
            scen = Scenario(holes=holes, start=start)
            mirrored = Scenario(
                holes=tuple(sorted(int(perm[h]) for h in holes)),
                start=None if start is None else int(perm[start]),
            )
            r1 = run_heuristic(model, scen, policy)
            r2 = run_heuristic(model, mirrored, policy)
            assert [(a.kind, int(perm[a.hole])) for a in r1.sequence] == [
                (a.kind, a.hole) for a in r2.sequence
            ], policy


def test_criterion_8_non_penetration(policy_runs):
    with criterion(8, "non-penetration across all runs"):
        runs, _ = policy_runs
        for policy, result in runs.items():
            min_gap = min(step.gaps.min() for step in result.trace)
            assert min_gap >= -1e-9, policy
