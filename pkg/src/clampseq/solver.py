"""Dense SPD linear algebra and a primal active-set solver for upper-bounded QPs.

Everything here is small (n <= 40 in production use) and dense, so all
solves go through Cholesky factorizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve


class NumericalError(RuntimeError):
    """Fatal numerical failure: factorization breakdown or iteration cap hit."""


def solve_linear(hessian: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the SPD system ``hessian @ u = rhs`` via Cholesky."""
    h = np.asarray(hessian, dtype=float)
    b = np.asarray(rhs, dtype=float)
    try:
        factor = cho_factor(h, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SPD factorization failed: {exc}") from exc
    return cho_solve(factor, b)


def energy(hessian: np.ndarray, displacement: np.ndarray, force: np.ndarray) -> float:
    """Quadratic potential 0.5*u'Hu - f'u of a displacement under load."""
    h = np.asarray(hessian, dtype=float)
    u = np.asarray(displacement, dtype=float)
    f = np.asarray(force, dtype=float)
    return float(0.5 * (u @ h @ u) - f @ u)


@dataclass(frozen=True)
class QpProblem:
    """min 0.5*x'Hx - b'x  subject to  x <= upper, with H symmetric positive definite."""

    hessian: np.ndarray
    linear: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hessian, dtype=float)
        b = np.asarray(self.linear, dtype=float)
        ub = np.asarray(self.upper, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"hessian must be square, got shape {h.shape}")
        if b.shape != (h.shape[0],) or ub.shape != (h.shape[0],):
            raise ValueError("linear term and upper bounds must match the hessian dimension")
        if not np.all(np.isfinite(ub)):
            raise ValueError("upper bounds must be finite")
        object.__setattr__(self, "hessian", h)
        object.__setattr__(self, "linear", b)
        object.__setattr__(self, "upper", ub)

    @property
    def n(self) -> int:
        return self.linear.shape[0]


@dataclass(frozen=True)
class QpSolution:
    """Solution of an upper-bounded box QP.

    ``multipliers`` are the (nonnegative) reactions of the bounds; they are
    nonzero only on ``active``, the working set at termination.
    """

    x: np.ndarray
    multipliers: np.ndarray
    active: frozenset[int]
    iterations: int


def _eqp_solve(h: np.ndarray, b: np.ndarray, ub: np.ndarray, working: np.ndarray) -> np.ndarray:
    """Minimize the objective with the working-set components pinned at their bounds."""
    x = ub.astype(float).copy()
    free = ~working
    if not free.any():
        return x
    rhs = b[free]
    if working.any():
        rhs = rhs - h[np.ix_(free, working)] @ ub[working]
    x[free] = solve_linear(h[np.ix_(free, free)], rhs)
    return x


def solve_qp(problem: QpProblem, max_iterations: int | None = None) -> QpSolution:
    """Primal active-set solve of an upper-bounded box QP.

    Starts from the unconstrained minimizer clipped to the box. Each
    iteration either drops the working-set bound with the most negative
    multiplier or steps to the first blocking bound; all ties go to the
    lowest index, so the solve is deterministic.
    """
    h, b, ub = problem.hessian, problem.linear, problem.upper
    n = problem.n
    cap = 10 * n if max_iterations is None else max_iterations

    x = solve_linear(h, b)
    working = x > ub
    x = np.minimum(x, ub)

    iterations = 0
    while True:
        if iterations >= cap:
            raise NumericalError(
                f"active-set solver exceeded {cap} iterations "
                f"(n={n}, working set size {int(working.sum())})"
            )
        iterations += 1

        x_target = _eqp_solve(h, b, ub, working)
        step = x_target - x

        if np.abs(step).max(initial=0.0) <= 1e-11 * max(1.0, np.abs(x_target).max(initial=0.0)):
            # At the working-set optimum; check multipliers.
            w_idx = np.flatnonzero(working)
            multipliers = np.zeros(n)
            if w_idx.size:
                lam = b[w_idx] - h[w_idx] @ x
                worst = int(np.argmin(lam))
                if lam[worst] < -1e-10:
                    working[w_idx[worst]] = False
                    continue
                multipliers[w_idx] = lam
            return QpSolution(
                x=x,
                multipliers=multipliers,
                active=frozenset(int(i) for i in w_idx),
                iterations=iterations,
            )

        blockers = ~working & (step > 0.0)
        hit = -1
        if blockers.any():
            idx = np.flatnonzero(blockers)
            ratios = np.maximum(ub[idx] - x[idx], 0.0) / step[idx]
            j = int(np.argmin(ratios))
            if ratios[j] < 1.0:
                hit = int(idx[j])
                x = x + ratios[j] * step
        if hit < 0:
            x = x_target
        else:
            x[hit] = ub[hit]
            working[hit] = True
