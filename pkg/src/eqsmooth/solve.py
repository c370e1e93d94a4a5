"""Approximate maximization of empirical coverage over the budget ball.

The objective phi_n counts satisfied half-space constraints and is piecewise
constant, so its gradient is useless.  Each indicator 1[margin >= 0] is
lower-bounded by the clamp min(max(0, margin), 1); projected gradient ascent
runs on that relaxation while the best *exact* phi_n value seen at any
iterate of any restart is tracked and returned.  The surrogate maximizer and
the indicator maximizer can differ, the exact tracker is what makes the
output trustworthy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import InvalidInput
from .geometry import Budget, Dataset, project_to_ball, uniform_ball

# Corner candidates are enumerated for subset sizes 2..min(dim, 3) only while
# the subset count stays below this; past it the ascent restarts are on their
# own (large n, where the empirical objective is smooth enough anyway).
CORNER_CANDIDATE_CAP = 2000


@dataclass(frozen=True)
class SolveConfig:
    """Optimizer hyperparameters.

    ``step_size`` of None means epsilon/10.  Restart r draws its random
    start from a generator seeded with seed + r, so serial and parallel
    execution produce identical trajectories.
    """

    step_size: float | None = None
    iterations: int = 500
    restarts: int = 20
    seed: int = 0
    surrogate_scale: float = 1.0

    def __post_init__(self):
        if self.step_size is not None and not self.step_size > 0.0:
            raise InvalidInput("step_size must be positive")
        if self.iterations < 1 or self.restarts < 1:
            raise InvalidInput("iterations and restarts must be positive")
        if not self.surrogate_scale > 0.0:
            raise InvalidInput("surrogate_scale must be positive")


@dataclass(frozen=True)
class SolveResult:
    """Best defense vector found, its exact coverage, and the certificate."""

    v_star: np.ndarray
    phi_value: float
    satisfied_indices: tuple[int, ...]
    restarts_log: tuple[float, ...]


def surrogate(alpha: float) -> float:
    """Clamp of a margin to [0, 1]; a pointwise lower bound of 1[alpha >= 0]."""
    return min(max(0.0, alpha), 1.0)


def surrogate_objective(v: np.ndarray, dataset: Dataset, scale: float = 1.0) -> float:
    """Mean clamped margin; never exceeds phi_n at the same point."""
    C, b = dataset.halfspace_matrix
    margins = (C @ np.asarray(v, dtype=float) + b) / scale
    return float(np.clip(margins, 0.0, 1.0).mean())


def surrogate_gradient(v: np.ndarray, dataset: Dataset, scale: float = 1.0) -> np.ndarray:
    """Gradient of the clamped-margin objective.

    Only constraints in the linear band 0 < margin < scale contribute; at the
    kinks the zero subgradient is chosen, which keeps the field bounded.
    """
    C, b = dataset.halfspace_matrix
    margins = C @ np.asarray(v, dtype=float) + b
    active = (margins > 0.0) & (margins < scale)
    return (active.astype(C.dtype) @ C) / (dataset.n * scale)


def _initial_points(dataset: Dataset, config: SolveConfig) -> list[np.ndarray]:
    """Start pool: origin, each single-constraint boundary projection, then
    seeded random ball points, truncated to the restart count."""
    budget = dataset.budget
    C, b = dataset.halfspace_matrix
    inits: list[np.ndarray] = [np.zeros(budget.dim)]
    for i in range(dataset.n):
        if len(inits) == config.restarts:
            break
        nc2 = float(np.dot(C[i], C[i]))
        if nc2 == 0.0:
            continue
        boundary_point = (-b[i] / nc2) * C[i]
        inits.append(project_to_ball(boundary_point, budget))
    r = len(inits)
    while len(inits) < config.restarts:
        rng = np.random.default_rng(config.seed + r)
        inits.append(uniform_ball(rng, 1, budget)[0])
        r += 1
    return inits[: config.restarts]


def _corner_candidates(dataset: Dataset) -> list[np.ndarray]:
    """Origin projections onto boundaries of small constraint subsets.

    Every single-constraint boundary point is included (the exact one-sample
    maximizer construction; the empirical optimum of a one-directional
    instance always sits on one of these breakpoints).  Subsets of two and
    three constraints, which cover the generic support of any cell's
    minimum-norm point, are enumerated while their count stays under the
    cap.  Each point is paired with a nudged twin pushed a hair inside its
    defining constraints, since the point itself sits exactly on their
    boundaries where the closed indicator can lose to one ulp of rounding.
    """
    budget = dataset.budget
    C, b = dataset.halfspace_matrix
    n = dataset.n
    norms2 = np.einsum("ij,ij->i", C, C)
    candidates: list[np.ndarray] = []
    for i in range(n):
        if norms2[i] == 0.0:
            continue
        point = project_to_ball((-b[i] / norms2[i]) * C[i], budget)
        candidates.append(point)
        margin = float(np.dot(C[i], point)) + b[i]
        scale = abs(b[i]) + np.sqrt(norms2[i]) * budget.epsilon
        nudged = point + ((1e-9 * scale - margin) / norms2[i]) * C[i]
        if budget.contains(nudged):
            candidates.append(nudged)
    total = 0
    for size in range(2, min(budget.dim, 3) + 1):
        if size > n or total + comb(n, size) > CORNER_CANDIDATE_CAP:
            break
        total += comb(n, size)
        for combo in itertools.combinations(range(n), size):
            idx = list(combo)
            if any(norms2[i] == 0.0 for i in idx):
                continue
            CA, bA = C[idx], b[idx]
            try:
                corner = np.linalg.solve(CA @ CA.T, -bA) @ CA
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(corner)):
                continue
            corner = project_to_ball(corner, budget)
            candidates.append(corner)
            scales = np.abs(bA) + np.sqrt(norms2[idx]) * budget.epsilon
            d, *_ = np.linalg.lstsq(CA, 1e-9 * scales - (CA @ corner + bA), rcond=None)
            nudged = corner + d
            if budget.contains(nudged):
                candidates.append(nudged)
    return candidates


def solve(dataset: Dataset, config: SolveConfig = SolveConfig()) -> SolveResult:
    """Projected gradient ascent with restarts; returns the exact-phi argmax.

    The exact objective is tracked at every iterate of every restart and at
    the deterministic corner candidates of small constraint subsets; the best
    point wins.  Ties on phi_n prefer the smaller-norm point, then the
    earlier one (trajectories first in restart order, then candidates), so
    the merge does not depend on evaluation order.
    """
    budget = dataset.budget
    step = budget.epsilon / 10.0 if config.step_size is None else config.step_size
    scale = config.surrogate_scale
    C, b = dataset.halfspace_matrix
    n = dataset.n

    best_v: np.ndarray | None = None
    best_key: tuple[float, float, int] | None = None
    restarts_log: list[float] = []
    seq = 0

    def consider(v: np.ndarray, phi: float) -> None:
        nonlocal best_v, best_key, seq
        key = (-phi, float(np.linalg.norm(v)), seq)
        seq += 1
        if best_key is None or key < best_key:
            best_key, best_v = key, v

    for v0 in _initial_points(dataset, config):
        v = v0
        restart_best = -1.0
        for it in range(config.iterations + 1):
            margins = C @ v + b
            phi = float((margins >= 0.0).sum()) / n
            if phi > restart_best:
                restart_best = phi
            consider(v, phi)
            if it == config.iterations:
                break
            active = (margins > 0.0) & (margins < scale)
            grad = (active.astype(C.dtype) @ C) / (n * scale)
            v_next = project_to_ball(v + step * grad, budget)
            if np.array_equal(v_next, v):
                break  # stationary; every further iterate would repeat
            v = v_next
        restarts_log.append(restart_best)

    for v in _corner_candidates(dataset):
        consider(v, float((C @ v + b >= 0.0).sum()) / n)

    assert best_v is not None
    best_v = _strictify_winner(best_v, C, b, budget)
    satisfied = np.flatnonzero(C @ best_v + b >= 0.0)
    return SolveResult(
        v_star=best_v,
        phi_value=len(satisfied) / n,
        satisfied_indices=tuple(int(i) for i in satisfied),
        restarts_log=tuple(restarts_log),
    )


def _strictify_winner(
    v: np.ndarray, C: np.ndarray, b: np.ndarray, budget: Budget
) -> np.ndarray:
    """Push knife-edge margins of the winning vector strictly positive.

    The winner often sits exactly on constraint boundaries (corner and
    breakpoint candidates do by construction), where a one-ulp difference in
    another evaluation path could flip a membership.  A least-squares nudge
    of the near-zero satisfied margins removes the ambiguity; if the nudge
    would lose a satisfied constraint or leave the ball, the vector is
    returned unchanged.
    """
    margins = C @ v + b
    satisfied = margins >= 0.0
    scales = np.abs(b) + np.linalg.norm(C, axis=1) * budget.epsilon
    target = 1e-10 * scales
    tight = satisfied & (margins < target) & (np.einsum("ij,ij->i", C, C) > 0.0)
    if not np.any(tight):
        return v
    d, *_ = np.linalg.lstsq(C[tight], (target - margins)[tight], rcond=None)
    nudged = v + d
    if not budget.contains(nudged):
        return v
    new_margins = C @ nudged + b
    if (new_margins >= 0.0).sum() >= satisfied.sum() and np.all(new_margins[tight] > 0.0):
        return nudged
    return v
