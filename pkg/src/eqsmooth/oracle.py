"""Exact small-instance coverage maximization and arrangement counting.

Maximizing phi_n is a maximum feasible subsystem problem (NP-hard in
general), but at desk scale it is solved exactly: enumerate index subsets in
decreasing cardinality and test whether the corresponding half-space
intersection meets the budget ball.  The feasibility test finds the minimum
norm point of the intersection by Dykstra's cyclic projection scheme (plain
alternating projections find *a* feasible point, not the closest one, which
would break the ball test), refined by an active-set polish that snaps the
answer to the exact KKT point when the geometry is clean.

The 2-d line arrangement counter backs the shatter-coefficient experiment:
n lines in general position cut the plane into (n^2 + n + 2) / 2 cells.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, TooLarge
from .geometry import Budget, Dataset, HalfSpace, satisfied_mask

DYKSTRA_MAX_CYCLES = 10_000
# Cycle window for detecting a limit cycle (infeasible system): movement has
# effectively stopped shrinking but is still far above the tolerance.
_STAGNATION_WINDOW = 250
_STAGNATION_RATIO = 0.995


def _constraint_scale(c: np.ndarray, b: float, epsilon: float) -> float:
    return float(np.linalg.norm(c)) * epsilon + abs(b) + 1e-300


def _dykstra(
    C: np.ndarray, b: np.ndarray, tol: float, scales: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Dykstra projections from the origin onto the intersection of half-spaces.

    Convergence requires both a sub-tolerance cycle movement and feasibility
    to working precision: on slowly converging geometries the movement alone
    can go tiny while the iterate is still visibly outside, and declaring
    that converged would turn a feasible subset into a false "infeasible".
    Not-converged covers the iteration cap and a detected limit cycle.
    """
    k, m = C.shape
    nc2 = np.einsum("ij,ij->i", C, C)
    x = np.zeros(m)
    corrections = np.zeros((k, m))
    movements: list[float] = []
    feas_tol = 1e-7 * scales
    for cycle in range(DYKSTRA_MAX_CYCLES):
        x_prev = x
        for i in range(k):
            y = x + corrections[i]
            margin = float(np.dot(C[i], y)) + b[i]
            if margin < 0.0 and nc2[i] > 0.0:
                proj = y - (margin / nc2[i]) * C[i]
            else:
                proj = y
            corrections[i] = y - proj
            x = proj
        move = float(np.linalg.norm(x - x_prev))
        if move < tol and np.all(C @ x + b >= -feas_tol):
            return x, True
        movements.append(move)
        if cycle >= _STAGNATION_WINDOW and cycle % 50 == 0:
            recent = movements[-_STAGNATION_WINDOW:]
            if min(recent) > 100.0 * tol and recent[-1] > _STAGNATION_RATIO * recent[0]:
                return x, False
    return x, False


def _kkt_polish(
    C: np.ndarray, b: np.ndarray, x: np.ndarray, scales: np.ndarray
) -> np.ndarray | None:
    """Refine an approximate min-norm point to the exact KKT point.

    Active-set loop seeded from the near-zero margins of the iterate: solve
    the equality-constrained problem by least squares, drop members of an
    inconsistent active set (the least-squares point cannot satisfy them all,
    so the guess is wrong), drop constraints with negative multipliers,
    re-add violated outsiders.  Returns None when the loop cannot certify a
    point, in which case the caller keeps the raw iterate.
    """
    k = C.shape[0]
    margins = C @ x + b
    active = set(np.flatnonzero(margins < 1e-4 * scales))
    if not active:
        return np.zeros(C.shape[1]) if np.all(b >= 0.0) else None
    for _ in range(4 * k + 4):
        A = sorted(active)
        CA = C[A]
        v, *_ = np.linalg.lstsq(CA, -b[A], rcond=None)
        own = CA @ v + b[A]
        if np.any(np.abs(own) > 1e-6 * scales[A]):
            # inconsistent equalities: shed the worst-served member
            active.discard(A[int(np.argmin(own))])
            if not active:
                return np.zeros(C.shape[1]) if np.all(b >= 0.0) else None
            continue
        lam, *_ = np.linalg.lstsq(CA.T, v, rcond=None)
        if float(np.linalg.norm(CA.T @ lam - v)) > 1e-7 * (1.0 + float(np.linalg.norm(v))):
            return None  # v not in the row space; rank trouble
        if np.any(lam < -1e-9):
            active.discard(A[int(np.argmin(lam))])
            if not active:
                return np.zeros(C.shape[1]) if np.all(b >= 0.0) else None
            continue
        residual = C @ v + b
        violated = [int(i) for i in np.flatnonzero(residual < -1e-9 * scales)]
        fresh = [i for i in violated if i not in active]
        if fresh:
            active.add(fresh[0])
            continue
        if violated:
            return None  # an active member stays violated: give up cleanly
        return v
    return None


def min_norm_feasible_point(
    halfspaces: list[HalfSpace],
    budget: Budget,
    tol: float | None = None,
) -> np.ndarray | None:
    """Minimum-norm point of the half-space intersection, if it meets the ball.

    Dykstra's scheme started at the origin converges to the projection of the
    origin onto the intersection whenever it is nonempty.  The result is
    returned only if its norm is at most epsilon plus slack; a limit cycle,
    the iteration cap, or an infeasible polished point all count as "does not
    meet the ball" (conservative).
    """
    if not halfspaces:
        raise InvalidInput("need at least one half-space")
    dims = {h.dim for h in halfspaces}
    if dims != {budget.dim}:
        raise InvalidInput("half-space dimensions must match the budget")
    if tol is None:
        tol = 1e-8 * budget.epsilon
    norm_limit = budget.epsilon + 10.0 * tol

    C = np.stack([h.c for h in halfspaces])
    b = np.array([h.b for h in halfspaces])
    scales = np.array([_constraint_scale(h.c, h.b, budget.epsilon) for h in halfspaces])

    # Constraints with a zero normal are all of space or empty.
    zero_rows = np.flatnonzero(np.einsum("ij,ij->i", C, C) == 0.0)
    if any(b[i] < 0.0 for i in zero_rows):
        return None
    keep = [i for i in range(len(halfspaces)) if i not in set(zero_rows)]
    if not keep:
        return np.zeros(budget.dim)
    C, b, scales = C[keep], b[keep], scales[keep]

    if np.all(b >= 0.0):
        return np.zeros(budget.dim)
    if C.shape[0] == 1:
        point = (-b[0] / float(np.dot(C[0], C[0]))) * C[0]
        return point if float(np.linalg.norm(point)) <= norm_limit else None

    x, converged = _dykstra(C, b, tol, scales)
    polished = _kkt_polish(C, b, x, scales)

    candidate = None
    if polished is not None and np.all(C @ polished + b >= -1e-9 * scales):
        candidate = polished
    elif converged and np.all(C @ x + b >= -1e-6 * scales):
        candidate = x
    if candidate is None:
        return None
    return candidate if float(np.linalg.norm(candidate)) <= norm_limit else None


@dataclass(frozen=True)
class OracleResult:
    """Exact maximizer with the satisfied-index certificate.

    ``subsets_checked`` counts feasibility tests actually run (subsets pruned
    by an infeasible member or pair are skipped without a test).
    """

    v_star: np.ndarray
    phi_value: float
    certificate: tuple[int, ...]
    subsets_checked: int


def _strictify(
    v: np.ndarray, subset: tuple[int, ...], C: np.ndarray, b: np.ndarray, budget: Budget
) -> np.ndarray:
    """Push a feasible point a hair inside its active constraints.

    The min-norm point sits exactly on its active boundaries, where float
    rounding can make the closed membership test miss by one ulp.  A least
    squares nudge gives every certificate constraint a strictly positive
    margin without leaving the ball tolerance; if no safe nudge exists the
    point is returned unchanged.
    """
    S = list(subset)
    CS, bS = C[S], b[S]
    eps = budget.epsilon
    scales = np.array([_constraint_scale(CS[i], bS[i], eps) for i in range(len(S))])
    margins = CS @ v + bS
    target = 1e-10 * scales
    tight = margins < target
    if not np.any(tight):
        return v
    d, *_ = np.linalg.lstsq(CS[tight], (target - margins)[tight], rcond=None)
    nudged = v + d
    if budget.contains(nudged) and np.all(CS @ nudged + bS > 0.0):
        return nudged
    return v


def oracle_solve(dataset: Dataset, max_n: int = 20) -> OracleResult:
    """Exhaustive maximum-coverage search over record subsets.

    Subsets are visited in decreasing cardinality, lexicographically inside a
    level, and the first feasible one wins; a parallel evaluation of a level
    must therefore report the lexicographic minimum among its feasible
    subsets to agree with this serial answer.
    """
    n = dataset.n
    if n > max_n:
        raise TooLarge(f"instance has {n} records, oracle cap is {max_n}")
    budget = dataset.budget
    halfspaces = dataset.halfspaces()
    C, b = dataset.halfspace_matrix
    checked = 0

    # Records whose own half-space misses the ball can never be satisfied,
    # and an infeasible pair poisons every superset; cache both up front.
    single_points: dict[int, np.ndarray] = {}
    for i, h in enumerate(halfspaces):
        checked += 1
        point = min_norm_feasible_point([h], budget)
        if point is not None:
            single_points[i] = point
    alive = sorted(single_points)

    bad_pairs: list[int] = []
    pair_points: dict[tuple[int, int], np.ndarray] = {}
    for i, j in itertools.combinations(alive, 2):
        checked += 1
        point = min_norm_feasible_point([halfspaces[i], halfspaces[j]], budget)
        if point is None:
            bad_pairs.append((1 << i) | (1 << j))
        else:
            pair_points[(i, j)] = point

    # In the plane the per-record robust sets are convex, so a family of them
    # has a common point exactly when every three do (Helly); bad triples then
    # decide every larger subset without touching the projection solver.  Only
    # worth the precompute once the subset lattice dwarfs the triple count.
    helly = budget.dim == 2 and len(alive) >= 13
    bad_triples: list[int] = []
    if helly:
        for combo in itertools.combinations(alive, 3):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if any(bp & mask == bp for bp in bad_pairs):
                continue
            checked += 1
            if min_norm_feasible_point([halfspaces[i] for i in combo], budget) is None:
                bad_triples.append(mask)

    best: tuple[tuple[int, ...], np.ndarray] | None = None
    for size in range(len(alive), 0, -1):
        for combo in itertools.combinations(alive, size):
            if size == 1:
                point = single_points[combo[0]]
            elif size == 2:
                point = pair_points.get(combo)
                if point is None:
                    continue
            else:
                mask = 0
                for i in combo:
                    mask |= 1 << i
                if any(bp & mask == bp for bp in bad_pairs):
                    continue
                if helly and any(bt & mask == bt for bt in bad_triples):
                    continue
                checked += 1
                point = min_norm_feasible_point([halfspaces[i] for i in combo], budget)
            if point is not None:
                best = (combo, point)
                break
        if best is not None:
            break

    if best is None:
        v_star = np.zeros(budget.dim)
        return OracleResult(
            v_star=v_star, phi_value=0.0, certificate=(), subsets_checked=checked
        )

    combo, point = best
    v_star = _strictify(point, combo, C, b, budget)
    mask = satisfied_mask(v_star, dataset)
    if mask.sum() < len(combo):
        v_star = point  # nudge backfired; keep the raw min-norm point
        mask = satisfied_mask(v_star, dataset)
    certificate = tuple(int(i) for i in np.flatnonzero(mask))
    return OracleResult(
        v_star=v_star,
        phi_value=len(certificate) / n,
        certificate=certificate,
        subsets_checked=checked,
    )


def _unique_lines(halfspaces: list[HalfSpace]) -> list[tuple[float, float, float]]:
    """Boundary lines as normalized (cx, cy, b), deduplicated up to sign."""
    lines: list[tuple[float, float, float]] = []
    for h in halfspaces:
        norm = float(np.linalg.norm(h.c))
        if norm == 0.0:
            continue  # no boundary at all
        cx, cy, off = h.c[0] / norm, h.c[1] / norm, h.b / norm
        if cx < 0.0 or (cx == 0.0 and cy < 0.0):
            cx, cy, off = -cx, -cy, -off
        for ex, ey, eo in lines:
            if abs(cx - ex) < 1e-12 and abs(cy - ey) < 1e-12 and abs(off - eo) < 1e-9:
                break
        else:
            lines.append((cx, cy, off))
    return lines


def _intersection_points(
    lines: list[tuple[float, float, float]],
) -> list[tuple[np.ndarray, set[int]]]:
    """Pairwise crossing points, merged when coincident, with the lines through each."""
    points: list[tuple[np.ndarray, set[int]]] = []
    for (i, (a1, b1, c1)), (j, (a2, b2, c2)) in itertools.combinations(
        enumerate(lines), 2
    ):
        det = a1 * b2 - a2 * b1
        if abs(det) < 1e-12:
            continue  # parallel
        p = np.array([(-c1 * b2 + c2 * b1) / det, (-a1 * c2 + a2 * c1) / det])
        for q, members in points:
            if float(np.linalg.norm(p - q)) < 1e-9 * (1.0 + float(np.linalg.norm(q))):
                members.update((i, j))
                break
        else:
            points.append((p, {i, j}))
    return points


def count_regions_2d(halfspaces: list[HalfSpace]) -> int:
    """Cells of the 2-d boundary-line arrangement (ball clip ignored).

    Incremental count 1 + lines + sum over crossing points of (lines through
    the point - 1); for lines in general position this is (n^2 + n + 2) / 2.
    Parallel pairs and concurrent triples are handled, duplicates collapse.
    """
    for h in halfspaces:
        if h.dim != 2:
            raise InvalidInput("region counting is two dimensional only")
    lines = _unique_lines(halfspaces)
    points = _intersection_points(lines)
    return 1 + len(lines) + sum(len(members) - 1 for _, members in points)


def is_general_position_2d(halfspaces: list[HalfSpace]) -> bool:
    """No duplicate or parallel lines and no three lines through one point."""
    for h in halfspaces:
        if h.dim != 2:
            raise InvalidInput("region counting is two dimensional only")
    lines = _unique_lines(halfspaces)
    if len(lines) != sum(1 for h in halfspaces if float(np.linalg.norm(h.c)) > 0.0):
        return False
    points = _intersection_points(lines)
    if len(points) != len(lines) * (len(lines) - 1) // 2:
        return False
    return all(len(members) == 2 for _, members in points)
