"""Desk-scale studies of the equilibrium and generalization behavior.

Three studies on synthetic models: the attack/defense accuracy table, the
finite-sample generalization rate of the optimized defense, and the
arrangement-region count behind the shatter-coefficient bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, Unsupported
from .game import AttackSpec, DefenseSpec, simulate
from .geometry import Budget, HalfSpace
from .oracle import count_regions_2d, is_general_position_2d
from .solve import SolveConfig, solve
from .synthetic import (
    GaussianSpec,
    LinearModel,
    SyntheticModel,
    phi_closed_form,
    sample_dataset,
    true_vstar_linear,
)


def _derived_seeds(seed: int, count: int) -> list[int]:
    """Stable child seeds so experiments stay reproducible and independent."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


@dataclass(frozen=True)
class GameTableRow:
    attack: str
    defense: str
    approximate_accuracy: float
    true_accuracy: float | None
    mean_attacker_utility: float


def game_table(
    model: SyntheticModel,
    dist: GaussianSpec,
    n: int,
    budget: Budget,
    seed: int,
    solve_config: SolveConfig | None = None,
) -> list[GameTableRow]:
    """Accuracy table over {none, fgm, pgd} x {none, smooth}.

    The smooth defense vector is optimized on a training sample and every row
    is evaluated on a disjoint test sample of the same size.
    """
    train_seed, test_seed, solve_seed = _derived_seeds(seed, 3)
    train = sample_dataset(model, dist, n, budget, train_seed)
    test = sample_dataset(model, dist, n, budget, test_seed)
    config = solve_config or SolveConfig(seed=solve_seed)
    v_smooth = solve(train, config).v_star

    rows = []
    for attack_kind in ("none", "fgm", "pgd"):
        for defense_kind in ("none", "smooth"):
            defense = (
                DefenseSpec(kind="none")
                if defense_kind == "none"
                else DefenseSpec(kind="fixed", fixed_vector=v_smooth)
            )
            report = simulate(test, AttackSpec(kind=attack_kind), defense, model=model)
            rows.append(
                GameTableRow(
                    attack=attack_kind,
                    defense=defense_kind,
                    approximate_accuracy=report.approximate_accuracy,
                    true_accuracy=report.true_accuracy,
                    mean_attacker_utility=report.mean_attacker_utility,
                )
            )
    return rows


@dataclass(frozen=True)
class RatePoint:
    n: int
    mean_gap: float
    std_gap: float


@dataclass(frozen=True)
class RateReport:
    points: tuple[RatePoint, ...]
    slope: float | None
    slope_defined: bool

    # Mean gaps below this are treated as converged and excluded from the
    # log-log fit (log of a value dominated by optimizer noise is meaningless).
    GAP_FLOOR = 1e-4


def generalization_rate(
    model: SyntheticModel,
    dist: GaussianSpec,
    budget: Budget,
    ns: list[int],
    trials: int,
    seed: int,
    solve_config: SolveConfig | None = None,
) -> RateReport:
    """Coverage gap of the optimized defense versus sample size.

    For each n and trial, optimize on a fresh sample and measure
    phi(true optimum) - phi(estimate) under the exact Gaussian law, then fit
    a log-log slope through the per-n mean gaps.
    """
    if not isinstance(model, LinearModel):
        raise Unsupported("the rate study needs the closed-form coverage of a linear model")
    if any(b <= a for a, b in zip(ns, ns[1:])) or not ns:
        raise InvalidInput("ns must be strictly increasing and nonempty")
    _, phi_best = true_vstar_linear(model, dist, budget)

    seeds = _derived_seeds(seed, 2 * len(ns) * trials)
    points = []
    for idx_n, n in enumerate(ns):
        gaps = []
        for t in range(trials):
            data_seed = seeds[2 * (idx_n * trials + t)]
            solver_seed = seeds[2 * (idx_n * trials + t) + 1]
            data = sample_dataset(model, dist, n, budget, data_seed)
            config = solve_config or SolveConfig(seed=solver_seed)
            result = solve(data, config)
            gaps.append(phi_best - phi_closed_form(model, dist, result.v_star, budget))
        gaps = np.array(gaps)
        points.append(RatePoint(n=n, mean_gap=float(gaps.mean()), std_gap=float(gaps.std())))

    usable = [(p.n, p.mean_gap) for p in points if p.mean_gap >= RateReport.GAP_FLOOR]
    if len(usable) >= 2:
        log_n = np.log([u[0] for u in usable])
        log_gap = np.log([u[1] for u in usable])
        slope = float(np.polyfit(log_n, log_gap, 1)[0])
        return RateReport(points=tuple(points), slope=slope, slope_defined=True)
    return RateReport(points=tuple(points), slope=None, slope_defined=False)


@dataclass(frozen=True)
class RegionReport:
    n: int
    regions: int
    formula: int
    match: bool
    distinct_patterns: int
    patterns_within_bound: bool


def _random_lines(rng: np.random.Generator, n: int) -> list[HalfSpace]:
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
    offsets = rng.uniform(-1.0, 1.0, size=n)
    return [
        HalfSpace(c=np.array([np.cos(a), np.sin(a)]), b=float(o))
        for a, o in zip(angles, offsets)
    ]


def region_check(n: int, seed: int, pattern_samples: int = 20_000) -> RegionReport:
    """Compare the arrangement region count with (n^2 + n + 2) / 2.

    Draws random lines until they are in general position (at most 100
    attempts), counts cells, and verifies that the number of distinct
    satisfied-constraint patterns over sampled defense vectors never exceeds
    the cell count (patterns are constant inside a cell).
    """
    if n < 1:
        raise InvalidInput("need at least one line")
    rng = np.random.default_rng(seed)
    halfspaces = None
    for _ in range(100):
        candidate = _random_lines(rng, n)
        if is_general_position_2d(candidate):
            halfspaces = candidate
            break
    if halfspaces is None:
        raise InvalidInput("could not draw a general-position arrangement in 100 tries")

    regions = count_regions_2d(halfspaces)
    formula = (n * n + n + 2) // 2

    C = np.stack([h.c for h in halfspaces])
    b = np.array([h.b for h in halfspaces])
    # The bound holds for any sampling window; this one covers most cells.
    pts = rng.uniform(-3.0, 3.0, size=(pattern_samples, 2))
    patterns = np.unique(pts @ C.T + b >= 0.0, axis=0)
    distinct = int(patterns.shape[0])

    return RegionReport(
        n=n,
        regions=regions,
        formula=formula,
        match=regions == formula,
        distinct_patterns=distinct,
        patterns_within_bound=distinct <= regions,
    )
