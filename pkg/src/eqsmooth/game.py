"""Single-shot zero-sum game between an additive attacker and defender.

Both players perturb a point by at most epsilon in l2; the attacker scores +1
when the sign of the linearized score flips and -1 otherwise, the defender
scores the negation.  The module evaluates per-point utilities, resolves
attack strategies (null, FGM, PGD against a real model, fixed vectors), and
aggregates dataset-level reports with the approximate and true accuracy
metrics.

A perturbed score of exactly zero counts for the defender, matching the
closed inequality that defines the robust set; the event has measure zero and
is not otherwise special-cased.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, ModelRequired
from .geometry import (
    Budget,
    Dataset,
    LinearizationRecord,
    fgm_direction,
    sign_of,
    uniform_ball,
)
from .synthetic import SyntheticModel

ATTACK_KINDS = ("none", "fgm", "pgd", "fixed")
DEFENSE_KINDS = ("none", "fixed")


@dataclass(frozen=True)
class AttackSpec:
    """Attacker strategy descriptor.

    ``fixed`` plays either one shared vector (``fixed_vector``) or a
    per-record array of shape (n, m) (``fixed_vectors``, e.g. attack vectors
    imported from a file).  Norm constraints are enforced against the budget
    at evaluation time; the strategy descriptor carries no epsilon of its own.
    """

    kind: str
    pgd_iters: int = 10
    fixed_vector: np.ndarray | None = None
    fixed_vectors: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise InvalidInput(f"unknown attack kind {self.kind!r}")
        if self.pgd_iters < 1:
            raise InvalidInput("pgd_iters must be a positive integer")
        if self.kind == "fixed":
            if (self.fixed_vector is None) == (self.fixed_vectors is None):
                raise InvalidInput(
                    "fixed attacks need exactly one of fixed_vector or fixed_vectors"
                )
        elif self.fixed_vector is not None or self.fixed_vectors is not None:
            raise InvalidInput(f"{self.kind!r} attacks do not take fixed vectors")
        if self.fixed_vector is not None:
            v = np.asarray(self.fixed_vector, dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, "fixed_vector", v)
        if self.fixed_vectors is not None:
            vs = np.asarray(self.fixed_vectors, dtype=float)
            if vs.ndim != 2:
                raise InvalidInput("fixed_vectors must be an (n, m) array")
            vs.setflags(write=False)
            object.__setattr__(self, "fixed_vectors", vs)


@dataclass(frozen=True)
class DefenseSpec:
    """Defender strategy: nothing, or one constant vector played at every point."""

    kind: str
    fixed_vector: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in DEFENSE_KINDS:
            raise InvalidInput(f"unknown defense kind {self.kind!r}")
        if (self.kind == "fixed") != (self.fixed_vector is not None):
            raise InvalidInput("fixed defenses need fixed_vector, others must omit it")
        if self.fixed_vector is not None:
            v = np.asarray(self.fixed_vector, dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, "fixed_vector", v)


@dataclass(frozen=True)
class GameReport:
    """Aggregate outcome of one simulated game over a dataset."""

    mean_attacker_utility: float
    approximate_accuracy: float
    true_accuracy: float | None
    per_point_utilities: tuple[int, ...]

    @property
    def mean_defender_utility(self) -> float:
        return -self.mean_attacker_utility


def _check_budget_vector(v: np.ndarray, budget: Budget, who: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (budget.dim,):
        raise InvalidInput(f"{who} vector has shape {v.shape}, expected ({budget.dim},)")
    if not budget.contains(v):
        raise InvalidInput(f"{who} vector violates the perturbation budget")
    return v


def utility(
    record: LinearizationRecord, a: np.ndarray, d: np.ndarray, budget: Budget
) -> int:
    """Attacker utility at one point: +1 on a linearized sign flip, else -1.

    The defender's utility is the negation (zero-sum).
    """
    a = _check_budget_vector(a, budget, "attack")
    d = _check_budget_vector(d, budget, "defense")
    s = record.sign
    perturbed = record.f_value + float(np.dot(record.gradient, a + d))
    return 1 if s * perturbed < 0.0 else -1


def _pgd(
    record: LinearizationRecord,
    iters: int,
    budget: Budget,
    model: SyntheticModel,
) -> np.ndarray:
    """Iterated FGM with radial re-projection onto the epsilon sphere.

    Each step perturbs the current iterate by the FGM direction of the model
    queried at that iterate, then projects back to the sphere around the
    original point.  The query is raw value and gradient: attack iterates on
    a piecewise model routinely cross region seams, where the locally-linear
    validity predicate (a property of data points) does not apply.  A step
    that lands exactly on the center has no radial direction; the iterate
    stays put (on a truly linear model this pins PGD to the FGM point for
    any iteration count).
    """
    x = record.point
    p = np.array(x, dtype=float)
    for _ in range(iters):
        f = model.value(p)
        moved = LinearizationRecord(
            f_value=f, gradient=model.gradient(p), label=sign_of(f)
        )
        step = fgm_direction(moved, budget)
        delta = (p + step) - x
        dn = float(np.linalg.norm(delta))
        if dn <= 1e-9 * budget.epsilon:
            # the step returned to the center (up to rounding): the radial
            # projection is undefined there, so the iterate stays put
            continue
        p = x + (budget.epsilon / dn) * delta
    return p - x


def resolve_attack(
    record: LinearizationRecord,
    spec: AttackSpec,
    budget: Budget,
    model: SyntheticModel | None = None,
) -> np.ndarray:
    """Concrete attack vector for one record under the given strategy.

    The attack is resolved without sight of the defense (simultaneous play).
    """
    if spec.kind == "none":
        return np.zeros(budget.dim)
    if spec.kind == "fgm":
        return fgm_direction(record, budget)
    if spec.kind == "fixed":
        if spec.fixed_vector is None:
            raise InvalidInput(
                "per-record fixed_vectors are resolved by simulate, not per record"
            )
        return np.asarray(spec.fixed_vector, dtype=float)
    # pgd
    if model is None:
        raise ModelRequired("PGD queries the classifier at moved points; pass a model")
    if record.point is None:
        raise ModelRequired("PGD needs the original input point on the record")
    return _pgd(record, spec.pgd_iters, budget, model)


def simulate(
    dataset: Dataset,
    attack: AttackSpec,
    defense: DefenseSpec,
    model: SyntheticModel | None = None,
) -> GameReport:
    """Play the game at every record and aggregate.

    Per-point utilities are independent, so the report does not depend on
    evaluation order.  True accuracy (scored by the actual classifier at the
    perturbed points, against the stored labels) is included exactly when a
    model is given and every record carries its point.
    """
    budget = dataset.budget
    d = (
        np.zeros(budget.dim)
        if defense.fixed_vector is None
        else _check_budget_vector(defense.fixed_vector, budget, "defense")
    )
    if attack.fixed_vectors is not None and attack.fixed_vectors.shape != (
        dataset.n,
        budget.dim,
    ):
        raise InvalidInput(
            f"fixed_vectors has shape {attack.fixed_vectors.shape}, expected "
            f"({dataset.n}, {budget.dim})"
        )

    attacks = []
    utilities = []
    for i, record in enumerate(dataset.records):
        if attack.kind == "fixed" and attack.fixed_vectors is not None:
            a = attack.fixed_vectors[i]
        else:
            a = resolve_attack(record, attack, budget, model)
        attacks.append(a)
        utilities.append(utility(record, a, d, budget))

    n = dataset.n
    mean_u = sum(utilities) / n
    approx_acc = (1.0 - mean_u) / 2.0

    true_acc = None
    if model is not None and all(r.point is not None for r in dataset.records):
        correct = 0
        for record, a in zip(dataset.records, attacks):
            value = model.value(record.point + a + d)
            if record.sign * value >= 0.0:
                correct += 1
        true_acc = correct / n

    return GameReport(
        mean_attacker_utility=mean_u,
        approximate_accuracy=approx_acc,
        true_accuracy=true_acc,
        per_point_utilities=tuple(utilities),
    )


def fgm_best_response_check(
    dataset: Dataset,
    defense_vector: np.ndarray,
    num_random_attacks: int,
    seed: int,
) -> bool:
    """Empirical pointwise dominance of FGM over sampled random attacks.

    True iff at every record the FGM utility is at least the utility of each
    of ``num_random_attacks`` attacks drawn uniformly from the ball.  Records
    with a zero gradient are untouchable by any attack (the linearized score
    never moves), so FGM trivially ties there.
    """
    budget = dataset.budget
    d = _check_budget_vector(defense_vector, budget, "defense")
    rng = np.random.default_rng(seed)
    A = uniform_ball(rng, num_random_attacks, budget)  # (k, m)

    for record in dataset.records:
        s = record.sign
        g = record.gradient
        if float(np.linalg.norm(g)) == 0.0:
            continue  # every attack scores -1, FGM cannot be beaten
        u_fgm = utility(record, fgm_direction(record, budget), d, budget)
        if u_fgm == 1:
            continue  # +1 is the maximum utility
        perturbed = record.f_value + (A + d) @ g
        if np.any(s * perturbed < 0.0):
            return False
    return True
