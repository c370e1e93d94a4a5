"""Perturbation budget, robust-set geometry, and the empirical coverage objective.

A locally linear classifier at a point is summarized by its score f and
gradient g.  A defense vector v (norm at most epsilon) is *robust* for that
point when no attack vector of norm at most epsilon can flip the sign of the
linearized score.  That robust set is the intersection of the budget ball
with a single half-space

    { v : c.v + b >= 0 },   c = sign(f) * g,   b = |f| - epsilon * ||g||,

and everything downstream (game values, defense optimization, exact oracles)
is built on this reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateRecord, InvalidInput, ZeroGradient

# Relative slack on ball membership, absorbs projection rounding.
BALL_RTOL = 1e-9


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidInput(f"{name} must be a 1-d vector, got shape {v.shape}")
    return v


def sign_of(value: float, label: int | None = None) -> int:
    """Sign in {-1, +1}; a zero score is resolved by the label or rejected.

    The convention is +1 for positive, -1 for negative.  Zero has no sign of
    its own: callers must supply the stored label, otherwise the record is
    degenerate.
    """
    if value > 0.0:
        return 1
    if value < 0.0:
        return -1
    if label is None:
        raise DegenerateRecord("score is exactly zero and no label was given")
    return int(label)


@dataclass(frozen=True)
class Budget:
    """l2 perturbation budget: radius epsilon in an input space of dimension dim."""

    epsilon: float
    dim: int

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise InvalidInput(f"epsilon must be positive, got {self.epsilon}")
        if self.dim < 1:
            raise InvalidInput(f"dim must be at least 1, got {self.dim}")

    @property
    def ball_tol(self) -> float:
        return BALL_RTOL * self.epsilon

    def contains(self, v: np.ndarray) -> bool:
        """Closed ball membership with the rounding slack."""
        return float(np.linalg.norm(v)) <= self.epsilon + self.ball_tol


@dataclass(frozen=True)
class LinearizationRecord:
    """One data point's local linear model: score f(x) and gradient of f at x.

    ``label`` is sign(f) and may be omitted when f is nonzero; ``point`` is x
    itself and is only needed by model-backed attacks and true-accuracy
    scoring.
    """

    f_value: float
    gradient: np.ndarray
    label: int | None = None
    point: np.ndarray | None = None

    def __post_init__(self):
        g = _as_vector(self.gradient, "gradient")
        g.setflags(write=False)
        object.__setattr__(self, "gradient", g)
        object.__setattr__(self, "f_value", float(self.f_value))
        if self.label is not None:
            if self.label not in (-1, 1):
                raise InvalidInput(f"label must be -1 or +1, got {self.label}")
            if self.f_value != 0.0 and self.label != sign_of(self.f_value):
                raise InvalidInput("label contradicts the sign of f_value")
        if self.point is not None:
            p = _as_vector(self.point, "point")
            if p.shape != g.shape:
                raise InvalidInput("point and gradient dimensions differ")
            p.setflags(write=False)
            object.__setattr__(self, "point", p)

    @property
    def dim(self) -> int:
        return self.gradient.shape[0]

    @property
    def sign(self) -> int:
        return sign_of(self.f_value, self.label)


@dataclass(frozen=True)
class Dataset:
    """Immutable bundle of linearization records sharing one budget."""

    records: tuple[LinearizationRecord, ...]
    budget: Budget

    def __post_init__(self):
        recs = tuple(self.records)
        if not recs:
            raise InvalidInput("dataset must contain at least one record")
        for r in recs:
            if r.dim != self.budget.dim:
                raise InvalidInput(
                    f"record dimension {r.dim} != budget dimension {self.budget.dim}"
                )
        object.__setattr__(self, "records", recs)

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def dim(self) -> int:
        return self.budget.dim

    @cached_property
    def halfspace_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked (C, b) of the per-record robust-set half-spaces.

        Row i is the unnormalized constraint c_i.v + b_i >= 0 for record i.
        """
        hs = [halfspace_of(r, self.budget) for r in self.records]
        C = np.stack([h.c for h in hs])
        b = np.array([h.b for h in hs])
        C.setflags(write=False)
        b.setflags(write=False)
        return C, b

    def halfspaces(self) -> list["HalfSpace"]:
        return [halfspace_of(r, self.budget) for r in self.records]


@dataclass(frozen=True)
class HalfSpace:
    """Constraint {v : c.v + b >= 0}, stored unnormalized.

    c and b keep the scale of the record they came from; normalizing would
    lose nothing geometrically but is never needed.
    """

    c: np.ndarray
    b: float

    def __post_init__(self):
        c = _as_vector(self.c, "c")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def margin(self, v: np.ndarray) -> float:
        return float(np.dot(self.c, v) + self.b)


def halfspace_of(record: LinearizationRecord, budget: Budget) -> HalfSpace:
    """Half-space whose intersection with the budget ball is the robust set.

    c = sign(f) * grad f, b = |f| - epsilon * ||grad f||.  A zero gradient is
    fine here: c is the zero vector and b = |f|, so the robust set is the
    whole ball when f != 0.
    """
    if record.dim != budget.dim:
        raise InvalidInput("record and budget dimensions differ")
    s = record.sign
    c = s * record.gradient
    b = abs(record.f_value) - budget.epsilon * float(np.linalg.norm(record.gradient))
    return HalfSpace(c=c, b=b)


def in_robust_set(v: np.ndarray, hs: HalfSpace, budget: Budget) -> bool:
    """Closed membership test: c.v + b >= 0 and v inside the ball."""
    v = _as_vector(v, "v")
    if v.shape[0] != hs.dim:
        raise InvalidInput(f"v has dimension {v.shape[0]}, half-space has {hs.dim}")
    return budget.contains(v) and hs.margin(v) >= 0.0


def fgm_direction(record: LinearizationRecord, budget: Budget) -> np.ndarray:
    """Fast Gradient Method attack: -epsilon * sign(f) * g / ||g||.

    The strongest linearized attack; its norm is exactly epsilon.
    """
    if record.dim != budget.dim:
        raise InvalidInput("record and budget dimensions differ")
    norm = float(np.linalg.norm(record.gradient))
    if norm == 0.0:
        raise ZeroGradient("FGM direction is undefined for a zero gradient")
    s = record.sign
    return (-budget.epsilon * s / norm) * record.gradient


def project_to_ball(v: np.ndarray, budget: Budget) -> np.ndarray:
    """Euclidean projection onto the closed epsilon-ball; bitwise idempotent.

    Points already inside the rounding slack pass through untouched, so
    re-projecting a projected vector returns it unchanged.
    """
    v = _as_vector(v, "v")
    norm = float(np.linalg.norm(v))
    if norm <= budget.epsilon + budget.ball_tol:
        return v
    return (budget.epsilon / norm) * v


def phi_n(v: np.ndarray, dataset: Dataset) -> float:
    """Empirical coverage: fraction of records whose robust set contains v.

    Always an exact multiple of 1/n.
    """
    return satisfied_mask(v, dataset).sum() / dataset.n


def uniform_ball(rng: np.random.Generator, count: int, budget: Budget) -> np.ndarray:
    """Sample ``count`` points uniformly from the budget ball.

    Gaussian directions normalized to the sphere, radii scaled by U^(1/m).
    """
    g = rng.standard_normal((count, budget.dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = budget.epsilon * rng.uniform(size=(count, 1)) ** (1.0 / budget.dim)
    return g / norms * radii


def satisfied_mask(v: np.ndarray, dataset: Dataset) -> np.ndarray:
    """Boolean mask over records with v in the robust set, vectorized."""
    v = _as_vector(v, "v")
    if v.shape[0] != dataset.dim:
        raise InvalidInput("v dimension does not match dataset")
    if dataset.n == 0:
        raise InvalidInput("empty dataset")
    if not dataset.budget.contains(v):
        raise InvalidInput("v violates the perturbation budget")
    C, b = dataset.halfspace_matrix
    return C @ v + b >= 0.0
