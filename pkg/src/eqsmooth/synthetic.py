"""Analytically known classifiers and Gaussian data for ground-truth checks.

Two model families:

* ``LinearModel``: f(x) = w.x + b0.  Exactly linear everywhere, so the local
  linearization is globally valid and the coverage measure phi has a one
  dimensional closed form through the scalar score distribution.
* ``FanModel``: K affine pieces on angular sectors around an apex (dimension
  2 only).  Piecewise linear with a measure-zero seam set, the smallest model
  where the locally-linear assumption has actual content: a point is valid
  only when the 2-epsilon ball around it stays inside one sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DegenerateRecord,
    DistributionMismatch,
    InvalidInput,
    ModelAssumptionViolated,
    Unsupported,
)
from .geometry import Budget, Dataset, LinearizationRecord, _as_vector, sign_of


@dataclass(frozen=True)
class LinearModel:
    """f(x) = w.x + b0 with a nonzero weight vector."""

    w: np.ndarray
    b0: float

    def __post_init__(self):
        w = _as_vector(self.w, "w")
        if float(np.linalg.norm(w)) == 0.0:
            raise InvalidInput("linear model weight vector must be nonzero")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b0", float(self.b0))

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def value(self, x: np.ndarray) -> float:
        return float(np.dot(self.w, x) + self.b0)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.w


@dataclass(frozen=True)
class FanModel:
    """Piecewise-affine classifier on K angular sectors around an apex (2-d).

    ``angles`` are the K sorted ray directions in [0, 2*pi); sector k spans
    [angles[k], angles[k+1]) and carries the affine piece w_k.x + b0_k.
    """

    apex: np.ndarray
    angles: tuple[float, ...]
    pieces: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        apex = _as_vector(self.apex, "apex")
        if apex.shape[0] != 2:
            raise InvalidInput("fan models are two dimensional")
        apex.setflags(write=False)
        object.__setattr__(self, "apex", apex)
        angles = tuple(float(a) % (2 * math.pi) for a in self.angles)
        if len(angles) < 2:
            raise InvalidInput("a fan needs at least two sector rays")
        if sorted(angles) != list(angles) or len(set(angles)) != len(angles):
            raise InvalidInput("ray angles must be strictly increasing in [0, 2*pi)")
        object.__setattr__(self, "angles", angles)
        if len(self.pieces) != len(angles):
            raise InvalidInput("need exactly one affine piece per sector")
        pieces = []
        for w, b0 in self.pieces:
            w = _as_vector(w, "sector weight")
            if float(np.linalg.norm(w)) == 0.0:
                raise InvalidInput("sector weight vectors must be nonzero")
            w.setflags(write=False)
            pieces.append((w, float(b0)))
        object.__setattr__(self, "pieces", tuple(pieces))

    @property
    def dim(self) -> int:
        return 2

    def sector_of(self, x: np.ndarray) -> int:
        d = np.asarray(x, dtype=float) - self.apex
        theta = math.atan2(d[1], d[0]) % (2 * math.pi)
        # Last sector wraps around past 2*pi back to angles[0].
        for k in range(len(self.angles) - 1):
            if self.angles[k] <= theta < self.angles[k + 1]:
                return k
        return len(self.angles) - 1

    def value(self, x: np.ndarray) -> float:
        w, b0 = self.pieces[self.sector_of(x)]
        return float(np.dot(w, x) + b0)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.pieces[self.sector_of(x)][0]

    def seam_distance(self, x: np.ndarray) -> float:
        """Distance from x to the nearest sector-boundary ray."""
        x = np.asarray(x, dtype=float)
        d = x - self.apex
        dists = []
        for a in self.angles:
            u = np.array([math.cos(a), math.sin(a)])
            t = float(np.dot(d, u))
            if t <= 0.0:
                dists.append(float(np.linalg.norm(d)))
            else:
                dists.append(float(np.linalg.norm(d - t * u)))
        return min(dists)


SyntheticModel = Union[LinearModel, FanModel]


@dataclass(frozen=True)
class GaussianSpec:
    """Diagonal Gaussian data distribution: mean vector and per-axis variances."""

    mean: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        mean = _as_vector(self.mean, "mean")
        var = _as_vector(self.variances, "variances")
        if mean.shape != var.shape:
            raise InvalidInput("mean and variances must have equal length")
        if np.any(var <= 0.0):
            raise InvalidInput("variances must be positive")
        mean.setflags(write=False)
        var.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variances", var)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def is_valid_point(model: SyntheticModel, x: np.ndarray, budget: Budget) -> bool:
    """True when the 2-epsilon ball around x is inside one affine piece.

    Linear models are valid everywhere.  For fans this requires distance at
    least 2*epsilon from every sector ray (which also keeps the apex out of
    the ball).
    """
    if isinstance(model, LinearModel):
        return True
    return model.seam_distance(x) >= 2.0 * budget.epsilon


def _valid_mask(model: SyntheticModel, xs: np.ndarray, budget: Budget) -> np.ndarray:
    """Vectorized validity predicate over a batch of points."""
    if isinstance(model, LinearModel):
        return np.ones(len(xs), dtype=bool)
    d = xs - model.apex
    dist = np.full(len(xs), np.inf)
    for a in model.angles:
        u = np.array([math.cos(a), math.sin(a)])
        t = d @ u
        perp = np.linalg.norm(d - np.outer(t, u), axis=1)
        radial = np.linalg.norm(d, axis=1)
        dist = np.minimum(dist, np.where(t > 0.0, perp, radial))
    return dist >= 2.0 * budget.epsilon


def linearize(model: SyntheticModel, x: np.ndarray, budget: Budget) -> LinearizationRecord:
    """Evaluate the local linear model of f at x as a dataset record."""
    x = _as_vector(x, "x")
    if x.shape[0] != model.dim or model.dim != budget.dim:
        raise InvalidInput("point, model and budget dimensions must agree")
    if not is_valid_point(model, x, budget):
        raise ModelAssumptionViolated(
            "point lies within 2*epsilon of a sector seam; the local linear model does not hold"
        )
    f = model.value(x)
    if f == 0.0:
        raise DegenerateRecord("point lies exactly on the decision boundary")
    return LinearizationRecord(
        f_value=f, gradient=model.gradient(x), label=sign_of(f), point=x
    )


def sample_dataset(
    model: SyntheticModel,
    dist: GaussianSpec,
    n: int,
    budget: Budget,
    seed: int,
) -> Dataset:
    """Draw n points from the Gaussian, rejecting invalid ones, and linearize.

    Deterministic for a fixed seed.  Raises DistributionMismatch when fewer
    than 1% of a million draws pass the validity predicate.
    """
    if n < 1:
        raise InvalidInput("need at least one sample")
    if dist.dim != model.dim or dist.dim != budget.dim:
        raise InvalidInput("distribution, model and budget dimensions must agree")
    rng = np.random.default_rng(seed)
    std = np.sqrt(dist.variances)
    records = []
    drawn = 0
    while len(records) < n:
        batch = max(256, min(65536, 4 * (n - len(records))))
        xs = dist.mean + rng.standard_normal((batch, dist.dim)) * std
        drawn += batch
        for x in xs[_valid_mask(model, xs, budget)]:
            if len(records) == n:
                break
            f = model.value(x)
            if f == 0.0:
                continue
            records.append(
                LinearizationRecord(
                    f_value=f, gradient=model.gradient(x), label=sign_of(f), point=x
                )
            )
        if drawn >= 1_000_000 and len(records) < 0.01 * drawn:
            raise DistributionMismatch(
                f"accepted {len(records)} of {drawn} draws; distribution places almost "
                "no mass on valid points"
            )
    return Dataset(records=tuple(records), budget=budget)


def gaussian_cdf(z: float) -> float:
    """Standard normal CDF via the error function (well under 1e-7 absolute error)."""
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _score_params(model: LinearModel, dist: GaussianSpec) -> tuple[float, float]:
    m = float(np.dot(model.w, dist.mean) + model.b0)
    sigma = math.sqrt(float(np.dot(model.w**2, dist.variances)))
    return m, sigma


def phi_of_score_shift(model: LinearModel, dist: GaussianSpec, u: float, budget: Budget) -> float:
    """Coverage as a function of the scalar shift u = w.v.

    With s = w.X + b0 Gaussian, v is robust for x exactly when s clears one
    of two one-sided thresholds, t1 = eps*||w|| - u >= 0 on the positive side
    and t2 = -eps*||w|| - u <= 0 on the negative side, so the two events are
    disjoint and their probabilities add.
    """
    m, sigma = _score_params(model, dist)
    a = budget.epsilon * float(np.linalg.norm(model.w))
    t1 = a - u
    t2 = -a - u
    return (1.0 - gaussian_cdf((t1 - m) / sigma)) + gaussian_cdf((t2 - m) / sigma)


def phi_closed_form(
    model: SyntheticModel, dist: GaussianSpec, v: np.ndarray, budget: Budget
) -> float:
    """Exact coverage measure of a defense vector under the Gaussian data law."""
    if not isinstance(model, LinearModel):
        raise Unsupported("closed-form coverage exists only for linear models")
    v = _as_vector(v, "v")
    if v.shape[0] != model.dim:
        raise InvalidInput("v dimension does not match the model")
    return phi_of_score_shift(model, dist, float(np.dot(model.w, v)), budget)


def true_vstar_linear(
    model: LinearModel, dist: GaussianSpec, budget: Budget
) -> tuple[np.ndarray, float]:
    """Exact maximizer of the coverage measure for a linear model.

    Coverage depends on v only through u = w.v, which ranges over
    [-eps*||w||, eps*||w||] on the ball.  A 2001-point grid locates the
    best bracket and golden-section search refines it.  Exact ties prefer
    u >= 0, then smaller |u|.
    """
    if not isinstance(model, LinearModel):
        raise Unsupported("true maximizer is only computed for linear models")
    a = budget.epsilon * float(np.linalg.norm(model.w))

    def phi_u(u: float) -> float:
        return phi_of_score_shift(model, dist, u, budget)

    grid = np.linspace(-a, a, 2001)
    best_u, best_phi = 0.0, -1.0
    for u in grid:
        u = float(u)
        p = phi_u(u)
        if p > best_phi or (
            p == best_phi and (u >= 0.0 > best_u or (u * best_u >= 0.0 and abs(u) < abs(best_u)))
        ):
            best_u, best_phi = u, p

    step = grid[1] - grid[0]
    lo = max(-a, best_u - step)
    hi = min(a, best_u + step)
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - gr * (hi - lo)
    x2 = lo + gr * (hi - lo)
    f1, f2 = phi_u(x1), phi_u(x2)
    for _ in range(200):
        if hi - lo < 1e-14 * max(1.0, a):
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + gr * (hi - lo)
            f2 = phi_u(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - gr * (hi - lo)
            f1 = phi_u(x1)
    u_mid = 0.5 * (lo + hi)
    if phi_u(u_mid) > best_phi:
        best_u, best_phi = u_mid, phi_u(u_mid)

    w2 = float(np.dot(model.w, model.w))
    v_star = (best_u / w2) * model.w
    return v_star, best_phi
