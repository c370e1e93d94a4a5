import numpy as np

from eqsmooth import Budget, Dataset, LinearizationRecord


def mc_phi(model, dist, v, budget, samples, seed):
    """Monte Carlo coverage oracle: draw data points, test robust-set
    membership of v via the half-space formula, average."""
    rng = np.random.default_rng(seed)
    xs = dist.mean + rng.standard_normal((samples, dist.dim)) * np.sqrt(dist.variances)
    f = xs @ model.w + model.b0
    s = np.sign(f)
    s[s == 0.0] = 1.0
    margins = s * (f + float(np.dot(model.w, v))) - budget.epsilon * np.linalg.norm(model.w)
    return float(np.mean(margins >= 0.0))


def random_instance(rng, n, m, epsilon=0.25, score_scale=0.35):
    """Random linearization records with a mix of satisfied and violated
    robust-set constraints at the origin."""
    g = rng.standard_normal((n, m))
    f = rng.normal(0.0, score_scale, size=n)
    f[f == 0.0] = score_scale
    records = tuple(
        LinearizationRecord(f_value=float(fi), gradient=gi) for fi, gi in zip(f, g)
    )
    return Dataset(records=records, budget=Budget(epsilon=epsilon, dim=m))


def grid_phi_max(dataset, resolution=400):
    """Brute-force coverage maximum over a grid of in-ball points (2-d only)."""
    eps = dataset.budget.epsilon
    axis = np.linspace(-eps, eps, resolution)
    X, Y = np.meshgrid(axis, axis)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.linalg.norm(pts, axis=1) <= eps]
    C, b = dataset.halfspace_matrix
    counts = (pts @ C.T + b >= 0.0).sum(axis=1)
    return float(counts.max()) / dataset.n
