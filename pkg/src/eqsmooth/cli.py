"""Command-line surface and file formats.

Commands: synth, solve, simulate, oracle, genrate, regions.  Datasets travel
as JSONL with a header line, defenses as small JSON files, reports as CSV.
All numbers are written with Python's shortest round-trip float formatting,
so a reload is bit-exact and seeded commands are byte-deterministic.

Exit codes: 0 success, 2 invalid input or I/O failure, 3 capability errors
(PGD without a model, oracle instance over the size cap).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments, game, oracle, synthetic
from .solve import SolveConfig, SolveResult, solve as run_solve
from .errors import (
    EqsmoothError,
    InvalidInput,
    ModelRequired,
    TooLarge,
    Unsupported,
)
from .geometry import Budget, Dataset, LinearizationRecord, project_to_ball

DATASET_FORMAT = "eqsmooth-linz"
ATTACK_FORMAT = "eqsmooth-attack"
FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAPABILITY = 3


# ---------------------------------------------------------------------------
# file formats


def write_dataset_jsonl(path: str | Path, dataset: Dataset) -> None:
    header = {
        "format": DATASET_FORMAT,
        "version": FORMAT_VERSION,
        "dim": dataset.dim,
        "epsilon": dataset.budget.epsilon,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for r in dataset.records:
            row = {"f": r.f_value, "grad": r.gradient.tolist(), "label": r.sign}
            if r.point is not None:
                row["x"] = r.point.tolist()
            fh.write(json.dumps(row) + "\n")


def read_dataset_jsonl(path: str | Path, epsilon_override: float | None = None) -> Dataset:
    with open(path) as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise InvalidInput(f"{path}: empty dataset file")
    header = json.loads(lines[0])
    if header.get("format") != DATASET_FORMAT or header.get("version") != FORMAT_VERSION:
        raise InvalidInput(f"{path}: not a {DATASET_FORMAT} v{FORMAT_VERSION} file")
    dim = int(header["dim"])
    epsilon = float(header["epsilon"])
    if epsilon_override is not None and epsilon_override != epsilon:
        print(
            f"warning: overriding dataset epsilon {epsilon} with {epsilon_override}; "
            "robust-set half-spaces will be re-derived under the new budget",
            file=sys.stderr,
        )
        epsilon = epsilon_override
    budget = Budget(epsilon=epsilon, dim=dim)
    records = []
    for line in lines[1:]:
        row = json.loads(line)
        grad = np.asarray(row["grad"], dtype=float)
        if grad.shape != (dim,):
            raise InvalidInput(f"{path}: gradient length {grad.shape} != header dim {dim}")
        f_value = float(row["f"])
        label = int(row["label"]) if "label" in row else None
        if f_value == 0.0 and label is None:
            raise InvalidInput(
                f"{path}: record with zero score and no label; the sign is undefined"
            )
        point = np.asarray(row["x"], dtype=float) if "x" in row else None
        records.append(
            LinearizationRecord(f_value=f_value, gradient=grad, label=label, point=point)
        )
    return Dataset(records=tuple(records), budget=budget)


def read_attack_jsonl(path: str | Path, dataset: Dataset) -> np.ndarray:
    """Per-record attack vectors, index-aligned with the dataset file.

    Vectors are allowed to overshoot the budget by float noise (external
    tools round); anything within 1e-5 relative is projected back, more is
    rejected.
    """
    with open(path) as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise InvalidInput(f"{path}: empty attack file")
    header = json.loads(lines[0])
    if header.get("format") != ATTACK_FORMAT or header.get("version") != FORMAT_VERSION:
        raise InvalidInput(f"{path}: not an {ATTACK_FORMAT} v{FORMAT_VERSION} file")
    vectors = []
    budget = dataset.budget
    for line in lines[1:]:
        a = np.asarray(json.loads(line)["a"], dtype=float)
        if a.shape != (dataset.dim,):
            raise InvalidInput(f"{path}: attack vector length != dataset dim")
        norm = float(np.linalg.norm(a))
        if norm > budget.epsilon * (1.0 + 1e-5):
            raise InvalidInput(f"{path}: attack vector norm {norm} exceeds budget")
        vectors.append(project_to_ball(a, budget))
    if len(vectors) != dataset.n:
        raise InvalidInput(
            f"{path}: {len(vectors)} attack vectors for {dataset.n} records"
        )
    return np.stack(vectors)


def write_defense_json(path: str | Path, result: SolveResult, n: int) -> None:
    payload = {
        "v": [float(x) for x in result.v_star],
        "phi_n": result.phi_value,
        "satisfied": list(result.satisfied_indices),
        "n": n,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_defense_json(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        payload = json.load(fh)
    return np.asarray(payload["v"], dtype=float)


def _write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    def cell(x) -> str:
        if x is None:
            return ""
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, float):
            return repr(x)
        return str(x)

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# deterministic model construction shared by synth and genrate


def _build_model(
    kind: str,
    dim: int,
    seed: int,
    sectors: int,
    mean_shift: float,
    sigma: float = 1.0,
    b0: float | None = None,
):
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xE05)))
    if kind == "linear":
        w = rng.standard_normal(dim)
        w /= np.linalg.norm(w)
        offset = float(rng.normal(0.0, 0.2)) if b0 is None else b0
        model = synthetic.LinearModel(w=w, b0=offset)
        mean = mean_shift * model.w
    else:
        if dim != 2:
            raise InvalidInput("fan models are two dimensional; pass --dim 2")
        base = rng.uniform(0.0, 2.0 * math.pi / sectors)
        angles = tuple(
            (base + 2.0 * math.pi * k / sectors) % (2.0 * math.pi) for k in range(sectors)
        )
        pieces = []
        for _ in range(sectors):
            w = rng.standard_normal(2)
            w /= np.linalg.norm(w)
            pieces.append((w, float(rng.normal(0.0, 0.2))))
        model = synthetic.FanModel(
            apex=np.zeros(2), angles=tuple(sorted(angles)), pieces=tuple(pieces)
        )
        mean = np.full(2, mean_shift)
    dist = synthetic.GaussianSpec(mean=mean, variances=np.full(dim, sigma * sigma))
    return model, dist


# ---------------------------------------------------------------------------
# subcommands


def _cmd_synth(args) -> int:
    model, dist = _build_model(
        args.model, args.dim, args.seed, args.sectors, args.mean_shift, args.sigma
    )
    budget = Budget(epsilon=args.epsilon, dim=args.dim)
    dataset = synthetic.sample_dataset(model, dist, args.n, budget, args.seed)
    write_dataset_jsonl(args.out, dataset)
    return EXIT_OK


def _cmd_solve(args) -> int:
    dataset = read_dataset_jsonl(args.data, args.epsilon)
    config = SolveConfig(
        step_size=args.step,
        iterations=args.iters,
        restarts=args.restarts,
        seed=args.seed,
        surrogate_scale=args.scale,
    )
    result = run_solve(dataset, config)
    write_defense_json(args.out, result, dataset.n)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    dataset = read_dataset_jsonl(args.data, args.epsilon)
    if args.attack == "fixed":
        if args.attack_file is None:
            raise InvalidInput("--attack fixed needs --attack-file")
        attack = game.AttackSpec(
            kind="fixed", fixed_vectors=read_attack_jsonl(args.attack_file, dataset)
        )
    else:
        attack = game.AttackSpec(kind=args.attack, pgd_iters=args.pgd_iters)
    if args.defense == "fixed":
        if args.defense_file is None:
            raise InvalidInput("--defense fixed needs --defense-file")
        defense = game.DefenseSpec(
            kind="fixed", fixed_vector=read_defense_json(args.defense_file)
        )
    else:
        defense = game.DefenseSpec(kind="none")
    report = game.simulate(dataset, attack, defense, model=None)
    _write_csv(
        args.out,
        ["attack", "defense", "approx_acc", "true_acc", "mean_utility"],
        [[args.attack, args.defense, report.approximate_accuracy,
          report.true_accuracy, report.mean_attacker_utility]],
    )
    return EXIT_OK


def _cmd_oracle(args) -> int:
    dataset = read_dataset_jsonl(args.data, args.epsilon)
    result = oracle.oracle_solve(dataset, max_n=args.max_n)
    payload = {
        "v": [float(x) for x in result.v_star],
        "phi_n": result.phi_value,
        "satisfied": list(result.certificate),
        "n": dataset.n,
        "subsets_checked": result.subsets_checked,
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    return EXIT_OK


def _plot_svg(path: str | Path, points: list[experiments.RatePoint]) -> None:
    """Minimal log-log gap curve; hand-rolled so output is byte-stable."""
    usable = [p for p in points if p.mean_gap > 0.0]
    w, h, pad = 480, 320, 50
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    if len(usable) >= 2:
        xs = [math.log10(p.n) for p in usable]
        ys = [math.log10(p.mean_gap) for p in usable]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        sx = lambda x: pad + (w - 2 * pad) * (x - x0) / (x1 - x0 or 1.0)
        sy = lambda y: h - pad - (h - 2 * pad) * (y - y0) / (y1 - y0 or 1.0)
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>'
        )
        for x, y, p in zip(xs, ys, usable):
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="black"/>')
            parts.append(
                f'<text x="{sx(x):.2f}" y="{sy(y) - 8:.2f}" font-size="10">n={p.n}</text>'
            )
    parts.append(
        f'<text x="{pad}" y="{h - 12}" font-size="11">log10 n vs log10 mean coverage gap</text>'
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def _cmd_genrate(args) -> int:
    model, dist = _build_model(
        "linear", args.dim, args.seed, 0, args.mean_shift, args.sigma, b0=0.1
    )
    budget = Budget(epsilon=args.epsilon, dim=args.dim)
    ns = [int(x) for x in args.ns.split(",") if x.strip()]
    report = experiments.generalization_rate(
        model, dist, budget, ns, trials=args.trials, seed=args.seed
    )
    _write_csv(
        args.out,
        ["n", "mean_gap", "std_gap"],
        [[p.n, p.mean_gap, p.std_gap] for p in report.points],
    )
    if args.svg:
        _plot_svg(args.svg, list(report.points))
    if report.slope_defined:
        print(f"log-log slope: {report.slope}")
    else:
        print("log-log slope: undefined (all gaps below threshold)")
    return EXIT_OK


def _cmd_regions(args) -> int:
    report = experiments.region_check(args.n, args.seed)
    _write_csv(
        args.out,
        ["n", "regions", "formula", "match"],
        [[report.n, report.regions, report.formula, report.match]],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqsmooth",
        description="Equilibrium smoothing toolkit: synthesize, solve, simulate, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="sample a synthetic linearization dataset (JSONL)")
    p.add_argument("--model", choices=("linear", "fan"), default="linear")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sectors", type=int, default=4)
    p.add_argument("--mean-shift", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0, help="data standard deviation per axis")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("solve", help="optimize the smoothing defense on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--epsilon", type=float, default=None, help="override header epsilon")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("simulate", help="play one attack/defense pair over a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--attack", choices=("none", "fgm", "pgd", "fixed"), default="fgm")
    p.add_argument("--pgd-iters", type=int, default=10)
    p.add_argument("--attack-file", default=None, help="JSONL of per-record attack vectors")
    p.add_argument("--defense", choices=("none", "fixed"), default="none")
    p.add_argument("--defense-file", default=None, help="JSON defense produced by solve")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle", help="exact small-instance coverage maximization")
    p.add_argument("--data", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("genrate", help="generalization-rate study on a linear model")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--ns", default="30,100,300,1000,3000")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-shift", type=float, default=0.2)
    p.add_argument("--sigma", type=float, default=0.9)
    p.add_argument("--svg", default=None, help="also write a log-log SVG curve")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_genrate)

    p = sub.add_parser("regions", help="2-d arrangement region count vs formula")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_regions)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelRequired, TooLarge, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (EqsmoothError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
