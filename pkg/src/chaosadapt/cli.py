"""Command-line interface.

Subcommands: ``generate`` (sample a testbed to CSV), ``adapt`` (fit the
rotated expansions and write a replayable run directory), ``crossval``
(tolerance selection report), ``density`` (sampled density of a stored
expansion), ``evaluate`` (predictions of a stored expansion on a CSV of
points), and ``report`` (human-readable summary of a run directory).

Exit status is 0 on success, 1 on runtime failure (message on stderr),
and 2 on usage errors. All randomized behavior is governed by ``--seed``,
and outputs are written atomically.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__
from .adaptation import AdaptationConfig, adapt_successive, coefficient_carryover_report
from .crossval import select_epsilon
from .data import Dataset
from .density import kde_density
from .files import (
    atomic_write_text,
    config_from_dict,
    dataset_digest,
    read_dataset_csv,
    read_expansion,
    read_manifest,
    read_ranges_csv,
    write_dataset_csv,
    write_density_csv,
    write_expansion,
    write_manifest,
)
from .indexing import MultiIndexSet
from .testbeds import BurgersSpec, RidgeSpec, generate_dataset


def _parse_epsilon(text):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"epsilon must be a number or 'auto', got {text!r}"
        ) from None
    if value < 0:
        raise argparse.ArgumentTypeError("epsilon must be >= 0")
    return value


def _coerce(current, text):
    if isinstance(current, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if isinstance(current, int):
        return int(text)
    if isinstance(current, float):
        return float(text)
    if isinstance(current, tuple):
        return tuple(float(tok) for tok in text.split(":"))
    return text


def apply_config_overrides(config, path):
    """Apply ``key=value`` lines to the configuration.

    Nested solver fields use dotted keys (``dr.gamma=0.5``,
    ``rotation.max_iterations=300``); tuples use colon-separated values.
    """
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            target = config
            *prefix, field = key.split(".")
            for part in prefix:
                if not hasattr(target, part):
                    raise ValueError(f"{path}:{line_no}: unknown section {part!r}")
                target = getattr(target, part)
            if not hasattr(target, field):
                raise ValueError(f"{path}:{line_no}: unknown option {key!r}")
            if key == "epsilon":
                value = _parse_epsilon(text)
            else:
                value = _coerce(getattr(target, field), text)
            setattr(target, field, value)
    return config


def _load_dataset(args):
    ranges = read_ranges_csv(args.ranges) if getattr(args, "ranges", None) else None
    return read_dataset_csv(args.data, ranges=ranges)


def _cmd_generate(args):
    if args.testbed == "ridge":
        spec = RidgeSpec(dimension=args.dim)
    else:
        spec = BurgersSpec(
            forcing_dim=args.forcing_dim,
            nu=args.nu,
            sigma=args.sigma,
            forcing_case=args.forcing_case,
            nx=args.nx,
            nt=args.nt,
        )
    data = generate_dataset(spec, args.n, args.seed)
    write_dataset_csv(data, args.output)
    print(f"wrote {data.n_samples} samples of dimension {data.dimension} to {args.output}")
    return 0


def _make_config(args):
    config = AdaptationConfig(
        epsilon=args.epsilon, restarts=args.restarts, seed=args.seed
    )
    if args.config:
        apply_config_overrides(config, args.config)
    return config


def _cmd_adapt(args):
    data = _load_dataset(args)
    if args.replay:
        manifest = read_manifest(args.replay)
        stored = manifest["dataset"]["digest"]
        actual = dataset_digest(data)
        if stored != actual:
            raise ValueError(
                f"dataset digest {actual} does not match the manifest ({stored})"
            )
        config = config_from_dict(manifest["config"])
        order = manifest["order"]
        max_directions = manifest["max_directions"]
    else:
        config = _make_config(args)
        order = args.order
        max_directions = args.dmax
    results = adapt_successive(data, max_directions, order, config)

    os.makedirs(args.output, exist_ok=True)
    for result in results:
        write_expansion(
            result, os.path.join(args.output, f"d{result.projection.n_rows}.json")
        )
    write_manifest(
        os.path.join(args.output, "manifest.json"),
        config=config,
        data=data,
        order=order,
        max_directions=max_directions,
        results=results,
        tool_version=__version__,
    )
    lines = ["n_directions,fit_epsilon,l2_residual,outer_iterations"]
    for r in results:
        eps = "" if not np.isfinite(r.fit_epsilon) else format(r.fit_epsilon, ".17g")
        lines.append(
            f"{r.projection.n_rows},{eps},{format(r.l2_residual, '.17g')},{r.outer_iterations}"
        )
    atomic_write_text(os.path.join(args.output, "residuals.csv"), "\n".join(lines) + "\n")
    for r in results:
        print(
            f"d'={r.projection.n_rows}: residual {r.l2_residual:.6e} "
            f"in {r.outer_iterations} interchanges"
        )
    return 0


def _cmd_crossval(args):
    data = _load_dataset(args)
    index_set = MultiIndexSet(data.dimension, args.order)
    report = select_epsilon(
        data,
        index_set,
        train_fraction=args.train_fraction,
        seed=args.seed,
        grid_size=args.grid_size,
    )
    document = {
        "selected_epsilon": report.selected_epsilon,
        "argmin_epsilon": report.argmin_epsilon,
        "n_train": report.n_train,
        "n_valid": report.n_valid,
        "split_seed": report.split_seed,
        "epsilon_grid": [float(v) for v in report.epsilon_grid],
        "validation_errors": [
            None if not np.isfinite(v) else float(v) for v in report.validation_errors
        ],
    }
    atomic_write_text(args.output, json.dumps(document, indent=1) + "\n")
    print(f"selected epsilon {report.selected_epsilon:.6e} -> {args.output}")
    return 0


def _cmd_density(args):
    result = read_expansion(args.expansion)
    samples = result.sample(args.samples, args.seed)
    bandwidth = "auto" if args.bandwidth == "auto" else float(args.bandwidth)
    curve = kde_density(samples, grid_size=args.grid_size, bandwidth=bandwidth)
    write_density_csv(curve, args.output)
    print(
        f"wrote density ({args.grid_size} points, bandwidth {curve.bandwidth:.4g}) "
        f"to {args.output}"
    )
    return 0


def _cmd_evaluate(args):
    result = read_expansion(args.expansion)
    data = _load_dataset(args)
    if data.dimension != result.projection.n_columns:
        raise ValueError(
            f"points have {data.dimension} inputs but the expansion expects "
            f"{result.projection.n_columns}"
        )
    predictions = result.evaluate(data.inputs)
    header = [f"xi_{j + 1}" for j in range(data.dimension)] + ["prediction"]
    lines = [",".join(header)]
    for row, value in zip(data.inputs, predictions):
        lines.append(",".join(format(v, ".17g") for v in (*row, value)))
    atomic_write_text(args.output, "\n".join(lines) + "\n")
    print(f"wrote {len(predictions)} predictions to {args.output}")
    return 0


def _cmd_report(args):
    manifest = read_manifest(os.path.join(args.run, "manifest.json"))
    results = [
        read_expansion(os.path.join(args.run, entry["expansion_file"]))
        for entry in manifest["results"]
    ]
    lines = [
        f"run of chaosadapt {manifest['tool_version']} "
        f"(order {manifest['order']}, up to {manifest['max_directions']} directions)",
        f"dataset: {manifest['dataset']['n_samples']} samples, "
        f"dimension {manifest['dataset']['dimension']}, "
        f"digest {manifest['dataset']['digest'][:12]}...",
        "",
        f"{'d':>3} {'epsilon':>12} {'l2 residual':>14} {'interchanges':>12}",
    ]
    for r in results:
        eps = "-" if not np.isfinite(r.fit_epsilon) else f"{r.fit_epsilon:.4e}"
        lines.append(
            f"{r.projection.n_rows:>3} {eps:>12} {r.l2_residual:>14.6e} "
            f"{r.outer_iterations:>12}"
        )
    if len(results) > 1:
        lines.append("")
        lines.append("coefficient carryover between consecutive dimensions:")
        for entry in coefficient_carryover_report(results):
            prev_d, curr_d = entry["n_directions"]
            worst = float(np.max(np.abs(entry["difference"])))
            scale = float(np.linalg.norm(entry["previous"]))
            lines.append(
                f"  {prev_d} -> {curr_d}: max |change| {worst:.4e} "
                f"({worst / max(scale, 1e-300):.2%} of the coefficient norm)"
            )
    text = "\n".join(lines) + "\n"
    if args.output:
        atomic_write_text(args.output, text)
        print(f"wrote report to {args.output}")
    else:
        print(text, end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chaosadapt",
        description="Sparse polynomial chaos surrogates on learned input rotations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a testbed into a dataset CSV")
    p.add_argument("--testbed", choices=["ridge", "burgers"], required=True)
    p.add_argument("--dim", type=int, default=12, help="ridge input dimension")
    p.add_argument("--forcing-dim", type=int, default=20)
    p.add_argument("--forcing-case", choices=["i", "ii"], default="i")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--nt", type=int, default=128)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("adapt", help="fit rotated expansions and write a run directory")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--ranges", help="parameter ranges CSV for physical inputs")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--dmax", type=int, default=1, help="largest number of directions")
    p.add_argument("--epsilon", type=_parse_epsilon, default="auto")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value overrides for any solver option")
    p.add_argument("--replay", help="manifest to reproduce (overrides other options)")
    p.add_argument("-o", "--output", required=True, help="run directory")
    p.set_defaults(func=_cmd_adapt)

    p = sub.add_parser("crossval", help="select the fit tolerance on the plain basis")
    p.add_argument("--data", required=True)
    p.add_argument("--ranges")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--grid-size", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("density", help="sampled output density of a stored expansion")
    p.add_argument("--expansion", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--grid-size", type=int, default=512)
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("evaluate", help="evaluate a stored expansion on CSV points")
    p.add_argument("--expansion", required=True)
    p.add_argument("--data", required=True, help="points CSV (dataset format)")
    p.add_argument("--ranges")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="summarize a run directory")
    p.add_argument("--run", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a clean diagnostic, not a traceback
        print(f"chaosadapt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
