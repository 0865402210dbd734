"""Command-line entry point.

Thin shell over the library: every subcommand maps onto a harness call with
identical behavior. Exit codes: 0 success, 1 runtime failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .artifacts.model import load_artifact
from .errors import ConfigError, LoopLabError
from .harness import (
    evaluate_final,
    load_config,
    mean_se,
    run_experiment,
    sweep,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="looplab",
        description="Iterative learning-loop experiments over editable artifacts.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="experiment TOML file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="config override (repeatable)")
        p.add_argument("--trials", type=int, default=None,
                       help="override the trial count")
        p.add_argument("--seed", type=int, default=None,
                       help="override the base seed")

    p_run = sub.add_parser("run", help="run one experiment")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment per axis value")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True,
                         choices=("batch_size", "horizon", "artifact_init"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")

    p_eval = sub.add_parser("eval", help="evaluate a saved artifact")
    common(p_eval)
    p_eval.add_argument("--artifact", required=True, help="artifact bundle file")

    p_report = sub.add_parser("report", help="aggregate curves and emit plots")
    p_report.add_argument("dirs", nargs="+", help="run or trial directories")
    p_report.add_argument("--out", required=True, help="output directory")

    p_replay = sub.add_parser("replay", help="print a step's optimizer context")
    p_replay.add_argument("rundir", help="run directory")
    p_replay.add_argument("--step", type=int, required=True)
    p_replay.add_argument("--trial", type=int, default=0)
    return parser


def _load(args):
    overrides = list(args.overrides)
    if args.trials is not None:
        overrides.append(f"trials={args.trials}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


def _cmd_run(args) -> int:
    config = _load(args)
    outdir = Path(args.out) if args.out else None
    report = run_experiment(config, outdir)
    sys.stdout.write(report.summary)
    if any(t.failed for t in report.trials) and not report.completed():
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load(args)
    values: list = []
    for token in args.values.split(","):
        token = token.strip()
        try:
            values.append(int(token))
        except ValueError:
            values.append(token)
    outdir = Path(args.out) if args.out else None
    report = sweep(config, args.axis, values, outdir)
    sys.stdout.write(report.table_text())
    if all(cell.failed for cell in report.cells):
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_eval(args) -> int:
    config = _load(args)
    artifact_path = Path(args.artifact)
    if not artifact_path.exists():
        raise ConfigError(f"artifact file not found: {artifact_path}")
    artifact = load_artifact(artifact_path)
    test_tasks = None
    if not config.is_arcade:
        from .environments import generate_text_tasks
        from .environments.splits import split_fixed, split_fraction

        tasks = generate_text_tasks(config.task, config.dataset_size,
                                    config.dataset_seed)
        if config.split == "fixed":
            _, _, test_tasks = split_fixed(tasks)
        else:
            _, test_tasks = split_fraction(tasks, seed=config.dataset_seed,
                                           train_fraction=config.train_fraction)
    score = evaluate_final(artifact, config, config.seed, test_tasks)
    print(f"{score:.6f}")
    return EXIT_OK


def _read_curve(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["step", "train_metric", "val_metric", "stage"]:
            raise ValueError(f"unexpected header in {path}")
        rows = [(int(r["step"]), float(r["train_metric"]), float(r["val_metric"]))
                for r in reader]
    if not rows:
        raise ValueError(f"empty curve file {path}")
    return rows


def _collect_curves(directory: Path) -> list[Path]:
    if (directory / "curve.csv").exists():
        return [directory / "curve.csv"]
    return sorted(directory.glob("trial_*/curve.csv"))


def _cmd_report(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    series = {}  # directory label -> list of per-trial row lists
    for d in args.dirs:
        directory = Path(d)
        curves = []
        for path in _collect_curves(directory):
            try:
                curves.append(_read_curve(path))
            except (ValueError, OSError) as exc:
                print(f"warning: skipping {path}: {exc}", file=sys.stderr)
        if curves:
            series[directory.name or str(directory)] = curves
    if not series:
        print("error: no readable curve files", file=sys.stderr)
        return EXIT_RUNTIME

    agg_lines = ["label,step,mean_val,se_val"]
    summary_lines = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    final_means = {}
    for label, curves in sorted(series.items()):
        steps = min(len(c) for c in curves)
        xs, means, ses = [], [], []
        for i in range(steps):
            mean, se = mean_se([c[i][2] for c in curves])
            xs.append(curves[0][i][0])
            means.append(mean)
            ses.append(se)
            agg_lines.append(f"{label},{curves[0][i][0]},{mean:.6f},{se:.6f}")
        ax.plot(xs, means, label=label)
        ax.fill_between(xs, [m - s for m, s in zip(means, ses)],
                        [m + s for m, s in zip(means, ses)], alpha=0.2)
        final_means[label] = means[-1]
    best = max(final_means, key=final_means.get)
    for label in sorted(final_means):
        marker = " *" if label == best else ""
        summary_lines.append(f"{label}: final val {final_means[label]:.6f}{marker}")
    ax.set_xlabel("update step")
    ax.set_ylabel("validation metric")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "curves.png", dpi=120)
    plt.close(fig)
    (outdir / "aggregate.csv").write_text("\n".join(agg_lines) + "\n",
                                          encoding="utf-8")
    (outdir / "summary.txt").write_text("\n".join(summary_lines) + "\n",
                                        encoding="utf-8")
    print("\n".join(summary_lines))
    return EXIT_OK


def _cmd_replay(args) -> int:
    rundir = Path(args.rundir)
    candidates = [
        rundir / "contexts" / f"step_{args.step:03d}.txt",
        rundir / f"trial_{args.trial:03d}" / "contexts" / f"step_{args.step:03d}.txt",
    ]
    for path in candidates:
        if path.exists():
            sys.stdout.write(path.read_text(encoding="utf-8"))
            return EXIT_OK
    print(f"error: no saved context for step {args.step}", file=sys.stderr)
    return EXIT_RUNTIME


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "eval": _cmd_eval,
        "report": _cmd_report,
        "replay": _cmd_replay,
    }
    try:
        return handlers[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LoopLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
