"""Command-line front end: verification suite and experiment runners.

Exit codes: 0 all checks passed, 1 a suite or experiment failed,
2 the config (file or flags) was rejected.  Identical argv + config +
seed produce byte-identical primary output.  Set DT_LOG=INFO (or DEBUG)
for progress messages on standard error.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .dynamics import QUANTUM, orbit_explore
from .experiments import (
    ConfigError,
    ExperimentConfig,
    density_experiment,
    fiber_multiplicity_scan,
    gluing_consistency,
    transversality_sweep,
)
from .verify import verify_suite

log = logging.getLogger(__name__)

_SCHEMA_HINT = "config schema: README.md, section Configuration files"


def _setup_logging():
    level = os.environ.get("DT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )


def _write(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _experiment_config(args, default_n, default_steps):
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("$", f"cannot read config: {exc}") from None
        cfg = ExperimentConfig.from_json(text)
    else:
        n = args.n if args.n is not None else default_n
        cfg = ExperimentConfig(
            n=n, alpha=(1.9 * math.pi,) * n, steps=default_steps
        )
    doc = cfg.to_dict()
    if args.steps is not None:
        doc["steps"] = args.steps
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.out is not None:
        doc["out"] = args.out
    if args.quantum is not None:
        doc["tolerances"]["quantum"] = args.quantum
    if getattr(args, "kind", None) is not None:
        doc["kind"] = args.kind
    return ExperimentConfig.from_dict(doc)


def _dump_json(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _dump_csv(report):
    lines = [",".join(report["columns"])]
    for row in report["rows"]:
        lines.append(",".join(_csv_cell(x) for x in row))
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------


def _cmd_verify(args):
    n = args.n if args.n is not None else 4
    quantum = args.quantum if args.quantum is not None else QUANTUM
    rows = verify_suite(n=n, seed=args.seed or 0, quantum=quantum)
    width = max(len(r.name) for r in rows)
    lines = [
        f"{r.group:<9} {r.name:<{width}}  {'PASS' if r.ok else 'FAIL'}  {r.residual:.3e}"
        for r in rows
    ]
    _write(args.out, "\n".join(lines) + "\n")
    failures = sum(not r.ok for r in rows)
    if failures:
        print(f"verify: {failures} of {len(rows)} invariants failed", file=sys.stderr)
    return 1 if failures else 0


def _cmd_orbit(args):
    cfg = _experiment_config(args, default_n=4, default_steps=1000)
    rng = np.random.default_rng(cfg.seed)
    coords = cfg.start_coords(rng)
    result = orbit_explore(
        cfg.alpha,
        coords,
        cfg.curves(),
        max_steps=cfg.steps,
        strategy=cfg.strategy,
        seed=cfg.seed,
        quantum=cfg.tol("quantum"),
    )
    records = result.records
    if cfg.strategy == "walk":
        records = [r for r in records if r.step > 0]  # one line per step
    lines = []
    for r in records:
        lines.append(
            json.dumps(
                {
                    "step": r.step,
                    "word": list(r.word),
                    "beta": list(r.coords.beta) if r.coords else None,
                    "gamma": r.coords.gamma_list() if r.coords else None,
                    "fp": r.fingerprint,
                },
                sort_keys=True,
            )
        )
    if result.verdict != "budget_exceeded":
        trailer = {"verdict": result.verdict, "size": result.size}
        if result.diagnostic:
            trailer["diagnostic"] = result.diagnostic
        lines.append(json.dumps(trailer, sort_keys=True))
    _write(args.out or cfg.out, "\n".join(lines) + "\n")
    return 1 if result.verdict == "aborted" else 0


def _cmd_scan(args):
    cfg = _experiment_config(args, default_n=4, default_steps=10_000)
    kind = cfg.kind or "fiber"
    if kind == "fiber":
        report = fiber_multiplicity_scan(cfg)
    else:
        report = transversality_sweep(cfg)
    _write(args.out or cfg.out, _dump_csv(report))
    summary = {k: v for k, v in report.items() if k not in ("rows", "columns", "meta")}
    print(f"scan {kind}: {json.dumps(summary, sort_keys=True)}", file=sys.stderr)
    return 0 if report["ok"] else 1


def _cmd_density(args):
    cfg = _experiment_config(args, default_n=4, default_steps=100_000)
    report = density_experiment(cfg)
    _write(args.out or cfg.out, _dump_json(report.to_dict()))
    return 1 if report.verdict.startswith("aborted") else 0


def _cmd_glue(args):
    cfg = _experiment_config(args, default_n=5, default_steps=20)
    report = gluing_consistency(cfg)
    _write(args.out or cfg.out, _dump_json(report))
    return 0 if report["ok"] else 1


def _parser():
    parser = argparse.ArgumentParser(
        prog="dtchains",
        description="Triangle-chain components: verification and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "verify": (_cmd_verify, "run the invariant suite and print a PASS/FAIL table"),
        "orbit": (_cmd_orbit, "stream a twist orbit as JSONL records"),
        "scan": (_cmd_scan, "emit a fiber or transversality scan as CSV"),
        "density": (_cmd_density, "random-twist equidistribution probe (JSON report)"),
        "glue": (_cmd_glue, "restriction/twist commutation report (JSON)"),
    }
    for name, (handler, help_text) in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--steps", type=int, help="override the config steps")
        p.add_argument("--out", help="write primary output here instead of stdout")
        p.add_argument("--n", type=int, help="puncture count when no config is given")
        p.add_argument("--quantum", type=float, help="fingerprint bin width")
        if name == "scan":
            p.add_argument("--kind", choices=("fiber", "transversality"))
        p.set_defaults(handler=handler)
    return parser


def run(argv=None):
    """Entry point; returns the process exit code."""
    _setup_logging()
    args = _parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error at {exc.path}: {exc.message} ({_SCHEMA_HINT})", file=sys.stderr)
        return 2


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(run())
