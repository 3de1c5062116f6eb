"""Command-line entry point: ``itolift run|check|list-symbols``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import load_config
from .errors import ItoLiftError
from .experiments import run_experiment
from .symbols import BUILTIN_SYMBOLS


def _run_one(path, output_dir, seed):
    config = load_config(path)
    if seed is not None:
        config = config.replace(seed=seed)
    result = run_experiment(config, output_dir)
    return path, str(result.csv_path), [(c.name, c.value, c.threshold) for c in result.failures]


def _cmd_run(args) -> int:
    jobs = max(1, args.jobs)
    try:
        if jobs == 1 or len(args.configs) == 1:
            outcomes = [_run_one(p, args.output_dir, args.seed) for p in args.configs]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_one, p, args.output_dir, args.seed) for p in args.configs]
                outcomes = [f.result() for f in futures]
    except (ItoLiftError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = 0
    for path, csv_path, failures in outcomes:
        if failures:
            status = 1
            for name, value, threshold in failures:
                print(f"FAIL {path}: {name} value={value:.3e} threshold={threshold:.3e}", file=sys.stderr)
        else:
            print(f"ok   {path} -> {csv_path}")
    return status


def _cmd_check(args) -> int:
    status = 0
    for path in args.configs:
        try:
            config = load_config(path)
        except (ItoLiftError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = 2
        else:
            print(f"{path}: ok ({config.experiment}, symbol {config.symbol_name})")
    return status


def _cmd_list(args) -> int:
    for name, desc in BUILTIN_SYMBOLS.items():
        print(f"{name:16s} {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="itolift", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run experiment config(s)")
    p.add_argument("configs", nargs="+")
    p.add_argument("--output-dir", default=None, help="directory for CSV and manifest files")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="configs to run concurrently")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check", help="parse and validate config(s) only")
    p.add_argument("configs", nargs="+")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("list-symbols", help="list built-in symbol families")
    p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
