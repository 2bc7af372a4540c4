"""Command-line interface.

    ifdsim run <config>                  single run, CSV if configured
    ifdsim compare <config>              box scheme vs fd vs 4x fd reference
    ifdsim converge <config> --n 32,64   error vs resolution table
    ifdsim check                         operator/oracle self-tests

Exit codes: 0 completed, 2 diverged, 1 error.
"""

from __future__ import annotations

import argparse
import sys

from ifdsim import harness
from ifdsim.errors import ConfigError


def _print_rows(rows, fieldnames):
    widths = {name: max(len(name), 12) for name in fieldnames}
    print("  ".join(name.ljust(widths[name]) for name in fieldnames))
    for row in rows:
        cells = []
        for name in fieldnames:
            value = row[name]
            text = f"{value:.6e}" if isinstance(value, float) else str(value)
            cells.append(text.ljust(widths[name]))
        print("  ".join(cells))


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    result = harness.run(config)
    print(f"status: {result.status}"
          + (f" (t={result.t_diverged:g})" if result.t_diverged else ""))
    print(f"steps: {result.n_steps}  dt: {result.dt:.6g}  "
          f"mass drift: {result.mass_drift:.3e}  "
          f"wall time: {result.wall_time:.2f}s")
    if config.csv_path:
        print(f"wrote {config.csv_path}")
    return 0 if result.status == "completed" else 2


def _cmd_compare(args) -> int:
    config = harness.load_config(args.config)
    rows = harness.compare_schemes(config)
    _print_rows(rows, ["scheme", "n_cells", "l2", "linf", "status"])
    if config.csv_path:
        print(f"wrote {config.csv_path}")
    return 0 if all(r["status"] == "completed" for r in rows) else 2


def _cmd_converge(args) -> int:
    config = harness.load_config(args.config)
    try:
        n_list = [int(part) for part in args.n.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--n: cannot parse {args.n!r}") from exc
    rows = harness.convergence_study(config, n_list)
    _print_rows(rows, ["n_cells", "l2", "linf", "status"])
    if config.csv_path:
        print(f"wrote {config.csv_path}")
    return 0 if all(r["status"] == "completed" for r in rows) else 2


def _cmd_check(args) -> int:
    return 0 if harness.check() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifdsim",
        description="Information-field-dynamics Burgers schemes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    p_run.add_argument("config", help="path to a key=value config file")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="box scheme vs fd baseline")
    p_cmp.add_argument("config")
    p_cmp.set_defaults(func=_cmd_compare)

    p_con = sub.add_parser("converge", help="error vs resolution study")
    p_con.add_argument("config")
    p_con.add_argument("--n", required=True,
                       help="comma-separated cell counts, e.g. 32,64,128")
    p_con.set_defaults(func=_cmd_converge)

    p_chk = sub.add_parser("check", help="operator/oracle self-tests")
    p_chk.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical failures surface as exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
