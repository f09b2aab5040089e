"""Command-line front end.

Subcommands::

    generate          grow a tree and write it (edge-list / graphml / dot)
    find-root         grow a tree, print the packet (or top-k baseline)
    sweep             epsilon sweep with scaling slopes -> CSV + JSON
    verify-limits     limit-law KS report -> CSV + JSON + samples CSV
    verify-deviation  degree upper-deviation tail table -> CSV + JSON
    verify-bounds     joint tail bound table -> CSV + JSON
    export            convert a stored edge list to another format

Every randomized command needs an explicit ``--seed`` (or the MASTER_SEED
environment variable); there is no silent nondeterminism.  Exit codes:
0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import ba_tree, mc_harness, packet


def _add_common(p: argparse.ArgumentParser, *, epsilon: bool = False, trials: bool = False):
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (falls back to MASTER_SEED env var)")
    p.add_argument("--n", type=int, default=None, help="target tree size")
    p.add_argument("--out", type=str, default=None, help="output file or directory")
    if epsilon:
        p.add_argument("--epsilon", type=float, default=None, help="packet threshold parameter")
    if trials:
        p.add_argument("--trials", type=int, default=None, help="number of Monte Carlo trials")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rootpacket",
        description="Preferential-attachment tree simulator and packet-based root inference.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="grow a tree and write it to a file")
    _add_common(p)
    p.add_argument("--format", choices=["edge-list", "graphml", "dot"],
                   default="edge-list", help="output serialization")

    p = sub.add_parser("find-root", help="grow a tree and print the inferred root set")
    _add_common(p, epsilon=True)
    p.add_argument("--method", choices=["packet", "top-k"], default="packet",
                   help="packet construction or the top-k-degree baseline")
    p.add_argument("--k", type=int, default=None,
                   help="baseline set size (default ceil(epsilon^-2))")

    for name, help_text in [
        ("sweep", "epsilon sweep: success/size scaling across a grid"),
        ("verify-limits", "finite-n degrees vs exact limit laws (KS report)"),
        ("verify-deviation", "upper-deviation tail table for normalized degrees"),
        ("verify-bounds", "joint tail probabilities: MC vs quadrature vs power law"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p, epsilon=False, trials=True)
        p.add_argument("--config", type=str, default=None, help="TOML experiment config")
        p.add_argument("--epsilon-grid", type=str, default=None,
                       help="comma-separated decreasing epsilon values")
        p.add_argument("--threads", type=int, default=None, help="worker threads")

    p = sub.add_parser("export", help="convert a stored edge list to another format")
    p.add_argument("--in", dest="input", type=str, required=True, help="edge-list file")
    p.add_argument("--format", choices=["edge-list", "graphml", "dot"], required=True)
    p.add_argument("--out", type=str, required=True)

    return ap


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MASTER_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"MASTER_SEED is not an integer: {env!r}") from exc
    raise UsageError("a seed is required: pass --seed or set MASTER_SEED")


class UsageError(Exception):
    pass


def _cmd_generate(args) -> int:
    seed = _resolve_seed(args)
    if args.n is None:
        raise UsageError("generate requires --n")
    if args.out is None:
        raise UsageError("generate requires --out")
    tree = ba_tree.grow(args.n, seed)
    Path(args.out).write_bytes(ba_tree.export_tree(tree, args.format))
    return 0


def _cmd_find_root(args) -> int:
    seed = _resolve_seed(args)
    if args.n is None:
        raise UsageError("find-root requires --n")
    if args.epsilon is None and not (args.method == "top-k" and args.k is not None):
        raise UsageError("find-root requires --epsilon (or --method top-k with an explicit --k)")
    if args.epsilon is not None and not 0.0 < args.epsilon < 1.0:
        raise UsageError(f"--epsilon must lie in (0, 1), got {args.epsilon}")
    tree = ba_tree.grow(args.n, seed)
    if args.method == "packet":
        members = packet.epsilon_packet(tree, args.epsilon).members
    else:
        k = args.k if args.k is not None else math.ceil(args.epsilon ** -2)
        k = min(k, tree.n)
        members = packet.top_k_degree(tree, k, seed)
    ids = sorted(members)
    body = "".join(f"{i}\n" for i in ids)
    if args.out is not None:
        if args.out.endswith(".json"):
            Path(args.out).write_text("[" + ", ".join(map(str, ids)) + "]\n")
        else:
            Path(args.out).write_text(body)
    sys.stdout.write(body)
    sys.stdout.write(f"root_in_packet={'true' if 1 in members else 'false'}\n")
    return 0


_EXPERIMENT_OF_COMMAND = {
    "sweep": "epsilon_sweep",
    "verify-limits": "limit_law_check",
    "verify-deviation": "deviation_check",
    "verify-bounds": "joint_bound_check",
}

_CSV_NAME = {
    "epsilon_sweep": "sweep.csv",
    "limit_law_check": "limit_laws.csv",
    "deviation_check": "deviation.csv",
    "joint_bound_check": "bounds.csv",
}


def _cmd_experiment(args, command: str) -> int:
    kind = _EXPERIMENT_OF_COMMAND[command]
    overrides: dict = {"master_seed": _resolve_seed(args)}
    if args.n is not None:
        overrides["n_target"] = args.n
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.threads is not None:
        overrides["thread_count"] = args.threads
    if args.epsilon_grid is not None:
        overrides["epsilon_grid"] = [float(x) for x in args.epsilon_grid.split(",")]
    if args.out is not None:
        overrides["output_path"] = args.out

    if args.config is not None:
        config = mc_harness.load_config(args.config, experiment_kind=kind, **overrides)
    else:
        config = mc_harness.default_config(kind, **overrides)

    table = mc_harness.run_experiment(config)

    out_dir = Path(config.output_path or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / _CSV_NAME[kind]
    json_path = csv_path.with_name(csv_path.stem + "_summary.json")
    table.to_csv(csv_path)
    table.to_json(json_path)
    if kind == "limit_law_check":
        mc_harness.write_samples_csv(table, out_dir / "limit_law_samples.csv")
    print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    print(f"wall time: {table.wall_time_s:.2f}s", file=sys.stderr)

    if kind == "epsilon_sweep":
        s = table.summary
        print(f"size slope: {s['size_slope']:.6f} (se {s['size_slope_se']:.6f})")
        if s.get("failure_slope") is not None:
            print(f"failure slope: {s['failure_slope']:.6f}")
    return 0


def _cmd_export(args) -> int:
    tree = ba_tree.parse_edge_list(Path(args.input).read_bytes())
    Path(args.out).write_bytes(ba_tree.export_tree(tree, args.format))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "find-root":
            return _cmd_find_root(args)
        if args.command == "export":
            return _cmd_export(args)
        if args.command in _EXPERIMENT_OF_COMMAND:
            return _cmd_experiment(args, args.command)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
