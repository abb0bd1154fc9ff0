"""Command line: ``tcgre gen``, ``tcgre solve`` and ``tcgre bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .bench import SOLVERS, ConfigError, load_config, run_bench
from .generators import FAMILIES, GenSpec, GenSpecError, generate
from .jsg import BudgetExceededError
from .model import (InstanceParseError, InstanceValidationError, check_solution, dump_instance,
                    load_instance, solution_to_dict)
from .oracle import OracleCapError


def _gen(args) -> int:
    spec = GenSpec(args.family, args.nodes, args.agents, args.risky_ratio, args.supports,
                   args.seed, args.density, args.horizon)
    try:
        inst = generate(spec)
    except GenSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dump_instance(inst)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _solve(args) -> int:
    try:
        inst = load_instance(Path(args.inp).read_text())
    except (InstanceParseError, InstanceValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        sol = SOLVERS[args.solver](inst, args.timeout)
    except (BudgetExceededError, OracleCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc = solution_to_dict(sol)
    if sol.found:
        doc["violations"] = check_solution(inst, sol)
    text = json.dumps(doc, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    st = sol.stats
    status = "timeout" if st.timed_out else ("ok" if sol.found else "no path")
    print(f"{args.solver}: {status} cost={sol.total_cost} "
          f"visited={st.visited_joint_states} expanded={st.expanded_joint_edges} "
          f"time={st.wall_time:.4f}s", file=sys.stderr)
    if not args.out:
        print(text)
    return 0 if sol.found else 1


def _bench(args) -> int:
    try:
        cfg = load_config(Path(args.config).read_text())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.workers is not None:
        cfg.workers = args.workers
    out_path = Path(args.out)
    with out_path.open("w", newline="") as fh:
        _, summary = run_bench(cfg, fh)
    summary_path = out_path.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summary.to_dict(), indent=1) + "\n")
    print(summary.format())
    return 0 if summary.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tcgre", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", choices=FAMILIES, default="random")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--seed", type=int, default=12)
    g.add_argument("--risky-ratio", type=float, default=0.2)
    g.add_argument("--supports", type=int, default=1, help="support nodes per risky edge")
    g.add_argument("--density", type=float, default=0.3, help="edge density (random family)")
    g.add_argument("--horizon", type=int, default=None)
    g.add_argument("--out")
    g.set_defaults(func=_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--solver", choices=sorted(SOLVERS), default="hjsg")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--timeout", type=float, default=60.0)
    s.add_argument("--out")
    s.set_defaults(func=_solve)

    b = sub.add_parser("bench", help="run a benchmark config")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True, help="CSV file")
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
