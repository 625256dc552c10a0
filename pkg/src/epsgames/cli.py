"""Command-line interface.

Machine-readable results go to stdout only; logs and errors go to stderr.
Exit codes: 0 success, 1 usage error, 2 runtime error, 3 theory-check
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .distributions import parse_distribution
from .equilibria import analyze
from .games import Game, GameShape, decode
from .generators import (InteractionGraph, constant_correlation, gen_copula,
                         gen_iid, gen_network, is_alpha_expander,
                         is_well_connected)
from .montecarlo import (ExperimentConfig, estimate_share, fig1_csv,
                         fig1_suite, share_csv, thm_check)
from .theory import convergence_table, theory_report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_shape(text: str) -> GameShape:
    try:
        return GameShape(tuple(int(p) for p in text.split(",")))
    except ValueError as e:
        raise ValueError(f"bad --shape {text!r}: {e}") from None


def _load_delta(text: str, num_agents: int) -> np.ndarray:
    try:
        return constant_correlation(num_agents, float(text))
    except ValueError:
        pass
    with open(text, "r", encoding="utf-8") as fh:
        return np.asarray(json.load(fh), dtype=np.float64)


def _cmd_gen(args) -> int:
    shape = _parse_shape(args.shape)
    spec = parse_distribution(args.dist)
    if args.measure == "iid":
        game = gen_iid(shape, spec, args.seed, args.index)
    elif args.measure == "copula":
        if args.delta is None:
            raise ValueError("--measure copula requires --delta")
        delta = _load_delta(args.delta, shape.num_agents)
        game = gen_copula(shape, spec, delta, args.seed, args.index)
    else:
        if args.graph is None:
            raise ValueError("--measure network requires --graph")
        graph = InteractionGraph.load(args.graph)
        game = gen_network(shape, graph, spec, args.seed, args.index)
    if args.out:
        game.save(args.out)
    else:
        json.dump(game.to_json_dict(), sys.stdout)
        sys.stdout.write("\n")
    return 0


def _cmd_analyze(args) -> int:
    game = Game.load(args.game)
    report = analyze(game, args.epsilon, include_profiles=args.list)
    out = {
        "epsilon": report.epsilon,
        "nash": report.count_nash,
        "eps": report.count_eps,
        "eps_star": report.count_eps_star,
    }
    if args.list:
        out["profiles"] = {
            "nash": [list(decode(game.shape, f)) for f in report.profiles_nash],
            "eps": [list(decode(game.shape, f)) for f in report.profiles_eps],
            "eps_star": [list(decode(game.shape, f)) for f in report.profiles_eps_star],
        }
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_share(args) -> int:
    import os
    with open(args.config, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    config = ExperimentConfig.from_json(obj, base_dir=os.path.dirname(
        os.path.abspath(args.config)))
    if args.seed is not None:
        config = ExperimentConfig(
            shapes=config.shapes, dist=config.dist, epsilons=config.epsilons,
            replications=config.replications, master_seed=args.seed,
            measure=config.measure, targets=config.targets)
    rows = estimate_share(config, threads=args.threads,
                          full_counts=args.full_counts)
    sys.stdout.write(share_csv(rows, full_counts=args.full_counts))
    if args.thm_check:
        verdicts, violation = thm_check(config, threads=args.threads)
        for v in verdicts:
            sys.stderr.write(json.dumps(v, default=_jsonable) + "\n")
        if violation:
            sys.stderr.write("theory check: VIOLATION\n")
            return 3
        sys.stderr.write("theory check: ok\n")
    return 0


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"not jsonable: {type(x)}")


def _cmd_fig1(args) -> int:
    rows = fig1_suite(args.seed, replications=args.replications,
                      threads=args.threads)
    text = fig1_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if not args.no_plot:
            import os
            from .figures import render_fig1
            png = os.path.splitext(args.out)[0] + ".png"
            render_fig1(rows, png)
            sys.stderr.write(f"wrote {args.out} and {png}\n")
        else:
            sys.stderr.write(f"wrote {args.out}\n")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bounds(args) -> int:
    shape = _parse_shape(args.shape)
    spec = parse_distribution(args.dist)
    report = theory_report(shape, spec, args.epsilon)
    json.dump(report.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return 0


def _default_ks(kmin: int, kmax: float):
    ks = []
    d = 1
    while d <= kmax:
        for m in (1, 2, 5):
            k = m * d
            if kmin <= k <= kmax:
                ks.append(int(k))
        d *= 10
    if not ks:
        raise ValueError("empty k grid; check --kmin/--kmax")
    return ks


def _cmd_lemma3(args) -> int:
    spec = parse_distribution(args.dist)
    ks = _default_ks(max(2, args.kmin), args.kmax)
    rows = convergence_table(spec, args.epsilon, ks, endpoint=args.endpoint)
    lines = ["k,lhs,rhs,ratio"]
    for k, lhs, rhs, ratio in rows:
        lines.append(f"{k},{lhs!r},{rhs!r},{ratio!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.plot:
            import os
            from .figures import render_convergence
            png = os.path.splitext(args.out)[0] + ".png"
            finite = [r for r in rows if math.isfinite(r[2])]
            render_convergence(finite if finite else rows, png)
            sys.stderr.write(f"wrote {args.out} and {png}\n")
        else:
            sys.stderr.write(f"wrote {args.out}\n")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_expander(args) -> int:
    graph = InteractionGraph.load(args.graph)
    if args.alpha is not None:
        result = is_alpha_expander(graph, args.alpha)
    else:
        result = is_well_connected(graph, args.well_connected)
    sys.stdout.write("true\n" if result else "false\n")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="epsgames",
                     description="random games, equilibrium counts, theory "
                                 "bounds, and Monte Carlo sweeps")
    parser.add_argument("--version", action="version",
                        version=f"epsgames {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate one game and write it as JSON")
    p.add_argument("--shape", required=True, help="comma list, e.g. 2,2")
    p.add_argument("--dist", required=True, help='e.g. "uniform(0,1)"')
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--index", type=int, default=0, help="game index (default 0)")
    p.add_argument("--measure", choices=("iid", "copula", "network"),
                   default="iid")
    p.add_argument("--delta", help="copula correlation: constant or JSON file")
    p.add_argument("--graph", help="interaction graph file (network measure)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("analyze", help="count equilibria of a stored game")
    p.add_argument("--game", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--list", action="store_true",
                   help="include the equilibrium profiles")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("share", help="Monte Carlo share sweep from a config")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="override the config master seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--full-counts", action="store_true",
                   help="add mean equilibrium counts per cell")
    p.add_argument("--thm-check", action="store_true",
                   help="compare against analytic bounds; exit 3 on violation")
    p.set_defaults(func=_cmd_share)

    p = sub.add_parser("fig1", help="share-vs-agents sweep (2..5 actions)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="CSV path; a PNG lands next to it")
    p.add_argument("--replications", type=int, default=10_000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_fig1)

    p = sub.add_parser("bounds", help="analytic report for one cell")
    p.add_argument("--shape", required=True)
    p.add_argument("--dist", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("lemma3", help="large-action convergence table")
    p.add_argument("--dist", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--kmin", type=int, default=10)
    p.add_argument("--kmax", type=float, default=1e5)
    p.add_argument("--endpoint", choices=("left", "right"), default="left")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot", action="store_true",
                   help="with --out, also render a PNG")
    p.set_defaults(func=_cmd_lemma3)

    p = sub.add_parser("expander", help="graph expansion predicates")
    p.add_argument("--graph", required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--alpha", type=float)
    grp.add_argument("--well-connected", type=float, dest="well_connected",
                     help="check for a (c ln n)-expander with this c")
    p.set_defaults(func=_cmd_expander)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, KeyError, json.JSONDecodeError) as e:
        sys.stderr.write(f"epsgames: error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
