"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from evolvim._backend import BACKEND
from evolvim.bench import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    evolve_snapshots,
    generate_synthetic,
    run_comparison,
    select,
    theorem1_scenario,
    write_snapshots,
)
from evolvim.cascade import CascadeConfig, estimate_spread
from evolvim.evolution import PRESETS, FfmParams, FitError, default_grid, fit_parameters, write_params
from evolvim.graph import EdgeListError, Graph, load_edge_list, snapshot_at
from evolvim.rrset import ThetaConfig
from evolvim.seeds import SeedRecord, map_labels

log = logging.getLogger("evolvim")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_graph(path: str, reverse: bool = False) -> Graph:
    try:
        with open(path) as fh:
            return load_edge_list(fh, reverse=reverse)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except EdgeListError as exc:
        raise DataError(f"{path}: {exc}") from None


def _ffm_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None, help="forward burning probability")
    p.add_argument("--gamma", type=float, default=None, help="backward burning ratio")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--distribution", choices=("geometric", "binomial"), default="geometric")
    p.add_argument("--recurse-backward", action="store_true")


def _ffm(args, arrivals: int = 0) -> FfmParams:
    alpha, gamma = PRESETS[args.preset] if args.preset else PRESETS["synthetic"]
    if args.alpha is not None:
        alpha = args.alpha
    if args.gamma is not None:
        gamma = args.gamma
    try:
        return FfmParams(alpha, gamma, arrivals, args.distribution, recurse_backward=args.recurse_backward)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_evolve(args) -> int:
    arrivals = args.arrivals
    if not arrivals:
        raise UsageError("--arrivals needs at least one count")
    params = _ffm(args)
    if args.input:
        g0 = _read_graph(args.input)
        if g0.n == 0:
            raise DataError(f"{args.input} has no edges")
        snaps = evolve_snapshots(g0, params, arrivals, args.seed)
    else:
        if args.nodes < 1:
            raise UsageError("give --input or --nodes >= 1")
        snaps = generate_synthetic(args.nodes, params, arrivals, args.seed)
    paths = write_snapshots(snaps, arrivals, args.out, args.prefix)
    for a, g, path in zip(arrivals, snaps, paths):
        print(f"{path}\tarrivals={a}\tnodes={g.n}\tedges={g.m}")
    return 0


def cmd_fit(args) -> int:
    if args.temporal:
        if not args.cuts or len(args.cuts) < 2:
            raise UsageError("--temporal needs --cuts with at least two timestamps")
        try:
            with open(args.temporal) as fh:
                tg = load_edge_list(fh, timestamped=True)
        except OSError as exc:
            raise DataError(f"cannot read {args.temporal}: {exc.strerror}") from None
        except EdgeListError as exc:
            raise DataError(f"{args.temporal}: {exc}") from None
        snaps = [snapshot_at(tg, c) for c in args.cuts]
    else:
        if len(args.snapshots) < 2:
            raise UsageError("need at least two snapshot files or --temporal")
        snaps = [_read_graph(path) for path in args.snapshots]
    grid = default_grid(args.step)
    try:
        params = fit_parameters(snaps, grid, args.seed, repeats=args.repeats, workers=args.workers)
    except FitError as exc:
        raise DataError(str(exc)) from None
    if args.out:
        with open(args.out, "w") as fh:
            write_params(params, fh)
    write_params(params, sys.stdout)
    return 0


def cmd_select(args) -> int:
    g = _read_graph(args.graph)
    if g.n == 0:
        raise DataError(f"{args.graph} has no edges")
    if args.k > g.n:
        raise UsageError(f"--k {args.k} exceeds the {g.n} nodes of {args.graph}")
    ffm = _ffm(args, args.arrivals)
    theta = ThetaConfig(args.theta, args.epsilon, args.ell)
    try:
        seeds = select(
            args.algo, g, k=args.k, p=args.p, ffm=ffm, seed=args.seed,
            instances=args.I, rounds=args.R, theta=theta, per_instance=args.per_instance,
            candidate_filter=args.candidate_filter, aggregation=args.aggregation,
            reverse=args.reverse_edges, workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    echo = {
        "k": args.k, "p": args.p, "I": args.I, "R": args.R, "theta": args.theta,
        "alpha": ffm.alpha, "gamma": ffm.gamma, "arrivals": ffm.arrivals,
        "reverse_edges": args.reverse_edges, "candidate_filter": args.candidate_filter,
    }
    record = SeedRecord(args.algo, seeds, args.seed, echo)
    if args.out:
        with open(args.out, "w") as fh:
            record.dump(g, fh)
    else:
        record.dump(g, sys.stdout)
    return 0


def _seed_labels(path: str, trial: int) -> list[str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return [ln.split()[0] for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        doc = json.loads(text)
        if "trials" in doc:
            entries = next(t["seeds"] for t in doc["trials"] if t["trial"] == trial)
        else:
            entries = doc["seeds"]
        return [str(e["label"]) for e in sorted(entries, key=lambda e: e["rank"])]
    except (ValueError, KeyError, TypeError, StopIteration):
        raise DataError(f"{path} is not a seed record") from None


def cmd_spread(args) -> int:
    g = _read_graph(args.graph, reverse=args.reverse_edges)
    labels = _seed_labels(args.seeds, args.trial)
    ids = map_labels(g, labels)
    est = estimate_spread(g, ids, CascadeConfig(args.p, args.rounds), args.seed, workers=args.workers)
    lo, hi = est.interval()
    print(f"seeds\t{len(labels)}")
    print(f"missing\t{len(est.missing)}")
    print(f"spread\t{est.mean:.6f}")
    print(f"sd\t{est.std:.6f}")
    print(f"stderr\t{est.stderr:.6f}")
    print(f"interval\t{lo:.6f}\t{hi:.6f}")
    return 0


def cmd_compare(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    try:
        report = run_comparison(cfg, workers=args.workers)
    except OSError as exc:
        raise DataError(f"cannot read data: {exc}") from None
    except EdgeListError as exc:
        raise DataError(str(exc)) from None
    if args.out:
        report.write(args.out)
    sys.stdout.write(report.table())
    return 0


def cmd_theorem1(args) -> int:
    try:
        res = theorem1_scenario(args.k, args.copies, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"sigma_classical\t{res.sigma_classical}")
    print(f"sigma_optimal\t{res.sigma_optimal}")
    print(f"bound_holds\t{str(res.bound_holds).lower()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evolvim", description="Influence maximization on evolving networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--workers", type=int, default=None, help="threads (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="grow a graph and write nested snapshots")
    p.add_argument("--input", help="edge list to grow; omit to grow from --nodes")
    p.add_argument("--nodes", type=int, default=0, help="size of a synthetic seed graph")
    p.add_argument("--arrivals", type=_int_list, required=True, help="e.g. 0,500,1000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--prefix", default="snapshot")
    _ffm_args(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("fit", help="fit Forest Fire parameters to snapshots")
    p.add_argument("snapshots", nargs="*", help="edge lists in time order")
    p.add_argument("--temporal", help="timestamped edge list instead of snapshot files")
    p.add_argument("--cuts", type=_int_list, help="snapshot timestamps for --temporal")
    p.add_argument("--step", type=float, default=0.05, help="grid spacing")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write parameters here as well")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="run one seed-selection algorithm")
    p.add_argument("graph")
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, default=0.01)
    p.add_argument("--I", type=int, default=500, help="predicted instances (genie)")
    p.add_argument("--R", type=int, default=5000, help="live-edge samples per pick (genie, greedy)")
    p.add_argument("--theta", type=int, default=None, help="RR instances (seer); default from the sample bound")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--per-instance", type=int, default=1)
    p.add_argument("--arrivals", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reverse-edges", action="store_true", help="influence flows against edge direction")
    p.add_argument("--candidate-filter", choices=("v0", "all"), default="v0")
    p.add_argument("--aggregation", choices=("borda", "rank-sum"), default="borda")
    p.add_argument("--out", help="seed record path (default: stdout)")
    _ffm_args(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("spread", help="estimate the spread of a seed file")
    p.add_argument("graph")
    p.add_argument("seeds", help="seed record JSON or one label per line")
    p.add_argument("--p", type=float, default=0.01)
    p.add_argument("--rounds", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0, help="trial to read from a compare seed file")
    p.add_argument("--reverse-edges", action="store_true")
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("compare", help="run a full experiment from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="report directory")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("theorem1", help="greedy-on-G_0 counterexample")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--copies", type=int, default=7)
    p.add_argument("--n", type=int, default=None, help="nodes per copy (default k+1)")
    p.set_defaults(func=cmd_theorem1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    log.debug("backend %s", BACKEND)
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"evolvim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"evolvim: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
