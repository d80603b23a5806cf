"""Command-line interface.

Subcommands:
  generate        build a synthetic network and write it as an edge list
  simulate        integrate one attack strategy and write the trajectory CSV
  loss            print the expected loss of one strategy
  assess          hill-climb one model and emit a JSON risk report
  compare         optimized strategy vs heuristics over a spec-file grid
  scan            unimodality lattice scan over a spec-file grid
  sweep           optimized cost benefit along a budget or horizon sweep
  check-theorems  randomized monotonicity checks (exit 3 on violation)
  bench           compare the numba and numpy integration backends

Exit codes: 0 success, 1 usage error, 2 model/integration error,
3 monotonicity violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import _kernels
from .dynamics import IntegrationError, ScsParams, expected_loss, integrate
from .graph import GraphError, degree_weights, save_edge_list
from .harness import (
    SpecError,
    load_experiment_spec,
    resolve_graph,
    run_compare,
    run_cost_benefit_sweep,
    run_theorem_checks,
    run_unimodality_scan,
)
from .optimizer import FINAL_STEP, SEARCH_STEP, RaModel, assess_risk, random_simplex_point
from .strategy import AttackStrategy, heuristic_strategies, read_strategy_csv


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--graph", required=True, help="graph source (ws:..., ba:..., fixture:NAME, file:PATH)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--T", type=float, default=10.0, dest="horizon")
    p.add_argument("--c0", type=float, default=0.0,
                   help="initial compromise probability applied to every node")


def _params(args) -> ScsParams:
    return ScsParams(alpha=args.alpha, beta=args.beta, delta=args.delta,
                     gamma=args.gamma, horizon=args.horizon)


def _strategy(args, w, budget) -> AttackStrategy:
    name = args.strategy
    if name.startswith("file:"):
        with open(name[len("file:"):], "r", encoding="utf-8") as fh:
            return read_strategy_csv(fh.read())
    table = heuristic_strategies(w, budget)
    key = name.upper()
    if key not in table:
        raise SpecError(f"unknown strategy {name!r}; use HS, LS, SF, SL, UN, or file:PATH")
    return table[key]


def _write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aptrisk", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a graph to an edge-list file")
    p.add_argument("--graph", required=True, help="generator spec, e.g. ws:n=50,k=4,p=0.2,seed=1")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="integrate one strategy, write trajectory CSV")
    _add_model_flags(p)
    p.add_argument("--strategy", default="UN", help="HS|LS|SF|SL|UN or file:PATH")
    p.add_argument("--B", type=float, default=10.0, dest="budget")
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("loss", help="expected loss of one strategy")
    _add_model_flags(p)
    p.add_argument("--strategy", default="UN")
    p.add_argument("--B", type=float, default=10.0, dest="budget")
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--out", default=None, help="optional JSON output path")

    p = sub.add_parser("assess", help="hill-climb one model, emit JSON risk report")
    _add_model_flags(p)
    p.add_argument("--B", type=float, default=10.0, dest="budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--eps-min", type=float, default=1e-6)
    p.add_argument("--search-step", type=float, default=SEARCH_STEP)
    p.add_argument("--final-step", type=float, default=FINAL_STEP)
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")

    for name, help_text in (
        ("compare", "optimized strategy vs heuristics on a grid"),
        ("scan", "unimodality lattice scan"),
        ("sweep", "cost benefit along a budget/horizon sweep"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True, help="experiment spec file")
        p.add_argument("--out", default=None, help="override the spec's output path")

    p = sub.add_parser("check-theorems", help="randomized monotonicity checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--out", default=None, help="optional JSON output path")

    p = sub.add_parser("bench", help="compare integration backends")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--batch", type=int, default=512)
    p.add_argument("--T", type=float, default=5.0, dest="horizon")
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--repeat", type=int, default=3)
    return parser


def _cmd_generate(args) -> int:
    g = resolve_graph(args.graph)
    save_edge_list(g, args.out)
    print(f"wrote {args.out}: {g.node_count} nodes, {g.edge_count} edges")
    return 0


def _cmd_simulate(args) -> int:
    g = resolve_graph(args.graph)
    w = degree_weights(g)
    params = _params(args)
    strat = _strategy(args, w, args.budget)
    c0 = np.full(g.node_count, args.c0)
    traj = integrate(g, w, params, strat, c0=c0, step=args.step,
                     record_every=args.record_every)
    _write_text_atomic(args.out, traj.to_csv())
    print(f"wrote {args.out}: {len(traj.times)} points, "
          f"loss_integral={traj.loss_integral!r}, max_excursion={traj.max_excursion:.3e}")
    return 0


def _cmd_loss(args) -> int:
    g = resolve_graph(args.graph)
    w = degree_weights(g)
    params = _params(args)
    strat = _strategy(args, w, args.budget)
    c0 = np.full(g.node_count, args.c0)
    value = expected_loss(g, w, params, strat, c0=c0, step=args.step)
    print(repr(value))
    if args.out:
        _write_text_atomic(args.out, json.dumps({"loss": value}, indent=2) + "\n")
    return 0


def _cmd_assess(args) -> int:
    g = resolve_graph(args.graph)
    params = _params(args)
    model = RaModel(graph=g, params=params, budget=args.budget,
                    c0=np.full(g.node_count, args.c0))
    report = assess_risk(model, restarts=args.restarts, seed=args.seed,
                         eps_min=args.eps_min, search_step=args.search_step,
                         final_step=args.final_step)
    text = report.to_json() + "\n"
    if args.out:
        _write_text_atomic(args.out, text)
        print(f"wrote {args.out}: loss={report.loss!r}")
    else:
        sys.stdout.write(text)
    return 0


def _run_spec(args, runner) -> int:
    spec = load_experiment_spec(args.spec)
    if args.out:
        from dataclasses import replace
        spec = replace(spec, output_path=args.out)
    if not spec.output_path:
        raise SpecError("no output path: set 'out =' in the spec or pass --out")
    runner(spec)
    print(f"wrote {spec.output_path}")
    return 0


def _cmd_scan(args) -> int:
    spec = load_experiment_spec(args.spec)
    if args.out:
        from dataclasses import replace
        spec = replace(spec, output_path=args.out)
    if not spec.output_path:
        raise SpecError("no output path: set 'out =' in the spec or pass --out")
    summary, _ = run_unimodality_scan(spec)
    for row in summary:
        label = f" section {row['section']}" if row["section"] else ""
        print(f"{row['graph']}{label}: delta={row['delta']} alpha={row['alpha']} "
              f"-> {row['local_maxima']} local maximum(s) over {row['points']} points")
    print(f"wrote {spec.output_path}")
    return 0


def _cmd_check_theorems(args) -> int:
    report = run_theorem_checks(seed=args.seed, trials=args.trials)
    print(report.to_text())
    if args.out:
        payload = {
            "trials": report.trials,
            "seed": report.seed,
            "checks": report.checks,
            "violations": report.violations,
        }
        _write_text_atomic(args.out, json.dumps(payload, indent=2) + "\n")
    return 0 if report.passed else 3


def _cmd_bench(args) -> int:
    g = resolve_graph(f"ws:n={args.n},k=4,p=0.2,seed=11")
    w = degree_weights(g)
    rng = np.random.default_rng(0)
    batch = np.vstack([random_simplex_point(g.node_count, 10.0, rng)
                       for _ in range(args.batch)])
    c0 = np.zeros(g.node_count)
    backends = ["numpy"]
    if _kernels.NUMBA_AVAILABLE:
        backends.insert(0, "numba")
    results = {}
    print(f"model: n={args.n} T={args.horizon} step={args.step} batch={args.batch}")
    for backend in backends:
        previous = _kernels.set_backend(backend)
        try:
            # warm-up also triggers JIT compilation for the numba backend
            losses, _ = _kernels.loss_batch(g, w, 1.0, 1.0, 1.0, 1.0,
                                            batch, c0, args.horizon, args.step)
            best_batch = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                losses, _ = _kernels.loss_batch(g, w, 1.0, 1.0, 1.0, 1.0,
                                                batch, c0, args.horizon, args.step)
                best_batch = min(best_batch, time.perf_counter() - t0)
            single = batch[:1]
            _kernels.loss_batch(g, w, 1.0, 1.0, 1.0, 1.0, single, c0, args.horizon, args.step)
            reps = max(1, args.repeat * 10)
            t0 = time.perf_counter()
            for _ in range(reps):
                _kernels.loss_batch(g, w, 1.0, 1.0, 1.0, 1.0, single, c0,
                                    args.horizon, args.step)
            single_dt = (time.perf_counter() - t0) / reps
            results[backend] = losses
            print(f"  {backend:>6}: batch {best_batch * 1e3:8.1f} ms "
                  f"({best_batch / args.batch * 1e6:7.1f} us/eval), "
                  f"single {single_dt * 1e6:7.1f} us")
        finally:
            _kernels.set_backend(previous)
    if len(results) == 2:
        gap = float(np.max(np.abs(results["numba"] - results["numpy"])))
        print(f"  max |loss difference| between backends: {gap:.3e}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "simulate": _cmd_simulate,
    "loss": _cmd_loss,
    "assess": _cmd_assess,
    "compare": lambda args: _run_spec(args, run_compare),
    "scan": _cmd_scan,
    "sweep": lambda args: _run_spec(args, run_cost_benefit_sweep),
    "check-theorems": _cmd_check_theorems,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SpecError, GraphError, FileNotFoundError) as exc:
        print(f"aptrisk: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, ValueError) as exc:
        print(f"aptrisk: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
