"""Experiment harness: strategy comparisons, unimodality scans, cost-benefit
sweeps, and randomized monotonicity checks, all driven by plain-text spec
files and emitting deterministic CSV.

Spec file format: one ``key = value`` pair per line, '#' comments, blank
lines ignored. ``graph`` may repeat; grid keys (alpha, beta, delta, gamma,
T, B) take whitespace-separated lists. See the repository README for the
full schema. Graph sources are strings of the form ``ws:n=50,k=4,p=0.2,seed=11``,
``ba:n=50,m=2,seed=7``, ``fixture:org49``, or ``file:path/to.edges``.
"""

from __future__ import annotations

import csv
import importlib.resources
import itertools
import os
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import ScsParams, default_step, expected_loss, integrate, loss_and_excursion
from .graph import Graph, degree_weights, generate_scale_free, generate_small_world, load_edge_list, read_edge_list
from .optimizer import (
    FINAL_STEP,
    SEARCH_STEP,
    RaModel,
    assess_risk,
    random_simplex_point,
    simplex_lattice,
)
from .strategy import heuristic_strategies

__all__ = [
    "ExperimentSpec",
    "SpecError",
    "parse_experiment_spec",
    "load_experiment_spec",
    "resolve_graph",
    "run_compare",
    "run_unimodality_scan",
    "run_cost_benefit_sweep",
    "run_theorem_checks",
    "TheoremCheckReport",
    "write_csv_atomic",
    "experiment_file",
]

STRATEGY_NAMES = ("HC", "HS", "LS", "SF", "SL", "UN")

# Relative tolerance for treating lattice losses as tied when counting maxima;
# symmetric models produce exact mathematical ties that land within roundoff.
_TIE_RTOL = 1e-9


class SpecError(ValueError):
    """Malformed or invalid experiment spec."""


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: graphs x parameter grid x strategies, plus run knobs."""

    name: str
    graphs: tuple[str, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    delta: tuple[float, ...]
    gamma: tuple[float, ...]
    horizon: tuple[float, ...]
    budget: tuple[float, ...]
    strategies: tuple[str, ...] = STRATEGY_NAMES
    restarts: int = 3
    seed: int = 0
    output_path: str | None = None
    sweep: str | None = None          # "B" or "T"; required by the sweep runner
    resolution: float | None = None   # lattice spacing override for scans
    eps_min: float = 1e-6
    search_step: float = SEARCH_STEP
    final_step: float = FINAL_STEP

    def __post_init__(self):
        if not self.graphs:
            raise SpecError("experiment needs at least one graph")
        if not self.strategies:
            raise SpecError("experiment needs at least one strategy")
        for s in self.strategies:
            if s not in STRATEGY_NAMES:
                raise SpecError(f"unknown strategy {s!r}")
        for key in ("alpha", "beta", "delta", "gamma", "horizon", "budget"):
            values = getattr(self, key)
            if len(values) == 0:
                raise SpecError(f"empty parameter grid for {key}")
            if any(not (v > 0.0) for v in values):
                raise SpecError(f"{key} grid values must be positive, got {values}")
        if self.restarts < 1:
            raise SpecError(f"restarts must be >= 1, got {self.restarts}")
        if self.sweep is not None and self.sweep not in ("B", "T"):
            raise SpecError(f"sweep must be 'B' or 'T', got {self.sweep!r}")

    def cells(self):
        """Parameter grid in deterministic order; yields (index, ScsParams, budget)."""
        grid = itertools.product(
            self.alpha, self.beta, self.delta, self.gamma, self.horizon, self.budget
        )
        for idx, (a, b, d, g, t, budget) in enumerate(grid):
            yield idx, ScsParams(alpha=a, beta=b, delta=d, gamma=g, horizon=t), budget


_SPEC_KEYS = {
    "name": str,
    "strategies": "strlist",
    "graph": "graph",
    "alpha": "floatlist",
    "beta": "floatlist",
    "delta": "floatlist",
    "gamma": "floatlist",
    "T": "floatlist",
    "B": "floatlist",
    "restarts": int,
    "seed": int,
    "out": str,
    "sweep": str,
    "resolution": float,
    "eps_min": float,
    "search_step": float,
    "final_step": float,
}


def parse_experiment_spec(text: str) -> ExperimentSpec:
    values: dict = {"graph": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SPEC_KEYS:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        kind = _SPEC_KEYS[key]
        try:
            if kind == "graph":
                values["graph"].append(value)
            elif kind == "floatlist":
                values[key] = tuple(float(v) for v in value.split())
            elif kind == "strlist":
                values[key] = tuple(value.split())
            else:
                values[key] = kind(value)
        except ValueError as exc:
            raise SpecError(f"line {lineno}: bad value for {key}: {exc}")
    try:
        return ExperimentSpec(
            name=values.get("name", "experiment"),
            graphs=tuple(values["graph"]),
            alpha=values.get("alpha", ()),
            beta=values.get("beta", ()),
            delta=values.get("delta", ()),
            gamma=values.get("gamma", ()),
            horizon=values.get("T", ()),
            budget=values.get("B", ()),
            strategies=values.get("strategies", STRATEGY_NAMES),
            restarts=values.get("restarts", 3),
            seed=values.get("seed", 0),
            output_path=values.get("out"),
            sweep=values.get("sweep"),
            resolution=values.get("resolution"),
            eps_min=values.get("eps_min", 1e-6),
            search_step=values.get("search_step", SEARCH_STEP),
            final_step=values.get("final_step", FINAL_STEP),
        )
    except KeyError as exc:
        raise SpecError(f"missing required key {exc}")


def load_experiment_spec(path) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_experiment_spec(fh.read())


def experiment_file(name: str):
    """Path of a packaged experiment spec (e.g. 'exp4a')."""
    return importlib.resources.files("aptrisk") / "experiments" / f"{name}.spec"


def _parse_kv(body: str) -> dict[str, str]:
    out = {}
    for item in body.split(","):
        if not item:
            continue
        key, _, value = item.partition("=")
        if not value:
            raise SpecError(f"bad graph parameter {item!r}")
        out[key.strip()] = value.strip()
    return out


def resolve_graph(source: str) -> Graph:
    """Build or load a graph from a source string (see module docstring)."""
    kind, sep, body = source.partition(":")
    if kind == "ws":
        kv = _parse_kv(body)
        return generate_small_world(
            int(kv["n"]), int(kv["k"]), float(kv["p"]), int(kv.get("seed", 0))
        )
    if kind == "ba":
        kv = _parse_kv(body)
        return generate_scale_free(int(kv["n"]), int(kv["m"]), int(kv.get("seed", 0)))
    if kind == "fixture":
        resource = importlib.resources.files("aptrisk") / "fixtures" / f"{body}.edges"
        return read_edge_list(resource.read_text(encoding="utf-8"))
    if kind == "file":
        return load_edge_list(body)
    if sep == "":  # no prefix: treat as a plain file path
        return load_edge_list(source)
    raise SpecError(f"unknown graph source kind {kind!r}")


def _cell_seed(base: int, graph_idx: int, cell_idx: int) -> int:
    seq = np.random.SeedSequence(entropy=(int(base), int(graph_idx), int(cell_idx)))
    return int(seq.generate_state(1)[0])


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv_atomic(path, fieldnames, rows) -> None:
    """Write rows to a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _fmt(v) for k, v in row.items()})
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


COMPARE_FIELDS = (
    "graph", "alpha", "beta", "delta", "gamma", "T", "B",
    "strategy", "loss", "cost_benefit", "evaluations", "restart_spread", "max_excursion",
)


def run_compare(spec: ExperimentSpec) -> list[dict]:
    """Expected loss of every selected strategy on every (graph, cell).

    The optimized strategy (HC) runs through the multi-restart climb; the
    heuristics are evaluated directly at the same reporting step, so rows in
    one group are directly comparable.
    """
    rows = []
    for g_idx, source in enumerate(spec.graphs):
        g = resolve_graph(source)
        w = degree_weights(g)
        for c_idx, params, budget in spec.cells():
            base = {
                "graph": source,
                "alpha": params.alpha, "beta": params.beta,
                "delta": params.delta, "gamma": params.gamma,
                "T": params.horizon, "B": budget,
            }
            model = RaModel(graph=g, params=params, budget=budget)
            heuristics = heuristic_strategies(w, budget)
            for name in spec.strategies:
                if name == "HC":
                    report = assess_risk(
                        model,
                        restarts=spec.restarts,
                        seed=_cell_seed(spec.seed, g_idx, c_idx),
                        eps_min=spec.eps_min,
                        search_step=spec.search_step,
                        final_step=spec.final_step,
                    )
                    spread = max(report.restart_losses) - min(report.restart_losses)
                    rows.append(base | {
                        "strategy": "HC",
                        "loss": report.loss,
                        "cost_benefit": report.cost_benefit,
                        "evaluations": report.evaluations,
                        "restart_spread": spread,
                        "max_excursion": report.max_excursion,
                    })
                else:
                    loss, excursion = loss_and_excursion(
                        g, w, params, heuristics[name], step=min(spec.final_step, params.horizon)
                    )
                    rows.append(base | {
                        "strategy": name,
                        "loss": loss,
                        "cost_benefit": loss / (budget * params.horizon),
                        "evaluations": 1,
                        "restart_spread": 0.0,
                        "max_excursion": excursion,
                    })
    if spec.output_path:
        write_csv_atomic(spec.output_path, COMPARE_FIELDS, rows)
    return rows


# ---------------------------------------------------------------------------
# unimodality scans
# ---------------------------------------------------------------------------

_TRI_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def _count_maxima_1d(losses: np.ndarray) -> int:
    tol = _TIE_RTOL * max(1.0, float(np.max(np.abs(losses))))
    p = len(losses)
    candidate = np.ones(p, dtype=bool)
    for i in range(p):
        if i > 0 and losses[i] < losses[i - 1] - tol:
            candidate[i] = False
        if i < p - 1 and losses[i] < losses[i + 1] - tol:
            candidate[i] = False
    # plateaus of tied near-maximal points count once
    count = 0
    prev = False
    for flag in candidate:
        if flag and not prev:
            count += 1
        prev = flag
    return count


def _count_maxima_tri(points: dict[tuple[int, int], int], losses: np.ndarray) -> int:
    tol = _TIE_RTOL * max(1.0, float(np.max(np.abs(losses))))
    candidates = set()
    for (k1, k2), idx in points.items():
        best = True
        for d1, d2 in _TRI_MOVES:
            j = points.get((k1 + d1, k2 + d2))
            if j is not None and losses[idx] < losses[j] - tol:
                best = False
                break
        if best:
            candidates.add((k1, k2))
    count = 0
    remaining = set(candidates)
    while remaining:
        count += 1
        stack = [remaining.pop()]
        while stack:
            k1, k2 = stack.pop()
            for d1, d2 in _TRI_MOVES:
                nb = (k1 + d1, k2 + d2)
                if nb in remaining:
                    remaining.remove(nb)
                    stack.append(nb)
    return count


def _scan_divisions(spec: ExperimentSpec, n: int, budget: float) -> int:
    if spec.resolution is not None:
        return max(1, round(budget / spec.resolution))
    return 200 if n == 2 else 100


def run_unimodality_scan(spec: ExperimentSpec):
    """Evaluate the reduced objective on a dense simplex lattice.

    2 nodes scan the 1-D reduced interval; 3 nodes the 2-D reduced triangle;
    4 nodes scan three 2-D cross-sections through the hill-climb optimum (one
    per reduced coordinate held fixed). Returns (summary_rows, lattice_rows);
    each summary row carries the count of lattice-local maxima, where tied
    plateaus of near-equal losses count as one maximum.
    """
    summary = []
    lattice_rows = []
    for g_idx, source in enumerate(spec.graphs):
        g = resolve_graph(source)
        n = g.node_count
        if n > 4:
            raise SpecError(f"unimodality scan needs <= 4 nodes, {source} has {n}")
        w = degree_weights(g)
        for c_idx, params, budget in spec.cells():
            base = {
                "graph": source,
                "alpha": params.alpha, "beta": params.beta,
                "delta": params.delta, "gamma": params.gamma,
                "T": params.horizon, "B": budget,
            }
            divisions = _scan_divisions(spec, n, budget)
            spacing = budget / divisions
            step = min(default_step(params.horizon), params.horizon)
            model = RaModel(graph=g, params=params, budget=budget)

            def eval_points(points):
                losses, excursion = _scan_losses(model, w, points, step)
                return losses, excursion

            if n == 2:
                ks = np.arange(divisions + 1)
                points = np.column_stack([ks, divisions - ks]).astype(float) * spacing
                losses, excursion = eval_points(points)
                maxima = _count_maxima_1d(losses)
                _emit_lattice(lattice_rows, base, "", points, losses)
                summary.append(base | {
                    "section": "", "points": len(points),
                    "local_maxima": maxima, "max_excursion": excursion,
                })
            elif n == 3:
                counts = simplex_lattice(3, divisions)
                points = counts.astype(float) * spacing
                losses, excursion = eval_points(points)
                index = {(int(k1), int(k2)): i for i, (k1, k2, _) in enumerate(counts)}
                maxima = _count_maxima_tri(index, losses)
                _emit_lattice(lattice_rows, base, "", points, losses)
                summary.append(base | {
                    "section": "", "points": len(points),
                    "local_maxima": maxima, "max_excursion": excursion,
                })
            else:
                report = assess_risk(
                    model,
                    restarts=spec.restarts,
                    seed=_cell_seed(spec.seed, g_idx, c_idx),
                    eps_min=spec.eps_min,
                    search_step=spec.search_step,
                    final_step=spec.final_step,
                )
                center = report.strategy.x
                for fixed in range(3):
                    k_fixed = int(round(center[fixed] / spacing))
                    k_fixed = min(max(k_fixed, 0), divisions)
                    free = [r for r in range(3) if r != fixed]
                    rem = divisions - k_fixed
                    pts = []
                    index = {}
                    for k1 in range(rem + 1):
                        for k2 in range(rem - k1 + 1):
                            vec = np.zeros(4)
                            vec[fixed] = k_fixed * spacing
                            vec[free[0]] = k1 * spacing
                            vec[free[1]] = k2 * spacing
                            vec[3] = budget - vec[0] - vec[1] - vec[2]
                            index[(k1, k2)] = len(pts)
                            pts.append(vec)
                    points = np.asarray(pts)
                    losses, excursion = eval_points(points)
                    maxima = _count_maxima_tri(index, losses)
                    section = f"x{fixed + 1}={k_fixed * spacing!r}"
                    _emit_lattice(lattice_rows, base, section, points, losses)
                    summary.append(base | {
                        "section": section, "points": len(points),
                        "local_maxima": maxima, "max_excursion": excursion,
                    })
    if spec.output_path:
        fields = ("graph", "alpha", "beta", "delta", "gamma", "T", "B",
                  "section", "x1", "x2", "x3", "x4", "loss")
        write_csv_atomic(spec.output_path, fields, lattice_rows)
    return summary, lattice_rows


def _scan_losses(model: RaModel, w, points, step):
    from ._kernels import loss_batch

    p = model.params
    losses, excursion = loss_batch(
        model.graph, w, p.alpha, p.beta, p.delta, p.gamma,
        points, model.start_state(), p.horizon, step,
    )
    return losses, excursion


def _emit_lattice(rows, base, section, points, losses):
    n = points.shape[1]
    for vec, loss in zip(points, losses):
        row = base | {"section": section, "loss": float(loss)}
        for i in range(4):
            row[f"x{i + 1}"] = float(vec[i]) if i < n else ""
        rows.append(row)


# ---------------------------------------------------------------------------
# cost-benefit sweeps
# ---------------------------------------------------------------------------

SWEEP_FIELDS = (
    "graph", "alpha", "beta", "delta", "gamma", "T", "B",
    "loss", "cost_benefit", "evaluations", "restart_spread", "max_excursion",
)


def run_cost_benefit_sweep(spec: ExperimentSpec) -> list[dict]:
    """Optimized cost benefit loss/(B*T) along a declared sweep axis.

    Exactly one of B or T must be declared as the sweep axis via ``sweep``;
    the other parameter's grid values act as slices. Rows are ordered with
    the swept variable innermost (ascending within each slice).
    """
    if spec.sweep not in ("B", "T"):
        raise SpecError("cost-benefit sweep requires sweep = B or sweep = T")
    swept = spec.budget if spec.sweep == "B" else spec.horizon
    if sorted(swept) != list(swept):
        raise SpecError(f"sweep axis values must be ascending, got {swept}")
    rows = []
    for g_idx, source in enumerate(spec.graphs):
        g = resolve_graph(source)
        graph_rows = []
        for c_idx, params, budget in spec.cells():
            model = RaModel(graph=g, params=params, budget=budget)
            report = assess_risk(
                model,
                restarts=spec.restarts,
                seed=_cell_seed(spec.seed, g_idx, c_idx),
                eps_min=spec.eps_min,
                search_step=spec.search_step,
                final_step=spec.final_step,
            )
            graph_rows.append({
                "graph": source,
                "alpha": params.alpha, "beta": params.beta,
                "delta": params.delta, "gamma": params.gamma,
                "T": params.horizon, "B": budget,
                "loss": report.loss,
                "cost_benefit": report.cost_benefit,
                "evaluations": report.evaluations,
                "restart_spread": max(report.restart_losses) - min(report.restart_losses),
                "max_excursion": report.max_excursion,
            })
        slice_key = "T" if spec.sweep == "B" else "B"
        graph_rows.sort(
            key=lambda r: (r["alpha"], r["beta"], r["delta"], r["gamma"],
                           r[slice_key], r[spec.sweep])
        )
        rows.extend(graph_rows)
    if spec.output_path:
        write_csv_atomic(spec.output_path, SWEEP_FIELDS, rows)
    return rows


# ---------------------------------------------------------------------------
# randomized monotonicity checks
# ---------------------------------------------------------------------------


@dataclass
class TheoremCheckReport:
    trials: int
    seed: int
    checks: dict[str, int] = field(default_factory=dict)       # passed counts
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        lines = [f"monotonicity checks: {self.trials} trials per property, seed {self.seed}"]
        for name in sorted(self.checks):
            bad = sum(1 for v in self.violations if v["property"] == name)
            status = "ok" if bad == 0 else f"{bad} VIOLATIONS"
            lines.append(f"  {name}: {self.checks[name]} checked, {status}")
        for v in self.violations:
            lines.append(f"  VIOLATION {v}")
        return "\n".join(lines)


def _random_connected_graph(rng: np.random.Generator, n: int) -> Graph:
    # random attachment tree plus a few extra edges keeps it connected
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    extras = int(rng.integers(0, n))
    for _ in range(extras):
        a = int(rng.integers(0, n))
        b = int(rng.integers(0, n))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(n, edges)


def _random_model(rng: np.random.Generator):
    n = int(rng.integers(3, 11))
    g = _random_connected_graph(rng, n)
    lo, hi = np.log(0.25), np.log(2.0)
    coef = np.exp(rng.uniform(lo, hi, size=4))
    params = ScsParams(
        alpha=float(coef[0]), beta=float(coef[1]),
        delta=float(coef[2]), gamma=float(coef[3]),
        horizon=float(rng.uniform(2.0, 10.0)),
    )
    budget = float(rng.uniform(1.0, 10.0))
    x = random_simplex_point(n, budget, rng)
    c0 = rng.uniform(0.0, 0.5, size=n)
    return g, params, budget, x, c0


def run_theorem_checks(seed: int = 0, trials: int = 50) -> TheoremCheckReport:
    """Randomized checks of the four monotonicity properties of the risk.

    Fixed-strategy checks (same strategy, parameters, security levels, and
    start state on both sides):
      edge-monotonicity     adding an edge never lowers any C_i(t) or the loss
      coefficient-monotonicity   loss rises in attack/infection coefficients,
                                 falls in prevention/response coefficients
      horizon-monotonicity  loss is nondecreasing in the campaign length
    Optimizer-level check:
      budget-monotonicity   assessed risk is nondecreasing in the budget
                            (0.1% relative slack absorbs optimizer variance)

    These properties hold exactly for the continuous dynamics, so any
    violation beyond integration tolerance indicates an implementation bug.
    Violations are report content, not errors.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    report = TheoremCheckReport(trials=trials, seed=seed)
    tol = 1e-9

    def record(name, trial, ok, detail):
        report.checks[name] = report.checks.get(name, 0) + 1
        if not ok:
            report.violations.append({"property": name, "trial": trial, "detail": detail})

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 1, trial)))
        g, params, budget, x, c0 = _random_model(rng)
        n = g.node_count
        w = degree_weights(g)  # held fixed so only the topology changes
        non_edges = [
            (a, b) for a in range(n) for b in range(a + 1, n) if not g.has_edge(a, b)
        ]
        if not non_edges:
            continue
        a, b = non_edges[int(rng.integers(0, len(non_edges)))]
        g2 = g.with_edge(a, b)
        t1 = integrate(g, w, params, x, c0=c0)
        t2 = integrate(g2, w, params, x, c0=c0)
        state_ok = bool(np.all(t1.states <= t2.states + tol))
        loss_ok = t1.loss_integral <= t2.loss_integral + tol
        record(
            "edge-monotonicity", trial, state_ok and loss_ok,
            f"n={n} edge=({a},{b}) loss {t1.loss_integral!r} vs {t2.loss_integral!r}",
        )

    factor = 1.25
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 2, trial)))
        g, params, budget, x, c0 = _random_model(rng)
        w = degree_weights(g)
        base_loss = expected_loss(g, w, params, x, c0=c0)
        for coef, rises in (("alpha", True), ("beta", True), ("delta", False), ("gamma", False)):
            bumped = replace(params, **{coef: getattr(params, coef) * factor})
            bumped_loss = expected_loss(g, w, bumped, x, c0=c0)
            ok = (bumped_loss >= base_loss - tol) if rises else (bumped_loss <= base_loss + tol)
            record(
                "coefficient-monotonicity", trial, ok,
                f"{coef} x{factor}: loss {base_loss!r} -> {bumped_loss!r}",
            )

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 3, trial)))
        g, params, budget, x, c0 = _random_model(rng)
        w = degree_weights(g)
        longer = replace(params, horizon=params.horizon * 1.5)
        loss_short = expected_loss(g, w, params, x, c0=c0)
        loss_long = expected_loss(g, w, longer, x, c0=c0)
        record(
            "horizon-monotonicity", trial, loss_long >= loss_short - tol,
            f"T {params.horizon!r} -> {longer.horizon!r}: loss {loss_short!r} -> {loss_long!r}",
        )

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 4, trial)))
        g, params, budget, x, c0 = _random_model(rng)
        m1 = RaModel(graph=g, params=params, budget=budget, c0=c0)
        m2 = RaModel(graph=g, params=params, budget=budget * 1.5, c0=c0)
        r1 = assess_risk(m1, restarts=1, seed=trial, eps_min=1e-4)
        r2 = assess_risk(m2, restarts=1, seed=trial, eps_min=1e-4)
        record(
            "budget-monotonicity", trial, r2.loss >= r1.loss * (1.0 - 1e-3),
            f"B {budget!r} -> {budget * 1.5!r}: risk {r1.loss!r} -> {r2.loss!r}",
        )

    return report
