"""Risk assessment: maximize expected loss over the budget simplex.

The optimizer is a derivative-free steepest-ascent hill climb over the
eps-move neighborhood, with eps annealed geometrically from budget/16 down to
``eps_min`` (default 1e-6). A single fixed tiny eps from a random start would
need on the order of B/eps accepted moves; the annealed schedule reaches the
same termination condition -- no eps_min-neighbor improves the loss by more
than the improvement tolerance -- at practical cost. Neighbor losses are
evaluated with a coarse integration step during the search and the final
reported loss is refined with a fine step; both knobs are exposed.

A brute-force simplex-lattice oracle is provided for small networks so the
climb can be validated against exhaustive search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._kernels import loss_batch
from .dynamics import ScsParams
from .graph import Graph, SecurityLevels, degree_weights
from .strategy import AttackStrategy, neighbor_moves

__all__ = [
    "RaModel",
    "RiskReport",
    "hill_climb",
    "grid_oracle",
    "assess_risk",
    "simplex_lattice",
    "IMPROVEMENT_TOL",
    "SEARCH_STEP",
    "FINAL_STEP",
]

# Minimum loss gain to accept a move; below this is integration noise.
IMPROVEMENT_TOL = 1e-12

# Default integration steps: coarse while searching, fine for reported losses.
SEARCH_STEP = 0.02
FINAL_STEP = 0.005


@dataclass(frozen=True)
class RaModel:
    """One risk-assessment instance: network, coefficients, budget, start state.

    ``weights`` defaults to the degree-derived security levels of the graph;
    passing them explicitly allows comparing topologies at fixed levels.
    """

    graph: Graph
    params: ScsParams
    budget: float
    c0: np.ndarray | None = None
    weights: SecurityLevels | None = None

    def __post_init__(self):
        if not (self.budget > 0.0 and np.isfinite(self.budget)):
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.c0 is not None:
            c0 = np.asarray(self.c0, dtype=float)
            if c0.shape != (self.graph.node_count,):
                raise ValueError(
                    f"c0 has shape {c0.shape}, expected ({self.graph.node_count},)"
                )
            if c0.min() < 0.0 or c0.max() > 1.0:
                raise ValueError("c0 entries must lie in [0, 1]")
            object.__setattr__(self, "c0", c0)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.graph.node_count,) or w.min() <= 0.0:
                raise ValueError("weights must be positive, one per node")
            object.__setattr__(self, "weights", w)

    def security_levels(self) -> SecurityLevels:
        return self.weights if self.weights is not None else degree_weights(self.graph)

    def start_state(self) -> np.ndarray:
        return self.c0 if self.c0 is not None else np.zeros(self.graph.node_count)

    def fingerprint(self) -> str:
        p = self.params
        return (
            f"{self.graph.fingerprint()}:a={p.alpha!r},b={p.beta!r},d={p.delta!r},"
            f"g={p.gamma!r},T={p.horizon!r},B={self.budget!r}"
        )


@dataclass
class RiskReport:
    """Outcome of one risk assessment run."""

    strategy: AttackStrategy
    loss: float
    cost_benefit: float                   # loss / (budget * horizon)
    evaluations: int
    epsilon_trace: list[tuple[float, float]]  # (eps level, best loss at that level)
    seed: int
    fingerprint: str
    max_excursion: float = 0.0
    restart_losses: list[float] | None = None
    accepted: list[tuple[float, np.ndarray]] | None = None

    def to_json(self) -> str:
        record = {
            "strategy": [float(v) for v in self.strategy.x],
            "loss": self.loss,
            "cost_benefit": self.cost_benefit,
            "evaluations": self.evaluations,
            "epsilon_trace": [[e, l] for e, l in self.epsilon_trace],
            "seed": int(self.seed),
            "model": self.fingerprint,
        }
        if self.restart_losses is not None:
            record["restart_losses"] = self.restart_losses
        return json.dumps(record, indent=2)


def random_simplex_point(n: int, budget: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample from the budget simplex via exponential spacings."""
    e = rng.exponential(size=n)
    return budget * e / e.sum()


def _batch_losses(m: RaModel, w, x_matrix, step):
    p = m.params
    return loss_batch(
        m.graph, w, p.alpha, p.beta, p.delta, p.gamma,
        x_matrix, m.start_state(), p.horizon, step,
    )


def hill_climb(
    m: RaModel,
    eps_min: float = 1e-6,
    seed: int = 0,
    search_step: float = SEARCH_STEP,
    final_step: float = FINAL_STEP,
    track_accepted: bool = False,
) -> RiskReport:
    """Steepest-ascent hill climb with annealed neighborhood size.

    Starts from a seeded uniform-random point of the budget simplex. At each
    eps level, all eps-neighbors are evaluated and the best improving one is
    taken, repeating until none improves by more than the tolerance; eps then
    halves, ending with a full pass at exactly ``eps_min``. Deterministic for
    a fixed seed: neighbors are enumerated in (donor, recipient) order and
    ties break to the earliest.
    """
    if not 0.0 < eps_min <= m.budget:
        raise ValueError(f"eps_min must be in (0, budget], got {eps_min}")
    n = m.graph.node_count
    w = m.security_levels()
    h_search = min(search_step, m.params.horizon)
    h_final = min(final_step, m.params.horizon)
    rng = np.random.default_rng(seed)
    x = random_simplex_point(n, m.budget, rng)

    losses, excursion = _batch_losses(m, w, x[None, :], h_search)
    current = float(losses[0])
    evaluations = 1
    max_excursion = excursion
    trace: list[tuple[float, float]] = []
    accepted: list[tuple[float, np.ndarray]] = []

    eps = max(m.budget / 16.0, eps_min)
    while True:
        while True:
            don, rec = neighbor_moves(x, eps)
            if don.size == 0:
                break
            candidates = np.repeat(x[None, :], don.size, axis=0)
            cols = np.arange(don.size)
            candidates[cols, don] -= eps
            candidates[cols, rec] += eps
            losses, excursion = _batch_losses(m, w, candidates, h_search)
            evaluations += don.size
            max_excursion = max(max_excursion, excursion)
            best = int(np.argmax(losses))
            if losses[best] <= current + IMPROVEMENT_TOL:
                break
            x = candidates[best]
            current = float(losses[best])
            if track_accepted:
                accepted.append((current, x.copy()))
        trace.append((eps, current))
        if eps == eps_min:
            break
        eps = max(eps / 2.0, eps_min)

    final = AttackStrategy(x, m.budget)
    losses, excursion = _batch_losses(m, w, final.x[None, :], h_final)
    evaluations += 1
    max_excursion = max(max_excursion, excursion)
    loss = float(losses[0])
    return RiskReport(
        strategy=final,
        loss=loss,
        cost_benefit=loss / (m.budget * m.params.horizon),
        evaluations=evaluations,
        epsilon_trace=trace,
        seed=seed,
        fingerprint=m.fingerprint(),
        max_excursion=float(max_excursion),
        accepted=accepted if track_accepted else None,
    )


def assess_risk(
    m: RaModel,
    restarts: int = 1,
    seed: int = 0,
    eps_min: float = 1e-6,
    search_step: float = SEARCH_STEP,
    final_step: float = FINAL_STEP,
) -> RiskReport:
    """Best hill-climb result over independent restarts.

    The spread of final losses across restarts is recorded as a diagnostic:
    a unimodal objective makes restarts land on the same value.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    restart_seeds = [
        int(np.random.SeedSequence(entropy=(int(seed), r)).generate_state(1)[0])
        for r in range(restarts)
    ]
    reports = [
        hill_climb(m, eps_min=eps_min, seed=s, search_step=search_step, final_step=final_step)
        for s in restart_seeds
    ]
    best = max(reports, key=lambda r: r.loss)
    best.restart_losses = [r.loss for r in reports]
    best.max_excursion = max(r.max_excursion for r in reports)
    return best


def simplex_lattice(n: int, divisions: int) -> np.ndarray:
    """Integer compositions of ``divisions`` into n parts, shape (P, n).

    Scaled by budget/divisions these are the lattice points of the budget
    simplex. Enumeration order is deterministic (lexicographic in the leading
    coordinates).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if divisions < 1:
        raise ValueError("need divisions >= 1")
    if n == 1:
        return np.array([[divisions]], dtype=np.int64)
    rows = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], divisions, n)
    return np.asarray(rows, dtype=np.int64)


def grid_oracle(
    m: RaModel, resolution: float, step: float = FINAL_STEP
) -> tuple[AttackStrategy, float]:
    """Exhaustive lattice search over the budget simplex (small networks only).

    The lattice has spacing budget/round(budget/resolution); cost grows as
    (budget/resolution)**(N-1), so networks beyond 4 nodes are rejected.
    Returns the best lattice point and its loss, ties resolved to the first
    point in enumeration order.
    """
    n = m.graph.node_count
    if n > 4:
        raise ValueError(f"grid oracle supports at most 4 nodes, got {n}")
    if not 0.0 < resolution <= m.budget:
        raise ValueError(f"resolution must be in (0, budget], got {resolution}")
    divisions = max(1, round(m.budget / resolution))
    counts = simplex_lattice(n, divisions)
    points = counts.astype(float) * (m.budget / divisions)
    w = m.security_levels()
    losses, _ = _batch_losses(m, w, points, min(step, m.params.horizon))
    best = int(np.argmax(losses))
    return AttackStrategy(points[best], m.budget), float(losses[best])
