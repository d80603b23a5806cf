"""Attack strategies on the budget simplex and the five heuristic allocations.

An admissible strategy spends a fixed budget B per unit time across the N
nodes: x_i >= 0, sum_i x_i = B. The local-search neighborhood moves a small
amount eps of budget from one node to another, which keeps every neighbor on
the simplex.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .graph import SecurityLevels

__all__ = [
    "AttackStrategy",
    "BUDGET_RTOL",
    "epsilon_neighbors",
    "neighbor_moves",
    "hs_strategy",
    "ls_strategy",
    "sf_strategy",
    "sl_strategy",
    "un_strategy",
    "heuristic_strategies",
    "write_strategy_csv",
    "read_strategy_csv",
]

# Relative tolerance on |sum(x) - B|; repeated +/-eps moves drift far less.
BUDGET_RTOL = 1e-9


@dataclass(frozen=True)
class AttackStrategy:
    """Per-node attack spend per unit time, constrained to the budget simplex."""

    x: np.ndarray
    budget: float

    def __post_init__(self):
        vec = np.asarray(self.x, dtype=float)
        if vec.ndim != 1 or vec.size < 1:
            raise ValueError("strategy must be a 1-D vector")
        if not (self.budget > 0.0 and np.isfinite(self.budget)):
            raise ValueError(f"budget must be positive, got {self.budget}")
        if vec.min() < 0.0:
            raise ValueError(f"negative allocation at node {int(np.argmin(vec))}")
        total = vec.sum()
        drift = abs(total - self.budget)
        if drift > 1e-6 * self.budget:
            raise ValueError(
                f"allocations sum to {total}, not the budget {self.budget}"
            )
        if drift > 0.5 * BUDGET_RTOL * self.budget:
            vec = vec * (self.budget / total)  # project drift back onto the simplex
        vec = vec.copy()
        vec.setflags(write=False)
        object.__setattr__(self, "x", vec)
        object.__setattr__(self, "budget", float(self.budget))

    def __len__(self) -> int:
        return self.x.size


def neighbor_moves(x: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Donor/recipient index pairs for all eps-moves from x.

    A node j can donate only if x_j >= eps (the move must stay nonnegative).
    Pairs are ordered lexicographically by (donor, recipient); the optimizer
    relies on this order for deterministic tie-breaking.
    """
    n = x.size
    donors = np.nonzero(x >= eps)[0]
    count = donors.size * (n - 1)
    don = np.empty(count, dtype=np.int64)
    rec = np.empty(count, dtype=np.int64)
    pos = 0
    for j in donors:
        for i in range(n):
            if i != j:
                don[pos] = j
                rec[pos] = i
                pos += 1
    return don, rec


def epsilon_neighbors(x: AttackStrategy, eps: float) -> list[AttackStrategy]:
    """All strategies reachable by moving eps of budget between two nodes."""
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    don, rec = neighbor_moves(x.x, eps)
    out = []
    for j, i in zip(don, rec):
        vec = x.x.copy()
        vec[j] -= eps
        vec[i] += eps
        out.append(AttackStrategy(vec, x.budget))
    return out


def _single_node(w: SecurityLevels, budget: float, node: int) -> AttackStrategy:
    vec = np.zeros(len(w))
    vec[node] = budget
    return AttackStrategy(vec, budget)


def hs_strategy(w: SecurityLevels, budget: float) -> AttackStrategy:
    """Entire budget on one node of the highest security level (lowest index on ties)."""
    return _single_node(w, budget, int(np.argmax(w)))


def ls_strategy(w: SecurityLevels, budget: float) -> AttackStrategy:
    """Entire budget on one node of the lowest security level (lowest index on ties)."""
    return _single_node(w, budget, int(np.argmin(w)))


def sf_strategy(w: SecurityLevels, budget: float) -> AttackStrategy:
    """Budget split proportionally to security levels: x_i = B*w_i / sum(w)."""
    w = np.asarray(w, dtype=float)
    return AttackStrategy(budget * w / w.sum(), budget)


def sl_strategy(w: SecurityLevels, budget: float) -> AttackStrategy:
    """Budget split inversely to security levels: x_i = B*(1/w_i) / sum(1/w)."""
    inv = 1.0 / np.asarray(w, dtype=float)
    return AttackStrategy(budget * inv / inv.sum(), budget)


def un_strategy(n: int, budget: float) -> AttackStrategy:
    """Uniform split: x_i = B/N."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    return AttackStrategy(np.full(n, budget / n), budget)


def heuristic_strategies(w: SecurityLevels, budget: float) -> dict[str, AttackStrategy]:
    """The five named heuristics keyed by their short labels."""
    return {
        "HS": hs_strategy(w, budget),
        "LS": ls_strategy(w, budget),
        "SF": sf_strategy(w, budget),
        "SL": sl_strategy(w, budget),
        "UN": un_strategy(len(w), budget),
    }


def write_strategy_csv(s: AttackStrategy) -> str:
    """One header line recording the budget, then N full-precision values."""
    buf = io.StringIO()
    buf.write(f"# budget={s.budget!r}\n")
    buf.write(",".join(repr(float(v)) for v in s.x) + "\n")
    return buf.getvalue()


def read_strategy_csv(text: str) -> AttackStrategy:
    budget = None
    values = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("budget="):
                budget = float(body[len("budget="):])
            continue
        values = np.array([float(v) for v in line.split(",")])
    if budget is None or values is None:
        raise ValueError("strategy CSV needs a '# budget=...' header and a value line")
    return AttackStrategy(values, budget)
