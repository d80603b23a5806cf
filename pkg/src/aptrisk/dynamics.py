"""Compromise dynamics on the organization network and the expected-loss functional.

Each node carries a probability C_i(t) of being under attacker control. A
secure node is compromised by direct attack spend x_i and by infection from
compromised neighbors, both damped by the prevention investment delta*w_i; a
compromised node is recovered at the response rate gamma*w_i:

    dC_i/dt = (alpha*x_i + beta * sum_j a_ij * C_j) * (1 - C_i) / (delta*w_i)
              - gamma*w_i * C_i

The expected loss of a campaign of length T is the time integral of the
security-weighted compromise mass, integral_0^T sum_i w_i C_i(t) dt. The loss
is integrated as an extra state of the same RK4 march, so its accuracy tracks
the state accuracy with a single step-size knob.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from ._kernels import IntegrationError, loss_batch, simulate
from .graph import Graph, SecurityLevels

__all__ = [
    "ScsParams",
    "Trajectory",
    "IntegrationError",
    "scs_derivative",
    "integrate",
    "expected_loss",
    "loss_and_excursion",
    "default_step",
]

# Excursions above this are an integrator alarm, not rounding noise.
EXCURSION_ALARM = 1e-9

# Cap on stored points when trajectory storage is decimated.
_MAX_STORED = 2000


@dataclass(frozen=True)
class ScsParams:
    """Model coefficients: attack, infection, prevention, response, and horizon."""

    alpha: float
    beta: float
    delta: float
    gamma: float
    horizon: float

    def __post_init__(self):
        for name in ("alpha", "beta", "delta", "gamma", "horizon"):
            value = getattr(self, name)
            if not (value > 0.0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value}")


@dataclass(frozen=True)
class Trajectory:
    """Stored integration output: times from 0 to T, states, and running loss."""

    times: np.ndarray         # strictly increasing, times[0] = 0, times[-1] = T
    states: np.ndarray        # one row per stored time, clamped to [0, 1]
    loss_running: np.ndarray  # loss integral up to each stored time
    loss_integral: float      # loss integral at T
    max_excursion: float      # worst unclamped per-step excursion outside [0, 1]
    step: float

    def to_csv(self) -> str:
        """Render as CSV: header ``t,C_1,...,C_N,loss_integral``, full precision."""
        n = self.states.shape[1]
        buf = io.StringIO()
        buf.write("t," + ",".join(f"C_{i + 1}" for i in range(n)) + ",loss_integral\n")
        for row in range(len(self.times)):
            cells = [repr(float(self.times[row]))]
            cells.extend(repr(float(v)) for v in self.states[row])
            cells.append(repr(float(self.loss_running[row])))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def default_step(horizon: float) -> float:
    """Default integration step: h = min(0.01, T/1000).

    The stiffest recovery rate in the shipped experiments is on the order of
    tens per time unit, which keeps classical RK4 comfortably stable at 0.01.
    """
    return min(0.01, horizon / 1000.0)


def _strategy_vector(x, n: int) -> np.ndarray:
    vec = np.asarray(getattr(x, "x", x), dtype=float)
    if vec.shape != (n,):
        raise ValueError(f"strategy has shape {vec.shape}, expected ({n},)")
    return vec


def _check_state(c0, n: int) -> np.ndarray:
    if c0 is None:
        return np.zeros(n)
    vec = np.asarray(c0, dtype=float)
    if vec.shape != (n,):
        raise ValueError(f"initial state has shape {vec.shape}, expected ({n},)")
    if vec.min() < 0.0 or vec.max() > 1.0:
        raise ValueError("initial compromise probabilities must lie in [0, 1]")
    return vec


def scs_derivative(state, g: Graph, w: SecurityLevels, p: ScsParams, x) -> np.ndarray:
    """Reference (non-kernel) evaluation of dC/dt at one state.

    Used directly by tests as an independent check of the integration
    backends and kept deliberately close to the formula.
    """
    c = np.asarray(state, dtype=float)
    xv = _strategy_vector(x, g.node_count)
    infected_pressure = g.neighbor_sums(c)
    return (p.alpha * xv + p.beta * infected_pressure) * (1.0 - c) / (p.delta * w) \
        - p.gamma * w * c


def integrate(
    g: Graph,
    w: SecurityLevels,
    p: ScsParams,
    x,
    c0=None,
    step: float | None = None,
    record_every: int | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the dynamics plus the loss quadrature.

    The final step is shortened so the last stored time is exactly the
    horizon. States are clamped to [0, 1] after each step; the worst
    unclamped excursion is reported on the trajectory (values above
    ~1e-9 indicate the step is too large for the model at hand).

    record_every=1 stores every step; by default storage is decimated to at
    most ~2000 points, which is plenty for plotting and keeps memory flat.
    """
    xv = _strategy_vector(x, g.node_count)
    c0v = _check_state(c0, g.node_count)
    h = default_step(p.horizon) if step is None else float(step)
    if not 0.0 < h <= p.horizon:
        raise ValueError(f"step must be in (0, horizon], got {h}")
    nsteps = max(1, int(np.ceil(p.horizon / h - 1e-9)))
    if record_every is None:
        record_every = max(1, -(-nsteps // _MAX_STORED))
    times, states, loss_running, excursion = simulate(
        g, w, p.alpha, p.beta, p.delta, p.gamma, xv, c0v, p.horizon, h, record_every
    )
    return Trajectory(
        times=times,
        states=states,
        loss_running=loss_running,
        loss_integral=float(loss_running[-1]),
        max_excursion=float(excursion),
        step=h,
    )


def loss_and_excursion(
    g: Graph, w: SecurityLevels, p: ScsParams, x, c0=None, step: float | None = None
) -> tuple[float, float]:
    """Expected loss plus the integrator's worst unclamped excursion."""
    xv = _strategy_vector(x, g.node_count)
    c0v = _check_state(c0, g.node_count)
    h = default_step(p.horizon) if step is None else float(step)
    if not 0.0 < h <= p.horizon:
        raise ValueError(f"step must be in (0, horizon], got {h}")
    losses, excursion = loss_batch(
        g, w, p.alpha, p.beta, p.delta, p.gamma, xv[None, :], c0v, p.horizon, h
    )
    return float(losses[0]), float(excursion)


def expected_loss(
    g: Graph, w: SecurityLevels, p: ScsParams, x, c0=None, step: float | None = None
) -> float:
    """Expected loss L(x) = integral_0^T sum_i w_i C_i(t) dt.

    Bounded by T * sum_i w_i since every C_i stays in [0, 1].
    """
    loss, _ = loss_and_excursion(g, w, p, x, c0=c0, step=step)
    return loss
