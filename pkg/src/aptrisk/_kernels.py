"""Hot integration kernels with selectable backend.

Two implementations of the same fixed-step RK4 march over the compromise
dynamics, selected by the ``APTRISK_BACKEND`` environment variable (or
:func:`set_backend`):

* ``numba``  -- JIT-compiled CSR kernels (default when numba imports).
  Batch evaluation runs all candidate strategies in lockstep with the state
  laid out (node, candidate) so the inner loops vectorize over candidates;
  candidates are processed in chunks sized to stay cache-resident.
* ``numpy``  -- pure-numpy fallback using dense adjacency matmuls. Same
  results to floating-point roundoff; roughly an order of magnitude slower
  per evaluation. Use ``APTRISK_BACKEND=numpy`` to force it.

Both backends integrate the augmented system (per-node compromise
probabilities plus the running security-weighted loss integral), shorten the
final step so the march ends exactly at T, clamp states to [0, 1] after each
step, and report the worst unclamped excursion so callers can alarm on
integrator trouble (anything above ~1e-9 means the step is too large).

``aptrisk bench`` compares the two backends on a reference workload.
"""

from __future__ import annotations

import os

import numpy as np

from .graph import Graph

__all__ = [
    "IntegrationError",
    "NUMBA_AVAILABLE",
    "active_backend",
    "set_backend",
    "loss_batch",
    "simulate",
]

# Candidates per lockstep chunk; keeps the working set (~7 arrays of
# node_count x chunk doubles) inside L2 on typical cores.
_CHUNK = 384


class IntegrationError(RuntimeError):
    """Non-finite values produced by the integrator (step size too large)."""


def _num_steps(horizon: float, step: float) -> int:
    # the 1e-9 slack keeps an exactly-divisible horizon from gaining a step
    return max(1, int(np.ceil(horizon / step - 1e-9)))


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _loss_batch_numpy(g, w, alpha, beta, delta, gamma, X, c0, horizon, step):
    a = g.dense_adjacency()
    inv_dw = 1.0 / (delta * w)
    gw = gamma * w
    ax = alpha * X
    m = X.shape[0]
    c = np.broadcast_to(c0, (m, X.shape[1])).copy()
    loss = np.zeros(m)
    excursion = 0.0
    nsteps = _num_steps(horizon, step)

    def deriv(s):
        return (ax + beta * (s @ a)) * (1.0 - s) * inv_dw - gw * s

    for s_idx in range(nsteps):
        hs = step if s_idx < nsteps - 1 else horizon - (nsteps - 1) * step
        k1 = deriv(c)
        y2 = c + (0.5 * hs) * k1
        k2 = deriv(y2)
        y3 = c + (0.5 * hs) * k2
        k3 = deriv(y3)
        y4 = c + hs * k3
        k4 = deriv(y4)
        lsum = (c + 2.0 * (y2 + y3) + y4) @ w
        c += (hs / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        excursion = max(excursion, float(c.max() - 1.0), float(-c.min()), 0.0)
        np.clip(c, 0.0, 1.0, out=c)
        loss += (hs / 6.0) * lsum
    return loss, excursion


def _simulate_numpy(g, w, alpha, beta, delta, gamma, x, c0, horizon, step, stored):
    a = g.dense_adjacency()
    inv_dw = 1.0 / (delta * w)
    gw = gamma * w
    ax = alpha * x
    c = np.asarray(c0, dtype=float).copy()
    loss = 0.0
    excursion = 0.0
    nsteps = _num_steps(horizon, step)
    states = np.empty((len(stored), len(c0)))
    loss_running = np.empty(len(stored))
    states[0] = c
    loss_running[0] = 0.0
    cursor = 1

    def deriv(s):
        return (ax + beta * (s @ a)) * (1.0 - s) * inv_dw - gw * s

    for s_idx in range(nsteps):
        hs = step if s_idx < nsteps - 1 else horizon - (nsteps - 1) * step
        k1 = deriv(c)
        y2 = c + (0.5 * hs) * k1
        k2 = deriv(y2)
        y3 = c + (0.5 * hs) * k2
        k3 = deriv(y3)
        y4 = c + hs * k3
        k4 = deriv(y4)
        lsum = (c + 2.0 * (y2 + y3) + y4) @ w
        c += (hs / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        excursion = max(excursion, float(c.max() - 1.0), float(-c.min()), 0.0)
        np.clip(c, 0.0, 1.0, out=c)
        loss += (hs / 6.0) * lsum
        if cursor < len(stored) and s_idx + 1 == stored[cursor]:
            states[cursor] = c
            loss_running[cursor] = loss
            cursor += 1
    return states, loss_running, excursion


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

if NUMBA_AVAILABLE:

    @njit(cache=True, inline="always")
    def _stage_nb(indptr, indices, axt, beta, inv_dw, gw, s, k):
        # k <- f(s) for every candidate column of the (node, candidate) block
        n, m = s.shape
        for i in range(n):
            base = axt[i]
            si = s[i]
            ki = k[i]
            for c in range(m):
                ki[c] = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                sj = s[indices[p]]
                for c in range(m):
                    ki[c] += sj[c]
            c1 = inv_dw[i]
            c2 = gw[i]
            for c in range(m):
                ki[c] = (base[c] + beta * ki[c]) * (1.0 - si[c]) * c1 - c2 * si[c]

    @njit(cache=True)
    def _loss_block_nb(indptr, indices, axt, beta, inv_dw, gw, w, c0, horizon, step, out):
        n, m = axt.shape
        c = np.empty((n, m))
        y = np.empty((n, m))
        k1 = np.empty((n, m))
        k2 = np.empty((n, m))
        k3 = np.empty((n, m))
        k4 = np.empty((n, m))
        lsum = np.empty(m)
        for i in range(n):
            for c_idx in range(m):
                c[i, c_idx] = c0[i]
        for c_idx in range(m):
            out[c_idx] = 0.0
        excursion = 0.0
        nsteps = max(1, int(np.ceil(horizon / step - 1e-9)))
        for s_idx in range(nsteps):
            hs = step if s_idx < nsteps - 1 else horizon - (nsteps - 1) * step
            _stage_nb(indptr, indices, axt, beta, inv_dw, gw, c, k1)
            for i in range(n):
                for cc in range(m):
                    y[i, cc] = c[i, cc] + 0.5 * hs * k1[i, cc]
            _stage_nb(indptr, indices, axt, beta, inv_dw, gw, y, k2)
            for cc in range(m):
                lsum[cc] = 0.0
            for i in range(n):
                wi = w[i]
                for cc in range(m):
                    lsum[cc] += wi * (c[i, cc] + 2.0 * y[i, cc])
            for i in range(n):
                for cc in range(m):
                    y[i, cc] = c[i, cc] + 0.5 * hs * k2[i, cc]
            _stage_nb(indptr, indices, axt, beta, inv_dw, gw, y, k3)
            for i in range(n):
                wi = w[i]
                for cc in range(m):
                    lsum[cc] += 2.0 * wi * y[i, cc]
            for i in range(n):
                for cc in range(m):
                    y[i, cc] = c[i, cc] + hs * k3[i, cc]
            _stage_nb(indptr, indices, axt, beta, inv_dw, gw, y, k4)
            for i in range(n):
                wi = w[i]
                for cc in range(m):
                    lsum[cc] += wi * y[i, cc]
            for i in range(n):
                for cc in range(m):
                    ci = c[i, cc] + hs * (k1[i, cc] + 2.0 * (k2[i, cc] + k3[i, cc]) + k4[i, cc]) * (1.0 / 6.0)
                    if ci > 1.0:
                        if ci - 1.0 > excursion:
                            excursion = ci - 1.0
                        ci = 1.0
                    elif ci < 0.0:
                        if -ci > excursion:
                            excursion = -ci
                        ci = 0.0
                    c[i, cc] = ci
            for cc in range(m):
                out[cc] += hs * lsum[cc] * (1.0 / 6.0)
        return excursion

    @njit(cache=True)
    def _simulate_nb(indptr, indices, ax, beta, inv_dw, gw, w, c0, horizon, step, stored, states, loss_running):
        n = c0.shape[0]
        c = c0.copy()
        y = np.empty(n)
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        loss = 0.0
        excursion = 0.0
        nsteps = max(1, int(np.ceil(horizon / step - 1e-9)))
        for i in range(n):
            states[0, i] = c[i]
        loss_running[0] = 0.0
        cursor = 1
        for s_idx in range(nsteps):
            hs = step if s_idx < nsteps - 1 else horizon - (nsteps - 1) * step
            lsum = 0.0
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += c[indices[p]]
                k1[i] = (ax[i] + beta * acc) * (1.0 - c[i]) * inv_dw[i] - gw[i] * c[i]
                lsum += w[i] * c[i]
            for i in range(n):
                y[i] = c[i] + 0.5 * hs * k1[i]
            for i in range(n):
                lsum += 2.0 * w[i] * y[i]
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += y[indices[p]]
                k2[i] = (ax[i] + beta * acc) * (1.0 - y[i]) * inv_dw[i] - gw[i] * y[i]
            for i in range(n):
                y[i] = c[i] + 0.5 * hs * k2[i]
            for i in range(n):
                lsum += 2.0 * w[i] * y[i]
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += y[indices[p]]
                k3[i] = (ax[i] + beta * acc) * (1.0 - y[i]) * inv_dw[i] - gw[i] * y[i]
            for i in range(n):
                y[i] = c[i] + hs * k3[i]
            for i in range(n):
                lsum += w[i] * y[i]
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += y[indices[p]]
                k4i = (ax[i] + beta * acc) * (1.0 - y[i]) * inv_dw[i] - gw[i] * y[i]
                ci = c[i] + hs * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4i) * (1.0 / 6.0)
                if ci > 1.0:
                    if ci - 1.0 > excursion:
                        excursion = ci - 1.0
                    ci = 1.0
                elif ci < 0.0:
                    if -ci > excursion:
                        excursion = -ci
                    ci = 0.0
                c[i] = ci
            loss += hs * lsum * (1.0 / 6.0)
            if cursor < stored.shape[0] and s_idx + 1 == stored[cursor]:
                for i in range(n):
                    states[cursor, i] = c[i]
                loss_running[cursor] = loss
                cursor += 1
        return excursion

    def _loss_batch_numba(g, w, alpha, beta, delta, gamma, X, c0, horizon, step):
        indptr, indices = g.csr()
        inv_dw = 1.0 / (delta * w)
        gw = gamma * w
        m_total = X.shape[0]
        losses = np.empty(m_total)
        excursion = 0.0
        for lo in range(0, m_total, _CHUNK):
            hi = min(lo + _CHUNK, m_total)
            axt = np.ascontiguousarray((alpha * X[lo:hi]).T)
            out = losses[lo:hi]
            exc = _loss_block_nb(indptr, indices, axt, beta, inv_dw, gw, w, c0, horizon, step, out)
            if exc > excursion:
                excursion = exc
        return losses, excursion

    def _simulate_numba(g, w, alpha, beta, delta, gamma, x, c0, horizon, step, stored):
        indptr, indices = g.csr()
        inv_dw = 1.0 / (delta * w)
        gw = gamma * w
        states = np.empty((len(stored), len(c0)))
        loss_running = np.empty(len(stored))
        excursion = _simulate_nb(
            indptr, indices, alpha * x, beta, inv_dw, gw, w,
            np.asarray(c0, dtype=float), horizon, step,
            stored, states, loss_running,
        )
        return states, loss_running, excursion


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_IMPLS = {"numpy": (_loss_batch_numpy, _simulate_numpy)}
if NUMBA_AVAILABLE:
    _IMPLS["numba"] = (_loss_batch_numba, _simulate_numba)


def _default_backend() -> str:
    requested = os.environ.get("APTRISK_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(f"APTRISK_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("APTRISK_BACKEND=numba but numba is not importable")
    return requested


_ACTIVE = _default_backend()


def active_backend() -> str:
    """Name of the backend currently in use ('numba' or 'numpy')."""
    return _ACTIVE


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previously active name."""
    global _ACTIVE
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not importable")
    previous = _ACTIVE
    _ACTIVE = name
    return previous


def loss_batch(g: Graph, w, alpha, beta, delta, gamma, X, c0, horizon, step):
    """Expected loss of each strategy row of X. Returns (losses, excursion).

    Every candidate is integrated with identical step placement, so losses of
    different candidates are directly comparable.
    """
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=float)))
    c0 = np.asarray(c0, dtype=float)
    impl = _IMPLS[_ACTIVE][0]
    losses, excursion = impl(g, w, alpha, beta, delta, gamma, X, c0, horizon, step)
    if not np.all(np.isfinite(losses)):
        raise IntegrationError(
            f"non-finite loss at step={step}; reduce the integration step"
        )
    return losses, excursion


def simulate(g: Graph, w, alpha, beta, delta, gamma, x, c0, horizon, step, record_every):
    """Integrate one strategy, storing every ``record_every``-th step.

    Returns (times, states, loss_running, excursion); the final time is
    exactly the horizon.
    """
    nsteps = _num_steps(horizon, step)
    stored_steps = list(range(0, nsteps, record_every))
    if stored_steps[-1] != nsteps:
        stored_steps.append(nsteps)
    stored = np.asarray(stored_steps, dtype=np.int64)
    times = stored.astype(float) * step
    times[-1] = horizon
    impl = _IMPLS[_ACTIVE][1]
    states, loss_running, excursion = impl(
        g, w, alpha, beta, delta, gamma,
        np.asarray(x, dtype=float), np.asarray(c0, dtype=float),
        horizon, step, stored,
    )
    if not (np.all(np.isfinite(states)) and np.all(np.isfinite(loss_running))):
        raise IntegrationError(
            f"non-finite state at step={step}; reduce the integration step"
        )
    return times, states, loss_running, excursion
