"""Heat diffusion ds/dt = -L s, sampled for plotting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, _check_signal, dense_adjacency
from .linsolve import DENSE_LIMIT, CgConfig, cg_solve

DEFAULT_TIMES = (0.0, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class DiffusionTrace:
    times: tuple
    snapshots: tuple

    def to_csv(self) -> str:
        lines = ["t,node,value"]
        for t, snap in zip(self.times, self.snapshots):
            lines += [f"{t!r},{i},{float(v)!r}" for i, v in enumerate(snap)]
        return "\n".join(lines) + "\n"


def diffuse_trace(g: Graph, s0, times=DEFAULT_TIMES, steps_per_unit: int = 100,
                  tol: float = 1e-12) -> DiffusionTrace:
    """Implicit-Euler integration, one resolvent solve (I + dt L) per step.

    Snapshot at time ``t`` is taken after ``round(t * steps_per_unit)`` steps.
    """
    if g.n > DENSE_LIMIT:
        raise ValueError(f"diffusion traces are limited to n <= {DENSE_LIMIT}, got {g.n}")
    if steps_per_unit < 1:
        raise ValueError("steps_per_unit must be >= 1")
    times = tuple(float(t) for t in times)
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be ascending and non-negative")
    s = _check_signal(g, s0).copy()
    cfg = CgConfig(alpha=1.0 / steps_per_unit, tol=tol)
    done = 0
    snaps = []
    for t in times:
        target = round(t * steps_per_unit)
        while done < target:
            nxt = cg_solve(g, s, cfg).solution
            # 1^T (I + dt L) = 1^T, so any mass change is solver residual; spread it back
            s = nxt + (s.sum() - nxt.sum()) / g.n
            done += 1
        snaps.append(s.copy())
    return DiffusionTrace(times, tuple(snaps))


def heat_kernel_dense(g: Graph, s0, t: float) -> np.ndarray:
    """Exact e^{-Lt} s0 by eigendecomposition; small graphs only."""
    if g.n > DENSE_LIMIT:
        raise ValueError(f"dense heat kernel limited to n <= {DENSE_LIMIT}")
    a = dense_adjacency(g)
    lap = np.diag(a.sum(axis=1)) - a
    w, v = np.linalg.eigh(lap)
    return v @ (np.exp(-w * t) * (v.T @ np.asarray(s0, dtype=float)))
