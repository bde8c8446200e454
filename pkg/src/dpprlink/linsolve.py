"""Solvers for the resolvent system (I + alpha L) x = b."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph import Graph, _check_signal, dense_adjacency, laplacian_apply

DENSE_LIMIT = 2000


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    ``iterate`` and ``residual`` carry the best iterate found so the caller
    can decide whether it is good enough.
    """

    def __init__(self, message, iterate, residual, iterations):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class CgConfig:
    alpha: float = 1.0
    tol: float = 1e-8
    max_iter: int | None = None  # None -> 10 * n

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    def iteration_cap(self, n: int) -> int:
        return self.max_iter if self.max_iter is not None else max(10 * n, 1)


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    iterations: int
    final_residual: float


def resolvent_apply(g: Graph, alpha: float, x) -> np.ndarray:
    """Forward operator: ``x + alpha * L x``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = _check_signal(g, x)
    return x + alpha * laplacian_apply(g, x)


def conjugate_gradient(matvec, b, tol, max_iter):
    """Plain CG for a symmetric positive-definite operator given as ``matvec``.

    Stops on relative residual ``||A x - b|| / ||b|| <= tol``, measured on the
    recursively updated residual and re-checked against the true residual
    before returning. Returns ``(x, iterations, relative_residual)`` and
    raises :class:`ConvergenceError` when ``max_iter`` is exhausted.
    """
    b = np.asarray(b, dtype=np.float64)
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    if bnorm == 0.0:
        return x, 0, 0.0

    r = b.copy()
    p = r.copy()
    rr = r @ r
    threshold = (tol * bnorm) ** 2
    best_x, best_res = x.copy(), 1.0
    k = 0
    while k < max_iter:
        if rr <= threshold:
            true_res = np.linalg.norm(b - matvec(x)) / bnorm
            if true_res <= tol:
                return x, k, true_res
            # drifted recursive residual; restart from the true one
            r = b - matvec(x)
            p = r.copy()
            rr = r @ r
        ap = matvec(p)
        step = rr / (p @ ap)
        x = x + step * p
        r = r - step * ap
        rr_next = r @ r
        p = r + (rr_next / rr) * p
        rr = rr_next
        k += 1
        res = np.sqrt(rr) / bnorm
        if res < best_res:
            best_x, best_res = x.copy(), res

    true_res = np.linalg.norm(b - matvec(x)) / bnorm
    if true_res <= tol:
        return x, k, true_res
    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {max_iter} iterations (residual {best_res:.3e})",
        best_x, best_res, k,
    )


def cg_solve(g: Graph, b, cfg: CgConfig = CgConfig()) -> SolveReport:
    """Solve (I + alpha L) x = b matrix-free by conjugate gradients."""
    b = _check_signal(g, b)
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side has non-finite entries")
    deg = g.degrees
    adj = g.adjacency
    alpha = cfg.alpha

    def matvec(x):
        return x + alpha * (deg * x - adj @ x)

    x, k, res = conjugate_gradient(matvec, b, cfg.tol, cfg.iteration_cap(g.n))
    return SolveReport(x, k, float(res))


def resolvent_matrix(g: Graph, alpha: float) -> np.ndarray:
    """Dense (I + alpha L), guarded to small graphs."""
    if g.n > DENSE_LIMIT:
        raise ValueError(f"refusing dense {g.n}x{g.n} matrix (limit {DENSE_LIMIT})")
    a = dense_adjacency(g)
    return np.eye(g.n) + alpha * (np.diag(a.sum(axis=1)) - a)


def dense_resolvent_solve(g: Graph, b, alpha: float) -> np.ndarray:
    """Reference solve by Cholesky factorization of the dense matrix."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    b = _check_signal(g, b)
    m = resolvent_matrix(g, alpha)
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(m), b)
