"""Frozen-Jacobian Newton iteration with a finite-difference Jacobian.

The Jacobian is approximated column by column from forward differences at the
initial guess, factored once, and reused for every update.  The per-step
systems produced by both time-stepping schemes are affine in the unknown, so
one applied update reaches the root and the next candidate update certifies
convergence.

Counting contract: with `jacobian=None`, the residual is evaluated exactly
dim + iterations + 1 times (dim + 1 for the Jacobian build, whose base
evaluation seeds the first update, plus one evaluation after each applied
update).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import DenseFactor, DenseMatrix, inf_norm

ResidualFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NewtonConfig:
    """Stopping tolerance, perturbation step, and iteration budget.

    fd_step defaults to None, meaning "use the grid spacing"; the driver fills
    it in.  Calling newton_solve directly requires an explicit value.

    reuse_jacobian opts into caching the factored Jacobian across time steps
    (valid here because the per-step residual matrix is time-independent);
    off by default so each step freezes its own Jacobian.
    """

    epsilon: float = 1e-10
    fd_step: float | None = None
    max_iters: int = 50
    reuse_jacobian: bool = False

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class NewtonReport:
    """Outcome of one solve: applied updates, last candidate update norm, status."""

    iterations: int
    final_update_norm: float
    converged: bool


class NewtonConvergenceError(RuntimeError):
    """Raised by callers that cannot proceed without a converged solve."""

    def __init__(self, message: str, report: NewtonReport | None = None,
                 step_index: int | None = None, time: float | None = None):
        super().__init__(message)
        self.report = report
        self.step_index = step_index
        self.time = time


def _jacobian_columns(f: ResidualFn, x0: np.ndarray, fd_step: float):
    """Forward-difference Jacobian and the base residual f(x0)."""
    f0 = np.asarray(f(x0), dtype=float)
    if not np.all(np.isfinite(f0)):
        raise ValueError("residual is not finite at the expansion point")
    dim = x0.size
    entries = np.empty((dim, dim))
    x_pert = x0.astype(float, copy=True)
    for j in range(dim):
        saved = x_pert[j]
        x_pert[j] = saved + fd_step
        # copy the column before undoing the perturbation, in case the
        # residual returns a view of its argument
        entries[:, j] = f(x_pert)
        x_pert[j] = saved
    if not np.all(np.isfinite(entries)):
        raise ValueError("residual is not finite at a perturbed point")
    entries -= f0[:, None]
    entries /= fd_step
    return DenseMatrix(dim=dim, entries=entries), f0


def fd_jacobian(f: ResidualFn, x0, fd_step: float) -> DenseMatrix:
    """Jacobian approximation with column j = (f(x0 + fd_step*e_j) - f(x0))/fd_step."""
    x0 = np.asarray(x0, dtype=float)
    if not fd_step > 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")
    jac, _ = _jacobian_columns(f, x0, fd_step)
    return jac


def newton_solve(
    f: ResidualFn,
    x0,
    cfg: NewtonConfig,
    jacobian: DenseFactor | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Iterate x <- x - J(x0)^(-1) f(x) until the update norm drops below epsilon.

    The Jacobian is frozen at x0 (or taken prefactored from `jacobian`).  An
    update smaller than epsilon is not applied; it certifies convergence of
    the current iterate.  `iterations` counts applied updates, so an affine
    residual converges with at most 1 from any starting point (0 if x0 is
    already the root).  Non-convergence is reported, not raised.
    """
    x = np.array(x0, dtype=float)
    if jacobian is None:
        if cfg.fd_step is None:
            raise ValueError(
                "NewtonConfig.fd_step is unset; pass a value or a prefactored jacobian"
            )
        jac, residual = _jacobian_columns(f, x, cfg.fd_step)
        factor = jac.factor()
    else:
        factor = jacobian
        residual = np.asarray(f(x), dtype=float)

    iterations = 0
    while True:
        delta = factor.solve(residual)
        norm = inf_norm(delta)
        if norm < cfg.epsilon:
            return x, NewtonReport(iterations, norm, converged=True)
        if iterations >= cfg.max_iters:
            return x, NewtonReport(iterations, norm, converged=False)
        x = x - delta
        iterations += 1
        residual = np.asarray(f(x), dtype=float)
