"""Pure finite differences: central in space, theta-weighted central in time.

With A the (2, -1) second-difference matrix and mesh ratio c = dt^2/dx^2, one
level advances by solving

    (I + c*theta*A) U^{n+1} = 2 U^n - (I + c*(1-theta)*A) U^{n-1} + source

where source_i = dt^2 * (1+t_n)^(-mu(p-1)/2) * |U_i^n|^p acts pointwise.  The
dt^2 factor on the source is the dimensionally consistent scaling obtained by
multiplying the per-node scheme through by dt^2.

The first step uses the same ghost rule as the element scheme (U^{-1} = U^1
from central differencing of the zero initial velocity):

    (2I + cA) U^1 = 2 U^0 + source(U^0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid1D, ModelParams, TimeState, nodal_power, source_coefficient
from .core import _check_theta
from .linalg import BandedMatrix, DenseFactor, second_difference_matrix, shift_scale
from .newton import NewtonConfig, NewtonConvergenceError, NewtonReport, ResidualFn, newton_solve


@dataclass(frozen=True)
class FdmOperators:
    """Second-difference matrix and its theta combinations over interior nodes."""

    A: BandedMatrix
    lhs: BandedMatrix
    rhs_hist: BandedMatrix
    first_lhs: BandedMatrix
    c: float
    dt: float
    theta: float


def fdm_assemble(grid: Grid1D, dt: float, theta: float) -> FdmOperators:
    _check_theta(theta)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dim = grid.n_interior
    if dim < 1:
        raise ValueError(f"grid has no interior nodes (n_cells={grid.n_cells})")
    c = (dt * dt) / (grid.dx * grid.dx)
    a_mat = second_difference_matrix(dim)
    return FdmOperators(
        A=a_mat,
        lhs=shift_scale(a_mat, 1.0, c * theta),
        rhs_hist=shift_scale(a_mat, 1.0, c * (1.0 - theta)),
        first_lhs=shift_scale(a_mat, 2.0, c),
        c=c,
        dt=dt,
        theta=theta,
    )


def fdm_source(
    u_curr: np.ndarray, t_n: float, params: ModelParams, dt: float
) -> np.ndarray:
    """Pointwise source dt^2 * (1+t_n)^(-mu(p-1)/2) * |u_i^n|^p (no mass matrix)."""
    return (dt * dt * source_coefficient(params, t_n)) * nodal_power(u_curr, params.p)


def fdm_first_residual(
    u0: np.ndarray,
    params: ModelParams,
    ops: FdmOperators,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
) -> ResidualFn:
    """Residual F(X) = (2I + cA) X - 2 u^0 - source(u^0, 0)."""
    t_coef = ops.dt if coef_at_next else 0.0
    rhs = 2.0 * np.asarray(u0, dtype=float)
    rhs = rhs + source_scale * fdm_source(u0, t_coef, params, ops.dt)
    if extra_load is not None:
        rhs = rhs + extra_load
    first_lhs = ops.first_lhs

    def residual(x: np.ndarray) -> np.ndarray:
        return first_lhs.matvec(x) - rhs

    return residual


def fdm_residual(
    state: TimeState,
    params: ModelParams,
    ops: FdmOperators,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
) -> ResidualFn:
    """Residual of the matrix-form scheme (the per-node scheme scaled by dt^2)."""
    t_coef = state.time + state.dt if coef_at_next else state.time
    rhs = (
        2.0 * state.u_curr
        - ops.rhs_hist.matvec(state.u_prev)
        + source_scale * fdm_source(state.u_curr, t_coef, params, ops.dt)
    )
    if extra_load is not None:
        rhs = rhs + extra_load
    lhs = ops.lhs

    def residual(x: np.ndarray) -> np.ndarray:
        return lhs.matvec(x) - rhs

    return residual


def _solve_step(
    residual: ResidualFn,
    x0: np.ndarray,
    newton_cfg: NewtonConfig,
    jacobian: DenseFactor | None,
) -> tuple[np.ndarray, NewtonReport]:
    x, report = newton_solve(residual, x0, newton_cfg, jacobian=jacobian)
    if not report.converged:
        raise NewtonConvergenceError(
            f"Newton stalled: update norm {report.final_update_norm:.3e} after "
            f"{report.iterations} iterations",
            report=report,
        )
    return x, report


def fdm_first_step(
    u0: np.ndarray,
    params: ModelParams,
    ops: FdmOperators,
    newton_cfg: NewtonConfig,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
    jacobian: DenseFactor | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Advance the initial datum to level 1; raises on Newton non-convergence."""
    residual = fdm_first_residual(
        u0, params, ops,
        extra_load=extra_load, source_scale=source_scale, coef_at_next=coef_at_next,
    )
    return _solve_step(residual, np.asarray(u0, dtype=float), newton_cfg, jacobian)


def fdm_step(
    state: TimeState,
    params: ModelParams,
    ops: FdmOperators,
    newton_cfg: NewtonConfig,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
    jacobian: DenseFactor | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Advance one general level; raises on Newton non-convergence."""
    residual = fdm_residual(
        state, params, ops,
        extra_load=extra_load, source_scale=source_scale, coef_at_next=coef_at_next,
    )
    return _solve_step(residual, state.u_curr, newton_cfg, jacobian)
