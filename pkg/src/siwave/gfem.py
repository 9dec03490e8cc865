"""Galerkin finite elements in space (linear hats), theta-weighted differences in time.

One time level advances by solving

    K u^{n+1} = C u^n - H u^{n-1} + load(u^n, t_n)

with K = M + theta*dt^2*D, C = 2M, H = M + (1-theta)*dt^2*D built from the
mass matrix M and stiffness matrix D of the hat basis on interior nodes.  The
nonlinear load uses the product approximation: |u_h|^p is interpolated from
its nodal values, so the load is dt^2 * (1+t)^(-mu(p-1)/2) * M |u^n|^p.

The first step eliminates the ghost level via u^{-1} = u^1 (central
differencing of the zero initial velocity), giving S u^1 = C u^0 + load with
S = K + H.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid1D, ModelParams, TimeState, nodal_power, source_coefficient
from .core import _check_theta
from .linalg import BandedMatrix, DenseFactor
from .newton import NewtonConfig, NewtonConvergenceError, NewtonReport, ResidualFn, newton_solve


@dataclass(frozen=True)
class GfemOperators:
    """Assembled element matrices over the interior nodes of a uniform grid."""

    mass: BandedMatrix
    stiffness: BandedMatrix
    K: BandedMatrix
    C: BandedMatrix
    H: BandedMatrix
    S: BandedMatrix
    dt: float
    theta: float


def assemble(grid: Grid1D, dt: float, theta: float) -> GfemOperators:
    """Closed-form hat-function integrals on a uniform mesh, Dirichlet rows dropped.

    Interior rows: mass diag 2h/3 and off-diagonal h/6; stiffness diag 2/h and
    off-diagonal -1/h.  K and H add theta/dt^2-weighted stiffness entrywise;
    C = 2*mass and S = K + H hold exactly by construction.
    """
    _check_theta(theta)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dim = grid.n_interior
    if dim < 1:
        raise ValueError(f"grid has no interior nodes (n_cells={grid.n_cells})")
    h = grid.dx
    mass = BandedMatrix(dim, np.full(dim, 2.0 * h / 3.0), np.full(dim - 1, h / 6.0))
    stiffness = BandedMatrix(dim, np.full(dim, 2.0 / h), np.full(dim - 1, -1.0 / h))

    def _combine(weight: float) -> BandedMatrix:
        return BandedMatrix(
            dim,
            mass.diag + weight * stiffness.diag,
            mass.offdiag + weight * stiffness.offdiag,
        )

    k_mat = _combine(theta * dt * dt)
    h_mat = _combine((1.0 - theta) * dt * dt)
    c_mat = BandedMatrix(dim, 2.0 * mass.diag, 2.0 * mass.offdiag)
    s_mat = BandedMatrix(dim, k_mat.diag + h_mat.diag, k_mat.offdiag + h_mat.offdiag)
    return GfemOperators(
        mass=mass, stiffness=stiffness, K=k_mat, C=c_mat, H=h_mat, S=s_mat,
        dt=dt, theta=theta,
    )


def nonlinear_load(
    u_curr: np.ndarray, t_n: float, params: ModelParams, ops: GfemOperators
) -> np.ndarray:
    """dt^2 * (1+t_n)^(-mu(p-1)/2) * mass @ |u^n|^p (product approximation)."""
    w = nodal_power(u_curr, params.p)
    return (ops.dt * ops.dt * source_coefficient(params, t_n)) * ops.mass.matvec(w)


def gfem_first_residual(
    u0: np.ndarray,
    params: ModelParams,
    ops: GfemOperators,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
) -> ResidualFn:
    """Residual F(X) = S X - C u^0 - load(u^0, 0) for the ghost-point first step."""
    t_coef = ops.dt if coef_at_next else 0.0
    rhs = ops.C.matvec(u0) + source_scale * nonlinear_load(u0, t_coef, params, ops)
    if extra_load is not None:
        rhs = rhs + extra_load
    s_mat = ops.S

    def residual(x: np.ndarray) -> np.ndarray:
        return s_mat.matvec(x) - rhs

    return residual


def gfem_residual(
    state: TimeState,
    params: ModelParams,
    ops: GfemOperators,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
) -> ResidualFn:
    """Residual F(X) = K X - C u^n + H u^{n-1} - load(u^n, t_n) of a general step.

    coef_at_next evaluates the source decay factor at t_{n+1} instead of t_n
    (sensitivity hook; the default matches the explicit treatment of u^n).
    """
    t_coef = state.time + state.dt if coef_at_next else state.time
    rhs = (
        ops.C.matvec(state.u_curr)
        - ops.H.matvec(state.u_prev)
        + source_scale * nonlinear_load(state.u_curr, t_coef, params, ops)
    )
    if extra_load is not None:
        rhs = rhs + extra_load
    k_mat = ops.K

    def residual(x: np.ndarray) -> np.ndarray:
        return k_mat.matvec(x) - rhs

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


def gfem_first_step(
    u0: np.ndarray,
    params: ModelParams,
    ops: GfemOperators,
    newton_cfg: NewtonConfig,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
    jacobian: DenseFactor | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Advance the initial datum to level 1; raises on Newton non-convergence."""
    residual = gfem_first_residual(
        u0, params, ops,
        extra_load=extra_load, source_scale=source_scale, coef_at_next=coef_at_next,
    )
    return _solve_step(residual, np.asarray(u0, dtype=float), newton_cfg, jacobian)


def gfem_step(
    state: TimeState,
    params: ModelParams,
    ops: GfemOperators,
    newton_cfg: NewtonConfig,
    *,
    extra_load: np.ndarray | None = None,
    source_scale: float = 1.0,
    coef_at_next: bool = False,
    jacobian: DenseFactor | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Advance one general level; raises on Newton non-convergence."""
    residual = gfem_residual(
        state, params, ops,
        extra_load=extra_load, source_scale=source_scale, coef_at_next=coef_at_next,
    )
    return _solve_step(residual, state.u_curr, newton_cfg, jacobian)
