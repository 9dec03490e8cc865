"""Simulation orchestration: time loops, snapshots, comparisons, convergence studies."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fdm, gfem
from .core import Grid1D, ModelParams, TimeState, nodal_power, source_coefficient, to_physical
from .initcond import InitialData, sample_initial
from .linalg import inf_norm
from .newton import NewtonConfig, NewtonConvergenceError, NewtonReport, fd_jacobian

SCHEMES = ("gfem", "fdm")

DEFAULT_BLOWUP_GUARD = 1e15

# Relative slack when checking that t_final is an integer number of steps.
_STEP_COUNT_RTOL = 1e-9


class BlowUpError(RuntimeError):
    """A nodal value exceeded the guard or became non-finite: suspected blow-up."""

    def __init__(self, message: str, step_index: int, time: float, max_value: float):
        super().__init__(message)
        self.step_index = step_index
        self.time = time
        self.max_value = max_value


@dataclass(frozen=True)
class RunConfig:
    """Full description of one experiment."""

    scheme: str
    params: ModelParams
    grid: Grid1D
    dt: float
    t_final: float
    initial: InitialData
    snapshot_times: tuple[float, ...]
    newton: NewtonConfig = NewtonConfig()
    emit_physical: bool = True
    blowup_guard: float = DEFAULT_BLOWUP_GUARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "snapshot_times", tuple(self.snapshot_times))

    def validate(self) -> None:
        if self.scheme not in SCHEMES + ("both",):
            raise ValueError(f"scheme must be gfem, fdm or both, got {self.scheme!r}")
        if self.grid.n_interior < 1:
            raise ValueError(f"grid needs interior nodes, got s={self.grid.n_cells}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        self.n_steps()
        times = self.snapshot_times
        if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError(f"snapshot times must be ascending, got {times}")
        for t in times:
            if not 0.0 <= t <= self.t_final:
                raise ValueError(
                    f"snapshot time {t} outside [0, {self.t_final}]"
                )
        if not self.blowup_guard > 0:
            raise ValueError(f"blowup_guard must be positive, got {self.blowup_guard}")

    def n_steps(self) -> int:
        ratio = self.t_final / self.dt
        n = round(ratio)
        if abs(ratio - n) > _STEP_COUNT_RTOL * max(1.0, abs(ratio)):
            raise ValueError(
                f"t_final/dt = {ratio} is not an integer step count"
            )
        return n

    def resolved_newton(self) -> NewtonConfig:
        """Newton settings with fd_step defaulted to the grid spacing."""
        if self.newton.fd_step is None:
            return dataclasses.replace(self.newton, fd_step=self.grid.dx)
        return self.newton

    def snapshot_steps(self) -> dict[float, int]:
        """Requested time -> nearest step index (ties round up)."""
        n = self.n_steps()
        out = {}
        for t in self.snapshot_times:
            idx = int(math.floor(t / self.dt + 0.5))
            out[t] = min(max(idx, 0), n)
        return out


@dataclass(frozen=True)
class Snapshot:
    """Solution state captured at the step nearest one requested time."""

    t: float
    u: np.ndarray
    phi: np.ndarray | None
    scheme: str
    step_index: int
    requested_t: float


@dataclass(frozen=True)
class NewtonIterStats:
    max_iterations: int
    mean_iterations: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-snapshot-time discrepancy between the two schemes on shared inputs."""

    times: tuple[float, ...]
    abs_diff_inf: tuple[float, ...]
    rel_diff_inf: tuple[float, ...]
    gfem_iters: NewtonIterStats
    fdm_iters: NewtonIterStats


def _iter_stats(reports: list[NewtonReport]) -> NewtonIterStats:
    if not reports:
        return NewtonIterStats(max_iterations=0, mean_iterations=0.0)
    counts = [r.iterations for r in reports]
    return NewtonIterStats(
        max_iterations=max(counts),
        mean_iterations=sum(counts) / len(counts),
    )


def _guard(u: np.ndarray, step: int, dt: float, guard: float) -> None:
    if not np.all(np.isfinite(u)):
        raise BlowUpError(
            f"non-finite value at step {step} (t={step * dt:g}); suspected blow-up",
            step_index=step, time=step * dt, max_value=float("inf"),
        )
    peak = inf_norm(u)
    if peak > guard:
        raise BlowUpError(
            f"|u| = {peak:.3e} exceeded guard {guard:.3e} at step {step} "
            f"(t={step * dt:g}); suspected blow-up",
            step_index=step, time=step * dt, max_value=peak,
        )


def simulate(
    scheme: str,
    params: ModelParams,
    grid: Grid1D,
    dt: float,
    n_steps: int,
    u0: np.ndarray,
    newton_cfg: NewtonConfig,
    *,
    snapshot_steps: tuple[int, ...] = (),
    forcing: Callable[[np.ndarray, float], np.ndarray] | None = None,
    source_scale: float = 1.0,
    blowup_guard: float = DEFAULT_BLOWUP_GUARD,
) -> tuple[dict[int, np.ndarray], list[NewtonReport]]:
    """Low-level time loop for one scheme from a given interior vector.

    forcing(x, t) adds an extra load each step: dt^2 * mass @ g for the element
    scheme, dt^2 * g pointwise for finite differences.  Returns the solution at
    the requested step indices plus the per-step Newton reports.  Newton
    failures are re-raised with the offending step and time attached.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be gfem or fdm, got {scheme!r}")
    if newton_cfg.fd_step is None:
        newton_cfg = dataclasses.replace(newton_cfg, fd_step=grid.dx)
    u_curr = np.array(u0, dtype=float)
    if u_curr.shape != (grid.n_interior,):
        raise ValueError(
            f"u0 must have {grid.n_interior} interior values, got {u_curr.shape}"
        )

    if scheme == "gfem":
        ops = gfem.assemble(grid, dt, params.theta)
        first_step, step, residual = gfem.gfem_first_step, gfem.gfem_step, gfem.gfem_residual
        mass = ops.mass

        def extra(t: float) -> np.ndarray | None:
            if forcing is None:
                return None
            return dt * dt * mass.matvec(forcing(grid.interior_nodes, t))
    else:
        ops = fdm.fdm_assemble(grid, dt, params.theta)
        first_step, step, residual = fdm.fdm_first_step, fdm.fdm_step, fdm.fdm_residual

        def extra(t: float) -> np.ndarray | None:
            if forcing is None:
                return None
            return dt * dt * forcing(grid.interior_nodes, t)

    wanted = set(snapshot_steps)
    captured: dict[int, np.ndarray] = {}
    reports: list[NewtonReport] = []

    _guard(u_curr, 0, dt, blowup_guard)
    if 0 in wanted:
        captured[0] = u_curr.copy()
    if n_steps == 0:
        return captured, reports

    try:
        u_next, report = first_step(
            u_curr, params, ops, newton_cfg,
            extra_load=extra(0.0), source_scale=source_scale,
        )
    except NewtonConvergenceError as err:
        raise NewtonConvergenceError(
            f"{err} (scheme={scheme}, step 1, t={dt:g})",
            report=err.report, step_index=1, time=dt,
        ) from err
    reports.append(report)
    _guard(u_next, 1, dt, blowup_guard)
    u_prev, u_curr = u_curr, u_next
    if 1 in wanted:
        captured[1] = u_curr.copy()

    cached_jacobian = None
    for n in range(1, n_steps):
        state = TimeState(u_prev=u_prev, u_curr=u_curr, step_index=n, dt=dt)
        if newton_cfg.reuse_jacobian and cached_jacobian is None:
            # The general-step matrix is time-independent, so one frozen
            # Jacobian serves every subsequent level.
            f = residual(state, params, ops, extra_load=extra(state.time),
                         source_scale=source_scale)
            cached_jacobian = fd_jacobian(f, u_curr, newton_cfg.fd_step).factor()
        try:
            u_next, report = step(
                state, params, ops, newton_cfg,
                extra_load=extra(state.time), source_scale=source_scale,
                jacobian=cached_jacobian,
            )
        except NewtonConvergenceError as err:
            raise NewtonConvergenceError(
                f"{err} (scheme={scheme}, step {n + 1}, t={(n + 1) * dt:g})",
                report=err.report, step_index=n + 1, time=(n + 1) * dt,
            ) from err
        reports.append(report)
        _guard(u_next, n + 1, dt, blowup_guard)
        u_prev, u_curr = u_curr, u_next
        if n + 1 in wanted:
            captured[n + 1] = u_curr.copy()

    return captured, reports


def _snapshots_for(
    scheme: str, config: RunConfig, u0: np.ndarray
) -> tuple[list[Snapshot], list[NewtonReport]]:
    step_of = config.snapshot_steps()
    captured, reports = simulate(
        scheme, config.params, config.grid, config.dt, config.n_steps(), u0,
        config.newton,
        snapshot_steps=tuple(step_of.values()),
        blowup_guard=config.blowup_guard,
    )
    snaps = []
    for requested, idx in step_of.items():
        u = captured[idx]
        t = idx * config.dt
        phi = to_physical(u, t, config.params) if config.emit_physical else None
        snaps.append(Snapshot(
            t=t, u=u, phi=phi, scheme=scheme, step_index=idx, requested_t=requested,
        ))
    return snaps, reports


def run(config: RunConfig) -> list[Snapshot]:
    """Execute the configured simulation; scheme "both" yields both sets."""
    config.validate()
    u0 = sample_initial(config.initial, config.grid)
    schemes = SCHEMES if config.scheme == "both" else (config.scheme,)
    out: list[Snapshot] = []
    for scheme in schemes:
        snaps, _ = _snapshots_for(scheme, config, u0)
        out.extend(snaps)
    return out


def compare_schemes(config: RunConfig) -> ComparisonReport:
    """Run both schemes on one shared initial vector and difference the snapshots."""
    config.validate()
    if config.scheme != "both":
        raise ValueError(f"comparison requires scheme=both, got {config.scheme!r}")
    u0 = sample_initial(config.initial, config.grid)
    gfem_snaps, gfem_reports = _snapshots_for("gfem", config, u0)
    fdm_snaps, fdm_reports = _snapshots_for("fdm", config, u0)

    abs_diffs, rel_diffs = [], []
    for sg, sf in zip(gfem_snaps, fdm_snaps):
        diff = inf_norm(sg.u - sf.u)
        abs_diffs.append(diff)
        rel_diffs.append(diff / max(inf_norm(sg.u), 1e-30))
    return ComparisonReport(
        times=tuple(s.requested_t for s in gfem_snaps),
        abs_diff_inf=tuple(abs_diffs),
        rel_diff_inf=tuple(rel_diffs),
        gfem_iters=_iter_stats(gfem_reports),
        fdm_iters=_iter_stats(fdm_reports),
    )


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact solution u*(x,t) and the forcing g that makes it solve the scheme's PDE.

    g(x, t, params) must equal u*_tt - u*_xx - (1+t)^(-mu(p-1)/2) |u*|^p and
    u* must vanish on the boundary with zero initial velocity.
    """

    name: str
    exact: Callable[[np.ndarray, float], np.ndarray]
    forcing: Callable[[np.ndarray, float, ModelParams], np.ndarray]


def _standing_exact(x: np.ndarray, t: float) -> np.ndarray:
    return np.sin(np.pi * x) * math.cos(math.pi * t)


def _standing_forcing(x: np.ndarray, t: float, params: ModelParams) -> np.ndarray:
    # sin(pi x) cos(pi t) solves the homogeneous wave equation, so the forcing
    # only has to cancel the nonlinear source.
    u = _standing_exact(x, t)
    return -source_coefficient(params, t) * nodal_power(u, params.p)


MANUFACTURED = {
    "standing_wave": ManufacturedSolution(
        name="standing_wave", exact=_standing_exact, forcing=_standing_forcing,
    ),
    "zero": ManufacturedSolution(
        name="zero",
        exact=lambda x, t: np.zeros_like(x),
        forcing=lambda x, t, params: np.zeros_like(x),
    ),
}

REFINE_MODES = ("joint", "temporal")


@dataclass(frozen=True)
class MmsLevel:
    """One refinement level of a convergence study."""

    h: float
    dt: float
    error_inf: float
    observed_order: float | None


def mms_study(
    config: RunConfig,
    manufactured: ManufacturedSolution,
    levels: int,
    refine: str = "joint",
) -> list[MmsLevel]:
    """Measure convergence toward a manufactured solution under refinement.

    "joint" halves h and dt together (fixed mesh ratio); "temporal" keeps the
    grid and halves dt only.  The observed order on a level is
    log2(e_coarser/e_finer); the coarsest level has none.
    """
    config.validate()
    if config.scheme not in SCHEMES:
        raise ValueError(
            f"convergence study needs a single scheme, got {config.scheme!r}"
        )
    if levels < 3:
        raise ValueError(f"need at least 3 levels for an order estimate, got {levels}")
    if refine not in REFINE_MODES:
        raise ValueError(f"refine must be one of {REFINE_MODES}, got {refine!r}")

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return manufactured.forcing(x, t, config.params)

    rows: list[MmsLevel] = []
    errors: list[float] = []
    for level in range(levels):
        factor = 2**level
        if refine == "joint":
            grid = Grid1D(config.grid.n_cells * factor)
        else:
            grid = config.grid
        dt = config.dt / factor
        n_steps = round(config.t_final / dt)
        x = grid.interior_nodes
        captured, _ = simulate(
            config.scheme, config.params, grid, dt, n_steps,
            manufactured.exact(x, 0.0), config.newton,
            snapshot_steps=(n_steps,), forcing=forcing,
            blowup_guard=config.blowup_guard,
        )
        err = inf_norm(captured[n_steps] - manufactured.exact(x, n_steps * dt))
        order = None
        if errors and errors[-1] > 0.0 and err > 0.0:
            order = math.log2(errors[-1] / err)
        errors.append(err)
        rows.append(MmsLevel(h=grid.dx, dt=dt, error_inf=err, observed_order=order))
    return rows
