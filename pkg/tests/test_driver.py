import dataclasses

import numpy as np
import pytest

from siwave.core import Grid1D, make_params_delta1
from siwave.driver import (
    MANUFACTURED,
    BlowUpError,
    RunConfig,
    compare_schemes,
    mms_study,
    run,
    simulate,
)
from siwave.initcond import BumpSpec, InitialData, sample_initial
from siwave.linalg import inf_norm
from siwave.newton import NewtonConfig, NewtonConvergenceError


def small_config(**overrides):
    base = dict(
        scheme="both",
        params=make_params_delta1(10.0, 3.0, 0.5),
        grid=Grid1D(40),
        dt=0.01,
        t_final=0.2,
        initial=InitialData((BumpSpec(0.05, 0.5, 0.3),)),
        snapshot_times=(0.1, 0.2),
        newton=NewtonConfig(),
    )
    base.update(overrides)
    return RunConfig(**base)


class TestRunConfigValidation:
    def test_valid(self):
        small_config().validate()

    def test_noninteger_step_count_rejected(self):
        with pytest.raises(ValueError):
            small_config(t_final=0.205).validate()

    def test_unsorted_snapshots_rejected(self):
        with pytest.raises(ValueError):
            small_config(snapshot_times=(0.2, 0.1)).validate()

    def test_snapshot_beyond_t_final_rejected(self):
        with pytest.raises(ValueError):
            small_config(snapshot_times=(0.3,)).validate()

    def test_bogus_scheme_rejected(self):
        with pytest.raises(ValueError):
            small_config(scheme="spectral").validate()

    def test_zero_t_final_allowed(self):
        cfg = small_config(t_final=0.0, snapshot_times=(0.0,))
        cfg.validate()
        assert cfg.n_steps() == 0

    def test_newton_fd_step_defaults_to_grid_spacing(self):
        cfg = small_config()
        assert cfg.resolved_newton().fd_step == cfg.grid.dx

    def test_snapshot_step_rounding(self):
        # 0.35/0.1 = 3.4999... in floats, so the nearest step is 3
        cfg = small_config(dt=0.1, t_final=1.0, snapshot_times=(0.35, 0.4))
        steps = cfg.snapshot_steps()
        assert steps[0.35] == 3
        assert steps[0.4] == 4
        # an exact dyadic tie rounds up
        tie = small_config(dt=0.25, t_final=1.0, snapshot_times=(0.375,))
        assert tie.snapshot_steps()[0.375] == 2


class TestRun:
    def test_zero_data_all_snapshots_zero(self):
        cfg = small_config(initial=InitialData(()))
        for snap in run(cfg):
            assert np.array_equal(snap.u, np.zeros(39))
            assert np.array_equal(snap.phi, np.zeros(39))

    def test_both_schemes_emitted(self):
        snaps = run(small_config())
        schemes = {s.scheme for s in snaps}
        assert schemes == {"gfem", "fdm"}
        assert len(snaps) == 4

    def test_transform_consistency(self):
        from siwave.core import to_physical

        for snap in run(small_config()):
            expected = to_physical(snap.u, snap.t, small_config().params)
            assert np.array_equal(snap.phi, expected)

    def test_phi_omitted_when_not_requested(self):
        snaps = run(small_config(emit_physical=False))
        assert all(s.phi is None for s in snaps)

    def test_initial_only_run(self):
        cfg = small_config(scheme="gfem", t_final=0.0, snapshot_times=(0.0,))
        (snap,) = run(cfg)
        assert snap.step_index == 0
        assert np.array_equal(snap.u, sample_initial(cfg.initial, cfg.grid))

    def test_determinism_bitwise(self):
        cfg = small_config()
        first = run(cfg)
        second = run(cfg)
        for a, b in zip(first, second):
            assert np.array_equal(a.u, b.u)
            assert np.array_equal(a.phi, b.phi)

    def test_requested_time_recorded(self):
        cfg = small_config(dt=0.01, t_final=0.1, snapshot_times=(0.095,))
        (snap,) = run(cfg.validate() or dataclasses.replace(cfg, scheme="gfem"))
        assert snap.requested_t == 0.095
        assert snap.step_index == 10
        assert snap.t == pytest.approx(0.1)

    def test_symmetric_data_symmetric_snapshots(self):
        cfg = small_config()
        for snap in run(cfg):
            assert inf_norm(snap.u - snap.u[::-1]) <= 1e-10


class TestGuards:
    def test_blowup_raises_with_context(self):
        # amplitude 1e3 data jumps past 1e4 on the very first step
        cfg = small_config(
            scheme="gfem",
            grid=Grid1D(20),
            initial=InitialData((BumpSpec(1e3, 0.5, 0.3),)),
            dt=0.01,
            t_final=0.5,
            snapshot_times=(0.5,),
            blowup_guard=1e4,
        )
        with pytest.raises(BlowUpError) as err:
            run(cfg)
        assert err.value.step_index >= 1
        assert err.value.max_value > cfg.blowup_guard
        assert err.value.time == pytest.approx(err.value.step_index * cfg.dt)

    def test_runaway_growth_aborts_instead_of_emitting_nonfinite(self):
        # with the default guard, unbounded growth still surfaces as an abort
        # (Newton stalls once updates fall below float resolution) rather
        # than producing non-finite snapshots
        cfg = small_config(
            scheme="gfem",
            grid=Grid1D(20),
            initial=InitialData((BumpSpec(1e3, 0.5, 0.3),)),
            dt=0.01,
            t_final=0.5,
            snapshot_times=(0.5,),
        )
        with pytest.raises((BlowUpError, NewtonConvergenceError)):
            run(cfg)

    def test_custom_guard_trips_early(self):
        cfg = small_config(scheme="fdm", blowup_guard=1e-6)
        with pytest.raises(BlowUpError):
            run(cfg)

    def test_newton_failure_carries_step_and_time(self):
        cfg = small_config(
            scheme="gfem",
            newton=NewtonConfig(epsilon=1e-300, max_iters=2),
        )
        with pytest.raises(NewtonConvergenceError) as err:
            run(cfg)
        assert err.value.step_index == 1
        assert err.value.time == pytest.approx(cfg.dt)


class TestCompareSchemes:
    def test_zero_data_zero_diffs(self):
        report = compare_schemes(small_config(initial=InitialData(())))
        assert report.abs_diff_inf == (0.0, 0.0)
        assert report.rel_diff_inf == (0.0, 0.0)

    def test_requires_both(self):
        with pytest.raises(ValueError):
            compare_schemes(small_config(scheme="gfem"))

    def test_reference_style_agreement_small_scale(self):
        cfg = small_config(
            grid=Grid1D(100), dt=1e-3, t_final=0.1, snapshot_times=(0.05, 0.1),
            initial=InitialData((BumpSpec(0.05, 0.5, 0.5),)),
        )
        report = compare_schemes(cfg)
        assert all(r < 1e-2 for r in report.rel_diff_inf)
        assert report.gfem_iters.max_iterations <= 2
        assert report.fdm_iters.max_iterations <= 2
        assert report.gfem_iters.mean_iterations >= 1.0

    def test_report_deterministic(self):
        cfg = small_config()
        assert compare_schemes(cfg) == compare_schemes(cfg)


class TestSimulateHooks:
    def test_linear_cross_scheme_diff_shrinks_under_refinement(self):
        # measured at t = 0.75, away from the standing wave's zero crossing
        params = make_params_delta1(10.0, 3.0, 0.5)
        diffs = []
        for s in (16, 32, 64):
            grid = Grid1D(s)
            dt = 0.5 * grid.dx
            n_steps = round(0.75 / dt)
            u0 = 0.05 * np.sin(np.pi * grid.interior_nodes)
            cfg = NewtonConfig()
            a, _ = simulate("gfem", params, grid, dt, n_steps, u0, cfg,
                            snapshot_steps=(n_steps,), source_scale=0.0)
            b, _ = simulate("fdm", params, grid, dt, n_steps, u0, cfg,
                            snapshot_steps=(n_steps,), source_scale=0.0)
            diffs.append(inf_norm(a[n_steps] - b[n_steps]) / inf_norm(a[n_steps]))
        assert diffs[1] < diffs[0] and diffs[2] < diffs[1]
        # second-order schemes: each halving shrinks the gap about fourfold
        assert 2.5 <= diffs[0] / diffs[1] <= 6.0
        assert 2.5 <= diffs[1] / diffs[2] <= 6.0

    def test_jacobian_cache_matches_default_path(self):
        params = make_params_delta1(10.0, 3.0, 0.5)
        grid = Grid1D(30)
        u0 = sample_initial(InitialData((BumpSpec(0.05, 0.5, 0.3),)), grid)
        plain, _ = simulate("gfem", params, grid, 0.01, 40, u0, NewtonConfig(),
                            snapshot_steps=(40,))
        cached, _ = simulate("gfem", params, grid, 0.01, 40, u0,
                             NewtonConfig(reuse_jacobian=True),
                             snapshot_steps=(40,))
        assert inf_norm(plain[40] - cached[40]) <= 1e-12

    def test_independent_reference_solver_cross_check(self):
        # dense theta-scheme recurrences coded from scratch, nonlinearity on
        params = make_params_delta1(10.0, 3.0, 0.5)
        grid = Grid1D(12)
        dim, h = grid.n_interior, grid.dx
        dt, steps = 0.01, 30
        theta = params.theta
        u0 = sample_initial(InitialData((BumpSpec(0.05, 0.5, 0.4),)), grid)

        def reference(kind):
            if kind == "gfem":
                mass = (np.diag(np.full(dim, 2 * h / 3))
                        + np.diag(np.full(dim - 1, h / 6), 1)
                        + np.diag(np.full(dim - 1, h / 6), -1))
                stiff = (np.diag(np.full(dim, 2 / h))
                         + np.diag(np.full(dim - 1, -1 / h), 1)
                         + np.diag(np.full(dim - 1, -1 / h), -1))
                lhs = mass + theta * dt * dt * stiff
                hist = mass + (1 - theta) * dt * dt * stiff
                load = lambda u, t: dt * dt * (1 + t) ** (-10.0) * (mass @ np.abs(u) ** 3)
                two_u = lambda u: 2 * mass @ u
            else:
                a = (np.diag(np.full(dim, 2.0))
                     + np.diag(np.full(dim - 1, -1.0), 1)
                     + np.diag(np.full(dim - 1, -1.0), -1))
                c = dt * dt / (h * h)
                eye = np.eye(dim)
                lhs = eye + c * theta * a
                hist = eye + c * (1 - theta) * a
                load = lambda u, t: dt * dt * (1 + t) ** (-10.0) * np.abs(u) ** 3
                two_u = lambda u: 2 * u
            prev = u0.copy()
            curr = np.linalg.solve(lhs + hist, two_u(u0) + load(u0, 0.0))
            for n in range(1, steps):
                rhs = two_u(curr) - hist @ prev + load(curr, n * dt)
                prev, curr = curr, np.linalg.solve(lhs, rhs)
            return curr

        for kind in ("gfem", "fdm"):
            captured, _ = simulate(kind, params, grid, dt, steps, u0, NewtonConfig(),
                                   snapshot_steps=(steps,))
            assert inf_norm(captured[steps] - reference(kind)) <= 1e-9


class TestMmsStudy:
    def base(self, scheme="gfem", theta=0.5, s=8, dt=0.0625):
        return RunConfig(
            scheme=scheme,
            params=make_params_delta1(10.0, 3.0, theta),
            grid=Grid1D(s),
            dt=dt,
            t_final=0.75,
            initial=InitialData(()),
            snapshot_times=(0.75,),
            newton=NewtonConfig(),
        )

    def test_zero_solution_zero_errors(self):
        rows = mms_study(self.base(), MANUFACTURED["zero"], 3)
        assert all(r.error_inf == 0.0 for r in rows)
        assert all(r.observed_order is None for r in rows)

    @pytest.mark.parametrize("scheme", ["gfem", "fdm"])
    def test_joint_second_order(self, scheme):
        rows = mms_study(self.base(scheme=scheme), MANUFACTURED["standing_wave"], 3)
        assert 1.5 <= rows[-1].observed_order <= 2.5

    def test_temporal_first_order_for_implicit(self):
        cfg = self.base(theta=1.0, s=256, dt=0.125)
        rows = mms_study(cfg, MANUFACTURED["standing_wave"], 3, refine="temporal")
        assert 0.7 <= rows[-1].observed_order <= 1.4
        # the grid never changes in temporal mode
        assert len({r.h for r in rows}) == 1

    def test_level_geometry_joint(self):
        rows = mms_study(self.base(), MANUFACTURED["zero"], 3, refine="joint")
        assert [r.h for r in rows] == [1 / 8, 1 / 16, 1 / 32]
        assert [r.dt for r in rows] == [0.0625, 0.03125, 0.015625]

    def test_too_few_levels_rejected(self):
        with pytest.raises(ValueError):
            mms_study(self.base(), MANUFACTURED["zero"], 2)

    def test_both_scheme_rejected(self):
        with pytest.raises(ValueError):
            mms_study(self.base(scheme="both"), MANUFACTURED["zero"], 3)

    def test_bad_refine_rejected(self):
        with pytest.raises(ValueError):
            mms_study(self.base(), MANUFACTURED["zero"], 3, refine="spatial")
