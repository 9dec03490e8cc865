"""Solvers for the 1+1 semilinear wave equation with scale-invariant damping and mass.

The physical field phi obeys

    phi_tt - phi_xx + mu/(1+t) phi_t + nu^2/(1+t)^2 phi = |phi|^p

on [0,1] with homogeneous Dirichlet data.  Under the delta = 1 coupling
(delta = (mu-1)^2 - 4 nu^2) the substitution phi = (1+t)^(-mu/2) u reduces it
to u_tt - u_xx = (1+t)^(-mu(p-1)/2) |u|^p, which is what the two schemes here
(linear-hat Galerkin elements and pure finite differences, both with
theta-weighted implicit time stepping and frozen-Jacobian Newton
linearization) integrate; phi is recovered at output time.
"""

from .core import (
    Grid1D,
    ModelParams,
    TimeState,
    from_physical,
    make_params,
    make_params_delta1,
    nodal_power,
    source_coefficient,
    to_physical,
)
from .driver import (
    MANUFACTURED,
    BlowUpError,
    ComparisonReport,
    ManufacturedSolution,
    MmsLevel,
    RunConfig,
    Snapshot,
    compare_schemes,
    mms_study,
    run,
    simulate,
)
from .fdm import FdmOperators, fdm_assemble, fdm_first_step, fdm_source, fdm_step
from .gfem import GfemOperators, assemble, gfem_first_step, gfem_step, nonlinear_load
from .initcond import BumpSpec, InitialData, bump_eval, sample_initial
from .linalg import (
    BandedMatrix,
    DenseMatrix,
    NotPositiveDefiniteError,
    SingularMatrixError,
    banded_factor_solve,
    dense_factor_solve,
    inf_norm,
    second_difference_matrix,
    shift_scale,
)
from .newton import (
    NewtonConfig,
    NewtonConvergenceError,
    NewtonReport,
    fd_jacobian,
    newton_solve,
)

__version__ = "0.1.0"
