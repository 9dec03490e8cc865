"""Symmetric tridiagonal and dense direct solvers.

All time-stepping matrices (mass, stiffness and their theta/dt combinations,
and the second-difference matrix) are symmetric positive definite tridiagonal;
they are factored once per run by an LDL^T elimination.  The dense path exists
for the finite-difference Newton Jacobian and uses LAPACK's partial-pivot LU.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class LinearSolveError(RuntimeError):
    """Base class for direct-solver failures."""


class NotPositiveDefiniteError(LinearSolveError):
    """LDL^T hit a nonpositive pivot: the matrix is not SPD."""


class SingularMatrixError(LinearSolveError):
    """LU produced a pivot below the singularity tolerance."""


def inf_norm(v) -> float:
    """Max-norm of a vector; 0 for an empty one."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


@dataclass(frozen=True)
class BandedMatrix:
    """Symmetric tridiagonal matrix; only diagonal and one off-diagonal stored."""

    dim: int
    diag: np.ndarray
    offdiag: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        diag = np.array(self.diag, dtype=float)
        off = np.array(self.offdiag, dtype=float)
        if diag.shape != (self.dim,):
            raise ValueError(f"diag must have length {self.dim}, got {diag.shape}")
        if off.shape != (self.dim - 1,):
            raise ValueError(
                f"offdiag must have length {self.dim - 1}, got {off.shape}"
            )
        diag.flags.writeable = False
        off.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        if self.dim > 1:
            y[:-1] += self.offdiag * x[1:]
            y[1:] += self.offdiag * x[:-1]
        return y

    __matmul__ = matvec

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            a[idx, idx + 1] = self.offdiag
            a[idx + 1, idx] = self.offdiag
        return a

    def factor(self) -> "BandedFactor":
        """LDL^T factorization; raises NotPositiveDefiniteError on pivot <= 0."""
        d = self.diag.tolist()
        e = self.offdiag.tolist()
        pivots = [0.0] * self.dim
        lowers = [0.0] * max(self.dim - 1, 0)
        piv = d[0]
        if piv <= 0.0:
            raise NotPositiveDefiniteError(f"pivot 0 is {piv}")
        pivots[0] = piv
        for i in range(self.dim - 1):
            l = e[i] / piv
            lowers[i] = l
            piv = d[i + 1] - l * e[i]
            if piv <= 0.0:
                raise NotPositiveDefiniteError(f"pivot {i + 1} is {piv}")
            pivots[i + 1] = piv
        return BandedFactor(dim=self.dim, pivots=pivots, lowers=lowers)


@dataclass(frozen=True)
class BandedFactor:
    """LDL^T factors of a BandedMatrix; reusable across many right-hand sides."""

    dim: int
    pivots: list
    lowers: list

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.dim,):
            raise ValueError(f"rhs must have length {self.dim}, got {b.shape}")
        n = self.dim
        piv = self.pivots
        low = self.lowers
        z = b.tolist()
        for i in range(1, n):
            z[i] -= low[i - 1] * z[i - 1]
        x = [z[i] / piv[i] for i in range(n)]
        for i in range(n - 2, -1, -1):
            x[i] -= low[i] * x[i + 1]
        return np.array(x)


def second_difference_matrix(dim: int) -> BandedMatrix:
    """The tridiagonal (2, -1) matrix of the interior second-difference stencil."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return BandedMatrix(dim=dim, diag=np.full(dim, 2.0), offdiag=np.full(dim - 1, -1.0))


def shift_scale(m: BandedMatrix, alpha: float, beta: float) -> BandedMatrix:
    """Entrywise alpha*I + beta*M."""
    return BandedMatrix(
        dim=m.dim, diag=alpha + beta * m.diag, offdiag=beta * m.offdiag
    )


def banded_factor_solve(m: BandedMatrix, b) -> np.ndarray:
    """Solve M x = b by LDL^T; convenience wrapper over factor().solve()."""
    return m.factor().solve(b)


SINGULARITY_RTOL = 1e-14


@dataclass(frozen=True)
class DenseMatrix:
    """Dense square matrix; holds the finite-difference Newton Jacobian."""

    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"entries must be {self.dim}x{self.dim}, got {entries.shape}"
            )
        object.__setattr__(self, "entries", entries)

    def factor(self) -> "DenseFactor":
        """Partial-pivot LU; raises SingularMatrixError on a negligible pivot."""
        with warnings.catch_warnings():
            # the pivot check below turns scipy's singular-matrix warning
            # into a typed error
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(self.entries, check_finite=False)
        scale = float(np.max(np.abs(self.entries))) if self.dim else 0.0
        smallest = float(np.min(np.abs(np.diag(lu))))
        if smallest <= SINGULARITY_RTOL * scale or smallest == 0.0:
            raise SingularMatrixError(
                f"pivot {smallest:.3e} below tolerance "
                f"{SINGULARITY_RTOL:.0e} * {scale:.3e}"
            )
        return DenseFactor(dim=self.dim, lu=lu, piv=piv)


@dataclass(frozen=True)
class DenseFactor:
    dim: int
    lu: np.ndarray = field(repr=False)
    piv: np.ndarray = field(repr=False)

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.dim,):
            raise ValueError(f"rhs must have length {self.dim}, got {b.shape}")
        return scipy.linalg.lu_solve((self.lu, self.piv), b, check_finite=False)


def dense_factor_solve(j: DenseMatrix, b) -> np.ndarray:
    """Solve J x = b by partial-pivot LU."""
    return j.factor().solve(b)
