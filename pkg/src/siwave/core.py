"""Shared domain types and the dissipative change of variables.

The solvers integrate the transformed unknown u on [0,1]; the physical field
is recovered as phi(x,t) = (1+t)^(-mu/2) * u(x,t).  The damping/mass interplay
is classified by the discriminant delta = (mu-1)^2 - 4*nu^2; the default
construction pins delta = 1, which removes the residual potential term from
the transformed equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

THETA_VALUES = (0.5, 1.0)


def _check_theta(theta: float) -> None:
    if theta not in THETA_VALUES:
        raise ValueError(f"theta must be 1/2 or 1, got {theta!r}")


@dataclass(frozen=True)
class ModelParams:
    """Physical and scheme constants.

    Attributes:
        mu: damping coefficient, > 0
        nu_squared: mass coefficient (squared), >= 0
        p: nonlinearity exponent, > 1
        theta: time-weighting of the spatial operator, 1/2 or 1
        delta: discriminant (mu-1)^2 - 4*nu_squared, stored as computed
    """

    mu: float
    nu_squared: float
    p: float
    theta: float
    delta: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.nu_squared >= 0:
            raise ValueError(f"nu_squared must be nonnegative, got {self.nu_squared}")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        _check_theta(self.theta)
        expected = (self.mu - 1.0) ** 2 - 4.0 * self.nu_squared
        if self.delta != expected:
            raise ValueError(
                f"delta={self.delta} inconsistent with (mu-1)^2 - 4*nu^2 = {expected}"
            )


def make_params_delta1(mu: float, p: float, theta: float) -> ModelParams:
    """Build parameters under the delta = 1 coupling, nu^2 = ((mu-1)^2 - 1)/4.

    Requires mu >= 2 so that nu^2 is nonnegative.
    """
    if not mu >= 2:
        raise ValueError(
            f"delta=1 coupling needs mu >= 2 (else nu^2 < 0), got mu={mu}"
        )
    nu_squared = ((mu - 1.0) ** 2 - 1.0) / 4.0
    delta = (mu - 1.0) ** 2 - 4.0 * nu_squared
    return ModelParams(mu=mu, nu_squared=nu_squared, p=p, theta=theta, delta=delta)


def make_params(mu: float, nu_squared: float, p: float, theta: float) -> ModelParams:
    """Build parameters with an explicit mass coefficient (arbitrary delta)."""
    delta = (mu - 1.0) ** 2 - 4.0 * nu_squared
    return ModelParams(mu=mu, nu_squared=nu_squared, p=p, theta=theta, delta=delta)


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh of [0,1] with n_cells cells, nodes x_l = l*dx, l = 0..n_cells.

    Uniformity is structural: a single spacing dx = 1/n_cells is stored and the
    node array is generated from it, with both endpoints exact.  Homogeneous
    Dirichlet conditions remove the two boundary nodes, leaving n_cells - 1
    interior unknowns.
    """

    n_cells: int
    dx: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be positive, got {self.n_cells}")
        object.__setattr__(self, "dx", 1.0 / self.n_cells)
        nodes = np.linspace(0.0, 1.0, self.n_cells + 1)
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_interior(self) -> int:
        return self.n_cells - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @classmethod
    def from_spacing(cls, dx: float) -> "Grid1D":
        """Grid from a target spacing; 1/dx must be integral to 1e-9 relative."""
        if not dx > 0:
            raise ValueError(f"dx must be positive, got {dx}")
        cells = 1.0 / dx
        n = round(cells)
        if n < 1 or abs(cells - n) > 1e-9 * max(1.0, cells):
            raise ValueError(f"1/dx = {cells} is not an integer cell count")
        return cls(n_cells=n)


@dataclass(frozen=True)
class TimeState:
    """Three-level history consumed by one time step: u at levels n-1 and n."""

    u_prev: np.ndarray
    u_curr: np.ndarray
    step_index: int
    dt: float

    def __post_init__(self) -> None:
        u_prev = np.asarray(self.u_prev, dtype=float)
        u_curr = np.asarray(self.u_curr, dtype=float)
        if u_prev.shape != u_curr.shape or u_prev.ndim != 1:
            raise ValueError(
                f"history levels must be equal-length vectors, got shapes "
                f"{u_prev.shape} and {u_curr.shape}"
            )
        if self.step_index < 0:
            raise ValueError(f"step_index must be nonnegative, got {self.step_index}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "u_prev", u_prev)
        object.__setattr__(self, "u_curr", u_curr)

    @property
    def time(self) -> float:
        return self.step_index * self.dt


def source_coefficient(params: ModelParams, t: float) -> float:
    """Decay factor (1+t)^(-mu*(p-1)/2) of the nonlinear source."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return (1.0 + t) ** (-0.5 * params.mu * (params.p - 1.0))


def to_physical(u_value, t: float, params: ModelParams):
    """Map the transformed field to the physical one: phi = (1+t)^(-mu/2) * u."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return (1.0 + t) ** (-0.5 * params.mu) * u_value


def from_physical(phi_value, t: float, params: ModelParams):
    """Inverse of to_physical: u = (1+t)^(mu/2) * phi."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return (1.0 + t) ** (0.5 * params.mu) * phi_value


def nodal_power(values, p: float) -> np.ndarray:
    """Elementwise |v|^p.

    Integer exponents are evaluated by repeated multiplication, which keeps
    the homogeneity |c*v|^p = c^p * |v|^p exact when c is a power of two.
    """
    a = np.abs(np.asarray(values, dtype=float))
    k = int(p)
    if k == p and 1 <= k <= 64:
        result = None
        base = a
        n = k
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result
    return a**p
