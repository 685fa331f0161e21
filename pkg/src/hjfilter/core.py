"""Grids, solution state, configuration and periodic difference operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class ConfigurationError(ValueError):
    """Invalid grid, time step or solver parameters."""


class NumericalBlowup(FloatingPointError):
    """A time step produced non-finite values."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite values produced at step {step}")


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid with nodes ``x_min + j*dx`` for ``j = 0..n_cells-1``."""

    x_min: float
    x_max: float
    n_cells: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary != "periodic":
            raise ConfigurationError(f"unsupported boundary {self.boundary!r}")
        if self.n_cells < 5:
            raise ConfigurationError("need at least 5 cells for the 5-point stencils")
        if not self.x_max > self.x_min:
            raise ConfigurationError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_cells, dtype=np.float64)

    def index(self, j: int) -> int:
        return j % self.n_cells

    def wrap(self, x):
        """Map coordinates into ``[x_min, x_max)``."""
        return self.x_min + np.mod(np.asarray(x, dtype=np.float64) - self.x_min, self.length)


@dataclass(frozen=True)
class TimeGrid:
    """Time stepping with ``dt = lambda*dx`` and ``(N-1)*dt < T <= N*dt``.

    When ``T`` is not a multiple of ``dt`` the final step is shortened so
    that the run ends exactly at ``T``.
    """

    t_final: float
    lam: float
    dx: float

    def __post_init__(self):
        if self.t_final < 0:
            raise ConfigurationError("t_final must be nonnegative")
        if self.lam <= 0 or self.dx <= 0:
            raise ConfigurationError("lambda and dx must be positive")

    @property
    def dt(self) -> float:
        return self.lam * self.dx

    @property
    def n_steps(self) -> int:
        if self.t_final == 0:
            return 0
        ratio = self.t_final / self.dt
        n = math.ceil(ratio)
        # T = N*dt up to rounding must not spawn an extra sliver step
        if n - ratio > 1.0 - 1e-9:
            n -= 1
        return max(n, 1)

    def step_sizes(self) -> np.ndarray:
        n = self.n_steps
        steps = np.full(n, self.dt)
        if n:
            steps[-1] = self.t_final - (n - 1) * self.dt
        return steps


@dataclass
class SolverConfig:
    """Parameters of the adaptive filtered scheme.

    ``M_slope`` switches the indicator threshold to ``1/2 - M_slope*dx``;
    ``B_bound=None`` lets the engine pick a bound from the initial datum
    when ``use_phi_tilde`` is on.
    """

    K: float = 1.0
    sigma: float = 1.0
    M_threshold: float = 0.1
    M_slope: Optional[float] = None
    B_bound: Optional[float] = None
    eps_floor: Optional[float] = None
    use_mapping: bool = True
    use_phi_tilde: bool = False

    def __post_init__(self):
        if not self.K > 0.5:
            raise ConfigurationError("K must exceed 1/2")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")
        if self.M_slope is None and not 0 < self.M_threshold < 0.5:
            raise ConfigurationError("M must lie in (0, 1/2)")
        if self.B_bound is not None and self.B_bound <= 0:
            raise ConfigurationError("B must be positive")
        if self.eps_floor is not None and self.eps_floor < 0:
            raise ConfigurationError("eps_floor must be nonnegative")

    def threshold(self, dx: float) -> float:
        if self.M_slope is None:
            return self.M_threshold
        M = 0.5 - self.M_slope * dx
        if not 0 < M < 0.5:
            raise ConfigurationError(f"M(dx) = {M} outside (0, 1/2)")
        return M

    def floor(self, u: np.ndarray) -> float:
        if self.eps_floor is not None:
            return self.eps_floor
        return 1e-14 * (1.0 + float(np.max(np.abs(u))))


@dataclass
class SolutionState:
    u: np.ndarray
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        self.u = np.ascontiguousarray(self.u, dtype=np.float64)
        if not np.all(np.isfinite(self.u)):
            raise NumericalBlowup(self.step)


# Difference operators. ``u`` is a periodic array; ``j`` selects a node
# (wrapped), or all nodes when omitted. ``axis`` picks the sweep direction
# for multi-dimensional arrays.

Index = Optional[int]


def shift(u: np.ndarray, k: int, axis: int = -1) -> np.ndarray:
    """Return the array ``w`` with ``w[j] = u[j + k]`` (periodic)."""
    return np.roll(u, -k, axis=axis)


def _at(values: np.ndarray, j: Index, axis: int):
    if j is None:
        return values
    return np.take(values, j % values.shape[axis], axis=axis)


def d_plus(u: np.ndarray, j: Index = None, dx: float = 1.0, axis: int = -1):
    return _at((shift(u, 1, axis) - u) / dx, j, axis)


def d_minus(u: np.ndarray, j: Index = None, dx: float = 1.0, axis: int = -1):
    return _at((u - shift(u, -1, axis)) / dx, j, axis)


def d_central(u: np.ndarray, j: Index = None, dx: float = 1.0, axis: int = -1):
    return _at((shift(u, 1, axis) - shift(u, -1, axis)) / (2.0 * dx), j, axis)


def second_difference(u: np.ndarray, j: Index = None, dx: float = 1.0, axis: int = -1):
    return _at((shift(u, 1, axis) - 2.0 * u + shift(u, -1, axis)) / dx**2, j, axis)


def sample(fn: Callable, grid: Grid1D) -> np.ndarray:
    return np.asarray(fn(grid.x), dtype=np.float64)
