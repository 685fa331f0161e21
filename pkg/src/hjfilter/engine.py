"""Adaptive filtered time stepping.

One step of the adaptive scheme runs in three phases:

1. indicators: the regularity flag ``phi`` from the current data,
2. threshold: ``eps^n``, a max-reduction over the flagged nodes,
3. update: monotone step plus a filtered high-order correction.

Every phase takes an ``axis`` so that a two-dimensional array is swept one
direction at a time (Lie-Trotter splitting).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import (
    ConfigurationError,
    Grid1D,
    NumericalBlowup,
    SolutionState,
    SolverConfig,
    TimeGrid,
    d_central,
    d_minus,
    d_plus,
    second_difference,
)
from .filters import FilterFunction, make_f1
from .highorder import HighOrderScheme
from .indicators import IndicatorConfig, indicator_state
from .monotone import MonotoneScheme

MONOTONE = 0
HIGHORDER = 1


@dataclass
class StepDiagnostics:
    eps_n: float
    phi_mask: np.ndarray
    activity_mask: np.ndarray  # 1 where the high-order update is taken
    lipschitz_estimate: float

    @property
    def n_phi_zero(self) -> int:
        return int(self.phi_mask.size - np.count_nonzero(self.phi_mask))


@dataclass
class RunResult:
    final_state: SolutionState
    diagnostics: List[StepDiagnostics]
    wall_time: float
    dt: float = 0.0


def lipschitz_estimate(u: np.ndarray, dx: float) -> float:
    """``max |u_{j+1} - u_j| / dx`` over all axes."""
    return max(float(np.max(np.abs(d_plus(u, dx=dx, axis=a)))) for a in range(u.ndim))


def eps_terms(u: np.ndarray, monotone: MonotoneScheme, lam: float, dx: float, axis: int = -1):
    """Per-node quantity whose (K-scaled) maximum over the regularity set is
    ``eps^n``."""
    H = monotone.H
    dp = d_plus(u, dx=dx, axis=axis)
    dm = d_minus(u, dx=dx, axis=axis)
    dc = d_central(u, dx=dx, axis=axis)
    h = monotone.h
    return np.abs(
        H(dc)
        - H(dc - lam * (H(dp) - H(dm)))
        + (h(dc, dp) - h(dc, dm))
        - (h(dp, dc) - h(dm, dc))
    )


def epsilon_n(
    u: np.ndarray,
    monotone: MonotoneScheme,
    lam: float,
    dx: float,
    K: float,
    region: Optional[np.ndarray] = None,
    axis: int = -1,
    keepdims: bool = False,
):
    """Adaptive threshold. ``region`` is a boolean mask (or index array) of
    the regularity set; an empty region gives 0. With ``keepdims`` the max
    is taken along ``axis`` only (one threshold per line)."""
    if isinstance(u, SolutionState):
        u = u.u
    terms = K * eps_terms(u, monotone, lam, dx, axis)
    if region is None:
        mask = np.ones(terms.shape, dtype=bool)
    else:
        region = np.asarray(region)
        if region.dtype == bool or region.shape == terms.shape:
            mask = region.astype(bool)
        else:
            mask = np.zeros(terms.size, dtype=bool)
            mask[region.astype(int)] = True
            mask = mask.reshape(terms.shape)
    masked = np.where(mask, terms, 0.0)
    if keepdims:
        return np.max(masked, axis=axis, keepdims=True)
    return float(np.max(masked)) if masked.size else 0.0


def _filtered_update(su, sm, eps, dt, filt, phi, floor):
    """``sm + phi*eps*dt*F((su - sm)/(eps*dt))``, skipping degenerate eps."""
    eps = np.broadcast_to(np.asarray(eps, dtype=np.float64), su.shape)
    live = (eps > floor) & (phi != 0)
    scale = np.where(live, eps * dt, 1.0)
    arg = (su - sm) / scale
    corr = np.where(live, scale * filt(arg), 0.0)
    active = live & (np.abs(su - sm) <= scale)
    return sm + corr, active


def _check_finite(u, step):
    if not np.all(np.isfinite(u)):
        raise NumericalBlowup(step)


def af_update(
    u: np.ndarray,
    monotone: MonotoneScheme,
    highorder: HighOrderScheme,
    filt: FilterFunction,
    config: SolverConfig,
    dt: float,
    dx: float,
    axis: int = -1,
    eps_per_line: bool = False,
    B: Optional[float] = None,
):
    """One adaptive filtered step along ``axis``. Returns the new array and
    ``(eps, phi, activity)``."""
    H = monotone.H
    lam = dt / dx
    ind_cfg = IndicatorConfig(
        sigma=config.sigma,
        M=config.threshold(dx),
        use_mapping=config.use_mapping,
        use_phi_tilde=config.use_phi_tilde,
        B=B if B is not None else config.B_bound,
    )
    ind = indicator_state(u, dx, ind_cfg.sigma, ind_cfg.M, ind_cfg.use_mapping,
                          ind_cfg.use_phi_tilde, ind_cfg.B, axis)
    phi = ind.phi
    eps = epsilon_n(u, monotone, lam, dx, config.K, phi.astype(bool), axis, keepdims=eps_per_line)
    sm = u - dt * monotone(d_minus(u, dx=dx, axis=axis), d_plus(u, dx=dx, axis=axis))
    su = highorder.update(u, dx, dt, H, axis)
    new, active = _filtered_update(su, sm, eps, dt, filt, phi, config.floor(u))
    return new, eps, phi, active


def af_step(
    state: SolutionState,
    monotone: MonotoneScheme,
    highorder: HighOrderScheme,
    filt: FilterFunction,
    config: SolverConfig,
    dt: float,
    dx: float,
    B: Optional[float] = None,
):
    new, eps, phi, active = af_update(state.u, monotone, highorder, filt, config, dt, dx, B=B)
    _check_finite(new, state.step)
    diag = StepDiagnostics(float(np.max(eps)), phi, active.astype(np.int8),
                           lipschitz_estimate(state.u, dx))
    return SolutionState(new, state.t + dt, state.step + 1), diag


def basic_filtered_update(
    u: np.ndarray,
    monotone: MonotoneScheme,
    highorder: HighOrderScheme,
    filt: FilterFunction,
    eps_fixed: float,
    dt: float,
    dx: float,
    eps_floor: float = 0.0,
    axis: int = -1,
):
    sm = u - dt * monotone(d_minus(u, dx=dx, axis=axis), d_plus(u, dx=dx, axis=axis))
    su = highorder.update(u, dx, dt, monotone.H, axis)
    phi = np.ones(u.shape, dtype=np.int8)
    new, active = _filtered_update(su, sm, eps_fixed, dt, filt, phi, eps_floor)
    return new, active


def basic_filtered_step(
    state: SolutionState,
    monotone: MonotoneScheme,
    highorder: HighOrderScheme,
    filt: FilterFunction,
    eps_fixed: float,
    dt: float,
    dx: float,
    eps_floor: float = 0.0,
) -> SolutionState:
    """Filtered step with a constant threshold and no regularity flag."""
    new, _ = basic_filtered_update(state.u, monotone, highorder, filt, eps_fixed, dt, dx, eps_floor)
    _check_finite(new, state.step)
    return SolutionState(new, state.t + dt, state.step + 1)


@dataclass
class SchemeChoice:
    """How to advance one step.

    ``mode``: ``"AF"`` adaptive filtered, ``"F"`` basic filtered with
    ``eps = eps_multiple*dx``, ``"M"`` monotone only, ``"A"`` unfiltered
    high-order.
    """

    mode: str
    monotone: MonotoneScheme
    highorder: Optional[HighOrderScheme] = None
    filt: FilterFunction = field(default_factory=make_f1)
    eps_multiple: float = 10.0

    def __post_init__(self):
        if self.mode not in ("AF", "F", "M", "A"):
            raise ConfigurationError(f"unknown scheme mode {self.mode!r}")
        if self.mode != "M" and self.highorder is None:
            raise ConfigurationError(f"mode {self.mode} needs a high-order scheme")

    @property
    def label(self) -> str:
        if self.mode == "M":
            return "MONO"
        if self.mode == "A":
            return self.highorder.label
        if self.mode == "F":
            return f"F-{self.highorder.label}({self.eps_multiple:g}dx)"
        return f"AF-{self.highorder.label}"


def sweep(
    u: np.ndarray,
    choice: SchemeChoice,
    config: SolverConfig,
    dt: float,
    dx: float,
    axis: int = -1,
    eps_per_line: bool = False,
    B: Optional[float] = None,
):
    """Advance ``u`` by one step along ``axis``. Returns ``(u_new, eps, phi, active)``."""
    H = choice.monotone.H
    if choice.mode == "AF":
        return af_update(u, choice.monotone, choice.highorder, choice.filt, config, dt, dx,
                         axis, eps_per_line, B)
    if choice.mode == "F":
        eps = choice.eps_multiple * dx
        new, active = basic_filtered_update(u, choice.monotone, choice.highorder, choice.filt,
                                            eps, dt, dx, config.floor(u), axis)
        return new, eps, np.ones(u.shape, dtype=np.int8), active
    if choice.mode == "M":
        new = u - dt * choice.monotone(d_minus(u, dx=dx, axis=axis), d_plus(u, dx=dx, axis=axis))
        return new, 0.0, np.ones(u.shape, dtype=np.int8), np.zeros(u.shape, dtype=bool)
    new = choice.highorder.update(u, dx, dt, H, axis)
    return new, 0.0, np.ones(u.shape, dtype=np.int8), np.ones(u.shape, dtype=bool)


def default_phi_bound(u0: np.ndarray, dx: float) -> float:
    """``100 * max |D^2 u0|`` (at least 1), used when phi-tilde is on."""
    curv = max(float(np.max(np.abs(second_difference(u0, dx=dx, axis=a)))) for a in range(u0.ndim))
    return 100.0 * max(curv, 1.0)


def run(
    u0: np.ndarray,
    grid: Grid1D,
    time_grid: TimeGrid,
    choice: SchemeChoice,
    config: Optional[SolverConfig] = None,
    check_cfl: bool = True,
    record_masks: bool = True,
) -> RunResult:
    """Advance a 1D periodic datum to ``time_grid.t_final``."""
    config = config or SolverConfig()
    dx = grid.dx
    if check_cfl and not choice.monotone.cfl_ratio_bound(time_grid.lam):
        raise ConfigurationError(
            f"CFL violated for {choice.monotone.label} at lambda={time_grid.lam:g}"
        )
    u = np.array(u0, dtype=np.float64)
    if u.shape != (grid.n_cells,):
        raise ConfigurationError("initial datum does not match the grid")
    B = None
    if config.use_phi_tilde and config.B_bound is None:
        B = default_phi_bound(u, dx)
    diagnostics = []
    t = 0.0
    start = time.perf_counter()
    for n, dt in enumerate(time_grid.step_sizes()):
        lip = lipschitz_estimate(u, dx)
        new, eps, phi, active = sweep(u, choice, config, dt, dx, B=B)
        _check_finite(new, n)
        if record_masks:
            diagnostics.append(StepDiagnostics(float(np.max(eps)), phi,
                                               active.astype(np.int8), lip))
        else:
            diagnostics.append(StepDiagnostics(float(np.max(eps)), phi[:0], active[:0], lip))
        u = new
        t += dt
    wall = time.perf_counter() - start
    return RunResult(SolutionState(u, time_grid.t_final, time_grid.n_steps), diagnostics, wall,
                     time_grid.dt)


# two-dimensional splitting


@dataclass
class State2D:
    grid_x: Grid1D
    grid_y: Grid1D
    u: np.ndarray  # u[i, k] at (x_i, y_k)
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        self.u = np.ascontiguousarray(self.u, dtype=np.float64)
        if self.u.shape != (self.grid_x.n_cells, self.grid_y.n_cells):
            raise ConfigurationError("2D array shape does not match the grids")


def lie_trotter_step_2d(
    state: State2D,
    choice_x: SchemeChoice,
    choice_y: SchemeChoice,
    config: SolverConfig,
    dt: float,
    eps_per_line: bool = False,
    B: Optional[float] = None,
):
    """``u^{n+1} = S_y(S_x(u^n))``. Returns the new state and the per-sweep
    ``(eps, phi, active)`` tuples."""
    ux, *diag_x = sweep(state.u, choice_x, config, dt, state.grid_x.dx, axis=0,
                        eps_per_line=eps_per_line, B=B)
    _check_finite(ux, state.step)
    uy, *diag_y = sweep(ux, choice_y, config, dt, state.grid_y.dx, axis=1,
                        eps_per_line=eps_per_line, B=B)
    _check_finite(uy, state.step)
    return State2D(state.grid_x, state.grid_y, uy, state.t + dt, state.step + 1), (diag_x, diag_y)


def run_2d(
    u0: np.ndarray,
    grid_x: Grid1D,
    grid_y: Grid1D,
    time_grid: TimeGrid,
    choice_x: SchemeChoice,
    choice_y: SchemeChoice,
    config: Optional[SolverConfig] = None,
    eps_per_line: bool = False,
    check_cfl: bool = True,
) -> RunResult:
    config = config or SolverConfig()
    for ch in (choice_x, choice_y):
        if check_cfl and not ch.monotone.cfl_ratio_bound(time_grid.lam):
            raise ConfigurationError(f"CFL violated for {ch.monotone.label}")
    state = State2D(grid_x, grid_y, u0)
    B = None
    if config.use_phi_tilde and config.B_bound is None:
        B = default_phi_bound(state.u, grid_x.dx)
    diagnostics = []
    start = time.perf_counter()
    for dt in time_grid.step_sizes():
        lip = lipschitz_estimate(state.u, grid_x.dx)
        state, (dx_diag, dy_diag) = lie_trotter_step_2d(state, choice_x, choice_y, config, dt,
                                                         eps_per_line, B)
        eps = max(float(np.max(dx_diag[0])), float(np.max(dy_diag[0])))
        phi = np.minimum(dx_diag[1], dy_diag[1])
        active = dx_diag[2] & dy_diag[2]
        diagnostics.append(StepDiagnostics(eps, phi, active.astype(np.int8), lip))
    wall = time.perf_counter() - start
    final = SolutionState(state.u, time_grid.t_final, time_grid.n_steps)
    return RunResult(final, diagnostics, wall, time_grid.dt)
