"""Registry of the benchmark problems and the scheme selector grammar.

Selectors: ``AF-<HO>`` adaptive filtered, ``F-<HO>`` basic filtered (optional
``@c`` for ``eps = c*dx``), ``MONO`` monotone only, bare ``<HO>`` for the
unfiltered high-order scheme, where ``<HO>`` is one of HC, LW, LWR, LW4
(``LW4ord`` is accepted too).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from . import analysis
from .core import ConfigurationError, Grid1D, SolverConfig, TimeGrid
from .engine import RunResult, SchemeChoice, run, run_2d
from .filters import FilterFunction, make_f1
from .hamiltonian import Hamiltonian, builtin, legendre
from .highorder import SCHEMES
from .monotone import (
    MonotoneScheme,
    central_upwind_scheme,
    eikonal_scheme,
    lax_friedrichs_scheme,
)

PI = np.pi


@dataclass
class Solved:
    x: np.ndarray
    y: Optional[np.ndarray]
    u: np.ndarray
    reference: np.ndarray
    result: RunResult
    n_t: int
    dx: float

    @property
    def errors(self) -> Tuple[float, float]:
        return analysis.errors(self.u, self.reference, self.dx,
                               None if self.y is None else self.dx)


@dataclass
class Experiment:
    id: str
    description: str
    domain: Tuple[float, float]
    v0: Callable
    hamiltonian: Callable[[], Hamiltonian]
    T: float
    lam: float
    monotone: Callable[[Hamiltonian], MonotoneScheme]
    ladder: Tuple[int, ...]
    default_scheme: str
    eps_multiple: float
    dims: int = 1
    singular_points: Tuple[float, ...] = ()
    exclusion_radius: float = 0.0
    reference_kind: str = "analytic_shift"
    n_ref: int = 0

    @property
    def period(self) -> float:
        return self.domain[1] - self.domain[0]

    def grid(self, n_x: int) -> Grid1D:
        return Grid1D(self.domain[0], self.domain[1], n_x)

    def time_grid(self, n_x: int) -> TimeGrid:
        return TimeGrid(self.T, self.lam, self.grid(n_x).dx)

    def choice(self, selector: str, filt: Optional[FilterFunction] = None,
               eps_multiple: Optional[float] = None) -> SchemeChoice:
        mode, ho, mult = parse_selector(selector)
        if mult is None:
            mult = eps_multiple if eps_multiple is not None else self.eps_multiple
        return SchemeChoice(mode, self.monotone(self.hamiltonian()),
                            SCHEMES[ho] if ho else None, filt or make_f1(), mult)

    def reference(self, x: np.ndarray, y: Optional[np.ndarray] = None) -> np.ndarray:
        return _REFERENCES[self.reference_kind](self, x, y)

    def solve(self, n_x: int, selector: Optional[str] = None,
              config: Optional[SolverConfig] = None, filt: Optional[FilterFunction] = None,
              eps_multiple: Optional[float] = None, with_reference: bool = True,
              record_masks: bool = True) -> Solved:
        selector = selector or self.default_scheme
        choice = self.choice(selector, filt, eps_multiple)
        grid = self.grid(n_x)
        tg = self.time_grid(n_x)
        x = grid.x
        if self.dims == 1:
            result = run(self.v0(x), grid, tg, choice, config, record_masks=record_masks)
            y = None
        else:
            y = x.copy()
            X, Y = np.meshgrid(x, y, indexing="ij")
            result = run_2d(self.v0(X, Y), grid, grid, tg, choice, choice, config)
        ref = self.reference(x, y) if with_reference else np.full_like(result.final_state.u,
                                                                     np.nan)
        return Solved(x, y, result.final_state.u, ref, result, tg.n_steps, grid.dx)


_HO_NAMES = "|".join(sorted(SCHEMES, key=len, reverse=True))
_SELECTOR = re.compile(rf"^(?:(AF|F)-)?({_HO_NAMES})(?:@([0-9.eE+-]+))?$")


def parse_selector(selector: str):
    """``"AF-LWR"`` -> ``("AF", "LWR", None)``; ``"F-HC@5"`` -> ``("F", "HC", 5.0)``."""
    s = selector.strip()
    if s.upper() in ("MONO", "M", "MONOTONE"):
        return "M", None, None
    m = _SELECTOR.match(s)
    if not m:
        raise ConfigurationError(f"bad scheme selector {selector!r}")
    prefix, ho, mult = m.groups()
    if mult is not None and prefix != "F":
        raise ConfigurationError("an eps multiple only applies to F- selectors")
    mode = prefix or "A"
    return mode, ho, float(mult) if mult is not None else None


# initial data


def _ex1b_v0(x):
    x = np.asarray(x, dtype=np.float64)
    peak = np.minimum((1 - x) ** 2, (1 + x) ** 2)
    bump = np.sin(PI * (x - 2)) ** 2
    return np.where(np.abs(x) <= 1, peak, np.where((x >= 2) & (x <= 3), bump, 0.0))


def _ex2_bump(x):
    return np.maximum(1 - np.asarray(x) ** 2, 0.0) ** 4


def _wrap(exp: Experiment, fn):
    lo, period = exp.domain[0], exp.period
    return lambda q: fn(lo + np.mod(np.asarray(q) - lo, period))


# reference solutions at t = T


def _ref_transport(exp, x, y):
    return analysis.exact_transport(exp.v0, exp.T, x, exp.period, exp.domain[0])


def _ref_ball_min(exp, x, y):
    return analysis.ball_min(_wrap(exp, exp.v0), exp.T, x)


def _ref_hopf_lax(exp, x, y):
    return analysis.hopf_lax(_wrap(exp, exp.v0), legendre(exp.hamiltonian().label), exp.T, x)


def _ref_hopf_lax_2d(exp, x, y):
    L = legendre("quad_shift_2d_component")

    def half(q):
        return -0.5 * np.cos(PI * q)

    mx = analysis.hopf_lax(half, L, exp.T, x)
    my = analysis.hopf_lax(half, L, exp.T, y)
    return mx[:, None] + my[None, :]


def _ref_fine_grid(exp, x, y):
    return _fine_reference(exp.id, exp.n_ref)(exp.T, x)


@lru_cache(maxsize=8)
def _fine_reference(exp_id: str, n_ref: int) -> analysis.ReferenceSolution:
    exp = REGISTRY[exp_id]

    def solve(n, selector):
        s = exp.solve(n, selector, with_reference=False, record_masks=False)
        return s.x, s.u, s.result

    return analysis.fine_grid_reference(exp, n_ref, max(exp.ladder), run_fn=solve)


_REFERENCES = {
    "analytic_shift": _ref_transport,
    "ball_min": _ref_ball_min,
    "hopf_lax": _ref_hopf_lax,
    "hopf_lax_2d": _ref_hopf_lax_2d,
    "fine_grid": _ref_fine_grid,
}


def _hint(name: str, bound: float):
    return lambda: builtin(name).with_hint(bound)


REGISTRY: Dict[str, Experiment] = {}


def _register(exp: Experiment):
    REGISTRY[exp.id] = exp


_register(Experiment(
    "ex1a", "transport, smooth datum sin(pi x)", (-2.0, 2.0),
    lambda x: np.sin(PI * np.asarray(x)), _hint("transport", 1.0), 0.9, 0.9,
    central_upwind_scheme, (40, 80, 160, 320), "AF-HC", 5.0))
_register(Experiment(
    "ex1b", "transport, kinked peak plus C^2 bump", (-1.5, 3.5), _ex1b_v0,
    _hint("transport", 1.0), 2.0, 0.4, central_upwind_scheme, (50, 100, 200, 400), "AF-HC",
    10.0))
_register(Experiment(
    "ex2a", "eikonal, datum max(1-x^2,0)^4", (-2.0, 2.0), _ex2_bump, _hint("eikonal", 1.0),
    0.3, 0.375, eikonal_scheme, (40, 80, 160, 320), "AF-LWR", 5.0,
    reference_kind="ball_min"))
_register(Experiment(
    "ex2b", "eikonal, datum -max(1-x^2,0)^4", (-2.0, 2.0), lambda x: -_ex2_bump(x),
    _hint("eikonal", 1.0), 0.3, 0.375, eikonal_scheme, (40, 80, 160, 320), "AF-LWR", 5.0,
    reference_kind="ball_min"))
_register(Experiment(
    "ex3_regular", "Burgers-type HJ before the singularity", (0.0, 2.0),
    lambda x: -np.cos(PI * np.asarray(x)), _hint("burgers_shift", 1.0 + PI),
    4.0 / (5.0 * PI**2), 2.0 / PI**2, central_upwind_scheme, (40, 80, 160, 320), "AF-LWR",
    10.0, reference_kind="hopf_lax"))
_register(Experiment(
    "ex3_shock", "Burgers-type HJ after the singularity", (0.0, 2.0),
    lambda x: -np.cos(PI * np.asarray(x)), _hint("burgers_shift", 1.0 + PI),
    3.0 / (2.0 * PI**2), 15.0 / (8.0 * PI**2), central_upwind_scheme, (40, 80, 160, 320),
    "AF-LWR", 10.0, reference_kind="hopf_lax"))
_register(Experiment(
    "ex4", "nonconvex hamiltonian -cos(p+1)", (-1.0, 1.0),
    lambda x: -np.cos(PI * np.asarray(x)), _hint("nonconvex_cos", 1.0), 3.0 / (2.0 * PI**2),
    0.31, lambda H: lax_friedrichs_scheme(H, 1.0), (40, 80, 160, 320), "AF-HC", 5.0,
    singular_points=(-0.895, 0.245), exclusion_radius=0.05, reference_kind="fine_grid",
    n_ref=10240))
_register(Experiment(
    "ex5_regular", "2D splitting, smooth", (0.0, 2.0),
    lambda x, y: -0.5 * (np.cos(PI * x) + np.cos(PI * y)),
    _hint("quad_shift_2d_component", 2.0 * (1.0 + PI / 2)), 4.0 / (5.0 * PI**2),
    4.0 / (5.0 * PI**2), central_upwind_scheme, (20, 40, 80, 160), "AF-LWR", 10.0, dims=2,
    reference_kind="hopf_lax_2d"))
_register(Experiment(
    "ex5_shock", "2D splitting, after singularities", (0.0, 2.0),
    lambda x, y: -0.5 * (np.cos(PI * x) + np.cos(PI * y)),
    _hint("quad_shift_2d_component", 2.0 * (1.0 + PI / 2)), 3.0 / (2.0 * PI**2),
    3.0 / (4.0 * PI**2), central_upwind_scheme, (20, 40, 80, 160), "AF-LWR", 10.0, dims=2,
    reference_kind="hopf_lax_2d"))


def get_experiment(exp_id: str) -> Experiment:
    try:
        return REGISTRY[exp_id]
    except KeyError:
        raise ConfigurationError(
            f"unknown experiment {exp_id!r}; choose from {', '.join(REGISTRY)}") from None


def convergence(exp: Experiment, selector: Optional[str] = None,
                ladder: Optional[Sequence[int]] = None, config: Optional[SolverConfig] = None,
                filt: Optional[FilterFunction] = None, eps_multiple: Optional[float] = None,
                local: bool = False) -> analysis.ErrorReport:
    """Run a refinement ladder and tabulate errors and orders."""
    selector = selector or exp.default_scheme
    label = exp.choice(selector, filt, eps_multiple).label
    report = analysis.ErrorReport(label)
    for n in ladder or exp.ladder:
        s = exp.solve(n, selector, config, filt, eps_multiple, record_masks=False)
        if local:
            linf, l1 = analysis.local_errors_excluding(s.u, s.reference, s.x, s.dx,
                                                       exp.singular_points, exp.exclusion_radius)
        else:
            linf, l1 = s.errors
        report.add(n, s.n_t, linf, l1, s.result.wall_time)
    return report
