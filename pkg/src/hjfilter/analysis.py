"""Exact and reference solutions, error norms and convergence tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .core import ConfigurationError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ReferenceSolution:
    eval: Callable
    kind: str  # analytic_shift | hopf_lax | ball_min | fine_grid
    provenance: str = ""

    def __call__(self, t, x, *rest):
        return self.eval(t, x, *rest)


def exact_transport(v0: Callable, t: float, x, period: Optional[float] = None, x_min: float = 0.0):
    """``v0(x - t)``; with ``period`` the shifted point is wrapped into
    ``[x_min, x_min + period)`` before evaluating ``v0``."""
    y = np.asarray(x, dtype=np.float64) - t
    if period is not None:
        y = x_min + np.mod(y - x_min, period)
    return v0(y)


def _minimize(objective: Callable, x: np.ndarray, lo: float, hi: float, n_coarse: int, tol: float):
    """Vectorized scan-then-golden-section minimization over ``a`` in ``[lo, hi]``
    for every point in ``x``."""
    a = np.linspace(lo, hi, n_coarse)
    vals = objective(x[:, None], a[None, :])
    best = np.argmin(vals, axis=1)
    best_val = vals[np.arange(len(x)), best]
    step = a[1] - a[0] if n_coarse > 1 else 0.0
    left = np.clip(a[best] - step, lo, hi)
    right = np.clip(a[best] + step, lo, hi)
    while np.max(right - left) > tol:
        c = right - _GOLDEN * (right - left)
        d = left + _GOLDEN * (right - left)
        take_left = objective(x, c) < objective(x, d)
        right = np.where(take_left, d, right)
        left = np.where(take_left, left, c)
    mid = 0.5 * (left + right)
    refined = objective(x, mid)
    return np.minimum(best_val, refined)


def hopf_lax(
    v0: Callable,
    L: Callable,
    t: float,
    x,
    a_range: Tuple[float, float] = (-5.0, 5.0),
    n_coarse: int = 2001,
    tol: float = 1e-10,
):
    """``min_a [v0(x - a*t) + t*L(a)]`` for each ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if t == 0:
        return v0(x)

    def objective(xx, a):
        return v0(xx - a * t) + t * L(a)

    return _minimize(objective, x, a_range[0], a_range[1], n_coarse, tol)


def ball_min(v0: Callable, t: float, x, n_coarse: int = 2001, tol: float = 1e-10):
    """``min_{|y - x| <= t} v0(y)``: the viscosity solution of ``v_t + |v_x| = 0``."""
    return hopf_lax(v0, lambda a: np.zeros_like(a), t, x, (-1.0, 1.0), n_coarse, tol)


def errors(u: np.ndarray, reference: np.ndarray, dx: float, dy: Optional[float] = None):
    """``(max |u - v|, cell-weighted sum |u - v|)``."""
    u = np.asarray(u, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if u.shape != reference.shape:
        raise ValueError("solution and reference have different shapes")
    diff = np.abs(u - reference)
    weight = dx if dy is None else dx * dy
    return float(np.max(diff)), float(weight * np.sum(diff))


def local_errors_excluding(
    u: np.ndarray,
    reference: np.ndarray,
    x: np.ndarray,
    dx: float,
    singular_points: Sequence[float] = (),
    radius: float = 0.0,
):
    """Error norms restricted to nodes with ``|x - x_i| >= radius`` for every
    singular point ``x_i``."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    keep = np.ones(len(x), dtype=bool)
    for xs in singular_points:
        keep &= np.abs(np.asarray(x) - xs) >= radius
    if not np.any(keep):
        raise ValueError("every node lies inside an exclusion ball")
    return errors(np.asarray(u)[keep], np.asarray(reference)[keep], dx)


def order(e_coarse: float, e_fine: float, n_coarse: int = 1, n_fine: int = 2) -> float:
    """Observed order between two refinements (``log2`` of the error ratio for
    grid doubling)."""
    if e_coarse <= 0 or e_fine <= 0:
        return float("nan")
    return math.log(e_coarse / e_fine) / math.log(n_fine / n_coarse)


@dataclass
class ErrorRow:
    n_x: int
    n_t: int
    linf: float
    l1: float
    cpu_seconds: float
    linf_order: Optional[float] = None
    l1_order: Optional[float] = None


@dataclass
class ErrorReport:
    scheme: str
    rows: List[ErrorRow] = field(default_factory=list)

    def add(self, n_x: int, n_t: int, linf: float, l1: float, cpu_seconds: float) -> ErrorRow:
        row = ErrorRow(n_x, n_t, linf, l1, cpu_seconds)
        if self.rows:
            prev = self.rows[-1]
            row.linf_order = order(prev.linf, linf, prev.n_x, n_x)
            row.l1_order = order(prev.l1, l1, prev.n_x, n_x)
        self.rows.append(row)
        return row

    def linf_orders(self) -> List[float]:
        return [r.linf_order for r in self.rows[1:]]

    def l1_orders(self) -> List[float]:
        return [r.l1_order for r in self.rows[1:]]


def periodic_interpolant(x: np.ndarray, u: np.ndarray, period: float) -> Callable:
    """Periodic cubic spline through nodal values on a uniform grid."""
    xs = np.append(x, x[0] + period)
    us = np.append(u, u[0])
    spline = CubicSpline(xs, us, bc_type="periodic")
    x0 = x[0]

    def fn(q):
        q = np.asarray(q, dtype=np.float64)
        return spline(x0 + np.mod(q - x0, period))

    return fn


def fine_grid_reference(problem, n_ref: int, finest_nx: Optional[int] = None, run_fn=None):
    """Reference from an adaptive 4th-order run on ``n_ref`` nodes.

    ``problem`` must provide ``solve(n_x, selector)`` returning
    ``(x, u_final, result)`` and a ``period``.
    """
    if finest_nx is not None and n_ref < 8 * finest_nx:
        raise ConfigurationError(f"reference grid {n_ref} below 8x the finest grid {finest_nx}")
    x, u, _ = (run_fn or problem.solve)(n_ref, "AF-LW4")
    interp = periodic_interpolant(x, u, problem.period)
    return ReferenceSolution(lambda t, q: interp(q), "fine_grid",
                             f"AF-LW4 on {n_ref} nodes")
