"""Smoothness indicators and the regularity flag used to localize ``eps^n``.

With ``e_j = (u_{j+1} - 2u_j + u_{j-1}) / dx`` and ``b_j = e_j**2`` the four
indicators of node ``j`` are ``(b_{j-1}, b_j, b_j, b_{j+1})``, so each
``b`` is computed once and shared by two neighbouring nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

import numpy as np

from .core import shift


@dataclass
class IndicatorConfig:
    sigma: float = 1.0
    M: float = 0.1
    use_mapping: bool = True
    use_phi_tilde: bool = False
    B: Optional[float] = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0 < self.M < 0.5:
            raise ValueError("M must lie in (0, 1/2)")
        if self.use_phi_tilde and (self.B is None or self.B <= 0):
            raise ValueError("phi_tilde needs a positive bound B")


@dataclass
class IndicatorState:
    beta: np.ndarray  # shape (4, ...): beta-_0, beta-_1, beta+_0, beta+_1
    omega_minus: np.ndarray
    omega_plus: np.ndarray
    omega: np.ndarray
    phi: np.ndarray

    @property
    def regularity_set(self) -> np.ndarray:
        return np.flatnonzero(self.phi)


def edge_betas(u: np.ndarray, dx: float, axis: int = -1) -> np.ndarray:
    return ((shift(u, 1, axis) - 2.0 * u + shift(u, -1, axis)) / dx) ** 2


def beta_window(u: np.ndarray, j: int, dx: float):
    """``(beta-_0, beta-_1, beta+_0, beta+_1)`` at node ``j`` (periodic)."""
    n = len(u)

    def b(c):
        return ((u[(c + 1) % n] - 2.0 * u[c % n] + u[(c - 1) % n]) / dx) ** 2

    return b(j - 1), b(j), b(j), b(j + 1)


def mapping(omega):
    """Flattening map with fixed points 0, 1/2, 1 and zero slope and
    curvature at 1/2."""
    omega = np.asarray(omega, dtype=np.float64)
    return (4.0 * omega * (0.75 - 1.5 * omega + omega**2))[()]


def _weight(b_keep, b_other, s):
    # alpha_keep / (alpha_keep + alpha_other) with alpha = 1/(beta + s)^2
    num = (b_other + s) ** 2
    den = num + (b_keep + s) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        w = num / den
    return np.where(den > 0, w, 0.5)


def omegas(betas, sigma: float, dx: float, use_mapping: bool = True):
    """``(omega-, omega+)`` from ``(beta-_0, beta-_1, beta+_0, beta+_1)``."""
    bm0, bm1, bp0, bp1 = (np.asarray(b, dtype=np.float64) for b in betas)
    s = sigma * dx * dx
    w_minus = _weight(bm1, bm0, s)
    w_plus = _weight(bp0, bp1, s)
    if use_mapping:
        w_minus, w_plus = mapping(w_minus), mapping(w_plus)
    return w_minus[()], w_plus[()]


def phi_of(omega, M: float):
    return (np.asarray(omega) >= M).astype(np.int8)[()]


def phi_tilde_of(omega, d2u, M: float, B: float):
    ok = (np.asarray(omega) >= M) & (np.abs(np.asarray(d2u)) < B)
    return ok.astype(np.int8)[()]


def indicator_state(
    u: np.ndarray,
    dx: float,
    sigma: float = 1.0,
    M: float = 0.1,
    use_mapping: bool = True,
    use_phi_tilde: bool = False,
    B: Optional[float] = None,
    axis: int = -1,
) -> IndicatorState:
    b = edge_betas(u, dx, axis)
    betas = np.stack([shift(b, -1, axis), b, b, shift(b, 1, axis)])
    w_minus, w_plus = omegas(betas, sigma, dx, use_mapping)
    omega = np.minimum(w_minus, w_plus)
    if use_phi_tilde:
        if B is None:
            raise ValueError("phi_tilde needs a bound B")
        d2u = np.sqrt(b) / dx
        phi = phi_tilde_of(omega, d2u, M, B)
    else:
        phi = phi_of(omega, M)
    return IndicatorState(betas, w_minus, w_plus, omega, np.asarray(phi, dtype=np.int8))


def curvature_bound(C: float, b: float, sigma: float, delta: float) -> float:
    """Bound on ``|D^2 u|`` over the regularity set when ``M = 1/2 - C*dx``."""
    return float(np.sqrt(np.exp(3.0 * C * b) * (sigma + delta**2) - sigma))


def undivided_difference(values: Sequence[float], i: int, start: int = 0):
    """``f[start..start+i]`` via ``f[0..i] = f[1..i] - f[0..i-1]``."""
    if i < 0 or start < 0 or start + i >= len(values):
        raise ValueError("not enough values for this undivided difference")
    row = list(values[start:start + i + 1])
    for _ in range(i):
        row = [row[k + 1] - row[k] for k in range(len(row) - 1)]
    return row[0]


def binom_alt_sum(i: int, n: int) -> int:
    """``sum_{j=0..n} C(i, j) * (-1)**(i-j)``."""
    if not 0 <= n <= i:
        raise ValueError("need 0 <= n <= i")
    return sum(comb(i, j) * (-1) ** (i - j) for j in range(n + 1))
