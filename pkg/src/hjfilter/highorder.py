"""High-order (possibly unstable) numerical hamiltonians.

Each scheme is a function of the five neighbours ``u[j-2..j+2]`` which may
be scalars or whole shifted arrays, so the same code serves a single
window and a full periodic grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import shift
from .hamiltonian import Hamiltonian


def _heun(um2, um1, u0, up1, up2, dx, dt, H):
    def central(a, b):
        return (b - a) / (2.0 * dx)

    # stage-1 values at j-1 and j+1; u*_j cancels in the centered difference
    star_m1 = um1 - dt * H(central(um2, u0))
    star_p1 = up1 - dt * H(central(u0, up2))
    return 0.5 * (H(central(um1, up1)) + H(central(star_m1, star_p1)))


def _lax_wendroff(um2, um1, u0, up1, up2, dx, dt, H):
    dm = (u0 - um1) / dx
    dp = (up1 - u0) / dx
    lam = dt / dx
    Hp, Hm = H(dp), H(dm)
    return 0.5 * (Hp + Hm - lam * H.deriv(0.5 * (dm + dp)) * (Hp - Hm))


def _richtmyer(um2, um1, u0, up1, up2, dx, dt, H):
    dm = (u0 - um1) / dx
    dp = (up1 - u0) / dx
    lam = dt / dx
    return H(0.5 * (dm + dp) - 0.5 * lam * (H(dp) - H(dm)))


def _lax_wendroff_4(um2, um1, u0, up1, up2, dx, dt, H):
    dx2 = dx * dx
    slope4 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * dx)
    curv4 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * dx2)
    Hd = H.deriv

    # one-sided pairs centred at j+1, j, j-1
    slope_r, curv_r = (up2 - u0) / (2.0 * dx), (up2 - 2.0 * up1 + u0) / dx2
    slope_c, curv_c = (up1 - um1) / (2.0 * dx), (up1 - 2.0 * u0 + um1) / dx2
    slope_l, curv_l = (u0 - um2) / (2.0 * dx), (u0 - 2.0 * um1 + um2) / dx2

    g4 = Hd(slope4)
    gr, gc, gl = Hd(slope_r), Hd(slope_c), Hd(slope_l)
    # integer powers by multiplication; float ** is several times slower
    gr3, gl3 = gr * gr * gr, gl * gl * gl
    H1 = H(slope4)
    H2 = g4 * g4 * curv4
    H3 = (gr3 * curv_r - gl3 * curv_l) / (2.0 * dx)
    H4 = (gr3 * gr * curv_r - 2.0 * (gc * gc) ** 2 * curv_c + gl3 * gl * curv_l) / dx2
    return H1 - 0.5 * dt * (H2 - dt / 3.0 * (H3 - 0.25 * dt * H4))


@dataclass(frozen=True)
class HighOrderScheme:
    label: str
    stencil_radius: int
    declared_order: int
    kernel: Callable

    def apply(self, window: Sequence[float], dx: float, dt: float, H: Hamiltonian) -> float:
        """Numerical hamiltonian at the centre of a ``2k+1`` node window."""
        w = np.asarray(window, dtype=np.float64)
        k = self.stencil_radius
        if w.shape != (2 * k + 1,):
            raise ValueError(f"{self.label} expects a window of {2 * k + 1} values")
        if k == 1:
            w = np.concatenate([[np.nan], w, [np.nan]])
        return float(self.kernel(*w, dx, dt, H))

    def flux(self, u: np.ndarray, dx: float, dt: float, H: Hamiltonian, axis: int = -1):
        """Numerical hamiltonian at every node of a periodic array."""
        if self.stencil_radius == 1:
            um1, up1 = shift(u, -1, axis), shift(u, 1, axis)
            return self.kernel(None, um1, u, up1, None, dx, dt, H)
        nb = [shift(u, k, axis) for k in (-2, -1, 0, 1, 2)]
        return self.kernel(*nb, dx, dt, H)

    def update(self, u: np.ndarray, dx: float, dt: float, H: Hamiltonian, axis: int = -1):
        return u - dt * self.flux(u, dx, dt, H, axis)


HEUN_CENTERED = HighOrderScheme("HC", 2, 2, _heun)
LAX_WENDROFF = HighOrderScheme("LW", 1, 2, _lax_wendroff)
RICHTMYER = HighOrderScheme("LWR", 1, 2, _richtmyer)
LAX_WENDROFF_4 = HighOrderScheme("LW4", 2, 4, _lax_wendroff_4)

SCHEMES = {s.label: s for s in (HEUN_CENTERED, LAX_WENDROFF, RICHTMYER, LAX_WENDROFF_4)}
SCHEMES["LW4ord"] = LAX_WENDROFF_4


def heun_centered(window, dx, dt, H):
    return HEUN_CENTERED.apply(window, dx, dt, H)


def lax_wendroff(window, dx, dt, H):
    return LAX_WENDROFF.apply(window, dx, dt, H)


def richtmyer(window, dx, dt, H):
    return RICHTMYER.apply(window, dx, dt, H)


def lax_wendroff_4(window, dx, dt, H):
    return LAX_WENDROFF_4.apply(window, dx, dt, H)


@dataclass
class ProbeResult:
    dx: np.ndarray
    residuals: np.ndarray
    order: float
    exact: bool


def consistency_probe(
    scheme: HighOrderScheme,
    H: Hamiltonian,
    v: Callable[[float, np.ndarray], np.ndarray],
    dx_sequence: Sequence[float],
    lam: float,
    period: float,
    t: float = 0.0,
) -> ProbeResult:
    """Measure the order of ``max_j |v(t+dt, x_j) - S^A(v(t))_j| / dt``.

    ``v(t, x)`` is an exact smooth solution, periodic with the given period.
    """
    dxs = np.asarray(dx_sequence, dtype=np.float64)
    residuals = []
    for dx in dxs:
        n = int(round(period / dx))
        x = dx * np.arange(n)
        dt = lam * dx
        u = v(t, x)
        res = np.abs(v(t + dt, x) - scheme.update(u, dx, dt, H)) / dt
        residuals.append(float(np.max(res)))
    residuals = np.asarray(residuals)
    if np.all(residuals <= 1e-13):
        return ProbeResult(dxs, residuals, float("inf"), True)
    slope = np.polyfit(np.log(dxs), np.log(residuals), 1)[0]
    return ProbeResult(dxs, residuals, float(slope), False)
