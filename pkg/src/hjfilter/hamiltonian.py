"""Hamiltonians ``H(p)`` with derivatives, and conjugates for the convex ones."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class UnknownHamiltonian(KeyError):
    pass


@dataclass(frozen=True)
class Hamiltonian:
    """``eval`` and ``deriv`` must accept scalars and numpy arrays."""

    eval: Callable
    deriv: Callable
    label: str
    lipschitz_hint: Optional[float] = None

    def __call__(self, p):
        return self.eval(p)

    def with_hint(self, bound: float) -> "Hamiltonian":
        return Hamiltonian(self.eval, self.deriv, self.label, bound)


def _transport():
    return Hamiltonian(
        eval=lambda p: 1.0 * np.asarray(p, dtype=np.float64),
        deriv=lambda p: np.ones_like(np.asarray(p, dtype=np.float64)),
        label="transport",
        lipschitz_hint=1.0,
    )


def _eikonal():
    # sign(0) = 0 is the symmetric subgradient choice
    return Hamiltonian(eval=np.abs, deriv=np.sign, label="eikonal", lipschitz_hint=1.0)


def _burgers_shift():
    return Hamiltonian(
        eval=lambda p: 0.5 * (np.asarray(p) + 1.0) ** 2,
        deriv=lambda p: np.asarray(p) + 1.0,
        label="burgers_shift",
    )


def _nonconvex_cos():
    return Hamiltonian(
        eval=lambda p: -np.cos(np.asarray(p) + 1.0),
        deriv=lambda p: np.sin(np.asarray(p) + 1.0),
        label="nonconvex_cos",
        lipschitz_hint=1.0,
    )


def _quad_shift():
    return Hamiltonian(
        eval=lambda p: (np.asarray(p) + 1.0) ** 2,
        deriv=lambda p: 2.0 * (np.asarray(p) + 1.0),
        label="quad_shift_2d_component",
    )


_CATALOG = {
    "transport": _transport,
    "eikonal": _eikonal,
    "burgers_shift": _burgers_shift,
    "nonconvex_cos": _nonconvex_cos,
    "quad_shift_2d_component": _quad_shift,
}

CATALOG_NAMES = tuple(_CATALOG)


def builtin(name: str) -> Hamiltonian:
    try:
        return _CATALOG[name]()
    except KeyError:
        raise UnknownHamiltonian(
            f"unknown hamiltonian {name!r}; choose from {', '.join(CATALOG_NAMES)}"
        ) from None


def _indicator(mask_fn):
    def L(q):
        q = np.asarray(q, dtype=np.float64)
        return np.where(mask_fn(q), 0.0, np.inf)[()]

    return L


def legendre(name: str) -> Callable:
    """Closed-form convex conjugate ``L(q) = sup_p [p*q - H(p)]``.

    Infinite values are returned as ``np.inf``.
    """
    if name == "transport":
        return _indicator(lambda q: np.abs(q - 1.0) <= 1e-12)
    if name == "eikonal":
        return _indicator(lambda q: np.abs(q) <= 1.0)
    if name == "burgers_shift":
        return lambda q: 0.5 * np.asarray(q) ** 2 - np.asarray(q)
    if name == "quad_shift_2d_component":
        return lambda q: 0.25 * np.asarray(q) ** 2 - np.asarray(q)
    if name == "nonconvex_cos":
        raise ValueError("nonconvex_cos has no convex conjugate")
    raise UnknownHamiltonian(f"unknown hamiltonian {name!r}")
