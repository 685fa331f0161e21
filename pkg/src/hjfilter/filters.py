"""Filter functions that switch between the high-order and monotone updates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FilterFunction:
    """``support_bound``: |x| beyond which the filter is below ``TAIL_TOL``.
    ``sup_abs``: the supremum of ``|F|`` over the real line."""

    eval: Callable
    support_bound: float
    sup_abs: float
    label: str

    def __call__(self, x):
        return self.eval(x)


def f1(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) <= 1.0, x, 0.0)[()]


def f_exp(a: float, b: float, c: float, x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        return (x * np.exp(-c * (np.abs(x) - a) ** b))[()]


def f_exp_capped(a: float, b: float, x):
    x = np.asarray(x, dtype=np.float64)
    inside = np.abs(x) < b
    gap = np.where(inside, b - np.abs(x), 1.0)
    return np.where(inside, x * np.exp(-a / gap), 0.0)[()]


def f4(x):
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    return np.where(ax <= 1.0, x, np.where(ax >= 2.0, 0.0, np.sign(x) * (2.0 - ax)))[()]


def _peak(fn, lo: float, hi: float) -> float:
    res = minimize_scalar(lambda s: -abs(float(fn(s))), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return abs(float(fn(res.x)))


def make_f1() -> FilterFunction:
    return FilterFunction(f1, 1.0, 1.0, "f1")


def make_f2(a: float = 0.25, b: float = 20, c: float = 4.0) -> FilterFunction:
    if b <= 0 or int(b) != b or int(b) % 2 or c <= 0:
        raise ValueError("f_exp needs an even positive b and c > 0")

    def fn(x):
        return f_exp(a, b, c, x)

    # beyond x = a the filter decays monotonically once past its peak
    grid = np.linspace(a, a + 50.0, 200001)
    vals = np.abs(fn(grid))
    i = int(np.argmax(vals))
    above = np.nonzero(vals[i:] >= TAIL_TOL)[0]
    j = i + int(above[-1])
    support = brentq(lambda s: float(fn(s)) - TAIL_TOL, grid[j], grid[j + 1])
    sup = _peak(fn, max(grid[i] - 0.01, 0.0), grid[i] + 0.01)
    return FilterFunction(fn, support, sup, f"f2(a={a:g},b={b:g},c={c:g})")


def make_f3(a: float = 0.001, b: float = 1.05) -> FilterFunction:
    if a <= 0 or b <= 0:
        raise ValueError("f_exp_capped needs a, b > 0")

    def fn(x):
        return f_exp_capped(a, b, x)

    return FilterFunction(fn, b, _peak(fn, 0.0, b), f"f3(a={a:g},b={b:g})")


def make_f4() -> FilterFunction:
    return FilterFunction(f4, 2.0, 1.0, "f4")


FILTERS = {"f1": make_f1, "f2": make_f2, "f3": make_f3, "f4": make_f4}


def get_filter(name: str) -> FilterFunction:
    try:
        return FILTERS[name]()
    except KeyError:
        raise ValueError(f"unknown filter {name!r}; choose from {', '.join(FILTERS)}") from None
