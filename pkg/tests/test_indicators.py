import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hjfilter.indicators import (
    IndicatorConfig,
    beta_window,
    binom_alt_sum,
    edge_betas,
    indicator_state,
    curvature_bound,
    mapping,
    omegas,
    phi_of,
    phi_tilde_of,
    undivided_difference,
)


def grid(n, lo=-1.0, hi=1.0):
    dx = (hi - lo) / n
    return lo + dx * np.arange(n), dx


def test_beta_window_affine():
    x, dx = grid(20)
    assert np.allclose(beta_window(3 * x + 1, 7, dx), 0.0, atol=1e-24)


def test_beta_window_parabola():
    x, dx = grid(20)
    assert np.allclose(beta_window(x**2, 10, dx), 0.04)


def test_beta_window_kink_at_node():
    x, dx = grid(20)
    j = 10
    assert x[j] == pytest.approx(0.0, abs=1e-15)
    b = beta_window(np.abs(x), j, dx)
    assert b == pytest.approx((0.0, 4.0, 4.0, 0.0), abs=1e-12)


def test_edge_sharing_is_exact():
    rng = np.random.default_rng(0)
    u = rng.normal(size=30)
    st_ = indicator_state(u, 0.1)
    # beta+_0 at j equals beta-_1 at j; beta+_1 at j equals beta-_1 at j+1
    assert np.array_equal(st_.beta[2], st_.beta[1])
    assert np.array_equal(st_.beta[3], np.roll(st_.beta[1], -1))
    assert np.array_equal(st_.beta[0], np.roll(st_.beta[1], 1))
    for j in range(30):
        assert tuple(st_.beta[:, j]) == pytest.approx(beta_window(u, j, 0.1))


def test_equal_betas_give_half():
    b = (0.3, 0.3, 0.3, 0.3)
    for m in (False, True):
        wm, wp = omegas(b, 1.0, 0.1, m)
        assert wm == 0.5 and wp == 0.5


def test_kink_weight_value():
    wm, _ = omegas((0.0, 4.0, 4.0, 0.0), 1.0, 0.1, use_mapping=False)
    a0, a1 = 1.0 / 0.01**2, 1.0 / 4.01**2
    assert wm == pytest.approx(a1 / (a0 + a1))
    assert wm == pytest.approx(6.2189e-6, rel=1e-4)


def test_mapping_fixed_points():
    assert mapping(0.0) == 0.0
    assert mapping(1.0) == 1.0
    assert mapping(0.5) == 0.5
    assert mapping(0.25) == pytest.approx(0.4375)


def test_mapping_flat_at_half():
    h = 1e-3
    assert (mapping(0.5 + h) - 0.5) == pytest.approx(4 * h**3, rel=1e-9)


def test_zero_betas_and_sigma():
    wm, wp = omegas((0.0, 0.0, 0.0, 0.0), 0.0, 0.1, False)
    assert wm == 0.5 and wp == 0.5


def test_phi_values():
    assert phi_of(0.49, 0.1) == 1
    assert phi_of(6.22e-6, 0.1) == 0
    assert phi_tilde_of(0.49, 50.0, 0.1, 40.0) == 0
    assert phi_of(0.1, 0.1) == 1  # threshold inclusive


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=6, max_size=40), st.booleans())
def test_state_ranges(values, mapped):
    u = np.array(values)
    s = indicator_state(u, 0.05, use_mapping=mapped)
    assert np.all(s.beta >= 0)
    for w in (s.omega_minus, s.omega_plus):
        assert np.all((w >= 0) & (w <= 1))
    assert np.array_equal(s.omega, np.minimum(s.omega_minus, s.omega_plus))
    assert set(np.unique(s.phi)) <= {0, 1}
    assert np.array_equal(s.regularity_set, np.flatnonzero(s.phi == 1))


def test_indicator_config_validation():
    with pytest.raises(ValueError):
        IndicatorConfig(M=0.6)
    with pytest.raises(ValueError):
        IndicatorConfig(use_phi_tilde=True)
    with pytest.raises(ValueError):
        indicator_state(np.zeros(8), 0.1, use_phi_tilde=True)


def test_phi_tilde_cuts_large_curvature():
    x, dx = grid(100)
    u = np.sin(np.pi * x)
    plain = indicator_state(u, dx)
    tilde = indicator_state(u, dx, use_phi_tilde=True, B=5.0)
    # |D^2 u| reaches pi^2 > 5 at the extrema
    assert np.sum(tilde.phi) < np.sum(plain.phi)
    assert np.all(tilde.phi <= plain.phi)


# refinement behaviour


def kinked(xs):
    return lambda x: np.abs(x - xs) + np.sin(x)


def _beta_at(f, x0, dx):
    """b at a node placed at x0, from three samples."""
    return ((f(x0 + dx) - 2 * f(x0) + f(x0 - dx)) / dx) ** 2


def test_beta_slopes_smooth_and_kink():
    f = kinked(0.0)
    dxs = np.array([0.1 / 2**k for k in range(5)])
    smooth = [_beta_at(f, 0.7, dx) for dx in dxs]
    straddle = [_beta_at(f, 0.3 * dx, dx) for dx in dxs]
    s_smooth = np.polyfit(np.log(dxs), np.log(smooth), 1)[0]
    s_kink = np.polyfit(np.log(dxs), np.log(straddle), 1)[0]
    assert s_smooth == pytest.approx(2.0, abs=0.4)
    assert abs(s_kink) <= 0.2


def _omega_plus_at(f, x0, dx, mapped):
    b = [_beta_at(f, x0 + k * dx, dx) for k in (-1, 0, 0, 1)]
    return omegas(b, 1.0, dx, mapped)[1]


@pytest.mark.parametrize("mapped,expected", [(False, 1.0), (True, 3.0)])
def test_omega_deviation_slope(mapped, expected):
    f = np.cos  # f'' = -cos is nonzero near x = 0.3
    dxs = np.array([0.05 / 2**k for k in range(5)])
    dev = [abs(_omega_plus_at(f, 0.3, dx, mapped) - 0.5) for dx in dxs]
    slope = np.polyfit(np.log(dxs), np.log(dev), 1)[0]
    assert slope == pytest.approx(expected, abs=0.3)


def _weights_near_kink(offset, dx, mapped=False):
    """(omega-, omega+) at node 0 for a kink at offset*dx."""
    f = kinked(offset * dx)
    betas = [_beta_at(f, k * dx, dx) for k in (-1, 0, 0, 1)]
    return omegas(betas, 1.0, dx, mapped)


def _is_half(w, dx):
    return abs(w - 0.5) < 10 * dx


def _is_small(w, dx):
    return w < 100 * dx**4


def _is_one(w, dx):
    return abs(1 - w) < 100 * dx**4


def _is_order_one(w, dx):
    return 100 * dx**4 <= w <= 1 - 100 * dx**4


@pytest.mark.parametrize("dx", [0.01, 0.005])
def test_five_case_classification(dx):
    # kink in (x_{j-2}, x_{j-1}]
    for off in (-1.7, -1.0):
        wm, wp = _weights_near_kink(off, dx)
        assert _is_one(wm, dx) and _is_half(wp, dx)
    # kink in (x_{j-1}, x_j)
    wm, wp = _weights_near_kink(-0.4, dx)
    assert _is_order_one(wm, dx) and _is_small(wp, dx)
    # kink on x_j
    wm, wp = _weights_near_kink(0.0, dx)
    assert _is_small(wm, dx) and _is_small(wp, dx)
    # kink in (x_j, x_{j+1})
    wm, wp = _weights_near_kink(0.6, dx)
    assert _is_small(wm, dx) and _is_order_one(wp, dx)
    # kink in [x_{j+1}, x_{j+2})
    for off in (1.0, 1.5):
        wm, wp = _weights_near_kink(off, dx)
        assert _is_half(wm, dx) and _is_one(wp, dx)


@pytest.mark.parametrize("mapped", [False, True])
def test_flag_off_exactly_between_neighbours(mapped):
    dx = 0.005
    for off in (k / 10 for k in range(-29, 30)):
        wm, wp = _weights_near_kink(off, dx, mapped)
        inside = -1.0 < off < 1.0
        assert (min(wm, wp) < 0.1) == inside, off


# curvature bound on the regularity set with M = 1/2 - C*dx


def _components(mask):
    """Maximal runs of True in a periodic mask, as index lists."""
    n = len(mask)
    if mask.all():
        return [list(range(n))]
    start = int(np.flatnonzero(~mask)[0])
    comps, cur = [], []
    for k in range(1, n + 1):
        j = (start + k) % n
        if mask[j]:
            cur.append(j)
        elif cur:
            comps.append(cur)
            cur = []
    if cur:
        comps.append(cur)
    return comps


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("n", [100, 200, 400])
def test_curvature_bound_on_regularity_set(seed, n):
    rng = np.random.default_rng(seed)
    C, sigma = 1.0, 1.0
    x, dx = grid(n, -2.0, 2.0)
    kinks = rng.uniform(-0.9, 0.9, 3)
    amp = rng.uniform(-1, 1, 3)
    u = sum(a * np.maximum(1 - np.abs(x - s) / 0.5, 0.0) ** 3 for a, s in zip(amp, kinks))
    u += 0.3 * np.maximum(1 - x**2, 0.0) ** 2 * np.abs(x - kinks[0])
    M = 0.5 - C * dx
    st_ = indicator_state(u, dx, sigma=sigma, M=M, use_mapping=False)
    d2 = np.sqrt(st_.beta[1]) / dx
    for comp in _components(st_.phi.astype(bool)):
        vals = d2[comp]
        anchor = int(np.argmin(vals))
        delta = float(vals[anchor])
        span = max(anchor, len(comp) - 1 - anchor) * dx
        bound = curvature_bound(C, span, sigma, delta)
        assert np.max(vals) <= bound + 1e-9


def test_curvature_bound_closed_form():
    assert curvature_bound(1.0, 0.0, 1.0, 2.0) == pytest.approx(2.0)
    assert curvature_bound(0.5, 2.0, 1.0, 0.0) == pytest.approx(np.sqrt(np.e**3 - 1))


# undivided differences and the binomial identities


def test_undivided_difference_squares():
    f = [0, 1, 4, 9]
    assert undivided_difference(f, 2) == 2
    assert undivided_difference(f, 3) == 0
    assert undivided_difference(f, 0, start=2) == 4
    with pytest.raises(ValueError):
        undivided_difference(f, 4)


def test_binom_examples():
    assert binom_alt_sum(3, 3) == 0
    assert binom_alt_sum(3, 1) == 2
    with pytest.raises(ValueError):
        binom_alt_sum(2, 3)


def test_binom_identity_exhaustive():
    for i in range(1, 9):
        for n in range(0, i + 1):
            expected = 0 if n == i else comb(i - 1, n) * (-1) ** (i - n)
            assert binom_alt_sum(i, n) == expected


def test_undivided_difference_identity_exhaustive():
    rng = np.random.default_rng(4)
    for i in range(1, 9):
        for _ in range(20):
            f = [int(v) for v in rng.integers(-50, 50, i + 1)]
            lhs = undivided_difference(f, i)
            for l_ in range(0, i + 1):
                rhs = sum(comb(i - l_, j) * (-1) ** (i - l_ - j) * undivided_difference(f, l_, j)
                          for j in range(i - l_ + 1))
                assert lhs == rhs


def test_undivided_difference_identity_all_sign_patterns():
    # every vector in {-1, 0, 1}^(i+1), i <= 6
    for i in range(1, 7):
        for f in itertools.product((-1, 0, 1), repeat=i + 1):
            lhs = undivided_difference(f, i)
            for l_ in range(i + 1):
                rhs = sum(comb(i - l_, j) * (-1) ** (i - l_ - j) * undivided_difference(f, l_, j)
                          for j in range(i - l_ + 1))
                assert lhs == rhs


def test_edge_betas_axis():
    u = np.outer(np.arange(6.0) ** 2, np.ones(3))
    b = edge_betas(u, 1.0, axis=0)
    assert np.allclose(b[1:-1], 4.0)
