import numpy as np
import pytest

from hjfilter.core import ConfigurationError, Grid1D, SolutionState
from hjfilter.hamiltonian import builtin
from hjfilter.monotone import (
    central_upwind,
    central_upwind_scheme,
    eikonal_max,
    eikonal_scheme,
    lax_friedrichs,
    lax_friedrichs_scheme,
    monotone_step,
    monotone_update,
    verify_monotone,
)

from oracles import slope_bounded_pair


def godunov_eikonal(pm, pp):
    """Oracle: Godunov flux of |p| (min over [pm, pp] if pm <= pp, else max)."""
    if pm <= pp:
        return min(abs(p) for p in np.linspace(pm, pp, 2001))
    return max(abs(p) for p in np.linspace(pp, pm, 2001))


def literal_printed_cu(H, pm, pp):
    dm, dp = H.deriv(pm), H.deriv(pp)
    ap, am = max(dm, dp, 0.0), min(dm, dp, 0.0)
    return (am * H(pp) - ap * H(pm) - ap * am * (pp - pm)) / (ap - am)


def catalog_schemes():
    yield eikonal_scheme()
    for name, hint in (("transport", 1.0), ("burgers_shift", 6.0), ("nonconvex_cos", 1.0),
                       ("quad_shift_2d_component", 12.0), ("eikonal", 1.0)):
        H = builtin(name).with_hint(hint)
        yield central_upwind_scheme(H)
        yield lax_friedrichs_scheme(H, 1.0)


def test_eikonal_max_values():
    assert eikonal_max(1.0, -2.0) == 2.0
    assert eikonal_max(0.3, 0.3) == pytest.approx(0.3)
    # rarefaction: this flux gives -1 where Godunov gives 0
    assert eikonal_max(-1.0, 1.0) == -1.0
    assert godunov_eikonal(-1.0, 1.0) == pytest.approx(0.0, abs=1e-3)


def test_eikonal_max_agrees_with_godunov_on_shocks():
    for pm, pp in ((1.0, -2.0), (0.5, -0.5), (2.0, 1.0), (-1.0, -3.0)):
        assert eikonal_max(pm, pp) == pytest.approx(godunov_eikonal(pm, pp), abs=1e-3)


def test_central_upwind_values():
    T = builtin("transport")
    assert central_upwind(T, 0.4, 0.9) == pytest.approx(0.4)
    E = builtin("eikonal")
    assert central_upwind(E, -1.0, 1.0) == pytest.approx(0.0)
    assert central_upwind(E, -1.0, 1.0) == pytest.approx(godunov_eikonal(-1.0, 1.0), abs=1e-3)


def test_central_upwind_degenerate_branch():
    Q = builtin("burgers_shift")
    # H_p = p + 1 vanishes at both arguments
    assert central_upwind(Q, -1.0, -1.0) == pytest.approx(0.0)


def test_printed_cu_formula_breaks_consistency():
    H = builtin("burgers_shift")
    for p in (0.3, 1.0, 2.5):
        assert literal_printed_cu(H, p, p) == pytest.approx(-H(p))
        assert central_upwind(H, p, p) == pytest.approx(H(p), abs=1e-12)


def test_lax_friedrichs_values():
    E = builtin("eikonal")
    assert lax_friedrichs(E, 1.0, -1.0, 1.0) == pytest.approx(-1.0)
    C = builtin("nonconvex_cos")
    assert lax_friedrichs(C, 1.0, 0.0, 0.0) == pytest.approx(-np.cos(1.0))
    with pytest.raises(ConfigurationError):
        lax_friedrichs(C, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("scheme", list(catalog_schemes()), ids=lambda s: f"{s.label}-{s.H.label}")
def test_consistency_on_diagonal(scheme):
    p = np.random.default_rng(3).uniform(-5, 5, 1000)
    assert np.max(np.abs(scheme(p, p) - scheme.H(p))) <= 1e-12


def test_constant_state_step():
    for scheme in catalog_schemes():
        u = np.full(16, 0.7)
        out = monotone_update(u, scheme, 0.01, 0.1)
        assert np.allclose(out, 0.7 - 0.01 * scheme.H(0.0), atol=1e-15)


def test_eikonal_saw_drops_by_dt():
    # periodic tent: distance to the nearest peak, slopes +-1 away from extrema
    dx, dt = 0.1, 0.05
    x = dx * np.arange(40)
    u = -np.minimum(np.abs(x - 1.0), np.abs(x - 3.0))
    out = monotone_update(u, eikonal_scheme(), dt, dx)
    interior = [j for j in range(40) if 1 <= j % 20 <= 8 or 12 <= j % 20 <= 19]
    for j in interior:
        assert out[j] == pytest.approx(u[j] - dt)


def test_transport_cu_is_upwind():
    g = Grid1D(-1.0, 1.0, 40)
    u = np.sin(np.pi * g.x)
    dt = 0.5 * g.dx
    H = builtin("transport")
    out = monotone_update(u, central_upwind_scheme(H), dt, g.dx)
    upwind = u - dt / g.dx * (u - np.roll(u, 1))
    assert np.allclose(out, upwind, atol=1e-14)


def test_monotone_step_checks_cfl():
    H = builtin("transport")
    state = SolutionState(np.zeros(10))
    with pytest.raises(ConfigurationError):
        monotone_step(state, central_upwind_scheme(H), 0.2, 0.1)
    assert monotone_step(state, central_upwind_scheme(H), 0.05, 0.1).step == 1


def test_cfl_needs_hint():
    scheme = central_upwind_scheme(builtin("burgers_shift"))
    with pytest.raises(ConfigurationError):
        scheme.cfl_ratio_bound(0.1)


def test_verify_eikonal_max():
    rep = verify_monotone(eikonal_scheme(), 0.5)
    assert rep.sign_minus_violation == 0.0
    assert rep.sign_plus_violation == 0.0
    assert rep.cfl_excess <= 0.0
    assert rep.passed


def test_verify_lf_marginal():
    rep = verify_monotone(lax_friedrichs_scheme(builtin("eikonal"), 1.0), 1.0)
    assert rep.passed
    assert rep.marginal


def test_verify_lf_undersized_theta():
    rep = verify_monotone(lax_friedrichs_scheme(builtin("eikonal"), 0.5), 1.0)
    assert rep.sign_minus_violation > 0.1
    assert not rep.passed


# slopes stay in [-2, 2]: these bound |H_p| there
SLOPE_BOUNDS = [("transport", 1.0), ("burgers_shift", 3.0), ("nonconvex_cos", 1.0),
                ("eikonal", 1.0)]


@pytest.mark.parametrize("name,bound", SLOPE_BOUNDS)
def test_comparison_and_nonexpansive(name, bound):
    rng = np.random.default_rng(11)
    H = builtin(name).with_hint(bound)
    dx = 2.0 / 48
    # a_plus - a_minus can reach twice max|H_p| for the central-upwind flux
    cases = [(central_upwind_scheme(H), 0.45 / bound), (lax_friedrichs_scheme(H, bound),
                                                        0.9 / bound)]
    for scheme, lam in cases:
        for _ in range(100):
            u, v = slope_bounded_pair(rng)
            su = monotone_update(u, scheme, lam * dx, dx)
            sv = monotone_update(v, scheme, lam * dx, dx)
            assert np.all(su <= sv + 1e-12)
            w, _ = slope_bounded_pair(rng)
            sw = monotone_update(w, scheme, lam * dx, dx)
            assert np.max(np.abs(su - sw)) <= np.max(np.abs(u - w)) + 1e-12


def test_central_upwind_needs_stricter_ratio_at_sign_change():
    E = builtin("eikonal")
    scheme = central_upwind_scheme(E)
    # a shock in |p| has a_plus - a_minus = 2
    assert not verify_monotone(scheme, 0.9).passed
    assert verify_monotone(scheme, 0.5).passed


def test_first_order_consistency():
    H = builtin("transport")
    scheme = central_upwind_scheme(H)
    res = []
    dxs = [2.0 / n for n in (40, 80, 160, 320, 640)]
    for dx in dxs:
        x = dx * np.arange(int(round(2 / dx)))
        dt = 0.5 * dx
        v0, v1 = np.sin(np.pi * x), np.sin(np.pi * (x - dt))
        res.append(np.max(np.abs(v1 - monotone_update(v0, scheme, dt, dx))) / dt)
    slope = np.polyfit(np.log(dxs), np.log(res), 1)[0]
    assert 0.8 <= slope <= 1.2
