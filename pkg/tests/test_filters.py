import numpy as np
import pytest

from hjfilter.filters import (
    FILTERS,
    TAIL_TOL,
    f1,
    f4,
    f_exp,
    f_exp_capped,
    get_filter,
    make_f2,
    make_f3,
)

DENSE = np.linspace(-4.0, 4.0, 1_600_001)


def test_f1_values():
    assert f1(0.7) == 0.7
    assert f1(1.5) == 0.0
    assert f1(-1.0) == -1.0


def test_f_exp_values():
    assert f_exp(0.25, 20, 4.0, 0.0) == 0.0
    assert f_exp(0.25, 20, 4.0, 0.25) == pytest.approx(0.25)
    assert abs(f_exp(0.25, 20, 4.0, 2.0)) < 1e-8


def test_f_exp_capped_values():
    assert f_exp_capped(0.001, 1.05, 0.0) == 0.0
    assert f_exp_capped(0.001, 1.05, 1.1) == 0.0
    assert f_exp_capped(0.001, 1.05, 1.0) == pytest.approx(np.exp(-0.02))


def test_f4_values():
    assert f4(0.5) == 0.5
    assert f4(1.5) == 0.5
    assert f4(-3.0) == 0.0


@pytest.mark.parametrize("name", sorted(FILTERS))
def test_odd_and_zero_at_origin(name):
    F = get_filter(name)
    assert F(0.0) == 0.0
    x = np.linspace(0, 3, 3001)
    assert np.array_equal(F(-x), -F(x))


@pytest.mark.parametrize("name", sorted(FILTERS))
def test_tail_beyond_support(name):
    F = get_filter(name)
    tail = DENSE[np.abs(DENSE) > F.support_bound]
    assert np.max(np.abs(F(tail))) <= TAIL_TOL
    if name != "f2":
        assert np.all(F(tail) == 0.0)


def test_f2_support_is_tight():
    F = make_f2()
    # just inside the bound the filter is still above the tail tolerance
    assert abs(F(F.support_bound - 1e-3)) > TAIL_TOL
    assert abs(F(F.support_bound)) == pytest.approx(TAIL_TOL, rel=1e-6)


@pytest.mark.parametrize("name", sorted(FILTERS))
def test_sup_matches_dense_scan(name):
    F = get_filter(name)
    assert F.sup_abs == pytest.approx(np.max(np.abs(F(DENSE))), abs=1e-9)


def test_f1_f3_f4_bounded_by_one():
    for name in ("f1", "f3", "f4"):
        assert np.max(np.abs(get_filter(name)(DENSE))) <= 1.0 + 1e-12


def test_f2_overshoots_one():
    # the exponential filter with a=0.25, b=20, c=4 peaks near x = 1.042
    F = make_f2()
    assert F.sup_abs == pytest.approx(1.00343, abs=1e-5)
    assert F(1.0423) > 1.0


def test_f3_peak_below_one():
    assert make_f3().sup_abs == pytest.approx(0.98668, abs=1e-5)


def test_factory_validation():
    with pytest.raises(ValueError):
        make_f2(b=3)
    with pytest.raises(ValueError):
        make_f3(a=-1)
    with pytest.raises(ValueError):
        get_filter("f7")
