import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emberflow.errors import InvalidScenarioError
from emberflow.wind import (ConstantWind, PyrogenicModel, TableWind, evaluate_wind,
                            pyrogenic_velocity, wind_term)


def arr(*v):
    return tuple(np.array([x]) for x in v)


def test_constant_wind():
    assert evaluate_wind(ConstantWind((-1.0, 0.4)), 123.0) == (-1.0, 0.4)


def test_table_wind_lookup_and_hold_last():
    w = TableWind(((0.0, (1.0, 0.0)), (5.0, (0.0, 1.0))))
    assert evaluate_wind(w, 2.0) == (1.0, 0.0)
    assert evaluate_wind(w, 7.0) == (0.0, 1.0)
    assert evaluate_wind(w, 5.0) == (0.0, 1.0)


def test_table_wind_validation():
    with pytest.raises(InvalidScenarioError):
        TableWind(())
    with pytest.raises(InvalidScenarioError):
        TableWind(((1.0, (0, 0)), (1.0, (1, 1))))


def test_zero_beta_gives_zero_pyro():
    gx, gy = pyrogenic_velocity(np.ones(3), (np.ones(3), np.ones(3)), PyrogenicModel())
    assert np.all(gx == 0) and np.all(gy == 0)


def test_pyro_alpha_two():
    m = PyrogenicModel(beta=((0.0, 1.0),), alpha=2.0, eps=0.0)
    px, py = pyrogenic_velocity(np.array([1.0]), arr(0.3, 0.4), m)
    np.testing.assert_allclose([px[0], py[0]], [1.2, 1.6], rtol=1e-12)


def test_pyro_zero_gradient():
    for alpha in (0.0, 1.0, 2.0):
        m = PyrogenicModel(beta=((0.0, 1.0),), alpha=alpha, eps=1e-6)
        px, py = pyrogenic_velocity(np.array([1.0]), arr(0.0, 0.0), m)
        assert px[0] == 0.0 and py[0] == 0.0


def test_alpha_out_of_range():
    with pytest.raises(InvalidScenarioError):
        PyrogenicModel(alpha=3.0)


def test_wind_term_examples():
    zero = arr(0.0, 0.0)
    assert wind_term((-1.0, 0.4), zero, arr(0.0, 0.0))[0] == 0.0
    assert wind_term((-1.0, 0.4), zero, arr(1.0, 0.0))[0] == 1.0
    assert wind_term((2.0, 1.0), zero, arr(4.0, 2.0))[0] == 0.0


def test_wind_term_signed_when_toggled_off():
    zero = arr(0.0, 0.0)
    assert wind_term((2.0, 1.0), zero, arr(4.0, 2.0), negative=False)[0] == -10.0


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3))
def test_wind_term_nonnegative(ox, oy, gx, gy, b):
    m = PyrogenicModel(beta=((0.0, b),), alpha=1.0)
    grad = arr(gx, gy)
    pyro = pyrogenic_velocity(np.array([1.0]), grad, m)
    assert wind_term((ox, oy), pyro, grad)[0] >= 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(-3, 3), st.floats(-5, 5), st.floats(-5, 5))
def test_pure_pyro_wind_term_closed_form(alpha, b, gx, gy):
    eps = 1e-8
    mag = np.hypot(gx, gy)
    if mag < 10 * eps:
        return
    m = PyrogenicModel(beta=((0.0, b),), alpha=alpha, eps=eps)
    grad = arr(gx, gy)
    got = wind_term((0.0, 0.0), pyrogenic_velocity(np.array([1.0]), grad, m), grad)[0]
    want = max(b, 0.0) * mag ** (2 - alpha)
    assert got == pytest.approx(want, rel=1e-6, abs=1e-12)
