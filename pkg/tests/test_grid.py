import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracle
from emberflow.errors import GridMismatchError
from emberflow.grid import (BoundaryCondition, Grid, directional_second_derivative,
                            grad_magnitude, gradient, hessian, laplacian,
                            negative_part, positive_part, sample_bilinear)


def interior(f):
    return f[1:-1, 1:-1]


def test_unit_square_is_cell_centred():
    g = Grid.unit_square(10)
    assert g.dx == g.dy == 0.1
    np.testing.assert_allclose(g.x, np.linspace(0.05, 0.95, 10))
    assert g.shape == (10, 10)


def test_grid_rejects_tiny_and_nonpositive():
    with pytest.raises(ValueError):
        Grid(2, 5, 0.1, 0.1)
    with pytest.raises(ValueError):
        Grid(5, 5, 0.0, 0.1)


def test_index_domain_roundtrip():
    g = Grid.rectangle(20, 10, 2.0, 1.0)
    pts = np.array([[0.3, 0.7], [1.95, 0.05]])
    np.testing.assert_allclose(g.to_domain(g.to_index(pts)), pts, atol=1e-14)


def test_laplacian_constant_is_harmonic():
    g = Grid.unit_square(7)
    f = np.full(g.shape, 3.0)
    assert np.all(laplacian(f, g, BoundaryCondition(3.0)) == 0.0)


def test_laplacian_quadratic_gives_four():
    g = Grid(5, 5, 1.0, 1.0, (0.0, 0.0))
    X, Y = g.mesh()
    out = laplacian(X**2 + Y**2, g)
    np.testing.assert_allclose(interior(out), 4.0, atol=1e-12)
    assert np.all(out[0] == 0) and np.all(out[:, -1] == 0)


def test_laplacian_matches_loop_oracle(rng):
    g = Grid(6, 6, 0.3, 0.2)
    f = rng.normal(size=g.shape)
    want = np.array(oracle.laplacian(f.tolist(), g.dx, g.dy, 0.7))
    np.testing.assert_allclose(laplacian(f, g, BoundaryCondition(0.7)), want, rtol=0, atol=1e-12)


def test_laplacian_rejects_wrong_shape():
    with pytest.raises(GridMismatchError):
        laplacian(np.zeros((4, 5)), Grid.unit_square(5))


def test_laplacian_second_order_convergence():
    errs = []
    for n in (20, 40, 80):
        g = Grid.unit_square(n)
        X, Y = g.mesh()
        f = np.sin(np.pi * X) * np.sin(np.pi * Y)
        exact = -2 * np.pi**2 * f
        errs.append(np.max(np.abs(interior(laplacian(f, g) - exact))))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(3.2 <= r <= 4.8 for r in ratios), ratios


def test_gradient_linear_and_constant():
    g = Grid.unit_square(8)
    X, _ = g.mesh()
    gx, gy = gradient(2 * X, g)
    np.testing.assert_allclose(gx, 2.0, atol=1e-12)
    np.testing.assert_allclose(gy, 0.0, atol=1e-12)
    gx, gy = gradient(np.full(g.shape, 5.0), g)
    assert np.all(gx == 0) and np.all(gy == 0)


def test_gradient_matches_loop_oracle(rng):
    g = Grid(6, 6, 0.25, 0.5)
    f = rng.normal(size=g.shape)
    ox, oy = oracle.gradient(f.tolist(), g.dx, g.dy)
    gx, gy = gradient(f, g)
    np.testing.assert_allclose(gx, ox, atol=1e-12)
    np.testing.assert_allclose(gy, oy, atol=1e-12)


def test_grad_magnitude_examples():
    assert grad_magnitude((3.0, 4.0), 0.0) == 5.0
    assert grad_magnitude((0.0, 0.0), 1e-6) == 1e-6
    assert grad_magnitude((1.0, 1.0), 1e-6) == math.sqrt(2 + 1e-12)


def test_directional_second_derivative_examples():
    g = Grid.unit_square(10)
    X, Y = g.mesh()
    ones = np.ones(g.shape)
    zero = np.zeros(g.shape)
    np.testing.assert_allclose(interior(directional_second_derivative(X**2, (ones, zero), g)), 2.0, atol=1e-9)
    np.testing.assert_allclose(interior(directional_second_derivative(X**2, (zero, ones), g)), 0.0, atol=1e-9)
    r = ones / math.sqrt(2)
    np.testing.assert_allclose(interior(directional_second_derivative(X * Y, (r, r), g)), 1.0, atol=1e-9)


def test_hessian_symmetric_cross_term():
    g = Grid.unit_square(9)
    X, Y = g.mesh()
    fxx, fyy, fxy = hessian(3 * X * Y + X**2, g)
    np.testing.assert_allclose(interior(fxy), 3.0, atol=1e-9)
    np.testing.assert_allclose(interior(fxx), 2.0, atol=1e-9)


def test_parts():
    assert negative_part(-3.0) == 3.0
    assert negative_part(2.0) == 0.0
    assert positive_part(2.0) == 2.0


def test_sample_bilinear_exact_on_linear():
    g = Grid.unit_square(10)
    X, Y = g.mesh()
    pts = np.array([[0.31, 0.47], [0.5, 0.5], [0.06, 0.92]])
    np.testing.assert_allclose(sample_bilinear(2 * X - Y, g, pts), 2 * pts[:, 0] - pts[:, 1], atol=1e-12)


def test_boundary_apply_overwrites_ring():
    f = np.ones((5, 5))
    BoundaryCondition(0.25).apply(f)
    assert f[0, 2] == f[4, 2] == f[2, 0] == f[2, 4] == 0.25 and f[2, 2] == 1.0


fields = arrays(np.float64, (7, 7), elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=50, deadline=None)
@given(fields, fields, st.floats(-5, 5))
def test_laplacian_is_linear(f, h, a):
    g = Grid.unit_square(7)
    lhs = laplacian(a * f + h, g)
    rhs = a * laplacian(f, g) + laplacian(h, g)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * (1 + np.max(np.abs(lhs))))


@settings(max_examples=50, deadline=None)
@given(fields)
def test_laplacian_commutes_with_square_symmetries(f):
    g = Grid.unit_square(7)
    L = laplacian(f, g)
    for k in range(4):
        for flip in (False, True):
            t = (lambda a: np.rot90(a, k)) if not flip else (lambda a: np.rot90(a.T, k))
            np.testing.assert_allclose(laplacian(t(f), g), t(L), rtol=0, atol=1e-9)
