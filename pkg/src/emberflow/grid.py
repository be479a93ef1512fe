"""Uniform cell-centred grids and the finite-difference operators used by the solver.

Fields are plain ``numpy`` arrays of shape ``(nx, ny)``; index ``[i, j]`` is the
cell whose centre sits at ``origin + (i*dx, j*dy)``.  Vector fields are
``(gx, gy)`` tuples of such arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidScenarioError


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise InvalidScenarioError("grid cell counts must be integers")
        if self.nx < 3 or self.ny < 3:
            raise InvalidScenarioError(f"grid needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise InvalidScenarioError(f"grid spacings must be positive, got dx={self.dx}, dy={self.dy}")

    @classmethod
    def unit_square(cls, n: int = 100) -> "Grid":
        return cls.rectangle(n, n, 1.0, 1.0)

    @classmethod
    def rectangle(cls, nx: int, ny: int, width: float, height: float) -> "Grid":
        """Cell-centred grid covering ``[0, width] x [0, height]``."""
        dx, dy = width / nx, height / ny
        return cls(nx, ny, dx, dy, (0.5 * dx, 0.5 * dy))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def x(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.ny) * self.dy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def to_index(self, points) -> np.ndarray:
        """Domain coordinates -> fractional (i, j) index coordinates."""
        p = np.asarray(points, dtype=float)
        return np.stack([(p[..., 0] - self.origin[0]) / self.dx,
                         (p[..., 1] - self.origin[1]) / self.dy], axis=-1)

    def to_domain(self, index_points) -> np.ndarray:
        q = np.asarray(index_points, dtype=float)
        return np.stack([self.origin[0] + q[..., 0] * self.dx,
                         self.origin[1] + q[..., 1] * self.dy], axis=-1)


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet data held on the outermost ring of cells."""

    value: float = 0.0
    kind: str = "dirichlet"

    def __post_init__(self):
        if self.kind != "dirichlet":
            raise InvalidScenarioError(f"unsupported boundary condition {self.kind!r}")
        if not np.isfinite(self.value):
            raise InvalidScenarioError("boundary value must be finite")

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Overwrite the boundary ring of ``f`` in place and return it."""
        f[0, :] = self.value
        f[-1, :] = self.value
        f[:, 0] = self.value
        f[:, -1] = self.value
        return f


def positive_part(x):
    """``max(0, x)``, elementwise."""
    return np.maximum(x, 0.0)


def negative_part(x):
    """``max(0, -x)``, elementwise; nonnegative by construction."""
    return np.maximum(-np.asarray(x, dtype=float), 0.0)


def check_field(f, grid: Grid, name: str = "field") -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise GridMismatchError(f"{name} has shape {f.shape}, grid is {grid.shape}")
    return f


def boundary_mask(grid: Grid) -> np.ndarray:
    mask = np.zeros(grid.shape, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    return mask


def _zero_ring(out: np.ndarray) -> np.ndarray:
    out[0, :] = out[-1, :] = 0.0
    out[:, 0] = out[:, -1] = 0.0
    return out


def laplacian(f, grid: Grid, bc: BoundaryCondition = BoundaryCondition()) -> np.ndarray:
    """Five-point Laplacian; the boundary ring is returned as zero."""
    f = check_field(f, grid)
    p = np.pad(f, 1, constant_values=bc.value)
    out = ((p[2:, 1:-1] + p[:-2, 1:-1] - 2.0 * f) / grid.dx**2
           + (p[1:-1, 2:] + p[1:-1, :-2] - 2.0 * f) / grid.dy**2)
    return _zero_ring(out)


def gradient(f, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Central differences inside, first-order one-sided differences on the ring."""
    f = check_field(f, grid)
    gx = np.empty_like(f)
    gy = np.empty_like(f)
    gx[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2.0 * grid.dx)
    gx[0, :] = (f[1, :] - f[0, :]) / grid.dx
    gx[-1, :] = (f[-1, :] - f[-2, :]) / grid.dx
    gy[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2.0 * grid.dy)
    gy[:, 0] = (f[:, 1] - f[:, 0]) / grid.dy
    gy[:, -1] = (f[:, -1] - f[:, -2]) / grid.dy
    return gx, gy


def grad_magnitude(g, eps: float = 0.0) -> np.ndarray:
    """Regularised magnitude ``sqrt(gx^2 + gy^2 + eps^2)``."""
    if eps < 0:
        raise InvalidScenarioError("eps must be nonnegative")
    gx, gy = (np.asarray(c, dtype=float) for c in g)
    return np.sqrt(gx * gx + gy * gy + eps * eps)


def divergence(v, grid: Grid) -> np.ndarray:
    vx, vy = v
    return gradient(vx, grid)[0] + gradient(vy, grid)[1]


def hessian(f, grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Second derivatives ``(fxx, fyy, fxy)`` from central stencils; zero on the ring.

    The mixed derivative uses the four-point cross stencil.
    """
    f = check_field(f, grid)
    fxx = np.zeros_like(f)
    fyy = np.zeros_like(f)
    fxy = np.zeros_like(f)
    c = f[1:-1, 1:-1]
    fxx[1:-1, 1:-1] = (f[2:, 1:-1] + f[:-2, 1:-1] - 2.0 * c) / grid.dx**2
    fyy[1:-1, 1:-1] = (f[1:-1, 2:] + f[1:-1, :-2] - 2.0 * c) / grid.dy**2
    fxy[1:-1, 1:-1] = (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4.0 * grid.dx * grid.dy)
    return fxx, fyy, fxy


def directional_second_derivative(f, nu, grid: Grid) -> np.ndarray:
    """``nu^T (Hess f) nu`` for a (roughly unit) direction field ``nu``."""
    fxx, fyy, fxy = hessian(f, grid)
    nx_, ny_ = (check_field(c, grid, "direction") for c in nu)
    return nx_ * nx_ * fxx + 2.0 * nx_ * ny_ * fxy + ny_ * ny_ * fyy


def sample_bilinear(f, grid: Grid, points) -> np.ndarray:
    """Bilinear interpolation of ``f`` at domain points, clamped to the grid hull."""
    f = check_field(f, grid)
    q = grid.to_index(np.atleast_2d(points))
    fi = np.clip(q[:, 0], 0.0, grid.nx - 1)
    fj = np.clip(q[:, 1], 0.0, grid.ny - 1)
    i0 = np.minimum(np.floor(fi).astype(int), grid.nx - 2)
    j0 = np.minimum(np.floor(fj).astype(int), grid.ny - 2)
    s = fi - i0
    t = fj - j0
    return ((1 - s) * (1 - t) * f[i0, j0] + s * (1 - t) * f[i0 + 1, j0]
            + (1 - s) * t * f[i0, j0 + 1] + s * t * f[i0 + 1, j0 + 1])
