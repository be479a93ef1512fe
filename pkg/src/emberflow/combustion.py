"""Nonlocal ignition source and fuel-memory bookkeeping."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateKernelError, GridMismatchError, InvalidScenarioError
from .grid import Grid, check_field, positive_part

#: Effective ignition temperature of a cell whose fuel is spent.
EXHAUSTED = math.inf


@dataclass(frozen=True)
class InteractionKernel:
    """Radial weight table ``w`` on grid offsets ``(-ri..ri, -rj..rj)``.

    ``weights[ri + a, rj + b]`` is the weight for an offset of ``a`` cells in x
    and ``b`` cells in y.  The table is tied to the spacing it was built for.
    """

    radius: float
    weights: np.ndarray
    dx: float
    dy: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
            raise InvalidScenarioError("kernel table must be 2-D with odd side lengths")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidScenarioError("kernel weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def zero(cls, grid: Grid) -> "InteractionKernel":
        return cls(0.0, np.zeros((1, 1)), grid.dx, grid.dy)

    @property
    def mass(self) -> float:
        return float(self.weights.sum() * self.dx * self.dy)

    @property
    def half_widths(self) -> tuple[int, int]:
        return self.weights.shape[0] // 2, self.weights.shape[1] // 2

    @property
    def is_zero(self) -> bool:
        return not np.any(self.weights)


def single_cell_kernel(mass: float, grid: Grid) -> InteractionKernel:
    """Delta kernel: all mass on the zero offset, so the source is ``mass * (u - theta)_+``."""
    if mass < 0:
        raise InvalidScenarioError(f"kernel mass must be nonnegative, got {mass}")
    return InteractionKernel(0.0, np.array([[mass / grid.cell_area]]), grid.dx, grid.dy)


def build_dirac_kernel(radius: float, mass: float, grid: Grid) -> InteractionKernel:
    """Truncated hat ``w(r) ~ max(0, 1 - r/radius)`` normalised to total ``mass``."""
    if not mass > 0:
        raise InvalidScenarioError(f"kernel mass must be positive, got {mass}")
    h = max(grid.dx, grid.dy)
    if radius < h * (1 - 1e-12):
        raise DegenerateKernelError(
            f"kernel radius {radius} is below one cell ({h}); use single_cell_kernel instead")
    ri = int(math.floor(radius / grid.dx + 1e-12))
    rj = int(math.floor(radius / grid.dy + 1e-12))
    a = np.arange(-ri, ri + 1)[:, None] * grid.dx
    b = np.arange(-rj, rj + 1)[None, :] * grid.dy
    w = np.maximum(0.0, 1.0 - np.hypot(a, b) / radius)
    w *= mass / (w.sum() * grid.cell_area)
    return InteractionKernel(float(radius), w, grid.dx, grid.dy)


def _check_kernel(kernel: InteractionKernel, grid: Grid):
    if not (math.isclose(kernel.dx, grid.dx, rel_tol=1e-12)
            and math.isclose(kernel.dy, grid.dy, rel_tol=1e-12)):
        raise GridMismatchError("kernel was built for a different grid spacing")


def _convolve_rows(excess_padded, coeffs, offsets, rows, ny, out):
    i0, i1 = rows
    acc = np.zeros((i1 - i0, ny))
    for (a, b), cw in zip(offsets, coeffs):
        acc += cw * excess_padded[i0 + a:i1 + a, b:b + ny]
    out[i0:i1] = acc


def combustion_source(u, theta, kernel: InteractionKernel, grid: Grid, threads: int = 1) -> np.ndarray:
    """``sum_y (u(y) - theta(y))_+ w(x - y) dx dy`` with zero exterior.

    Exhausted cells (``theta == EXHAUSTED``) contribute nothing.  Rows can be
    split across ``threads`` workers; the per-cell summation order is fixed,
    so the result does not depend on the worker count.
    """
    u = check_field(u, grid, "u")
    theta = check_field(theta, grid, "theta")
    _check_kernel(kernel, grid)
    # u - inf = -inf, so spent cells drop out of the positive part without NaNs
    excess = positive_part(u - theta)
    if kernel.is_zero:
        return np.zeros(grid.shape)
    ri, rj = kernel.half_widths
    padded = np.pad(excess, ((ri, ri), (rj, rj)))
    idx = np.argwhere(kernel.weights > 0)
    offsets = [(int(a), int(b)) for a, b in idx]
    coeffs = [kernel.weights[a, b] * grid.cell_area for a, b in offsets]
    out = np.empty(grid.shape)
    threads = max(1, int(threads))
    bounds = np.linspace(0, grid.nx, min(threads, grid.nx) + 1).astype(int)
    blocks = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if len(blocks) == 1:
        _convolve_rows(padded, coeffs, offsets, blocks[0], grid.ny, out)
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            list(pool.map(lambda rows: _convolve_rows(padded, coeffs, offsets, rows, grid.ny, out), blocks))
    return out


@dataclass(frozen=True)
class FuelState:
    """Fuel capacity ``F``, burned amount ``B`` and constitutional ignition temperature."""

    F: np.ndarray
    B: np.ndarray
    theta_bar: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(self.F), np.shape(self.B), np.shape(self.theta_bar)}
        if len(shapes) != 1:
            raise GridMismatchError(f"fuel fields disagree in shape: {sorted(shapes)}")
        if np.any(np.asarray(self.F) <= 0):
            raise InvalidScenarioError("fuel capacity F must be positive everywhere")

    @classmethod
    def fresh(cls, grid: Grid, fuel, theta_bar) -> "FuelState":
        return cls(np.broadcast_to(np.asarray(fuel, dtype=float), grid.shape).copy(),
                   grid.zeros(),
                   np.broadcast_to(np.asarray(theta_bar, dtype=float), grid.shape).copy())

    @property
    def exhausted(self) -> np.ndarray:
        return self.B >= self.F


@dataclass(frozen=True)
class ConstantTheta:
    theta0: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.theta0):
            raise InvalidScenarioError("theta0 must be finite")


@dataclass(frozen=True)
class FuelMemory:
    """Ignition temperature ``tan(pi B / 2F)``, diverging once the fuel is spent.

    With ``theta_floor`` set the result is raised to at least ``theta_bar``; this
    is an optional interpretation, off by default.
    """

    state: FuelState
    theta_floor: bool = False


IgnitionModel = ConstantTheta | FuelMemory


def effective_theta(model: IgnitionModel, grid: Grid) -> np.ndarray:
    if isinstance(model, ConstantTheta):
        return np.full(grid.shape, float(model.theta0))
    st = model.state
    F = check_field(st.F, grid, "F")
    B = check_field(st.B, grid, "B")
    if np.any(F <= 0):
        raise InvalidScenarioError("fuel capacity F must be positive everywhere")
    live = B < F
    theta = np.full(grid.shape, EXHAUSTED)
    theta[live] = np.tan(np.pi * B[live] / (2.0 * F[live]))
    if model.theta_floor:
        theta[live] = np.maximum(theta[live], check_field(st.theta_bar, grid, "theta_bar")[live])
    return theta


def accumulate_burn(state: FuelState, u, dt: float) -> FuelState:
    """One left-endpoint step of ``B += dt * (u - theta_bar)_+``, clamped at ``F``."""
    if not dt > 0:
        raise InvalidScenarioError(f"dt must be positive, got {dt}")
    B = np.minimum(state.F, state.B + dt * positive_part(np.asarray(u) - state.theta_bar))
    return replace(state, B=B)
