"""Environmental wind plus pyrogenic flow, applied through a negative-part rule."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidScenarioError
from .grid import grad_magnitude, negative_part, positive_part

__all__ = [
    "ConstantWind", "TableWind", "PyrogenicModel", "evaluate_wind",
    "pyrogenic_velocity", "wind_term", "negative_part", "positive_part",
]


@dataclass(frozen=True)
class ConstantWind:
    omega: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "omega", _as_vec(self.omega))


@dataclass(frozen=True)
class TableWind:
    """Piecewise-constant wind: ``entries[k] = (t_k, (wx, wy))`` holds until ``t_{k+1}``.

    Times before the first entry use the first vector; the last entry holds forever.
    """

    entries: tuple

    def __post_init__(self):
        if len(self.entries) == 0:
            raise InvalidScenarioError("wind table must not be empty")
        entries = tuple((float(t), _as_vec(w)) for t, w in self.entries)
        times = [t for t, _ in entries]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidScenarioError("wind table times must be strictly increasing")
        object.__setattr__(self, "entries", entries)


WindModel = ConstantWind | TableWind


def _as_vec(w) -> tuple[float, float]:
    w = tuple(float(c) for c in w)
    if len(w) != 2 or not all(math.isfinite(c) for c in w):
        raise InvalidScenarioError(f"wind vector must be two finite numbers, got {w}")
    return w


def evaluate_wind(model: WindModel, t: float) -> tuple[float, float]:
    if isinstance(model, ConstantWind):
        return model.omega
    if len(model.entries) == 0:
        raise InvalidScenarioError("wind table must not be empty")
    times = [e[0] for e in model.entries]
    k = max(bisect.bisect_right(times, t) - 1, 0)
    return model.entries[k][1]


@dataclass(frozen=True)
class PyrogenicModel:
    """Fire-induced flow ``beta(u) grad u / |grad u|_eps^alpha``.

    ``beta`` is a table of ``(u, beta)`` knots, linearly interpolated and held
    constant outside its range.  An empty table means ``beta == 0``.
    """

    beta: tuple = ()
    alpha: float = 1.0
    eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 2.0:
            raise InvalidScenarioError(f"pyro.alpha must lie in [0, 2], got {self.alpha}")
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise InvalidScenarioError(f"pyro.eps must be a finite nonnegative number, got {self.eps}")
        knots = tuple((float(a), float(b)) for a, b in self.beta)
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in knots):
            raise InvalidScenarioError("pyro.beta table must be finite")
        us = [a for a, _ in knots]
        if any(b <= a for a, b in zip(us, us[1:])):
            raise InvalidScenarioError("pyro.beta temperatures must be strictly increasing")
        object.__setattr__(self, "beta", knots)

    @property
    def is_zero(self) -> bool:
        return all(b == 0.0 for _, b in self.beta)

    def beta_of(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.is_zero:
            return np.zeros_like(u)
        us, bs = zip(*self.beta)
        return np.interp(u, us, bs)


def pyrogenic_velocity(u, grad_u, model: PyrogenicModel) -> tuple[np.ndarray, np.ndarray]:
    gx, gy = grad_u
    beta = model.beta_of(u)
    if model.is_zero:
        return np.zeros_like(gx), np.zeros_like(gy)
    mag = grad_magnitude(grad_u, model.eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where((beta != 0) & (mag > 0), beta / mag**model.alpha, 0.0)
    return scale * gx, scale * gy


def transport_velocity(omega, pyro) -> tuple[np.ndarray, np.ndarray]:
    """Net advecting velocity ``omega - pyro``."""
    return omega[0] - pyro[0], omega[1] - pyro[1]


def wind_term(omega, pyro, grad_u, negative: bool = True) -> np.ndarray:
    """``((omega - pyro) . grad u)_-``.

    With ``negative=False`` the clamp is dropped and the plain transport
    ``-(omega - pyro) . grad u`` is returned, which translates rather than
    spreads the burning region.
    """
    vx, vy = transport_velocity(omega, pyro)
    dot = vx * grad_u[0] + vy * grad_u[1]
    return negative_part(dot) if negative else -dot
