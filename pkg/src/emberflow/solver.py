"""Explicit time integration of the bushfire temperature equation.

Each forward-Euler step adds, on the beginning-of-step temperature ``u``::

    c * laplacian(u) + combustion_source(u, theta) + wind_term(omega(t), pyro(u), grad u)

then resets the Dirichlet ring and (for fuel-memory ignition) accumulates the
burned amount with the same ``u``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .combustion import (ConstantTheta, FuelMemory, FuelState, IgnitionModel,
                         InteractionKernel, accumulate_burn, combustion_source,
                         effective_theta)
from .errors import BlowUpError, InvalidScenarioError, UnstableScenarioError
from .front import (FrontSamples, FrontSet, burned_area, extract_level_set,
                    observed_normal_velocity, predicted_normal_velocity,
                    relative_velocity_errors)
from .grid import BoundaryCondition, Grid, check_field, gradient, laplacian
from .wind import (ConstantWind, PyrogenicModel, WindModel, evaluate_wind,
                   pyrogenic_velocity, transport_velocity, wind_term)

log = logging.getLogger(__name__)

_TINY = 1e-300


@dataclass
class Scenario:
    """Everything needed to integrate one run.

    The boundary ring of ``u0`` is overwritten with the boundary value.
    ``c`` is a positive constant or a positive field multiplying the Laplacian
    pointwise.
    """

    grid: Grid
    u0: np.ndarray
    c: float | np.ndarray = 1e-3
    ignition: IgnitionModel = field(default_factory=ConstantTheta)
    kernel: InteractionKernel | None = None
    wind: WindModel = field(default_factory=ConstantWind)
    pyro: PyrogenicModel = field(default_factory=PyrogenicModel)
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)
    t_end: float = 1.0
    snapshot_every: float = 0.1
    wind_negative_part: bool = True

    def __post_init__(self):
        u0 = check_field(self.u0, self.grid, "u0").copy()
        if not np.all(np.isfinite(u0)):
            raise InvalidScenarioError("initial temperature must be finite")
        self.u0 = self.bc.apply(u0)
        if np.ndim(self.c) == 0:
            self.c = float(self.c)
        else:
            self.c = check_field(self.c, self.grid, "c")
        if not (np.all(np.asarray(self.c) > 0) and np.all(np.isfinite(self.c))):
            raise InvalidScenarioError("diffusion coefficient c must be positive and finite")
        if self.kernel is None:
            self.kernel = InteractionKernel.zero(self.grid)
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise InvalidScenarioError(f"t_end must be finite and nonnegative, got {self.t_end}")
        if isinstance(self.ignition, FuelMemory):
            st = self.ignition.state
            for name in ("F", "B", "theta_bar"):
                check_field(getattr(st, name), self.grid, name)

    @property
    def front_level(self) -> float:
        """Temperature whose level set is reported as the fire front."""
        if isinstance(self.ignition, ConstantTheta):
            return float(self.ignition.theta0)
        return float(np.mean(self.ignition.state.theta_bar))

    def initial_fuel(self) -> FuelState | None:
        return self.ignition.state if isinstance(self.ignition, FuelMemory) else None

    def theta(self, fuel: FuelState | None) -> np.ndarray:
        if fuel is None:
            return effective_theta(self.ignition, self.grid)
        return effective_theta(FuelMemory(fuel, self.ignition.theta_floor), self.grid)


@dataclass(frozen=True)
class SolverConfig:
    cfl_safety: float = 0.4
    dt_max: float = math.inf
    fixed_dt: float | None = None
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise InvalidScenarioError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.dt_max > 0:
            raise InvalidScenarioError("dt_max must be positive")
        if self.fixed_dt is not None and not (self.fixed_dt > 0 and math.isfinite(self.fixed_dt)):
            raise InvalidScenarioError("fixed_dt must be a positive finite number")
        if self.threads < 1:
            raise InvalidScenarioError("threads must be at least 1")


@dataclass
class Snapshot:
    t: float
    u: np.ndarray
    theta: np.ndarray
    B: np.ndarray | None
    front: FrontSet
    samples: FrontSamples
    burned_area: float
    running_max_area: float
    max_u: float
    steps: int = 0


def stable_dt(scenario: Scenario, u, t: float = 0.0, config: SolverConfig = SolverConfig()) -> float:
    """Largest step allowed by the diffusive and advective limits, scaled by ``cfl_safety``."""
    g = scenario.grid
    c_max = float(np.max(scenario.c))
    dt_diff = g.dx**2 * g.dy**2 / (2.0 * c_max * (g.dx**2 + g.dy**2))
    omega = evaluate_wind(scenario.wind, t)
    pyro = pyrogenic_velocity(u, gradient(u, g), scenario.pyro)
    vx, vy = transport_velocity(omega, pyro)
    dt_x = g.dx / (2.0 * float(np.max(np.abs(vx))) + _TINY)
    dt_y = g.dy / (2.0 * float(np.max(np.abs(vy))) + _TINY)
    dt = min(config.cfl_safety * min(dt_diff, dt_x, dt_y), config.dt_max)
    if not (dt > 0 and math.isfinite(dt)):
        raise UnstableScenarioError(f"no stable time step at t={t:.6g} (got {dt})")
    return dt


def rhs_terms(u, theta, t: float, scenario: Scenario, threads: int = 1):
    """The three right-hand-side contributions, each evaluated on ``u``."""
    g = scenario.grid
    diffusion = scenario.c * laplacian(u, g, scenario.bc)
    source = combustion_source(u, theta, scenario.kernel, g, threads)
    grad_u = gradient(u, g)
    pyro = pyrogenic_velocity(u, grad_u, scenario.pyro)
    wind = wind_term(evaluate_wind(scenario.wind, t), pyro, grad_u, scenario.wind_negative_part)
    return diffusion, source, wind


def step(u, fuel: FuelState | None, t: float, dt: float, scenario: Scenario, threads: int = 1):
    """Advance ``(u, fuel)`` from ``t`` to ``t + dt``; returns the new pair."""
    u = check_field(u, scenario.grid, "u")
    theta = scenario.theta(fuel)
    # overflow shows up as inf/NaN and is reported below with the offending cell
    with np.errstate(over="ignore", invalid="ignore"):
        diffusion, source, wind = rhs_terms(u, theta, t, scenario, threads)
        u_new = scenario.bc.apply(u + dt * (diffusion + source + wind))
    bad = ~np.isfinite(u_new)
    if np.any(bad):
        cell = tuple(int(k) for k in np.argwhere(bad)[0])
        raise BlowUpError(t, cell)
    if fuel is not None:
        fuel = accumulate_burn(fuel, u, dt)
    return u_new, fuel


def snapshot_times(t_end: float, every: float) -> list[float]:
    times = []
    if every > 0:
        k = 1
        while k * every < t_end * (1 - 1e-12):
            times.append(k * every)
            k += 1
    if t_end > 0:
        times.append(t_end)
    return times


def _make_snapshot(scenario, u, fuel, running_max, t, steps, threads) -> Snapshot:
    g = scenario.grid
    level = scenario.front_level
    front = extract_level_set(u, g, level)
    samples = predicted_normal_velocity(
        u, g, front, scenario.c, scenario.kernel, evaluate_wind(scenario.wind, t),
        scenario.pyro, scenario.pyro.eps, threads)
    return Snapshot(
        t=t, u=u.copy(), theta=scenario.theta(fuel),
        B=None if fuel is None else fuel.B.copy(),
        front=front, samples=samples,
        burned_area=burned_area(u, g, level),
        running_max_area=burned_area(running_max, g, level),
        max_u=float(np.max(u)), steps=steps)


def run(scenario: Scenario, config: SolverConfig = SolverConfig()) -> list[Snapshot]:
    """Integrate to ``t_end``, emitting snapshots at ``0``, every ``snapshot_every`` and ``t_end``."""
    u = scenario.u0.copy()
    fuel = scenario.initial_fuel()
    running_max = u.copy()
    t, steps = 0.0, 0
    snaps = [_make_snapshot(scenario, u, fuel, running_max, t, steps, config.threads)]
    for target in snapshot_times(scenario.t_end, scenario.snapshot_every):
        while t < target:
            dt = config.fixed_dt or stable_dt(scenario, u, t, config)
            if t + dt >= target:
                dt, t_next = target - t, target
            else:
                t_next = t + dt
            u, fuel = step(u, fuel, t, dt, scenario, config.threads)
            np.maximum(running_max, u, out=running_max)
            t = t_next
            steps += 1
        snaps.append(_make_snapshot(scenario, u, fuel, running_max, t, steps, config.threads))
        log.debug("t=%.4g steps=%d area=%.4g", t, steps, snaps[-1].burned_area)
    _attach_observed(snaps)
    return snaps


def _attach_observed(snaps: list[Snapshot]):
    """Fill ``v_observed`` on each snapshot from the front of the next one."""
    for a, b in zip(snaps, snaps[1:]):
        if a.front.is_empty or b.front.is_empty or b.t <= a.t:
            continue
        obs = observed_normal_velocity(a.front, b.front, b.t - a.t, normals=a.samples.normal)
        a.samples.v_observed = obs.v_observed


def front_velocity_errors(snaps: list[Snapshot]) -> np.ndarray:
    """Pooled relative errors between predicted and observed front speeds."""
    errs = [relative_velocity_errors(s.samples, s.samples) for s in snaps
            if s.samples.v_observed is not None and len(s.samples)]
    return np.concatenate(errs) if errs else np.zeros(0)


def heat_only(scenario: Scenario) -> Scenario:
    """Same scenario with the combustion and wind terms removed."""
    return replace(scenario, kernel=InteractionKernel.zero(scenario.grid),
                   wind=ConstantWind(), pyro=PyrogenicModel(), ignition=ConstantTheta(scenario.front_level))
