import math

import numpy as np
import pytest

from emberflow.combustion import ConstantTheta, FuelMemory, FuelState, build_dirac_kernel
from emberflow.errors import BlowUpError, InvalidScenarioError
from emberflow.grid import Grid
from emberflow.solver import (Scenario, SolverConfig, heat_only, run, snapshot_times,
                              stable_dt, step)
from emberflow.wind import ConstantWind, PyrogenicModel


def sine_mode(g):
    X, Y = g.mesh()
    return np.sin(np.pi * X) * np.sin(np.pi * Y)


def test_stable_dt_diffusive_bound():
    g = Grid.unit_square(100)
    sc = Scenario(g, g.zeros(), c=1e-3)
    assert stable_dt(sc, sc.u0, 0.0, SolverConfig(cfl_safety=1.0)) == pytest.approx(2.5e-2, rel=1e-12)


def test_stable_dt_advective_bound_scales_with_wind():
    g = Grid.unit_square(100)
    cfg = SolverConfig(cfl_safety=1.0)
    dts = [stable_dt(Scenario(g, g.zeros(), c=1e-3, wind=ConstantWind((w, 0.0))), g.zeros(), 0.0, cfg)
           for w in (10.0, 20.0)]
    assert dts[0] == pytest.approx(g.dx / 20.0, rel=1e-9)
    assert dts[0] / dts[1] == pytest.approx(2.0, rel=1e-9)


def test_dt_max_caps_step():
    g = Grid.unit_square(20)
    sc = Scenario(g, g.zeros())
    assert stable_dt(sc, sc.u0, 0.0, SolverConfig(dt_max=1e-4)) == 1e-4


def test_cold_state_is_stationary():
    g = Grid.unit_square(20)
    sc = Scenario(g, g.zeros(), kernel=build_dirac_kernel(0.1, 10.0, g), wind=ConstantWind((-1.0, 0.4)),
                  pyro=PyrogenicModel(beta=((0.0, 0.0), (1.0, 0.0), (2.0, 0.5))))
    u, _ = step(sc.u0, None, 0.0, 0.01, sc)
    assert np.all(u == 0.0)


def test_heat_only_step_matches_independent_stepper(rng):
    g = Grid.unit_square(12)
    u0 = rng.uniform(0, 2, g.shape)
    sc = Scenario(g, u0, c=2e-3)
    u = sc.u0
    dt = 0.01
    got, _ = step(u, None, 0.0, dt, sc)
    # independent heat step, written out per neighbour
    p = np.pad(u, 1)
    lap = ((p[2:, 1:-1] + p[:-2, 1:-1] - 2 * u) / g.dx**2 + (p[1:-1, 2:] + p[1:-1, :-2] - 2 * u) / g.dy**2)
    lap[0] = lap[-1] = 0
    lap[:, 0] = lap[:, -1] = 0
    want = u + dt * (2e-3 * lap)
    want[0] = want[-1] = 0
    want[:, 0] = want[:, -1] = 0
    assert np.array_equal(got, want)


def test_t_end_zero_gives_single_snapshot():
    g = Grid.unit_square(10)
    snaps = run(Scenario(g, sine_mode(g), t_end=0.0))
    assert len(snaps) == 1 and snaps[0].t == 0.0


def test_sine_mode_decay():
    # the Dirichlet ring clips the mode by about sin(pi dx/2), so use 100 cells for 2%
    g = Grid.unit_square(100)
    u0 = sine_mode(g)
    snaps = run(Scenario(g, u0, c=1e-2, t_end=2.0, snapshot_every=1.0))
    assert [s.t for s in snaps] == [0.0, 1.0, 2.0]
    want = math.exp(-2 * math.pi**2 * 1e-2 * 2.0) * u0
    assert np.max(np.abs(snaps[-1].u - want)) <= 0.02 * np.max(np.abs(want))


def test_snapshot_times():
    assert snapshot_times(1.0, 0.25) == [0.25, 0.5, 0.75, 1.0]
    assert snapshot_times(0.3, 0.1) == pytest.approx([0.1, 0.2, 0.3])
    assert snapshot_times(0.0, 0.1) == []


def test_blow_up_reports_cell():
    g = Grid.unit_square(10)
    u0 = g.zeros()
    u0[4, 5] = 1e308
    sc = Scenario(g, u0, c=1.0)
    with pytest.raises(BlowUpError) as exc:
        step(sc.u0, None, 0.0, 1.0, sc)
    assert exc.value.cell is not None


def test_scenario_validation():
    g = Grid.unit_square(10)
    with pytest.raises(InvalidScenarioError):
        Scenario(g, g.zeros(), c=0.0)
    with pytest.raises(InvalidScenarioError):
        Scenario(g, g.zeros(), t_end=-1.0)
    u0 = np.ones(g.shape)
    assert np.all(Scenario(g, u0).u0[0] == 0.0)


def test_supersolution_single_step(rng):
    g = Grid.unit_square(15)
    u0 = rng.uniform(0, 2, g.shape)
    sc = Scenario(g, u0, kernel=build_dirac_kernel(0.2, 5.0, g), wind=ConstantWind((0.3, -0.2)))
    full, _ = step(sc.u0, None, 0.0, 1e-3, sc)
    heat, _ = step(sc.u0, None, 0.0, 1e-3, heat_only(sc))
    assert np.all(full >= heat)


def test_fuel_memory_run_keeps_b_bounded():
    g = Grid.unit_square(20)
    X, Y = g.mesh()
    u0 = 2.0 * (np.hypot(X - 0.5, Y - 0.5) < 0.15)
    fuel = FuelState.fresh(g, 0.05, 1.0)
    sc = Scenario(g, u0, c=1e-2, ignition=FuelMemory(fuel), kernel=build_dirac_kernel(0.1, 5.0, g),
                  t_end=0.5, snapshot_every=0.1)
    for s in run(sc):
        assert np.all(s.B <= 0.05) and np.all(s.B >= 0)


def test_running_max_area_nondecreasing():
    g = Grid.unit_square(40)
    X, Y = g.mesh()
    sc = Scenario(g, 2.0 * np.exp(-((X - 0.5) ** 2 + (Y - 0.5) ** 2) / 0.01), c=1e-2,
                  ignition=ConstantTheta(1.0), t_end=1.0, snapshot_every=0.1)
    snaps = run(sc)
    areas = [s.running_max_area for s in snaps]
    assert all(b >= a for a, b in zip(areas, areas[1:]))
    assert snaps[-1].burned_area < snaps[0].burned_area
