"""Fire-front extraction and front-velocity diagnostics.

The front is the level set ``{u = level}`` of a temperature field.  Chains are
oriented with the burning side (``u > level``) on the left, so the outward
normal of the burning region is the right-hand normal of the chain and the
shoelace area of a closed chain is positive around hot regions and negative
around cold holes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combustion import InteractionKernel, combustion_source
from .errors import FrontVanishedError, InvalidScenarioError
from .grid import (Grid, check_field, grad_magnitude, gradient, hessian,
                   sample_bilinear)
from .wind import PyrogenicModel

# corner offsets of a cell in counter-clockwise order, and the edge each side lies on
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))
_SIDES = (("h", 0, 0), ("v", 1, 0), ("h", 0, 1), ("v", 0, 0))


@dataclass(frozen=True)
class FrontSet:
    """Oriented level-set polylines in domain coordinates."""

    polylines: list = field(default_factory=list)
    level: float = 0.0

    def __len__(self):
        return len(self.polylines)

    @property
    def is_empty(self) -> bool:
        return not self.polylines

    @staticmethod
    def is_closed(chain) -> bool:
        return len(chain) > 2 and np.array_equal(chain[0], chain[-1])

    def vertices(self):
        """Chain ids and points of every sample vertex (closing duplicates dropped)."""
        ids, pts = [], []
        for k, chain in enumerate(self.polylines):
            body = chain[:-1] if self.is_closed(chain) else chain
            ids.append(np.full(len(body), k))
            pts.append(body)
        if not pts:
            return np.zeros(0, dtype=int), np.zeros((0, 2))
        return np.concatenate(ids), np.concatenate(pts)

    def polygon_area(self) -> float:
        """Signed shoelace area summed over closed chains."""
        total = 0.0
        for chain in self.polylines:
            if self.is_closed(chain):
                x, y = chain[:, 0], chain[:, 1]
                total += 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))
        return total

    def perimeter(self) -> float:
        return float(sum(np.sum(np.hypot(*np.diff(c, axis=0).T)) for c in self.polylines))


def extract_level_set(u, grid: Grid, level: float) -> FrontSet:
    """Marching squares over the dual cells joining neighbouring cell centres.

    Crossings are linearly interpolated from the hot end of each edge; saddle
    cells are resolved by comparing the average of the four corners with the
    level.
    """
    if not np.isfinite(level):
        raise InvalidScenarioError("front level must be finite")
    u = check_field(u, grid, "u")
    hot = u > level
    corners = (hot[:-1, :-1], hot[1:, :-1], hot[1:, 1:], hot[:-1, 1:])
    code = corners[0] * 1 + corners[1] * 2 + corners[2] * 4 + corners[3] * 8
    active = np.argwhere((code != 0) & (code != 15))

    points: dict[tuple, np.ndarray] = {}

    def crossing(key):
        pt = points.get(key)
        if pt is None:
            kind, i, j = key
            a, b = (i, j), ((i + 1, j) if kind == "h" else (i, j + 1))
            if not hot[a]:
                a, b = b, a
            t = (u[a] - level) / (u[a] - u[b])
            pt = np.array([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], dtype=float)
            points[key] = pt
        return pt

    next_of: dict[tuple, tuple] = {}
    for i, j in active:
        i, j = int(i), int(j)
        marks = []
        for k in range(4):
            ca, cb = _CORNERS[k], _CORNERS[(k + 1) % 4]
            ha = hot[i + ca[0], j + ca[1]]
            hb = hot[i + cb[0], j + cb[1]]
            if ha != hb:
                kind, di, dj = _SIDES[k]
                marks.append(((kind, i + di, j + dj), "exit" if ha else "entry"))
        if len(marks) == 2:
            (k0, m0), (k1, _) = marks
            start, end = (k0, k1) if m0 == "exit" else (k1, k0)
            next_of[start] = end
        else:
            centre_hot = 0.25 * (u[i, j] + u[i + 1, j] + u[i + 1, j + 1] + u[i, j + 1]) > level
            step = 1 if centre_hot else -1
            for p, (key, m) in enumerate(marks):
                if m == "exit":
                    next_of[key] = marks[(p + step) % 4][0]

    chains = []
    targets = set(next_of.values())
    for start in sorted(k for k in next_of if k not in targets):
        keys = [start]
        while keys[-1] in next_of:
            keys.append(next_of.pop(keys[-1]))
        chains.append(keys)
    while next_of:
        start = min(next_of)
        keys = [start]
        while True:
            nxt = next_of.pop(keys[-1])
            keys.append(nxt)
            if nxt == start:
                break
        chains.append(keys)

    polylines = [grid.to_domain(np.array([crossing(k) for k in keys])) for keys in chains]
    return FrontSet(polylines, float(level))


def _supersample(u: np.ndarray, per_cell: int) -> np.ndarray:
    """Bilinear values at ``per_cell**2`` midpoints inside every cell.

    Half cells on the hull use the edge value, extended outward.
    """
    p = np.pad(u, 1, mode="edge")
    offs = (np.arange(per_cell) + 0.5) / per_cell - 0.5

    def axis_weights(n):
        s = (np.arange(n)[:, None] + offs[None, :]).ravel() + 1.0
        i0 = np.floor(s).astype(int)
        return i0, s - i0

    i0, sx = axis_weights(u.shape[0])
    j0, sy = axis_weights(u.shape[1])
    rows = (1 - sx)[:, None] * p[i0, :] + sx[:, None] * p[i0 + 1, :]
    return (1 - sy)[None, :] * rows[:, j0] + sy[None, :] * rows[:, j0 + 1]


def burned_area(u, grid: Grid, level: float, per_cell: int = 4) -> float:
    """Area of ``{u > level}`` using the bilinear interpolant sampled inside each cell."""
    u = check_field(u, grid, "u")
    if np.all(u > level):
        return grid.nx * grid.ny * grid.cell_area
    if not np.any(u > level):
        return 0.0
    fine = _supersample(u, per_cell)
    return float(np.count_nonzero(fine > level)) * grid.cell_area / per_cell**2


def curvature_field(u, grid: Grid, eps: float = 1e-8) -> np.ndarray:
    """Curvature of the level sets, positive on the boundary of convex hot regions.

    This is ``-div(grad u / |grad u|_eps)``, the divergence of the outward
    normal ``-grad u/|grad u|`` of the superlevel sets, evaluated in its
    expanded form ``-(u_xx u_y^2 - 2 u_x u_y u_xy + u_yy u_x^2) / |grad u|_eps^3``
    with compact second differences.  Nesting two wide central differences
    instead loses about 5% at radii of five cells.
    """
    gx, gy = gradient(u, grid)
    fxx, fyy, fxy = hessian(u, grid)
    mag = grad_magnitude((gx, gy), eps)
    num = fxx * gy**2 - 2.0 * gx * gy * fxy + fyy * gx**2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(mag > 0, -num / mag**3, 0.0)


@dataclass
class FrontSamples:
    """Per-vertex front geometry and velocities (arrays aligned on the sample axis).

    ``valid`` is False where ``|grad u|`` was too small to define a normal; those
    rows carry NaN velocities and are counted in ``n_degenerate``.
    """

    chain_id: np.ndarray
    position: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray | None = None
    grad_mag: np.ndarray | None = None
    v_predicted: np.ndarray | None = None
    v_observed: np.ndarray | None = None
    valid: np.ndarray | None = None

    def __len__(self):
        return len(self.chain_id)

    @property
    def n_degenerate(self) -> int:
        return 0 if self.valid is None else int(np.count_nonzero(~self.valid))


def predicted_normal_velocity(u, grid: Grid, front: FrontSet, c=1e-3,
                              kernel: InteractionKernel | None = None,
                              omega=(0.0, 0.0), pyro: PyrogenicModel | None = None,
                              eps: float = 1e-8, threads: int = 1) -> FrontSamples:
    """Outward normal speed of the front implied by the evolution of ``u``.

    Sum of the curvature term ``-c H``, the normal second derivative
    ``c d2u/dnu2 / |grad u|``, the kernel-weighted excess above the front level
    divided by ``|grad u|``, and the clamped transport ``((omega - pyro) . grad u/|grad u|)_-``.
    """
    u = check_field(u, grid, "u")
    ids, pts = front.vertices()
    n = len(ids)
    if n == 0:
        empty = np.zeros(0)
        return FrontSamples(ids, pts, np.zeros((0, 2)), empty, empty, empty, None, np.zeros(0, bool))
    pyro = pyro or PyrogenicModel()
    g = gradient(u, grid)
    gx = sample_bilinear(g[0], grid, pts)
    gy = sample_bilinear(g[1], grid, pts)
    mag = np.hypot(gx, gy)
    valid = mag >= 10.0 * max(eps, np.finfo(float).tiny)
    safe = np.where(valid, mag, 1.0)
    normal = np.stack([-gx / safe, -gy / safe], axis=1)

    H = sample_bilinear(curvature_field(u, grid, eps), grid, pts)
    fxx, fyy, fxy = (sample_bilinear(h, grid, pts) for h in hessian(u, grid))
    d2 = normal[:, 0]**2 * fxx + 2 * normal[:, 0] * normal[:, 1] * fxy + normal[:, 1]**2 * fyy
    c_at = sample_bilinear(np.broadcast_to(c, grid.shape), grid, pts)

    v = -c_at * H + c_at * d2 / safe
    if kernel is not None and not kernel.is_zero:
        src = combustion_source(u, np.full(grid.shape, front.level), kernel, grid, threads)
        v = v + sample_bilinear(src, grid, pts) / safe
    beta = pyro.beta_of(np.full(n, front.level))
    reg = np.sqrt(mag**2 + pyro.eps**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where((beta != 0) & (reg > 0), beta / reg**pyro.alpha, 0.0)
    vx = omega[0] - scale * gx
    vy = omega[1] - scale * gy
    v = v + np.maximum(0.0, -(vx * gx + vy * gy) / safe)

    v = np.where(valid, v, np.nan)
    return FrontSamples(ids, pts, normal, H, mag, v, None, valid)


def polyline_normals(front: FrontSet) -> np.ndarray:
    """Outward (right-hand) unit normals at every sample vertex of ``front``."""
    out = []
    for chain in front.polylines:
        closed = FrontSet.is_closed(chain)
        body = chain[:-1] if closed else chain
        if closed:
            tangent = np.roll(body, -1, axis=0) - np.roll(body, 1, axis=0)
        elif len(body) > 1:
            tangent = np.gradient(body, axis=0)
        else:
            tangent = np.full_like(body, np.nan)
        length = np.hypot(tangent[:, 0], tangent[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            out.append(np.stack([tangent[:, 1], -tangent[:, 0]], axis=1) / length[:, None])
    return np.concatenate(out) if out else np.zeros((0, 2))


def observed_normal_velocity(front_t1: FrontSet, front_t2: FrontSet, dt: float,
                             normals=None) -> FrontSamples:
    """Finite-difference normal speed of a moving front.

    For every vertex of ``front_t1`` the line along its outward normal is
    intersected with ``front_t2``; the nearest intersection (signed distance
    along the normal) divided by ``dt`` is the observed speed.  Vertices whose
    normal line misses ``front_t2`` get NaN.
    """
    if not dt > 0:
        raise InvalidScenarioError(f"dt must be positive, got {dt}")
    if front_t1.is_empty:
        raise FrontVanishedError("source front is empty")
    if front_t2.is_empty:
        raise FrontVanishedError("target front is empty; the front vanished")
    ids, pts = front_t1.vertices()
    nrm = polyline_normals(front_t1) if normals is None else np.asarray(normals, dtype=float)

    q0 = np.concatenate([c[:-1] for c in front_t2.polylines if len(c) > 1])
    q1 = np.concatenate([c[1:] for c in front_t2.polylines if len(c) > 1])
    e = q1 - q0
    dist = np.full(len(pts), np.nan)
    for k, (p, n) in enumerate(zip(pts, nrm)):
        if not np.all(np.isfinite(n)):
            continue
        w = q0 - p
        denom = n[0] * e[:, 1] - n[1] * e[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / denom
            tau = (w[:, 0] * n[1] - w[:, 1] * n[0]) / denom
        hit = (denom != 0) & (tau >= -1e-12) & (tau <= 1 + 1e-12)
        if np.any(hit):
            cand = s[hit]
            dist[k] = cand[np.argmin(np.abs(cand))]
    return FrontSamples(ids, pts, nrm, v_observed=dist / dt, valid=np.isfinite(dist))


def relative_velocity_errors(predicted: FrontSamples, observed: FrontSamples,
                             floor: float = 1e-6) -> np.ndarray:
    """``|v_pred - v_obs| / max(|v_obs|, floor)`` over samples where both exist."""
    vp, vo = predicted.v_predicted, observed.v_observed
    ok = np.isfinite(vp) & np.isfinite(vo)
    return np.abs(vp[ok] - vo[ok]) / np.maximum(np.abs(vo[ok]), floor)
