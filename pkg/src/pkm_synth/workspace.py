"""Rasterised Cartesian workspace, inscribed rectangles and machine envelope.

The raster may be laid out along rotated axes.  Grid coordinates (u, v)
relate to world coordinates by ``world = R(angle) @ (u, v)``; rectangles
are axis-aligned in the grid frame, so sweeping the angle gives rotated
rectangles in the world.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import contourpy
import numpy as np
from scipy import ndimage

from .errors import EmptyWorkspace, PKMError
from .geometry import EPS_STRUCT, Vec2
from .kinetostatics import (
    DEFAULT_BOUNDS,
    EPS_BOUND,
    KinetostaticBounds,
    amplification_factors,
    check_bounds_relaxed,
    factors_batch,
)
from .mechanism import (
    DEFAULT_MODES,
    EPS_SING,
    BranchModes,
    JointConfig,
    MechanismDesign,
    classify_singularity,
    fk_batch,
    forward_kinematics,
    ik_batch,
    inverse_jacobian,
    inverse_kinematics,
    jacobians,
    pose_fields,
    slider_positions,
)

DEFAULT_RESOLUTION = 1024
CI_RESOLUTION = 256


@dataclass
class WorkspaceGrid:
    origin: Vec2  # grid-frame corner of cell (0, 0)
    cell: float
    nx: int
    ny: int
    feasible: np.ndarray  # (ny, nx) bool
    component_id: np.ndarray  # (ny, nx) int, 0 where infeasible
    seed: tuple  # (row, col)
    angle: float = 0.0
    design: MechanismDesign | None = field(default=None, repr=False)

    @property
    def seed_label(self) -> int:
        return int(self.component_id[self.seed])

    @property
    def component(self) -> np.ndarray:
        """Mask of the t-connected region (the component holding the seed)."""
        return self.component_id == self.seed_label

    @property
    def region_area(self) -> float:
        return float(self.component.sum()) * self.cell ** 2

    def axes(self):
        u = self.origin.x + (np.arange(self.nx) + 0.5) * self.cell
        v = self.origin.y + (np.arange(self.ny) + 0.5) * self.cell
        return u, v

    def to_world(self, u, v):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return c * u - s * v, s * u + c * v

    def to_grid(self, x, y):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return c * x + s * y, -s * x + c * y

    def centers(self):
        u, v = self.axes()
        U, V = np.meshgrid(u, v)
        return self.to_world(U, V)


@dataclass(frozen=True)
class RectResult:
    corner_min: Vec2  # grid frame
    corner_max: Vec2
    area: float
    is_square: bool
    angle: float = 0.0
    cells: tuple = ()  # (col0, col1, row0, row1), half-open

    @property
    def width(self) -> float:
        return self.corner_max.x - self.corner_min.x

    @property
    def height(self) -> float:
        return self.corner_max.y - self.corner_min.y

    def corners(self) -> np.ndarray:
        """World coordinates of the four corners, counter-clockwise."""
        (u0, v0), (u1, v1) = self.corner_min, self.corner_max
        u = np.array([u0, u1, u1, u0])
        v = np.array([v0, v0, v1, v1])
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.column_stack([c * u - s * v, s * u + c * v])

    def center(self) -> Vec2:
        x, y = self.corners().mean(axis=0)
        return Vec2(float(x), float(y))


@dataclass(frozen=True)
class EnvelopeResult:
    bbox_min: Vec2
    bbox_max: Vec2
    area: float


@dataclass(frozen=True)
class Locus:
    kind: str  # "parallel" or "serial"
    points: np.ndarray  # (n, 2) world coordinates


# --- feasibility ----------------------------------------------------------

def feasibility(design: MechanismDesign, p, modes: BranchModes = DEFAULT_MODES,
                bounds: KinetostaticBounds = DEFAULT_BOUNDS, eps_bound: float = EPS_BOUND) -> bool:
    """Pointwise feasibility of a tool position (reference implementation)."""
    try:
        q = inverse_kinematics(design, p, modes)
        if not q.in_range(design):
            return False
        c, d = slider_positions(design, q)
        p = Vec2(*p)
        if math.copysign(1.0, (d - c).cross(p - c)) != modes.assembly:
            return False
        if classify_singularity(design, q, p).any:
            return False
        lam = amplification_factors(inverse_jacobian(jacobians(design, q, p)))
    except PKMError:
        return False
    return check_bounds_relaxed(lam, bounds, eps_bound)


def feasibility_field(design: MechanismDesign, x, y, modes: BranchModes = DEFAULT_MODES,
                      bounds: KinetostaticBounds = DEFAULT_BOUNDS, eps_bound: float = EPS_BOUND):
    """Vectorised :func:`feasibility` over arrays of points."""
    L = design.L
    rho1, rho2, ok = ik_batch(design, x, y, modes)
    ok &= (rho1 >= 0.0) & (rho1 <= design.delta_rho)
    ok &= (rho2 >= 0.0) & (rho2 <= design.delta_rho)
    u1, u2 = design.u1, design.u2
    cx, cy = rho1 * u1.x, rho1 * u1.y
    dx, dy = design.L0 + rho2 * u2.x, rho2 * u2.y
    ok &= np.hypot(dx - cx, dy - cy) > EPS_STRUCT * L
    side = (dx - cx) * (y - cy) - (dy - cy) * (x - cx)
    ok &= np.where(side < 0, -1, 1) == modes.assembly
    det_a, cos1, cos2, (ax, ay, bx, by) = pose_fields(design, x, y, cx, cy, dx, dy)
    ok &= (np.abs(det_a) > EPS_SING) & (np.abs(cos1) > EPS_SING) & (np.abs(cos2) > EPS_SING)
    lam1, lam2 = factors_batch(ax, ay, bx, by, cos1, cos2, L)
    ok &= (lam1 > bounds.lambda_min - eps_bound) & (lam2 < bounds.lambda_max + eps_bound)
    return ok


# --- raster ---------------------------------------------------------------

def _reach_box(design: MechanismDesign, angle: float):
    """Grid-frame bounding box of the intersection of both legs' reachable strips."""
    c, s = math.cos(angle), math.sin(angle)
    lo = [-math.inf, -math.inf]
    hi = [math.inf, math.inf]
    L = design.L
    for base, u in ((design.A, design.u1), (design.B, design.u2)):
        ends = (base, base + u * design.delta_rho)
        us = [c * e.x + s * e.y for e in ends]
        vs = [-s * e.x + c * e.y for e in ends]
        lo = [max(lo[0], min(us) - L), max(lo[1], min(vs) - L)]
        hi = [min(hi[0], max(us) + L), min(hi[1], max(vs) + L)]
    if hi[0] <= lo[0] or hi[1] <= lo[1]:
        raise EmptyWorkspace("the legs' reachable regions do not overlap")
    return lo, hi


def seed_point(design: MechanismDesign, modes: BranchModes = DEFAULT_MODES) -> Vec2:
    half = 0.5 * design.delta_rho
    try:
        return forward_kinematics(design, JointConfig(half, half), modes)
    except PKMError as exc:
        raise EmptyWorkspace(f"joint-box centre is not assemblable: {exc}") from exc


def grid_frame(design: MechanismDesign, resolution: int = DEFAULT_RESOLUTION,
               angle: float = 0.0) -> WorkspaceGrid:
    """Raster layout over the legs' common reach box, with nothing evaluated yet."""
    if resolution < 32:
        raise ValueError("resolution must be at least 32")
    lo, hi = _reach_box(design, angle)
    cell = max(hi[0] - lo[0], hi[1] - lo[1]) / resolution
    nx = int(math.ceil((hi[0] - lo[0]) / cell - 1e-9)) + 2
    ny = int(math.ceil((hi[1] - lo[1]) / cell - 1e-9)) + 2
    origin = Vec2(lo[0] - cell, lo[1] - cell)
    return WorkspaceGrid(origin, cell, nx, ny, np.zeros((ny, nx), bool), np.zeros((ny, nx), int),
                         (0, 0), angle, design)


def build_grid(design: MechanismDesign, modes: BranchModes = DEFAULT_MODES,
               bounds: KinetostaticBounds = DEFAULT_BOUNDS, resolution: int = DEFAULT_RESOLUTION,
               angle: float = 0.0, eps_bound: float = EPS_BOUND) -> WorkspaceGrid:
    grid = grid_frame(design, resolution, angle)
    origin, cell, nx, ny = grid.origin, grid.cell, grid.nx, grid.ny
    X, Y = grid.centers()
    feasible = feasibility_field(design, X, Y, modes, bounds, eps_bound)

    seed = seed_point(design, modes)
    if not feasibility(design, seed, modes, bounds, eps_bound):
        raise EmptyWorkspace("joint-box centre pose is infeasible")
    su, sv = grid.to_grid(seed.x, seed.y)
    col = min(max(int((su - origin.x) // cell), 0), nx - 1)
    row = min(max(int((sv - origin.y) // cell), 0), ny - 1)
    # the seed pose itself is known feasible; keeps degenerate regions non-empty
    feasible[row, col] = True

    labels, _ = ndimage.label(feasible)  # default structure = 4-connectivity
    grid.feasible = feasible
    grid.component_id = labels
    grid.seed = (row, col)
    return grid


def write_pgm(grid: WorkspaceGrid, path) -> None:
    """Plain (P2) grey map: 0 infeasible, 128 feasible elsewhere, 255 t-connected region."""
    img = np.where(grid.feasible, 128, 0)
    img[grid.component] = 255
    lines = ["P2", f"# angle {grid.angle:.9g} cell {grid.cell:.9g}", f"{grid.nx} {grid.ny}", "255"]
    for row in img[::-1]:
        lines.append(" ".join(str(int(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# --- inscribed rectangles ---------------------------------------------------

def largest_rectangle(mask: np.ndarray, force_square: bool = False):
    """Largest all-True axis-aligned rectangle of a boolean mask.

    Row-by-row height/left/right sweep.  Returns ``(col0, col1, row0, row1)``
    (half-open) or ``None`` for an empty mask.  With ``force_square`` the
    key is the side min(width, height), ties broken by area.
    """
    ny, nx = mask.shape
    idx = np.arange(nx)
    height = np.zeros(nx, dtype=np.int64)
    left = np.zeros(nx, dtype=np.int64)
    right = np.full(nx, nx, dtype=np.int64)
    best_key, best = (0, 0), None
    for j in range(ny):
        row = mask[j]
        height = np.where(row, height + 1, 0)
        run_left = np.maximum.accumulate(np.where(row, 0, idx + 1))
        left = np.where(row, np.maximum(left, run_left), 0)
        run_right = np.minimum.accumulate(np.where(row, nx, idx)[::-1])[::-1]
        right = np.where(row, np.minimum(right, run_right), nx)
        width = np.where(row, right - left, 0)
        area = width * height
        if force_square:
            side = np.minimum(width, height)
            top = side.max()
            if top == 0:
                continue
            cand = np.flatnonzero(side == top)
            i = int(cand[np.argmax(area[cand])])
            key = (int(top), int(area[i]))
        else:
            i = int(np.argmax(area))
            key = (int(area[i]), 0)
        if key > best_key:
            best_key = key
            best = (int(left[i]), int(right[i]), j - int(height[i]) + 1, j + 1)
    return best


def max_inscribed_rectangle(grid: WorkspaceGrid, force_square: bool = False) -> RectResult:
    found = largest_rectangle(grid.component, force_square)
    if found is None:
        raise EmptyWorkspace("t-connected region is empty")
    c0, c1, r0, r1 = found
    if force_square:
        side = min(c1 - c0, r1 - r0)
        # centre the square inside the maximal rectangle
        c0 += (c1 - c0 - side) // 2
        r0 += (r1 - r0 - side) // 2
        c1, r1 = c0 + side, r0 + side
    o, h = grid.origin, grid.cell
    lo = Vec2(o.x + c0 * h, o.y + r0 * h)
    hi = Vec2(o.x + c1 * h, o.y + r1 * h)
    w, ht = hi.x - lo.x, hi.y - lo.y
    return RectResult(lo, hi, w * ht, force_square or abs(w - ht) <= h, grid.angle, (c0, c1, r0, r1))


def best_rectangle(design: MechanismDesign, modes: BranchModes = DEFAULT_MODES,
                   bounds: KinetostaticBounds = DEFAULT_BOUNDS, resolution: int = DEFAULT_RESOLUTION,
                   force_square: bool = False, angles=None, coarse_step: float = 5.0):
    """Largest inscribed rectangle over raster orientations.

    ``angles`` (degrees) fixes the candidate orientations.  Otherwise a
    coarse sweep of [0, 90) at a quarter of the resolution is refined at
    full resolution around the best coarse angle.  Returns ``(rect, grid)``.
    """
    cache = {}

    def evaluate(deg, res):
        deg = round(deg % 90.0, 6)
        key = (deg, res)
        if key not in cache:
            grid = build_grid(design, modes, bounds, res, math.radians(deg))
            cache[key] = (max_inscribed_rectangle(grid, force_square), grid)
        return cache[key]

    def pick(degs, res):
        best = None
        for deg in degs:
            rect, grid = evaluate(deg, res)
            if best is None or rect.area > best[1].area + 1e-15:
                best = (deg % 90.0, rect, grid)
        return best

    if angles is not None:
        _, rect, grid = pick(list(angles), resolution)
        return rect, grid
    coarse_res = max(64, resolution // 4)
    a0, _, _ = pick(np.arange(0.0, 90.0, coarse_step), coarse_res)
    a1, _, _ = pick(a0 + np.arange(-3.0, 3.5, 1.0), resolution)
    _, rect, grid = pick(a1 + np.arange(-0.5, 0.75, 0.25), resolution)
    return rect, grid


# --- envelope and singular loci ----------------------------------------------

def envelope(design: MechanismDesign, modes: BranchModes = DEFAULT_MODES, samples: int = 64) -> EnvelopeResult:
    """Bounding box of base, rails, sliders, struts and tool point over the joint box."""
    if samples < 64:
        raise ValueError("need at least 64 samples per joint axis")
    r = np.linspace(0.0, design.delta_rho, samples)
    r1, r2 = np.meshgrid(r, r, indexing="ij")
    px, py, cx, cy, dx, dy, valid = fk_batch(design, r1, r2, modes.assembly)
    xs = [np.array([design.A.x, design.B.x]), cx.ravel(), dx.ravel()]
    ys = [np.array([design.A.y, design.B.y]), cy.ravel(), dy.ravel()]
    px, py = px[valid], py[valid]
    cxv, cyv, dxv, dyv = cx[valid], cy[valid], dx[valid], dy[valid]
    for t in np.linspace(0.0, 1.0, 10):  # endpoints plus 8 interior points
        xs += [cxv + t * (px - cxv), dxv + t * (px - dxv)]
        ys += [cyv + t * (py - cyv), dyv + t * (py - dyv)]
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    lo = Vec2(float(x.min()), float(y.min()))
    hi = Vec2(float(x.max()), float(y.max()))
    return EnvelopeResult(lo, hi, (hi.x - lo.x) * (hi.y - lo.y))


def singularity_loci(design: MechanismDesign, grid: WorkspaceGrid,
                     modes: BranchModes = DEFAULT_MODES) -> list[Locus]:
    """Zero contours of det A (parallel) and of each leg's reach discriminant (serial)."""
    u, v = grid.axes()
    X, Y = grid.centers()
    L = design.L
    discs = []
    for base, w in ((design.A, design.u1), (design.B, design.u2)):
        rx, ry = X - base.x, Y - base.y
        proj = w.x * rx + w.y * ry
        discs.append((L * L - (rx * rx + ry * ry) + proj * proj) / (L * L))
    reach = (discs[0] >= 0) & (discs[1] >= 0)
    rho1, rho2, _ = ik_batch(design, X, Y, modes)
    cx, cy = rho1 * design.u1.x, rho1 * design.u1.y
    dx, dy = design.L0 + rho2 * design.u2.x, rho2 * design.u2.y
    det_a = ((X - cx) * (Y - dy) - (Y - cy) * (X - dx)) / (L * L)

    loci = []
    fields = [("parallel", np.ma.masked_where(~reach, det_a))]
    # a few cells of slack: the two reach boundaries may coincide (biglide1)
    slack = -4.0 * grid.cell / L
    fields.append(("serial", np.ma.masked_where(discs[1] < slack, discs[0])))
    fields.append(("serial", np.ma.masked_where(discs[0] < slack, discs[1])))
    for kind, z in fields:
        gen = contourpy.contour_generator(u, v, z, line_type=contourpy.LineType.Separate)
        for seg in gen.lines(0.0):
            if len(seg) < 2:
                continue
            wx, wy = grid.to_world(seg[:, 0], seg[:, 1])
            loci.append(Locus(kind, np.column_stack([wx, wy])))
    return loci


def rectangle_is_feasible(design: MechanismDesign, rect: RectResult, grid: WorkspaceGrid,
                          modes: BranchModes = DEFAULT_MODES, bounds: KinetostaticBounds = DEFAULT_BOUNDS) -> bool:
    """Re-check every cell centre of ``rect`` with the pointwise reference."""
    c0, c1, r0, r1 = rect.cells
    u, v = grid.axes()
    for j in range(r0, r1):
        for i in range(c0, c1):
            x, y = grid.to_world(u[i], v[j])
            if not feasibility(design, (x, y), modes, bounds):
                return False
    return True
