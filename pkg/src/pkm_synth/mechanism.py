"""Kinematic model of the two-slider planar parallel mechanism family.

Two prismatic joints glide along fixed rails starting at A=(0, 0) and
B=(L0, 0) with directions alpha1 and alpha2.  Sliders C and D carry struts
of equal length L that meet at the tool point P.  Joint coordinates
rho1, rho2 are measured along the rails and live in [0, delta_rho].
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    InconsistentPose,
    NoIntersection,
    OutOfReach,
    SerialSingular,
    StructuralSingularity,
)
from .geometry import EPS_STRUCT, Vec2, circle_circle_intersection, unit

EPS_SING = 1e-8
POSE_TOL = 1e-6

ToolPoint = Vec2


class Architecture(enum.Enum):
    BIGLIDE1 = ("biglide1", 0.0, math.pi)
    BIGLIDE2 = ("biglide2", math.pi / 2, math.pi / 2)
    ORTHOGLIDE = ("orthoglide", math.pi / 4, 3 * math.pi / 4)

    def __init__(self, label, alpha1, alpha2):
        self.label = label
        self.alpha1 = alpha1
        self.alpha2 = alpha2

    @classmethod
    def from_name(cls, name: str) -> "Architecture":
        for arch in cls:
            if arch.label == name.lower():
                return arch
        raise ValueError(f"unknown architecture {name!r}")


@dataclass(frozen=True)
class MechanismDesign:
    alpha1: float
    alpha2: float
    L0: float
    L: float
    delta_rho: float

    def __post_init__(self):
        for field in ("alpha1", "alpha2", "L0", "L", "delta_rho"):
            v = getattr(self, field)
            if not math.isfinite(v):
                raise ValueError(f"{field} must be finite, got {v}")
        for field in ("L0", "L", "delta_rho"):
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be positive, got {getattr(self, field)}")

    @classmethod
    def from_preset(cls, arch: Architecture, L0: float, L: float, delta_rho: float):
        return cls(arch.alpha1, arch.alpha2, L0, L, delta_rho)

    @property
    def A(self) -> Vec2:
        return Vec2(0.0, 0.0)

    @property
    def B(self) -> Vec2:
        return Vec2(self.L0, 0.0)

    @property
    def u1(self) -> Vec2:
        return unit(self.alpha1)

    @property
    def u2(self) -> Vec2:
        return unit(self.alpha2)

    def scaled(self, k: float) -> "MechanismDesign":
        return replace(self, L0=self.L0 * k, L=self.L * k, delta_rho=self.delta_rho * k)

    def with_delta_rho(self, delta_rho: float) -> "MechanismDesign":
        return replace(self, delta_rho=delta_rho)


@dataclass(frozen=True)
class JointConfig:
    rho1: float
    rho2: float

    def in_range(self, design: MechanismDesign) -> bool:
        return all(0.0 <= r <= design.delta_rho for r in (self.rho1, self.rho2))


@dataclass(frozen=True)
class BranchModes:
    """Solution-branch selectors: ``assembly`` for FK, ``working1/2`` for IK."""

    assembly: int = 1
    working1: int = -1
    working2: int = -1

    def __post_init__(self):
        for field in ("assembly", "working1", "working2"):
            if getattr(self, field) not in (1, -1):
                raise ValueError(f"{field} must be +1 or -1")


# assembly=+ puts P on the left of C->D (above the base line at rho=0);
# working=- takes the smaller rail root so the slider sits behind P.
DEFAULT_MODES = BranchModes()


@dataclass(frozen=True)
class PostureAngles:
    theta1: float
    theta2: float


@dataclass(frozen=True)
class JacobianPair:
    A: np.ndarray
    B: np.ndarray
    L: float
    rows: tuple  # (p - c, p - d)
    u: tuple  # (u1, u2)


@dataclass(frozen=True)
class SingularityReport:
    det_A: float
    det_B: float
    parallel: bool
    serial: bool
    structural: bool

    @property
    def any(self) -> bool:
        return self.parallel or self.serial or self.structural


def slider_positions(design: MechanismDesign, q: JointConfig) -> tuple[Vec2, Vec2]:
    return design.A + design.u1 * q.rho1, design.B + design.u2 * q.rho2


def forward_kinematics(design: MechanismDesign, q: JointConfig,
                       modes: BranchModes = DEFAULT_MODES) -> Vec2:
    c, d = slider_positions(design, q)
    L = design.L
    if (d - c).norm() <= EPS_STRUCT * L:
        raise StructuralSingularity("sliders coincide, tool point is undetermined")
    try:
        return circle_circle_intersection(c, d, L, modes.assembly)
    except NoIntersection as exc:
        raise OutOfReach(msg=f"|CD| = {(d - c).norm():.6g} exceeds 2L") from exc


def _rail_root(base: Vec2, u: Vec2, p, L: float, branch: int, leg: int) -> float:
    rx, ry = p[0] - base.x, p[1] - base.y
    proj = u.x * rx + u.y * ry
    disc = L * L - (rx * rx + ry * ry) + proj * proj
    if disc < 0.0:
        if disc < -1e-12 * L * L:
            raise OutOfReach(leg)
        disc = 0.0
    return proj + branch * math.sqrt(disc)


def inverse_kinematics(design: MechanismDesign, p, modes: BranchModes = DEFAULT_MODES) -> JointConfig:
    rho1 = _rail_root(design.A, design.u1, p, design.L, modes.working1, 1)
    rho2 = _rail_root(design.B, design.u2, p, design.L, modes.working2, 2)
    return JointConfig(rho1, rho2)


def _checked_pose(design, q, p):
    c, d = slider_positions(design, q)
    p = Vec2(*p)
    tol = POSE_TOL * design.L
    for leg, s in ((1, c), (2, d)):
        err = abs((p - s).norm() - design.L)
        if err > tol:
            raise InconsistentPose(f"strut {leg} length off by {err:.3g}")
    return c, d, p


def posture_angles(design: MechanismDesign, q: JointConfig, p) -> PostureAngles:
    c, d, p = _checked_pose(design, q, p)
    return PostureAngles(math.atan2(p.y - c.y, p.x - c.x), math.atan2(p.y - d.y, p.x - d.x))


def jacobians(design: MechanismDesign, q: JointConfig, p) -> JacobianPair:
    """Parallel (A) and serial (B) Jacobians of ``A pdot = B rhodot``."""
    c, d, p = _checked_pose(design, q, p)
    pc, pd = p - c, p - d
    u1, u2 = design.u1, design.u2
    A = np.array([[pc.x, pc.y], [pd.x, pd.y]])
    B = np.diag([pc.dot(u1), pd.dot(u2)])
    return JacobianPair(A, B, design.L, (pc, pd), (u1, u2))


def inverse_jacobian(jac: JacobianPair) -> np.ndarray:
    """J^-1 = B^-1 A, mapping tool velocity to joint rates."""
    b = np.diag(jac.B)
    if np.min(np.abs(b)) <= EPS_SING * jac.L:
        raise SerialSingular("strut perpendicular to its rail")
    return jac.A / b[:, None]


def forward_jacobian(jac: JacobianPair) -> np.ndarray:
    """J = A^-1 B, mapping joint rates to tool velocity."""
    return np.linalg.solve(jac.A, jac.B)


def classify_singularity(design: MechanismDesign, q: JointConfig, p) -> SingularityReport:
    jac = jacobians(design, q, p)
    L = design.L
    det_a = float(jac.A[0, 0] * jac.A[1, 1] - jac.A[0, 1] * jac.A[1, 0])
    b = np.diag(jac.B)
    det_b = float(b[0] * b[1])
    c, d = slider_positions(design, q)
    return SingularityReport(
        det_A=det_a,
        det_B=det_b,
        parallel=abs(det_a) <= EPS_SING * L * L,
        # per-leg test: |cos(theta_i - alpha_i)| <= eps
        serial=bool(np.min(np.abs(b)) <= EPS_SING * L),
        structural=(d - c).norm() <= EPS_STRUCT * L,
    )


# --- vectorised counterparts used by sweeps and rasters -------------------

def fk_batch(design: MechanismDesign, rho1, rho2, assembly: int = 1):
    """Forward kinematics on arrays. Returns (px, py, cx, cy, dx, dy, valid)."""
    rho1 = np.asarray(rho1, dtype=float)
    rho2 = np.asarray(rho2, dtype=float)
    u1, u2 = design.u1, design.u2
    cx, cy = rho1 * u1.x, rho1 * u1.y
    dx, dy = design.L0 + rho2 * u2.x, rho2 * u2.y
    vx, vy = dx - cx, dy - cy
    dist = np.hypot(vx, vy)
    L = design.L
    h2 = L * L - 0.25 * dist * dist
    valid = (dist > EPS_STRUCT * L) & (h2 >= -1e-12 * L * L)
    safe = np.where(valid, dist, 1.0)
    h = np.sqrt(np.clip(h2, 0.0, None)) * assembly
    px = 0.5 * (cx + dx) - vy / safe * h
    py = 0.5 * (cy + dy) + vx / safe * h
    return px, py, cx, cy, dx, dy, valid


def ik_batch(design: MechanismDesign, x, y, modes: BranchModes = DEFAULT_MODES):
    """Inverse kinematics on arrays. Returns (rho1, rho2, reachable)."""
    out = []
    ok = np.ones(np.shape(x), dtype=bool)
    L = design.L
    for base, u, w in ((design.A, design.u1, modes.working1), (design.B, design.u2, modes.working2)):
        rx, ry = x - base.x, y - base.y
        proj = u.x * rx + u.y * ry
        disc = L * L - (rx * rx + ry * ry) + proj * proj
        ok &= disc >= 0.0
        out.append(proj + w * np.sqrt(np.clip(disc, 0.0, None)))
    return out[0], out[1], ok


def pose_fields(design: MechanismDesign, px, py, cx, cy, dx, dy):
    """Normalised det A / L^2, per-leg cos(theta_i - alpha_i) and J^-1 entries."""
    L = design.L
    u1, u2 = design.u1, design.u2
    ax, ay = px - cx, py - cy
    bx, by = px - dx, py - dy
    det_a = (ax * by - ay * bx) / (L * L)
    cos1 = (ax * u1.x + ay * u1.y) / L
    cos2 = (bx * u2.x + by * u2.y) / L
    return det_a, cos1, cos2, (ax, ay, bx, by)
