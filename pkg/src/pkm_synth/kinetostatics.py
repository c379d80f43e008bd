"""Velocity amplification factors from the manipulability ellipse of J^-1."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Singular
from .mechanism import (
    DEFAULT_MODES,
    EPS_SING,
    BranchModes,
    JointConfig,
    MechanismDesign,
    fk_batch,
    forward_kinematics,
    inverse_jacobian,
    jacobians,
    pose_fields,
)

EPS_BOUND = 1e-6


@dataclass(frozen=True)
class AmplificationFactors:
    lambda1: float  # smaller factor
    lambda2: float
    gamma1: float  # semi-axes, gamma_i = 1 / lambda_i
    gamma2: float


@dataclass(frozen=True)
class KinetostaticBounds:
    lambda_min: float = 1.0 / 3.0
    lambda_max: float = 3.0

    def __post_init__(self):
        if not (0.0 < self.lambda_min < self.lambda_max and math.isfinite(self.lambda_max)):
            raise ValueError(f"need 0 < lambda_min < lambda_max, got {self.lambda_min}, {self.lambda_max}")


DEFAULT_BOUNDS = KinetostaticBounds()


def _sym_eig2(m11, m12, m22):
    """Eigenvalues (small, large) of [[m11, m12], [m12, m22]], closed form."""
    half_tr = 0.5 * (m11 + m22)
    disc = 0.25 * (m11 - m22) ** 2 + m12 * m12
    # clamp round-off below zero
    disc = np.where(disc < 0.0, 0.0, disc) if isinstance(disc, np.ndarray) else max(disc, 0.0)
    root = np.sqrt(disc)
    return half_tr - root, half_tr + root


def amplification_factors(jinv) -> AmplificationFactors:
    jinv = np.asarray(jinv, dtype=float)
    det = jinv[0, 0] * jinv[1, 1] - jinv[0, 1] * jinv[1, 0]
    scale = max(float(np.max(np.abs(jinv))), 1e-300)
    if abs(det) <= EPS_SING * scale * scale:
        raise Singular("J^-1 is singular")
    m = jinv @ jinv.T
    small, large = _sym_eig2(m[0, 0], m[0, 1], m[1, 1])
    # smallest factor comes from the largest semi-axis
    g_big, g_small = math.sqrt(large), math.sqrt(max(small, 0.0))
    if g_small == 0.0:
        raise Singular("J^-1 is singular")
    return AmplificationFactors(1.0 / g_big, 1.0 / g_small, g_big, g_small)


def check_bounds(f: AmplificationFactors, b: KinetostaticBounds = DEFAULT_BOUNDS) -> bool:
    return b.lambda_min < f.lambda1 and f.lambda2 < b.lambda_max


def check_bounds_relaxed(f: AmplificationFactors, b: KinetostaticBounds = DEFAULT_BOUNDS,
                         eps: float = EPS_BOUND) -> bool:
    return b.lambda_min - eps < f.lambda1 and f.lambda2 < b.lambda_max + eps


def amplification_at(design: MechanismDesign, q: JointConfig,
                     modes: BranchModes = DEFAULT_MODES) -> AmplificationFactors:
    p = forward_kinematics(design, q, modes)
    return amplification_factors(inverse_jacobian(jacobians(design, q, p)))


def factors_batch(ax, ay, bx, by, cos1, cos2, L):
    """Vectorised (lambda1, lambda2) from strut vectors and cos(theta_i - alpha_i).

    Rows of J^-1 are (p - c) / (L cos1) and (p - d) / (L cos2).  Entries
    where a cosine vanishes come back as (0, inf).
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        s1 = 1.0 / (L * cos1)
        s2 = 1.0 / (L * cos2)
        r1x, r1y = ax * s1, ay * s1
        r2x, r2y = bx * s2, by * s2
        small, large = _sym_eig2(r1x * r1x + r1y * r1y, r1x * r2x + r1y * r2y, r2x * r2x + r2y * r2y)
        lam1 = 1.0 / np.sqrt(large)
        lam2 = 1.0 / np.sqrt(np.clip(small, 0.0, None))
    bad = ~np.isfinite(lam1) | ~np.isfinite(lam2)
    lam1 = np.where(bad, 0.0, lam1)
    lam2 = np.where(bad, np.inf, lam2)
    return lam1, lam2


def joint_sweep(design: MechanismDesign, rho1, rho2, modes: BranchModes = DEFAULT_MODES):
    """Amplification factors over arrays of joint coordinates.

    Returns ``(lambda1, lambda2, ok)``; ``ok`` is False where the pose is
    unreachable, singular, or lies in a working mode other than ``modes``.
    """
    px, py, cx, cy, dx, dy, valid = fk_batch(design, rho1, rho2, modes.assembly)
    det_a, cos1, cos2, (ax, ay, bx, by) = pose_fields(design, px, py, cx, cy, dx, dy)
    ok = valid & (np.abs(det_a) > EPS_SING)
    # working mode -1 means the slider trails P along its rail: cos > 0
    ok &= (-modes.working1 * cos1 > EPS_SING) & (-modes.working2 * cos2 > EPS_SING)
    lam1, lam2 = factors_batch(ax, ay, bx, by, cos1, cos2, design.L)
    return lam1, lam2, ok
