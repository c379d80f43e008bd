"""Dimensional synthesis: base length and joint range from amplification bounds.

With the strut length normalised to 1, the base separation L0 is chosen so
the upper amplification bound is met exactly in the configuration that does
not depend on the joint range (sliders at the rail origins).  The joint
range is then grown until some pose of the joint box hits a bound.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoFeasibleRange, NoRoot, PKMError, UnsupportedArchitecture
from .geometry import EPS_STRUCT
from .kinetostatics import (
    DEFAULT_BOUNDS,
    EPS_BOUND,
    KinetostaticBounds,
    amplification_at,
    joint_sweep,
)
from .mechanism import DEFAULT_MODES, Architecture, BranchModes, JointConfig, MechanismDesign

log = logging.getLogger(__name__)

BISECT_TOL = 1e-9
SWEEP_N = 101


@dataclass(frozen=True)
class CriticalConfigs:
    """Joint configurations where the amplification bounds become active.

    ``fixed`` does not depend on the joint range.  Each entry of
    ``dependent`` is a pair of multipliers of delta_rho.
    """

    fixed: JointConfig
    dependent: tuple

    def at(self, delta_rho: float) -> list[JointConfig]:
        return [JointConfig(a * delta_rho, b * delta_rho) for a, b in self.dependent]


_CRITICAL = {
    Architecture.BIGLIDE1: CriticalConfigs(JointConfig(0.0, 0.0), ((1.0, 1.0),)),
    # any rho1 == rho2 pose works for the fixed one: rails are parallel
    Architecture.BIGLIDE2: CriticalConfigs(JointConfig(0.0, 0.0), ((0.0, 1.0), (1.0, 0.0))),
    Architecture.ORTHOGLIDE: CriticalConfigs(JointConfig(0.0, 0.0), ((1.0, 1.0),)),
}


@dataclass(frozen=True)
class SynthesisResult:
    design: MechanismDesign
    L0_over_L: float
    delta_rho_over_L: float
    critical_configs: list = field(default_factory=list)  # [(JointConfig, "upper" | "lower")]
    architecture: Architecture | None = None
    method: str = "critical"


@dataclass(frozen=True)
class ScaledDesign:
    design: MechanismDesign
    scale_factor: float
    target_area: float


def _alphas(arch):
    if isinstance(arch, Architecture):
        return arch.alpha1, arch.alpha2
    a1, a2 = arch
    return float(a1), float(a2)


def critical_configurations(arch) -> CriticalConfigs:
    if not isinstance(arch, Architecture):
        raise UnsupportedArchitecture(f"no closed critical configurations for {arch!r}")
    return _CRITICAL[arch]


def bisect(pred, lo: float, hi: float, tol: float = BISECT_TOL) -> tuple[float, float]:
    """Shrink [lo, hi] with pred(lo) True and pred(hi) False to width ``tol``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def l0_objective(arch, bounds: KinetostaticBounds = DEFAULT_BOUNDS,
                 modes: BranchModes = DEFAULT_MODES, L: float = 1.0):
    """lambda2 - lambda_max at the range-independent configuration, as a function of L0."""
    a1, a2 = _alphas(arch)
    q = JointConfig(0.0, 0.0)

    def f(L0):
        try:
            lam = amplification_at(MechanismDesign(a1, a2, L0, L, L), q, modes)
        except PKMError:
            return math.nan
        return lam.lambda2 - bounds.lambda_max

    return f


def solve_L0(arch, bounds: KinetostaticBounds = DEFAULT_BOUNDS,
             modes: BranchModes = DEFAULT_MODES, L: float = 1.0, samples: int = 1000) -> float:
    """Base separation (in units of L) where the upper bound is met exactly.

    When the objective crosses zero more than once (the orthoglide has a
    second root below its isotropic base length) the largest root is taken:
    it is the one where the sliders are farthest apart.
    """
    f = l0_objective(arch, bounds, modes, L)
    grid = np.linspace(EPS_STRUCT * L, 2.0 * L * (1 - EPS_STRUCT), samples)
    vals = np.array([f(x) for x in grid])
    brackets = [
        (grid[i], grid[i + 1])
        for i in range(samples - 1)
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] <= 0.0
    ]
    if not brackets:
        raise NoRoot(f"amplification never reaches {bounds.lambda_max} for any base length")
    lo, hi = brackets[-1]
    rising = f(lo) < 0.0
    a, b = bisect(lambda x: (f(x) < 0.0) == rising, lo, hi, BISECT_TOL * L)
    return 0.5 * (a + b)


def _within(lam1, lam2, bounds, eps=0.0):
    return lam1 >= bounds.lambda_min - eps and lam2 <= bounds.lambda_max + eps


def sweep_extremes(design: MechanismDesign, modes: BranchModes = DEFAULT_MODES, n: int = SWEEP_N):
    """(min lambda1, max lambda2, all poses valid) over an n x n joint-box grid."""
    r = np.linspace(0.0, design.delta_rho, n)
    r1, r2 = np.meshgrid(r, r, indexing="ij")
    lam1, lam2, ok = joint_sweep(design, r1, r2, modes)
    if not ok.any():
        return math.nan, math.nan, False
    return float(lam1[ok].min()), float(lam2[ok].max()), bool(ok.all())


def _sweep_pred(base: MechanismDesign, bounds, modes, eps=EPS_BOUND):
    def ok(dr):
        lo, hi, all_ok = sweep_extremes(base.with_delta_rho(dr), modes)
        return all_ok and _within(lo, hi, bounds, eps)
    return ok


def _critical_pred(base: MechanismDesign, crit: CriticalConfigs, bounds, modes):
    def ok(dr):
        design = base.with_delta_rho(dr)
        for q in crit.at(dr):
            try:
                lam = amplification_at(design, q, modes)
            except PKMError:
                return False
            if not _within(lam.lambda1, lam.lambda2, bounds):
                return False
        return True
    return ok


def _largest_feasible(pred, L: float, upper: float, step: float) -> float:
    tiny = 1e-9 * L
    if not pred(tiny):
        raise NoFeasibleRange("bounds are violated even for a vanishing joint range")
    lo = tiny
    hi = None
    x = step
    while x <= upper:
        if not pred(x):
            hi = x
            break
        lo = x
        x += step
    if hi is None:
        raise NoFeasibleRange(f"joint range unbounded up to {upper}; check the bounds")
    a, _ = bisect(pred, lo, hi, BISECT_TOL * L)
    return a


def solve_delta_rho(arch, L0: float, bounds: KinetostaticBounds = DEFAULT_BOUNDS,
                    modes: BranchModes = DEFAULT_MODES, L: float = 1.0) -> float:
    """Largest joint range keeping every pose of the joint box within the bounds."""
    result, _ = _solve_delta_rho(arch, L0, bounds, modes, L)
    return result


def _solve_delta_rho(arch, L0, bounds, modes, L):
    a1, a2 = _alphas(arch)
    base = MechanismDesign(a1, a2, L0, L, L)
    fixed = JointConfig(0.0, 0.0)
    try:
        lam = amplification_at(base, fixed, modes)
    except PKMError as exc:
        raise NoFeasibleRange(f"rails-origin pose is invalid: {exc}") from exc
    if not _within(lam.lambda1, lam.lambda2, bounds, EPS_BOUND):
        raise NoFeasibleRange(
            f"rails-origin pose already violates the bounds (lambda = {lam.lambda1:.4g}, {lam.lambda2:.4g})"
        )
    upper = 2.0 * L + L0
    step = 0.01 * L
    sweep_ok = _sweep_pred(base, bounds, modes)
    if isinstance(arch, Architecture):
        dr = _largest_feasible(_critical_pred(base, critical_configurations(arch), bounds, modes),
                               L, upper, step)
        if sweep_ok(dr):
            return dr, "critical"
        log.warning("%s: joint-box sweep contradicts critical configurations, using the sweep", arch.label)
    return _largest_feasible(sweep_ok, L, upper, step), "sweep"


def _activated(design, q, bounds, modes):
    lam = amplification_at(design, q, modes)
    up = abs(lam.lambda2 - bounds.lambda_max)
    down = abs(lam.lambda1 - bounds.lambda_min)
    return "upper" if up <= down else "lower"


def synthesize(arch, bounds: KinetostaticBounds = DEFAULT_BOUNDS,
               modes: BranchModes = DEFAULT_MODES, L: float = 1.0) -> SynthesisResult:
    L0 = solve_L0(arch, bounds, modes, L)
    dr, method = _solve_delta_rho(arch, L0, bounds, modes, L)
    a1, a2 = _alphas(arch)
    design = MechanismDesign(a1, a2, L0, L, dr)
    if isinstance(arch, Architecture):
        crit = critical_configurations(arch)
        qs = [crit.fixed, *crit.at(dr)]
    else:
        qs = [JointConfig(0.0, 0.0)]
    marks = [(q, _activated(design, q, bounds, modes)) for q in qs]
    return SynthesisResult(
        design=design,
        L0_over_L=L0 / L,
        delta_rho_over_L=dr / L,
        critical_configs=marks,
        architecture=arch if isinstance(arch, Architecture) else None,
        method=method,
    )


def scale_design(norm: SynthesisResult, S_normalized: float, S_target: float) -> ScaledDesign:
    if S_normalized <= 0:
        raise ValueError("normalised workspace area must be positive")
    k = math.sqrt(S_target / S_normalized)
    return ScaledDesign(norm.design.scaled(k), k, S_target)
