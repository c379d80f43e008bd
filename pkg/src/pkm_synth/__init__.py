"""Synthesis and workspace analysis of 2-DOF planar parallel kinematic machines.

Three architectures are provided as presets (biglide1, biglide2, orthoglide).
The usual entry points are :func:`synthesize`, :func:`best_rectangle` and
:func:`scale_design`; ``pkm-synth compare`` runs the whole pipeline.
"""

__version__ = "0.1.0"

from .errors import PKMError  # noqa: E402
from .kinetostatics import KinetostaticBounds, amplification_at, amplification_factors  # noqa: E402
from .mechanism import (  # noqa: E402
    DEFAULT_MODES,
    Architecture,
    BranchModes,
    JointConfig,
    MechanismDesign,
    forward_kinematics,
    inverse_kinematics,
)
from .synthesis import scale_design, synthesize  # noqa: E402
from .workspace import best_rectangle, build_grid, envelope, max_inscribed_rectangle  # noqa: E402

__all__ = [
    "Architecture",
    "BranchModes",
    "DEFAULT_MODES",
    "JointConfig",
    "KinetostaticBounds",
    "MechanismDesign",
    "PKMError",
    "amplification_at",
    "amplification_factors",
    "best_rectangle",
    "build_grid",
    "envelope",
    "forward_kinematics",
    "inverse_kinematics",
    "max_inscribed_rectangle",
    "scale_design",
    "synthesize",
]
