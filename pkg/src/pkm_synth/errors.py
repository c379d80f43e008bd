"""Exception hierarchy shared by the kinematics, synthesis and workspace code."""


class PKMError(Exception):
    """Base class for every computation error raised by this package."""

    def describe(self):
        return type(self).__name__


class NoIntersection(PKMError):
    pass


class CoincidentCenters(PKMError):
    pass


class OutOfReach(PKMError):
    def __init__(self, leg=None, msg=None):
        self.leg = leg
        super().__init__(msg or (f"leg {leg} cannot reach the point" if leg else "out of reach"))

    def describe(self):
        return f"OutOfReach(leg={self.leg})" if self.leg else "OutOfReach"


class StructuralSingularity(PKMError):
    pass


class InconsistentPose(PKMError):
    pass


class SerialSingular(PKMError):
    pass


class Singular(PKMError):
    pass


class NoRoot(PKMError):
    pass


class NoFeasibleRange(PKMError):
    pass


class UnsupportedArchitecture(PKMError):
    pass


class EmptyWorkspace(PKMError):
    pass


class ConfigError(Exception):
    """Invalid run configuration (bad key, bad value, unreadable file)."""
