"""Exception hierarchy for netkernel.

Every malformed input maps to exactly one named error so callers (and the
CLI exit-code mapping) can distinguish validation failures from bad files.
"""


class NetkernelError(Exception):
    """Base class for all netkernel errors."""


# --- network construction -------------------------------------------------

class NetworkBuildError(NetkernelError):
    """Base class for errors raised while building a network."""


class DisconnectedGraphError(NetworkBuildError):
    pass


class DuplicateEdgeError(NetworkBuildError):
    pass


class SelfLoopError(NetworkBuildError):
    pass


class NonPositiveLengthError(NetworkBuildError):
    pass


class DanglingEndpointError(NetworkBuildError):
    pass


# --- parameter / input validation ----------------------------------------

class InvalidParamsError(NetkernelError):
    pass


class FileFormatError(NetkernelError):
    """Malformed input file (JSON/CSV schema violation); message carries
    the offending file, field and line where available."""


# --- metrics --------------------------------------------------------------

class InconsistentNetworkError(NetkernelError):
    """Geodesic metric requested on a network that fails the
    distance-consistency check."""


class MissingCoordinatesError(NetkernelError):
    pass


class SingularSystemError(NetkernelError):
    """Resistance solve broke down numerically (should not happen on a
    connected network)."""


# --- kernels --------------------------------------------------------------

class MetricMismatchError(NetkernelError):
    pass


class InnerFamilyNotCompletelyMonotoneError(NetkernelError):
    """Circular-time families require an inner spatial correlation from the
    completely monotone whitelist."""


# --- gp -------------------------------------------------------------------

class NotPositiveDefiniteError(NetkernelError):
    pass
