class BaseError(Exception):
    """Base symnorm exceptions"""


class DimensionError(BaseError):
    """Exception raised when vectors or matrices have mismatched sizes"""


class RootSystemError(BaseError):
    """Exception raised when a root system descriptor is invalid"""


class CapExceededError(BaseError):
    """Exception raised when an enumeration exceeds a configured cap"""

    def __init__(self, cap: str, limit: int, requested: int | None = None):
        self.cap = cap
        self.limit = limit
        self.requested = requested
        detail = f" (requested {requested})" if requested is not None else ""
        super().__init__(
            f"Enumeration cap '{cap}' of {limit} exceeded{detail}. "
            "Raise it with SYMNORM_CAP."
        )


class FanError(BaseError):
    """Exception raised when a fan is malformed or an operation on it is invalid"""


class BundleError(BaseError):
    """Exception raised when piecewise-linear function data is invalid"""


class PolyhedronError(BaseError):
    """Exception raised when a polyhedron is empty, unbounded or malformed"""


class PreconditionError(BaseError):
    """Exception raised when an operation's hypotheses are not met"""


class SplitError(BaseError):
    """Exception raised when a splitter cannot produce a decomposition"""


class WitnessError(SplitError):
    """Exception raised when a decomposition fails re-verification"""

    def __init__(self, algorithm: str, reason: str, witness: object, trace: list):
        self.algorithm = algorithm
        self.reason = reason
        self.witness = witness
        self.trace = trace
        super().__init__(
            f"Witness from '{algorithm}' failed verification: {reason}. "
            f"Trace: {trace}"
        )


class InvariantError(BaseError):
    """Exception raised when an internal invariant is breached"""


class RegistryError(BaseError):
    """Exception raised when a registry error occurs"""


class ReportCollectorError(BaseError):
    """Exception raised when a report collector error occurs"""


class JobError(BaseError):
    """Exception raised when a job or manifest fails validation"""
