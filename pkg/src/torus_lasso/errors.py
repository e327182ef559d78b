"""Exception taxonomy shared by the enclosure pipeline.

The distinction matters downstream: a blow-up (certified radius becomes
non-finite) truncates a tube, while singularities and estimation failures
abort the run with a diagnostic.
"""


class TorusLassoError(Exception):
    """Base class for all library errors."""


class BoundBlowup(TorusLassoError):
    """The certified error radius overflowed (e.g. e^{3 lambda t} too large).

    Raised instead of silently returning infinity, so inclusion tests can
    never be corrupted by a non-finite radius.
    """

    def __init__(self, msg, step_index=None):
        super().__init__(msg)
        self.step_index = step_index


class DimensionMismatch(TorusLassoError, ValueError):
    """Two geometric objects of different dimension were combined."""


class SingularityError(TorusLassoError):
    """The vector field was evaluated on (or within 1e-9 of) its singular set."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class EstimationError(TorusLassoError):
    """Constant estimation failed (eigen-solver failure, non-finite Jacobian)."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class EnclosureError(TorusLassoError):
    """The inflate-and-verify region fixed point was not reached."""

    def __init__(self, msg, step_index=None):
        super().__init__(msg)
        self.step_index = step_index
