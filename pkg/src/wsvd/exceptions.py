"""Exception types raised by the library."""

import numpy as np


class WsvdError(Exception):
    """Base class for all library errors."""


class DuplicatePoints(WsvdError, ValueError):
    """Two data sites are closer than the duplicate tolerance."""


class TooFewPoints(WsvdError, ValueError):
    pass


class UnsupportedDomain(WsvdError, ValueError):
    pass


class DegenerateRule(WsvdError, ValueError):
    """A cubature rule has a non-positive (or vanishing) weight."""


class EigenFailure(WsvdError, np.linalg.LinAlgError):
    pass


class LengthMismatch(WsvdError, ValueError):
    pass


class EmptyGrid(WsvdError, ValueError):
    pass


class SingularMatrix(WsvdError, np.linalg.LinAlgError):
    """The kernel matrix could not be solved reliably.

    Attributes
    ----------
    cond : float
        Estimated 2-norm condition number of the offending matrix.
    """

    def __init__(self, message, cond=np.inf):
        super().__init__(message)
        self.cond = cond
