"""Exception types shared across the package."""


class CsdoptError(Exception):
    """Base class for all csdopt errors."""


class ShapeError(CsdoptError):
    """Matrix has the wrong shape (non-square, or dimension mismatch)."""


class NotUnitary(CsdoptError):
    """Matrix fails the unitarity check at the requested tolerance."""

    def __init__(self, deviation, tol):
        self.deviation = deviation
        self.tol = tol
        super().__init__(
            f"matrix is not unitary: max |U U^dag - I| = {deviation:.3e} > {tol:.1e}")


class InvalidPermutation(CsdoptError):
    """Sequence is not a bijection on {1..m}."""


class NumericalBreakdown(CsdoptError):
    """A LAPACK routine failed to converge."""


class RealBranchComplexInput(CsdoptError):
    """Real decomposition branch was given entries with nonzero imaginary part."""


class TooLarge(CsdoptError):
    """Circuit exceeds the dense-simulation qubit cap."""


class DisconnectedGraph(CsdoptError):
    """Walk operators require a connected graph."""


class InfeasiblePattern(CsdoptError):
    """Requested zero pattern cannot host an orthogonal matrix."""


class ParseError(CsdoptError):
    """Input file violates the expected grammar."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
