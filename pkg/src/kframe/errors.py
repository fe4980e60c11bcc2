"""Exception hierarchy.

``ShapeError`` covers malformed input (wrong dimensions, mismatched index
sets). ``PreconditionError`` covers well-formed input that violates a
mathematical precondition; the CLI maps these to exit codes 2 and 3.
"""


class KFrameError(Exception):
    """Base class for all package errors."""


class ShapeError(KFrameError, ValueError):
    """Array dimensions or index sets do not match."""


class PreconditionError(KFrameError):
    """Input is well-formed but violates an operation's precondition."""


class NotAJFrameError(PreconditionError):
    """The family is not a J-frame."""

    def __init__(self, msg, diagnostics=()):
        super().__init__(msg)
        self.diagnostics = list(diagnostics)


class RegularityError(PreconditionError):
    """A subspace is degenerate, so no J-selfadjoint projection exists."""

    def __init__(self, msg, smallest_angle):
        super().__init__(msg)
        self.smallest_angle = smallest_angle


class SectorError(PreconditionError):
    """Spectrum is not inside the open right half-plane."""


class CrossOrthogonalityError(PreconditionError):
    """Positive and negative frame vectors are not J-orthogonal."""

    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


class InfeasibleSpecError(PreconditionError):
    """Generator counts cannot produce a J-frame."""


class InconsistentDualError(KFrameError):
    """Extracted perturbation does not vanish on the range of the J-adjoint."""
