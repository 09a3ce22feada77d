"""Exception hierarchy shared across the package.

Every error raised by the library derives from BranchKnotError so callers can
catch one type at the CLI boundary and map it to an exit code.
"""

from __future__ import annotations


class BranchKnotError(Exception):
    """Base class for all library errors."""


class ParseError(BranchKnotError):
    """Config or braid-word text could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(BranchKnotError):
    """A structural invariant of an input object is violated."""


class PreconditionViolated(BranchKnotError):
    """An operation was called outside its documented domain."""


class NonConvergence(BranchKnotError):
    """An iterative solve failed to converge."""


class GenericityFailure(BranchKnotError):
    """The perturbed surface is not generic enough to continue.

    Raised when an intersection fails its transversality margin or when
    projected double points collide; the pipeline reacts by retrying with a
    perturbed quadratic term.
    """


class ZeroFiber(BranchKnotError):
    """A fiber over z = 0 was requested; the branch point has no N distinct lifts."""


class TangencyDetected(BranchKnotError):
    """A curve crossing was too close to tangential to certify transversality."""


class DoublePointOnLoop(BranchKnotError):
    """The traced loop passes through (or too near) an actual double point."""


class LiftAmbiguity(BranchKnotError):
    """Continuous tracking of fiber lifts could not be disambiguated."""


class StrandMismatch(BranchKnotError):
    """Fiber lifts at the end of the loop do not match the start fiber."""


class ConstructionFailure(BranchKnotError):
    """No valid loop geometry was found within the retry budget."""


class BlockStructureFailure(BranchKnotError):
    """Traced crossing events do not have the expected block/band structure."""


class TemplateMismatch(BranchKnotError):
    """The traced braid word does not match its expanded band form."""


class NotAKnot(BranchKnotError):
    """The braid closure has more than one component."""


class NonUnitRemainder(BranchKnotError):
    """An exact Laurent polynomial division left a nonzero remainder."""


class MissingData(BranchKnotError):
    """A stored report lacks a field needed for the requested operation."""
