"""Exception hierarchy shared by all stabtiles modules.

Exit-code contract for the CLI: SchemaError maps to 2, MathError (any
mathematical precondition violation) maps to 3, verification failures are
reported, not raised, and map to 4.
"""

from __future__ import annotations


class StabtilesError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(StabtilesError):
    """A structured-text document violates the input schema."""

    def __init__(self, message: str, *, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class MathError(StabtilesError):
    """A mathematical precondition was violated."""


class UsageError(MathError):
    """Arguments are dimensionally or structurally inconsistent."""


class NonAdmissible(MathError):
    """A relation is not a combination of parallel paths of length >= 2."""


class NotNilpotent(MathError):
    """Paths survive at the nilpotency bound; the quotient is not finite."""


class NonSplitEndomorphismField(MathError):
    """An endomorphism algebra modulo its radical is a division algebra
    strictly larger than the rationals, so indecomposability bookkeeping is
    sensitive to the base field."""


class ResolutionTooLong(MathError):
    """A minimal projective resolution exceeded the global-dimension bound."""


class TiltDivergence(MathError):
    """Universal (co)extension iteration exceeded its bound, signalling a
    heart that is not of finite length."""


class ExtSpaceTooLarge(MathError):
    """An extension space of dimension >= 2 exhausted the sampling grid
    without the closure stabilising; the result may be incomplete."""


class FactorizationStuck(MathError):
    """No simple of the current heart lies in the remaining torsion set; the
    set is not a valid torsion theory."""


class NotAnIntervalHeart(MathError):
    """The target heart does not sit between the source t-structure and its
    shift, so no torsion theory can connect them."""


class NotSpherical(MathError):
    """An object failed the spherical self-extension or pairing test."""


class LimitForbidden(MathError):
    """A limiting central charge kills the charge of a limit-semistable
    object; the degeneration leaves the closure of the tile."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class LeftTileRange(MathError):
    """A rotated or rescaled stability condition left the explored atlas."""
