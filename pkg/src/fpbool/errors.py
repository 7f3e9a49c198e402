"""Exception types shared across the package."""


class FpboolError(Exception):
    """Base class for all package errors."""


class RingMismatch(FpboolError):
    """Operands live in different rings, or the ring kind is unsupported here."""


class ShapeMismatch(FpboolError):
    """Cyclic ring elements with different length or modulus."""


class NotInvertible(FpboolError):
    """Element has no inverse in the cyclic ring."""


class UnsupportedModulus(FpboolError):
    """Cyclic inversion implemented only for prime moduli and powers of two."""


class NotQuadratic(FpboolError):
    """Bit-blasting requires every input polynomial to have total degree <= 2."""


class BadModulus(FpboolError):
    """Modular lift needs a modulus >= 2."""


class UnboundedVariable(FpboolError):
    """Integer variable used without a declared bound."""


class EmptyOrPointConstraint(FpboolError):
    """Inequality window with negative width; use an exact equation instead."""


class MissingBits(FpboolError):
    """Assignment does not cover every Boolean variable that is needed."""


class ParseError(FpboolError):
    """Malformed external input (solution line, matrix text, JSON payload)."""


class ExternalSolverMismatch(FpboolError):
    """An imported solution failed re-evaluation against the system."""


class RankDeficient(FpboolError):
    """Matrix does not have full column rank."""


class CenteredRepUnsupported(FpboolError):
    """Centered residues need an odd prime modulus."""


class KeygenFailed(FpboolError):
    """Could not sample an invertible key within the retry budget."""
