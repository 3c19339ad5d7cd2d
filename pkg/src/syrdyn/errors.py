"""Exception hierarchy shared across the package.

Two top-level families, mirroring the CLI exit codes: ValidationError for
bad user input (exit 1) and InternalCheckError for self-checks that must
never fail on valid input (exit 3, indicates a bug).
"""


class SyrdynError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SyrdynError, ValueError):
    """Rejected input: bad descriptor, bad parameters, out-of-domain point."""


class InternalCheckError(SyrdynError, RuntimeError):
    """An invariant that must hold on valid input failed."""


# -- descriptor / input validation ------------------------------------------

class InvalidDescriptor(ValidationError):
    """Structurally bad map descriptor (modulus, branch count, multiplier)."""


class GcdViolation(InvalidDescriptor):
    """Branch multipliers share a factor with the modulus."""


class NonIntegerBranch(InvalidDescriptor):
    """Some branch does not divide exactly on its residue class."""


class NonPositiveImage(InvalidDescriptor):
    """Some x >= 1 would map to a value below 1."""


class DescriptorParseError(ValidationError):
    """Descriptor text does not match the grammar; carries the position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(ValidationError):
    """A map was applied outside {1, 2, 3, ...}."""


class InvalidParameters(ValidationError):
    """Arguments outside an operation's documented range."""


class NotInN2(ValidationError):
    """A value required to be = 2 (mod 3) was not."""


class NotApplicable(ValidationError):
    """The requested structural identity has no integral solution here."""


class OverlappingCycles(ValidationError):
    """Two supplied cycles share a member; they must be disjoint orbits."""


# -- internal self-checks ----------------------------------------------------

class VerificationFailure(InternalCheckError):
    """A claimed cycle or structural fact failed re-verification."""


class BoundViolation(InternalCheckError):
    """The power bound mu(T^-n(A)) <= 2 mu(A) failed; carries a witness."""


class ConnectionFailure(InternalCheckError):
    """A family tail did not land in the predicted residue class."""
