"""Contains the exception classes raised by slexp operations."""

class SlexpError(ValueError):
    """Base class for every error raised by slexp operations."""

    def __init__(self, message=''):
        """Create a new error.

        Keyword arguments:
        message -- description naming the offending value (default ''; String)
        """
        super(SlexpError, self).__init__(message)
        self.message = message


### Algebra ###

class NotMonic(SlexpError):
    """Defining polynomial does not have leading coefficient 1."""

class Reducible(SlexpError):
    """Defining polynomial factors over the integers."""

class ZeroDiscriminant(SlexpError):
    """Defining polynomial has a repeated root."""

class NotSquareFree(SlexpError):
    """Modulus is divisible by the square of a prime."""

class RamifiedPrime(SlexpError):
    """A prime of the modulus divides the discriminant."""

class CompositePrimeDetected(SlexpError):
    """Integer factorisation of the modulus returned a non-prime."""

class FactorizationUnsupported(SlexpError):
    """Factoring the defining polynomial mod p is beyond the supported degree."""

class NotAUnit(SlexpError):
    """Element has a zero CRT component and cannot be inverted."""

class FactorMismatch(SlexpError):
    """CRT parts or projection targets do not match the ring's factors."""


### Groups ###

class RingMismatch(SlexpError):
    """Operands live over different rings or dimensions."""

class NotInGroup(SlexpError):
    """Matrix does not have determinant 1."""

class TooLarge(SlexpError):
    """An exhaustive computation would exceed its configured cap."""

class NotSymmetric(SlexpError):
    """Generator multiset is not closed under inverses."""


### Spectral ###

class TooLargeForDense(SlexpError):
    """Group is too large for a dense operator."""

class NoConvergence(SlexpError):
    """Iterative eigensolver hit its iteration cap above tolerance."""


### Walks ###

class BudgetExceeded(SlexpError):
    """Exact arithmetic budget exhausted."""

class ModeMismatch(SlexpError):
    """Exact and float measures combined without an explicit cast."""

class NotProper(SlexpError):
    """Subgroup passed where a proper subgroup is required."""

class NotAPartition(SlexpError):
    """Blocks overlap or do not cover the support of the measure."""

class HypothesisNotMet(SlexpError):
    """Input does not satisfy the hypothesis of the requested procedure."""


### Growth ###

class EmptyResult(SlexpError):
    """Regularisation removed every element."""

class AtlasUnavailable(SlexpError):
    """No subgroup atlas exists for a CRT factor."""

class ZeroElement(SlexpError):
    """Zero passed where a nonzero field element is required."""

class NotGenerating(SlexpError):
    """Set does not generate the full group."""

class SearchExhausted(SlexpError):
    """Word-length cap reached without a witness."""


### Archimedean ###

class PrecisionLoss(SlexpError):
    """Numerical refinement failed at the working precision."""

class IllConditioned(SlexpError):
    """Matrix condition number exceeds the configured cap."""

class ZeroVector(SlexpError):
    """Zero vector has no projective class."""

class NonProximalMember(SlexpError):
    """A letter of the set is not proximal in some embedding."""

class NoSuchM(SlexpError):
    """No power up to M_max satisfies the ping-pong conditions."""

class FreenessUnverified(SlexpError):
    """Two distinct reduced words evaluate to the same element."""
