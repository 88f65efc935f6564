"""Exception hierarchy shared across the package.

Every failure mode that carries physical meaning (gap closings, unstable
counts, undecided certifications) gets its own class so callers can react
programmatically instead of parsing messages.
"""


class QpiError(Exception):
    """Base class for all package errors."""


class SchemaError(QpiError):
    """Model file does not conform to the JSON schema."""


class SymmetryError(QpiError):
    """Declared symmetry data is inconsistent (non-unitary, wrong algebra, ...)."""


class NotHermitian(QpiError):
    """Symbol fails the Hermiticity check on the torus."""


class MissingChiral(QpiError):
    """Operation requires a chiral symmetry operator that was not provided."""


class SingularOnCircle(QpiError):
    """det f vanishes (numerically) somewhere on the unit circle."""


class PhaseJump(QpiError):
    """Winding-number phase increment exceeded pi/2 even after refinement."""


class NonCanonical(QpiError):
    """Symbol admits no canonical factorization (nontrivial partial indices)."""


class IllConditioned(QpiError):
    """Factorization residual failed to meet tolerance after escalation."""


class GaplessAtFixedPoint(QpiError):
    """Hamiltonian has (near-)zero eigenvalue at an inversion-fixed momentum."""


class NonCommuting(QpiError):
    """Matrix expected to commute with the inversion operator does not."""


class Undecided(QpiError):
    """Finite-section certification did not stabilize; neither pass nor fail."""


class RangeTooLarge(QpiError):
    """Hopping range too large for the requested truncation size."""


class GapViolation(QpiError):
    """Edge/surface gap assumption does not hold; boundary index undefined."""


class UnstableCount(QpiError):
    """Corner-mode count changed between truncation sizes L and L+8."""


class TrackingLost(QpiError):
    """Eigenvalue branch tracking lost continuity even after grid refinement."""


class QuadratureUnresolved(QpiError):
    """Winding integral failed the integrality guard after refinement."""
