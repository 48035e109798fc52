"""Exception hierarchy.

Every failure raised by the library derives from :class:`OkuboError`, so
callers can catch the whole family at once or single out one condition.
"""


class OkuboError(Exception):
    """Base class for all library errors."""


# linear algebra
class ClusterAmbiguity(OkuboError):
    """Eigenvalue clusters cannot be separated at the requested tolerance."""


class SingularFrame(OkuboError):
    """No well-conditioned Jordan frame exists at the requested tolerance."""


class Inconsistent(OkuboError):
    """A linear system has no solution within tolerance."""


# Okubo systems and frames
class NotRegular(OkuboError):
    """Some eigenvalue occupies more than one Jordan block."""


class Degenerate(OkuboError):
    """Distinct block eigenvalues have (nearly) coalesced."""


class IndexOutOfRange(OkuboError, IndexError):
    """A canonical direction index (k, l) does not exist."""


class PoleHit(OkuboError):
    """Integration ran into a movable singularity."""


class StepFailure(OkuboError):
    """The adaptive integrator could not meet its tolerance."""


class Resonant(OkuboError):
    """Two exponents differ by a nonzero integer."""


class ZeroSubdiagonal(OkuboError):
    """The confluence construction needs a nonzero first nilpotent coordinate."""


class BadSpectrum(OkuboError):
    """The eigenvalue pattern of B-infinity does not fit the operation."""


# realization
class SingularRtilde(OkuboError):
    """The residue at infinity has a vanishing diagonal entry."""


class CompletionFailure(OkuboError):
    """The frame G cannot be completed to an invertible matrix."""


class RankAmbiguity(OkuboError):
    """A singular value sits too close to the rank cutoff."""


# flat structures
class JacobianDegenerate(OkuboError):
    """The flat coordinate Jacobian is singular at the sample point."""


# Painleve builders
class DivisionByZeroTime(OkuboError):
    """A Hamiltonian with a 1/t factor was evaluated at t = 0."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NoNonzeroTwist(OkuboError):
    """Both roots of the twist quadratic vanish."""


class DetNonzero(OkuboError):
    """A residue that must have rank one has nonzero determinant."""


class ResonantSpectrum(Resonant):
    """A printed residue matrix has a resonant spectrum."""


class NotDiagonalizable(OkuboError):
    """A printed residue matrix is defective at the given parameters."""


class MismatchedPattern(OkuboError):
    """An observed Jordan pattern differs from the expected one."""

    def __init__(self, message, expected=None, observed=None):
        super().__init__(message)
        self.expected = expected
        self.observed = observed


# experiment driver
class ConfigError(OkuboError, ValueError):
    """An experiment configuration is invalid.

    ``field`` names the offending key (dotted path) and ``line`` the line in
    the JSON document, when known.
    """

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line


class MissingReport(OkuboError, FileNotFoundError):
    """A report directory lacks the expected files."""


class ProbeOnSpectrum(OkuboError):
    """A spectral probe point lies on the spectrum of T."""
