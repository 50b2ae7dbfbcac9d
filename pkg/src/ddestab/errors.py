"""Exception hierarchy shared by all ddestab modules.

A flat family of small classes so callers can distinguish failed input
validation from numerical breakdown without string-matching messages.
"""


class DdeStabError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(DdeStabError):
    """Matrix fails the Hermitian symmetry check.

    Raised instead of silently symmetrizing: an asymmetric input usually
    means the caller assembled the wrong matrix.
    """


class NotPositiveDefinite(DdeStabError):
    """Hermitian matrix has an eigenvalue at or below the PD tolerance."""


class NoConvergence(DdeStabError):
    """An eigenvalue or root iteration failed or violated its residual bound."""


class Singular(DdeStabError):
    """A linear system is singular to working precision."""


class ZeroPolynomial(DdeStabError):
    """All polynomial coefficients vanish; roots are undefined."""


class DegenerateLeading(DdeStabError):
    """After trimming negligible leading coefficients only a constant remains."""


class NotSimultaneouslyDiagonalizable(DdeStabError):
    """Eigenvectors of the first matrix do not diagonalize the second."""


class ComplexSpectrum(DdeStabError):
    """Eigenvalues expected to be real and positive are not."""


class UnsupportedScheme(DdeStabError):
    """The requested operation is undefined for these scheme parameters."""


class SchemeOutOfScope(DdeStabError):
    """Scheme parameters fall outside a certificate's hypotheses."""


class InvalidParams(DdeStabError):
    """Arguments violate a documented precondition."""


class TimeOffGrid(DdeStabError):
    """Requested time does not coincide with a trajectory grid point."""
