"""Exception hierarchy shared by every eiglab module."""


class EiglabError(Exception):
    """Base class for all errors raised by eiglab."""


class SingularMatrix(EiglabError):
    """A pivot fell below the pivot tolerance during factorization."""


class InvalidRank(EiglabError):
    """Requested rank is outside ``0 <= r <= n``."""


class ParseError(EiglabError):
    """Malformed Matrix Market input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatch(EiglabError):
    """Shapes do not agree with what the caller or the file header declared."""


class NoConvergence(EiglabError):
    """An iteration exhausted its budget.

    ``partial`` carries whatever was computed before giving up (eigenvalues
    found so far, or a Krylov trace).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StructureInconsistent(EiglabError):
    """Recovered multiplicities do not add up; usually a bad cluster tolerance."""


class CondCapUnreachable(EiglabError):
    """No similarity transform met the condition-number cap."""


class Breakdown(EiglabError):
    """Arnoldi breakdown that is not a lucky (converged) one."""


class SingularBlock(EiglabError):
    """The (1,1) block or the Schur complement is numerically singular."""


class AtRoot(EiglabError):
    """Evaluation point coincides with a deflated root."""


class Diverged(EiglabError):
    """Newton iteration failed to converge."""


class LinearSolveFailure(EiglabError):
    """The Newton linear system could not be solved."""


class ConfigError(EiglabError):
    """Invalid experiment configuration."""
