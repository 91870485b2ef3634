"""Exception hierarchy shared across the library.

Everything raised on purpose derives from RatpotError so callers (and the
CLI exit-code mapping) can tell library failures from genuine bugs.
"""


class RatpotError(Exception):
    """Base class for all library-specific failures."""


class ValidationError(RatpotError):
    """Structurally invalid input: wrong degrees, unreduced fractions, bad config."""


class ParseError(ValidationError):
    """Malformed map file or config file."""


class DegenerateEvaluation(RatpotError):
    """Both lift components underflowed to zero at an evaluation point."""


class CoefficientOverflow(RatpotError):
    """Polynomial arithmetic produced non-finite coefficients."""


class RootSolveFailure(RatpotError):
    """Root iteration and its companion-matrix fallback both failed."""


class NotExceptional(ValidationError):
    """A point claimed to be exceptional is not."""


class DepthExceeded(RatpotError):
    """Escape-rate tail bound cannot be met within the configured depth."""


class PoleProximity(RatpotError):
    """An iterate landed too close to a pole for the requested quantity."""


class ExceptionalStart(ValidationError):
    """Inverse-orbit sampling started at an exceptional point."""


class TreeTooLarge(ValidationError):
    """Full preimage tree would exceed the point budget."""


class InsufficientWitnesses(ValidationError):
    """Too few Julia witnesses to label a grid."""


class WalkerBudgetExceeded(RatpotError):
    """A walker exhausted its step budget (normally only counted, not raised)."""


class NormalizationMismatch(RatpotError):
    """The rescaled lift failed its base-height post-check."""


class DegenerateLemniscate(RatpotError):
    """Lemniscate machinery invoked for a polynomial map."""


class EmptyLevelSet(RatpotError):
    """Level-set tracing found no crossing inside the window."""


class InfinityInJulia(RatpotError):
    """Julia witnesses approach infinity; the pipeline refuses a verdict."""


class IoError(RatpotError):
    """Filesystem failure while reading or writing artifacts."""
