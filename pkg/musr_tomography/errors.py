"""Exception hierarchy shared by every sub-package.

`ConfigError` covers anything the user can fix by editing input files or flags,
`NumericError` covers failures inside the numerics. The CLI maps the two roots to
exit codes 2 and 3.
"""


class TomographyError(Exception):
    """Root of all errors raised by musr_tomography."""


class ConfigError(TomographyError, ValueError):
    """Unresolvable preset, malformed config or unreadable input file."""


class NumericError(TomographyError):
    """Root of numeric failures."""


class DimensionError(NumericError, ValueError):
    pass


class NotHermitianError(NumericError, ValueError):
    pass


class NotUnitaryError(NumericError, ValueError):
    pass


class InvalidStateError(NumericError, ValueError):
    """Matrix is not a density matrix (Hermitian, unit trace)."""


class UnsupportedSpinError(NumericError, ValueError):
    pass


class InvalidProjectionError(NumericError, ValueError):
    pass


class CoplanarDirectionsError(NumericError, ValueError):
    pass


class QuadratureDegreeError(NumericError, ValueError):
    pass


class UntabulatedOrientationError(NumericError):
    """No closed-form propagator exists for this field/axis orientation."""


class PolarizationRangeError(NumericError, ValueError):
    pass


class ProbabilityRangeError(NumericError, ValueError):
    pass


class InsufficientCountsError(NumericError):
    pass


class IncompleteSweepError(NumericError):
    """A sweep entry timed out or was cancelled before it finished."""


class PlanError(NumericError, ValueError):
    pass


class RankDeficientPlanError(NumericError):
    """The measurement plan cannot identify all fifteen parameters.

    Attributes:
        rank (int): Rank of the design matrix.
        null_space (str): Human readable description of the unobservable directions.
    """

    def __init__(self, rank: int, null_space: str):
        super().__init__(f"measurement plan has rank {rank} < 15; unobservable: {null_space}")
        self.rank = rank
        self.null_space = null_space
