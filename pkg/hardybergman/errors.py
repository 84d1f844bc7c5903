import warnings
from typing import ClassVar

from attrs import define, field

__all__ = [
    "BASE_OPTIONS",
    "NumericWarning",
    "TruncationWarning",
    "EstimateWarning",
    "handle_problem",
    "NumericError",
    "DomainError",
    "PoleError",
    "SupportError",
    "DecayViolationError",
    "NonConvergenceError",
    "ZeroMassError",
    "SingularWeightError",
    "InsufficientDataError",
    "ExponentOverflowError",
    "TruncationError",
    "ReportIOError",
]

BASE_OPTIONS = {"ignore", "warn", "error"}


class NumericWarning(UserWarning):
    pass


class TruncationWarning(NumericWarning):
    """A series or integral was cut off before its tail became negligible."""


class EstimateWarning(NumericWarning):
    """A finite-data estimate of an asymptotic quantity is unreliable."""


@define
class NumericError(Exception):
    msg: str

    category: ClassVar[str] = "numeric"

    def __str__(self):
        return self.msg


@define
class DomainError(NumericError):
    category: ClassVar[str] = "domain"


@define
class PoleError(DomainError):
    z: complex = field(default=0j)

    category: ClassVar[str] = "pole"


@define
class SupportError(DomainError):
    category: ClassVar[str] = "support"


@define
class DecayViolationError(DomainError):
    edge_ratio: float = field(default=float("nan"))

    category: ClassVar[str] = "decay"


@define
class NonConvergenceError(NumericError):
    estimate: object = field(default=None)
    error_estimate: float = field(default=float("nan"))
    refinements: int = field(default=0)

    category: ClassVar[str] = "non-convergence"

    def __str__(self):
        return (
            f"{self.msg} (error estimate {self.error_estimate!r} "
            f"after {self.refinements} refinements)"
        )


@define
class ZeroMassError(NumericError):
    t: float = field(default=float("nan"))

    category: ClassVar[str] = "zero-mass"


@define
class SingularWeightError(NumericError):
    category: ClassVar[str] = "singular-weight"


@define
class InsufficientDataError(NumericError):
    count: int = field(default=0)
    required: int = field(default=0)

    category: ClassVar[str] = "insufficient-data"


@define
class ExponentOverflowError(NumericError):
    exponent: float = field(default=float("nan"))

    category: ClassVar[str] = "overflow"


@define
class TruncationError(NumericError):
    category: ClassVar[str] = "truncation"


@define
class ReportIOError(NumericError):
    path: str = field(default="")

    category: ClassVar[str] = "io"

    def __str__(self):
        return f"{self.path}: {self.msg}"


def handle_problem(msg: str, option: str, category: type[Warning] = NumericWarning):
    if option == "warn":
        warnings.warn(msg, category, stacklevel=3)
    elif option == "error":
        raise TruncationError(msg)
    else:
        assert option == "ignore", f"option {option!r} not supported"
