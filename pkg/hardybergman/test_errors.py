import warnings

import pytest

from hardybergman.errors import (
    EstimateWarning,
    NonConvergenceError,
    NumericWarning,
    PoleError,
    ReportIOError,
    TruncationError,
    TruncationWarning,
    handle_problem,
)


def test_handle_problem_warn():
    with pytest.warns(TruncationWarning, match="tail too heavy"):
        handle_problem("tail too heavy", "warn", TruncationWarning)


def test_handle_problem_error():
    with pytest.raises(TruncationError, match="tail too heavy"):
        handle_problem("tail too heavy", "error")


def test_handle_problem_ignore():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        handle_problem("tail too heavy", "ignore")


def test_handle_problem_rejects_unknown_option():
    with pytest.raises(AssertionError):
        handle_problem("tail too heavy", "shout")


def test_warning_hierarchy():
    assert issubclass(TruncationWarning, NumericWarning)
    assert issubclass(EstimateWarning, NumericWarning)


@pytest.mark.parametrize(
    "error, category",
    [
        (PoleError("pole", z=-1 + 0j), "pole"),
        (TruncationError("cut"), "truncation"),
        (ReportIOError("denied", path="out.csv"), "io"),
        (NonConvergenceError("stuck"), "non-convergence"),
    ],
)
def test_category(error, category):
    assert error.category == category


def test_messages():
    assert str(ReportIOError("denied", path="out.csv")) == "out.csv: denied"
    err = NonConvergenceError("stuck", error_estimate=0.5, refinements=3)
    assert str(err) == "stuck (error estimate 0.5 after 3 refinements)"
