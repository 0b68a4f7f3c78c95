"""Tests for the exception hierarchy and its exit codes."""

import pytest

from hyperstab.errors import (
    CapacityError,
    HyperstabError,
    InputError,
    InvariantViolation,
    UndefinedEntropyError,
    VerificationFailure,
)


@pytest.mark.parametrize(
    "exc, code",
    [
        (InputError, 2),
        (UndefinedEntropyError, 2),
        (CapacityError, 3),
        (InvariantViolation, 1),
        (VerificationFailure, 1),
    ],
)
def test_exit_codes(exc, code):
    assert issubclass(exc, HyperstabError)
    assert exc("boom").exit_code == code


def test_input_error_is_value_error():
    with pytest.raises(ValueError):
        raise InputError("bad file")
