"""
Tests for the model parameters and the error hierarchy.

Validates:
- Parameter contracts
- Real powers u^p for integer, odd-root and even-root exponents
- Exit codes carried by the errors
"""

import numpy as np
import pytest

from bozk.base import (
    NEGATIVE_FLOOR,
    Params,
    ContractError,
    RegimeError,
    ConvergenceError,
    NumericError,
)


def params(p):
    return Params(p=p, alpha=-1.0, epsilon=1, c=1.0)


class TestParams:
    """Contracts on (p, alpha, epsilon, c)."""

    @pytest.mark.parametrize("kwargs,match", [
        ({"p": 1, "alpha": -1.0, "epsilon": 0, "c": 1.0}, "epsilon"),
        ({"p": 1, "alpha": 0.0, "epsilon": 1, "c": 1.0}, "alpha"),
        ({"p": 1, "alpha": -1.0, "epsilon": 1, "c": 0.0}, "speed"),
        ({"p": 0, "alpha": -1.0, "epsilon": 1, "c": 1.0}, "positive"),
    ])
    def test_contracts(self, kwargs, match):
        with pytest.raises(ContractError, match=match):
            Params(**kwargs)

    def test_with_speed(self):
        assert params(2).with_speed(3.0) == Params(p=2, alpha=-1.0, epsilon=1, c=3.0)

    @pytest.mark.parametrize("p,signed", [(1, True), (1 / 3, True), (2 / 3, True), (1.5, False), (0.5, False)])
    def test_signed_power_needs_odd_denominator(self, p, signed):
        assert params(p).admits_signed_power is signed


class TestPower:
    """u^(p + extra) on arrays."""

    def test_integer_power_keeps_sign(self):
        u = np.array([-2.0, -0.5, 0.0, 3.0])
        assert np.array_equal(params(3).power(u), u ** 3)
        assert np.array_equal(params(2).power(u, extra=1), u ** 3)

    def test_odd_root(self):
        u = np.array([-8.0, -1.0, 0.0, 27.0])
        assert np.allclose(params(1 / 3).power(u), [-2.0, -1.0, 0.0, 3.0], rtol=1e-12)

    def test_even_numerator_root_is_even(self):
        u = np.array([-8.0, 8.0])
        assert np.allclose(params(2 / 3).power(u), [4.0, 4.0], rtol=1e-12)

    def test_even_denominator_on_nonnegative_data(self):
        u = np.array([0.0, 1.0, 4.0, 9.0])
        assert np.allclose(params(1.5).power(u), [0.0, 1.0, 8.0, 27.0], rtol=1e-12)
        assert np.allclose(params(1.5).power(u, extra=1), [0.0, 1.0, 32.0, 243.0], rtol=1e-12)

    def test_even_denominator_clips_ringing(self):
        u = np.array([-0.1 * NEGATIVE_FLOOR, 0.0, 1.0])
        out = params(1.5).power(u)
        assert np.all(np.isfinite(out))
        assert out[0] == 0.0

    def test_even_denominator_rejects_negative_data(self):
        with pytest.raises(ContractError, match="m odd"):
            params(1.5).power(np.array([-0.5, 1.0]))

    def test_empty_array(self):
        assert params(1.5).power(np.array([])).size == 0


class TestErrors:
    """Exit codes and serialized form."""

    @pytest.mark.parametrize("error,code", [
        (ContractError("bad"), 2),
        (RegimeError("none"), 3),
        (ConvergenceError("stalled"), 4),
        (NumericError("nan"), 1),
    ])
    def test_exit_codes(self, error, code):
        assert error.exit_code == code
        assert error.to_dict() == {"error": type(error).__name__, "message": str(error), "exit_code": code}
