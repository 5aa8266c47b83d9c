from dataclasses import dataclass, asdict
from enum import Enum
from fractions import Fraction
from typing import Dict, Any, Optional

import numpy as np

# negative ringing up to this fraction of max|u| is clipped to zero under u^p
NEGATIVE_FLOOR = 1e-6


class Axis(Enum):
    X = "x"
    Y = "y"


class Verdict(Enum):
    EXISTS = "Exists"
    NO_SOLITARY_WAVE = "NoSolitaryWave"
    UNKNOWN = "Unknown"


class DealiasRule(Enum):
    TWO_THIRDS = "two_thirds"
    PAD = "pad"
    NONE = "none"


class BozkError(Exception):
    """Root of every error raised by the laboratory."""

    exit_code = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code
        }


class ContractError(BozkError, ValueError):
    exit_code = 2


class RegimeError(BozkError):
    exit_code = 3


class NumericError(BozkError):
    pass


class ConvergenceError(BozkError):
    exit_code = 4

    def __init__(self, message: str, diagnostics: Any = None, c: Optional[float] = None):
        super().__init__(message)
        self.diagnostics = diagnostics
        self.c = c


class BlowUpError(BozkError):

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class FitError(BozkError):
    pass


class FieldFileError(BozkError):
    pass


@dataclass(frozen=True)
class Params:
    """Model tuple (p, alpha, epsilon, c) of the BO-ZK equation."""

    p: float
    alpha: float
    epsilon: int
    c: float

    def __post_init__(self):
        if self.epsilon not in (-1, 1):
            raise ContractError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if self.alpha == 0:
            raise ContractError("alpha must be nonzero")
        if self.c == 0:
            raise ContractError("wave speed c must be nonzero")
        if not self.p > 0:
            raise ContractError(f"nonlinearity exponent p must be positive, got {self.p}")
        object.__setattr__(self, "epsilon", int(self.epsilon))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p).limit_denominator(999)

    @property
    def is_integer(self) -> bool:
        return float(self.p).is_integer()

    @property
    def admits_signed_power(self) -> bool:
        # p = k/m with m odd keeps u^p real for negative u
        frac = self.fraction
        return abs(float(frac) - self.p) < 1e-12 and frac.denominator % 2 == 1

    def power(self, u: np.ndarray, extra: int = 0) -> np.ndarray:
        """
        u^(p + extra). Odd-root semantics for p = k/m with m odd; any other
        fractional p needs u >= -NEGATIVE_FLOOR * max|u|.
        """

        if self.is_integer:
            return u ** (int(self.p) + extra)
        if self.admits_signed_power:
            k = self.fraction.numerator
            base = np.abs(u) ** self.p
            if k % 2 == 1:
                base = np.sign(u) * base
        else:
            scale = float(np.max(np.abs(u))) if u.size else 0.0
            if np.any(u < -NEGATIVE_FLOOR * scale):
                raise ContractError(
                    f"p={self.p} is not k/m with m odd; u^p is undefined for negative u"
                )
            base = np.maximum(u, 0.0) ** self.p
        return base * u ** extra if extra else base

    def with_speed(self, c: float) -> "Params":
        return Params(p=self.p, alpha=self.alpha, epsilon=self.epsilon, c=c)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
