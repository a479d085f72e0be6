"""Working-precision policy for the coefficient recursion.

The recursion loses decimal digits roughly linearly in ``n``
(``L_n ~ 1.487 + 0.647 n``); the policy adds a margin on top so that the final
SCV carries about ``base_margin`` accurate digits.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .core import PrecisionContext

__all__ = ["PrecisionPolicy", "PrecisionError", "DEFAULT_POLICY", "predicted_loss", "required_digits"]

MARGIN_ENV = "CME_DEFAULT_DIGITS_MARGIN"


class PrecisionError(ValueError):
    """Working precision below what the policy requires for this order."""


@dataclass(frozen=True)
class PrecisionPolicy:
    base_margin: int = 16
    loss_intercept: float = 1.487
    loss_slope: float = 0.647

    def __post_init__(self):
        if self.base_margin < 1:
            raise ValueError("base_margin must be positive")
        if self.loss_slope < 0:
            raise ValueError("loss_slope must be non-negative")

    @classmethod
    def from_env(cls) -> "PrecisionPolicy":
        """Default policy, with the margin overridden by ``$CME_DEFAULT_DIGITS_MARGIN``."""
        raw = os.environ.get(MARGIN_ENV)
        if raw is None or not raw.strip():
            return cls()
        return cls(base_margin=int(raw))

    def widened(self, extra_digits: int) -> "PrecisionPolicy":
        return PrecisionPolicy(self.base_margin + extra_digits, self.loss_intercept, self.loss_slope)

    def context(self, n: int) -> PrecisionContext:
        return PrecisionContext(required_digits(n, self))


DEFAULT_POLICY = PrecisionPolicy()


def predicted_loss(n: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """Predicted number of decimal digits lost computing the SCV at order ``n``."""
    return policy.loss_intercept + policy.loss_slope * n


def required_digits(n: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    # round before ceil so that e.g. 1.487 + 0.647*1000 = 648.487 is not nudged up by fp noise
    return math.ceil(round(predicted_loss(n, policy), 9)) + policy.base_margin
