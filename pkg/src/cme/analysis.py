"""Laplace transform, moments and SCV of a hyper-trigonometric form.

Each term of the expansion transforms in closed form,

    LT(e^{-t})            = 1/(s+1)
    LT(e^{-t} cos(k w t)) = (s+1)/((s+1)^2 + (k w)^2)
    LT(e^{-t} sin(k w t)) = k w/((s+1)^2 + (k w)^2)

and the moments are the derivatives at ``s = 0``.  All sums are carried out in
the precision of the given context; :func:`compute_scv` runs the whole
pipeline at the precision the policy asks for and rounds only the final SCV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from .core import CosineSquareForm, HyperTrigForm, PrecisionContext, lift
from .hypertrig import to_hypertrig
from .precision import (DEFAULT_POLICY, PrecisionError, PrecisionPolicy,
                        predicted_loss, required_digits)

__all__ = [
    "DegenerateFormError",
    "MomentSet",
    "PrecisionError",
    "PrecisionPolicy",
    "compute_scv",
    "laplace_transform",
    "moments",
    "predicted_loss",
    "required_digits",
    "scv_at",
]


class DegenerateFormError(ArithmeticError):
    """The first moment vanished at working precision."""


@dataclass(frozen=True)
class MomentSet:
    mu0: object
    mu1: object
    mu2: object
    scv: object

    @classmethod
    def from_moments(cls, mu0, mu1, mu2) -> "MomentSet":
        if mu1 == 0:
            raise DegenerateFormError("first moment is zero at working precision")
        return cls(mu0, mu1, mu2, mu0 * mu2 / (mu1 * mu1) - 1)

    def as_floats(self) -> tuple[float, float, float, float]:
        return float(self.mu0), float(self.mu1), float(self.mu2), float(self.scv)


def _harmonics(form: HyperTrigForm, ctx: PrecisionContext):
    with ctx.local():
        omega = lift(form.omega, ctx)
        kw = np.array([k * omega for k in range(1, form.n + 1)], dtype=object)
    return kw


def laplace_transform(form: HyperTrigForm, s, ctx: PrecisionContext):
    """``f*(s) = c/(1+s) + sum_k (a_k (1+s) + b_k k w) / ((1+s)^2 + (k w)^2)``, real ``s >= 0``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    kw = _harmonics(form, ctx)
    with ctx.local():
        sp1 = 1 + lift(s, ctx)
        terms = (form.a * sp1 + form.b * kw) / (kw * kw + sp1 * sp1)
        return +form.c / sp1 + gmpy2.fsum(terms)


def moments(form: HyperTrigForm, ctx: PrecisionContext) -> MomentSet:
    """Zeroth, first and second moments and the SCV, at ``ctx`` precision."""
    kw = _harmonics(form, ctx)
    a, b = form.a, form.b
    with ctx.local():
        c = +gmpy2.mpfr(form.c)
        q = kw * kw
        d1 = q + 1
        d2 = d1 * d1
        d3 = d2 * d1
        bkw = b * kw
        aq = a * q
        mu0 = c + gmpy2.fsum((a + bkw) / d1)
        mu1 = c + gmpy2.fsum((a + 2 * bkw - aq) / d2)
        mu2 = 2 * c + gmpy2.fsum((2 * a + 6 * bkw - 6 * aq - 2 * bkw * q) / d3)
        return MomentSet.from_moments(mu0, mu1, mu2)


def scv_at(form: CosineSquareForm, ctx: PrecisionContext,
           policy: PrecisionPolicy | None = DEFAULT_POLICY):
    """SCV of ``form`` computed entirely at ``ctx`` precision (not rounded).

    ``policy=None`` lifts the minimum-precision check.
    """
    return moments(to_hypertrig(form, ctx, policy), ctx).scv


def compute_scv(form: CosineSquareForm, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """SCV of ``form`` as a machine float, computed at ``required_digits(n)`` digits."""
    ctx = PrecisionContext(required_digits(form.n, policy))
    scv = float(scv_at(form, ctx, policy))
    if not math.isfinite(scv):
        raise ArithmeticError(f"non-finite SCV ({scv}) for n={form.n}")
    return scv
