"""Parameter representations of exponential cosine-square functions.

An exponential cosine-square function of order ``n`` is

.. math:: f^+(t) = e^{-t} \\prod_{i=1}^{n} \\cos^2\\left(\\frac{\\omega t - \\phi_i}{2}\\right)

and lives in the matrix-exponential class of size ``N = 2n + 1``.  This module
holds the two parameterizations used throughout the package (the cosine-square
form and the hyper-trigonometric form), the precision context that selects the
working precision of the arbitrary-precision arithmetic, and direct evaluation
of both forms.

High precision arithmetic is done with :mod:`gmpy2`.  Precision is never set
process-wide: every routine enters a scoped, thread-local context derived from
the :class:`PrecisionContext` it receives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import numpy as np

__all__ = [
    "MACHINE",
    "CosineSquareForm",
    "HyperTrigForm",
    "PrecisionContext",
    "eval_hypertrig",
    "eval_product",
    "lift",
    "normalize_angles",
]

_LOG2_10 = math.log2(10.0)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision, in decimal digits, of the high-precision arithmetic."""

    decimal_digits: int

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits or self.decimal_digits < 16:
            raise ValueError(
                f"decimal_digits must be an integer >= 16, got {self.decimal_digits!r}")

    @property
    def bits(self) -> int:
        return math.ceil(self.decimal_digits * _LOG2_10)

    @property
    def is_machine(self) -> bool:
        return self.decimal_digits <= 16

    def local(self):
        """Scoped gmpy2 context running at this precision (thread-local)."""
        return gmpy2.context(precision=self.bits)


#: Machine (double) precision; evaluation routines use numpy floats for it.
MACHINE = PrecisionContext(16)


def lift(x, ctx: PrecisionContext):
    """Convert ``x`` (float, int, decimal string, mpfr, mpmath mpf) to an mpfr at ``ctx`` precision."""
    with ctx.local():
        if isinstance(x, str):
            return gmpy2.mpfr(x.strip())
        try:
            # unary plus rounds an existing mpfr to the active precision
            return +gmpy2.mpfr(x)
        except TypeError:
            # other arbitrary-precision types (e.g. mpmath) via their decimal string
            return gmpy2.mpfr(str(x))


@dataclass(frozen=True, eq=False)
class CosineSquareForm:
    """The ``(omega, phi_1..phi_n)`` parameterization.

    Angles are stored as given; use :func:`normalize_angles` for reporting.
    Values may be floats, ints, decimal strings or mpfr numbers.
    """

    n: int
    omega: object
    phis: tuple

    def __post_init__(self):
        object.__setattr__(self, "phis", tuple(self.phis))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if len(self.phis) != self.n:
            raise ValueError(f"phis has {len(self.phis)} entries, expected n={self.n}")
        if not float(self.omega) > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")

    @classmethod
    def from_phis(cls, omega, phis: Sequence) -> "CosineSquareForm":
        phis = tuple(phis)
        return cls(len(phis), omega, phis)

    @property
    def order(self) -> int:
        """Size ``N = 2n + 1`` of the matrix representation."""
        return 2 * self.n + 1

    def as_floats(self) -> tuple[float, np.ndarray]:
        return float(self.omega), np.array([float(p) for p in self.phis])


@dataclass(frozen=True, eq=False)
class HyperTrigForm:
    """Coefficients of ``c e^{-t} + e^{-t} sum_k (a_k cos(k w t) + b_k sin(k w t))``.

    ``a`` and ``b`` are 1-d object arrays of mpfr (or float arrays); index
    ``k-1`` holds the coefficient of harmonic ``k``.
    """

    n: int
    omega: object
    c: object
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=object)
        b = np.asarray(self.b, dtype=object)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape != (self.n,) or b.shape != (self.n,):
            raise ValueError(f"a and b must both have length n={self.n}")
        if not float(self.omega) > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")

    def local(self):
        """Scoped gmpy2 context at the precision the coefficients carry."""
        bits = max([53] + [getattr(v, "precision", 53) for v in (self.c, *self.a, *self.b)])
        return gmpy2.context(precision=bits)

    @classmethod
    def exponential(cls, n: int = 1, omega=1.0) -> "HyperTrigForm":
        """The pure exponential ``e^{-t}`` embedded with zero harmonics."""
        zeros = np.array([gmpy2.mpfr(0)] * n, dtype=object)
        return cls(n, omega, gmpy2.mpfr(1), zeros, zeros.copy())


def normalize_angles(phis) -> np.ndarray:
    """Map angles into ``(-pi, pi]`` (machine precision, for reporting)."""
    phis = np.asarray([float(p) for p in np.atleast_1d(phis)])
    out = np.pi - np.mod(np.pi - phis, 2.0 * np.pi)
    return out


def _check_t(t):
    if np.any(np.asarray(t, dtype=float) < 0):
        raise ValueError("t must be non-negative")


def eval_product(form: CosineSquareForm, t, ctx: PrecisionContext = MACHINE):
    """Evaluate ``e^{-t} prod_i cos^2((omega t - phi_i)/2)``.

    At machine precision ``t`` may be an array and numpy floats are returned;
    otherwise the result is an mpfr (or an object array of mpfr for array ``t``).
    """
    _check_t(t)
    if ctx.is_machine:
        omega, phis = form.as_floats()
        t = np.asarray(t, dtype=float)
        x = omega * t[..., None] - phis
        val = np.exp(-t) * np.prod(np.cos(0.5 * x) ** 2, axis=-1)
        return val if val.ndim else float(val)
    if np.ndim(t):
        return np.array([eval_product(form, ti, ctx) for ti in np.ravel(t)], dtype=object)
    with ctx.local():
        tt = lift(t, ctx)
        omega = lift(form.omega, ctx)
        acc = gmpy2.exp(-tt)
        for phi in form.phis:
            acc *= gmpy2.cos((omega * tt - lift(phi, ctx)) / 2) ** 2
        return acc


def eval_hypertrig(form: HyperTrigForm, t, ctx: PrecisionContext = MACHINE):
    """Evaluate the hyper-trigonometric expansion at ``t`` (same conventions as
    :func:`eval_product`)."""
    _check_t(t)
    if ctx.is_machine:
        t = np.asarray(t, dtype=float)
        a = form.a.astype(float)
        b = form.b.astype(float)
        kwt = float(form.omega) * t[..., None] * np.arange(1, form.n + 1)
        val = np.exp(-t) * (float(form.c) + np.cos(kwt) @ a + np.sin(kwt) @ b)
        return val if val.ndim else float(val)
    if np.ndim(t):
        return np.array([eval_hypertrig(form, ti, ctx) for ti in np.ravel(t)], dtype=object)
    with ctx.local():
        tt = lift(t, ctx)
        wt = lift(form.omega, ctx) * tt
        acc = +gmpy2.mpfr(form.c)
        for k in range(1, form.n + 1):
            acc += form.a[k - 1] * gmpy2.cos(k * wt) + form.b[k - 1] * gmpy2.sin(k * wt)
        return gmpy2.exp(-tt) * acc
