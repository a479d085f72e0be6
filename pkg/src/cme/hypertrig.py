"""Cosine-square to hyper-trigonometric coefficient recursion.

Multiplying an order ``n-1`` function by ``cos^2((w t - phi_n)/2) = (1 + cos(w t - phi_n))/2``
shifts every harmonic up and down by one, so the coefficients of order ``n``
follow from those of order ``n-1`` with a three-point stencil.  The first
harmonic folds into the constant term and the two top harmonics only see
their lower neighbours; those rows are updated by their own formulas.
"""

from __future__ import annotations

import gmpy2
import numpy as np

from .core import CosineSquareForm, HyperTrigForm, PrecisionContext, lift
from .precision import DEFAULT_POLICY, PrecisionError, PrecisionPolicy, required_digits

__all__ = ["to_hypertrig", "first_order", "second_order", "raise_order"]


def first_order(phi1):
    """Coefficients ``(c, a, b)`` for ``n = 1``; call inside an active context."""
    half = gmpy2.mpfr(1) / 2
    return half, np.array([gmpy2.cos(phi1) * half], dtype=object), \
        np.array([gmpy2.sin(phi1) * half], dtype=object)


def second_order(phi1, phi2):
    """Closed-form coefficients for ``n = 2``; call inside an active context.

    The second cosine coefficient is ``cos(phi1 + phi2)/8``: it comes from
    ``cos(x - phi1) cos(x - phi2) = (cos(2x - phi1 - phi2) + cos(phi1 - phi2))/2``.
    """
    one = gmpy2.mpfr(1)
    a = np.array([(gmpy2.cos(phi1) + gmpy2.cos(phi2)) / 4,
                  gmpy2.cos(phi1 + phi2) / 8], dtype=object)
    b = np.array([(gmpy2.sin(phi1) + gmpy2.sin(phi2)) / 4,
                  gmpy2.sin(phi1 + phi2) / 8], dtype=object)
    c = one / 4 + gmpy2.cos(phi1 - phi2) / 8
    return c, a, b


def raise_order(c, a, b, cos_phi, sin_phi):
    """One recursion step from order ``m = len(a)`` to ``m + 1``.

    Call inside an active context.  Returns fresh arrays; the inputs are left
    untouched since every row reads both neighbours of the previous level.
    ``to_hypertrig`` only uses it for ``m >= 2``; the ``m = 1`` step exists to
    cross-check the closed form for ``n = 2``.
    """
    m = len(a)
    n = m + 1
    half = gmpy2.mpfr(1) / 2
    c4 = cos_phi / 4
    s4 = sin_phi / 4
    c2 = cos_phi / 2
    s2 = sin_phi / 2
    na = np.empty(n, dtype=object)
    nb = np.empty(n, dtype=object)
    nc = c * half + a[0] * c4 + b[0] * s4

    if m == 1:
        na[0] = a[0] * half + c * c2
        nb[0] = b[0] * half + c * s2
        na[1] = a[0] * c4 - b[0] * s4
        nb[1] = b[0] * c4 + a[0] * s4
        return nc, na, nb

    # interior rows 1 < k < n-1 (0-based j = k-1 in 1..n-3)
    if n > 3:
        na[1:n - 2] = (a[1:n - 2] * half + (a[0:n - 3] + a[2:n - 1]) * c4
                       + (b[2:n - 1] - b[0:n - 3]) * s4)
        nb[1:n - 2] = (b[1:n - 2] * half + (b[0:n - 3] + b[2:n - 1]) * c4
                       + (a[0:n - 3] - a[2:n - 1]) * s4)

    # k = 1 also receives the constant term
    na[0] = a[0] * half + a[1] * c4 + b[1] * s4 + c * c2
    nb[0] = b[0] * half + b[1] * c4 - a[1] * s4 + c * s2
    # k = n-1: the previous level has no harmonic n
    na[n - 2] = a[n - 3] * c4 - b[n - 3] * s4 + a[n - 2] * half
    nb[n - 2] = b[n - 3] * c4 + a[n - 3] * s4 + b[n - 2] * half
    # k = n: only the shift up of harmonic n-1
    na[n - 1] = a[n - 2] * c4 - b[n - 2] * s4
    nb[n - 1] = b[n - 2] * c4 + a[n - 2] * s4
    return nc, na, nb


def to_hypertrig(form: CosineSquareForm, ctx: PrecisionContext,
                 policy: PrecisionPolicy | None = DEFAULT_POLICY) -> HyperTrigForm:
    """Hyper-trigonometric coefficients of ``form`` computed at ``ctx`` precision.

    Raises :class:`PrecisionError` when ``ctx`` is below ``required_digits(n)``
    under ``policy``.  Pass ``policy=None`` to skip the check (used to measure
    precision loss at deliberately low precision).
    """
    n = form.n
    if policy is not None and ctx.decimal_digits < required_digits(n, policy):
        raise PrecisionError(
            f"order n={n} needs {required_digits(n, policy)} digits, context has {ctx.decimal_digits}")
    with ctx.local():
        omega = lift(form.omega, ctx)
        phis = [lift(p, ctx) for p in form.phis]
        if n == 1:
            c, a, b = first_order(phis[0])
        else:
            c, a, b = second_order(phis[0], phis[1])
            for phi in phis[2:]:
                c, a, b = raise_order(c, a, b, gmpy2.cos(phi), gmpy2.sin(phi))
    return HyperTrigForm(n, omega, c, a, b)
