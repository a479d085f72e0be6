"""Independent oracles for the coefficient recursion and the moment formulas.

Neither oracle touches :mod:`cme.hypertrig` or :mod:`cme.analysis`; they share
only direct evaluation from :mod:`cme.core`.  They are test instruments and
are never called by the production pipeline.

* :func:`laurent_coefficients` expands the product of cosine-square factors as
  a Laurent polynomial in ``z = e^{i w t}``.
* :func:`quadrature_moments` integrates ``t^i f(t)`` with composite
  Gauss-Legendre panels and an explicit tail cut.
"""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np

from .analysis import MomentSet
from .core import MACHINE, CosineSquareForm, HyperTrigForm, PrecisionContext, eval_product, lift

__all__ = [
    "QuadratureError",
    "laurent_coefficients",
    "laurent_series",
    "quadrature_moments",
    "tail_cutoff",
]

GL_NODES = 64


class QuadratureError(ArithmeticError):
    pass


def laurent_series(form: CosineSquareForm, ctx: PrecisionContext) -> np.ndarray:
    """Complex coefficients of ``z^-n .. z^n`` of ``prod_i [1/2 + (z e^{-i phi_i} + e^{i phi_i}/z)/4]``."""
    with ctx.local():
        coef = np.array([gmpy2.mpc(1)], dtype=object)
        for phi in form.phis:
            phi = lift(phi, ctx)
            up = gmpy2.mpc(gmpy2.cos(phi), -gmpy2.sin(phi)) / 4
            factor = (up.conjugate(), gmpy2.mpc(gmpy2.mpfr(1) / 2), up)
            nxt = np.array([gmpy2.mpc(0)] * (len(coef) + 2), dtype=object)
            for shift, w in enumerate(factor):
                nxt[shift:shift + len(coef)] += coef * w
            coef = nxt
    return coef


def laurent_coefficients(form: CosineSquareForm, ctx: PrecisionContext) -> HyperTrigForm:
    """Hyper-trigonometric coefficients read off the Laurent expansion."""
    n = form.n
    coef = laurent_series(form, ctx)
    with ctx.local():
        pos = coef[n + 1:]
        a = np.array([2 * z.real for z in pos], dtype=object)
        b = np.array([-2 * z.imag for z in pos], dtype=object)
        return HyperTrigForm(n, lift(form.omega, ctx), +coef[n].real, a, b)


def tail_cutoff(digits: int, i: int) -> float:
    """Truncation point with ``int_T^inf t^i e^{-t} dt < 10^-digits``."""
    x = digits * math.log(10.0)
    return x + 3 * i * math.log(x)


def _upper_gamma(i: int, T: float) -> float:
    # int_T^inf t^i e^{-t} dt for integer i
    return math.exp(-T) * sum(math.factorial(i) // math.factorial(j) * T ** j for j in range(i + 1))


@lru_cache(maxsize=8)
def _gl_rule(digits: int):
    if digits <= 16:
        x, w = np.polynomial.legendre.leggauss(GL_NODES)
        return x, w
    ctx = mpmath.mp.clone()
    ctx.dps = digits + 10
    eps = ctx.mpf(10) ** (-(digits + 5))
    nodes, weights = [], []
    for k in range(1, GL_NODES + 1):
        x = ctx.cos(ctx.pi * (k - ctx.mpf(1) / 4) / (GL_NODES + ctx.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = ctx.mpf(1), x
            for j in range(2, GL_NODES + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = GL_NODES * (x * p1 - p0) / (x * x - 1)
            step = p1 / dp
            x -= step
            if abs(step) < eps:
                break
        nodes.append(x)
        weights.append(2 / ((1 - x * x) * dp * dp))
    bits = math.ceil(digits * math.log2(10))
    with gmpy2.context(precision=bits):
        x = np.array([gmpy2.mpfr(str(v)) for v in nodes], dtype=object)
        w = np.array([gmpy2.mpfr(str(v)) for v in weights], dtype=object)
    return x, w


def quadrature_moments(form: CosineSquareForm, ctx: PrecisionContext = MACHINE):
    """``mu_0, mu_1, mu_2`` of the product form by composite Gauss-Legendre quadrature.

    Returns an :class:`~cme.analysis.MomentSet`.  Panels are at most
    ``pi/(4 n w)`` wide (and at most 1) so each panel sees well under one
    oscillation of the fastest harmonic.
    """
    digits = ctx.decimal_digits
    T = tail_cutoff(digits, 2)
    for i in range(3):
        if _upper_gamma(i, T) >= 10.0 ** (-digits):
            raise QuadratureError(f"tail bound not met for moment {i} at T={T}")
    width = min(math.pi / (4 * form.n * float(form.omega)), 1.0)
    panels = math.ceil(T / width)
    x, w = _gl_rule(digits)
    if ctx.is_machine:
        edges = np.linspace(0.0, T, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = mid[:, None] + half[:, None] * x
        f = eval_product(form, t) * w * half[:, None]
        # fixed-order reduction: per panel, then over panels
        mus = [math.fsum(np.sum(f * t ** i, axis=1)) for i in range(3)]
        return MomentSet.from_moments(*mus)
    mus = [[], [], []]
    with ctx.local():
        TT = lift(T, ctx)
        for p in range(panels):
            lo = TT * p / panels
            hi = TT * (p + 1) / panels
            half = (hi - lo) / 2
            mid = (hi + lo) / 2
            t = mid + half * x
            f = np.array([eval_product(form, ti, ctx) for ti in t], dtype=object) * w * half
            mus[0].append(gmpy2.fsum(f))
            mus[1].append(gmpy2.fsum(f * t))
            mus[2].append(gmpy2.fsum(f * t * t))
        return MomentSet.from_moments(*(gmpy2.fsum(m) for m in mus))
