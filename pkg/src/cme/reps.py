"""Spectral and matrix representations of a hyper-trigonometric form.

The matrix representation has size ``N = 2n + 1`` and a block diagonal
generator: a ``1x1`` block ``-1`` followed by the ``2x2`` blocks
``[[-1, -k w], [k w, -1]]``.  Because ``exp`` of such a block is ``e^{-t}``
times a rotation by ``k w t``, evaluation never needs a dense matrix
exponential.  Dense exponentials only appear in :func:`similarity_check`,
where a similarity transform destroys the block structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np
from scipy import linalg

from .core import HyperTrigForm

__all__ = [
    "MatrixForm",
    "SpectralForm",
    "eval_dense",
    "eval_matrix",
    "eval_spectral",
    "matrix_form",
    "similarity_check",
    "spectral_form",
]

MAX_CONDITION = 1e6


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    return t


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """``c e^{-t} + sum_k [w_k e^{lambda_k t} + conj(w_k) e^{conj(lambda_k) t}]``.

    ``pairs`` holds ``(lambda_k, w_k)`` with ``lambda_k = -(1 + i k w)`` and
    ``w_k = (a_k + i b_k)/2``; the conjugate half of each pair is implied.
    """

    real_eigen_weight: float
    pairs: tuple

    def terms(self) -> list[tuple[complex, complex]]:
        """All ``2n + 1`` (eigenvalue, weight) terms, conjugates included."""
        out = [(complex(-1.0), complex(self.real_eigen_weight))]
        for lam, w in self.pairs:
            out.append((lam, w))
            out.append((lam.conjugate(), w.conjugate()))
        return out


def spectral_form(form: HyperTrigForm) -> SpectralForm:
    omega = float(form.omega)
    pairs = tuple(
        (complex(-1.0, -k * omega), complex(float(a), float(b)) / 2)
        for k, (a, b) in enumerate(zip(form.a, form.b), start=1))
    return SpectralForm(float(form.c), pairs)


def eval_spectral(sf: SpectralForm, t):
    t = _check_t(t)
    lam, w = (np.array(v) for v in zip(*sf.terms()))
    val = (np.exp(t[..., None] * lam) @ w).real
    return val if val.ndim else float(val)


@dataclass(frozen=True, eq=False)
class MatrixForm:
    """Row vector ``beta`` and implicit block diagonal ``B`` determined by ``(n, omega)``.

    ``beta`` keeps the precision of the source coefficients (an object array
    when built from mpfr values).
    """

    n: int
    omega: object
    beta: np.ndarray

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    def dense_B(self) -> np.ndarray:
        w = float(self.omega)
        B = np.zeros((self.size, self.size))
        np.fill_diagonal(B, -1.0)
        for k in range(1, self.n + 1):
            B[2 * k - 1, 2 * k] = -k * w
            B[2 * k, 2 * k - 1] = k * w
        return B

    def eigenvalues(self) -> list[complex]:
        """Eigenvalues of ``B`` read off its blocks."""
        w = float(self.omega)
        eig = [complex(-1.0)]
        for k in range(1, self.n + 1):
            eig += [complex(-1.0, k * w), complex(-1.0, -k * w)]
        return eig


def matrix_form(form: HyperTrigForm) -> MatrixForm:
    n = form.n
    beta = np.empty(2 * n + 1, dtype=object)
    with form.local():
        omega = gmpy2.mpfr(form.omega)
        beta[0] = +gmpy2.mpfr(form.c)
        for k in range(1, n + 1):
            a, b = form.a[k - 1], form.b[k - 1]
            kw = k * omega
            den = 2 * (1 + kw * kw)
            beta[2 * k - 1] = (a * (1 + kw) - b * (1 - kw)) / den
            beta[2 * k] = (a * (1 - kw) + b * (1 + kw)) / den
    return MatrixForm(n, omega, beta)


def eval_matrix(mf: MatrixForm, t):
    """``beta e^{Bt} (-B) 1`` from the closed-form block exponentials."""
    t = _check_t(t)
    beta = mf.beta.astype(float)
    kw = float(mf.omega) * np.arange(1, mf.n + 1)
    theta = t[..., None] * kw
    cos, sin = np.cos(theta), np.sin(theta)
    # (-B_k) 1 = (1 + k w, 1 - k w); exp(B_k t) = e^{-t} [[cos, -sin], [sin, cos]]
    u = cos * (1 + kw) - sin * (1 - kw)
    v = sin * (1 + kw) + cos * (1 - kw)
    val = np.exp(-t) * (beta[0] + u @ beta[1::2] + v @ beta[2::2])
    return val if val.ndim else float(val)


def eval_dense(beta, B, t):
    """``beta e^{Bt} (-B) 1`` with dense scaling-and-squaring exponentials."""
    beta = np.asarray(beta, dtype=float)
    B = np.asarray(B, dtype=float)
    exit_vec = -B @ np.ones(len(beta))
    return np.array([beta @ linalg.expm(B * ti) @ exit_vec for ti in np.atleast_1d(_check_t(t))])


def similarity_check(mf: MatrixForm, T, t_grid, tol: float = 1e-8) -> bool:
    """Whether ``(beta T^-1, T B T^-1)`` reproduces ``mf`` on ``t_grid`` within ``tol``.

    ``T`` must be non-singular with unit row sums; transforms with a
    condition number above 1e6 are rejected.
    """
    T = np.asarray(T, dtype=float)
    N = mf.size
    if T.shape != (N, N):
        raise ValueError(f"T must be {N}x{N}, got {T.shape}")
    if not np.allclose(T.sum(axis=1), 1.0, rtol=0, atol=1e-12):
        raise ValueError("rows of T must sum to 1")
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ValueError(f"T is singular or ill-conditioned (cond={cond:.3g})")
    Tinv = np.linalg.inv(T)
    beta = mf.beta.astype(float) @ Tinv
    B = T @ mf.dense_B() @ Tinv
    ref = eval_matrix(mf, t_grid)
    got = eval_dense(beta, B, t_grid)
    return bool(np.max(np.abs(got - ref)) <= tol)
