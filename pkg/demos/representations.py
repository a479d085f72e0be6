"""
Representations of a concentrated matrix-exponential function
=============================================================

An exponential cosine-square function is non-negative by construction.
This walk-through builds one, converts it to its hyper-trigonometric,
spectral and matrix forms, and checks that all of them describe the same
function.
"""

import numpy as np

from cme import (CosineSquareForm, PrecisionContext, compute_scv, eval_matrix, eval_product,
                 matrix_form, moments, required_digits, spectral_form, to_hypertrig)

###############################################################################
# Start with the first-order form ``e^{-t} cos^2(t/2)``.  Its moments are
# 3/4, 1/2 and 3/4, which gives an SCV of 5/4.

form = CosineSquareForm(1, 1.0, (0.0,))
print("n=1 SCV:", compute_scv(form))

###############################################################################
# A random order-6 form.  The recursion that produces the hyper-trigonometric
# coefficients cancels digits, so it runs at the precision the policy
# prescribes for this order.

rng = np.random.default_rng(0)
form = CosineSquareForm.from_phis(0.9, rng.uniform(-np.pi, np.pi, 6))
ctx = PrecisionContext(required_digits(form.n))
ht = to_hypertrig(form, ctx)
m = moments(ht, ctx)
print(f"digits={ctx.decimal_digits}  mu0={float(m.mu0):.6f}  scv={float(m.scv):.6f}")

###############################################################################
# The spectral form pairs every harmonic with the eigenvalues -1 +- i k omega.

for lam, w in spectral_form(ht).terms()[:3]:
    print(f"  eigenvalue {lam:.3f}  weight {w:.5f}")

###############################################################################
# The matrix form has size N = 2n + 1 with a block diagonal generator, so
# e^{Bt} is a product of damped rotations and no dense exponential is needed.

mf = matrix_form(ht)
ts = np.linspace(0, 15, 200)
gap = np.max(np.abs(eval_matrix(mf, ts) - eval_product(form, ts)))
print(f"N={mf.size}  max |matrix - product| on the grid: {gap:.2e}")
print(f"sum(beta) = {float(sum(mf.beta)):.12f}  (mu0 = {float(m.mu0):.12f})")
