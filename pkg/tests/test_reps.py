import math

import gmpy2
import numpy as np
import pytest

from cme.analysis import moments
from cme.core import CosineSquareForm, HyperTrigForm, PrecisionContext, eval_hypertrig, eval_product
from cme.hypertrig import to_hypertrig
from cme.precision import required_digits
from cme.reps import (MatrixForm, eval_dense, eval_matrix, eval_spectral, matrix_form,
                      similarity_check, spectral_form)

from conftest import random_form


def _ht(form):
    ctx = PrecisionContext(required_digits(form.n))
    return to_hypertrig(form, ctx), ctx


def _unit_row_sum(rng, N, max_cond=1e3):
    while True:
        T = np.eye(N) + rng.uniform(-0.4, 0.4, (N, N))
        T /= T.sum(axis=1, keepdims=True)
        if np.linalg.cond(T) < max_cond:
            return T


def test_spectral_trivial_and_first_order():
    sf = spectral_form(HyperTrigForm.exponential(1))
    assert sf.real_eigen_weight == 1 and sf.pairs[0][1] == 0
    sf = spectral_form(HyperTrigForm(1, 1.0, 0.5, [0.5], [0.0]))
    assert sf.terms() == [(-1 + 0j, 0.5 + 0j), (-1 - 1j, 0.25 + 0j), (-1 + 1j, 0.25 - 0j)]


def test_spectral_weights_conjugate(rng):
    ht, _ = _ht(random_form(rng, 6))
    terms = spectral_form(ht).terms()
    for (l1, w1), (l2, w2) in zip(terms[1::2], terms[2::2]):
        assert l1 == l2.conjugate() and w1 == w2.conjugate()


def test_spectral_matches_hypertrig(rng):
    ht, _ = _ht(random_form(rng, 6))
    ts = np.linspace(0, 12, 60)
    assert np.max(np.abs(eval_spectral(spectral_form(ht), ts) - eval_hypertrig(ht, ts))) <= 1e-12


def test_matrix_form_examples():
    mf = matrix_form(HyperTrigForm.exponential(1, 2.0))
    assert [float(b) for b in mf.beta] == [1, 0, 0]
    np.testing.assert_array_equal(mf.dense_B(), [[-1, 0, 0], [0, -1, -2], [0, 2, -1]])
    assert eval_matrix(mf, 0.0) == 1.0

    ht = HyperTrigForm(1, 1.0, gmpy2.mpfr(0.5), [gmpy2.mpfr(0.5)], [gmpy2.mpfr(0)])
    mf = matrix_form(ht)
    assert [float(b) for b in mf.beta] == [0.5, 0.25, 0.0]
    assert float(sum(mf.beta)) == 0.75


def test_block_structure(rng):
    ht, _ = _ht(random_form(rng, 5, omega=0.7))
    mf = matrix_form(ht)
    B = mf.dense_B()
    mask = np.zeros_like(B, dtype=bool)
    mask[0, 0] = True
    for k in range(1, 6):
        mask[2 * k - 1:2 * k + 1, 2 * k - 1:2 * k + 1] = True
    assert np.all(B[~mask] == 0)
    expected = [-1] + [complex(-1, s * k * 0.7) for k in range(1, 6) for s in (1, -1)]
    np.testing.assert_allclose(mf.eigenvalues(), expected)


def test_matrix_matches_product(rng):
    form = random_form(rng, 10)
    mf = matrix_form(_ht(form)[0])
    ts = np.linspace(0, 4 * math.pi / float(form.omega), 50)
    assert np.max(np.abs(eval_matrix(mf, ts) - eval_product(form, ts))) <= 1e-10


def test_matrix_matches_hypertrig_and_dense(rng):
    ht, _ = _ht(random_form(rng, 4))
    mf = matrix_form(ht)
    ts = np.linspace(0, 8, 20)
    assert np.max(np.abs(eval_matrix(mf, ts) - eval_hypertrig(ht, ts))) <= 1e-12
    assert np.max(np.abs(eval_dense(mf.beta, mf.dense_B(), ts) - eval_matrix(mf, ts))) <= 1e-12


def test_attenuation_bound(rng):
    mf = matrix_form(_ht(random_form(rng, 7))[0])
    assert abs(eval_matrix(mf, 200.0)) <= math.exp(-200) * mf.size


def test_beta_sum_is_mass(rng):
    for n in (1, 7, 30):
        ht, ctx = _ht(random_form(rng, n))
        mf = matrix_form(ht)
        mu0 = moments(ht, ctx).mu0
        with ctx.local():
            assert abs((gmpy2.fsum(mf.beta) - mu0) / mu0) <= 1e-12


def test_similarity_identity_and_permutation(rng):
    mf = matrix_form(_ht(random_form(rng, 1))[0])
    grid = np.linspace(0, 10, 30)
    assert similarity_check(mf, np.eye(3), grid)
    assert similarity_check(mf, np.eye(3)[[2, 0, 1]], grid)


def test_similarity_random(rng):
    mf = matrix_form(_ht(random_form(rng, 2))[0])
    for _ in range(5):
        assert similarity_check(mf, _unit_row_sum(rng, 5), np.linspace(0, 10, 30))


def test_similarity_rejects_bad_transforms(rng):
    mf = matrix_form(_ht(random_form(rng, 1))[0])
    grid = np.linspace(0, 1, 3)
    with pytest.raises(ValueError, match="sum"):
        similarity_check(mf, 2 * np.eye(3), grid)
    singular = np.array([[1.0, 0, 0], [1.0, 0, 0], [0, 0.5, 0.5]])
    with pytest.raises(ValueError, match="singular|ill"):
        similarity_check(mf, singular, grid)


def test_negative_t_rejected(rng):
    mf = matrix_form(HyperTrigForm.exponential(1))
    with pytest.raises(ValueError):
        eval_matrix(mf, -1.0)
