import math

import numpy as np
import pytest

from cstar_comp import opcalc
from cstar_comp.mobius import IDENTITY, compose, evaluate, rotation
from cstar_comp.rkhs import TruncatedOperator, hardy, kernel_vector, shift, weighted


def test_identity_and_rotation():
    C = opcalc.composition_operator(hardy(32), IDENTITY).matrix
    np.testing.assert_allclose(C, np.eye(32), atol=1e-15)
    th = 0.7
    R = opcalc.composition_operator(hardy(32), rotation(th)).matrix
    np.testing.assert_allclose(R, np.diag(np.exp(1j * th * np.arange(32))), atol=1e-14)


def test_composition_matches_taylor(g1):
    # column k holds the coefficients of g(z)^k (Hardy basis)
    C = opcalc.composition_block(hardy(), g1, 64, 4)
    z = 0.3 * np.exp(2j * np.pi * np.arange(7) / 7)
    for k in range(4):
        vals = np.polyval(C[:, k][::-1], z)
        np.testing.assert_allclose(vals, evaluate(g1, z) ** k, atol=1e-12)


def test_kernel_adjoint(g1):
    N = 256
    C = opcalc.composition_rows(hardy(), g1, N)
    for w in (0, 0.3, 0.5j):
        lhs = C.conj().T[:N] @ kernel_vector(hardy(N), w)
        rhs = kernel_vector(hardy(N), evaluate(g1, w))
        assert np.linalg.norm(lhs - rhs) <= 1e-10


def test_gram_methods_agree(g1, g2):
    for sp in (hardy(), weighted(2), weighted(3)):
        for g in (g1, g2):
            A = opcalc.composition_gram(sp, g, 64, "factor")
            B = opcalc.composition_gram(sp, g, 64, "product")
            assert np.abs(A - B).max() <= 1e-9 * np.abs(A).max()


def test_polar_unitary(g1):
    sp = hardy(128)
    U = opcalc.composition_unitary(sp, g1).matrix
    s = np.linalg.svd(U, compute_uv=False)
    # interior rows of a finite section; the full 128 x 128 block is not square-unitary
    Urows = opcalc.polar_rows(sp, g1, 128)
    assert np.linalg.norm(Urows @ Urows.conj().T - np.eye(128), 2) <= 1e-10
    assert s.max() <= 1 + 1e-10


def test_polar_of_unitary_is_itself():
    R = opcalc.composition_operator(hardy(32), rotation(1.1))
    P = opcalc.polar_unitary(R)
    np.testing.assert_allclose(P.matrix, R.matrix, atol=1e-12)


def test_polar_near_singular():
    C = TruncatedOperator(np.diag([1.0, 1e-12]), hardy(2))
    with pytest.raises(opcalc.NearSingularError):
        opcalc.polar_unitary(C)


def test_positive_root():
    assert np.allclose(opcalc.positive_root(np.eye(5), 3), np.eye(5))
    np.testing.assert_allclose(opcalc.positive_root(np.diag([1.0, 4.0, 9.0]), 2), np.diag([1.0, 2.0, 3.0]),
                               atol=1e-14)
    with pytest.raises(opcalc.NotPSDError):
        opcalc.positive_root(np.diag([1.0, -1.0]), 2)


def test_positive_root_roundtrip(rng):
    X = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    A = X @ X.conj().T
    R = opcalc.positive_root(A, 3)
    np.testing.assert_allclose(R @ R @ R, A, atol=1e-10 * np.abs(A).max())


def test_root_difference_decays():
    lam = 0.999 * np.exp(1j * math.pi / 5)
    vals = []
    for N in (64, 128, 256):
        T = shift(weighted(2, N + 64)).matrix
        I = np.eye(N + 64)
        X = I - np.conj(lam) * T
        A = X @ X @ (X @ X).conj().T
        Y = X @ X.conj().T
        B = Y @ Y
        D = opcalc.positive_root(A, 2) - opcalc.positive_root(B, 2)
        vals.append(opcalc.band_residual(D[:N, :N], N))
    assert opcalc.decay_verdict(vals), vals


def test_compactness_probe_examples():
    E = np.zeros((64, 64))
    E[0, 0] = 1
    r = opcalc.compactness_probe(E, [1, 2, 4, 8])
    assert r.decaying and all(t == 0 for _, t in r.tail_norms)
    r = opcalc.compactness_probe(np.eye(64), [1, 2, 4, 8])
    assert not r.decaying
    assert all(t == pytest.approx(1.0) for _, t in r.tail_norms)


def test_self_commutator_compact():
    T = shift(weighted(2, 256)).matrix
    Cm = T @ T.conj().T - T.conj().T @ T
    r = opcalc.compactness_probe(Cm, [8, 16, 32, 64], edge=1)
    assert r.decaying
    assert r.fitted_rate == pytest.approx(-2.0, abs=0.3)


def test_block_residual():
    A = np.random.default_rng(0).normal(size=(40, 40))
    assert opcalc.block_residual(A, A, 32) == 0.0
    B = A.copy()
    B[-1, -1] += 1.0
    assert opcalc.block_residual(A, B, 39) == 0.0
    with pytest.raises(ValueError):
        opcalc.block_residual(A, A[:30, :30], 10)


def test_anti_multiplicative(g1, g2):
    N = 256
    sp = hardy()
    big = 4 * N
    Cg = opcalc.composition_block(sp, g1, big, big)
    Ch = opcalc.composition_block(sp, g2, big, big)
    Chg = opcalc.composition_block(sp, compose(g2, g1), N, N)
    assert opcalc.block_residual((Cg @ Ch)[:N, :N], Chg, 32) <= 1e-8


def test_decay_verdict():
    assert opcalc.decay_verdict([1.0, 0.5, 0.1])
    assert not opcalc.decay_verdict([1.0, 0.9, 0.8])
    assert not opcalc.decay_verdict([1.0, 0.05, 0.1])
    assert opcalc.decay_verdict([0.0, 1e-13, 0.0])
