import cmath
import math

import numpy as np
import pytest

from cstar_comp import identities as I
from cstar_comp.mobius import IDENTITY, inverse, rotation
from cstar_comp.rkhs import hardy, weighted

from conftest import disk_points


def test_factor_rotation_exact():
    c = I.check_factor(hardy(), rotation(0.4))
    assert c.passed and c.residuals[0][1] <= 1e-13


@pytest.mark.parametrize("n", [1, 2, 3])
def test_factor_generators(n, g1, g2):
    for g in (g1, g2, inverse(g1)):
        c = I.check_factor(weighted(n), g)
        assert c.passed, c


def test_factor_preimage(g1):
    assert g1.preimage_of_zero() == pytest.approx(-1 / math.sqrt(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_gram(n, g1, rng):
    pts = disk_points(rng, 40, rmax=0.7)
    c = I.check_kernel_gram(weighted(n), g1, list(zip(pts[:20], pts[20:])))
    assert c.passed, c.residuals


def test_commute_identity_map():
    c = I.check_commute(hardy(), IDENTITY)
    assert c.residuals[0][1] == 0.0


def test_commute(g1, g2):
    assert I.check_commute(hardy(), g1).passed
    assert I.check_commute(weighted(3), g2).passed


def test_f_lambda_n1():
    T = I.shift_matrix(hardy(), 16)
    E = I.e_operators(T, 1)
    np.testing.assert_allclose(E[1], -T)
    lam = cmath.exp(0.3j)
    F = np.eye(16) - np.conj(lam) * T - lam * T.conj().T + T @ T.conj().T
    np.testing.assert_allclose(I.f_lambda(T, 1, lam), F, atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_f_lambda_expansion(n):
    c = I.check_f_lambda_expansion(weighted(n), 1j)
    assert c.passed
    assert c.info["e_n_residual"] <= 1e-12


def test_f_lambda_requires_unimodular():
    with pytest.raises(ValueError):
        I.check_f_lambda_expansion(hardy(), 0.5)


def test_covariance_constant_symbol(g1):
    D = I.covariance_difference(hardy(), g1, {0: 1.0}, 64)
    assert np.abs(D).max() <= 1e-10


def test_covariance_hardy(g1):
    c = I.check_covariance(hardy(), g1, {1: 1.0})
    assert c.passed, c.residuals
    assert c.residuals[-1][1] < 1e-3


def test_covariance_fixed_window_example(g1):
    # top-left 32 block of the difference at N = 256, as literally stated;
    # the difference is a fixed nonzero compact operator, so this block
    # converges to its compression (about 0.367) rather than to zero
    c = I.check_covariance(hardy(), g1, {1: 1.0})
    assert c.info["window_residuals"][-1][1] < 1e-3


def test_covariance_bergman_cos(g2):
    c = I.check_covariance(weighted(2), g2, {1: 0.5, -1: 0.5})
    assert c.passed, c.residuals


def test_group_law(g1, g2):
    assert I.check_group_law(hardy(), g1, inverse(g1)).passed
    assert I.check_group_law(hardy(), g1, g2).passed
    assert I.check_group_law(weighted(2), g1, g1).passed


def test_polar_formula_hardy(g1):
    c = I.check_polar_formula(hardy(), g1)
    assert c.passed, c.residuals


def test_polar_formula_bergman_decays_slowly(g1):
    # on A^2_2 the difference is compact but converges like 1/N
    c = I.check_polar_formula(weighted(2), g1)
    vals = [r for _, r in c.residuals]
    assert vals[0] > vals[1] > vals[2]


def test_degree_guard(g1):
    with pytest.raises(ValueError):
        I.check_covariance(hardy(), g1, {9: 1.0})


def test_mod_compact_check_final_tol():
    assert I.mod_compact_check("x", [(64, 1.0), (128, 0.1), (256, 1e-4)]).passed
    assert not I.mod_compact_check("x", [(64, 1.0), (128, 0.1), (256, 1e-2)]).passed
    assert I.mod_compact_check("x", [(64, 1.0), (128, 0.1), (256, 1e-2)], final_tol=None).passed
