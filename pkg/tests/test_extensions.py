import math

import numpy as np
import pytest

from cstar_comp import extensions as E
from cstar_comp import opcalc
from cstar_comp.fuchsian import FuchsianGroup
from cstar_comp.mobius import evaluate, rotation


def test_hardy_index():
    assert E.index_of_symbol_lift_hardy() == -1
    assert E.index_of_symbol_lift_hardy(np.conj) == 1
    assert E.index_of_symbol_lift_hardy(lambda z: z ** 2) == -2
    assert E.toeplitz_cokernel_dim(2) == 2


def test_winding_additivity():
    syms = [lambda z: z, lambda z: z ** 3, np.conj, lambda z: 2 + z, lambda z: z * (3 + np.conj(z))]
    for f in syms:
        for h in syms:
            assert E.winding_number(lambda z: f(z) * h(z)) == E.winding_number(f) + E.winding_number(h)


def test_winding_rejects_zero():
    with pytest.raises(ValueError):
        E.winding_number(lambda z: z - 1)


def test_emerson_ball_one(group, g1):
    ext = E.emerson_extension(group, 1)
    assert len(ext.values) == 5
    assert ext.values["a"] == pytest.approx(1.0)
    D, idx = E.emerson_lift(group, 1)
    assert idx == 0
    assert np.allclose(np.abs(np.diag(D)), 1.0)


def test_emerson_lift_unitary_exact(group):
    D, idx = E.emerson_lift(group, 6)
    assert idx == 0
    assert opcalc.spectral_norm(D.conj().T @ D - np.eye(len(D))) <= 1e-15


def test_emerson_radius_cap(group):
    with pytest.raises(ValueError):
        E.emerson_lift(group, 9)


def test_emerson_rotation_rejected():
    with pytest.raises(ValueError):
        E.emerson_extension(FuchsianGroup([rotation(1.0)]), 1)


def test_boundary_consistency(group):
    vals = E.emerson_extension(group, 6).values
    assert abs(vals["aaaaaa"] - 1.0) <= 1e-3
    errs = [abs(vals["a" * k] - 1.0) for k in range(1, 7)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_index_contrast():
    assert E.index_contrast(3) == {"hardy": -1, "emerson": 0, "differ": True}


def test_rotation_unitary_exact():
    U = E.covariant_unitary(rotation(0.7), 32)
    assert np.abs(U.conj().T @ U - np.eye(65)).max() <= 1e-12
    assert np.count_nonzero(np.abs(U - np.diag(np.diag(U))) > 1e-12) == 0


def test_covariant_rep(g1):
    for c in E.covariant_rep_check(g1):
        assert c.passed, (c.name, c.residuals)


def test_unitarity_window64(g1):
    U = E.covariant_unitary(g1, 512)
    c = E.center(512, 32)
    assert opcalc.spectral_norm((U.conj().T @ U - np.eye(1025))[c, c]) <= 1e-6


def test_riesz_rotation_zero():
    K = E.riesz_commutator(rotation(0.4), 64)
    assert np.abs(K).max() <= 1e-13


def test_riesz_rank_one(g1):
    r = E.riesz_commutator_rank(g1, 512)
    s = r["singular_values"]
    assert s[1] / s[0] <= 1e-8
    assert abs(s[0] - 1) <= 1e-6
    assert r["sigma1_formula"] == pytest.approx(1.0, abs=1e-12)
    assert r["range_gap"] <= 1e-8
    assert r["formula_gap"] <= 1e-8


def test_riesz_projection():
    P = E.RieszSetup(16).projection
    assert np.array_equal(P @ P, P)
    assert np.array_equal(P, P.conj().T)


def test_dirichlet_integral():
    assert E.dirichlet_integral([5.0, 1.0]) == 1.0
    assert E.dirichlet_integral([0, 0, 0, 2.0]) == 12.0


def test_dirichlet_of_g(g1):
    c = E.compose_series([0.0, 1.0], g1, 4096)
    assert E.dirichlet_integral(c) == pytest.approx(1.0, abs=1e-8)


def test_dirichlet_rotation_unitary():
    u = E.u_gamma_rows(rotation(1.3), 32)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(32), atol=1e-13)


@pytest.mark.parametrize("which", [0, 1])
def test_dirichlet_checks(group, which):
    for c in E.dirichlet_u_gamma_check(group.generators[which]):
        assert c.passed, (c.name, c.residuals)


def test_by_frequency():
    p = E.by_frequency(2)
    assert list(E.modes(2)[p]) == [0, 1, -1, 2, -2]


def test_kk_cycle(g1):
    r = E.kk_cycle_check(M=256)
    assert r["F2_minus_I"] == 0 and r["F_minus_Fstar"] == 0
    assert r["passed"]


def test_multiplier_commutator_rank():
    M = 64
    F = 2 * E.RieszSetup(M).projection - np.eye(2 * M + 1)
    Mz = E.laurent_poly({1: 1.0}, M)
    assert np.linalg.matrix_rank(Mz @ F - F @ Mz) <= 2


def test_laurent_of_matches_poly():
    M = 16
    np.testing.assert_allclose(E.laurent_of(E.SYMBOLS["cos"], M), E.laurent_poly({1: 0.5, -1: 0.5}, M),
                               atol=1e-15)


def test_covariance_direction(g1):
    # U(g) M_z U(g)* approximates multiplication by g^{-1}
    M = 128
    U = E.covariant_unitary(g1, M)
    lhs = U @ E.laurent_of(E.SYMBOLS["z"], M) @ U.conj().T
    rhs = E.laurent_of(lambda z: evaluate(g1.inv, z), M)
    c = E.center(M, 16)
    assert opcalc.spectral_norm((lhs - rhs)[c, c]) < 1e-6
    assert math.isfinite(float(np.abs(lhs).max()))
