import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstar_comp import crossed as X
from cstar_comp.crossed import CrossedElement, TrigPoly
from cstar_comp.mobius import evaluate, rotation


def test_reduce_word():
    assert X.reduce_word("aAb") == "b"
    assert X.reduce_word("abBA") == ""
    assert X.word_product("ab", "Ba") == "aa"


def test_trigpoly_arithmetic():
    p = TrigPoly.from_dict({-1: 2.0, 2: 1j})
    q = TrigPoly.from_dict({0: 1.0, 1: -1.0})
    r = (p * q).to_dict()
    assert r == {-1: 2.0, 0: -2.0, 2: 1j, 3: -1j}
    assert (p - p).is_zero()
    assert p.conj().to_dict() == {1: 2.0, -2: -1j}
    assert p.degree() == 2


@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=12), st.integers(-6, 6))
@settings(max_examples=40, deadline=None)
def test_trigpoly_evaluation(coeffs, low):
    p = TrigPoly(np.array(coeffs, dtype=complex), low)
    theta = np.linspace(0, 2 * np.pi, 17)
    z = np.exp(1j * theta)
    direct = sum(c * z ** (low + i) for i, c in enumerate(coeffs))
    scale = max(1.0, sum(abs(c) for c in coeffs))
    assert np.abs(p(z) - direct).max() <= 1e-12 * scale
    assert np.abs(p.on_circle(theta) - direct).max() <= 1e-12 * scale


def test_trigpoly_nufft_path(rng):
    c = rng.normal(size=3001) + 1j * rng.normal(size=3001)
    p = TrigPoly(c, -1500)
    theta = rng.uniform(0, 2 * np.pi, size=5000)
    assert len(c) * len(theta) >= X.NUFFT_WORK
    fast = p.on_circle(theta)
    slow = p(np.exp(1j * theta))
    assert np.abs(fast - slow).max() <= 1e-9 * np.abs(c).sum()


def test_compose_rotation():
    p = TrigPoly.from_dict({1: 1.0, -2: 0.5})
    out, tail = X.compose_boundary(p, rotation(0.6))
    expect = {1: np.exp(0.3j * 2) * 1.0, -2: 0.5 * np.exp(-0.6j * 2)}
    d = out.to_dict()
    assert tail <= 1e-14
    for m, c in expect.items():
        assert d[m] == pytest.approx(c, abs=1e-14)


def test_compose_boundary_accuracy(g1):
    p = TrigPoly.from_dict({1: 1.0, -1: 0.5, 3: 0.2j})
    out, _ = X.compose_boundary(p, g1)
    z = np.exp(2j * np.pi * np.arange(50) / 50 + 0.1j)
    assert np.abs(out(z) - p(evaluate(g1, z))).max() <= 1e-13


def test_fixed_band_warns(g1):
    p = TrigPoly.from_dict({4: 1.0})
    with pytest.warns(X.CutoffWarning):
        _, tail = X.compose_boundary(p, g1, band=8)
    assert tail > 1e-6


def test_unit_and_group_sector(group):
    x = X.random_element(np.random.default_rng(1), group)
    assert (X.unit(group) * x).distance(x) == 0.0
    f = CrossedElement({"": {1: 1.0, 0: 2.0}})
    g = CrossedElement({"": {-1: 3.0}})
    assert (f * g).terms[""].to_dict() == {0: 3.0, -1: 6.0}
    h = CrossedElement({"a": 1.0}) * CrossedElement({"A": 1.0})
    assert list(h.terms) == [""] and h.terms[""].to_dict() == {0: 1.0}


def test_star_examples(group):
    f = CrossedElement({"": {2: 1j, 0: 1.0}})
    assert f.star().terms[""].to_dict() == {-2: -1j, 0: 1.0}
    s = CrossedElement({"ab": 1.0}).star()
    assert list(s.terms) == ["BA"]
    x = CrossedElement({"a": {1: 1.0, -1: 0.3}})
    assert x.star().star().distance(x) <= 1e-10


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_axioms(seed, group):
    rng = np.random.default_rng(seed)
    x, y, z = (X.random_element(rng, group) for _ in range(3))
    gaps = X.algebra_axiom_gaps(x, y, z)
    assert max(gaps.values()) <= 1e-10, gaps


def test_text_roundtrip(group):
    x = X.random_element(np.random.default_rng(5), group)
    y = CrossedElement.from_text(x.to_text(), group)
    assert y.distance(x) == 0.0
    arrow = CrossedElement.from_text("a : 1 → 1.0 0.0\ne : 0 -> 2 0\n", group)
    assert set(arrow.terms) == {"a", ""}


def test_text_errors(group):
    with pytest.raises(ValueError, match="line 2"):
        CrossedElement.from_text("a : 1 -> 1 0\nnonsense\n", group)
    with pytest.raises(ValueError, match="unknown letter"):
        CrossedElement.from_text("q : 1 -> 1 0\n", group)


def test_regular_rep_unit_sector(group):
    x = CrossedElement({"": {1: 1.0}})
    s = X.regular_representation(x, 1, 8)
    assert not s.truncated
    assert all(r == c for r, c in s.blocks)
    B = s.blocks[("a", "a")]
    # block at word h is multiplication by z o h
    c = X._boundary_coefficients(lambda z: evaluate(group.word_map("a"), z), 8)
    np.testing.assert_allclose(B, X._laurent_block(c, 8))


def test_translation_isometric():
    assert X.translation_isometry_gap("a", 2, 8) == 0.0
    s = X.regular_representation(CrossedElement({"a": 1.0}), 2, 4)
    assert s.truncated


def test_homomorphism_interior(group):
    x = CrossedElement({"a": {1: 1.0}}, group)
    y = CrossedElement({"b": {-1: 1.0}}, group)
    r = X.representation_checks(x, y, R=2, M=128)
    assert r["homomorphism"] <= 1e-9
    assert r["involution"] <= 1e-12
    assert r["interior_columns"] == 1


def test_norm_lower_bounds_monotone(group):
    x = CrossedElement({"": 1.0, "a": {1: 0.5}}, group)
    vals = [v for _, v in X.norm_lower_bounds(x, (0, 1, 2), 8)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_quotient_covariance(g1, g2):
    const = X.covariance_in_quotient(g1, {0: 1.0})
    assert max(r for _, r in const.residuals) <= 1e-10
    assert X.covariance_in_quotient(g1, {1: 1.0}).passed
    assert X.covariance_in_quotient(g2, {1: 1.0, -1: 1.0}).passed
