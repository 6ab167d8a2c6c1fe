import math

import numpy as np
import pytest

from cstar_comp.fuchsian import (BudgetError, FuchsianGroup, InsufficientSeparationError, angular_distance,
                                 cluster_centers, clusters, enumerate_words, hausdorff_angular,
                                 invert_word, limit_set_sample, pick_distinct_limit_points,
                                 pingpong_check)
from cstar_comp.mobius import MobiusTransform, fixed_points, rotation

from conftest import SQRT2


def test_word_counts(group):
    words = list(enumerate_words(group, 3))
    by_len = {}
    for w, _ in words:
        by_len[len(w)] = by_len.get(len(w), 0) + 1
    # free group on two letters: 4 * 3^(L-1)
    assert by_len == {1: 4, 2: 12, 3: 36}


def test_words_are_distinct_maps(group):
    maps = [g for w, g in enumerate_words(group, 3) if len(w) == 3]
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            assert not maps[i].same_map(maps[j], tol=1e-9)


def test_words_are_reduced(group):
    for w, _ in enumerate_words(group, 4):
        for x, y in zip(w, w[1:]):
            assert x != y.swapcase()


def test_invert_word(group):
    g = group.word_map("abA")
    h = group.word_map(invert_word("abA"))
    assert (g @ h).same_map(MobiusTransform(1.0, 0.0))


def test_budget_cap(group):
    with pytest.raises(BudgetError):
        list(enumerate_words(group, 12, cap=1000))


def test_elementary_group_two_clusters(g1):
    S = limit_set_sample(FuchsianGroup([g1]), 40, 0.99)
    cs = cluster_centers(S)
    assert len(cs) == 2
    for p in fixed_points(g1):
        assert min(angular_distance(p, c) for c in cs) < 1e-3


def test_default_group_nonelementary(group):
    S = limit_set_sample(group, 8, 0.99)
    cs = cluster_centers(S)
    assert len(cs) >= 3
    d = [angular_distance(cs[i], cs[j]) for i in range(len(cs)) for j in range(i + 1, len(cs))]
    assert min(d) > 0.1


def test_rotation_group_empty_sample():
    S = limit_set_sample(FuchsianGroup([rotation(2 * math.pi / 5)]), 6, 0.99)
    assert len(S) == 0
    assert clusters(S) == []


def test_base_point_invariance(group):
    A = cluster_centers(limit_set_sample(group, 10, 0.99))
    B = cluster_centers(limit_set_sample(group, 10, 0.99, base_point=0.2 + 0.1j))
    assert hausdorff_angular(A, B) < 5e-3


def test_pick_three_points(group):
    S = limit_set_sample(group, 8, 0.99)
    pts = pick_distinct_limit_points(S, 3)
    assert len(pts) == 3
    for i in range(3):
        for j in range(i + 1, 3):
            assert angular_distance(pts[i], pts[j]) > 1e-2


def test_pick_too_many_points_fails(g1):
    S = limit_set_sample(FuchsianGroup([g1]), 20, 0.99)
    with pytest.raises(InsufficientSeparationError):
        pick_distinct_limit_points(S, 3)


def test_pingpong(group):
    assert pingpong_check(group)
    # shrinking |b| enlarges the isometric circles until they overlap
    a = 1.0001
    b = math.sqrt(a * a - 1)
    bad = FuchsianGroup([MobiusTransform(a, b), MobiusTransform(a, 1j * b)])
    assert not pingpong_check(bad)


def test_sample_points_on_circle(group):
    S = limit_set_sample(group, 6, 0.95)
    assert np.allclose(np.abs(S.points), 1.0)
    assert S.to_csv().count("\n") >= len(S)


def test_radius_floor_validated(group):
    with pytest.raises(ValueError):
        limit_set_sample(group, 4, 1.0)


def test_identity_generator_rejected():
    with pytest.raises(ValueError):
        FuchsianGroup([MobiusTransform(SQRT2, 0) @ MobiusTransform(SQRT2, 0).inv])
