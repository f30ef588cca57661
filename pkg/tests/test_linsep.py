import itertools
from fractions import Fraction

import numpy as np
import pytest

from sdlab import zoo
from sdlab.linsep import affine, separable, separator

SQUARE = [(0, 0), (1, 1), (0, 1), (1, 0)]


def test_xor_not_separable():
    assert not separable(SQUARE, [1, 1, 0, 0])


def test_edge_of_square_separable():
    assert separable(SQUARE, [1, 0, 1, 0])


@pytest.mark.parametrize("sign", [0, 1])
def test_constant_labellings(sign):
    assert separable(SQUARE, [sign] * 4)


def test_witness_has_margin():
    pts = [(Fraction(1, 3), 2), (5, -1), (0, 0), (2, 2)]
    signs = [1, 0, 1, 0]
    wb = separator(pts, signs)
    for x, s in zip(pts, signs):
        v = affine(wb, x)
        assert v >= 1 if s else v <= -1


def test_duplicate_point_with_both_signs():
    assert not separable([(1, 2), (1, 2)], [1, 0])


def test_line_matches_interval_rule():
    # [DERIVED] on a line, halfspaces are exactly prefixes and suffixes
    xs = [(Fraction(v),) for v in (-3, -1, 0, 2, 7)]
    for signs in itertools.product((0, 1), repeat=5):
        changes = sum(a != b for a, b in zip(signs, signs[1:]))
        assert separable(xs, signs) == (changes <= 1)


def test_class_closed_under_complement():
    c = zoo.linear_separators(zoo.octagon_config())
    rows = {tuple(r) for r in c.table.tolist()}
    assert rows == {tuple(1 - v for v in r) for r in rows}


@pytest.mark.parametrize("n", [3, 5, 7])
def test_general_position_count(n):
    # [DERIVED] n points in general position in the plane: n(n-1) + 2 dichotomies
    rng = np.random.default_rng(n)
    pts = [tuple(int(v) for v in rng.integers(-1000, 1000, 2)) for _ in range(n)]
    assert zoo.linear_separators(pts).num_concepts == n * (n - 1) + 2


def test_regular_octagon_count():
    assert zoo.linear_separators(zoo.regular_octagon()).num_concepts == 58


def test_agrees_with_direct_check():
    rng = np.random.default_rng(9)
    pts = [tuple(int(v) for v in rng.integers(-4, 5, 2)) for _ in range(6)]
    rows = {tuple(r) for r in zoo.linear_separators(pts).table.tolist()}
    for signs in itertools.product((0, 1), repeat=6):
        assert (signs in rows) == separable(pts, signs)


def test_point_cap():
    with pytest.raises(ValueError):
        zoo.linear_separators([(i, i * i) for i in range(17)])
