import numpy as np
import pytest

from sdlab import zoo
from sdlab.core import ActiveSet, ConceptClass, VersionSpace
from sdlab.dimensions import m_sd
from sdlab.oracle import MAX_CONCEPTS, MAX_POINTS, LabellingGame, labelling_game_value

from . import oracles


def tiny(count, seed, labels=2, n_max=4, m_max=8):
    rng = np.random.default_rng([seed, labels])
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        yield zoo.random_class(m, n, labels, int(rng.integers(2 ** 32)))


def test_singletons_value_one():
    # [PAPER] A labels nothing, B is forced into one round at most
    assert labelling_game_value(zoo.singletons(4)) == 1


def test_conventions():
    c = zoo.thresholds(3)
    assert labelling_game_value(c, active=ActiveSet(0)) == 0
    assert labelling_game_value(c, vs=VersionSpace(0)) == -1


@pytest.mark.parametrize("labels", [2, 3])
def test_matches_rules_reference(labels):
    # [DERIVED] brute force over partial labellings, no shared code
    for c in tiny(40, 1, labels, n_max=3 if labels == 3 else 4):
        want = oracles.game_value(oracles.rows_of(c), range(c.num_points), c.num_labels)
        assert labelling_game_value(c) == want, c.name


def test_multiclass_matches_rules_reference():
    for c in tiny(15, 2, 3, n_max=2, m_max=6):
        want = oracles.game_value(oracles.rows_of(c), range(c.num_points), 3, multiclass=True)
        assert labelling_game_value(c, multiclass=True) == want, c.name


def test_binary_game_equals_m_sd():
    for c in tiny(80, 3, 2, n_max=MAX_POINTS, m_max=MAX_CONCEPTS):
        assert labelling_game_value(c) == m_sd(c)


def test_multiclass_never_above_plain_game():
    # designations only restrict B, and B minimises, so A cannot lose ground
    for c in tiny(15, 4, 3, n_max=2, m_max=7):
        assert labelling_game_value(c, multiclass=True) >= labelling_game_value(c)


def test_best_moves_realise_value():
    c = zoo.k_intervals(1, 4)
    g = LabellingGame(c)
    vs, s = VersionSpace.full(c.num_concepts).bits, ActiveSet.full(4).bits
    move, val = g.best_adversary_move(vs, s)
    assert val == g.value(vs, s) == m_sd(c)
    for x, y in move.assignment:
        vs &= c.mask(x, y)
        s &= ~(1 << x)
    if s:
        (x, y), v = g.best_learner_move(vs, s)
        assert v == val


def test_point_cap():
    c = ConceptClass(np.zeros((1, MAX_POINTS + 1), dtype=np.int32), 2)
    with pytest.raises(ValueError, match="points"):
        labelling_game_value(c)


def test_concept_cap():
    c = zoo.random_class(MAX_CONCEPTS + 1, 3, 3, 0)
    with pytest.raises(ValueError, match="concepts"):
        labelling_game_value(c)


def test_label_cap():
    c = ConceptClass.from_rows([(0,), (3,)], num_labels=4)
    with pytest.raises(ValueError, match="labels"):
        labelling_game_value(c)
