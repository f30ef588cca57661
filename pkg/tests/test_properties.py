"""Randomized invariants over small random classes."""

import numpy as np
from hypothesis import given, strategies as st

from sdlab import dimensions as D, zoo
from sdlab.core import ActiveSet, LabeledExample, VersionSpace, realizable_labels, restrict
from sdlab.oracle import labelling_game_value
from sdlab.simulate import run_episode


@st.composite
def classes(draw, labels=2, n_max=5, m_max=14):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(1, m_max))
    return zoo.random_class(m, n, labels, draw(st.integers(0, 2 ** 32 - 1)))


@st.composite
def states(draw, labels=2):
    c = draw(classes(labels))
    vs = VersionSpace(draw(st.integers(1, 2 ** c.num_concepts - 1)))
    act = ActiveSet(draw(st.integers(0, 2 ** c.num_points - 1)))
    return c, vs, act


@given(classes())
def test_chain_holds(c):
    rep = D.full_report(c, D.CHAIN)
    assert rep.chain_ok() is not False, rep.values


@given(classes())
def test_full_set_value_below_ld_and_class_value(c):
    v = D.m_sd(c)
    assert v <= D.online_bound(c) and v <= D.m_sd_class(c).value


@given(states(), st.data())
def test_restriction_never_raises_value(state, data):
    c, vs, act = state
    x = data.draw(st.integers(0, c.num_points - 1))
    y = data.draw(st.integers(0, c.num_labels - 1))
    child = restrict(c, vs, LabeledExample(x, y))
    assert D.m_sd(c, child, act.without(x)) <= D.m_sd(c, vs, act)
    # dropping a point without labelling it cannot raise the value either
    assert D.m_sd(c, vs, act.without(x)) <= D.m_sd(c, vs, act)


@given(states(labels=3))
def test_some_point_has_one_label_keeping_value(state):
    c, vs, act = state
    if not act:
        return
    v = D.m_sd(c, vs, act)
    keep = []
    for x in act.indices():
        keep.append(sum(D.m_sd(c, restrict(c, vs, LabeledExample(x, y)), act.without(x)) == v
                        for y in realizable_labels(c, vs, x)))
    assert min(keep) <= 1


@given(states())
def test_zero_iff_one_pattern_on_active(state):
    c, vs, act = state
    patterns = {tuple(c.table[i, act.indices()]) for i in vs.indices()}
    assert (D.m_sd(c, vs, act) == 0) == (len(patterns) == 1)


@given(classes())
def test_positive_iff_two_concepts(c):
    assert (D.m_sd_class(c).value >= 1) == (c.num_concepts >= 2)


@given(classes(n_max=6, m_max=30))
def test_halving_bound(c):
    assert D.m_sd(c) <= int(np.log2(c.num_concepts))


@given(classes(n_max=4, m_max=16))
def test_game_value_equals_m_sd(c):
    assert labelling_game_value(c) == D.m_sd(c)


@given(classes(labels=3, n_max=4), st.integers(0, 1000))
def test_sd_soa_drops_value_after_each_mistake(c, seed):
    tr = run_episode(c, adversary="random", seed=seed)
    vs, act = VersionSpace.full(c.num_concepts), ActiveSet.full(c.num_points)
    v = D.m_sd(c, vs, act)
    assert tr.mistakes <= v
    for s in tr.steps:
        vs = restrict(c, vs, LabeledExample(s.point, s.true))
        act = act.without(s.point)
        nv = D.m_sd(c, vs, act)
        assert nv <= v - 1 if s.mistake else nv <= v
        v = nv


@given(classes())
def test_shattered_set_needs_every_pattern(c):
    # a shattered set of size d needs 2^d concepts
    assert 2 ** D.vc_dim(c) <= c.num_concepts
