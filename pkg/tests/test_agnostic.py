import math

import numpy as np
import pytest

from sdlab import zoo
from sdlab.core import ConceptClass
from sdlab.agnostic import (LABEL_SOURCES, SampleMultiset, default_eta, khinchine_check,
                            lower_bound_instance, mw_predict, mw_update, parse_sample, project,
                            run_agnostic, sauer_bound)
from sdlab.errors import UnsupportedError


def test_mw_predict_weighted_vote():
    assert mw_predict([1, 1, 2], [1, 0, 1]) == pytest.approx(0.75)
    with pytest.raises(FloatingPointError):
        mw_predict([0, 0], [1, 0])


def test_mw_update_halves_wrong_experts():
    w = mw_update(np.ones(3), [1, 0, 1], 0, math.log(2))
    assert w.tolist() == pytest.approx([0.5, 1, 0.5])
    with pytest.raises(ValueError):
        mw_update(np.ones(3), [1, 0, 1], 0, -1)


def test_projection_thresholds():
    pool = project(zoo.thresholds(3), SampleMultiset((0, 1, 2)))
    assert pool.N == 4 and pool.vc == 1
    # repeating points adds rounds, not experts
    pool2 = project(zoo.thresholds(3), SampleMultiset((0, 0, 1, 1, 2, 2)))
    assert (pool2.N, pool2.T) == (4, 6)


def test_projection_merges_agreeing_concepts():
    pool = project(zoo.singletons(5), SampleMultiset((0, 1)))
    assert pool.advice.tolist() == [[0, 0], [0, 1], [1, 0]]


def test_projection_rejects_multilabel_and_bad_points():
    with pytest.raises(UnsupportedError):
        project(zoo.perm_thresholds(2), SampleMultiset((0,)))
    with pytest.raises(ValueError):
        project(zoo.singletons(3), SampleMultiset((3,)))


@pytest.mark.parametrize("T, d, want", [(5, 1, 6), (4, 2, 11), (3, 3, 8), (6, 0, 1)])
def test_sauer(T, d, want):
    assert sauer_bound(T, d) == want


def test_expert_count_within_sauer():
    for seed in range(20):
        c = zoo.random_class(20, 6, 2, seed)
        pool = project(c, SampleMultiset(tuple(range(6)) * 2))
        assert pool.N <= sauer_bound(pool.T, pool.vc)


def test_sample_validation():
    with pytest.raises(ValueError):
        SampleMultiset(())
    with pytest.raises(ValueError):
        SampleMultiset((-1,))


def test_fixed_labels_best_expert_zero_loss():
    c = zoo.thresholds(4)
    rep = run_agnostic(c, SampleMultiset((0, 1, 2, 3)), "fixed", trials=3, fixed=[1, 1, 0, 0])
    assert all(r.best_loss == 0 for r in rep.trials)
    assert rep.upper_ok()


def test_fixed_labels_validated():
    with pytest.raises(ValueError):
        run_agnostic(zoo.thresholds(4), SampleMultiset((0, 1)), "fixed", fixed=[1])
    with pytest.raises(ValueError):
        run_agnostic(zoo.thresholds(4), SampleMultiset((0, 1)), "fixed", fixed=[1, 2])


def test_realizable_source_has_perfect_expert():
    rep = run_agnostic(zoo.k_intervals(1, 5), SampleMultiset(tuple(range(5)) * 4), "realizable",
                       trials=10, seed=2)
    assert all(r.best_loss == 0 for r in rep.trials)


def test_complement_labels_cost_every_expert():
    # against the negation of its own advice, a lone expert loses every round
    c = ConceptClass.from_rows([(0, 1, 1)])
    rep = run_agnostic(c, SampleMultiset((0, 1, 2, 0)), "fixed", trials=2, fixed=[1, 0, 0, 1])
    assert rep.N == 1 and rep.eta == 0
    assert all(r.best_loss == r.alg_loss == 4 for r in rep.trials)
    assert rep.regrets.tolist() == [0, 0]


@pytest.mark.parametrize("source", LABEL_SOURCES[1:])
def test_upper_bound_holds(source):
    rep = run_agnostic(zoo.grid_rectangles(2, 2), SampleMultiset(tuple(range(4)) * 10), source,
                       trials=15, seed=4)
    assert rep.upper_ok(), rep.to_json()


def test_adversarial_source_forces_half_expected_loss():
    rep = run_agnostic(zoo.singletons(3), SampleMultiset(tuple(range(3)) * 5), "adversarial",
                       trials=2)
    assert all(r.expected_loss >= rep.T / 2 for r in rep.trials)


def test_unknown_source_and_trials():
    s = SampleMultiset((0,))
    with pytest.raises(ValueError):
        run_agnostic(zoo.singletons(3), s, "nope")
    with pytest.raises(ValueError):
        run_agnostic(zoo.singletons(3), s, trials=0)


def test_default_eta():
    assert default_eta(4, 8) == pytest.approx(math.sqrt(math.log(4)))


def test_workers_do_not_change_reports():
    c, s = zoo.grid_rectangles(2, 3), SampleMultiset(tuple(range(9)) * 3)
    a = run_agnostic(c, s, trials=12, seed=5, workers=1)
    b = run_agnostic(c, s, trials=12, seed=5, workers=3)
    assert a.dumps() == b.dumps() and a.to_csv() == b.to_csv()


def test_scripted_adaptive_source():
    rep = run_agnostic(zoo.singletons(3), SampleMultiset((0, 1, 2)), "adaptive", trials=1,
                       script=lambda t, past: t % 2)
    assert rep.trials[0].best_loss >= 0


def test_report_checks_and_csv():
    rep = run_agnostic(zoo.thresholds(3), SampleMultiset((0, 1, 2)), trials=4)
    assert set(rep.checks()) == {"upper_bound_every_run", "lower_bound_mean_3se"}
    assert rep.to_csv().count("\n") == 5


@pytest.mark.parametrize("k", [1, 4, 16, 50])
def test_khinchine(k):
    assert khinchine_check(k)["ok"]


def test_parse_sample():
    c = zoo.thresholds(3)
    assert parse_sample("all", c).points == (0, 1, 2)
    assert parse_sample("repeat:2", c).points == (0, 0, 1, 1, 2, 2)
    assert parse_sample("points:2,0,2", c).points == (2, 0, 2)
    assert parse_sample("lowerbound:3", c).points == (0, 0, 0)
    for bad in ["", "all:1", "repeat:x", "points:", "lowerbound:0", "what:1"]:
        with pytest.raises(ValueError):
            parse_sample(bad, c)


def test_lower_bound_instance():
    c = zoo.grid_rectangles(2, 3)
    s = lower_bound_instance(c, 2)
    assert s.T == 8 and len(set(s.points)) == 4
    with pytest.raises(ValueError):
        lower_bound_instance(zoo.singletons(3), 0)


def test_bernoulli_half_alias():
    s = SampleMultiset((0, 1, 2))
    a = run_agnostic(zoo.thresholds(3), s, "bernoulli_half", trials=3, seed=1)
    assert a.label_source == "bernoulli"
    assert a.dumps() == run_agnostic(zoo.thresholds(3), s, "bernoulli", trials=3, seed=1).dumps()
