import time

import numpy as np
import pytest

from sdlab import _kernel_py, kernel, zoo
from sdlab.errors import BudgetExceeded

from . import oracles

BACKENDS = kernel.backends()


def table_of(pair):
    """Normal-form table as nested lists (the key types differ per backend)."""
    return np.asarray(pair[1]).tolist()


compiled = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def random_tables(count, seed=0, labels=2):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 20))
        t = np.unique(rng.integers(0, labels, size=(m, n)), axis=0)
        yield t.astype(np.int32)


def test_selected_backend_is_listed():
    assert kernel.BACKEND in {b.BACKEND for b in BACKENDS}


def test_pure_python_always_available():
    assert BACKENDS[0] is _kernel_py


@compiled
@pytest.mark.parametrize("labels", [2, 3])
def test_normal_forms_identical(labels):
    py, c = BACKENDS
    for t in random_tables(150, 1, labels):
        assert table_of(py.normalize(t)) == table_of(c.normalize(t))
        assert table_of(py.normalize_ordered(t)) == table_of(c.normalize_ordered(t))
        assert py.shape(py.normalize(t)[1]) == c.shape(c.normalize(t)[1])


@compiled
@pytest.mark.parametrize("labels", [2, 3])
def test_values_and_state_counts_identical(labels):
    py, c = BACKENDS
    for t in random_tables(150, 2, labels):
        a, b = py.Solver(), c.Solver()
        for method in ("sd_value", "online_value", "fixed_value"):
            assert getattr(a, method)(t) == getattr(b, method)(t), method
            assert a.states == b.states, method
        assert a.sd_children(t) == b.sd_children(t)


@compiled
def test_many_groups_keep_python_order():
    # one column with thousands of distinct labels exercises the group sort
    py, c = BACKENDS
    rng = np.random.default_rng(5)
    t = np.unique(np.column_stack([rng.integers(0, 3000, 4000), rng.integers(0, 2, 4000),
                                   rng.integers(0, 2, 4000)]), axis=0).astype(np.int32)
    assert py.Solver().sd_value(t) == c.Solver().sd_value(t)
    assert table_of(py.normalize(t)) == table_of(c.normalize(t))


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_matches_reference_games(backend):
    for t in random_tables(60, 3, 2):
        rows = {tuple(r) for r in t.tolist()}
        pts = range(t.shape[1])
        s = backend.Solver()
        assert s.sd_value(t) == oracles.sd_value(rows, pts, 2)
        assert s.online_value(t) == oracles.online_value(rows, pts)
        assert s.fixed_value(t) == oracles.fixed_value(rows, tuple(pts))


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_state_budget(backend):
    t = zoo.grid_rectangles(2, 3).table
    with pytest.raises(BudgetExceeded) as e:
        backend.Solver().sd_value(t, max_states=3)
    assert e.value.states > 3


def test_equal_keys_mean_equal_values():
    # keys are sound memo keys: equal keys only for isomorphic states
    seen = {}
    for t in random_tables(300, 4, 2):
        k = kernel.normalize(t)[0]
        v = (kernel.Solver().sd_value(t), kernel.Solver().online_value(t))
        assert seen.setdefault(k, v) == v


def test_forced_and_duplicate_columns_dropped():
    t = np.array([[0, 0, 1, 1], [1, 1, 1, 0], [0, 0, 1, 0]])
    assert kernel.shape(kernel.normalize(t)[1]) == (3, 2)
