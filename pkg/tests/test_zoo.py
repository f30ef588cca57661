import numpy as np
import pytest

from sdlab import zoo
from sdlab.dimensions import m_sd, vc_dim


def rowset(c):
    return {tuple(r) for r in c.table.tolist()}


def test_singletons_and_thresholds_shapes():
    assert zoo.singletons(5).table.tolist() == np.eye(5, dtype=int).tolist()
    t = zoo.thresholds(4)
    assert t.num_concepts == 5 and t.table[2].tolist() == [1, 1, 0, 0]


@pytest.mark.parametrize("k, n, count", [(1, 4, 11), (2, 5, 31), (1, 6, 22)])
def test_k_intervals_counts(k, n, count):
    # [DERIVED] 1 + C(n+1, 2) single runs; 2-interval count by enumeration
    assert zoo.k_intervals(k, n).num_concepts == count


def test_k_intervals_nested():
    assert rowset(zoo.k_intervals(1, 7)) < rowset(zoo.k_intervals(2, 7)) < rowset(zoo.k_intervals(3, 7))


@pytest.mark.parametrize("d, n", [(1, 0), (2, 1), (3, 1), (1, 2)])
def test_bendavid_counts_and_vc(d, n):
    c = zoo.bendavid(d, n)
    assert c.num_points == 3 ** n * d
    assert c.num_concepts == 3 ** n * 2 ** d


def test_bendavid_blocks_contain_previous_level():
    # each diagonal block restricted to its rows is a copy of the level below
    prev, cur = zoo.bendavid(2, 0), zoo.bendavid(2, 1)
    m, w = prev.table.shape
    for b in range(3):
        blk = cur.table[b * m:(b + 1) * m, b * w:(b + 1) * w]
        assert np.array_equal(blk, prev.table)


def test_grid_rectangles():
    g = zoo.grid_rectangles(2, 3)
    # [DERIVED] 6 spans per axis, 36 boxes plus the empty concept, all distinct
    assert g.num_points == 9 and g.num_concepts == 37
    assert g.point_names[0] == "(0,0)"
    with pytest.raises(ValueError):
        zoo.grid_rectangles(3, 5)


def test_perm_thresholds_counts():
    c = zoo.perm_thresholds(2)
    assert (c.num_points, c.num_concepts, c.num_labels) == (4, 96, 48)


def test_perm_thresholds_blocks_are_threshold_classes():
    # fixing the permutation part of the label leaves a threshold class along that order
    c = zoo.perm_thresholds(2)
    want = rowset(zoo.thresholds(4)) - {(0, 0, 0, 0)}
    for i in range(24):
        blk = c.table[i * 4:(i + 1) * 4]
        assert set((blk // 2).ravel().tolist()) == {i}
        bits = blk % 2
        order = np.argsort(-bits.sum(axis=0), kind="stable")
        assert {tuple(r) for r in bits[:, order].tolist()} == want


def test_perm_thresholds_bad_n():
    with pytest.raises(ValueError):
        zoo.perm_thresholds(4)


def test_random_class_reproducible():
    a, b = zoo.random_class(10, 5, 3, 42), zoo.random_class(10, 5, 3, 42)
    assert a == b and a.num_concepts == 10
    assert zoo.random_class(10, 5, 3, 43) != a
    assert zoo.random_class(100, 2, 2, 0).num_concepts == 4


@pytest.mark.parametrize("seed", range(10))
def test_vc1_trees(seed):
    c = zoo.vc1_tree_class(7, seed)
    assert c.num_concepts == 8 and vc_dim(c) == 1
    assert m_sd(c) <= 1


def test_octagon_points():
    assert len(zoo.octagon_config()) == 8 and len(zoo.regular_octagon()) == 8


def test_embed_shape():
    pts = zoo.embed_2d(2)
    assert len(pts) == 16 and {len(p.coords) for p in pts} == {6}
    # each copy lives on its own coordinate triple with a constant third coordinate
    assert all(p.coords[2] == 1 and p.coords[3:] == (0, 0, 0) for p in pts[:8])


@pytest.mark.parametrize("uri, name", [
    ("zoo:singletons:4", "singletons:4"), ("zoo:thresholds:3", "thresholds:3"),
    ("zoo:k_intervals:1:4", "k_intervals:1:4"), ("zoo:rectangles:2:2", "rectangles:2:2"),
    ("zoo:bendavid:2:1", "bendavid:2:1"), ("zoo:random:5:3:2:7", "random:5:3:2:7"),
    ("zoo:vc1_tree:5:1", "vc1_tree:5:1"), ("zoo:octagon", "octagon")])
def test_uris(uri, name):
    assert zoo.from_uri(uri).name == name


@pytest.mark.parametrize("uri", ["zoo:nope", "zoo:singletons", "zoo:singletons:x", "foo:bar",
                                 "zoo:octagon:1", "zoo:singletons:1"])
def test_bad_uris(uri):
    with pytest.raises(ValueError):
        zoo.from_uri(uri)
