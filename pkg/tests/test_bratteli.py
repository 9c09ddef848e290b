import json
from collections import Counter

import pytest

from oracles import all_paths
from subadic import bratteli as bt
from subadic.errors import BudgetExceeded, InvalidInput
from subadic.words import LimitWord, Substitution, fixed_point


def test_figure1_edges(ex):
    B = bt.from_substitution(ex["fig1"])
    assert B.level(1).edges() == [("v0", "a", 1), ("v0", "b", 1)]
    for n in (2, 3, 7):
        assert B.level(n).edges() == [("a", "a", 1), ("b", "a", 2), ("b", "a", 3),
                                      ("a", "b", 1), ("b", "b", 2)]
    assert [B.indegree(2, a) for a in range(2)] == [3, 2]


def test_odometer_paths():
    B = bt.from_substitution(Substitution.from_dict({"a": "aa"}))
    for n in range(1, 8):
        assert B.path_count(n) == [2 ** (n - 1)]
        assert len(bt.vershik_orbit(B, n)) == 2 ** (n - 1)


@pytest.mark.parametrize("name", ["fig1", "ex1", "ex10", "chacon", "morse", "ex8"])
def test_path_count_is_iterate_length(ex, name):
    t = ex[name]
    B = bt.from_substitution(t)
    for n in range(1, 6):
        assert B.path_count(n) == [len(t.iterate(a, n - 1)) for a in t.letters]
        found = sorted((p.vertices, p.orders) for p in bt.truncations(B, n))
        assert found == sorted(all_paths(t.images, n))


@pytest.mark.parametrize("name", ["fig1", "ex10", "chacon", "ex3"])
def test_orbit_is_total(ex, name):
    B = bt.from_substitution(ex[name])
    for n in (1, 3, 5):
        orbit = bt.vershik_orbit(B, n)
        assert len(orbit) == len(set(orbit)) == sum(B.path_count(n))
        assert set(orbit) == set(bt.truncations(B, n))
        assert all(bt.is_path(B, p) for p in orbit)


def test_successor_exhausted(ex):
    B = bt.from_substitution(ex["fig1"])
    top = bt.PathTruncation((1, 1, 1), (1, 2, 2))
    assert bt.is_path(B, top) and bt.successor(B, top) is None
    assert not bt.is_path(B, bt.PathTruncation((0, 0), (1, 5)))


def test_telescope_pairs_is_square(ex):
    t = ex["ex10"]
    B = bt.from_substitution(t)
    T = bt.telescope(B, [1], step=2)
    sq = bt.from_substitution(t.power(2))
    assert bt.order_isomorphic(T, sq, 4)
    with pytest.raises(InvalidInput):
        bt.telescope(B, [1], step=0)
    with pytest.raises(InvalidInput):
        bt.telescope(B, [2, 1])


def test_split_then_telescope(ex):
    B = bt.from_substitution(ex["fig1"])
    for n in (1, 2, 3):
        S = bt.split(B, n)
        assert sum(S.path_count(n + 1)) == sum(B.path_count(n))
        keep = [k for k in range(1, 7) if k != n]
        back = bt.telescope(S, keep)
        assert bt.order_isomorphic(back, bt.telescope(B, list(range(1, 6))), 5)


def test_extremal_paths(ex):
    e = bt.extremal_paths(bt.from_substitution(ex["ex3"]))
    # two maximal paths, one per letter of the suffix cycle {a, b}
    assert e["max_count"] == 2 and e["min_count"] == 1 and e["semi_proper"]
    f = bt.extremal_paths(bt.from_substitution(ex["fig1"]))
    assert f["max_count"] == f["min_count"] == 1


def test_add_tower_edges(ex):
    B = bt.from_substitution(ex["chacon"])
    same, zero = bt.add_tower_edges(B, {"0": 1, "1": 1})
    assert zero == 0 and same.level(1).incoming == B.level(1).incoming
    T, added = bt.add_tower_edges(B, {"0": 1, "1": 2}, {"1": ["0", "1"]})
    assert added == 1 and T.indegree(1, 1) == 2
    with pytest.raises(InvalidInput):
        bt.add_tower_edges(B, {"x": 2})
    with pytest.raises(InvalidInput):
        bt.add_tower_edges(B, {"0": 0})


def test_dot_and_json(ex):
    B = bt.from_substitution(ex["fig1"])
    dot = bt.to_dot(B, 3)
    assert dot.startswith("digraph") and dot.count("->") == 2 + 5 + 5
    assert 'L1_b -> L2_a [label="3"];' in dot
    js = bt.to_json(B, 2)
    json.dumps(js)
    assert Counter((e["source"], e["range"]) for e in js["edges"][1]) == Counter(
        {("b", "a"): 2, ("a", "a"): 1, ("a", "b"): 1, ("b", "b"): 1})


def test_malformed_levels():
    with pytest.raises(InvalidInput):
        bt.EdgeLevel(("v0",), ("a",), ((),))
    with pytest.raises(InvalidInput):
        bt.EdgeLevel(("v0",), ("a",), ((3,),))


@pytest.mark.parametrize("name", ["fig1", "ex1", "morse"])
def test_stationary_conjugacy(ex, name):
    rep = bt.stationary_check(ex[name], 5, 500)
    assert rep["commutes"] and not rep["disagreements"] and rep["start_is_minimal"]
    assert rep["window_agree"] + rep["window_inconclusive"] == rep["window_checked"]


def test_conjugacy_detects_wrong_order(ex):
    t = ex["fig1"]
    wrong = Substitution.from_dict({"a": "bba", "b": "ab"})
    B = bt.from_substitution(wrong)
    rep = bt.conjugacy_check(B, t, fixed_point(t), 4, 300)
    assert not rep["commutes"]


def test_chacon_needs_tower_edges(ex):
    from subadic.returns import induce, return_words
    c = ex["chacon"]
    rs = return_words(c)
    rho = induce(c, rs)
    z = LimitWord.fixed_point(rho, 0)
    bare = bt.from_substitution(rho)
    assert not bt.conjugacy_check(bare, rho, z, 4, 300, phi1=rs.R)["commutes"]
    T, added = bt.add_tower_edges(bare, {rho.symbols[j]: len(r) for j, r in enumerate(rs.R)})
    assert added == 1
    assert bt.conjugacy_check(T, rho, z, 4, 300, phi1=rs.R)["commutes"]
    # the tower vertex for 01 now carries both of its letters
    assert T.path_count(2) == [4, 5]


def test_short_orbit_rejected(ex):
    t = ex["fig1"]
    with pytest.raises(BudgetExceeded):
        bt.conjugacy_check(bt.from_substitution(t), t, fixed_point(t), 2, 10 ** 9, budget=1000)
