import pytest

from oracles import brute_language
from subadic.branchpoints import quasi_invertibility
from subadic.errors import GateError
from subadic.star import (language_equality, star_decomposition, tau_star, verify_candidate_star,
                          verify_star_identities)
from subadic.words import LimitWord, Substitution, is_left_proper


def test_example1_star(ex):
    sd = star_decomposition(ex["ex1"])
    assert sd.power == 1 and ex["ex1"].show(sd.s1) == "b"
    assert str(sd.star) == "a->baa, b->bab"


def test_example10_star(ex):
    s = tau_star(ex["ex10"])
    assert [s.show(i) for i in s.images] == ["caa", "cbc", "cab"]


@pytest.mark.parametrize("name", ["ex1", "ex10", "fig1"])
def test_identities(ex, name):
    t = ex[name]
    sd = star_decomposition(t)
    rep = verify_star_identities(sd.base, sd.star, sd.s1, n_max=5)
    assert rep["ok"], rep["failures"]
    assert all(v > 0 for v in rep["checked"].values())


def test_identity_failure_is_reported(ex):
    t = ex["ex10"]
    wrong = Substitution.from_dict({"a": "caa", "b": "cbc", "c": "cba"})
    rep = verify_star_identities(t, wrong, t.word("c"), n_max=3)
    assert not rep["ok"] and {f["identity"] for f in rep["failures"]} >= {1}


@pytest.mark.parametrize("name,ell", [("ex1", 20), ("ex10", 20), ("fig1", 24)])
def test_star_language_equal(ex, name, ell):
    t = ex[name]
    s = tau_star(t)
    assert language_equality(t, s, ell)["equal"]
    assert brute_language(t.images, 8) == brute_language(s.images, 8)


@pytest.mark.parametrize("name", ["ex1", "ex10", "fig1"])
def test_star_fixes_branch_point(ex, name):
    t = ex[name]
    y = quasi_invertibility(t).branch.limit
    s = tau_star(t)
    assert is_left_proper(s)
    pre = y.prefix(3000)
    assert s.apply(pre)[:3000] == pre


def test_star_matrix_is_row_permuted(ex):
    # rotating each image keeps its letter counts
    for name in ("ex1", "ex10", "fig1"):
        t = ex[name]
        assert tau_star(t).matrix() == t.matrix()


def test_no_star_without_constant_trace(ex):
    with pytest.raises(GateError):
        star_decomposition(ex["ex3"])
    with pytest.raises(GateError):
        star_decomposition(Substitution.from_dict({"a": "aa"}))


def test_example11_candidate(ex):
    t = ex["ex11"]
    y = quasi_invertibility(t).branch.limit
    rep = verify_candidate_star(t, ex["ex11_star"], y, n=2048)
    assert rep["fixes_branch_point"] and rep["left_proper"]
    assert rep["language"]["equal"]
    bad = verify_candidate_star(t, ex["ex11"], y, n=2048)
    assert not bad["fixes_branch_point"] and bad["first_disagreement"] is not None


def test_candidate_alphabet_mismatch(ex):
    y = LimitWord.fixed_point(ex["ex1"], 0)
    with pytest.raises(GateError):
        verify_candidate_star(ex["ex1"], ex["ex10"], y)
