import random

import pytest

from subadic.branchpoints import quasi_invertibility
from subadic.errors import GateError, InvalidInput
from subadic.returns import (coded_point, induce, left_proper_power, parse_returns, psi_code, psi_decode,
                             return_words, return_words_exact, tau1_properties, tower_partition)
from subadic.words import LimitWord, Substitution, fixed_point


def test_morse_returns(ex):
    m = ex["morse"]
    rs = return_words(m)
    assert rs.show() == ["011", "01", "0"] and rs.certified
    t1 = induce(m, rs)
    sq = t1.power(2)
    assert [sq.show(i) for i in sq.images] == ["123132", "1232", "13"]
    assert not quasi_invertibility(sq).is_quasi_invertible
    assert len(quasi_invertibility(sq).points) == 2


def test_chacon_returns(ex):
    c = ex["chacon"]
    rs = return_words(c)
    assert rs.show() == ["0", "01"]
    assert str(induce(c, rs)) == "1->121, 2->122"


def test_variant_returns(ex):
    v = ex["variant"]
    rs = return_words(v)
    assert rs.show() == ["0", "01", "011"]
    t1 = induce(v, rs)
    q = quasi_invertibility(t1)
    assert q.is_quasi_invertible and q.M == 3
    assert not quasi_invertibility(v).is_quasi_invertible


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex10", "ex11", "fig1", "chacon", "variant", "morse"])
def test_returns_match_exact_oracle(ex, name):
    t = ex[name]
    rs = return_words(t)
    assert set(rs.R) == return_words_exact(t, rs.base)
    assert len(set(rs.R)) == len(rs.R)


def test_late_return_word_is_found():
    # the return word 0 2 2 2 ... appears far out in u
    t = Substitution.from_dict({"a": "cccb", "b": "a", "c": "bbb"})
    u = fixed_point(t)
    rs = return_words(t, u)
    assert set(rs.R) == return_words_exact(t, rs.base)
    induce(t, rs)


@pytest.mark.parametrize("name", ["ex10", "chacon", "morse", "variant"])
def test_psi_round_trip(ex, name):
    t = ex[name]
    rs = return_words(t)
    induce(t, rs)
    rng = random.Random(3)
    for _ in range(20):
        seq = [rng.randrange(len(rs.R))]
        for _ in range(rng.randint(0, 6)):
            seq.append(rng.randrange(len(rs.R)))
        w = psi_decode(rs, seq)
        assert psi_code(rs, w + tuple(rs.base)) == seq


@pytest.mark.parametrize("name", ["ex10", "chacon", "morse", "variant", "ex2"])
def test_induced_length_conservation(ex, name):
    t = ex[name]
    rs = return_words(t)
    t1 = induce(t, rs)
    rho = t.power(rs.point.power) if rs.point.power > 1 else t
    for j, r in enumerate(rs.R):
        assert sum(len(rs.R[i]) for i in t1.images[j]) == len(rho.apply(r))


def test_coded_point_decodes_to_u(ex):
    m = ex["morse"]
    rs = return_words(m)
    induce(m, rs)
    d = coded_point(rs)
    assert psi_decode(rs, d.prefix(100))[:100] == fixed_point(m).prefix(100)


def test_coded_point_requires_induce(ex):
    rs = return_words(ex["morse"])
    with pytest.raises(GateError):
        coded_point(rs)


def test_parse_errors(ex):
    rs = return_words(ex["chacon"])
    with pytest.raises(InvalidInput):
        parse_returns(rs, (1, 0))
    with pytest.raises(InvalidInput):
        psi_decode(rs, [7])
    assert parse_returns(rs, (0, 0, 1, 0))[0] == [0, 1]


def test_left_proper_power(ex):
    t1 = induce(ex["morse"], return_words(ex["morse"]))
    assert left_proper_power(t1, 4) == 2
    assert left_proper_power(ex["morse"], 3) is None


def test_example11_c_tower(ex):
    t = ex["ex11"]
    y = quasi_invertibility(t).branch.limit
    tp = tower_partition(t, t.word("c"), ell=16, branch=y)
    assert tp.covers and tp.disjoint
    assert sorted(tp.heights.values()) == [1, 3, 4, 6]
    assert len(tp.atoms) == 1 + 3 + 4 + 6


def test_tower_branch_not_in_base(ex):
    t = ex["ex11"]
    y = quasi_invertibility(t).branch.limit
    with pytest.raises(GateError):
        tower_partition(t, t.word("a"), ell=8, branch=y)


def test_chacon_tower_and_empty_base(ex):
    c = ex["chacon"]
    tp = tower_partition(c, (0,), ell=12)
    assert tp.heights == {0: 1, 1: 2} and tp.covers and tp.disjoint
    e = tower_partition(c, (), ell=5)
    assert e.atoms == [(1, 0)] and e.covers


def test_point_must_start_with_base(ex):
    t = ex["ex10"]
    with pytest.raises(GateError):
        return_words(t, fixed_point(t), base=t.word("b"))


def test_generalized_base(ex):
    t = ex["ex10"]
    y = LimitWord(t, t.word("c"), 1)
    rs = return_words(t, y, base=t.word("c"))
    assert rs.generalized and all(r[0] == t.word("c")[0] for r in rs.R)


def test_tau1_properties_chacon(ex):
    c = ex["chacon"]
    rep = tau1_properties(c, return_words(c))
    assert rep["tau1"] == "1->121, 2->122" and rep["quasi_invertible"] and rep["M"] == 2
