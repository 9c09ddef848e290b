import itertools

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from conftest import substitutions
from oracles import all_paths, brute_language
from subadic import bratteli as bt
from subadic.branchpoints import (branch_points, closed_form_S, direct_S, suffix_trace, wn_supports)
from subadic.errors import BudgetExceeded, GateError
from subadic.returns import induce, parse_returns, psi_decode, return_words, return_words_exact
from subadic.words import fixed_point, is_primitive, language_closure

PROP = settings(max_examples=200, deadline=None, derandomize=True,
                suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])


def primitive(tau):
    assume(is_primitive(tau))
    try:
        return fixed_point(tau)
    except GateError:
        assume(False)


@PROP
@given(substitutions(), st.data())
def test_morphism_law(tau, data):
    w = st.lists(st.integers(0, tau.size - 1), max_size=8)
    u, v = tuple(data.draw(w)), tuple(data.draw(w))
    assert tau.apply(u + v) == tau.apply(u) + tau.apply(v)
    assert len(tau.apply(u)) == sum(len(tau.images[c]) for c in u)


@PROP
@given(substitutions(min_letters=2))
def test_language_subword_closed(tau):
    primitive(tau)
    table = language_closure(tau, 6).levels
    for ell in range(2, 7):
        for w in table[ell]:
            assert w[1:] in table[ell - 1] and w[:-1] in table[ell - 1]
    assert {tuple(w) for w in table[5]} == brute_language(tau.images, 5)


@PROP
@given(substitutions(min_letters=2, max_letters=4))
def test_dual_path_S(tau):
    primitive(tau)
    for size in range(2, tau.size + 1):
        for A1 in itertools.combinations(tau.letters, size):
            tr = suffix_trace(tau, A1)
            if tr.status != "cyclic":
                continue
            for n in range(1, 6):
                try:
                    direct = direct_S(tau, A1, n, 10 ** 5)
                except BudgetExceeded:
                    break
                assert direct == closed_form_S(tau, tr, n)


@PROP
@given(substitutions(min_letters=2, max_letters=4))
def test_returns_round_trip(tau):
    u = primitive(tau)
    rs = return_words(tau, u)
    t1 = induce(tau, rs)
    pre = u.prefix(300)
    code, used = parse_returns(rs, pre)
    assert psi_decode(rs, code) == pre[:used]
    rho = tau.power(u.power) if u.power > 1 else tau
    for j in t1.letters:
        assert psi_decode(rs, t1.images[j]) == rho.apply(rs.R[j])
        assert sum(len(rs.R[i]) for i in t1.images[j]) == len(rho.apply(rs.R[j]))
    try:
        exact = return_words_exact(tau, rs.base, max_len=64, budget=10 ** 5)
    except BudgetExceeded:
        return
    assert set(rs.R) == exact


@PROP
@given(substitutions(max_len=4))
def test_path_count_and_orbit(tau):
    B = bt.from_substitution(tau)
    for n in range(1, 4):
        total = sum(len(tau.iterate(a, n - 1)) for a in tau.letters)
        assume(total <= 2000)
        assert B.path_count(n) == [len(tau.iterate(a, n - 1)) for a in tau.letters]
        orbit = bt.vershik_orbit(B, n)
        assert len(orbit) == len(set(orbit)) == total
        assert {(p.vertices, p.orders) for p in orbit} == set(all_paths(tau.images, n))


@PROP
@given(substitutions(min_letters=2, max_letters=4))
def test_wn_consistent_with_branch_points(tau):
    primitive(tau)
    for bp in branch_points(tau)["points"]:
        assert bp.degree >= 2
        if bp.source != "trace":
            continue
        for n in (1, 2, 3):
            try:
                assert wn_supports(tau, bp.limit, n, 10 ** 5)
            except BudgetExceeded:
                break
