"""The rotated substitution tau* that fixes the branch point."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .branchpoints import direct_S, suffix_trace
from .errors import BudgetExceeded, GateError
from .words import (DEFAULT_BUDGET, LimitWord, Substitution, Word, is_left_proper,
                    language_closure)


@dataclass(frozen=True)
class StarDecomposition:
    power: int                 # tau was replaced by tau^power
    base: Substitution         # tau^power
    s1: Word
    parts: tuple[tuple[Word, int], ...]   # (p_i, x_i) with base(a_i) = p_i x_i s1
    star: Substitution


def star_decomposition(tau: Substitution, max_power: int | None = None) -> StarDecomposition:
    """Find the smallest q with a constant full-alphabet trace for tau^q, then rotate."""
    max_power = max_power or tau.size + 2
    if tau.size < 2:
        raise GateError("tau* needs at least two letters")
    for q in range(1, max_power + 1):
        base = tau.power(q) if q > 1 else tau
        tr = suffix_trace(base, base.letters)
        if tr.status == "cyclic" and tr.start == 1 and tr.period == 1:
            s1 = tr.steps[0].s
            parts, imgs = [], []
            for img in base.images:
                body = img[:len(img) - len(s1)]
                p, x = body[:-1], body[-1]
                parts.append((p, x))
                imgs.append(s1 + p + (x,))
            return StarDecomposition(q, base, s1, tuple(parts), Substitution(tau.symbols, tuple(imgs)))
    raise GateError(f"the full-alphabet suffix trace is not constant for tau^q, q <= {max_power}; "
                    "supply a candidate tau* instead")


def tau_star(tau: Substitution) -> Substitution:
    return star_decomposition(tau).star


def _prefix_ok(short, long):
    return len(short) <= len(long) and long[:len(short)] == short


def verify_star_identities(tau: Substitution, star: Substitution, s1: Word, n_max: int = 5,
                           seed: int = 0, samples: int = 20, budget: int = DEFAULT_BUDGET) -> dict:
    """Check the three algebraic identities linking tau, tau* and s1.

    1. tau*(tau^n(w)) s1 = s1 tau^{n+1}(w), letters and random short words.
    2. S_n = tau*(S_{n-1}) s1 for n >= 2 (S_n from the full alphabet).
    3. (tau*)^{n-1}(s1) <= S_n <= (tau*)^n(s1) in the prefix order.
    """
    s1 = tuple(s1)
    rng = random.Random(seed)
    words = [(a,) for a in tau.letters]
    words += [tuple(rng.randrange(tau.size) for _ in range(rng.randint(2, 6))) for _ in range(samples)]
    failures = []
    checked = {"identity1": 0, "identity2": 0, "identity3": 0}
    for n in range(n_max + 1):
        for w in words:
            tn = tau.iterate_word(w, n, budget)
            lhs = star.apply(tn) + s1
            rhs = s1 + tau.apply(tn)
            checked["identity1"] += 1
            if lhs != rhs:
                failures.append({"identity": 1, "n": n, "word": tau.show(w)})
    S = {}
    for n in range(1, n_max + 1):
        try:
            S[n] = direct_S(tau, tau.letters, n, budget)
        except BudgetExceeded:
            break
    for n in range(2, n_max + 1):
        if n not in S:
            break
        checked["identity2"] += 1
        if S[n] != star.apply(S[n - 1]) + s1:
            failures.append({"identity": 2, "n": n})
        lo = star.iterate_word(s1, n - 1, budget)
        hi = star.iterate_word(s1, n, budget)
        checked["identity3"] += 1
        if not (_prefix_ok(lo, S[n]) and _prefix_ok(S[n], hi)):
            failures.append({"identity": 3, "n": n})
    return {"ok": not failures, "n_max": n_max, "checked": checked, "failures": failures}


def language_equality(tau: Substitution, other: Substitution, ell: int,
                      budget: int = DEFAULT_BUDGET) -> dict:
    try:
        a = language_closure(tau, ell, budget).levels[ell]
        b = language_closure(other, ell, budget).levels[ell]
    except (GateError, BudgetExceeded) as e:
        return {"equal": None, "length": ell, "reason": str(e)}
    only_a = sorted(a - b)[:5]
    only_b = sorted(b - a)[:5]
    return {"equal": a == b, "length": ell, "count": len(a),
            "only_first": [tau.show(w) for w in only_a], "only_second": [tau.show(w) for w in only_b]}


def verify_candidate_star(tau: Substitution, candidate: Substitution, branch: LimitWord,
                          n: int = 2048, ell: int = 16, budget: int = DEFAULT_BUDGET) -> dict:
    """Gate for a user-supplied tau*: it must fix the branch point."""
    if candidate.symbols != tau.symbols:
        raise GateError("candidate tau* must use the same alphabet")
    y = branch.prefix(n, budget)
    image = candidate.apply(y)[:n]
    agree = next((i for i in range(n) if image[i] != y[i]), n)
    return {
        "fixes_branch_point": agree == n,
        "checked_prefix": n,
        "first_disagreement": None if agree == n else agree,
        "left_proper": is_left_proper(candidate),
        "language": language_equality(tau, candidate, ell, budget),
    }
