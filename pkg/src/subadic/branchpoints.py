"""Suffix traces, branch points and quasi-invertibility."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import lcm
from typing import Sequence

from .errors import BudgetExceeded, InternalInconsistency, InvalidInput
from .words import (DEFAULT_BUDGET, LimitWord, Substitution, Word, common_suffix,
                    fixed_seeds, generating_seed, language_closure, length_vector, suffix_graph)

L_CMP = 4096


@dataclass(frozen=True)
class TraceStep:
    A: frozenset[int]
    s: Word


@dataclass(frozen=True)
class SuffixTrace:
    A1: frozenset[int]
    steps: tuple[TraceStep, ...]      # steps[k-1] = (A_k, s_k)
    status: str                       # "fizzled" or "cyclic"
    fizzle_step: int = 0
    fizzle_reason: str = ""
    start: int = 0                    # cyclic: (A_start, s_start) = (A_{start+period}, ...)
    period: int = 0

    def state(self, k: int) -> TraceStep:
        """(A_k, s_k) for any k >= 1 of a cyclic trace."""
        if k <= len(self.steps):
            return self.steps[k - 1]
        if self.status != "cyclic":
            raise IndexError(k)
        return self.steps[self.start - 1 + (k - self.start) % self.period]

    def s(self, k: int) -> Word:
        return self.state(k).s

    def A(self, k: int) -> frozenset[int]:
        return self.state(k).A


def proper_common_suffix(words: Sequence[Sequence[int]]) -> Word:
    s = common_suffix(words)
    cap = min(len(w) for w in words) - 1
    return s[len(s) - cap:] if len(s) > cap else s


def suffix_trace(tau: Substitution, A1) -> SuffixTrace:
    A = frozenset(A1)
    if len(A) < 2:
        raise InvalidInput("a suffix trace needs at least two letters")
    steps: list[TraceStep] = []
    index: dict[frozenset[int], int] = {}
    while True:
        k = len(steps) + 1
        index[A] = k
        imgs = [tau.images[a] for a in sorted(A)]
        s = proper_common_suffix(imgs)
        steps.append(TraceStep(A, s))
        if not s:
            return SuffixTrace(frozenset(A1), tuple(steps), "fizzled", k, "empty-suffix")
        nxt = frozenset(img[-len(s) - 1] for img in imgs)
        if len(nxt) < 2:
            return SuffixTrace(frozenset(A1), tuple(steps), "fizzled", k, "singleton")
        if nxt in index:
            j = index[nxt]
            return SuffixTrace(frozenset(A1), tuple(steps), "cyclic", start=j, period=k + 1 - j)
        A = nxt


def closed_form_S(tau: Substitution, trace: SuffixTrace, n: int) -> Word:
    """S_n = s_n tau(s_{n-1}) ... tau^{n-1}(s_1)."""
    if trace.status != "cyclic":
        # at the fizzle step the formula still holds unless the proper-suffix cap was binding
        last = trace.steps[-1]
        imgs = [tau.images[a] for a in last.A]
        ok = trace.fizzle_step if len(common_suffix(imgs)) == len(last.s) else trace.fizzle_step - 1
        if n > ok:
            raise InvalidInput("closed form needs a trace that has not fizzled by step n")
    out: list[int] = []
    for m in range(n):
        out.extend(tau.iterate_word(trace.s(n - m), m))
    return tuple(out)


def direct_S(tau: Substitution, A1, n: int, budget: int = DEFAULT_BUDGET) -> Word:
    lens = length_vector(tau, n)
    if sum(lens[a] for a in A1) > budget:
        raise BudgetExceeded(f"tau^{n} images exceed budget")
    return proper_common_suffix([tau.iterate(a, n, budget) for a in sorted(A1)])


def common_suffix_S(tau: Substitution, A1, n: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Maximal proper common suffix of {tau^n(a)}, computed two ways."""
    trace = suffix_trace(tau, A1)
    closed = None
    try:
        closed = closed_form_S(tau, trace, n)
    except InvalidInput:
        pass
    try:
        direct = direct_S(tau, A1, n, budget)
    except BudgetExceeded:
        if closed is None:
            raise
        return {"S": closed, "direct": None, "closed": closed, "certified": False}
    if closed is not None and closed != direct:
        raise InternalInconsistency(
            f"S_{n} mismatch: direct {tau.show(direct)} vs closed form {tau.show(closed)}")
    return {"S": direct, "direct": direct, "closed": closed, "certified": True}


# fixed points and their preimages

@dataclass(frozen=True)
class FixedPoint:
    point: LimitWord
    period: int
    pad: Word          # bounded prefix P with tau^q(P) = P; empty for seeds

    def describe(self) -> str:
        t = self.point.tau
        base = self.point.seed[len(self.pad):]
        pw = "" if self.period == 1 else f"^{self.period}"
        return (t.show(self.pad) + " " if self.pad else "") + f"tau{pw}-fixed from {t.show(base)}"


def fixed_points(tau: Substitution, max_pad: int = 64, budget: int = DEFAULT_BUDGET) -> list[FixedPoint]:
    """Fixed points of powers of tau that lie in X.

    Growing prefix-cycle seeds, plus points P·u where every letter of P is
    fixed by tau^q (such points begin with bounded letters, e.g. 1u for Chacon).
    """
    out = []
    for sd in fixed_seeds(tau):
        if not sd.growing:
            continue
        q = sd.period
        rho = tau.power(q) if q > 1 else tau
        u = LimitWord.fixed_point(tau, sd.letter, q)
        out.append(FixedPoint(u, q, ()))
        frozen = [c for c in tau.letters if rho.images[c] == (c,)]
        if not frozen:
            continue
        head = u.prefix(16, budget)
        layer = [()]
        while layer:
            nxt = []
            for P in layer:
                for c in frozen:
                    Q = (c,) + P
                    if len(Q) > max_pad:
                        continue
                    w = Q + head
                    if bytes(w) in language_closure(tau, len(w), budget).levels[len(w)]:
                        nxt.append(Q)
            for Q in sorted(nxt):
                out.append(FixedPoint(LimitWord(tau, Q + (sd.letter,), q, "fixed"), q, Q))
            layer = nxt
    return out


def preimage_letters_language(tau: Substitution, y: LimitWord, ell: int = 24,
                              budget: int = DEFAULT_BUDGET) -> list[int]:
    """Letters a with a·y[:ell] in the language (brute-force oracle)."""
    head = y.prefix(ell, budget)
    table = language_closure(tau, ell + 1, budget)
    return [a for a in tau.letters if bytes((a,) + head) in table.levels[ell + 1]]


def preimage_count(tau: Substitution, u: LimitWord | FixedPoint, budget: int = DEFAULT_BUDGET):
    """(count, letters) of sigma-preimages of a fixed point of tau^q.

    For a seed point: union of the suffix cycles of tau^q containing some a_i
    with a_i u0 in the language.  Padded points use the language oracle with
    growing window until the answer stabilizes.
    """
    fp = u if isinstance(u, FixedPoint) else FixedPoint(u, u.power, ())
    point = fp.point
    if fp.pad or len(point.seed) > 1:
        prev = None
        for ell in (8, 16, 32, 48):
            cur = preimage_letters_language(tau, point, ell, budget)
            if cur == prev:
                break
            prev = cur
        return len(cur), cur
    rho = tau.power(fp.period) if fp.period > 1 else tau
    u0 = point.seed[0]
    two = language_closure(tau, 2, budget).levels[2]
    letters = set()
    for cyc in suffix_graph(rho).cycles():
        if any(bytes((a, u0)) in two for a in cyc):
            letters.update(cyc)
    return len(letters), sorted(letters)


# branch points

@dataclass
class BranchPoint:
    limit: LimitWord
    degree: int
    extensions: tuple[int, ...]
    source: str                         # "trace" or "fixed"
    traces: list = field(default_factory=list)   # (A1, phase) pairs contributing
    fixed_match: str | None = None
    possibly_equal: list = field(default_factory=list)

    def describe(self) -> str:
        return self.limit.describe()


def _normalized_lead(tau: Substitution, lead: Word, p: int, target: int) -> Word:
    """Rewrite y = lead tau^p(y) as y = Q tau^target(y), target a multiple of p."""
    Q: list[int] = []
    for j in range(target // p):
        Q.extend(tau.iterate_word(lead, j * p))
    return tuple(Q)


def _trace_limits(tau: Substitution):
    """All (lead, period, extensions, A1, phase) from cyclic traces, canonical subset order."""
    n = tau.size
    found = []
    traces = []
    for size in range(2, n + 1):
        for A1 in combinations(range(n), size):
            tr = suffix_trace(tau, A1)
            traces.append(tr)
            if tr.status != "cyclic":
                continue
            M, p = tr.start, tr.period
            for r in range(p):
                k = M + p - 1 + r
                lead: list[int] = []
                for m in range(p):
                    lead.extend(tau.iterate_word(tr.s(k - m), m))
                found.append((tuple(lead), p, tr.A(k + 1), A1, k))
    return found, traces


def branch_points(tau: Substitution, l_cmp: int = L_CMP, budget: int = DEFAULT_BUDGET) -> dict:
    """Enumerate branch points from cyclic suffix traces and fixed points."""
    found, traces = _trace_limits(tau)
    groups: dict[Word, BranchPoint] = {}
    per = lcm(*[f[1] for f in found]) if found else 1
    for lead, p, ext, A1, k in found:
        key = _normalized_lead(tau, lead, p, per)
        bp = groups.get(key)
        if bp is None:
            bp = groups[key] = BranchPoint(LimitWord(tau, lead, p), 0, (), "trace")
        elif (p, len(lead)) < (bp.limit.power, len(bp.limit.seed)):
            bp.limit = LimitWord(tau, lead, p)
        bp.extensions = tuple(sorted(set(bp.extensions) | set(ext)))
        bp.degree = len(bp.extensions)
        bp.traces.append({"A1": [tau.symbols[a] for a in A1], "step": k})
    points = [groups[k] for k in sorted(groups, key=lambda k: (len(k), k))]

    fixed = []
    for fp in fixed_points(tau, budget=budget):
        cnt, letters = preimage_count(tau, fp, budget)
        fixed.append((fp, cnt, letters))
        if cnt >= 2:
            points.append(BranchPoint(fp.point, cnt, tuple(letters), "fixed"))

    # pairwise distinctness by prefix comparison
    comparisons = []
    n = min(l_cmp, budget)
    prefixes = [bp.limit.prefix_bytes(n, max(budget, n)) for bp in points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            a, b = prefixes[i], prefixes[j]
            d = next((t for t in range(n) if a[t] != b[t]), None)
            comparisons.append({"pair": [i, j], "first_difference": d})
            if d is None:
                points[i].possibly_equal.append(j)
                points[j].possibly_equal.append(i)
    for bp, pre in zip(points, prefixes):
        if bp.source != "trace":
            continue
        for fp, _, _ in fixed:
            other = fp.point.prefix_bytes(n, max(budget, n))
            if pre == other:
                bp.fixed_match = fp.describe()
    return {"points": points, "traces": traces, "fixed_points": fixed, "comparisons": comparisons,
            "l_cmp": n}


@dataclass
class QuasiVerdict:
    is_quasi_invertible: bool
    M: int
    branch: BranchPoint | None
    points: list
    evidence: dict
    reason: str = ""


def quasi_invertibility(tau: Substitution, l_cmp: int = L_CMP, budget: int = DEFAULT_BUDGET) -> QuasiVerdict:
    res = branch_points(tau, l_cmp, budget)
    pts = res["points"]
    flagged = any(bp.possibly_equal for bp in pts)
    if flagged:
        return QuasiVerdict(False, 0, None, pts, res,
                            f"inconclusive: branch points agree on {res['l_cmp']} symbols")
    if len(pts) == 1:
        return QuasiVerdict(True, pts[0].degree, pts[0], pts, res)
    if not pts:
        return QuasiVerdict(False, 0, None, pts, res, "no branch point found")
    return QuasiVerdict(False, 0, None, pts, res, f"not quasi-invertible: {len(pts)} branch points")


def wn_oracle(tau: Substitution, n: int, budget: int = DEFAULT_BUDGET) -> dict[bytes, int]:
    """r(w) = number of letters a with a·w a tail of some tau^n word, for w in W_n."""
    lens = length_vector(tau, n)
    if sum(x * x for x in lens) > 64 * budget:
        raise BudgetExceeded(f"W_{n} too large for budget")
    ext: dict[bytes, set[int]] = {}
    for a in tau.letters:
        img = bytes(tau.iterate(a, n, budget))
        for k in range(1, len(img)):
            # the extension alpha.w may be the whole image tau^n(a)
            ext.setdefault(img[k:], set()).add(img[k - 1])
    return {w: len(s) for w, s in ext.items()}


def wn_supports(tau: Substitution, y: LimitWord, n: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Some tail w in W_n with r(w) >= 2 is a prefix of y."""
    r = wn_oracle(tau, n, budget)
    m = max((len(w) for w in r), default=0)
    pre = y.prefix_bytes(m, max(budget, m))
    return any(v >= 2 and pre.startswith(w) for w, v in r.items())
