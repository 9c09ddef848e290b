"""Return words, the induced substitution and tower partitions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExceeded, GateError, InternalInconsistency, InvalidInput
from .words import (DEFAULT_BUDGET, LimitWord, Substitution, Word, fixed_point, is_left_proper,
                    language_closure)


@dataclass
class ReturnSystem:
    tau: Substitution
    point: LimitWord
    base: Word                          # the inducing word (u0 by default)
    R: list[Word]                       # ordered by first appearance in point
    certified: bool
    window: int
    tau1: Substitution | None = None
    generalized: bool = False

    @property
    def psi(self) -> dict[int, Word]:
        return dict(enumerate(self.R))

    def show(self) -> list[str]:
        return [self.tau.show(r) for r in self.R]


def _occurrences(pre: bytes, w: bytes) -> list[int]:
    out = []
    i = pre.find(w)
    while i >= 0:
        out.append(i)
        i = pre.find(w, i + 1)
    return out


def _split_at(img: bytes, bw: bytes) -> list[bytes]:
    occ = [p for p in _occurrences(img + bw, bw) if p < len(img)]
    return [img[i:j] for i, j in zip(occ, occ[1:] + [len(img)])]


def return_words(tau: Substitution, u: LimitWord | None = None, base: Sequence[int] | None = None,
                 budget: int = DEFAULT_BUDGET) -> ReturnSystem:
    """Return words to [base] read off the point u.

    Words seen in a prefix of u come first, in order of first appearance; the
    prefix grows by a factor 4 until two consecutive windows agree.  For a
    fixed point the list is then closed under splitting rho(r), rho the power
    fixing u, which yields every return word of u; words that only show up
    far out are appended in the order the closure finds them.
    """
    u = u or fixed_point(tau)
    base = tuple(base) if base else tuple(u.seed[:1])
    bw = bytes(base)
    n = 1024
    prev = None
    while True:
        n = min(n, budget)
        pre = u.prefix_bytes(n, max(budget, n))
        if not pre.startswith(bw):
            raise GateError(f"the point does not start with {tau.show(base)}")
        occ = _occurrences(pre, bw)
        R: list[Word] = []
        seen = set()
        for i, j in zip(occ, occ[1:]):
            v = pre[i:j]
            if v not in seen:
                seen.add(v)
                R.append(tuple(v))
        if (prev is not None and R == prev) or n >= budget:
            break
        prev = R
        n *= 4
    stable = prev is not None and R == prev
    if u.kind != "fixed" or len(u.seed) > 1:
        return ReturnSystem(tau, u, base, R, stable, n, generalized=True)
    rho = tau.power(u.power) if u.power > 1 else tau
    if not bytes(rho.apply(base)).startswith(bw):
        return ReturnSystem(tau, u, base, R, False, n, generalized=len(base) > 1)
    k = 0
    while k < len(R):
        for piece in _split_at(bytes(rho.apply(R[k])), bw):
            if piece not in seen:
                seen.add(piece)
                R.append(tuple(piece))
        k += 1
        if sum(len(r) for r in R) > budget:
            raise BudgetExceeded("return words exceed the budget")
    return ReturnSystem(tau, u, base, R, True, n, generalized=len(base) > 1)


def return_words_exact(tau: Substitution, base: Sequence[int], max_len: int = 256,
                       budget: int = DEFAULT_BUDGET) -> set[Word]:
    """All v starting with base, v·base in the language, no interior occurrence of base."""
    base = tuple(base)
    k = len(base)
    out = set()
    layer = [base]
    while layer:
        nxt = []
        for v in layer:
            vb = v + base
            if len(vb) > max_len:
                raise BudgetExceeded("return word longer than search bound")
            if bytes(vb) in language_closure(tau, len(vb), budget).levels[len(vb)]:
                out.add(v)
            for c in tau.letters:
                w = v + (c,)
                if w[len(w) - k:] == base and len(w) - k > 0:
                    continue
                if bytes(w) in language_closure(tau, len(w), budget).levels[len(w)]:
                    nxt.append(w)
        layer = nxt
    return out


def parse_returns(rs: ReturnSystem, word: Sequence[int], complete: bool = True) -> tuple[list[int], int]:
    """Split word at occurrences of the base; returns (indices, consumed length).

    With complete=True the last piece must itself be followed by the base
    inside word; otherwise it is left unparsed.
    """
    bw = bytes(rs.base)
    wb = bytes(word)
    if not wb.startswith(bw):
        raise InvalidInput("word does not start with the inducing word")
    index = {bytes(r): i for i, r in enumerate(rs.R)}
    occ = _occurrences(wb, bw)
    out = []
    for i, j in zip(occ, occ[1:]):
        piece = wb[i:j]
        if piece not in index:
            raise InvalidInput(f"{rs.tau.show(piece)} is not a return word")
        out.append(index[piece])
    return out, (occ[-1] if occ else 0)


def psi_code(rs: ReturnSystem, word: Sequence[int]) -> list[int]:
    return parse_returns(rs, word)[0] if word else []


def psi_decode(rs: ReturnSystem, seq: Sequence[int]) -> Word:
    try:
        return tuple(c for j in seq for c in rs.R[j])
    except (IndexError, TypeError):
        raise InvalidInput("index outside the return-word alphabet") from None


def induce(tau: Substitution, rs: ReturnSystem) -> Substitution:
    """tau1(j) = the return-word parse of rho(psi(j)), rho the power fixing u."""
    rho = tau.power(rs.point.power) if rs.point.power > 1 else tau
    bw = bytes(rs.base)
    if not bytes(rho.apply(rs.base)).startswith(bw):
        raise GateError("the image of the inducing word does not start with it")
    index = {bytes(r): i for i, r in enumerate(rs.R)}
    images = []
    for r in rs.R:
        img = bytes(rho.apply(r))
        pieces = _split_at(img, bw)
        if not pieces or not img.startswith(bw):
            raise InternalInconsistency("image of a return word does not start with the base")
        try:
            idx = tuple(index[p] for p in pieces)
        except KeyError as e:
            raise InternalInconsistency(
                f"residue {tau.show(e.args[0])} is not a return word (R not stabilized?)") from None
        if b"".join(pieces) != img:
            raise InternalInconsistency("re-concatenation mismatch")
        images.append(idx)
    symbols = tuple(str(i + 1) for i in range(len(rs.R)))
    tau1 = Substitution(symbols, tuple(images))
    rs.tau1 = tau1
    return tau1


def coded_point(rs: ReturnSystem) -> LimitWord:
    """D(u): the tau1 fixed point coding u."""
    if rs.tau1 is None:
        raise GateError("induce first")
    return LimitWord.fixed_point(rs.tau1, 0)


def left_proper_power(sub: Substitution, limit: int) -> int | None:
    p = sub
    for k in range(1, limit + 1):
        if is_left_proper(p):
            return k
        p = p.then(sub)
    return None


@dataclass
class TowerPartition:
    base: Word
    heights: dict[int, int]              # return-word index -> height
    atoms: list[tuple[int, int]]         # (k, i), 0 <= i < k
    word_length: int
    covers: bool
    disjoint: bool
    uncovered: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)


def tower_partition(tau: Substitution, base: Sequence[int], ell: int = 16,
                    branch: LimitWord | None = None, point: LimitWord | None = None,
                    budget: int = DEFAULT_BUDGET) -> TowerPartition:
    """Atoms U_k^i over the cylinder [base], checked on all length-ell words."""
    base = tuple(base)
    if branch is not None and tuple(branch.prefix(len(base), budget)) != base:
        raise GateError(f"the branch point does not lie in [{tau.show(base)}]")
    if not base:
        return TowerPartition((), {0: 1}, [(1, 0)], ell, True, True)
    point = point or branch or fixed_point(tau)
    rs = return_words(tau, point, base, budget)
    heights = {j: len(r) for j, r in enumerate(rs.R)}
    atoms = sorted({(k, i) for k in heights.values() for i in range(k)})
    H = max(heights.values())
    big = language_closure(tau, ell + H, budget)
    table = big.levels
    bw = base
    uncovered, overlaps = [], []
    for z in sorted(language_closure(tau, ell, budget).levels[ell]):
        z = tuple(z)
        hit = set()
        for v in rs.R:
            full = v + bw
            for i in range(len(v)):
                tail = full[i:]
                m = min(len(tail), len(z))
                if tail[:m] != z[:m]:
                    continue
                w = v[:i] + z
                if bytes(w) in table[len(w)]:
                    hit.add((len(v), i))
        if not hit:
            uncovered.append(tau.show(z))
        elif len(hit) > 1:
            overlaps.append((tau.show(z), sorted(hit)))
    return TowerPartition(base, heights, atoms, ell, not uncovered, not overlaps,
                          uncovered[:10], overlaps[:10])


def tau1_properties(tau: Substitution, rs: ReturnSystem, budget: int = DEFAULT_BUDGET) -> dict:
    from .branchpoints import quasi_invertibility
    from .recognition import recognizability_check
    from .words import classify
    tau1 = rs.tau1 or induce(tau, rs)
    power = left_proper_power(tau1, len(rs.R) + 1)
    work = tau1.power(power) if power and power > 1 else tau1
    q1 = quasi_invertibility(work, budget=budget)
    q = quasi_invertibility(tau, budget=budget)
    rep = {
        "tau1": str(tau1),
        "left_proper_power": power,
        "analysed": str(work),
        "classify": classify(work, budget=budget),
        "recognizability": recognizability_check(work, scan_N=min(budget, 1 << 17), budget=budget),
        "quasi_invertible": q1.is_quasi_invertible,
        "M": q1.M,
        "branch_points": [(bp.describe(), bp.degree) for bp in q1.points],
        "tau_quasi_invertible": q.is_quasi_invertible,
        "tau_M": q.M,
    }
    if q.is_quasi_invertible and q1.is_quasi_invertible and q.M != q1.M:
        rep["discrepancy"] = f"tau is {q.M}-quasi-invertible but tau1 is {q1.M}-quasi-invertible"
    if not q.is_quasi_invertible:
        rep["note"] = "tau is not quasi-invertible, so tau1's degree need not match"
    return rep
