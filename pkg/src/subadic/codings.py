"""Sliding block codes and the rank-one / Perron generator families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInput
from .words import DEFAULT_BUDGET, LimitWord, Substitution, Word, fixed_point, language_closure


@dataclass(frozen=True)
class LocalRule:
    """phi on windows of length left+1+right; output index aligned to window start."""
    source: Substitution
    table: dict[Word, str]
    left: int = 1
    right: int = 1

    def __post_init__(self):
        n = self.window
        bad = [w for w in self.table if len(w) != n]
        if bad:
            raise InvalidInput(f"window {self.source.show(bad[0])} does not have length {n}")

    @property
    def window(self) -> int:
        return self.left + 1 + self.right

    @property
    def targets(self) -> list[str]:
        return sorted(set(self.table.values()))

    def to_text(self) -> str:
        lines = [f"radius: {self.left} {self.right}"]
        lines += [f"{self.source.show(w)} -> {t}" for w, t in sorted(self.table.items())]
        return "\n".join(lines) + "\n"


def parse_rule(text: str, tau: Substitution) -> LocalRule:
    """Lines ``aaa -> α``; an optional ``radius: L R`` line (default 1 1)."""
    left, right = 1, 1
    table: dict[Word, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("radius:"):
            try:
                left, right = (int(x) for x in line[len("radius:"):].split())
            except ValueError:
                raise InvalidInput(f"cannot parse radius line {raw!r}") from None
            if left < 0 or right < 0:
                raise InvalidInput("radii must be non-negative")
            continue
        if "->" not in line:
            raise InvalidInput(f"cannot parse rule line {raw!r}")
        lhs, rhs = (p.strip() for p in line.split("->", 1))
        if not lhs or not rhs or len(rhs.split()) != 1:
            raise InvalidInput(f"cannot parse rule line {raw!r}")
        w = tau.word(lhs)
        if w in table and table[w] != rhs:
            raise InvalidInput(f"window {lhs} mapped twice")
        table[w] = rhs
    if not table:
        raise InvalidInput("empty rule")
    return LocalRule(tau, table, left, right)


def load_rule(path: str, tau: Substitution) -> LocalRule:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_rule(fh.read(), tau)
    except OSError as e:
        raise InvalidInput(f"cannot read {path}: {e.strerror}") from None


def apply_code(rule: LocalRule, w: Sequence[int]) -> tuple[str, ...]:
    n = rule.window
    out = []
    for i in range(len(w) - n + 1):
        win = tuple(w[i:i + n])
        try:
            out.append(rule.table[win])
        except KeyError:
            raise InvalidInput(f"window {rule.source.show(win)} is outside the rule's domain") from None
    return tuple(out)


def injectivity_check(rule: LocalRule, tau: Substitution, ell: int,
                      budget: int = DEFAULT_BUDGET) -> dict:
    """No two words of L_ell with equal images differ at their centre letter.

    Boundary letters of a finite window can never be recovered from the
    image, so the check is on the centre position ell // 2, which is what
    injectivity on bi-infinite points requires.
    """
    if ell < rule.window:
        raise InvalidInput("ell must be at least the window length")
    words = sorted(language_closure(tau, ell, budget).levels[ell])
    groups: dict[tuple[str, ...], list[bytes]] = {}
    for w in words:
        groups.setdefault(apply_code(rule, w), []).append(w)
    c = ell // 2
    witness = None
    for img, ws in groups.items():
        centres = {w[c] for w in ws}
        if len(centres) > 1:
            a = ws[0]
            b = next(w for w in ws if w[c] != a[c])
            cand = (a, b)
            if witness is None or cand < witness[0]:
                witness = (cand, img)
    out = {"injective": witness is None, "ell": ell, "words": len(words), "centre": c,
           "images": len(groups)}
    if witness is not None:
        (a, b), img = witness
        out["witness"] = {"x": tau.show(a), "y": tau.show(b), "image": list(img)}
    return out


def image_language(rule: LocalRule, tau: Substitution, ell: int,
                   budget: int = DEFAULT_BUDGET) -> set[tuple[str, ...]]:
    """Phi(L_{ell + window - 1}): the length-ell words of the image subshift."""
    n = ell + rule.window - 1
    return {apply_code(rule, w) for w in language_closure(tau, n, budget).levels[n]}


def coded_prefix(rule: LocalRule, point: LimitWord, n: int, budget: int = DEFAULT_BUDGET) -> tuple[str, ...]:
    return apply_code(rule, point.prefix(n + rule.window - 1, budget))


def image_branch_degrees(rule: LocalRule, tau: Substitution, prefixes: Sequence[Sequence[str]],
                         budget: int = DEFAULT_BUDGET) -> list[dict]:
    """Left extensions of each image prefix inside the image language."""
    out = []
    for p in prefixes:
        p = tuple(p)
        lang = image_language(rule, tau, len(p) + 1, budget)
        letters = sorted({w[0] for w in lang if w[1:] == p})
        out.append({"prefix": list(p), "length": len(p), "degree": len(letters), "letters": letters})
    return out


# the worked example of a one-sided non-conjugacy

EXAMPLE15 = Substitution.from_dict({"a": "aabaa", "b": "abcab", "c": "aabac"})

EXAMPLE15_RULE_TEXT = """radius: 1 1
aaa -> α
baa -> α
aca -> α
aba -> β
caa -> γ
aab -> d
abc -> e
bca -> f
cab -> g
bac -> h
"""


def example15_rule() -> LocalRule:
    return parse_rule(EXAMPLE15_RULE_TEXT, EXAMPLE15)


# generator families

def rank_one(ns: Sequence[int], ms: Sequence[int]) -> Substitution:
    """tau(0) = 0^n1 1^m1 ... 0^nk, tau(1) = 1."""
    ns, ms = list(ns), list(ms)
    if not ns or len(ms) != len(ns) - 1:
        raise InvalidInput("need k exponents n and k-1 exponents m")
    if any(x <= 0 for x in ns + ms):
        raise InvalidInput("block exponents must be positive")
    img: list[int] = []
    for i, n in enumerate(ns):
        img += [0] * n
        if i < len(ms):
            img += [1] * ms[i]
    return Substitution(("0", "1"), (tuple(img), (1,)))


def perron_construct(d: int, lam: int, m: int) -> Substitution:
    """The d-letter word family with row sums lam^(2m).

    With L = lam^m, tau'(i) = 1^L 2^L ... (d-1)^L (d+1-i)^((L-d)L) d^L.
    """
    if d < 2 or lam < 1 or m < 1:
        raise InvalidInput("need d >= 2, lambda >= 1, m >= 1")
    L = lam ** m
    if (L - d) * L <= 0:
        raise InvalidInput(f"exponent (lambda^m - d) lambda^m = {(L - d) * L} is not positive")
    symbols = tuple(str(i) for i in range(1, d + 1))
    head = tuple(c for c in range(d - 1) for _ in range(L))
    images = []
    for i in range(1, d + 1):
        images.append(head + (d - i,) * ((L - d) * L) + (d - 1,) * L)
    return Substitution(symbols, tuple(images))
