"""Finite words, substitutions and the limit words they define.

Letters are small integers 0..n-1; a word is a tuple of letters.  The display
symbols only matter at parse/print time.  Hot loops convert words to ``bytes``
(alphabets are tiny) so that slicing and ``find`` run in C.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, GateError, InvalidInput

Word = tuple[int, ...]

DEFAULT_BUDGET = 10**6


def common_suffix(words: Sequence[Sequence[int]]) -> Word:
    if not words:
        return ()
    n = min(len(w) for w in words)
    k = 0
    while k < n and len({w[len(w) - 1 - k] for w in words}) == 1:
        k += 1
    first = words[0]
    return tuple(first[len(first) - k:])


def common_prefix_len(v: Sequence[int], w: Sequence[int]) -> int:
    n = min(len(v), len(w))
    i = 0
    while i < n and v[i] == w[i]:
        i += 1
    return i


def _tokens(text, index) -> list:
    """Split on whitespace if present; a lone declared symbol is one token; else characters."""
    if not isinstance(text, str):
        return list(text)
    text = text.strip()
    if any(ch.isspace() for ch in text):
        return text.split()
    if text in index:
        return [text]
    return list(text)


@dataclass(frozen=True)
class Substitution:
    symbols: tuple[str, ...]
    images: tuple[Word, ...]

    def __post_init__(self):
        n = len(self.symbols)
        if n == 0:
            raise InvalidInput("empty alphabet")
        if len(set(self.symbols)) != n:
            raise InvalidInput("display symbols must be distinct")
        if len(self.images) != n:
            raise InvalidInput("need exactly one image per letter")
        if n > 255:
            raise InvalidInput("alphabets above 255 letters are not supported")
        for a, img in enumerate(self.images):
            if not img:
                raise InvalidInput(f"image of {self.symbols[a]} is empty")
            if any(not 0 <= c < n for c in img):
                raise InvalidInput(f"image of {self.symbols[a]} uses a foreign letter")

    # construction helpers
    @classmethod
    def from_dict(cls, images: dict[str, str | Sequence[str]], symbols: Sequence[str] | None = None):
        syms = tuple(symbols) if symbols is not None else tuple(images)
        index = {s: i for i, s in enumerate(syms)}
        imgs = []
        for s in syms:
            if s not in images:
                raise InvalidInput(f"no image for {s}")
            img = images[s]
            toks = _tokens(img, index)
            try:
                imgs.append(tuple(index[t] for t in toks))
            except KeyError as e:
                raise InvalidInput(f"foreign symbol {e.args[0]!r} in image of {s}") from None
        return cls(syms, tuple(imgs))

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def letters(self) -> range:
        return range(len(self.symbols))

    # words <-> text
    def word(self, text: str | Sequence[str]) -> Word:
        index = {s: i for i, s in enumerate(self.symbols)}
        toks = _tokens(text, index)
        try:
            return tuple(index[t] for t in toks)
        except KeyError as e:
            raise InvalidInput(f"foreign symbol {e.args[0]!r}") from None

    def show(self, w: Iterable[int]) -> str:
        sep = " " if any(len(s) != 1 for s in self.symbols) else ""
        return sep.join(self.symbols[c] for c in w)

    # morphism
    def apply(self, w: Iterable[int]) -> Word:
        out: list[int] = []
        imgs = self.images
        try:
            for c in w:
                if c < 0:
                    raise IndexError
                out.extend(imgs[c])
        except (IndexError, TypeError):
            raise InvalidInput("word contains a letter outside the alphabet") from None
        return tuple(out)

    def iterate(self, a: int, n: int, budget: int = DEFAULT_BUDGET) -> Word:
        if n < 0:
            raise InvalidInput("negative iterate")
        if max(length_vector(self, n)[a], 1) > budget:
            raise BudgetExceeded(f"|tau^{n}({self.symbols[a]})| exceeds budget {budget}")
        w: Word = (a,)
        for _ in range(n):
            w = self.apply(w)
        return w

    def iterate_word(self, w: Sequence[int], n: int, budget: int = DEFAULT_BUDGET) -> Word:
        lens = length_vector(self, n)
        if sum(lens[c] for c in w) > budget:
            raise BudgetExceeded(f"tau^{n} image exceeds budget {budget}")
        w = tuple(w)
        for _ in range(n):
            w = self.apply(w)
        return w

    def power(self, k: int) -> "Substitution":
        if k < 1:
            raise InvalidInput("power must be positive")
        return Substitution(self.symbols, tuple(self.iterate(a, k) for a in self.letters))

    def then(self, other: "Substitution") -> "Substitution":
        """The composition other∘self."""
        return Substitution(self.symbols, tuple(other.apply(img) for img in self.images))

    def matrix(self) -> list[list[int]]:
        """M[a][b] = number of b in tau(a) (row a)."""
        n = self.size
        m = [[0] * n for _ in range(n)]
        for a, img in enumerate(self.images):
            for b in img:
                m[a][b] += 1
        return m

    def bytes_images(self) -> tuple[bytes, ...]:
        return tuple(bytes(img) for img in self.images)

    def to_text(self) -> str:
        lines = ["alphabet: " + " ".join(self.symbols)]
        for a in self.letters:
            lines.append(f"{self.symbols[a]} -> {self.show(self.images[a])}")
        return "\n".join(lines) + "\n"

    def __str__(self):
        return ", ".join(f"{self.symbols[a]}->{self.show(self.images[a])}" for a in self.letters)


def parse_substitution(text: str) -> Substitution:
    """Read the ``alphabet: ...`` / ``a -> image`` format."""
    symbols = None
    images: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet:"):
            if symbols is not None:
                raise InvalidInput("alphabet declared twice")
            symbols = line[len("alphabet:"):].split()
            continue
        if "->" not in line:
            raise InvalidInput(f"cannot parse line {raw!r}")
        lhs, rhs = (p.strip() for p in line.split("->", 1))
        if not lhs or not rhs:
            raise InvalidInput(f"cannot parse line {raw!r}")
        if lhs in images:
            raise InvalidInput(f"letter {lhs} has two images")
        images[lhs] = rhs
    if symbols is None:
        if not images:
            raise InvalidInput("no substitution found")
        symbols = list(images)
    missing = [s for s in symbols if s not in images]
    if missing:
        raise InvalidInput(f"no image for {missing}")
    extra = [s for s in images if s not in symbols]
    if extra:
        raise InvalidInput(f"image given for undeclared letter(s) {extra}")
    return Substitution.from_dict(images, symbols)


def load_substitution(path: str) -> Substitution:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_substitution(fh.read())
    except OSError as e:
        raise InvalidInput(f"cannot read {path}: {e.strerror}") from None


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def matrix_power(m, k):
    n = len(m)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = m
    while k:
        if k & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        k >>= 1
    return result


@lru_cache(maxsize=4096)
def length_vector(tau: Substitution, n: int) -> tuple[int, ...]:
    """|tau^n(a)| for every letter a, via the composition matrix."""
    m = matrix_power(tau.matrix(), n)
    return tuple(sum(row) for row in m)


# functional graphs

def _cycles(f: Sequence[int]) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for start in range(len(f)):
        path, pos = [], {}
        x = start
        while x not in seen and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = f[x]
        if x in pos:
            out.append(tuple(path[pos[x]:]))
        seen.update(path)
    return out


@dataclass(frozen=True)
class FunctionalGraph:
    f: tuple[int, ...]

    def cycles(self) -> list[tuple[int, ...]]:
        return _cycles(self.f)

    def cycle_letters(self) -> frozenset[int]:
        return frozenset(x for c in self.cycles() for x in c)


def suffix_graph(tau: Substitution) -> FunctionalGraph:
    return FunctionalGraph(tuple(img[-1] for img in tau.images))


def prefix_graph(tau: Substitution) -> FunctionalGraph:
    return FunctionalGraph(tuple(img[0] for img in tau.images))


def growing_letters(tau: Substitution) -> frozenset[int]:
    n = tau.size
    lo, hi = length_vector(tau, n), length_vector(tau, 2 * n)
    return frozenset(a for a in tau.letters if hi[a] > lo[a])


@dataclass(frozen=True)
class Seed:
    letter: int
    period: int
    growing: bool


def fixed_seeds(tau: Substitution) -> list[Seed]:
    """One seed per prefix-map cycle: l with l a prefix of tau^q(l)."""
    grow = growing_letters(tau)
    out = []
    for cyc in prefix_graph(tau).cycles():
        for l in sorted(cyc):
            out.append(Seed(l, len(cyc), l in grow))
    return sorted(out, key=lambda s: s.letter)


def generating_seed(tau: Substitution) -> Seed:
    """The growing seed used as u: period 1 preferred, then smallest letter."""
    cands = [s for s in fixed_seeds(tau) if s.growing]
    if not cands:
        raise GateError("no generating fixed point: every prefix-cycle letter has bounded iterates")
    return min(cands, key=lambda s: (s.period, s.letter))


# limit words

class LimitWord:
    """A lazily expanded infinite word.

    kind "fixed": y = lim tau^{p n}(seed), seed a prefix of tau^p(seed).
    kind "lead":  y = seed . tau^p(y).
    """

    __slots__ = ("tau", "seed", "power", "kind", "_imgs", "_cache")

    def __init__(self, tau: Substitution, seed: Sequence[int], power: int = 1, kind: str = "lead"):
        seed = tuple(seed)
        if not seed:
            raise InvalidInput("limit word seed must be nonempty")
        if power < 1:
            raise InvalidInput("limit word power must be positive")
        if kind not in ("fixed", "lead"):
            raise InvalidInput(f"unknown limit word kind {kind}")
        self.tau, self.seed, self.power, self.kind = tau, seed, power, kind
        self._imgs = tau.power(power).bytes_images() if power > 1 else tau.bytes_images()
        self._cache = bytes(seed)
        nxt = self._step(len(seed) * 2 + 1)
        if nxt[: len(seed)] != self._cache:
            raise InvalidInput("seed is not consistent with its defining equation")

    @classmethod
    def fixed_point(cls, tau: Substitution, letter: int, period: int = 1) -> "LimitWord":
        return cls(tau, (letter,), period, "fixed")

    def _step(self, n: int) -> bytes:
        imgs = self._imgs
        out = bytearray(bytes(self.seed) if self.kind == "lead" else b"")
        for c in self._cache:
            if len(out) >= n:
                break
            out += imgs[c]
        return bytes(out[:n])

    def prefix_bytes(self, n: int, budget: int = DEFAULT_BUDGET) -> bytes:
        if n > budget:
            raise BudgetExceeded(f"requested prefix {n} exceeds budget {budget}")
        while len(self._cache) < n:
            nxt = self._step(n)
            if len(nxt) <= len(self._cache):
                raise GateError("limit word does not grow (non-growing seed)")
            self._cache = nxt
        return self._cache[:n]

    def prefix(self, n: int, budget: int = DEFAULT_BUDGET) -> Word:
        return tuple(self.prefix_bytes(n, budget))

    def key(self):
        return (self.kind, self.seed, self.power, self.tau)

    def __eq__(self, other):
        return isinstance(other, LimitWord) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def describe(self) -> str:
        t = self.tau
        pw = "" if self.power == 1 else f"^{self.power}"
        if self.kind == "fixed":
            return f"lim tau^{self.power if self.power > 1 else ''}n({t.show(self.seed)})"
        return f"y = {t.show(self.seed)} tau{pw}(y)"

    def __repr__(self):
        return f"LimitWord({self.describe()})"


def fixed_point(tau: Substitution, seed: Seed | None = None) -> LimitWord:
    seed = seed or generating_seed(tau)
    return LimitWord.fixed_point(tau, seed.letter, seed.period)


# languages

@dataclass(frozen=True)
class LanguageTable:
    max_len: int
    levels: tuple[frozenset[bytes], ...]   # levels[k] = words of length k
    certified: bool
    method: str
    window: int = 0

    @property
    def words(self) -> frozenset[Word]:
        return frozenset(tuple(w) for lev in self.levels for w in lev if w)

    def of_length(self, k: int) -> list[Word]:
        return sorted(tuple(w) for w in self.levels[k])

    def __contains__(self, w) -> bool:
        w = bytes(w)
        if len(w) > self.max_len:
            raise InvalidInput(f"word longer than table bound {self.max_len}")
        return w in self.levels[len(w)]


def _levels_from_top(top: set[bytes], ell: int) -> tuple[frozenset[bytes], ...]:
    levels = [frozenset()] * (ell + 1)
    levels[ell] = frozenset(top)
    cur = set(top)
    for k in range(ell - 1, -1, -1):
        cur = {w[:k] for w in cur} | {w[1:] for w in cur}
        levels[k] = frozenset(cur)
    return tuple(levels)


@lru_cache(maxsize=256)
def language_closure(tau: Substitution, ell: int, budget: int = DEFAULT_BUDGET) -> LanguageTable:
    """Exact factors of length <= ell of the generating fixed point.

    Seeds with the ell-factors of tau^q(...)(u0) and closes under
    w -> ell-factors of tau^q(w); this set equals the language of u exactly.
    """
    if ell < 1:
        return LanguageTable(max(ell, 0), (frozenset([b""]),), True, "closure")
    seed = generating_seed(tau)
    u = LimitWord.fixed_point(tau, seed.letter, seed.period)
    imgs = tau.power(seed.period).bytes_images() if seed.period > 1 else tau.bytes_images()
    start = u.prefix_bytes(ell, budget)
    known = {start}
    stack = [start]
    work = 0
    while stack:
        w = stack.pop()
        img = b"".join(imgs[c] for c in w)
        work += len(img)
        if work > budget * 64:
            raise BudgetExceeded(f"language closure at length {ell} exceeded budget")
        for i in range(len(img) - ell + 1):
            f = img[i:i + ell]
            if f not in known:
                known.add(f)
                stack.append(f)
    return LanguageTable(ell, _levels_from_top(known, ell), True, "closure")


def language_scan(point: LimitWord, ell: int, budget: int = DEFAULT_BUDGET) -> LanguageTable:
    """Factors of a limit word, stabilized over doubling windows.

    Certified only in the window sense: two consecutive doublings add nothing
    and every word found recurs in the second half of the final window.
    """
    n = max(4 * ell, 256)
    prev = None
    while True:
        n = min(n, budget)
        pre = point.prefix_bytes(n, budget)
        found = {pre[i:i + ell] for i in range(len(pre) - ell + 1)}
        half = pre[len(pre) // 2:]
        recurs = all(half.find(w) >= 0 for w in found)
        if prev is not None and found == prev and recurs:
            return LanguageTable(ell, _levels_from_top(found, ell), True, "scan", n)
        if n >= budget:
            return LanguageTable(ell, _levels_from_top(found, ell), False, "scan", n)
        prev = found
        n *= 2


def language(tau: Substitution, ell: int, point: LimitWord | None = None,
             budget: int = DEFAULT_BUDGET) -> LanguageTable:
    if point is None:
        return language_closure(tau, ell, budget)
    table = language_scan(point, ell, budget)
    if not table.certified:
        raise BudgetExceeded(f"language of length {ell} did not stabilize within {budget} symbols")
    return table


def in_language(tau: Substitution, w: Sequence[int], budget: int = DEFAULT_BUDGET) -> bool:
    return bytes(w) in language_closure(tau, max(len(w), 1), budget).levels[len(w)] if w else True


# classification

def is_primitive(tau: Substitution) -> bool:
    n = tau.size
    b = [[1 if x else 0 for x in row] for row in tau.matrix()]
    p = b
    for _ in range((n - 1) ** 2 + 1):
        if all(all(row) for row in p):
            return True
        p = [[1 if any(p[i][k] and b[k][j] for k in range(n)) else 0 for j in range(n)] for i in range(n)]
    return all(all(row) for row in p)


def _stream(imgs: tuple[Word, ...], a: int, k: int) -> Iterator[int]:
    if k == 0:
        yield a
        return
    for c in imgs[a]:
        yield from _stream(imgs, c, k - 1)


_HASH_MODS = ((1 << 61) - 1, (1 << 89) - 1)
_HASH_BASE = 1_000_003


def _power_hashes(tau: Substitution, K: int) -> list[list[tuple[int, ...]]]:
    """Polynomial hashes of tau^k(a) for k = 0..K under two Mersenne moduli."""
    out = [[tuple(a + 1 for _ in _HASH_MODS) for a in tau.letters]]
    for k in range(1, K + 1):
        prev = out[-1]
        lens = length_vector(tau, k - 1)
        row = []
        for a in tau.letters:
            hs = []
            for m, P in enumerate(_HASH_MODS):
                h = 0
                for c in tau.images[a]:
                    h = (h * pow(_HASH_BASE, lens[c], P) + prev[c][m]) % P
                hs.append(h)
            row.append(tuple(hs))
        out.append(row)
    return out


def injective_up_to(tau: Substitution, K: int | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    """Check tau^k injective on letters for k = 1..K.

    Distinct hashes prove distinct images; a hash collision is confirmed by an
    exact streamed comparison before a witness is reported.
    """
    K = K if K is not None else 3 * tau.size
    hashes = _power_hashes(tau, K)
    for k in range(1, K + 1):
        lens = length_vector(tau, k)
        for a in tau.letters:
            for b in range(a + 1, tau.size):
                if lens[a] != lens[b] or hashes[k][a] != hashes[k][b]:
                    continue
                if lens[a] > budget:
                    return {"injective": None, "bound": K, "checked_up_to": k - 1,
                            "note": "hash collision too long to confirm within budget"}
                if all(x == y for x, y in zip(_stream(tau.images, a, k), _stream(tau.images, b, k))):
                    return {"injective": False, "bound": K, "checked_up_to": k,
                            "witness": {"power": k, "letters": [tau.symbols[a], tau.symbols[b]]}}
    return {"injective": True, "bound": K, "checked_up_to": K}


def reachable_letters(tau: Substitution, start: int) -> frozenset[int]:
    seen = {start}
    stack = [start]
    while stack:
        for c in tau.images[stack.pop()]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def minimal_verdict(tau: Substitution, ell: int = 6, window: int = 1 << 16,
                    budget: int = DEFAULT_BUDGET) -> dict:
    if is_primitive(tau):
        return {"verdict": "primitive-hence-minimal"}
    try:
        u = fixed_point(tau)
        n = min(window, budget)
        pre = u.prefix_bytes(n, budget)
    except (GateError, BudgetExceeded) as e:
        return {"verdict": "unknown", "reason": str(e)}
    worst = 0
    for k in range(1, ell + 1):
        for w in language_closure(tau, k, budget).levels[k]:
            pos, last = pre.find(w), 0
            if pos < 0:
                return {"verdict": "unknown", "reason": f"word {tau.show(w)} not seen in window {n}"}
            while pos >= 0:
                worst = max(worst, pos - last)
                last = pos
                pos = pre.find(w, pos + 1)
            worst = max(worst, n - last)
    if worst * 8 <= n:
        return {"verdict": "certified-almost-periodic-on-window", "word_length": ell,
                "window": n, "max_gap": worst}
    return {"verdict": "unknown", "reason": f"gap {worst} too large for window {n}"}


def classify(tau: Substitution, K: int | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    firsts = {img[0] for img in tau.images}
    lasts = {img[-1] for img in tau.images}
    grow = growing_letters(tau)
    report = {
        "left_proper": len(firsts) == 1,
        "right_proper": len(lasts) == 1,
        "primitive": is_primitive(tau),
        "growing_letters": [tau.symbols[a] for a in sorted(grow)],
        "injectivity": injective_up_to(tau, K, budget),
    }
    try:
        seed = generating_seed(tau)
        report["generating_seed"] = {"letter": tau.symbols[seed.letter], "period": seed.period}
        unreachable = set(tau.letters) - reachable_letters(tau, seed.letter)
        if unreachable:
            report["warning"] = "letters unreachable from u: " + " ".join(
                tau.symbols[a] for a in sorted(unreachable))
    except GateError as e:
        report["generating_seed"] = None
        report["warning"] = str(e)
    report["minimal"] = minimal_verdict(tau, budget=budget) if report["generating_seed"] else {
        "verdict": "unknown", "reason": "non-generating"}
    return report


def is_left_proper(tau: Substitution) -> bool:
    return len({img[0] for img in tau.images}) == 1


def is_right_proper(tau: Substitution) -> bool:
    return len({img[-1] for img in tau.images}) == 1
