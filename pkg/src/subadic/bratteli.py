"""Ordered Bratteli diagrams and the Vershik successor on path truncations.

A level is stored as, for every range vertex, the tuple of its incoming
edges' sources listed by order index (position i holds the edge of order
i+1).  That makes gaps in the order impossible by construction.  A diagram is
a finite prefix of levels followed by an optional cycle of levels repeated
forever (stationary diagrams have a one-level cycle).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import GateError, InvalidInput
from .words import DEFAULT_BUDGET, LimitWord, Substitution, Word, fixed_point


@dataclass(frozen=True)
class EdgeLevel:
    sources: tuple[str, ...]
    ranges: tuple[str, ...]
    incoming: tuple[tuple[int, ...], ...]       # incoming[a] = sources ordered 1..k
    labels: tuple[tuple[str, ...], ...] | None = None   # level 1 only: emitted symbols

    def __post_init__(self):
        if len(self.incoming) != len(self.ranges):
            raise InvalidInput("one incoming list per range vertex")
        for a, inc in enumerate(self.incoming):
            if not inc:
                raise InvalidInput(f"vertex {self.ranges[a]} has no incoming edge")
            if any(not 0 <= b < len(self.sources) for b in inc):
                raise InvalidInput("edge source outside the previous level")
        if self.labels is not None and [len(x) for x in self.labels] != [len(x) for x in self.incoming]:
            raise InvalidInput("labels must match incoming edges")

    def edges(self) -> list[tuple[str, str, int]]:
        return [(self.sources[b], self.ranges[a], i + 1)
                for a, inc in enumerate(self.incoming) for i, b in enumerate(inc)]


@dataclass(frozen=True)
class OrderedBratteli:
    prefix: tuple[EdgeLevel, ...]
    cycle: tuple[EdgeLevel, ...] = ()
    stationary: Substitution | None = None

    def __post_init__(self):
        seq = list(self.prefix) + list(self.cycle) + list(self.cycle[:1])
        if not seq:
            raise InvalidInput("a diagram needs at least one level")
        if seq[0].sources != ("v0",):
            raise InvalidInput("level 1 must start at v0")
        for lo, hi in zip(seq, seq[1:]):
            if lo.ranges != hi.sources:
                raise InvalidInput("consecutive levels do not share vertices")

    @property
    def depth(self) -> int | None:
        return None if self.cycle else len(self.prefix)

    def level(self, n: int) -> EdgeLevel:
        if n < 1:
            raise IndexError(n)
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if not self.cycle:
            raise IndexError(f"diagram has only {len(self.prefix)} levels")
        return self.cycle[(n - 1 - len(self.prefix)) % len(self.cycle)]

    def vertices(self, n: int) -> tuple[str, ...]:
        return ("v0",) if n == 0 else self.level(n).ranges

    def indegree(self, n: int, a: int) -> int:
        return len(self.level(n).incoming[a])

    def path_count(self, n: int) -> list[int]:
        """Number of paths from v0 to each vertex of level n."""
        counts = [1]
        for k in range(1, n + 1):
            lev = self.level(k)
            counts = [sum(counts[b] for b in inc) for inc in lev.incoming]
        return counts


def from_substitution(tau: Substitution) -> OrderedBratteli:
    names = tau.symbols
    level1 = EdgeLevel(("v0",), names, tuple((0,) for _ in names), tuple((s,) for s in names))
    body = EdgeLevel(names, names, tau.images)
    return OrderedBratteli((level1,), (body,), tau)


def from_tower(psi: Sequence[Word], symbols: Sequence[str], rho: Substitution) -> OrderedBratteli:
    """Level 1 has |psi(j)| edges into j (labelled by psi(j)); the rest is rho."""
    names = rho.symbols
    level1 = EdgeLevel(("v0",), names, tuple((0,) * len(w) for w in psi),
                       tuple(tuple(symbols[c] for c in w) for w in psi))
    body = EdgeLevel(names, names, rho.images)
    return OrderedBratteli((level1,), (body,), rho)


def add_tower_edges(B: OrderedBratteli, heights: dict[str, int],
                    labels: dict[str, Sequence[str]] | None = None) -> tuple[OrderedBratteli, int]:
    """Give vertex a of level 1 exactly heights[a] incoming edges from v0.

    Returns the new diagram and the number of edges added (negative if removed).
    """
    lev = B.level(1)
    unknown = set(heights) - set(lev.ranges)
    if unknown:
        raise InvalidInput(f"heights name vertices not on level 1: {sorted(unknown)}")
    if any(h < 1 for h in heights.values()):
        raise InvalidInput("heights must be positive")
    if not heights:
        return B, 0
    inc, labs, added = [], [], 0
    for a, name in enumerate(lev.ranges):
        h = heights.get(name, len(lev.incoming[a]))
        added += h - len(lev.incoming[a])
        inc.append((0,) * h)
        if labels and name in labels:
            labs.append(tuple(labels[name]))
        elif lev.labels is not None and h == len(lev.incoming[a]):
            labs.append(lev.labels[a])
        else:
            labs.append(None)
    lab = None if any(x is None for x in labs) else tuple(labs)
    new1 = EdgeLevel(("v0",), lev.ranges, tuple(inc), lab)
    prefix = (new1,) + B.prefix[1:] if B.prefix else (new1,)
    cycle = B.cycle
    if not B.prefix:
        raise InvalidInput("level 1 must be part of the prefix")
    return OrderedBratteli(prefix, cycle, None), added


def _compose(lo: EdgeLevel, hi: EdgeLevel) -> EdgeLevel:
    """Paths through two consecutive levels, top edge most significant."""
    inc, labs = [], []
    for a, top in enumerate(hi.incoming):
        inc.append(tuple(c for b in top for c in lo.incoming[b]))
        if lo.labels is not None:
            labs.append(tuple(x for b in top for x in lo.labels[b]))
    return EdgeLevel(lo.sources, hi.ranges, tuple(inc), tuple(labs) if lo.labels is not None else None)


def _compose_range(B: OrderedBratteli, lo: int, hi: int) -> EdgeLevel:
    lev = B.level(lo + 1)
    for k in range(lo + 2, hi + 1):
        lev = _compose(lev, B.level(k))
    return lev


def telescope(B: OrderedBratteli, level_indices: Sequence[int], step: int | None = None) -> OrderedBratteli:
    """Keep levels n_0=0 < n_1 < ... ; with step, continue n_k + step, ... periodically."""
    idx = list(level_indices)
    if not idx or idx[0] != 0:
        idx = [0] + idx
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InvalidInput("level indices must be strictly increasing")
    if B.depth is not None and idx[-1] > B.depth:
        raise InvalidInput("level index beyond the diagram")
    prefix = tuple(_compose_range(B, a, b) for a, b in zip(idx, idx[1:]))
    cycle: tuple[EdgeLevel, ...] = ()
    if step is not None:
        if not B.cycle or idx[-1] < len(B.prefix) or step < 1 or step % len(B.cycle):
            raise InvalidInput("periodic telescoping needs a step that is a multiple of the cycle")
        cycle = (_compose_range(B, idx[-1], idx[-1] + step),)
    return OrderedBratteli(prefix, cycle, None)


def split(B: OrderedBratteli, n: int) -> OrderedBratteli:
    """Insert a level between n-1 and n with one vertex per edge of E_n."""
    if n < 1 or (B.depth is not None and n > B.depth):
        raise InvalidInput("no such level")
    lev = B.level(n)
    names, lower_inc, lower_lab, upper_inc = [], [], [], []
    for a, inc in enumerate(lev.incoming):
        ups = []
        for i, b in enumerate(inc):
            ups.append(len(names))
            names.append(f"{lev.sources[b]}>{lev.ranges[a]}#{i + 1}")
            lower_inc.append((b,))
            if lev.labels is not None:
                lower_lab.append((lev.labels[a][i],))
        upper_inc.append(tuple(ups))
    lower = EdgeLevel(lev.sources, tuple(names), tuple(lower_inc),
                      tuple(lower_lab) if lev.labels is not None else None)
    upper = EdgeLevel(tuple(names), lev.ranges, tuple(upper_inc))
    if n <= len(B.prefix):
        prefix = B.prefix[:n - 1] + (lower, upper) + B.prefix[n:]
        return OrderedBratteli(prefix, B.cycle, None)
    # unroll the cycle up to level n, then continue with the rotated cycle
    levels = [B.level(k) for k in range(1, n)]
    r = (n - len(B.prefix)) % len(B.cycle)
    cycle = B.cycle[r:] + B.cycle[:r]
    return OrderedBratteli(tuple(levels) + (lower, upper), cycle, None)


def order_isomorphic(B1: OrderedBratteli, B2: OrderedBratteli, depth: int) -> bool:
    """Same ordered structure on levels 1..depth up to renaming vertices."""
    for n in range(1, depth + 1):
        a, b = B1.level(n), B2.level(n)
        if len(a.ranges) != len(b.ranges) or len(a.sources) != len(b.sources):
            return False
    # vertex bijections are forced level by level if names agree; fall back to names
    return all(B1.level(n).incoming == B2.level(n).incoming for n in range(1, depth + 1))


# extremal paths

def _extremal(B: OrderedBratteli, pick) -> list[dict]:
    if not B.cycle:
        raise InvalidInput("extremal infinite paths need an infinite diagram")
    c0 = len(B.prefix) + 1
    p = len(B.cycle)
    top = B.level(c0 + p - 1).ranges

    def down(a, hi, lo):
        """Vertex sequence from level hi down to level lo following pick."""
        seq = [a]
        for k in range(hi, lo, -1):
            a = pick(B.level(k).incoming[a])
            seq.append(a)
        return seq

    F = [down(a, c0 + p - 1, c0 - 1)[-1] for a in range(len(top))]
    out = []
    seen = set()
    for start in range(len(top)):
        x, orbit = start, []
        for _ in range(len(top)):
            x = F[x]
        # x is now periodic
        if x in seen:
            continue
        cyc = [x]
        y = F[x]
        while y != x:
            cyc.append(y)
            y = F[y]
        for v in cyc:
            seen.add(v)
        for v in cyc:
            # levels c0-1+p*r ... : rebuild one full period of the path going up from v
            r = len(cyc)
            chain = [v]
            w = v
            for _ in range(r - 1):
                w = next(u for u in cyc if F[u] == w)
                chain.append(w)
            tail = []
            for j, w in enumerate(chain[1:] + [chain[0]]):
                seg = down(w, c0 + p - 1, c0 - 1)[:-1]
                tail.extend(reversed(seg))
            bottom = list(reversed(down(v, c0 - 1, 0)))[1:] if c0 > 1 else []
            out.append({"bottom": bottom, "tail": tail, "period": p * r})
    return out


def extremal_paths(B: OrderedBratteli) -> dict:
    """Maximal and minimal infinite paths as eventually periodic vertex sequences."""
    mx = _extremal(B, lambda inc: inc[-1])
    mn = _extremal(B, lambda inc: inc[0])

    def named(paths):
        res = []
        for pth in paths:
            lv = 1
            bottom = [B.vertices(lv + i)[a] for i, a in enumerate(pth["bottom"])]
            start = len(pth["bottom"]) + 1
            tail = [B.vertices(start + i)[a] for i, a in enumerate(pth["tail"])]
            res.append({"bottom": bottom, "tail": tail, "period": pth["period"]})
        return res
    return {"max": named(mx), "min": named(mn), "max_count": len(mx), "min_count": len(mn),
            "semi_proper": len(mn) == 1}


# truncations and the successor

@dataclass(frozen=True)
class PathTruncation:
    vertices: tuple[int, ...]    # vertex index at levels 1..n
    orders: tuple[int, ...]      # order index (1-based) of e_1..e_n

    @property
    def depth(self) -> int:
        return len(self.vertices)

    def show(self, B: OrderedBratteli) -> str:
        return " ".join(f"{B.vertices(i + 1)[a]}:{o}" for i, (a, o) in enumerate(zip(self.vertices, self.orders)))


def is_path(B: OrderedBratteli, p: PathTruncation) -> bool:
    prev = 0
    for n, (a, o) in enumerate(zip(p.vertices, p.orders), start=1):
        lev = B.level(n)
        if not 0 <= a < len(lev.ranges) or not 1 <= o <= len(lev.incoming[a]):
            return False
        if lev.incoming[a][o - 1] != prev:
            return False
        prev = a
    return True


def minimal_truncation(B: OrderedBratteli, n: int, top: int) -> PathTruncation:
    verts = [top]
    a = top
    for k in range(n, 1, -1):
        a = B.level(k).incoming[a][0]
        verts.append(a)
    verts.reverse()
    return PathTruncation(tuple(verts), (1,) * n)


def successor(B: OrderedBratteli, p: PathTruncation) -> PathTruncation | None:
    """Increment the lowest non-maximal edge and reset below; None when all maximal."""
    for k in range(1, p.depth + 1):
        a = p.vertices[k - 1]
        o = p.orders[k - 1]
        inc = B.level(k).incoming[a]
        if o < len(inc):
            src = inc[o]
            if k == 1:
                low_v, low_o = (), ()
            else:
                low = minimal_truncation(B, k - 1, src)
                low_v, low_o = low.vertices, low.orders
            return PathTruncation(low_v + p.vertices[k - 1:],
                                  low_o + (o + 1,) + p.orders[k:])
    return None


def truncations(B: OrderedBratteli, n: int) -> Iterator[PathTruncation]:
    """All paths v0 -> level n, by exhaustive search."""
    def rec(k, a, verts, orders):
        if k == 0:
            yield PathTruncation(tuple(reversed(verts)), tuple(reversed(orders)))
            return
        for i, b in enumerate(B.level(k).incoming[a]):
            if k == 1 or True:
                yield from rec(k - 1, b, verts + [b] if k > 1 else verts, orders + [i + 1])
    for top in range(len(B.vertices(n))):
        yield from rec(n, top, [top], [])


def vershik_orbit(B: OrderedBratteli, n: int) -> list[PathTruncation]:
    """Successor orbits from the minimal truncation into each top vertex."""
    out = []
    for top in range(len(B.vertices(n))):
        p = minimal_truncation(B, n, top)
        while p is not None:
            out.append(p)
            p = successor(B, p)
    return out


# DOT and JSON

def to_dot(B: OrderedBratteli, depth: int, name: str = "bratteli") -> str:
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=circle];", '  L0_v0 [label="v0"];']
    for n in range(1, depth + 1):
        names = B.vertices(n)
        lines.append("  { rank=same; " + " ".join(f"L{n}_{v};" for v in names) + " }")
        for v in names:
            lines.append(f'  L{n}_{v} [label="{v}"];')
    for n in range(1, depth + 1):
        lev = B.level(n)
        for src, rng, order in lev.edges():
            lines.append(f'  L{n - 1}_{src} -> L{n}_{rng} [label="{order}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(B: OrderedBratteli, depth: int) -> dict:
    return {
        "levels": [list(B.vertices(n)) for n in range(depth + 1)],
        "edges": [[{"source": s, "range": r, "order": o} for s, r, o in B.level(n).edges()]
                  for n in range(1, depth + 1)],
        "stationary": B.stationary.to_text() if B.stationary else None,
    }


# conjugacy harness

class _Hierarchy:
    """Nested block structure of x = phi_1(rho^{D-1}(z)) for a rho-fixed z."""

    def __init__(self, phi1: Sequence[Word], rho: Substitution, z: LimitWord, D: int, T: int,
                 budget: int):
        lens1 = [len(w) for w in phi1]
        m = 1
        while True:
            top = z.prefix(m, budget)
            words = [top]
            for _ in range(D - 1):
                words.append(rho.apply(words[-1]))
            if sum(lens1[c] for c in words[-1]) >= T or m > budget:
                break
            m *= 2
        words.reverse()       # words[0] = level-1 word, words[D-1] = top word
        self.words = words
        self.parents = []
        blocks = [phi1] + [rho.images] * (D - 1)
        for j in range(D):
            par_idx, par_off = [], []
            for i, c in enumerate(words[j]):
                for off in range(len(blocks[j][c])):
                    par_idx.append(i)
                    par_off.append(off)
            self.parents.append((par_idx, par_off))
        self.length = len(self.parents[0][0])
        self.D = D

    def coords(self, t: int) -> PathTruncation:
        verts, orders = [], []
        pos = t
        for j in range(self.D):
            idx, off = self.parents[j]
            i, o = idx[pos], off[pos]
            verts.append(self.words[j][i])
            orders.append(o + 1)
            pos = i
        return PathTruncation(tuple(verts), tuple(orders))


def _truncate(p: PathTruncation, n: int) -> PathTruncation:
    return PathTruncation(p.vertices[:n], p.orders[:n])


def conjugacy_check(B: OrderedBratteli, rho: Substitution, z: LimitWord, depth: int, steps: int,
                    phi1: Sequence[Word] | None = None, window_decoder=None,
                    budget: int = DEFAULT_BUDGET, extra: int = 6) -> dict:
    """Replay the orbit of x = phi1(z) and compare F∘σ with V_B∘F at depth.

    F is read off the nested block decomposition of x (the hierarchy of
    desubstitutions of the generating point).  Successors that carry past the
    checked depth are resolved on a deeper truncation.
    """
    if phi1 is None:
        phi1 = [(a,) for a in rho.letters]
    D = depth + extra
    H = _Hierarchy(phi1, rho, z, D, steps + 2, budget)
    if H.length < steps + 2:
        raise GateError("orbit prefix too short for the requested steps")
    report = {"depth": depth, "steps": steps, "disagreements": [], "unresolved": 0,
              "invalid_paths": 0, "window_checked": 0, "window_agree": 0, "window_inconclusive": 0}
    first = H.coords(0)
    report["start_is_minimal"] = _truncate(first, depth) == minimal_truncation(B, depth, first.vertices[depth - 1])
    prev = first
    for t in range(steps):
        nxt = H.coords(t + 1)
        if not is_path(B, prev):
            report["invalid_paths"] += 1
            if len(report["disagreements"]) < 5:
                report["disagreements"].append({"t": t, "kind": "not a path", "F": prev.show(B)})
        else:
            s = successor(B, prev)
            if s is None:
                report["unresolved"] += 1
            elif _truncate(s, depth) != _truncate(nxt, depth):
                if len(report["disagreements"]) < 5:
                    report["disagreements"].append({"t": t, "V(F(x))": _truncate(s, depth).show(B),
                                                    "F(σx)": _truncate(nxt, depth).show(B)})
                report.setdefault("count", 0)
                report["count"] += 1
        if window_decoder is not None:
            report["window_checked"] += 1
            try:
                wc = window_decoder(t)
            except InvalidInput:
                report["window_inconclusive"] += 1
            else:
                if wc == _truncate(prev, len(wc.vertices)):
                    report["window_agree"] += 1
                elif len(report["disagreements"]) < 5:
                    report["disagreements"].append({"t": t, "kind": "window decoding differs"})
                    report.setdefault("count", 0)
                    report["count"] += 1
        prev = nxt
    report["commutes"] = not report.get("count") and not report["invalid_paths"] and not report["unresolved"]
    report.pop("count", None)
    return report


def window_coordinates(decoder, x: bytes, depth: int, rho: Substitution) -> PathTruncation:
    """F(x) at depth from the future of x only, by repeated cut decoding."""
    verts, orders = [x[0]], [1]
    cur = x
    for _ in range(depth - 1):
        cut, letters = decoder.decode(cur)
        a = letters[0]
        off = 0 if cut == 0 else len(rho.images[a]) - cut
        verts.append(a)
        orders.append(off + 1)
        cur = bytes(letters)
    # orders[k] is the order of the edge into verts[k] at level k+1
    return PathTruncation(tuple(verts), (1,) + tuple(orders[1:]))


def stationary_check(tau: Substitution, depth: int, steps: int, budget: int = DEFAULT_BUDGET,
                     with_window: bool = True) -> dict:
    """conjugacy_check for from_substitution(tau) on the orbit of its fixed point."""
    from .recognition import Decoder
    z = fixed_point(tau)
    if z.power != 1:
        raise GateError("the generating point is not tau-fixed")
    B = from_substitution(tau)
    dec = None
    if with_window:
        try:
            d = Decoder(tau, z, budget=budget)
            maxlen = max(len(i) for i in tau.images)
            W = min(8 * d.L * maxlen ** depth, 1 << 16)
            pre = z.prefix_bytes(steps + W + 1, max(budget, steps + W + 1))
            dec = lambda t: window_coordinates(d, pre[t:t + W], depth, tau)
        except Exception:
            dec = None
    rep = conjugacy_check(B, tau, z, depth, steps, window_decoder=dec, budget=budget)
    rep["substitution"] = str(tau)
    return rep
