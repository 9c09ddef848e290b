"""Brute-force oracles, written independently of the library's algorithms."""
from itertools import product


def apply(images, w):
    out = []
    for c in w:
        out.extend(images[c])
    return tuple(out)


def iterate(images, w, n):
    w = tuple(w)
    for _ in range(n):
        w = apply(images, w)
    return w


def factors(w, ell):
    return {tuple(w[i:i + ell]) for i in range(len(w) - ell + 1)}


def brute_language(images, ell, min_len=4000, max_len=200000):
    """Length-ell factors of tau^n(a) over all letters, n grown until stable."""
    k = len(images)
    prev = None
    stable = 0
    n = 1
    while True:
        words = [iterate(images, (a,), n) for a in range(k)]
        cur = set().union(*(factors(w, ell) for w in words))
        if cur == prev and min(len(w) for w in words) >= min_len:
            stable += 1
            if stable >= 2:
                return cur
        else:
            stable = 0
        prev = cur
        n += 1
        if max(len(w) for w in words) > max_len:
            return cur


def left_extensions(images, prefix, ell=None):
    ell = len(prefix) + 1
    lang = brute_language(images, ell)
    return sorted(a for a in range(len(images)) if (a,) + tuple(prefix) in lang)


def occurrences_split(word, base):
    base = tuple(base)
    occ = [i for i in range(len(word) - len(base) + 1) if tuple(word[i:i + len(base)]) == base]
    return [tuple(word[i:j]) for i, j in zip(occ, occ[1:])]


def all_paths(images, n):
    """Paths v0 -> level n in the stationary diagram, as (vertices, orders)."""
    k = len(images)
    paths = [((a,), (1,)) for a in range(k)]
    for _ in range(n - 1):
        nxt = []
        for top in range(k):
            for i, src in enumerate(images[top]):
                for vs, os in paths:
                    if vs[-1] == src:
                        nxt.append((vs + (top,), os + (i + 1,)))
        paths = nxt
    return paths


def desubstitutions(images, w, max_x=None):
    """(k, x) with w = tau(x)[k:k+|w|], minimal x, by enumeration over all x."""
    w = tuple(w)
    k = len(images)
    max_x = max_x or len(w) + 1
    out = set()
    for m in range(1, max_x + 1):
        for x in product(range(k), repeat=m):
            img = apply(images, x)
            first = len(images[x[0]])
            for off in range(first):
                if tuple(img[off:off + len(w)]) == w and off + len(w) > len(img) - len(images[x[-1]]):
                    out.add((off, x))
    return out
