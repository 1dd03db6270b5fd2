"""Slow reference implementations, written from the definitions and sharing no
code paths with the package (no bit reversal tables, no transforms, no grids)."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def rademacher(k: int, M: int) -> np.ndarray:
    """``r_k(x) = (-1)^(k-th binary digit of x)``, digits counted from 1, per cell."""
    x = [Fraction(i, 2**M) + Fraction(1, 2 ** (M + 1)) for i in range(2**M)]
    return np.array([-1.0 if int(v * 2**k) % 2 else 1.0 for v in x])


def walsh(n: int, M: int) -> np.ndarray:
    """Paley ordering: product of ``r_{i+1}`` over the set bits ``i`` of ``n``."""
    out = np.ones(2**M)
    i = 0
    while n:
        if n & 1:
            out = out * rademacher(i + 1, M)
        n >>= 1
        i += 1
    return out


def walsh_matrix(M: int) -> np.ndarray:
    return np.array([walsh(n, M) for n in range(2**M)])


def naive_fwht(f: np.ndarray) -> np.ndarray:
    M = int(np.log2(f.size))
    return walsh_matrix(M) @ f / f.size


def naive_partial_sum(f: np.ndarray, n: int) -> np.ndarray:
    M = int(np.log2(f.size))
    out = np.zeros(f.size)
    for m in range(n):
        w = walsh(m, M)
        out += np.mean(f * w) * w
    return out


def naive_carleson(f: np.ndarray) -> np.ndarray:
    return np.max(np.abs([naive_partial_sum(f, n) for n in range(f.size + 1)]), axis=0)


# ---------------------------------------------------------------- intervals


def time_interval(scale: int, index: int) -> tuple[Fraction, Fraction]:
    length = Fraction(2) ** scale
    return index * length, (index + 1) * length


def bitile_rect(s) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    j, k, n = s
    I = time_interval(j, k)
    width = 2 / (I[1] - I[0])
    return I, (n * width, (n + 1) * width)


def subset(a, b) -> bool:
    return b[0] <= a[0] and a[1] <= b[1]


def brute_leq(a, b) -> bool:
    Ia, wa = bitile_rect(a)
    Ib, wb = bitile_rect(b)
    return subset(Ia, Ib) and subset(wb, wa)


def all_bitiles(M: int) -> list[tuple[int, int, int]]:
    """Every bitile whose packets live at resolution ``M``; frequencies below ``2^M``
    except the single top-frequency bitile at the finest scale."""
    out = []
    for L in range(M + 1):
        for k in range(2**L):
            count = 2 ** (M - L - 1) if L < M else 1
            for n in range(count):
                out.append((-L, k, n))
    return out


def brute_hull(S, M: int) -> set:
    S = list(S)
    return {
        c
        for c in all_bitiles(M)
        if any(brute_leq(a, c) for a in S) and any(brute_leq(c, b) for b in S)
    }


def brute_maximal_intervals(E: np.ndarray) -> list[tuple[int, int]]:
    """``(scale, index)`` of maximal dyadic intervals inside ``E``."""
    M = int(np.log2(E.size))
    inside = []
    for L in range(M + 1):
        w = 2 ** (M - L)
        for k in range(2**L):
            if E[k * w : (k + 1) * w].all():
                inside.append((-L, k))
    out = []
    for a in inside:
        Ia = time_interval(*a)
        if not any(b != a and subset(Ia, time_interval(*b)) for b in inside):
            out.append(a)
    return sorted(out, key=lambda a: time_interval(*a)[0])


def brute_dyadic_maximal(f: np.ndarray, p: float = 1.0) -> np.ndarray:
    M = int(np.log2(f.size))
    out = np.zeros(f.size)
    for x in range(f.size):
        best = 0.0
        for L in range(M + 1):
            w = 2 ** (M - L)
            k = x // w
            best = max(best, np.mean(np.abs(f[k * w : (k + 1) * w]) ** p) ** (1 / p))
        out[x] = best
    return out


def brute_weak_norm(g: np.ndarray, p: float) -> float:
    """``sup_λ λ |{|g| > λ}|^(1/p)`` over a fine λ grid and just below each value."""
    a = np.abs(g)
    lams = np.concatenate([np.linspace(0, a.max(), 2001), a * (1 - 1e-13)])
    return max(lam * np.mean(a > lam) ** (1 / p) for lam in lams)


# ------------------------------------------------------------- wave packets


def packet(t, M: int) -> np.ndarray:
    """``w_t`` for ``t = (scale, index, n)`` built from ``walsh`` at the local resolution."""
    j, k, n = t
    L = -j
    out = np.zeros(2**M)
    w = 2 ** (M - L)
    out[k * w : (k + 1) * w] = 2 ** (L / 2) * walsh(n, M - L)
    return out


def freq_in(N: int, interval) -> bool:
    return interval[0] <= N < interval[1]


def brute_model_sum(S, eps, N, f) -> np.ndarray:
    M = int(np.log2(f.size))
    out = np.zeros(f.size)
    for s in S:
        j, k, n = s
        e = 1 if eps is None else eps.get(s, 0)
        if e == 0:
            continue
        I, om = bitile_rect(s)
        upper = ((om[0] + om[1]) / 2, om[1])
        w1 = packet((j, k, 2 * n), M)
        c = np.mean(f * w1)
        for x in range(f.size):
            if freq_in(int(N[x]), upper):
                out[x] += e * c * w1[x]
    return out


def brute_density(s, G, N) -> float:
    M = int(np.log2(G.size))
    I, om = bitile_rect(s)
    upper = ((om[0] + om[1]) / 2, om[1])
    cells = [x for x in range(G.size) if I[0] <= Fraction(x, 2**M) < I[1]]
    hit = sum(1 for x in cells if G[x] and freq_in(int(N[x]), upper))
    return hit / len(cells)


def brute_dense(S, G, N) -> dict:
    S = list(S)
    return {s: max(brute_density(t, G, N) for t in S if brute_leq(s, t)) for s in S}


def check_partition(trees, S) -> None:
    """Trees are disjoint, cover ``S``, sit below their tops, and no top lies
    below a tree built before it."""
    seen = set()
    for t in trees:
        members = set(map(tuple, t.members))
        assert not members & seen, "trees overlap"
        seen |= members
        assert all(brute_leq(m, tuple(t.top)) for m in members)
    assert seen == set(map(tuple, S))
    for i, t in enumerate(trees):
        for u in trees[:i]:
            assert not brute_leq(tuple(t.top), tuple(u.top)), "top not maximal"


def cz_tile_freqs(forest_members, I: tuple[int, int]) -> set[int]:
    """Frequencies ``n`` of tiles over ``I`` whose frequency interval contains
    ``omega_{s1}`` for some forest bitile with ``I`` strictly inside ``I_s``."""
    IJ = time_interval(*I)
    width = 1 / (IJ[1] - IJ[0])
    out = set()
    for s in forest_members:
        Is, om = bitile_rect(s)
        if subset(IJ, Is) and IJ != Is:
            lower_start = om[0]
            out.add(int(lower_start // width))
    return out


def subsets(seq, max_size):
    for r in range(max_size + 1):
        yield from itertools.combinations(seq, r)
