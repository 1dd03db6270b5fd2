"""Phase-plane model sums, density and size functionals, trees and forests.

A choice function ``N`` is an integer array with one frequency per grid
cell, valued in ``[0, 2^M]``. A sign pattern is a mapping from bitiles to
``{-1, 0, +1}``; ``None`` means all ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dyadic import (
    Bitile,
    BitileCollection,
    ConvexityError,
    ResolutionError,
    fefferman_leq,
    freq_cap,
    is_convex,
    upward_reduce,
)
from .walsh import packet_coefficients, resolution, walsh_sign

SignPattern = Mapping[Bitile, int]


def check_choice(N: np.ndarray, M: int) -> np.ndarray:
    N = np.asarray(N)
    if N.shape != (1 << M,):
        raise ResolutionError(f"choice function has shape {N.shape}, expected ({1 << M},)")
    if not np.issubdtype(N.dtype, np.integer):
        raise TypeError("choice function must be integer valued")
    if N.size and (N.min() < 0 or N.max() > 1 << M):
        raise ResolutionError(f"choice function leaves [0, 2^{M}]")
    return N.astype(np.int64)


def sign_grids(S: BitileCollection, eps: SignPattern | None = None) -> list[np.ndarray]:
    grids = [g.astype(np.int8) for g in S.grids()]
    if eps is not None:
        for s in S:
            e = eps.get(s, 0)
            if e not in (-1, 0, 1):
                raise ValueError(f"sign {e} for {s} not in {{-1, 0, 1}}")
            grids[s.level][s.index, s.freq] = e
    return grids


def _check_inputs(S: BitileCollection, N, f) -> tuple[int, np.ndarray]:
    M = resolution(f)
    if S.M != M:
        raise ResolutionError(f"collection resolution {S.M} != signal resolution {M}")
    return M, check_choice(N, M)


def model_sum(
    S: BitileCollection,
    eps: SignPattern | None,
    N: np.ndarray,
    f: np.ndarray,
    coefficients: list[np.ndarray] | None = None,
) -> np.ndarray:
    """``sum_s eps_s <f, w_s1> w_s1(x) 1_{omega_s2}(N(x))`` evaluated cellwise.

    For a given cell and level at most one bitile can fire, namely the one
    with ``N(x) >> L == 2n + 1``, so each level costs one gather.
    """
    M, N = _check_inputs(S, N, f)
    table = coefficients if coefficients is not None else packet_coefficients(f)
    signs = sign_grids(S, eps)
    x = np.arange(1 << M)
    out = np.zeros(1 << M)
    for L in range(M + 1):
        m = N >> L
        n = m >> 1
        idx = np.nonzero((m & 1).astype(bool) & (n < freq_cap(M, L)))[0]
        if idx.size == 0:
            continue
        k = idx >> (M - L)
        e = signs[L][k, n[idx]]
        live = e != 0
        if not live.any():
            continue
        idx, k, e, nl = idx[live], k[live], e[live], 2 * n[idx][live]
        u = idx & ((1 << (M - L)) - 1)
        out[idx] += e * table[L][k, nl] * 2.0 ** (L / 2) * walsh_sign(nl, u, M - L)
    return out


def density_of(s: Bitile, G: np.ndarray, N: np.ndarray) -> float:
    """``|G ∩ I_s ∩ N^-1(omega_s2)| / |I_s|`` by direct cell count."""
    G = np.asarray(G, dtype=bool)
    M = resolution(G)
    sl = s.time.cells(M)
    hits = (np.asarray(N)[sl] >> s.level) == 2 * s.freq + 1
    return float(np.count_nonzero(hits & G[sl])) / (sl.stop - sl.start)


def density_grids(G: np.ndarray, N: np.ndarray, M: int) -> list[np.ndarray]:
    """``density_of`` for every representable bitile position, per level."""
    G = np.asarray(G, dtype=bool)
    N = check_choice(N, M)
    cells = np.nonzero(G)[0]
    out = []
    for L in range(M + 1):
        cap = freq_cap(M, L)
        m = N[cells] >> L
        n = m >> 1
        ok = ((m & 1) == 1) & (n < cap)
        flat = (cells[ok] >> (M - L)) * cap + n[ok]
        counts = np.bincount(flat, minlength=(1 << L) * cap).reshape(1 << L, cap)
        out.append(counts / float(1 << (M - L)))
    return out


def dense(S: BitileCollection, G: np.ndarray, N: np.ndarray) -> dict[Bitile, float]:
    """``dense(s) = max_{s' in S, s << s'} density_of(s')`` for every ``s`` in ``S``."""
    dens = density_grids(G, N, S.M)
    masked = [np.where(g, d, 0.0) for g, d in zip(S.grids(), dens)]
    up = upward_reduce(masked, np.maximum, 0.0)
    return {s: float(up[s.level][s.index, s.freq]) for s in S}


def dense_value(S: BitileCollection, G: np.ndarray, N: np.ndarray) -> float:
    """Collection-level ``dense_G(S)``; the sup over pairs collapses to the
    largest single density."""
    if len(S) == 0:
        return 0.0
    dens = density_grids(G, N, S.M)
    return float(max(d[g].max(initial=0.0) for g, d in zip(S.grids(), dens)))


def size(S: BitileCollection, f: np.ndarray, coefficients: list[np.ndarray] | None = None) -> float:
    """``max_s max_j |<f, w_sj>| / |I_s|^(1/2)``."""
    M = resolution(f)
    if S.M != M:
        raise ResolutionError(f"collection resolution {S.M} != signal resolution {M}")
    table = coefficients if coefficients is not None else packet_coefficients(f)
    best = 0.0
    for L, grid in enumerate(S.grids()):
        k, n = np.nonzero(grid)
        if k.size == 0:
            continue
        vals = np.abs(table[L][k, 2 * n])
        upper = 2 * n + 1
        fits = upper < table[L].shape[1]
        vals[fits] = np.maximum(vals[fits], np.abs(table[L][k[fits], upper[fits]]))
        best = max(best, float(vals.max()) * 2.0 ** (L / 2))
    return best


@dataclass(frozen=True)
class Tree:
    top: Bitile
    members: BitileCollection

    def __post_init__(self):
        if self.top not in self.members:
            raise ValueError("tree must contain its top")

    @property
    def time(self):
        return self.top.time

    @property
    def frequency(self):
        return self.top.frequency

    def check(self) -> bool:
        return all(fefferman_leq(s, self.top) for s in self.members) and is_convex(self.members)


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...]
    delta: float
    M: int = field(default=0)

    @property
    def tops(self) -> float:
        return sum(2.0 ** (-t.top.level) for t in self.trees)

    def collection(self) -> BitileCollection:
        members = set()
        for t in self.trees:
            members.update(t.members)
        return BitileCollection(members, self.M)

    def __len__(self):
        return len(self.trees)


def tree_partition(S: BitileCollection, check: bool = True) -> list[Tree]:
    """Greedy split into trees with ≪-maximal tops.

    Bitiles are visited in canonical order (coarse first); an unassigned one
    is maximal among the unassigned, and claims every unassigned bitile below
    it. Coarse-first selection keeps the sets ``G ∩ I ∩ N^-1(omega_2)`` of
    overlapping tops disjoint.
    """
    if check and not is_convex(S):
        raise ConvexityError("tree partition needs a convex collection")
    M = S.M
    remaining = [g.copy() for g in S.grids()]
    trees = []
    for top in S:
        L, k, n = top.level, top.index, top.freq
        if not remaining[L][k, n]:
            continue
        members = []
        for Lp in range(L, M + 1):
            d = Lp - L
            col = n >> d
            block = remaining[Lp][k << d : (k + 1) << d, col]
            for off in np.nonzero(block)[0]:
                members.append(Bitile(-Lp, (k << d) + int(off), col))
            block[:] = False
        trees.append(Tree(top, BitileCollection(members, M)))
    return trees
