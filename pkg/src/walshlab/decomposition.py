"""Good tiles, density decomposition and the multi-frequency Calderón-Zygmund step.

The hard checks here raise :class:`InvariantError`; the quantitative bounds
are returned as ratios so a harness can track the implicit constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import (
    Bitile,
    BitileCollection,
    ConvexityError,
    DyadicInterval,
    Tile,
    is_convex,
    maximal_dyadic_intervals,
)
from .maximal import dual_exponent, lp_norm
from .model import Forest, SignPattern, dense, dense_value, model_sum, size, tree_partition
from .walsh import fwht, inverse_fwht, packet_coefficients, resolution


class InvariantError(AssertionError):
    """A property that holds exactly by construction failed."""


class PreconditionError(ValueError):
    """Inputs violate the hypotheses of an estimate."""


def good_tiles(S: BitileCollection, E: np.ndarray) -> BitileCollection:
    """Bitiles whose time interval is not swallowed by ``E``."""
    E = np.asarray(E, dtype=bool)
    M = resolution(E)
    return S.select(lambda s: not E[s.time.cells(M)].all())


def delta_level(d: float) -> int:
    """``k`` with ``d`` in ``(2^-k-1, 2^-k]``."""
    m, e = math.frexp(d)
    return 1 - e if m == 0.5 else -e


@dataclass
class DensityDecomposition:
    delta_levels: list[float]
    forests: dict[float, Forest]
    zero_bucket: BitileCollection
    dense: dict[Bitile, float] = field(repr=False)

    def rows(self, G: np.ndarray) -> list[dict]:
        g = float(np.mean(G))
        out = []
        for d in self.delta_levels:
            F = self.forests[d]
            out.append(
                {
                    "delta": d,
                    "numTrees": len(F),
                    "tops": F.tops,
                    "topsRatio": F.tops * d / g if g > 0 else 0.0,
                }
            )
        return out


def density_decomposition(
    S: BitileCollection, G: np.ndarray, N: np.ndarray, K: int | None = None, check: bool = True
) -> DensityDecomposition:
    """Bucket by ``dense(s)`` into ``(δ/2, δ]``, ``δ = 2^-k`` for ``k <= K``
    (default ``M + 2``), and split each bucket into maximal trees."""
    if check and not is_convex(S):
        raise ConvexityError("density decomposition needs a convex collection")
    K = S.M + 2 if K is None else K
    dmap = dense(S, G, N)
    buckets: dict[int, list[Bitile]] = {k: [] for k in range(K + 1)}
    zero = []
    for s in S:
        d = dmap[s]
        if d == 0:
            zero.append(s)
        else:
            buckets[min(delta_level(d), K)].append(s)
    levels = [2.0**-k for k in range(K + 1)]
    forests = {}
    for k, delta in enumerate(levels):
        # dense is monotone along <<, so each bucket inherits convexity
        trees = tree_partition(BitileCollection(buckets[k], S.M), check=False)
        forests[delta] = Forest(tuple(trees), delta, S.M)
    return DensityDecomposition(levels, forests, BitileCollection(zero, S.M), dmap)


@dataclass
class CZResult:
    h_delta: np.ndarray
    intervals: list[DyadicInterval]
    tiles: dict[DyadicInterval, tuple[Tile, ...]]
    tree_counts: dict[DyadicInterval, int]
    l2_norm: float
    local_norms: dict[DyadicInterval, float]


def _by_level(bitiles) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    levels: dict[int, tuple[list, list]] = {}
    for s in bitiles:
        ks, ns = levels.setdefault(s.level, ([], []))
        ks.append(s.index)
        ns.append(s.freq)
    return {L: (np.array(ks), np.array(ns)) for L, (ks, ns) in levels.items()}


def multi_frequency_cz(F: Forest, f: np.ndarray, E: np.ndarray, p: float | None = None) -> CZResult:
    """``h_δ = f 1_{E^c} + sum_I P_{H_I}(f 1_I)`` over the maximal dyadic ``I ⊆ E``.

    ``H_I`` is spanned by the packets of the tiles over ``I`` lying below some
    lower child ``s_1``, ``s`` in the forest; their frequency is the ancestor
    of ``omega_s1`` at scale ``|I|^-1``.
    """
    f = np.asarray(f, dtype=float)
    E = np.asarray(E, dtype=bool)
    M = resolution(f)
    members = F.collection()
    prefix = np.concatenate(([0], np.cumsum(E)))
    for s in members:
        sl = s.time.cells(M)
        if prefix[sl.stop] - prefix[sl.start] == sl.stop - sl.start:
            raise InvariantError(f"bitile {tuple(s)} lies inside the exceptional set; apply good_tiles first")
    levels = _by_level(members)
    top_levels = _by_level(t.top for t in F.trees)
    h = np.where(E, 0.0, f)
    intervals = maximal_dyadic_intervals(E)
    tiles, counts, local = {}, {}, {}
    for I in intervals:
        LI, kI = -I.scale, I.index
        freqs = set()
        for L, (ks, ns) in levels.items():
            if L >= LI:
                continue
            d = LI - L
            hit = ks == kI >> d
            freqs.update(((2 * ns[hit]) >> d).tolist())
        n_trees = 0
        for L, (ks, _) in top_levels.items():
            if L <= LI:
                n_trees += int(np.count_nonzero(ks == kI >> (LI - L)))
        sl = I.cells(M)
        if freqs:
            c = fwht(f[sl])
            keep = np.zeros(c.size, dtype=bool)
            keep[sorted(freqs)] = True
            h[sl] = inverse_fwht(np.where(keep, c, 0.0))
        tiles[I] = tuple(Tile(I.scale, kI, n) for n in sorted(freqs))
        counts[I] = n_trees
        if p is not None:
            local[I] = lp_norm(f[sl], p)
    return CZResult(h, intervals, tiles, counts, lp_norm(h, 2), local)


@dataclass
class CZCertificate:
    ratio: float
    l2_norm: float
    delta: float
    tree_counts: list[int]
    interval_measure: float
    tops: float
    chain_lhs: float
    chain_rhs: float


def cz_norm_certificate(r: CZResult, F: Forest, G: np.ndarray, p: float) -> CZCertificate:
    """``||h_δ||_2 / δ^(-1/2 + 1/p')`` plus the quantities of the norm chain
    ``sum_I |I| N_I^(1-2/p') <= tops^(1-2/p') (sum_I |I|)^(2/p')``."""
    q = dual_exponent(p)
    delta = F.delta
    scale = delta ** (-0.5 + 1.0 / q)
    lengths = [float(I.length) for I in r.intervals]
    counts = [r.tree_counts[I] for I in r.intervals]
    measure = sum(lengths)
    a = 1.0 - 2.0 / q
    lhs = sum(l * n**a for l, n in zip(lengths, counts) if n > 0)
    rhs = F.tops**a * measure ** (2.0 / q) if F.tops > 0 else 0.0
    return CZCertificate(r.l2_norm / scale, r.l2_norm, delta, counts, measure, F.tops, lhs, rhs)


def _check_subindicator(g: np.ndarray, G: np.ndarray, tol: float = 1e-12):
    g = np.asarray(g, dtype=float)
    if np.any(np.abs(g) > 1 + tol) or np.any(g[~np.asarray(G, dtype=bool)] != 0):
        raise PreconditionError("g must satisfy |g| <= 1_G")


def tree_estimate_check(
    F: Forest,
    h: np.ndarray,
    g: np.ndarray,
    G: np.ndarray,
    N: np.ndarray,
    delta: float,
    eps: SignPattern | None = None,
) -> tuple[float, float, float]:
    """``|<W_F h, g>|`` against ``size_h(F) |G|`` and ``δ^(1/2) |G|^(1/2) ||h||_2``."""
    _check_subindicator(g, G)
    S = F.collection()
    d = dense_value(S, G, N)
    if d > delta:
        raise PreconditionError(f"dense_G(F) = {d} exceeds delta = {delta}")
    table = packet_coefficients(h)
    lhs = abs(float(np.mean(model_sum(S, eps, N, h, table) * g)))
    gm = float(np.mean(G))
    return lhs, size(S, h, table) * gm, math.sqrt(delta * gm) * lp_norm(h, 2)


def single_forest_pairing(
    F: Forest,
    f: np.ndarray,
    g: np.ndarray,
    G: np.ndarray,
    N: np.ndarray,
    p: float,
    h_delta: np.ndarray,
    eps: SignPattern | None = None,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Return ``(|<W_F f, g>|, |<W_F f, g>| / δ^(1/p'))`` after asserting
    ``<W_F f, g> = <W_F h_δ, g>``."""
    _check_subindicator(g, G)
    if len(F) == 0:
        return 0.0, 0.0
    S = F.collection()
    a = float(np.mean(model_sum(S, eps, N, f) * g))
    b = float(np.mean(model_sum(S, eps, N, h_delta) * g))
    if abs(a - b) > tol * max(1.0, abs(a)):
        raise InvariantError(f"pairing identity failed at delta={F.delta}: {a} vs {b}")
    q = dual_exponent(p)
    return abs(a), abs(a) / F.delta ** (1.0 / q)


def coefficient_defect(F: Forest, f: np.ndarray, h_delta: np.ndarray) -> float:
    """``max_s |<f, w_s1> - <h_δ, w_s1>|`` over the forest."""
    tf, th = packet_coefficients(f), packet_coefficients(h_delta)
    worst = 0.0
    for L, (ks, ns) in _by_level(F.collection()).items():
        worst = max(worst, float(np.abs(tf[L][ks, 2 * ns] - th[L][ks, 2 * ns]).max()))
    return worst


def subspace_norm_constant(r: CZResult, p: float, rng: np.random.Generator) -> float:
    """Worst observed ``||v||_{p'(I)} / (N_I^(1/2-1/p') ||v||_{2(I)})`` for a
    random ``v`` in each ``H_I`` (normalized measure on ``I``)."""
    q = dual_exponent(p)
    worst = 0.0
    for I in r.intervals:
        tiles = r.tiles[I]
        if not tiles:
            continue
        c = np.zeros(_local_size(r, I))
        c[[t.freq for t in tiles]] = rng.standard_normal(len(tiles))
        v = inverse_fwht(c)
        ratio = lp_norm(v, q) / (r.tree_counts[I] ** (0.5 - 1.0 / q) * lp_norm(v, 2))
        worst = max(worst, ratio)
    return worst


def _local_size(r: CZResult, I: DyadicInterval) -> int:
    M = resolution(r.h_delta)
    sl = I.cells(M)
    return sl.stop - sl.start
