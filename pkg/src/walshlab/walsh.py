"""Paley-ordered Walsh system on the torus at dyadic resolution ``M``.

Signals are 1-d float arrays of length ``2^M``; entry ``i`` is the value on
``[i 2^-M, (i+1) 2^-M)``. Inner products are ``<f, g> = 2^-M sum f g``.

With ``rev`` the ``M``-bit reversal, ``W_n(i) = (-1)^popcount(n & rev(i))``,
so the Paley spectrum is the natural-order Hadamard transform read at
bit-reversed indices.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .dyadic import ResolutionError, Tile, _log2_length, tile_representable


def resolution(f: np.ndarray) -> int:
    return _log2_length(np.shape(f)[-1])


@lru_cache(maxsize=None)
def bit_reversal(m: int) -> np.ndarray:
    idx = np.arange(1 << m)
    rev = np.zeros_like(idx)
    for b in range(m):
        rev |= ((idx >> b) & 1) << (m - 1 - b)
    rev.flags.writeable = False
    return rev


def hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized natural-order Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=float)
    lead = a.shape[:-1]
    n = a.shape[-1]
    m = _log2_length(n)
    h = 1
    for _ in range(m):
        a = a.reshape(*lead, n // (2 * h), 2, h)
        x, y = a[..., 0, :], a[..., 1, :]
        a = np.stack((x + y, x - y), axis=-2)
        h *= 2
    return a.reshape(*lead, n)


def fwht(f: np.ndarray) -> np.ndarray:
    """Paley spectrum ``c[n] = <f, W_n>`` (batched over leading axes)."""
    m = resolution(f)
    return hadamard(f)[..., bit_reversal(m)] / (1 << m)


def inverse_fwht(c: np.ndarray) -> np.ndarray:
    m = resolution(c)
    return hadamard(np.asarray(c, dtype=float)[..., bit_reversal(m)])


def inner(f: np.ndarray, g: np.ndarray) -> float:
    return float(np.mean(np.asarray(f) * np.asarray(g)))


def walsh_sign(n, u, m: int):
    """``W_n`` at cell ``u`` of resolution ``m`` (vectorized over ``n`` and ``u``)."""
    rev = bit_reversal(m)[u]
    parity = np.bitwise_count(np.bitwise_and(n, rev)).astype(np.int64) & 1
    return 1 - 2 * parity


def walsh_character(n: int, M: int) -> np.ndarray:
    if not 0 <= n < (1 << M):
        raise ResolutionError(f"Walsh character {n} needs resolution > {M}")
    return walsh_sign(n, np.arange(1 << M), M).astype(float)


def wave_packet(t: Tile, M: int) -> np.ndarray:
    """``w_t = |I_t|^-1/2 W_{n_t}((x - inf I_t) / |I_t|)`` sampled at resolution ``M``."""
    if not tile_representable(t, M):
        raise ResolutionError(f"tile {t} has no wave packet at M={M}")
    L = t.level
    out = np.zeros(1 << M)
    sl = t.time.cells(M)
    out[sl] = 2.0 ** (L / 2) * walsh_sign(t.freq, np.arange(1 << (M - L)), M - L)
    return out


def packet_coefficients(f: np.ndarray) -> list[np.ndarray]:
    """All tile coefficients: ``table[L][k, n] = <f, w_t>`` for ``t = (level L, index k, n_t = n)``."""
    M = resolution(f)
    f = np.asarray(f, dtype=float)
    return [fwht(f.reshape(1 << L, -1)) * 2.0 ** (-L / 2) for L in range(M + 1)]


def pairing(f: np.ndarray, t: Tile) -> float:
    """``<f, w_t>``; zero for tiles finer in frequency than the signal grid."""
    M = resolution(f)
    L = t.level
    if L > M:
        raise ResolutionError(f"tile {t} finer than resolution {M}")
    if t.freq >= 1 << (M - L):
        # the packet oscillates inside every cell of f
        return 0.0
    block = np.asarray(f, dtype=float)[t.time.cells(M)]
    return float(np.mean(block * walsh_sign(t.freq, np.arange(block.size), M - L)) * 2.0 ** (-L / 2))


def partial_sum(f: np.ndarray, n: int) -> np.ndarray:
    """``W_n f = sum_{m < n} <f, W_m> W_m``."""
    M = resolution(f)
    if not 0 <= n <= 1 << M:
        raise ResolutionError(f"partial sum index {n} outside [0, 2^{M}]")
    c = fwht(f)
    c[n:] = 0.0
    return inverse_fwht(c)


def _rademacher_rows(cells: np.ndarray, M: int) -> np.ndarray:
    """Rows ``W_m(x)`` for ``m < 2^M``, one row per cell, built by Paley doubling."""
    rows = np.ones((cells.size, 1))
    for i in range(M):
        r = 1.0 - 2.0 * ((cells >> (M - 1 - i)) & 1)
        rows = np.concatenate((rows, rows * r[:, None]), axis=1)
    return rows


def partial_sums_table(f: np.ndarray, cells: np.ndarray | None = None) -> np.ndarray:
    """``table[x, n] = W_n f(x)`` for ``n = 0 .. 2^M`` at the given cells."""
    M = resolution(f)
    if cells is None:
        cells = np.arange(1 << M)
    c = fwht(f)
    rows = _rademacher_rows(np.asarray(cells), M) * c
    out = np.zeros((rows.shape[0], rows.shape[1] + 1))
    np.cumsum(rows, axis=1, out=out[:, 1:])
    return out


def _carleson(f: np.ndarray, tol: float = 1e-9):
    M = resolution(f)
    size = 1 << M
    chunk = max(1, (1 << 22) >> M)
    values = np.empty(size)
    choice = np.empty(size, dtype=np.int64)
    for start in range(0, size, chunk):
        cells = np.arange(start, min(size, start + chunk))
        table = np.abs(partial_sums_table(f, cells))
        best = table.max(axis=1)
        values[cells] = best
        # smallest n within tolerance of the maximum
        choice[cells] = np.argmax(table >= (best - tol * np.maximum(1.0, best))[:, None], axis=1)
    return values, choice


def carleson_max(f: np.ndarray) -> np.ndarray:
    """``Wf(x) = max_{0 <= n <= 2^M} |W_n f(x)|``."""
    return _carleson(f)[0]


def argmax_choice(f: np.ndarray) -> np.ndarray:
    """Per cell, the smallest ``n`` attaining ``carleson_max`` (ties within 1e-9)."""
    return _carleson(f)[1]


def carleson_with_choice(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return _carleson(f)


def lacunary_max(f: np.ndarray, seq) -> np.ndarray:
    """``sup_j |W_{n_j} f|`` cellwise over an increasing integer sequence."""
    M = resolution(f)
    seq = [int(n) for n in seq]
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be strictly increasing")
    if seq and (seq[0] < 0 or seq[-1] > 1 << M):
        raise ResolutionError(f"sequence leaves [0, 2^{M}]")
    c = fwht(f)
    out = np.zeros(1 << M)
    for n in seq:
        masked = c.copy()
        masked[n:] = 0.0
        np.maximum(out, np.abs(inverse_fwht(masked)), out=out)
    return out
