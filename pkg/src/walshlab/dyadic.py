"""Dyadic intervals, tiles and bitiles on the Walsh phase plane.

Everything is stored as integer (scale, index) pairs. A time interval of
scale ``j`` (``j <= 0``) and index ``k`` is ``[k 2^j, (k+1) 2^j)``; we write
``level = -j`` so that a level-``L`` interval has length ``2^-L``.

At resolution ``M`` a bitile ``(j, k, n)`` has ``I_s = [k 2^j, (k+1) 2^j)``
and ``omega_s = [2n 2^-j, (2n+2) 2^-j)``. It is representable when its lower
child ``s1`` has a wave packet at resolution ``M``, i.e. ``omega_s1`` lies in
``[0, 2^M)``. The level-``M`` bitiles (single cells, ``n = 0``) have an upper
frequency half at ``[2^M, 2^(M+1))``; they are what make ``N(x) = 2^M``
(the full partial sum) reachable.

Bitile collections convert to per-level boolean grids of shape
``(2^L, cap(M, L))`` so that order-theoretic closures run as array sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

TIME = "time"
FREQUENCY = "frequency"


class ResolutionError(ValueError):
    """An object does not fit at the requested dyadic resolution."""


class ConvexityError(ValueError):
    """An operation that needs a convex bitile collection received another."""


@dataclass(frozen=True, slots=True)
class DyadicInterval:
    axis: str
    scale: int
    index: int

    def __post_init__(self):
        if self.axis not in (TIME, FREQUENCY):
            raise ValueError(f"unknown axis {self.axis!r}")
        if self.index < 0:
            raise ValueError("dyadic index must be non-negative")
        if self.axis == TIME and (self.scale > 0 or self.index >= 2 ** (-self.scale)):
            raise ValueError(f"time interval outside [0,1): {self}")

    @property
    def length(self) -> Fraction:
        return Fraction(2) ** self.scale

    @property
    def start(self) -> Fraction:
        return self.index * self.length

    @property
    def end(self) -> Fraction:
        return (self.index + 1) * self.length

    def contains(self, other: DyadicInterval) -> bool:
        """Inclusion ``other ⊆ self`` (same axis)."""
        if other.axis != self.axis or other.scale > self.scale:
            return False
        return other.index >> (self.scale - other.scale) == self.index

    def intersects(self, other: DyadicInterval) -> bool:
        return self.contains(other) or other.contains(self)

    def cells(self, M: int) -> slice:
        """Grid cells of a time interval at resolution ``M``."""
        L = -self.scale
        if L > M:
            raise ResolutionError(f"{self} is finer than resolution {M}")
        width = 1 << (M - L)
        return slice(self.index * width, (self.index + 1) * width)

    def __str__(self):
        return f"[{self.start}, {self.end})"


@dataclass(frozen=True, slots=True)
class Tile:
    """Area-one rectangle ``I x omega`` with ``|omega| = 2^-scale``."""

    scale: int
    index: int
    freq: int

    @property
    def level(self) -> int:
        return -self.scale

    @property
    def time(self) -> DyadicInterval:
        return DyadicInterval(TIME, self.scale, self.index)

    @property
    def frequency(self) -> DyadicInterval:
        return DyadicInterval(FREQUENCY, -self.scale, self.freq)

    @property
    def frequency_index(self) -> int:
        """``n_t = |I_t| inf omega_t``."""
        return self.freq

    def sort_key(self):
        return (-self.scale, self.index, self.freq)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True, slots=True)
class Bitile:
    """Area-two rectangle ``I x omega`` with ``|omega| = 2 / |I|``.

    Canonical order is coarse levels first, then time index, then frequency
    index; ``sorted()`` uses it.
    """

    scale: int
    index: int
    freq: int

    def __post_init__(self):
        if self.scale > 0 or not 0 <= self.index < 2 ** (-self.scale) or self.freq < 0:
            raise ValueError(f"invalid bitile {tuple(self)}")

    def __iter__(self) -> Iterator[int]:
        return iter((self.scale, self.index, self.freq))

    @property
    def level(self) -> int:
        return -self.scale

    @property
    def time(self) -> DyadicInterval:
        return DyadicInterval(TIME, self.scale, self.index)

    @property
    def frequency(self) -> DyadicInterval:
        return DyadicInterval(FREQUENCY, 1 - self.scale, self.freq)

    @property
    def lower(self) -> Tile:
        return Tile(self.scale, self.index, 2 * self.freq)

    @property
    def upper(self) -> Tile:
        return Tile(self.scale, self.index, 2 * self.freq + 1)

    def sort_key(self):
        return (-self.scale, self.index, self.freq)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @classmethod
    def at(cls, level: int, index: int, freq: int) -> Bitile:
        return cls(-level, index, freq)


def fefferman_leq(a, b) -> bool:
    """``a << b``: ``I_a ⊆ I_b`` and ``omega_a ⊇ omega_b``."""
    if type(a) is not type(b):
        raise TypeError("Fefferman order compares tiles with tiles, bitiles with bitiles")
    la, lb = -a.scale, -b.scale
    if la < lb:
        return False
    d = la - lb
    return a.index >> d == b.index and b.freq >> d == a.freq


def freq_cap(M: int, level: int) -> int:
    """Number of representable bitile frequency indices at ``level``."""
    if level < M:
        return 1 << (M - level - 1)
    if level == M:
        return 1
    return 0


def is_representable(s: Bitile, M: int) -> bool:
    L = s.level
    return 0 <= L <= M and s.freq < freq_cap(M, L)


def tile_representable(t: Tile, M: int) -> bool:
    L = t.level
    return 0 <= L <= M and t.freq < (1 << (M - L))


class BitileCollection:
    """Immutable finite set of bitiles at a resolution bound ``M``."""

    __slots__ = ("M", "bitiles", "_members", "_grids")

    def __init__(self, bitiles: Iterable[Bitile], M: int):
        members = frozenset(bitiles)
        for s in members:
            if not is_representable(s, M):
                raise ResolutionError(f"bitile {tuple(s)} not representable at M={M}")
        self.M = M
        self._members = members
        self.bitiles: tuple[Bitile, ...] = tuple(sorted(members))
        self._grids = None

    @classmethod
    def full(cls, M: int) -> BitileCollection:
        return cls.from_grids([np.ones((1 << L, freq_cap(M, L)), dtype=bool) for L in range(M + 1)], M)

    @classmethod
    def from_grids(cls, grids: Sequence[np.ndarray], M: int) -> BitileCollection:
        out = []
        for L, grid in enumerate(grids):
            for k, n in zip(*np.nonzero(grid)):
                out.append(Bitile(-L, int(k), int(n)))
        return cls(out, M)

    def grids(self) -> list[np.ndarray]:
        """Per-level membership arrays, ``grids[L][k, n]``."""
        if self._grids is None:
            grids = [np.zeros((1 << L, freq_cap(self.M, L)), dtype=bool) for L in range(self.M + 1)]
            for s in self._members:
                grids[s.level][s.index, s.freq] = True
            for g in grids:
                g.flags.writeable = False
            self._grids = grids
        return self._grids

    def __len__(self):
        return len(self.bitiles)

    def __iter__(self):
        return iter(self.bitiles)

    def __contains__(self, s):
        return s in self._members

    def __eq__(self, other):
        if not isinstance(other, BitileCollection):
            return NotImplemented
        return self.M == other.M and self._members == other._members

    def __hash__(self):
        return hash((self.M, self._members))

    def __le__(self, other: BitileCollection) -> bool:
        return self._members <= other._members

    def __repr__(self):
        return f"BitileCollection(M={self.M}, size={len(self)})"

    def union(self, other: BitileCollection) -> BitileCollection:
        return BitileCollection(self._members | other._members, max(self.M, other.M))

    def difference(self, other: Iterable[Bitile]) -> BitileCollection:
        return BitileCollection(self._members - set(other), self.M)

    def select(self, keep) -> BitileCollection:
        return BitileCollection([s for s in self.bitiles if keep(s)], self.M)


def upward_reduce(values: Sequence[np.ndarray], op, empty) -> list[np.ndarray]:
    """For every position, reduce ``values`` over the position and all its
    Fefferman ancestors (``s << s'``), coarse to fine."""
    M = len(values) - 1
    out = [np.array(values[0], copy=True)]
    for L in range(1, M + 1):
        cap = freq_cap(M, L)
        prev = out[-1]
        pad = np.full((prev.shape[0], max(prev.shape[1], 2 * cap)), empty, dtype=prev.dtype)
        pad[:, : prev.shape[1]] = prev
        rows = np.repeat(pad, 2, axis=0)
        a, b = rows[:, 0 : 2 * cap : 2], rows[:, 1 : 2 * cap : 2]
        out.append(op(values[L], op(a, b)))
    return out


def downward_reduce(values: Sequence[np.ndarray], op) -> list[np.ndarray]:
    """For every position, reduce over the position and all its Fefferman
    descendants, fine to coarse."""
    M = len(values) - 1
    out: list = [None] * (M + 1)
    out[M] = np.array(values[M], copy=True)
    for L in range(M - 1, -1, -1):
        child = out[L + 1]
        both = op(child[0::2], child[1::2])
        cap = freq_cap(M, L)
        # descendant frequency index is n >> 1
        out[L] = op(values[L], both[:, np.arange(cap) >> 1])
    return out


def convex_hull(S: BitileCollection) -> BitileCollection:
    """Smallest convex superset: positions with an ancestor and a descendant in ``S``."""
    grids = S.grids()
    up = upward_reduce(grids, np.logical_or, False)
    down = downward_reduce(grids, np.logical_or)
    return BitileCollection.from_grids([u & d for u, d in zip(up, down)], S.M)


def is_convex(S: BitileCollection) -> bool:
    grids = S.grids()
    up = upward_reduce(grids, np.logical_or, False)
    down = downward_reduce(grids, np.logical_or)
    return all(np.array_equal(u & d, g) for u, d, g in zip(up, down, grids))


def chain_between(s: Bitile, top: Bitile) -> list[Bitile]:
    """The bitiles ``s''`` with ``s << s'' << top``, coarse first (both ends included)."""
    if not fefferman_leq(s, top):
        return []
    out = []
    for L in range(top.level, s.level + 1):
        out.append(Bitile(-L, s.index >> (s.level - L), top.freq >> (L - top.level)))
    return out


def maximal_dyadic_intervals(E: np.ndarray) -> list[DyadicInterval]:
    """Maximal dyadic intervals contained in a union of grid cells ``E`` (boolean mask)."""
    E = np.asarray(E, dtype=bool)
    M = _log2_length(E.size)
    out = []
    parent_full = np.zeros(1, dtype=bool)
    for L in range(M + 1):
        full = E.reshape(1 << L, -1).all(axis=1)
        maximal = full & ~np.repeat(parent_full, 2) if L else full
        out.extend((L, int(k)) for k in np.nonzero(maximal)[0])
        parent_full = full
    out.sort(key=lambda lk: lk[1] << (M - lk[0]))
    return [DyadicInterval(TIME, -L, k) for L, k in out]


def _log2_length(n: int) -> int:
    M = n.bit_length() - 1
    if n <= 0 or 1 << M != n:
        raise ResolutionError(f"length {n} is not a power of two")
    return M
