"""Dyadic maximal functions, L^p and weak-L^p norms, exceptional sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .walsh import resolution


@dataclass(frozen=True)
class NormReport:
    p: float
    strong_norm: float
    weak_norm: float
    attaining_lambda: float


def dual_exponent(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1)


def block_means(f: np.ndarray, level: int) -> np.ndarray:
    """Averages over the level-``level`` dyadic intervals, broadcast back to cells."""
    f = np.asarray(f, dtype=float)
    means = f.reshape(1 << level, -1).mean(axis=1)
    return np.repeat(means, f.size >> level)


def dyadic_maximal(f: np.ndarray, p: float = 1.0) -> np.ndarray:
    """``M_p f(x) = sup_{I ∋ x dyadic} (|I|^-1 ∫_I |f|^p)^(1/p)``, one sweep over scales."""
    if p < 1:
        raise ValueError("maximal function needs p >= 1")
    M = resolution(f)
    g = np.abs(np.asarray(f, dtype=float)) ** p
    out = np.zeros_like(g)
    for L in range(M + 1):
        np.maximum(out, block_means(g, L), out=out)
    return out ** (1.0 / p)


def martingale_maximal(f: np.ndarray) -> np.ndarray:
    """``sup_k |E_k f|`` with ``E_k`` the conditional expectation on level-``k`` intervals."""
    M = resolution(f)
    out = np.zeros(1 << M)
    for k in range(M + 1):
        np.maximum(out, np.abs(block_means(f, k)), out=out)
    return out


def lp_norm(f: np.ndarray, p: float) -> float:
    f = np.abs(np.asarray(f, dtype=float))
    if np.isinf(p):
        return float(f.max())
    return float(np.mean(f**p) ** (1.0 / p))


def weak_lp(g: np.ndarray, p: float) -> tuple[float, float]:
    """``(sup_λ λ |{|g| > λ}|^(1/p), λ*)``.

    For a step function the sup is approached as λ rises to an attained value
    ``v``, where the level set is ``{|g| >= v}``; the returned λ* is that ``v``.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    v = np.sort(np.abs(np.asarray(g, dtype=float)).ravel())[::-1]
    if v.size == 0 or v[0] == 0:
        return 0.0, 0.0
    measure = np.arange(1, v.size + 1) / v.size
    cand = v * measure ** (1.0 / p)
    i = int(np.argmax(cand))
    return float(cand[i]), float(v[i])


def weak_lp_norm(g: np.ndarray, p: float) -> float:
    return weak_lp(g, p)[0]


def norm_report(g: np.ndarray, p: float) -> NormReport:
    weak, lam = weak_lp(g, p)
    return NormReport(p=p, strong_norm=lp_norm(g, p), weak_norm=weak, attaining_lambda=lam)


def exceptional_set(f: np.ndarray, p: float, target: float = 0.25) -> tuple[np.ndarray, float]:
    """``E = {M_p f >= c}`` with ``c`` the smallest attained value of ``M_p f``
    such that ``|E| <= target``.

    When even the top level set is too large (e.g. ``f`` constant), ``c`` is
    the top value and ``E`` is empty.
    """
    if not 0 < target < 1:
        raise ValueError("target measure must lie in (0, 1)")
    mf = dyadic_maximal(f, p)
    v = np.sort(mf)[::-1]
    # measure of {mf >= v[i]} counts ties beyond i
    counts = np.searchsorted(-v, -v, side="right")
    ok = np.nonzero(counts / v.size <= target)[0]
    if ok.size == 0:
        return np.zeros(mf.size, dtype=bool), float(v[0])
    c = float(v[ok[-1]])
    return mf >= c, c
