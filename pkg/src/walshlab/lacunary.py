"""Lacunary sequences, Zygmund's inequality and lacunary Walsh-Carleson scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .maximal import dual_exponent, lp_norm, weak_lp_norm
from .walsh import lacunary_max, resolution


@dataclass(frozen=True)
class LacunarySequence:
    theta: float
    terms: tuple

    def __post_init__(self):
        if self.theta <= 1:
            raise ValueError("lacunarity constant must exceed 1")
        t = self.terms
        if any(x <= 0 for x in t):
            raise ValueError("terms must be positive")
        if any(b < self.theta * a * (1 - 1e-12) for a, b in zip(t, t[1:])):
            raise ValueError(f"terms are not {self.theta}-lacunary")

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def make_lacunary(theta: float, first: float, count: int, integer: bool = True) -> LacunarySequence:
    """``first, ...`` with each term the smallest admissible value ``>= theta * previous``."""
    if theta <= 1 or first <= 0 or count < 1:
        raise ValueError("need theta > 1, first > 0, count >= 1")
    if not integer:
        return LacunarySequence(theta, tuple(float(first) * theta**j for j in range(count)))
    # rational theta keeps ceil(1.1 * 10) == 11
    q = Fraction(theta).limit_denominator(10**9)
    terms = [math.ceil(Fraction(first).limit_denominator(10**9))]
    for _ in range(count - 1):
        terms.append(math.ceil(q * terms[-1]))
    return LacunarySequence(theta, tuple(terms))


def fourier_coefficients(f: np.ndarray, xi: Sequence[float]) -> np.ndarray:
    """``∫_0^1 f(x) e^{-i xi x} dx`` for a step function, exact cell by cell."""
    f = np.asarray(f, dtype=float)
    M = resolution(f)
    xi = np.asarray(xi, dtype=float)
    edges = np.arange((1 << M) + 1) / (1 << M)
    safe = np.where(xi == 0, 1.0, xi)
    e = np.exp(-1j * np.outer(safe, edges))
    out = (e[:, :-1] - e[:, 1:]) @ f / (1j * safe)
    return np.where(xi == 0, f.mean(), out)


def zygmund_ratio(f: np.ndarray, xs: LacunarySequence, p: float) -> float:
    """``(sum_k |f^(xi_k)|^2)^(1/2) / (p' ||f||_p)``; zero for ``f = 0``."""
    if not 1 < p <= 2:
        raise ValueError("Zygmund's inequality is used for 1 < p <= 2")
    if xs.terms[0] < 4 / xs.theta:
        raise ValueError(f"first frequency {xs.terms[0]} below 4/theta")
    norm = lp_norm(f, p)
    if norm == 0:
        return 0.0
    lhs = math.sqrt(float(np.sum(np.abs(fourier_coefficients(f, xs.terms)) ** 2)))
    return lhs / (dual_exponent(p) * norm)


def fit_coefficient(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares ``y ≈ a x`` and the envelope ``b = max y/x`` (so ``b x >= y``)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return float(np.dot(x, y) / np.dot(x, x)), float(np.max(y / x))


def log_law(p):
    return np.log(np.e + 1.0 / (np.asarray(p, dtype=float) - 1.0))


def inverse_law(p):
    return 1.0 / (np.asarray(p, dtype=float) - 1.0)


@dataclass
class ScanResult:
    rows: list[dict]
    summary: list[dict]
    log_fit: tuple[float, float]
    inverse_fit: tuple[float, float]
    monotone: bool


def lacunary_norm_scan(seq: Sequence[int], p_grid: Sequence[float], family: Sequence[tuple[str, np.ndarray]]) -> ScanResult:
    """``||sup_j |W_{n_j} f| ||_{p,∞} / ||f||_p`` over a family, per ``p``.

    ``family`` holds ``(family_id, signal)`` pairs. The summary has one row per
    ``p`` with the maximum ratio and the slack against the fitted laws
    ``b log(e + 1/(p-1))`` and ``b / (p-1)``.
    """
    rows = []
    maxima = []
    lac = [(fid, f, lacunary_max(f, seq)) for fid, f in family]
    for p in p_grid:
        best = 0.0
        for fid, f, g in lac:
            strong = lp_norm(f, p)
            weak = weak_lp_norm(g, p)
            ratio = weak / strong if strong > 0 else 0.0
            rows.append({"p": p, "familyId": fid, "strongNorm": strong, "weakNorm": weak, "ratio": ratio})
            best = max(best, ratio)
        maxima.append(best)
    maxima = np.array(maxima)
    log_fit = fit_coefficient(log_law(p_grid), maxima)
    inv_fit = fit_coefficient(inverse_law(p_grid), maxima)
    summary = []
    for p, m in zip(p_grid, maxima):
        summary.append(
            {
                "p": p,
                "maxRatio": float(m),
                "logCoefficient": log_fit[1],
                "logSlack": float(log_fit[1] * log_law(p) - m),
                "inverseCoefficient": inv_fit[1],
                "inverseSlack": float(inv_fit[1] * inverse_law(p) - m),
            }
        )
    order = np.argsort(p_grid)
    monotone = bool(np.all(np.diff(maxima[order]) <= 1e-12))
    return ScanResult(rows, summary, log_fit, inv_fit, monotone)
