"""Experiment driver: input families, weak-L^p sweeps, the mixed bound and
end-to-end pipeline verification with constant tracking."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .decomposition import (
    InvariantError,
    coefficient_defect,
    cz_norm_certificate,
    density_decomposition,
    good_tiles,
    multi_frequency_cz,
    single_forest_pairing,
    subspace_norm_constant,
    tree_estimate_check,
)
from .dyadic import BitileCollection, Tile, convex_hull
from .maximal import dual_exponent, exceptional_set, lp_norm, weak_lp_norm
from .model import dense_value, model_sum
from .walsh import argmax_choice, carleson_max, wave_packet

DEFAULT_BUDGETS = {
    "tops": 8.0,
    "cz": 100.0,
    "tree": 50.0,
    "forest": 50.0,
    "restricted": 10.0,
    "mixed": 2.0,
    "subspace": 1.0,
    "zygmund": 2.0,
}

MAX_RESOLUTION = 14
TOL = 1e-9


@dataclass
class ExperimentConfig:
    resolution: int = 8
    p_grid: tuple[float, ...] = (1.1, 1.25, 1.5, 2.0)
    family: str = "indicator"
    trials: int = 1
    seed: int = 0
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        self.p_grid = tuple(float(p) for p in self.p_grid)
        if not self.p_grid or any(not 1 < p <= 2 for p in self.p_grid):
            raise ValueError(f"p grid must lie in (1, 2]: {self.p_grid}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.resolution <= MAX_RESOLUTION:
            raise ValueError(f"resolution must lie in [0, {MAX_RESOLUTION}]")
        self.budgets = {**DEFAULT_BUDGETS, **self.budgets}


# ---------------------------------------------------------------- families


def parse_family(spec: str) -> list[tuple[str, dict[str, str]]]:
    """``name[:key=val,...]`` terms joined by ``+``."""
    out = []
    for term in spec.split("+"):
        term = term.strip()
        name, _, rest = term.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"bad family parameter {item!r} in {spec!r}")
            params[key.strip()] = val.strip()
        out.append((name.strip(), params))
    return out


def _measure(text: str) -> float:
    if text.startswith("2^"):
        return 2.0 ** float(text[2:])
    return float(text)


def _indicator_family(M, rng, params):
    if "measure" in params:
        measures = [_measure(params["measure"])]
    else:
        measures = [2.0**-k for k in range(1, M + 1)]
    count = int(params.get("count", 3))
    out = []
    for m in measures:
        cells = int(round(m * (1 << M)))
        if not 1 <= cells <= 1 << M:
            raise ValueError(f"measure {m} not representable at M={M}")
        for i in range(count):
            f = np.zeros(1 << M)
            f[rng.choice(1 << M, size=cells, replace=False)] = 1.0
            out.append((f"indicator:m={cells}/{1 << M}#{i}", f))
    return out


def _spike_family(M, rng, params):
    ks = [int(params["height"])] if "height" in params else range(M + 1)
    out = []
    for k in ks:
        if not 0 <= k <= M:
            raise ValueError(f"spike height exponent {k} outside [0, {M}]")
        f = np.zeros(1 << M)
        pos = int(rng.integers(1 << k))
        f[pos << (M - k) : (pos + 1) << (M - k)] = float(1 << k)
        out.append((f"spike:k={k}", f))
    return out


def _multispike_family(M, rng, params):
    count = int(params.get("count", 4))
    out = []
    for k in range(1, M + 1):
        for i in range(count):
            f = np.zeros(1 << M)
            npk = int(rng.integers(2, 9))
            width = 1 << (M - k)
            for pos in rng.choice(1 << k, size=min(npk, 1 << k), replace=False):
                f[pos * width : (pos + 1) * width] = rng.uniform(0.5, 1.0) * (1 << k)
            out.append((f"multispike:k={k}#{i}", f))
    return out


def _packet_family(M, rng, params):
    if {"j", "k", "n"} <= params.keys():
        t = Tile(int(params["j"]), int(params["k"]), int(params["n"]))
        f = wave_packet(t, M)
        return [(f"single-packet:{t.scale},{t.index},{t.freq}", f / lp_norm(f, 2) if f.any() else f)]
    count = int(params.get("count", 8))
    out = []
    for i in range(count):
        L = int(rng.integers(M + 1))
        t = Tile(-L, int(rng.integers(1 << L)), int(rng.integers(1 << (M - L))))
        out.append((f"single-packet:{t.scale},{t.index},{t.freq}", wave_packet(t, M)))
    return out


def generate_family(spec: str, M: int, seed: int) -> list[tuple[str, np.ndarray]]:
    """Signals as ``(family_id, values)`` pairs, deterministic in ``seed``.

    Terms: ``indicator[:measure=2^-3,count=3]``, ``random-sign[:count=8]``,
    ``spike[:height=k]`` (``2^k`` on a random dyadic interval of length
    ``2^-k``, all ``k`` by default), ``multispike[:count=4]``,
    ``single-packet[:j=,k=,n=]``, ``constant[:value=1]``, ``file:path=...``.
    """
    rng = np.random.default_rng(seed)
    out: list[tuple[str, np.ndarray]] = []
    for name, params in parse_family(spec):
        if name == "indicator":
            out += _indicator_family(M, rng, params)
        elif name == "random-sign":
            count = int(params.get("count", 8))
            out += [(f"random-sign#{i}", rng.choice([-1.0, 1.0], size=1 << M)) for i in range(count)]
        elif name == "spike":
            out += _spike_family(M, rng, params)
        elif name == "multispike":
            out += _multispike_family(M, rng, params)
        elif name == "single-packet":
            out += _packet_family(M, rng, params)
        elif name == "constant":
            out.append(("constant", np.full(1 << M, float(params.get("value", 1.0)))))
        elif name == "file":
            from .io import read_signal

            f, _ = read_signal(params["path"])
            if f.size != 1 << M:
                raise ValueError(f"{params['path']} has {f.size} cells, expected {1 << M}")
            out.append((f"file:{Path(params['path']).name}", f))
        else:
            raise ValueError(f"unknown family {name!r}")
    return out


# ------------------------------------------------------------------ sweeps


@dataclass(frozen=True)
class SweepRow:
    p: float
    family_id: str
    input_norm: float
    weak_norm: float
    ratio: float
    growth_predicted: float
    slack: float

    def consistent(self, tol: float = 1e-12) -> bool:
        expect = self.weak_norm / self.input_norm if self.input_norm > 0 else 0.0
        return abs(self.ratio - expect) <= tol * max(1.0, abs(expect))

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "familyId": self.family_id,
            "inputNorm": self.input_norm,
            "weakNorm": self.weak_norm,
            "ratio": self.ratio,
            "growthPredicted": self.growth_predicted,
            "slack": self.slack,
        }


@dataclass
class PowerFit:
    a: float
    beta: float
    residuals: list[float]
    degenerate: bool


def fit_power_law(p_grid: Sequence[float], maxima: Sequence[float]) -> PowerFit:
    """Least squares for ``log m = log a - beta log(p - 1)``."""
    x = np.log(np.asarray(p_grid, dtype=float) - 1.0)
    y = np.log(np.asarray(maxima, dtype=float))
    if len(x) < 2 or np.ptp(y) < 1e-12:
        return PowerFit(float(np.exp(y.mean())), 0.0, [0.0] * len(x), True)
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    return PowerFit(float(np.exp(icpt)), float(-slope), res.tolist(), False)


@dataclass
class SweepResult:
    rows: list[SweepRow]
    p_grid: tuple[float, ...]
    maxima: list[float]
    fit: PowerFit
    inverse_coefficient: float
    monotone: bool
    restricted: float | None

    def summary(self) -> list[dict]:
        return [
            {
                "p": p,
                "maxRatio": m,
                "predicted": self.inverse_coefficient / (p - 1),
                "fitA": self.fit.a,
                "fitBeta": self.fit.beta,
                "residual": r,
            }
            for p, m, r in zip(self.p_grid, self.maxima, self.fit.residuals)
        ]


def restricted_factor(p: float) -> float:
    return p * p / (p - 1)


def carleson_sweep(cfg: ExperimentConfig, family=None) -> SweepResult:
    """Per ``p`` and signal: ``||Wf||_{p,inf} / ||f||_p``; maxima, power-law fit,
    and the restricted weak-type ratio against ``p^2/(p-1)`` on indicators."""
    if family is None:
        family = generate_family(cfg.family, cfg.resolution, cfg.seed)
    p_grid = cfg.p_grid
    raw = []
    for fid, f in family:
        wf = carleson_max(f)
        for p in p_grid:
            strong = lp_norm(f, p)
            weak = weak_lp_norm(wf, p)
            raw.append((p, fid, strong, weak, weak / strong if strong > 0 else 0.0))
    maxima = [max(r[4] for r in raw if r[0] == p) for p in p_grid]
    # envelope coefficient of c / (p - 1)
    c = max(m * (p - 1) for p, m in zip(p_grid, maxima))
    rows = [SweepRow(p, fid, s, w, r, c / (p - 1), c / (p - 1) - r) for p, fid, s, w, r in raw]
    fit = fit_power_law(p_grid, maxima) if all(m > 0 for m in maxima) else PowerFit(0.0, 0.0, [0.0] * len(p_grid), True)
    order = np.argsort(p_grid)
    monotone = bool(np.all(np.diff(np.asarray(maxima)[order]) <= 1e-12))
    ind = [r for r in rows if r.family_id.startswith("indicator")]
    restricted = max((r.ratio / restricted_factor(r.p) for r in ind), default=None)
    return SweepResult(rows, p_grid, maxima, fit, c, monotone, restricted)


@dataclass
class MixedRow:
    family_id: str
    l1: float
    sup: float
    weak1: float
    ratio: float
    p_star: float
    weak_p: float
    norm_p: float
    implied: float

    def as_dict(self) -> dict:
        return {
            "familyId": self.family_id,
            "l1Norm": self.l1,
            "supNorm": self.sup,
            "weakL1": self.weak1,
            "ratio": self.ratio,
            "pStar": self.p_star,
            "weakPStar": self.weak_p,
            "normPStar": self.norm_p,
            "impliedBound": self.implied,
        }


@dataclass
class MixedResult:
    rows: list[MixedRow]
    maximum: float
    derivation_ok: bool
    nested: list[float]
    nested_monotone: bool


def mixed_row(fid: str, f: np.ndarray, wf: np.ndarray | None = None) -> MixedRow:
    """``||Wf||_{1,inf} / (||f||_1 log(e + R))``, ``R = ||f||_inf/||f||_1``, with the
    bound implied by the weak-L^p estimate at ``p* = 1 + 1/log(e + R)``:
    ``ratio <= e (p* - 1) ||Wf||_{p*,inf} / ||f||_{p*}``."""
    wf = carleson_max(f) if wf is None else wf
    l1, sup = lp_norm(f, 1), lp_norm(f, np.inf)
    if l1 == 0:
        return MixedRow(fid, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0)
    log_term = math.log(math.e + sup / l1)
    w1 = weak_lp_norm(wf, 1)
    ps = 1.0 + 1.0 / log_term
    wp, np_ = weak_lp_norm(wf, ps), lp_norm(f, ps)
    return MixedRow(fid, l1, sup, w1, w1 / (l1 * log_term), ps, wp, np_, math.e * (ps - 1) * wp / np_)


def nested_spikes(M: int) -> list[np.ndarray]:
    """``2^k 1_[0, 2^-k)``: unit L^1 norm, doubling sup norm."""
    out = []
    for k in range(M + 1):
        f = np.zeros(1 << M)
        f[: 1 << (M - k)] = float(1 << k)
        out.append(f)
    return out


def mixed_bound_check(cfg: ExperimentConfig, family=None) -> MixedResult:
    M = cfg.resolution
    if family is None:
        family = generate_family("spike+multispike", M, cfg.seed)
    rows = [mixed_row(fid, f) for fid, f in family]
    ok = all(r.ratio <= r.implied * (1 + 1e-12) + 1e-15 and r.norm_p <= math.e * r.l1 * (1 + 1e-12) for r in rows)
    nested = [weak_lp_norm(carleson_max(f), 1) for f in nested_spikes(M)]
    mono = bool(np.all(np.diff(nested) >= -1e-12))
    return MixedResult(rows, max((r.ratio for r in rows), default=0.0), ok, nested, mono)


# ------------------------------------------------------- pipeline verification


@dataclass
class Instance:
    """Everything a pipeline run consumes."""

    f: np.ndarray
    S: BitileCollection
    eps: dict | None
    N: np.ndarray
    G: np.ndarray
    p: float
    seed: int = 0


@dataclass
class DeltaRow:
    delta: float
    num_trees: int
    tops: float
    tops_ratio: float
    cz_l2: float
    cz_ratio: float
    pairing: float
    pairing_ratio: float
    tree_ratio: float
    subspace: float

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "numTrees": self.num_trees,
            "tops": self.tops,
            "topsRatio": self.tops_ratio,
            "czL2": self.cz_l2,
            "czRatio": self.cz_ratio,
            "pairingRatio": self.pairing_ratio,
        }


@dataclass
class TrialReport:
    trial: int
    M: int
    p: float
    measure_G: float
    measure_E: float
    threshold: float
    deltas: list[DeltaRow]
    forest_constant: float
    max_defect: float
    max_local: float
    checks: int
    failure: str | None = None

    def maxima(self) -> dict[str, float]:
        return {
            "tops": max((d.tops_ratio for d in self.deltas), default=0.0),
            "cz": max((d.cz_ratio for d in self.deltas), default=0.0),
            "tree": max((d.tree_ratio for d in self.deltas), default=0.0),
            "forest": self.forest_constant,
            "subspace": max((d.subspace for d in self.deltas), default=0.0),
        }

    def as_dict(self) -> dict:
        m = self.maxima()
        return {
            "trial": self.trial,
            "M": self.M,
            "p": self.p,
            "measureG": self.measure_G,
            "measureE": self.measure_E,
            "numDeltas": sum(1 for d in self.deltas if d.num_trees),
            "topsRatio": m["tops"],
            "czRatio": m["cz"],
            "treeRatio": m["tree"],
            "forestC": m["forest"],
            "subspaceC": m["subspace"],
            "maxDefect": self.max_defect,
            "checks": self.checks,
            "failure": self.failure or "",
        }


def _require(cond: bool, message: str):
    if not cond:
        raise InvariantError(message)


def run_instance(inst: Instance, trial: int = 0) -> TrialReport:
    """The reduction chain on one instance; hard invariants raise
    :class:`InvariantError`, constants are returned as ratios."""
    f, S, eps, N, G, p = inst.f, inst.S, inst.eps, inst.N, inst.G, inst.p
    M = S.M
    rng = np.random.default_rng(inst.seed)
    q = dual_exponent(p)
    E, c = exceptional_set(f, p)
    Gp = G & ~E
    w = model_sum(S, eps, N, f)
    g = np.where(Gp, np.sign(w), 0.0)
    checks = 0

    good = good_tiles(S, E)
    full_pair = float(np.mean(w * g))
    good_pair = float(np.mean(model_sum(good, eps, N, f) * g))
    _require(abs(full_pair - good_pair) <= TOL * max(1.0, abs(full_pair)), f"good-tile pairing {full_pair} vs {good_pair}")
    checks += 1

    D = density_decomposition(good, G, N, check=False)
    union = set(D.zero_bucket)
    total = len(D.zero_bucket)
    for F in D.forests.values():
        coll = F.collection()
        union.update(coll)
        total += len(coll)
    _require(total == len(good) and union == set(good), "forests do not partition the good tiles")
    checks += 1
    if len(D.zero_bucket):
        z = float(np.mean(model_sum(D.zero_bucket, eps, N, f) * g))
        _require(abs(z) <= TOL, f"zero-density bucket pairs to {z}")
        checks += 1

    gm = float(np.mean(G))
    rows = []
    total_pair = 0.0
    max_defect = max_local = 0.0
    for delta in D.delta_levels:
        F = D.forests[delta]
        if len(F) == 0:
            continue
        coll = F.collection()
        dv = dense_value(coll, G, N)
        _require(dv <= delta, f"dense {dv} exceeds delta {delta}")
        r = multi_frequency_cz(F, f, E, p)
        defect = coefficient_defect(F, f, r.h_delta)
        _require(defect <= TOL, f"coefficient defect {defect} at delta {delta}")
        max_defect = max(max_defect, defect)
        for I in r.intervals:
            _require(len(r.tiles[I]) <= r.tree_counts[I], f"#T_I > N_I on {I}")
            loc = r.local_norms[I]
            _require(loc <= 2.0**p * c * (1 + 1e-12), f"local norm {loc} > 2^p c on {I}")
            if c > 0:
                max_local = max(max_local, loc / c)
        cert = cz_norm_certificate(r, F, G, p)
        _require(cert.chain_lhs <= cert.chain_rhs * (1 + 1e-12) + 1e-15, "norm chain violated")
        pair, pair_ratio = single_forest_pairing(F, f, g, G, N, p, r.h_delta, eps)
        lhs, b1, b2 = tree_estimate_check(F, r.h_delta, g, G, N, delta, eps)
        bound = min(b1, b2)
        tree_ratio = lhs / bound if bound > 0 else (0.0 if lhs <= TOL else math.inf)
        sub = subspace_norm_constant(r, p, rng)
        checks += 4 + 2 * len(r.intervals)
        total_pair += pair
        rows.append(
            DeltaRow(
                delta,
                len(F),
                F.tops,
                F.tops * delta / gm if gm > 0 else 0.0,
                cert.l2_norm,
                cert.ratio,
                pair,
                pair_ratio,
                tree_ratio,
                sub,
            )
        )
    fn = lp_norm(f, p)
    denom = q * fn * gm ** (1.0 / q)
    forest_c = total_pair / denom if denom > 0 else 0.0
    return TrialReport(trial, M, p, gm, float(np.mean(E)), c, rows, forest_c, max_defect, max_local, checks)


def random_instance(M: int, p: float, rng: np.random.Generator, seed: int = 0) -> Instance:
    """One randomized pipeline input with ``||f||_p = 1`` (unless ``f = 0``)."""
    n = 1 << M
    kind = rng.choice(["gauss", "spike", "indicator", "sparse", "packets", "zero", "constant"], p=[0.3, 0.2, 0.2, 0.15, 0.1, 0.025, 0.025])
    if kind == "gauss":
        f = rng.standard_normal(n)
    elif kind == "spike":
        k = int(rng.integers(M + 1))
        f = np.zeros(n)
        pos = int(rng.integers(1 << k))
        f[pos << (M - k) : (pos + 1) << (M - k)] = 1.0
        f += 0.05 * rng.standard_normal(n) * rng.integers(2)
    elif kind == "indicator":
        f = (rng.random(n) < rng.uniform(0.02, 0.6)).astype(float)
    elif kind == "sparse":
        f = np.zeros(n)
        idx = rng.choice(n, size=int(rng.integers(1, 9)), replace=False)
        f[idx] = rng.standard_normal(idx.size) * 2.0 ** rng.integers(0, 6, idx.size)
    elif kind == "packets":
        f = np.zeros(n)
        for _ in range(int(rng.integers(1, 5))):
            L = int(rng.integers(M + 1))
            t = Tile(-L, int(rng.integers(1 << L)), int(rng.integers(1 << (M - L))))
            f += rng.standard_normal() * wave_packet(t, M)
    elif kind == "constant":
        f = np.ones(n)
    else:
        f = np.zeros(n)
    norm = lp_norm(f, p)
    if norm > 0:
        f = f / norm

    if rng.random() < 0.5:
        S = BitileCollection.full(M)
    else:
        full = BitileCollection.full(M).bitiles
        pick = rng.choice(len(full), size=int(rng.integers(1, 60)), replace=False)
        S = convex_hull(BitileCollection([full[i] for i in pick], M))
    N = argmax_choice(f) if rng.random() < 0.6 else rng.integers(0, n + 1, size=n)
    eps = None
    if rng.random() < 0.5:
        eps = {s: int(e) for s, e in zip(S, rng.choice([-1, 1], size=len(S)))}
    if rng.random() < 0.6:
        w = np.abs(model_sum(S, eps, N, f))
        G = w >= np.quantile(w, rng.uniform(0.0, 0.9))
    else:
        G = rng.random(n) < rng.uniform(0.05, 1.0)
    if not G.any():
        G[int(rng.integers(n))] = True
    return Instance(f, S, eps, N, G, p, seed)


def _trial_seeds(seed: int, trials: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def trial_instance(cfg_res: Sequence[int], p_grid: Sequence[float], trial_seed: int) -> Instance:
    rng = np.random.default_rng(trial_seed)
    M = int(rng.choice(cfg_res))
    p = float(rng.choice(p_grid))
    return random_instance(M, p, rng, seed=trial_seed)


@dataclass
class PipelineResult:
    trials: list[TrialReport]
    maxima: dict[str, float]
    failures: list[str]
    reproducer: str | None = None

    def budgets_hold(self, budgets: dict) -> dict[str, bool]:
        return {k: v <= budgets[k] * (1 + 1e-9) for k, v in self.maxima.items() if k in budgets}

    @property
    def clean(self) -> bool:
        return not self.failures


def _run_trial(args) -> tuple[TrialReport, Instance | None]:
    t, resolutions, p_grid, tseed = args
    inst = trial_instance(resolutions, p_grid, tseed)
    try:
        return run_instance(inst, t), None
    except InvariantError as exc:
        rep = TrialReport(t, inst.S.M, inst.p, float(np.mean(inst.G)), 0.0, 0.0, [], 0.0, 0.0, 0.0, 0, str(exc))
        return rep, inst


def dump_scenario(inst: Instance, directory, name: str = "reproducer") -> Path:
    """Write signal, choice, bitiles and a scenario JSON that replays ``inst``."""
    from .io import write_bitiles, write_choice, write_scenario, write_signal

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_signal(d / f"{name}.signal", inst.f)
    write_choice(d / f"{name}.choice", inst.N)
    write_bitiles(d / f"{name}.bitiles", inst.S, inst.eps)
    scenario = {
        "signal": f"{name}.signal",
        "choice": f"{name}.choice",
        "bitiles": f"{name}.bitiles",
        "G": np.nonzero(inst.G)[0].tolist(),
        "p": inst.p,
        "seed": inst.seed,
    }
    path = d / f"{name}.json"
    write_scenario(path, scenario)
    return path


def pipeline_verify(
    cfg: ExperimentConfig, resolutions: Sequence[int] | None = None, dump_dir=None
) -> PipelineResult:
    """Randomized trials of the full reduction. Stops at the first hard failure
    and dumps a reproducer when ``dump_dir`` is given."""
    resolutions = tuple(resolutions or (cfg.resolution,))
    seeds = _trial_seeds(cfg.seed, cfg.trials)
    jobs = [(t, resolutions, cfg.p_grid, s) for t, s in enumerate(seeds)]
    reports: list[TrialReport] = []
    failures: list[str] = []
    reproducer = None
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = pool.map(_run_trial, jobs, chunksize=8)
            outcome = list(results)
    else:
        outcome = map(_run_trial, jobs)
    for rep, bad in outcome:
        reports.append(rep)
        if bad is not None:
            failures.append(f"trial {rep.trial}: {rep.failure}")
            if dump_dir is not None:
                reproducer = str(dump_scenario(bad, dump_dir, f"trial{rep.trial}"))
            break
    maxima = {k: 0.0 for k in ("tops", "cz", "tree", "forest", "subspace")}
    for rep in reports:
        for k, v in rep.maxima().items():
            maxima[k] = max(maxima[k], v)
    return PipelineResult(reports, maxima, failures, reproducer)


# --------------------------------------------------------------------- CSV


def rows_to_csv(rows: Sequence[dict], path=None) -> str:
    """Deterministic CSV text (floats in ``repr`` form); written when ``path`` is set."""
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def gnuplot_script(csv_path, x: str, y: str, title: str = "", logscale: bool = True) -> str:
    """Data-only plotting: a gnuplot script reading the CSV by column name."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        f"set ylabel '{y}'",
    ]
    if title:
        lines.append(f"set title '{title}'")
    if logscale:
        lines.append("set logscale xy")
    lines.append(f"plot '{csv_path}' using (column('{x}')):(column('{y}')) with linespoints")
    return "\n".join(lines) + "\n"
