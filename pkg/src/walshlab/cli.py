"""Command-line driver.

Examples:
    walshlab transform --input f.signal --out f.spectrum
    walshlab sweep --resolution 10 --family spike+indicator --p-grid 1.05,1.1,1.2,1.5,2 --out sweep.csv
    walshlab pipeline --trials 1000 --resolutions 6,7,8 --out pipeline.csv
    walshlab verify-cz --scenario trial17.json

Exit status is 0 iff every hard invariant passes and every budget holds.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .decomposition import InvariantError
from .dyadic import BitileCollection
from .io import read_bitiles, read_choice, read_scenario, read_signal, write_signal
from .lacunary import lacunary_norm_scan, make_lacunary, zygmund_ratio
from .maximal import dual_exponent
from .walsh import argmax_choice, carleson_with_choice, fwht, inverse_fwht

DEFAULT_P_GRID = "1.05,1.1,1.2,1.35,1.5,1.75,2"
P_FLOOR = 1.01


def parse_p_grid(text: str) -> tuple[float, ...]:
    """``a:b:steps`` (inclusive linspace) or a comma list."""
    if ":" in text:
        a, b, steps = text.split(":")
        grid = np.linspace(float(a), float(b), int(steps))
        return tuple(float(round(p, 12)) for p in grid)
    return tuple(float(p) for p in text.split(",") if p.strip())


def parse_budgets(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, eq, value = item.partition("=")
        if not eq or name not in harness.DEFAULT_BUDGETS:
            raise ValueError(f"bad budget {item!r}; known: {', '.join(harness.DEFAULT_BUDGETS)}")
        out[name] = float(value)
    return out


def _config(args, p_floor: float | None = None) -> harness.ExperimentConfig:
    grid = parse_p_grid(args.p_grid)
    if p_floor is not None and min(grid) < p_floor:
        raise SystemExit(f"p grid below the floor {p_floor}: {min(grid)}")
    return harness.ExperimentConfig(
        resolution=args.resolution,
        p_grid=grid,
        family=args.family,
        trials=args.trials,
        seed=args.seed,
        budgets=parse_budgets(args.budget),
        out=args.out,
        workers=args.workers,
    )


def _emit(rows, out, label="rows"):
    text = harness.rows_to_csv(rows, out)
    if out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} {label} to {out}")


def _sidecar(out, suffix):
    if out is None:
        return None
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def _verdict(checks: dict[str, bool]) -> int:
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(checks.values()) else 1


def cmd_transform(args) -> int:
    f, is_spectrum = read_signal(args.input)
    out = inverse_fwht(f) if is_spectrum else fwht(f)
    back = fwht(out) if is_spectrum else inverse_fwht(out)
    err = float(np.max(np.abs(back - f)))
    print(f"roundtrip max error {err:.3e}")
    if args.out:
        write_signal(args.out, out, spectrum=not is_spectrum)
    return _verdict({"roundtrip <= 1e-12": err <= 1e-12})


def cmd_carleson(args) -> int:
    f, _ = read_signal(args.input)
    wf, N = carleson_with_choice(f)
    rows = [{"cell": i, "f": float(v), "Wf": float(w), "N": int(n)} for i, (v, w, n) in enumerate(zip(f, wf, N))]
    _emit(rows, args.out, "cells")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args, P_FLOOR)
    res = harness.carleson_sweep(cfg)
    _emit([r.as_dict() for r in res.rows], cfg.out)
    summary_path = _sidecar(cfg.out, ".summary.csv")
    _emit(res.summary(), summary_path, "summary rows")
    if args.plot and summary_path:
        Path(args.plot).write_text(harness.gnuplot_script(summary_path, "p", "maxRatio", "per-p maxima"))
    print(f"fit a={res.fit.a:.6g} beta={res.fit.beta:.6g}{' (degenerate)' if res.fit.degenerate else ''}")
    print(f"c/(p-1) envelope c={res.inverse_coefficient:.6g}")
    if not res.monotone:
        print("flag: per-p maxima not non-decreasing as p decreases")
    checks = {"rows self-consistent": all(r.consistent() for r in res.rows)}
    if res.restricted is not None:
        print(f"restricted weak type: max ratio/(p^2/(p-1)) = {res.restricted:.6g}")
        checks["restricted budget"] = res.restricted <= cfg.budgets["restricted"]
    return _verdict(checks)


def cmd_mixed(args) -> int:
    cfg = _config(args)
    res = harness.mixed_bound_check(cfg, harness.generate_family(cfg.family, cfg.resolution, cfg.seed))
    _emit([r.as_dict() for r in res.rows], cfg.out)
    print(f"suite maximum {res.maximum:.6g}")
    if not res.nested_monotone:
        print("flag: nested spikes decrease the weak-L1 norm")
    return _verdict({"derivation chain": res.derivation_ok, "mixed budget": res.maximum <= cfg.budgets["mixed"]})


def load_instance(path) -> harness.Instance:
    sc = read_scenario(path)
    f, _ = read_signal(sc["signal"])
    M = f.size.bit_length() - 1
    N = read_choice(sc["choice"]) if sc.get("choice") else argmax_choice(f)
    if sc.get("bitiles"):
        S, eps = read_bitiles(sc["bitiles"], M)
    else:
        S, eps = BitileCollection.full(M), None
    G = np.zeros(f.size, dtype=bool)
    G[np.asarray(sc.get("G", range(f.size)), dtype=int)] = True
    return harness.Instance(f, S, eps, N, G, float(sc["p"]), int(sc.get("seed", 0)))


def cmd_decompose(args) -> int:
    inst = load_instance(args.scenario)
    try:
        rep = harness.run_instance(inst)
    except InvariantError as exc:
        print(f"FAIL hard invariant: {exc}")
        return 1
    _emit([d.as_dict() for d in rep.deltas], args.out, "delta rows")
    return 0


def cmd_verify_cz(args) -> int:
    inst = load_instance(args.scenario)
    budgets = {**harness.DEFAULT_BUDGETS, **parse_budgets(args.budget)}
    try:
        rep = harness.run_instance(inst)
    except InvariantError as exc:
        print(f"FAIL hard invariant: {exc}")
        return 1
    if args.out:
        harness.rows_to_csv([d.as_dict() for d in rep.deltas], args.out)
    m = rep.maxima()
    print(f"{rep.checks} hard checks passed; |G|={rep.measure_G:.6g} |E|={rep.measure_E:.6g}")
    return _verdict({f"{k} <= {budgets[k]:g} (observed {v:.6g})": v <= budgets[k] * (1 + 1e-9) for k, v in m.items()})


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    res_list = tuple(int(x) for x in args.resolutions.split(",")) if args.resolutions else (cfg.resolution,)
    if max(res_list) > harness.MAX_RESOLUTION:
        raise SystemExit(f"resolution above {harness.MAX_RESOLUTION}")
    dump = Path(cfg.out).parent if cfg.out else Path(".")
    res = harness.pipeline_verify(cfg, res_list, dump_dir=dump)
    _emit([t.as_dict() for t in res.trials], cfg.out, "trials")
    for msg in res.failures:
        print(f"hard failure: {msg}")
    if res.reproducer:
        print(f"reproducer scenario: {res.reproducer}")
    print("budget  observed  limit")
    for k, v in res.maxima.items():
        print(f"{k:8s} {v:.6g}  {cfg.budgets[k]:g}")
    checks = {"hard invariants": res.clean}
    checks.update({f"{k} budget": ok for k, ok in res.budgets_hold(cfg.budgets).items()})
    return _verdict(checks)


def cmd_lacunary(args) -> int:
    cfg = _config(args, P_FLOOR)
    M = cfg.resolution
    count = args.count or max(1, int(math.log(max(2, (1 << M) / args.first), args.theta)) + 1)
    seq = [n for n in make_lacunary(args.theta, args.first, count).terms if n <= 1 << M]
    fam = harness.generate_family(cfg.family, M, cfg.seed)
    res = lacunary_norm_scan(seq, cfg.p_grid, fam)
    _emit(res.rows, cfg.out)
    _emit(res.summary, _sidecar(cfg.out, ".summary.csv"), "summary rows")
    print(f"sequence {seq}")
    print(f"log law envelope b={res.log_fit[1]:.6g} (least squares {res.log_fit[0]:.6g})")
    if not res.monotone:
        print("flag: per-p maxima increase with p")
    return _verdict({"log-law slack >= 0": all(r["logSlack"] >= -1e-12 for r in res.summary)})


def cmd_zygmund(args) -> int:
    cfg = _config(args)
    fam = harness.generate_family(cfg.family, cfg.resolution, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    thetas = [float(t) for t in args.thetas.split(",")]
    rows, worst, single_ok = [], 0.0, True
    for fid, f in fam:
        for theta in thetas:
            xs = make_lacunary(theta, rng.uniform(4 / theta, 4 / theta + 16), args.count, integer=False)
            one = make_lacunary(theta, xs.terms[0], 1, integer=False)
            for p in cfg.p_grid:
                r = zygmund_ratio(f, xs, p)
                s = zygmund_ratio(f, one, p)
                single_ok &= s <= 1 / dual_exponent(p) + 1e-9
                worst = max(worst, r)
                rows.append({"familyId": fid, "theta": theta, "p": p, "ratio": r, "singleRatio": s})
    _emit(rows, cfg.out)
    print(f"suite constant {worst:.6g}")
    return _verdict({"single-frequency bound": single_ok, "zygmund budget": worst <= cfg.budgets["zygmund"]})


def add_common(p: argparse.ArgumentParser, resolution=8, p_grid=DEFAULT_P_GRID, family="indicator"):
    p.add_argument("--resolution", "-M", type=int, default=resolution)
    p.add_argument("--p-grid", default=p_grid, help="a:b:steps or comma list, inside (1, 2]")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", default=family, help="e.g. spike+indicator:measure=2^-3")
    p.add_argument("--out", default=None)
    p.add_argument("--budget", action="append", metavar="NAME=VALUE")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walshlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="Paley-Walsh transform of a signal file (inverse for spectra)")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("carleson", help="Wf and the argmax choice function for a signal file")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_carleson)

    p = sub.add_parser("sweep", help="weak-L^p norm sweep of the Walsh-Carleson operator")
    add_common(p, family="spike+indicator")
    p.add_argument("--plot", help="write a gnuplot script for the summary")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mixed", help="L log L mixed bound over spike families")
    add_common(p, resolution=10, family="spike+multispike")
    p.set_defaults(func=cmd_mixed)

    for name, func, helptext in (
        ("decompose", cmd_decompose, "per-delta decomposition report for a scenario"),
        ("verify-cz", cmd_verify_cz, "hard checks and budgets for a scenario"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scenario", required=True)
        p.add_argument("--out")
        p.add_argument("--budget", action="append", metavar="NAME=VALUE")
        p.set_defaults(func=func)

    p = sub.add_parser("pipeline", help="randomized end-to-end verification")
    add_common(p, p_grid="1.1,1.25,1.5,2")
    p.add_argument("--resolutions", help="comma list sampled per trial, e.g. 6,7,8")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("lacunary", help="weak-L^p scan of the lacunary maximal operator")
    add_common(p, resolution=10)
    p.add_argument("--theta", type=float, default=2.0)
    p.add_argument("--first", type=float, default=1.0)
    p.add_argument("--count", type=int, default=0, help="terms (default: all up to 2^M)")
    p.set_defaults(func=cmd_lacunary)

    p = sub.add_parser("zygmund", help="lacunary Fourier coefficient sums against p' ||f||_p")
    add_common(p, p_grid="1.05,1.25,1.5,2", family="random-sign+indicator")
    p.add_argument("--thetas", default="1.5,2,4")
    p.add_argument("--count", type=int, default=12)
    p.set_defaults(func=cmd_zygmund)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
