"""Flat-file formats: signals, spectra, choice functions, bitile lists, scenarios."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dyadic import Bitile, BitileCollection, ResolutionError

SPECTRUM_HEADER = "#spectrum"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_signal(path, values, spectrum: bool = False) -> None:
    values = np.asarray(values, dtype=float)
    M = values.size.bit_length() - 1
    lines = [SPECTRUM_HEADER] if spectrum else []
    lines.append(str(M))
    lines.extend(_fmt(v) for v in values)
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal(path) -> tuple[np.ndarray, bool]:
    """Return ``(values, is_spectrum)``."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    spectrum = bool(lines) and lines[0] == SPECTRUM_HEADER
    if spectrum:
        lines = lines[1:]
    M = int(lines[0])
    values = np.array([float(v) for v in lines[1:]])
    if values.size != 1 << M:
        raise ResolutionError(f"{path}: expected {1 << M} values, found {values.size}")
    return values, spectrum


def write_choice(path, N) -> None:
    N = np.asarray(N, dtype=np.int64)
    M = N.size.bit_length() - 1
    Path(path).write_text("\n".join([str(M), *map(str, N.tolist())]) + "\n")


def read_choice(path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    M = int(lines[0])
    N = np.array([int(v) for v in lines[1:]], dtype=np.int64)
    if N.size != 1 << M:
        raise ResolutionError(f"{path}: expected {1 << M} values, found {N.size}")
    return N


def write_bitiles(path, S: BitileCollection, signs=None) -> None:
    """One bitile per line as ``j k n`` (plus a sign column when ``signs`` is given)."""
    lines = [f"# M={S.M}"]
    for s in S:
        row = f"{s.scale} {s.index} {s.freq}"
        if signs is not None:
            row += f" {int(signs.get(s, 0))}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")


def read_bitiles(path, M: int | None = None) -> tuple[BitileCollection, dict[Bitile, int] | None]:
    bitiles, signs = [], {}
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            if ln[1:].strip().startswith("M=") and M is None:
                M = int(ln[1:].strip()[2:])
            continue
        parts = ln.split()
        s = Bitile(int(parts[0]), int(parts[1]), int(parts[2]))
        bitiles.append(s)
        if len(parts) > 3:
            signs[s] = int(parts[3])
    if M is None:
        M = max((s.level for s in bitiles), default=0)
    return BitileCollection(bitiles, M), (signs or None)


def read_scenario(path) -> dict:
    """JSON scenario: ``signal``, ``choice``, ``G`` (cell list), ``p``, ``seed``,
    optional ``bitiles`` / ``signs``. Relative paths resolve against the file."""
    path = Path(path)
    sc = json.loads(path.read_text())
    for key in ("signal", "choice", "bitiles"):
        if sc.get(key) and not Path(sc[key]).is_absolute():
            sc[key] = str(path.parent / sc[key])
    return sc


def write_scenario(path, scenario: dict) -> None:
    Path(path).write_text(json.dumps(scenario, indent=2, sort_keys=True) + "\n")
