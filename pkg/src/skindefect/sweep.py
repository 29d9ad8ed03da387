"""Sweep orchestration and dataset files.

Every numeric CSV cell is ``repr(float)``, the shortest string that reads
back to the same double, so reruns on one platform are byte-identical
whatever the worker count.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .builders import HnParams, SshParams, build_hn, build_ssh
from .classify import (LABELS, Classification, classify_spectrum, critical_size,
                       split_defects, trivial_defect_energy)
from .config import RunConfig
from .errors import SkinDefectError
from .lattice import PERIODIC, assemble
from .plots import profiles_svg, spectrum_svg
from .spectral import SpectralLoop, Spectrum, eigensolve, parallel_map

STATE_COLUMNS = ("index", "re_energy", "im_energy", "label", "enclosure", "ipr", "com",
                 "w_left", "w_right", "w_defect", "residual")
SPECTRUM_COLUMNS = ("index", "re_energy", "im_energy", "residual")
LOOP_COLUMNS = ("cycle", "band", "k", "phi", "re_energy", "im_energy")
SWEEP_COLUMNS = ("value",) + tuple(f"n_{k}" for k in LABELS) + (
    "n_in_gap", "n_c", "trivial_defect", "min_residual", "max_residual")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0.0"  # folds -0.0
    return repr(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def states_csv(result: Classification) -> str:
    rows = []
    for r in result.records:
        m = r.metrics
        rows.append((r.index, r.energy.real, r.energy.imag, r.label, r.enclosure, m.ipr, m.com,
                     m.w_left, m.w_right, m.w_defect, r.residual))
    return csv_text(STATE_COLUMNS, rows)


def spectrum_csv(spectrum: Spectrum) -> str:
    return csv_text(SPECTRUM_COLUMNS, [
        (i, e.real, e.imag, r) for i, (e, r) in enumerate(zip(spectrum.eigenvalues, spectrum.residuals))])


def loop_csv(loop: SpectralLoop) -> str:
    rows = []
    n_k = loop.n_k
    for c, cyc in enumerate(loop.cycles()):
        for b in cyc:
            for k in range(n_k):
                z = loop.band_paths[k, b]
                rows.append((c, b, k, 2 * math.pi * k / n_k, z.real, z.imag))
    return csv_text(LOOP_COLUMNS, rows)


# -- runs ---------------------------------------------------------------------

def build_spec(params):
    return build_hn(params) if isinstance(params, HnParams) else build_ssh(params)


@dataclass(frozen=True)
class SweepRow:
    value: float | None
    counts: dict[str, int]
    n_in_gap: int
    n_c: int | None
    trivial_defect: bool | None  # SSH only
    min_residual: float
    max_residual: float

    def cells(self):
        return ((self.value,) + tuple(self.counts[k] for k in LABELS)
                + (self.n_in_gap, self.n_c, self.trivial_defect, self.min_residual, self.max_residual))


@dataclass(frozen=True)
class SweepResult:
    parameter: str | None
    rows: tuple[SweepRow, ...]
    classifications: tuple[Classification, ...]

    def to_csv(self) -> str:
        return csv_text(SWEEP_COLUMNS, [r.cells() for r in self.rows])


def classify_point(cfg: RunConfig, value=None, workers=None, backend="lapack") -> Classification:
    params = cfg.model_params(value)
    return classify_spectrum(build_spec(params), params.defect_index, cfg.thresholds,
                             cfg.n_k, workers=workers, backend=backend)


def _point(cfg: RunConfig, value, workers, backend, with_nc: bool):
    try:
        params = cfg.model_params(value)
        cls = classify_point(cfg, value, workers, backend)
        n_c = None
        if with_nc and isinstance(params, HnParams):
            n_c = critical_size(params, cfg.sizes(), cfg.thresholds, workers=1, backend=backend)
        trivial = None
        if isinstance(params, SshParams):
            trivial = split_defects(cls, trivial_defect_energy(params, backend=backend)).trivial is not None
    except SkinDefectError as exc:
        if value is None:
            raise
        tagged = type(exc)(f"at {cfg.sweep.parameter}={value!r}: {exc}")
        tagged.__dict__.update(exc.__dict__)
        raise tagged from exc
    res = cls.spectrum.residuals
    row = SweepRow(value, cls.counts(), len(cls.line_gap), n_c, trivial,
                   float(res.min()), float(res.max()))
    return row, cls


def run_sweep(cfg: RunConfig, workers=None, backend="lapack") -> SweepResult:
    """One row per sweep value in configured order (one row without a sweep).

    ``n_c`` is filled for HN models when ``n_range`` is configured.
    """
    values = cfg.sweep_values()
    with_nc = cfg.n_range is not None
    # points run concurrently; each point is then single-threaded
    inner = 1 if len(values) > 1 else workers
    out = parallel_map(lambda v: _point(cfg, v, inner, backend, with_nc), values,
                       workers if len(values) > 1 else 1)
    return SweepResult(cfg.sweep.parameter if cfg.sweep else None,
                       tuple(r for r, _ in out), tuple(c for _, c in out))


def point_spectrum(cfg: RunConfig, value=None, backend="lapack") -> Spectrum:
    spec = build_spec(cfg.model_params(value))
    H = assemble(spec, PERIODIC) if cfg.bc == "pbc" else assemble(spec)
    return eigensolve(H, backend=backend)


# -- file output ---------------------------------------------------------------

class OutputSet:
    """Writes files under one directory and deletes all of them if the run fails."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.written: list[Path] = []

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for p in self.written:
                p.unlink(missing_ok=True)
        return False

    def write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        self.written.append(path)
        path.write_text(text, encoding="utf-8", newline="")
        return path


def indexed(name: str, i: int | None) -> str:
    if i is None:
        return name
    p = Path(name)
    return str(p.with_name(f"{p.stem}_{i:03d}{p.suffix}"))


def write_point(out: OutputSet, cfg: RunConfig, cls: Classification, i: int | None = None,
                kinds=None) -> list[Path]:
    paths = []
    for kind, name in cfg.outputs:
        if kinds is not None and kind not in kinds:
            continue
        name = indexed(name, i)
        if kind == "states_csv":
            text = states_csv(cls)
        elif kind == "spectrum_csv":
            text = spectrum_csv(cls.spectrum)
        elif kind == "loop_csv":
            text = loop_csv(cls.loop)
        elif kind == "svg_spectrum":
            text = spectrum_svg(cls)
        else:
            if cfg.profiles is None:
                idx = [r.index for r in cls.labelled("defect")]
            else:
                idx = sorted({cls.spectrum.nearest(z) for z in cfg.profiles})
            text = profiles_svg(cls, idx)
        paths.append(out.write(name, text))
    return paths


def run(cfg: RunConfig, out_dir, workers=None, backend="lapack") -> SweepResult:
    """Classify every sweep point and write the configured outputs plus ``sweep.csv``."""
    with OutputSet(out_dir) as out:
        result = run_sweep(cfg, workers, backend)
        multi = cfg.sweep is not None
        for i, cls in enumerate(result.classifications):
            write_point(out, cfg, cls, i if multi else None)
        out.write("sweep.csv", result.to_csv())
    return result
