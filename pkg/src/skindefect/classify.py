"""State taxonomy: skin, defect, hybrid skin-defect, topological edge, extended.

Labels come from a fixed rule list over localization weights and the
position of the energy relative to the defect-supercell loop.  Two scans
built on top of it: the critical chain length at which hybrid states
disappear and the gap-closure scan of the defect-free SSH chain.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .builders import (HnParams, SshParams, apply_defect_strength, build_hn, build_ssh,
                       ssh_bloch)
from .errors import SpecificationError
from .lattice import LatticeSpec, assemble
from .spectral import (DEFAULT_NK, SpectralLoop, Spectrum, default_workers, eigensolve, eigvals,
                       obc_spectrum, parallel_map, spectral_loop, twist_grid)
from .topology import (EPS_DEG, EnclosureResult, LineGapReport, degenerate_groups,
                       enclosure_many, line_gap_states, loop_tolerance)

Label = Literal["skin", "defect", "hybrid", "edge", "extended"]
LABELS: tuple[Label, ...] = ("skin", "defect", "hybrid", "edge", "extended")
ZERO_MODE_TOL = 1e-8


@dataclass(frozen=True)
class Thresholds:
    theta_b: float = 0.25
    theta_d: float = 0.25
    w: int = 5
    eps_loop: float | None = None  # None: 1e-3 of the loop diameter
    eps_deg: float = EPS_DEG

    def __post_init__(self):
        if not isinstance(self.w, (int, np.integer)) or self.w < 1:
            raise SpecificationError(f"window w must be a positive integer, got {self.w!r}")
        for name in ("theta_b", "theta_d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SpecificationError(f"{name}={v} outside [0, 1]")
        if self.eps_loop is not None and not self.eps_loop > 0:
            raise SpecificationError("eps_loop must be positive")
        if not self.eps_deg > 0:
            raise SpecificationError("eps_deg must be positive")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class LocalizationMetrics:
    ipr: float
    com: float
    w_left: float
    w_right: float
    w_defect: float

    @property
    def boundary(self) -> float:
        return max(self.w_left, self.w_right)


def localization_metrics(psi, defect_index: int, w: int = 5) -> LocalizationMetrics:
    """Weights of ``|psi|^2`` in the end windows and around ``defect_index`` (0-based)."""
    prob = np.abs(np.asarray(psi)) ** 2
    n = len(prob)
    if n < 4 * w + 2:
        raise SpecificationError(f"chain of {n} sites is too short for window w={w} (need {4 * w + 2})")
    d = int(defect_index)
    if d - w < w or d + w > n - w - 1:
        raise SpecificationError(
            f"defect window [{d - w}, {d + w}] overlaps an end window of width {w} (N={n})")
    total = prob.sum()
    if total == 0:
        raise SpecificationError("zero state vector")
    prob = prob / total
    return LocalizationMetrics(
        ipr=float(np.sum(prob ** 2)),
        com=float(np.arange(n) @ prob),
        w_left=float(prob[:w].sum()),
        w_right=float(prob[n - w:].sum()),
        w_defect=float(prob[d - w:d + w + 1].sum()),
    )


def classify_state(metrics: LocalizationMetrics, enclosure: str, paired: bool,
                   thresholds: Thresholds = DEFAULT_THRESHOLDS) -> Label:
    """First matching rule wins.

    ``paired`` marks membership of a degenerate group of line-gap energies;
    an edge label needs it together with an energy outside the loop.
    """
    tb, td = thresholds.theta_b, thresholds.theta_d
    edge_heavy = metrics.boundary > tb
    defect_heavy = metrics.w_defect > td
    if enclosure == "outside" and paired and edge_heavy and not defect_heavy:
        return "edge"
    if enclosure in ("on", "outside") and defect_heavy and not edge_heavy:
        return "defect"
    if defect_heavy and edge_heavy:
        return "hybrid"
    if enclosure == "inside" and edge_heavy:
        return "skin"
    return "extended"


@dataclass(frozen=True)
class StateRecord:
    index: int
    energy: complex
    metrics: LocalizationMetrics
    enclosure: str
    label: Label
    residual: float


@dataclass(frozen=True)
class Classification:
    spectrum: Spectrum
    loop: SpectralLoop
    line_gap: LineGapReport
    records: tuple[StateRecord, ...]

    def counts(self) -> dict[str, int]:
        c = Counter(r.label for r in self.records)
        return {k: c.get(k, 0) for k in LABELS}

    def labelled(self, label: Label) -> list[StateRecord]:
        return [r for r in self.records if r.label == label]

    def nearest(self, energy: complex) -> StateRecord:
        return self.records[self.spectrum.nearest(energy)]


def classify_spectrum(spec: LatticeSpec, defect_index: int,
                      thresholds: Thresholds = DEFAULT_THRESHOLDS, n_k: int = DEFAULT_NK,
                      workers=None, backend: str = "lapack") -> Classification:
    spectrum = obc_spectrum(spec, backend=backend)
    loop = spectral_loop(spec, n_k, workers=workers, backend=backend)
    encl: list[EnclosureResult] = enclosure_many(loop, spectrum.eigenvalues, thresholds.eps_loop)
    gap = line_gap_states(spectrum, loop, thresholds.eps_loop, thresholds.eps_deg, encl=encl)
    paired = gap.paired()

    def record(i):
        m = localization_metrics(spectrum.eigenvectors[:, i], defect_index, thresholds.w)
        label = classify_state(m, encl[i].kind, i in paired, thresholds)
        return StateRecord(i, complex(spectrum.eigenvalues[i]), m, encl[i].kind, label,
                           float(spectrum.residuals[i]))

    records = tuple(parallel_map(record, range(len(spectrum)), workers))
    return Classification(spectrum, loop, gap, records)


def classify_hn(params: HnParams, **kw) -> Classification:
    return classify_spectrum(build_hn(params), params.defect_index, **kw)


def classify_ssh(params: SshParams, **kw) -> Classification:
    return classify_spectrum(build_ssh(params), params.defect_index, **kw)


# -- defect-strength continuation ------------------------------------------

def trivial_defect_energy(params: SshParams, step: float = 0.005, backend: str = "lapack") -> complex:
    """Energy of the state bound to the bare defect site, followed in ``p``.

    At ``p = 0`` the defect site is cut loose and carries an exact zero
    mode.  The eigenvalue is continued to ``params.p`` by nearest-neighbour
    matching on a grid no coarser than ``step``.  Strong-defect records
    (``p is None``) return that zero mode directly.
    """
    p_end = 0.0 if params.p is None else float(params.p)
    n = max(1, int(np.ceil(p_end / step)))
    energy = 0j
    for p in np.linspace(0.0, p_end, n + 1):
        ev = eigvals(assemble(build_ssh(apply_defect_strength(params, float(p)))), backend=backend)
        energy = complex(ev[np.argmin(np.abs(ev - energy))])
    return energy


@dataclass(frozen=True)
class DefectSplit:
    trivial: StateRecord | None  # None when the followed state is not defect-labelled
    nontrivial: tuple[StateRecord, ...]


def split_defects(result: Classification, trivial_energy: complex) -> DefectSplit:
    """Separate the followed defect-site state from the other defect-labelled states."""
    rec = result.nearest(trivial_energy)
    trivial = rec if rec.label == "defect" else None
    others = tuple(r for r in result.labelled("defect") if r.index != rec.index)
    return DefectSplit(trivial, others)


# -- critical size -----------------------------------------------------------

def hybrid_count(params: HnParams, thresholds: Thresholds = DEFAULT_THRESHOLDS,
                 backend: str = "lapack") -> int:
    """Hybrid states of the OBC chain, the exact zero mode excluded.

    The hybrid rule reads only localization weights, so no loop is traced.
    """
    s = eigensolve(assemble(build_hn(params)), backend=backend)
    count = 0
    for i, e in enumerate(s.eigenvalues):
        if abs(e) < ZERO_MODE_TOL:
            continue
        m = localization_metrics(s.eigenvectors[:, i], params.defect_index, thresholds.w)
        if m.w_defect > thresholds.theta_d and m.boundary > thresholds.theta_b:
            count += 1
    return count


def critical_size(base: HnParams, sizes, thresholds: Thresholds = DEFAULT_THRESHOLDS,
                  workers=None, backend: str = "lapack") -> int | None:
    """Smallest ``N`` in ``sizes`` from which on every listed size is free of hybrids.

    Hybrid counts flicker between zero and one or two for a while before
    dying out, so the first hybrid-free size is not a useful threshold.  The
    scan runs downward from the largest size and stops at the first chain
    that still hosts a hybrid.  ``None`` if even the largest size has one.
    Each size keeps the defect at ``N // 2`` (1-based) and every other field
    of ``base``.
    """
    sizes = [int(n) for n in sizes]
    if not sizes or sizes != sorted(set(sizes)):
        raise SpecificationError("sizes must be a non-empty strictly ascending sequence")
    step = max(1, default_workers() if workers is None else int(workers))
    found = None
    desc = sizes[::-1]
    for start in range(0, len(desc), step):
        chunk = desc[start:start + step]
        counts = parallel_map(
            lambda n: hybrid_count(replace(base, n_sites=n, defect_site=n // 2), thresholds, backend),
            chunk, workers)
        for n, c in zip(chunk, counts):
            if c:
                return found
            found = n
    return found


# -- gap scan ----------------------------------------------------------------

@dataclass(frozen=True)
class GapScanRow:
    t: float
    gap_width: float  # negative when the bands overlap along the real axis
    max_imag: float
    edge_present: bool
    edge_energies: tuple[complex, ...]

    @property
    def gap_open(self) -> bool:
        return self.gap_width > 0.0


def band_gap_width(params: SshParams, n_k: int = 2048) -> float:
    """Real-line gap between the two Bloch bands: ``min Re E+ - max Re E-``.

    Bands are labelled by real part at each ``k``; a real-part crossing at a
    single ``k`` therefore already reads as a closed gap.
    """
    bands = np.linalg.eigvals(ssh_bloch(params, twist_grid(n_k)))
    re = np.sort(bands.real, axis=1)
    return float(re[:, 1].min() - re[:, 0].max())


def gap_scan_point(params: SshParams, n_k: int = 128, thresholds: Thresholds = DEFAULT_THRESHOLDS,
                   backend: str = "lapack") -> GapScanRow:
    """One ``t`` of the scan.

    Edge states are OBC energies outside the twisted-boundary loop of the
    same finite chain that pair up within the loop resolution ``eps_loop``.
    On a 20-site chain the pair splits by about 1e-4, far above ``eps_deg``.
    """
    spec = build_ssh(params, with_defect=False)
    spectrum = obc_spectrum(spec, backend=backend)
    loop = spectral_loop(spec, n_k, workers=1, backend=backend)
    encl = enclosure_many(loop, spectrum.eigenvalues, thresholds.eps_loop)
    outside = spectrum.eigenvalues[[x.kind == "outside" for x in encl]]
    groups = degenerate_groups(outside, loop_tolerance(loop, thresholds.eps_loop))
    edge = tuple(complex(outside[i]) for g in groups if len(g) > 1 for i in g)
    return GapScanRow(float(params.t), band_gap_width(params),
                      float(np.abs(spectrum.eigenvalues.imag).max()), bool(edge), edge)


def gap_scan(base: SshParams, t_values, n_k: int = 128,
             thresholds: Thresholds = DEFAULT_THRESHOLDS, workers=None,
             backend: str = "lapack") -> list[GapScanRow]:
    """Sweep ``t`` over the defect-free chain built from ``base``."""
    return parallel_map(lambda t: gap_scan_point(replace(base, t=float(t)), n_k, thresholds, backend),
                        list(t_values), workers)


def closure_brackets(rows: list[GapScanRow]) -> list[tuple[float, float]]:
    """Consecutive grid points between which the gap opens or closes."""
    return [(a.t, b.t) for a, b in zip(rows, rows[1:]) if a.gap_open != b.gap_open]
