"""Point-gap topology of twisted-boundary spectra.

Two independent routes to the same integer are provided: the phase of
``det(H(phi) - E)`` accumulated over the twist (:func:`winding_number`) and
ray crossings of the traced band loops (:func:`enclosure`).  Tests check
that they agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from .errors import ResolutionError, SpecificationError
from .kernels import polyline_distance, polyline_winding, signed_area
from .lattice import LatticeSpec, assemble, twisted
from .spectral import (DEFAULT_NK, SpectralLoop, Spectrum, balance_scaling, balanced,
                       parallel_map, point_set_diameter, spectral_loop)

EPS_LOOP_REL = 1e-3
EPS_DEG = 1e-8
MAX_REFINE_DEPTH = 16

Enclosure = Literal["inside", "on", "outside"]


class _OnLoop:
    __slots__ = ()

    def __repr__(self):
        return "ON_LOOP"


ON_LOOP = _OnLoop()


@dataclass(frozen=True)
class WindingResult:
    value: int | _OnLoop
    phase_trace: float

    @property
    def on_loop(self) -> bool:
        return self.value is ON_LOOP


def loop_tolerance(loop: SpectralLoop, eps_loop: float | None = None) -> float:
    return EPS_LOOP_REL * loop.diameter if eps_loop is None else float(eps_loop)


def loop_distance(loop: SpectralLoop, energies) -> np.ndarray:
    energies = np.atleast_1d(np.asarray(energies, dtype=complex))
    out = np.full(energies.shape, np.inf)
    for verts in loop.loops():
        out = np.minimum(out, polyline_distance(verts, energies))
    return out


def _collapsed(verts, eps) -> bool:
    return abs(signed_area(verts)) <= eps * eps


# -- determinant phase -------------------------------------------------------

def _det_phase(B, E):
    """``arg det(B - E)`` from an LU factorisation; ``None`` if singular."""
    n = B.shape[0]
    lu, piv = scipy.linalg.lu_factor(B - E * np.eye(n), check_finite=False)
    u = np.diagonal(lu)
    if np.any(u == 0):
        return None
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    return float(np.angle(np.prod(u / np.abs(u)))) + np.pi * (swaps % 2)


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def winding_number(spec: LatticeSpec, energy: complex, n_k: int = DEFAULT_NK,
                   loop: SpectralLoop | None = None, eps_loop: float | None = None,
                   workers=None) -> WindingResult:
    """Winding of ``det(H(phi) - E)`` around zero as ``phi`` runs over one period.

    ``loop`` (traced on demand if omitted) only serves the on-loop test.
    Intervals whose phase step reaches pi/2 are bisected up to
    ``MAX_REFINE_DEPTH`` times before giving up with :class:`ResolutionError`.
    """
    energy = complex(energy)
    if not np.isfinite(energy.real) or not np.isfinite(energy.imag):
        raise SpecificationError("reference energy must be finite")
    if loop is None:
        loop = spectral_loop(spec, n_k, workers=workers)
    if loop_distance(loop, energy)[0] < loop_tolerance(loop, eps_loop):
        return WindingResult(ON_LOOP, float("nan"))

    d = balance_scaling(assemble(spec, twisted(0.0)))

    def phase(phi):
        B, _ = balanced(assemble(spec, twisted(phi)), d)
        return _det_phase(B, energy)

    phis = 2 * np.pi * np.arange(n_k + 1) / n_k
    values = parallel_map(phase, phis, workers)
    if any(v is None for v in values):
        return WindingResult(ON_LOOP, float("nan"))

    total = 0.0
    for k in range(n_k):
        total += _refined_step(phase, phis[k], phis[k + 1], values[k], values[k + 1], 0)
    value = int(round(total / (2 * np.pi)))
    if abs(total - 2 * np.pi * value) >= 0.01:
        raise ResolutionError(f"phase trace {total:.6f} is not a multiple of 2 pi", phi=None)
    return WindingResult(value, total)


def _refined_step(phase, a, b, pa, pb, depth):
    step = _wrap(pb - pa)
    if abs(step) < np.pi / 2:
        return step
    if depth >= MAX_REFINE_DEPTH:
        raise ResolutionError(
            f"phase step {step:.3f} rad near phi={a:.6g} persists after {depth} refinements",
            phi=float(a))
    m = 0.5 * (a + b)
    pm = phase(m)
    if pm is None:
        raise ResolutionError(f"reference energy lies on the spectrum at phi={m:.6g}", phi=float(m))
    return (_refined_step(phase, a, m, pa, pm, depth + 1)
            + _refined_step(phase, m, b, pm, pb, depth + 1))


# -- loop enclosure ----------------------------------------------------------

@dataclass(frozen=True)
class EnclosureResult:
    kind: Enclosure
    crossings: int
    distance: float


def enclosure_many(loop: SpectralLoop, energies, eps_loop: float | None = None
                   ) -> list[EnclosureResult]:
    """Classify energies as inside, on or outside the traced loop.

    Inside means some closed band curve winds around the energy; the summed
    winding is reported as ``crossings`` and can cancel between curves of
    opposite orientation.  Area-collapsed loops (straight segments) only take
    part in the on test.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=complex))
    eps = loop_tolerance(loop, eps_loop)
    dist = loop_distance(loop, energies)
    crossings = np.zeros(energies.shape, dtype=np.int64)
    wound = np.zeros(energies.shape, dtype=bool)
    for verts in loop.loops():
        if not _collapsed(verts, eps):
            w = polyline_winding(verts, energies)
            crossings += w
            wound |= w != 0
    out = []
    for dm, c, hit in zip(dist, crossings, wound):
        kind = "on" if dm < eps else ("inside" if hit else "outside")
        out.append(EnclosureResult(kind, int(c), float(dm)))
    return out


def enclosure(loop: SpectralLoop, energy: complex, eps_loop: float | None = None) -> EnclosureResult:
    return enclosure_many(loop, [energy], eps_loop)[0]


# -- line gap ---------------------------------------------------------------

@dataclass(frozen=True)
class LineGapReport:
    """OBC eigenvalues in the line gap.

    That is every eigenvalue outside the loop, plus those on it whose host
    curve is point-like (diameter below ``eps_loop``): bound states whose
    energy does not move with the twist.  ``indices`` point into the OBC
    spectrum; ``degenerate_groups`` partitions positions in
    ``in_gap_energies`` by single linkage at ``eps_deg``.
    """

    indices: tuple[int, ...]
    in_gap_energies: np.ndarray
    enclosures: tuple[Enclosure, ...]
    degenerate_groups: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.indices)

    def paired(self) -> set[int]:
        """OBC indices belonging to a degenerate group of size at least two."""
        return {self.indices[i] for g in self.degenerate_groups if len(g) > 1 for i in g}


def on_pointlike(loop: SpectralLoop, energies, eps_loop: float | None = None) -> np.ndarray:
    """True where an energy lies within ``eps_loop`` of a closed curve narrower than ``eps_loop``."""
    energies = np.atleast_1d(np.asarray(energies, dtype=complex))
    eps = loop_tolerance(loop, eps_loop)
    hit = np.zeros(energies.shape, dtype=bool)
    for verts in loop.loops():
        if point_set_diameter(verts) < eps:
            hit |= polyline_distance(verts, energies) < eps
    return hit


def degenerate_groups(energies, eps_deg: float = EPS_DEG) -> tuple[tuple[int, ...], ...]:
    energies = np.asarray(energies, dtype=complex)
    n = len(energies)
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(energies[i] - energies[j]) <= eps_deg:
                parent[root(j)] = root(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


def line_gap_states(obc: Spectrum, loop: SpectralLoop, eps_loop: float | None = None,
                    eps_deg: float = EPS_DEG, encl: list[EnclosureResult] | None = None
                    ) -> LineGapReport:
    if encl is None:
        encl = enclosure_many(loop, obc.eigenvalues, eps_loop)
    bound = on_pointlike(loop, obc.eigenvalues, eps_loop)
    idx = tuple(i for i, e in enumerate(encl)
                if e.kind == "outside" or (e.kind == "on" and bound[i]))
    energies = obc.eigenvalues[list(idx)]
    return LineGapReport(idx, energies, tuple(encl[i].kind for i in idx),
                         degenerate_groups(energies, eps_deg))


# -- time reversal -----------------------------------------------------------

def sigma_y_operator(n_cells: int) -> np.ndarray:
    """``I_n (x) sigma_y`` acting on (A, B) cells."""
    sy = np.array([[0, -1j], [1j, 0]])
    return np.kron(np.eye(n_cells), sy)


def symmetry_defect(H, T) -> float:
    """``||T H^T T^-1 - H||_F``; zero certifies ``T H^T T^-1 = H``."""
    H = np.asarray(H, dtype=complex)
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise SpecificationError(f"T must be square, got shape {T.shape}")
    if T.shape != H.shape:
        raise SpecificationError(
            f"T has dimension {T.shape[0]} but H has dimension {H.shape[0]}"
            + (" (odd: pass the defect-free chain)" if H.shape[0] % 2 else ""))
    n = T.shape[0]
    if np.abs(T.conj().T @ T - np.eye(n)).max() > 1e-12:
        raise SpecificationError("T is not unitary within 1e-12")
    return float(np.linalg.norm(T @ H.T @ T.conj().T - H))
