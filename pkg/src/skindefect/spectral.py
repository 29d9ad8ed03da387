"""Dense non-Hermitian eigendecomposition and twist-angle spectral loops.

Skin-effect matrices under open boundaries are violently non-normal: the
eigenvector condition number grows like ``(t1/t2)**(N/2)``, and plain LAPACK
loses two or more digits by N=300.  Every solve therefore starts with a
diagonal similarity ``B = S^-1 H S`` chosen to minimise ``||B||_F`` (the
exact Osborne balance, found by Newton's method on its convex log-scale
objective).  Eigenvalues are unchanged; eigenvectors are mapped back with
``S`` and residuals are always measured against the original ``H``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.spatial import ConvexHull, QhullError

from . import qr
from .errors import BandMatchingError, SolverError, SpecificationError
from .kernels import match_nearest, track_bands
from .lattice import OPEN, Hopping, LatticeSpec, assemble, twisted

TOL_RESID = 1e-10
DEFAULT_NK = 512
MAX_NK = 8192


def default_workers() -> int:
    env = os.environ.get("NHSE_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise SpecificationError(f"NHSE_WORKERS must be a positive integer, got {env!r}")
        if n < 1:
            raise SpecificationError(f"NHSE_WORKERS must be a positive integer, got {env!r}")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def parallel_map(fn, items, workers=None):
    """Ordered map over ``items`` on a thread pool (LAPACK releases the GIL)."""
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# -- balancing ---------------------------------------------------------------

def balance_scaling(H, ridge=1e-10, max_iter=200, tol=1e-9):
    """Log-scales ``d`` so that ``diag(e^-d) H diag(e^d)`` has minimal Frobenius norm.

    Minimises ``sum_ij |H_ij|^2 exp(2 (d_j - d_i)) + ridge |d|^2``; the ridge
    keeps ``d`` bounded when ``H`` is reducible (e.g. a site nothing hops out of).
    """
    W = np.abs(np.asarray(H)) ** 2
    np.fill_diagonal(W, 0.0)
    n = W.shape[0]
    top = W.max() if n else 0.0
    if top == 0.0:
        return np.zeros(n)
    W /= top
    d = np.zeros(n)

    def objective(d):
        return np.sum(W * np.exp(2.0 * (d[None, :] - d[:, None]))) + ridge * d @ d

    f = objective(d)
    for _ in range(max_iter):
        M = W * np.exp(2.0 * (d[None, :] - d[:, None]))
        col = M.sum(axis=0)
        row = M.sum(axis=1)
        grad = 2.0 * (col - row) + 2.0 * ridge * d
        hess = -4.0 * (M + M.T)
        hess[np.diag_indices(n)] = 4.0 * (col + row) + 2.0 * ridge
        try:
            step = -scipy.linalg.solve(hess, grad, assume_a="sym", check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            step = -grad / np.maximum(np.diagonal(hess), 1e-300)
        slope = grad @ step
        a = 1.0
        while True:
            trial = objective(d + a * step)
            if trial <= f + 1e-4 * a * slope or a < 1e-12:
                break
            a *= 0.5
        d = d + a * step
        converged = f - trial <= tol * max(f, 1e-300) or np.max(np.abs(a * step)) < tol
        f = trial
        if converged:
            break
    return d - d.mean()


def balanced(H, d=None):
    """``(B, s)`` with ``B = S^-1 H S`` and ``s = diag(S)``."""
    if d is None:
        d = balance_scaling(H)
    s = np.exp(d)
    return H * s[None, :] / s[:, None], s


def spectral_radius_estimate(H, iterations=50) -> float:
    n = H.shape[0]
    x = np.ones(n, dtype=complex) + 1e-3 * np.arange(n)
    x /= np.linalg.norm(x)
    rho = 0.0
    for _ in range(iterations):
        y = H @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        rho = ny
        x = y / ny
    return float(rho)


# -- eigensolve ----------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k belongs to eigenvalues[k]
    residuals: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def nearest(self, energy) -> int:
        return int(np.argmin(np.abs(self.eigenvalues - energy)))


def _backend(name):
    if name == "lapack":
        return lambda B: scipy.linalg.eig(B, check_finite=False, overwrite_a=False)
    if name == "qr":
        return qr.qr_eig
    raise SpecificationError(f"unknown eigensolver backend {name!r}")


def sort_order(values):
    return np.lexsort((values.imag, values.real))


def eigensolve(H, backend="lapack", balance=True, tol_resid=TOL_RESID) -> Spectrum:
    """Full right eigendecomposition of a dense complex matrix.

    Pairs are sorted by (real, imaginary) part.  A pair whose residual
    ``||H v - E v||`` exceeds ``tol_resid * max(1, rho)`` gets one step of
    inverse iteration; :class:`SolverError` if it still fails.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
        raise SpecificationError(f"need a non-empty square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise SpecificationError("matrix has non-finite entries")
    n = H.shape[0]
    B, s = balanced(H) if balance else (H, np.ones(n))
    try:
        vals, vecs = _backend(backend)(B)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigensolver failed for dimension {n}: {exc}", dimension=n) from exc
    X = vecs * s[:, None]
    X /= np.linalg.norm(X, axis=0)
    order = sort_order(vals)
    vals = vals[order]
    X = X[:, order]
    res = np.linalg.norm(H @ X - X * vals, axis=0)
    bound = tol_resid * max(1.0, spectral_radius_estimate(H))
    for k in np.flatnonzero(res > bound):
        X[:, k], res[k] = _refine(H, vals[k], X[:, k])
        if res[k] > bound:
            raise SolverError(
                f"eigenpair {k} of a {n}x{n} matrix has residual {res[k]:.3e} > {bound:.3e}",
                dimension=n)
    return Spectrum(vals, X, res)


def _refine(H, lam, x):
    n = H.shape[0]
    shift = lam + 1e-14 * max(1.0, abs(lam))
    try:
        y = scipy.linalg.solve(H - shift * np.eye(n), x, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        return x, np.linalg.norm(H @ x - lam * x)
    y /= np.linalg.norm(y)
    r_new = np.linalg.norm(H @ y - lam * y)
    r_old = np.linalg.norm(H @ x - lam * x)
    return (y, r_new) if r_new < r_old else (x, r_old)


def eigvals(H, backend="lapack", scaling=None):
    """Eigenvalues only, sorted; ``scaling`` reuses precomputed balance log-scales."""
    B, _ = balanced(np.asarray(H, dtype=complex), scaling)
    if backend == "lapack":
        vals = scipy.linalg.eigvals(B, check_finite=False)
    else:
        vals = qr.qr_eigvals(B)
    return vals[sort_order(vals)]


def obc_spectrum(spec: LatticeSpec, backend="lapack") -> Spectrum:
    return eigensolve(assemble(spec, OPEN), backend=backend)


# -- twist sweeps ---------------------------------------------------------------

@dataclass(frozen=True)
class SpectralLoop:
    """Supercell spectra over a uniform twist grid, tracked into bands.

    ``band_paths`` has ``n_k + 1`` rows: row ``n_k`` is the state reached at
    ``phi = 2 pi``, which equals ``band_paths[0, successor[b]]``.  Bands are
    generally permuted by a full turn of the twist, so closed curves are the
    cycles of ``successor``; see :meth:`loops`.
    """

    twist_samples: np.ndarray
    energies: np.ndarray
    band_paths: np.ndarray
    successor: np.ndarray

    @property
    def n_k(self) -> int:
        return len(self.twist_samples)

    @property
    def n_bands(self) -> int:
        return self.energies.shape[1]

    def cycles(self) -> list[list[int]]:
        seen = np.zeros(self.n_bands, dtype=bool)
        out = []
        for b in range(self.n_bands):
            if seen[b]:
                continue
            cyc = []
            while not seen[b]:
                seen[b] = True
                cyc.append(b)
                b = int(self.successor[b])
            out.append(cyc)
        return out

    @cached_property
    def _loops(self):
        out = []
        for cyc in self.cycles():
            pts = np.concatenate([self.band_paths[:-1, b] for b in cyc])
            out.append(np.append(pts, pts[0]))
        return tuple(out)

    def loops(self) -> tuple[np.ndarray, ...]:
        """Closed polylines (first vertex repeated at the end), one per cycle."""
        return self._loops

    @cached_property
    def diameter(self) -> float:
        return point_set_diameter(self.energies.ravel())


def point_set_diameter(z) -> float:
    z = np.unique(np.asarray(z, dtype=complex))
    if len(z) < 2:
        return 0.0
    pts = np.column_stack([z.real, z.imag])
    try:
        hull = pts[ConvexHull(pts).vertices]
    except (QhullError, ValueError):
        # collinear: the extreme points are opposite corners of the bounding box
        return float(np.hypot(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    return _calipers(hull)


def _calipers(P) -> float:
    """Diameter of a convex polygon given counter-clockwise (rotating calipers)."""
    h = len(P)
    best = 0.0
    j = 1
    for i in range(h):
        ex, ey = P[(i + 1) % h] - P[i]
        while True:
            fx, fy = P[(j + 1) % h] - P[j]
            if ex * fy - ey * fx <= 0.0:
                break
            j = (j + 1) % h
        best = max(best, np.hypot(*(P[i] - P[j])), np.hypot(*(P[(i + 1) % h] - P[j])))
    return float(best)


def twist_grid(n_k: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_k) / n_k


def twisted_eigvals(spec: LatticeSpec, phis, workers=None, backend="lapack") -> np.ndarray:
    """Sorted eigenvalues of ``assemble(spec, twisted(phi))`` for each phi, shape (len(phis), N)."""
    d = balance_scaling(assemble(spec, twisted(0.0)))
    rows = parallel_map(lambda phi: eigvals(assemble(spec, twisted(phi)), backend, d), phis, workers)
    return np.array(rows).reshape(len(phis), spec.n_sites)


def spectral_loop(spec: LatticeSpec, n_k: int = DEFAULT_NK, workers=None,
                  max_n_k: int = MAX_NK, backend="lapack") -> SpectralLoop:
    """Trace the twisted-boundary spectrum of ``spec`` as closed band curves.

    The grid is doubled (up to ``max_n_k``) while consecutive slices cannot
    be paired unambiguously; :class:`BandMatchingError` reports the first
    offending angle if doubling does not help.
    """
    if n_k < 64:
        raise SpecificationError(f"n_k must be at least 64, got {n_k}")
    if not spec.has_wraps:
        raise SpecificationError("spectral loop needs at least one wrap bond")
    while True:
        phis = twist_grid(n_k)
        energies = twisted_eigvals(spec, phis, workers, backend)
        scale = max(1.0, float(np.abs(energies).max()))
        slices = np.vstack([energies, energies[:1]])
        paths, bad = track_bands(slices, 1e-9 * scale)
        if bad < 0:
            break
        if 2 * n_k > max_n_k:
            phi = float(2 * np.pi * bad / n_k)
            raise BandMatchingError(
                f"ambiguous band matching at phi={phi:.6f} with n_k={n_k}; increase n_k", phi=phi)
        n_k *= 2
    successor = np.asarray(match_nearest(paths[n_k - 1], energies[0]), dtype=np.intp)
    return SpectralLoop(phis, energies, paths, successor)


def repeat_cells(spec: LatticeSpec, copies: int) -> LatticeSpec:
    """Ring of ``copies`` supercells; wrap bonds now link neighbouring copies.

    Its spectrum at zero twist equals the union of the supercell spectra at
    ``phi = 2 pi j / copies``.
    """
    n = spec.n_sites
    hops = []
    for c in range(copies):
        base = c * n
        for h in spec.hoppings:
            if not h.wraps:
                hops.append(Hopping(h.from_site + base, h.to_site + base, h.amplitude))
                continue
            # to < from crosses the end forwards into the next copy
            step = 1 if h.to_site < h.from_site else -1
            target = c + step
            wraps = not 0 <= target < copies
            hops.append(Hopping(h.from_site + base, h.to_site + (target % copies) * n,
                                h.amplitude, wraps))
    onsite = None
    if spec.onsite:
        onsite = tuple((s + c * n, e) for c in range(copies) for s, e in spec.onsite)
    return LatticeSpec(n * copies, tuple(hops), onsite)
