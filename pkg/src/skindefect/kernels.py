"""Inner loops of band tracking and point-versus-loop geometry.

Every kernel has a numba version (``*_nb``) and a vectorised numpy version
(``*_np``) with identical results away from exact ties; the public name is
bound to one of them by :mod:`skindefect._jit`.
"""
import numpy as np

from ._jit import njit, select


# -- greedy nearest-neighbour band tracking ---------------------------------

@njit
def _match_nb(prev, curr):
    # same mutual-nearest-neighbour rounds as _match_np
    n = prev.shape[0]
    D = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            D[i, j] = abs(prev[i] - curr[j])
    perm = np.full(n, -1, dtype=np.int64)
    row_free = np.ones(n, dtype=np.bool_)
    col_free = np.ones(n, dtype=np.bool_)
    r_best = np.empty(n, dtype=np.int64)
    c_best = np.empty(n, dtype=np.int64)
    left = n
    while left > 0:
        for i in range(n):
            if row_free[i]:
                best, arg = np.inf, -1
                for j in range(n):
                    if col_free[j] and D[i, j] < best:
                        best, arg = D[i, j], j
                r_best[i] = arg
        for j in range(n):
            if col_free[j]:
                best, arg = np.inf, -1
                for i in range(n):
                    if row_free[i] and D[i, j] < best:
                        best, arg = D[i, j], i
                c_best[j] = arg
        for i in range(n):
            if row_free[i] and c_best[r_best[i]] == i:
                perm[i] = r_best[i]
        for i in range(n):
            if row_free[i] and perm[i] >= 0:
                row_free[i] = False
                col_free[perm[i]] = False
                left -= 1
    return perm


@njit
def _ambiguous_nb(prev, curr, perm, tol):
    n = prev.shape[0]
    owner = np.empty(n, dtype=np.int64)
    for i in range(n):
        owner[perm[i]] = i
    for i in range(n):
        j = perm[i]
        d1 = abs(prev[i] - curr[j])
        for k in range(n):
            if k != j and abs(curr[k] - curr[j]) > tol:
                # rows starting from the same value are interchangeable
                if abs(abs(prev[i] - curr[k]) - d1) <= tol and abs(prev[owner[k]] - prev[i]) > tol:
                    return i
    return -1


@njit
def _track_nb(slices, tol):
    n_k, n = slices.shape
    paths = np.empty_like(slices)
    paths[0] = slices[0]
    bad = -1
    for s in range(1, n_k):
        perm = _match_nb(paths[s - 1], slices[s])
        if bad < 0 and _ambiguous_nb(paths[s - 1], slices[s], perm, tol) >= 0:
            bad = s
        for i in range(n):
            paths[s, i] = slices[s, perm[i]]
    return paths, bad


def _match_np(prev, curr):
    # Rounds of mutual nearest neighbours reproduce the global greedy order.
    D = np.abs(prev[:, None] - curr[None, :])
    perm = np.full(len(prev), -1, dtype=np.int64)
    rows = np.arange(len(prev))
    cols = np.arange(len(curr))
    while rows.size:
        sub = D[np.ix_(rows, cols)]
        r_best = sub.argmin(axis=1)
        c_best = sub.argmin(axis=0)
        mutual = c_best[r_best] == np.arange(rows.size)
        perm[rows[mutual]] = cols[r_best[mutual]]
        taken = np.zeros(cols.size, dtype=bool)
        taken[r_best[mutual]] = True
        rows = rows[~mutual]
        cols = cols[~taken]
    return perm


def _ambiguous_np(prev, curr, perm, tol):
    D = np.abs(prev[:, None] - curr[None, :])
    chosen = curr[perm]
    distinct = np.abs(curr[None, :] - chosen[:, None]) > tol
    d1 = D[np.arange(len(prev)), perm]
    owner = np.empty(len(perm), dtype=np.int64)
    owner[perm] = np.arange(len(perm))
    twin = np.abs(prev[owner][None, :] - prev[:, None]) <= tol
    hit = distinct & (np.abs(D - d1[:, None]) <= tol) & ~twin
    rows = np.flatnonzero(hit.any(axis=1))
    return int(rows[0]) if rows.size else -1


def _track_np(slices, tol):
    paths = np.empty_like(slices)
    paths[0] = slices[0]
    bad = -1
    for s in range(1, slices.shape[0]):
        perm = _match_np(paths[s - 1], slices[s])
        if bad < 0 and _ambiguous_np(paths[s - 1], slices[s], perm, tol) >= 0:
            bad = s
        paths[s] = slices[s][perm]
    return paths, bad


match_nearest = select(_match_nb, _match_np)


def track_bands(slices, tol):
    """Follow each eigenvalue through consecutive rows of ``slices``.

    Returns ``(paths, bad)`` where ``paths[s, b]`` is band ``b`` at slice
    ``s`` and ``bad`` is the first slice whose pairing had two distinct
    candidates within ``tol`` of the best one (``-1`` if none).  Rows that
    start from equal values are interchangeable and never count as ambiguous.
    """
    slices = np.ascontiguousarray(slices, dtype=np.complex128)
    return select(_track_nb, _track_np)(slices, float(tol))


# -- closed polylines in the complex plane ----------------------------------

@njit
def _winding_nb(verts, points):
    out = np.zeros(points.shape[0], dtype=np.int64)
    m = verts.shape[0] - 1
    for p in range(points.shape[0]):
        px = points[p].real
        py = points[p].imag
        w = 0
        for k in range(m):
            ax = verts[k].real
            ay = verts[k].imag
            bx = verts[k + 1].real
            by = verts[k + 1].imag
            side = (bx - ax) * (py - ay) - (px - ax) * (by - ay)
            if ay <= py:
                if by > py and side > 0:
                    w += 1
            elif by <= py and side < 0:
                w -= 1
        out[p] = w
    return out


@njit
def _distance_nb(verts, points):
    out = np.empty(points.shape[0])
    m = verts.shape[0] - 1
    for p in range(points.shape[0]):
        best = np.inf
        for k in range(max(m, 1)):
            a = verts[k]
            b = verts[min(k + 1, verts.shape[0] - 1)]
            ab = b - a
            L = ab.real * ab.real + ab.imag * ab.imag
            if L > 0.0:
                ap = points[p] - a
                t = (ap.real * ab.real + ap.imag * ab.imag) / L
                t = min(1.0, max(0.0, t))
                dist = abs(points[p] - (a + t * ab))
            else:
                dist = abs(points[p] - a)
            if dist < best:
                best = dist
        out[p] = best
    return out


_CHUNK = 1 << 22


def _winding_np(verts, points):
    a = verts[:-1]
    b = verts[1:]
    out = np.zeros(points.shape[0], dtype=np.int64)
    step = max(1, _CHUNK // max(len(a), 1))
    for s in range(0, len(points), step):
        p = points[s:s + step, None]
        side = (b.real - a.real) * (p.imag - a.imag) - (p.real - a.real) * (b.imag - a.imag)
        up = (a.imag <= p.imag) & (b.imag > p.imag) & (side > 0)
        down = (a.imag > p.imag) & (b.imag <= p.imag) & (side < 0)
        out[s:s + step] = up.sum(axis=1) - down.sum(axis=1)
    return out


def _distance_np(verts, points):
    if len(verts) == 1:
        return np.abs(points - verts[0])
    a = verts[:-1]
    ab = verts[1:] - a
    L = np.abs(ab) ** 2
    safe = np.where(L > 0, L, 1.0)
    out = np.empty(points.shape[0])
    step = max(1, _CHUNK // len(a))
    for s in range(0, len(points), step):
        p = points[s:s + step, None]
        ap = p - a
        t = np.clip((ap.real * ab.real + ap.imag * ab.imag) / safe, 0.0, 1.0)
        t = np.where(L > 0, t, 0.0)
        out[s:s + step] = np.abs(p - (a + t * ab)).min(axis=1)
    return out


def polyline_winding(verts, points):
    """Signed winding number of the closed polyline ``verts`` around each point.

    ``verts`` must repeat its first vertex at the end.
    """
    verts = np.ascontiguousarray(verts, dtype=np.complex128)
    points = np.ascontiguousarray(np.atleast_1d(points), dtype=np.complex128)
    return select(_winding_nb, _winding_np)(verts, points)


def polyline_distance(verts, points):
    """Euclidean distance from each point to the polyline ``verts``."""
    verts = np.ascontiguousarray(verts, dtype=np.complex128)
    points = np.ascontiguousarray(np.atleast_1d(points), dtype=np.complex128)
    return select(_distance_nb, _distance_np)(verts, points)


def signed_area(verts):
    """Shoelace area of a closed polyline (positive when counter-clockwise)."""
    x = verts.real
    y = verts.imag
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))
