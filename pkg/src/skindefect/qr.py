"""Complex Schur decomposition by Householder-Hessenberg reduction and
single-shift (Wilkinson) QR sweeps, with eigenvectors recovered from the
triangular factor by back-substitution.

This is the in-house alternative to LAPACK ``zgeev`` used for
cross-validation and benchmarking.
"""
import numpy as np
import scipy.linalg

from ._jit import njit, select
from .errors import SolverError

EPS = np.finfo(float).eps
MAX_SWEEPS_PER_EIGENVALUE = 60


# -- Hessenberg reduction ---------------------------------------------------

@njit
def _hessenberg_nb(A):
    n = A.shape[0]
    H = A.copy()
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        v = H[k + 1:, k].copy()
        alpha = np.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
        if alpha == 0.0:
            continue
        x0 = v[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        v[0] += phase * alpha
        vn = np.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
        for i in range(m):
            v[i] /= vn
        for j in range(k, n):
            s = 0.0j
            for i in range(m):
                s += np.conj(v[i]) * H[k + 1 + i, j]
            for i in range(m):
                H[k + 1 + i, j] -= 2.0 * v[i] * s
        for i in range(n):
            s = 0.0j
            t = 0.0j
            for j in range(m):
                s += H[i, k + 1 + j] * v[j]
                t += Q[i, k + 1 + j] * v[j]
            for j in range(m):
                H[i, k + 1 + j] -= 2.0 * s * np.conj(v[j])
                Q[i, k + 1 + j] -= 2.0 * t * np.conj(v[j])
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H, Q


def _hessenberg_np(A):
    n = A.shape[0]
    H = A.copy()
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        v = H[k + 1:, k].copy()
        alpha = np.linalg.norm(v)
        if alpha == 0.0:
            continue
        phase = v[0] / abs(v[0]) if v[0] != 0 else 1.0
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


# -- shifted QR sweeps ------------------------------------------------------

def _givens_py(x, y):
    ax = abs(x)
    ay = abs(y)
    r = np.hypot(ax, ay)
    if r == 0.0:
        return 1.0, 0.0j
    if ax == 0.0:
        return 0.0, np.conj(y) / ay
    return ax / r, (x / ax) * np.conj(y) / r


def _shift_py(H, hi, it):
    a = H[hi - 1, hi - 1]
    b = H[hi - 1, hi]
    c = H[hi, hi - 1]
    d = H[hi, hi]
    if it % 11 == 0:
        # exceptional shift breaks cycles
        return d + 0.75 * abs(c) * (1.0 + 0.5j)
    half = 0.5 * (a - d)
    root = np.sqrt(half * half + b * c)
    # eigenvalue of the trailing 2x2 block closest to d
    if abs(half + root) >= abs(half - root):
        return d - (root - half)
    return d + (root + half)


_givens = njit(_givens_py)
_shift = njit(_shift_py)


@njit
def _schur_nb(H, Z):
    n = H.shape[0]
    hi = n - 1
    it = 0
    total = 0
    budget = MAX_SWEEPS_PER_EIGENVALUE * max(n, 1)
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm = max(norm, abs(H[i, j]))
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if s == 0.0:
                s = norm
            if abs(H[lo, lo - 1]) <= EPS * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            it = 0
            continue
        it += 1
        total += 1
        if total > budget:
            return -total
        mu = _shift(H, hi, it)
        x = H[lo, lo] - mu
        y = H[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            c, s = _givens(x, y)
            j0 = k - 1 if k > lo else lo
            for j in range(j0, n):
                a = H[k, j]
                b = H[k + 1, j]
                H[k, j] = c * a + s * b
                H[k + 1, j] = -np.conj(s) * a + c * b
            rmax = min(k + 2, hi)
            for i in range(rmax + 1):
                a = H[i, k]
                b = H[i, k + 1]
                H[i, k] = c * a + np.conj(s) * b
                H[i, k + 1] = -s * a + c * b
            for i in range(n):
                a = Z[i, k]
                b = Z[i, k + 1]
                Z[i, k] = c * a + np.conj(s) * b
                Z[i, k + 1] = -s * a + c * b
            if k > lo:
                H[k + 1, k - 1] = 0.0
    return total


def _schur_np(H, Z):
    n = H.shape[0]
    hi = n - 1
    it = 0
    total = 0
    budget = MAX_SWEEPS_PER_EIGENVALUE * max(n, 1)
    norm = np.abs(H).max() if n else 0.0
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1]) or norm
            if abs(H[lo, lo - 1]) <= EPS * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            it = 0
            continue
        it += 1
        total += 1
        if total > budget:
            return -total
        mu = _shift_py(H, hi, it)
        x = H[lo, lo] - mu
        y = H[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            c, s = _givens_py(x, y)
            G = np.array([[c, s], [-np.conj(s), c]])
            j0 = k - 1 if k > lo else lo
            H[k:k + 2, j0:] = G @ H[k:k + 2, j0:]
            rmax = min(k + 2, hi)
            GH = G.conj().T
            H[:rmax + 1, k:k + 2] = H[:rmax + 1, k:k + 2] @ GH
            Z[:, k:k + 2] = Z[:, k:k + 2] @ GH
            if k > lo:
                H[k + 1, k - 1] = 0.0
    return total


# -- eigenvectors of the triangular factor ----------------------------------

@njit
def _triangular_vectors_nb(T):
    n = T.shape[0]
    Y = np.zeros((n, n), dtype=np.complex128)
    tnorm = 0.0
    for i in range(n):
        for j in range(i, n):
            tnorm = max(tnorm, abs(T[i, j]))
    smin = max(EPS * tnorm, 1e-300)
    for k in range(n):
        Y[k, k] = 1.0
        lam = T[k, k]
        for i in range(k - 1, -1, -1):
            s = 0.0j
            for j in range(i + 1, k + 1):
                s += T[i, j] * Y[j, k]
            den = T[i, i] - lam
            if abs(den) < smin:
                den = smin
            Y[i, k] = -s / den
            big = abs(Y[i, k])
            if big > 1e150:
                for j in range(i, k + 1):
                    Y[j, k] /= big
    return Y


def _triangular_vectors_np(T):
    n = T.shape[0]
    Y = np.zeros((n, n), dtype=complex)
    tnorm = np.abs(T).max() if n else 0.0
    smin = max(EPS * tnorm, 1e-300)
    for k in range(n):
        Y[k, k] = 1.0
        if k == 0:
            continue
        M = T[:k, :k] - T[k, k] * np.eye(k)
        diag = np.diagonal(M).copy()
        small = np.abs(diag) < smin
        if small.any():
            M[np.arange(k)[small], np.arange(k)[small]] = smin
        Y[:k, k] = scipy.linalg.solve_triangular(M, -T[:k, k], check_finite=False)
    return Y


hessenberg = select(_hessenberg_nb, _hessenberg_np)
_schur = select(_schur_nb, _schur_np)
_triangular_vectors = select(_triangular_vectors_nb, _triangular_vectors_np)


def schur(A):
    """Return ``(T, Z)`` with ``A = Z T Z^H``, ``T`` upper triangular."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    n = A.shape[0]
    if n == 0:
        return A.copy(), np.eye(0, dtype=complex)
    H, Z = hessenberg(A)
    H = np.ascontiguousarray(H)
    Z = np.ascontiguousarray(Z)
    sweeps = _schur(H, Z)
    if sweeps < 0:
        raise SolverError(f"QR iteration did not converge for a {n}x{n} matrix after "
                          f"{-sweeps} sweeps", dimension=n, iterations=-sweeps)
    return np.triu(H), Z


def qr_eig(A):
    """Eigenvalues and unit right eigenvectors of a dense complex matrix."""
    T, Z = schur(A)
    Y = _triangular_vectors(np.ascontiguousarray(T))
    X = Z @ Y
    X /= np.linalg.norm(X, axis=0)
    return np.diagonal(T).copy(), X


def qr_eigvals(A):
    return np.diagonal(schur(A)[0]).copy()
