"""Hot loops of the annealer, in two interchangeable backends.

The numba backend compiles the serial mean-field sweep, the full annealing
schedule and the symmetric eigensolvers with ``@njit``. The numpy backend
is a plain-Python/numpy transcription of the same arithmetic and random
stream. Set ``POTTSCLUST_DISABLE_NUMBA=1`` to force the numpy path (it is
also used when numba cannot be imported).
"""

from __future__ import annotations

import os

import numpy as np

from .rng import uniform_block

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

_DISABLE = os.environ.get("POTTSCLUST_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
NUMBA_ENABLED = _HAVE_NUMBA and not _DISABLE

_INV53 = 1.0 / (1 << 53)


# --------------------------------------------------------------------------
# numpy backend
# --------------------------------------------------------------------------

def boltzmann_row(h, T):
    """softmax(-h / T), shifted by the row minimum so the exponent never overflows."""
    e = np.exp(-(h - h.min()) / T)
    return e / e.sum()


def sweep_numpy(J, V, T, eps, alpha, gamma, key, counter):
    """One serial pass over all spins; updates ``V`` in place.

    Returns ``(delta, counter)`` with ``delta = sum |dV| / N``.
    """
    n, k = V.shape
    colsum = V.sum(axis=0)
    noise = eps * uniform_block(key, counter, n * k).reshape(n, k) if eps > 0 else None
    delta = 0.0
    for i in range(n):
        h = J[i] @ V + alpha * colsum - gamma * V[i]
        row = boltzmann_row(h, T)
        if noise is not None:
            row = row + noise[i]
            row /= row.sum()
        diff = row - V[i]
        delta += np.abs(diff).sum()
        colsum += diff
        V[i] = row
    return delta / n, counter + n * k


def anneal_numpy(J, V, T0, tau, eps, alpha, gamma, sweep_tol, sat_tol,
                 max_sweeps, max_temps, key, counter):
    n = V.shape[0]
    T = T0
    sweeps = 0
    temps = 0
    frozen = False
    while True:
        inner = 0
        while True:
            delta, counter = sweep_numpy(J, V, T, eps, alpha, gamma, key, counter)
            sweeps += 1
            inner += 1
            if delta <= sweep_tol or inner >= max_sweeps:
                break
        T *= tau
        temps += 1
        if (V * V).sum() / n >= sat_tol:
            frozen = True
            break
        if temps >= max_temps:
            break
    return T, sweeps, temps, frozen, counter


def jacobi_eigenvalues_numpy(A, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigenvalues of a symmetric matrix (ascending)."""
    a = np.array(A, dtype=np.float64, copy=True)
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt((np.triu(a, 1) ** 2).sum())
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
    return np.sort(np.diag(a))


def power_iteration_numpy(A, tol=1e-8, max_iter=1000, start=None):
    """Dominant eigenvalue (by magnitude) of symmetric ``A`` by power iteration."""
    n = A.shape[0]
    x = np.ones(n) if start is None else np.array(start, dtype=np.float64)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = A @ x
        lam_new = x @ y
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    return lam


# --------------------------------------------------------------------------
# numba backend
# --------------------------------------------------------------------------

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _uniform(key, i):
        z = np.uint64(key) + np.uint64(i + 1) * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        return (np.float64(z >> np.uint64(11)) + 0.5) * _INV53

    @numba.njit(cache=True)
    def sweep_numba(J, V, T, eps, alpha, gamma, key, counter):
        n, k = V.shape
        colsum = np.zeros(k)
        for j in range(n):
            for a in range(k):
                colsum[a] += V[j, a]
        h = np.empty(k)
        row = np.empty(k)
        delta = 0.0
        for i in range(n):
            for a in range(k):
                h[a] = alpha * colsum[a] - gamma * V[i, a]
            for j in range(n):
                jij = J[i, j]
                for a in range(k):
                    h[a] += jij * V[j, a]
            hmin = h[0]
            for a in range(1, k):
                if h[a] < hmin:
                    hmin = h[a]
            z = 0.0
            for a in range(k):
                row[a] = np.exp(-(h[a] - hmin) / T)
                z += row[a]
            for a in range(k):
                row[a] /= z
            if eps > 0.0:
                z = 0.0
                for a in range(k):
                    row[a] += eps * _uniform(key, counter + i * k + a)
                    z += row[a]
                for a in range(k):
                    row[a] /= z
            for a in range(k):
                d = row[a] - V[i, a]
                delta += abs(d)
                colsum[a] += d
                V[i, a] = row[a]
        return delta / n, counter + n * k

    @numba.njit(cache=True)
    def anneal_numba(J, V, T0, tau, eps, alpha, gamma, sweep_tol, sat_tol,
                     max_sweeps, max_temps, key, counter):
        n, k = V.shape
        T = T0
        sweeps = 0
        temps = 0
        frozen = False
        while True:
            inner = 0
            while True:
                delta, counter = sweep_numba(J, V, T, eps, alpha, gamma, key, counter)
                sweeps += 1
                inner += 1
                if delta <= sweep_tol or inner >= max_sweeps:
                    break
            T *= tau
            temps += 1
            sat = 0.0
            for i in range(n):
                for a in range(k):
                    sat += V[i, a] * V[i, a]
            if sat / n >= sat_tol:
                frozen = True
                break
            if temps >= max_temps:
                break
        return T, sweeps, temps, frozen, counter

    @numba.njit(cache=True)
    def jacobi_eigenvalues_numba(A, tol=1e-12, max_sweeps=100):
        a = A.copy()
        n = a.shape[0]
        scale = 1e-300
        for i in range(n):
            for j in range(n):
                if abs(a[i, j]) > scale:
                    scale = abs(a[i, j])
        for _ in range(max_sweeps):
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += a[p, q] * a[p, q]
            if np.sqrt(off) <= tol * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if theta == 0.0:
                        t = 1.0
                    else:
                        t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    for r in range(n):
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s * arq
                        a[r, q] = s * arp + c * arq
                    for r in range(n):
                        apr = a[p, r]
                        aqr = a[q, r]
                        a[p, r] = c * apr - s * aqr
                        a[q, r] = s * apr + c * aqr
        return np.sort(np.diag(a).copy())

    @numba.njit(cache=True)
    def power_iteration_numba(A, tol=1e-8, max_iter=1000):
        # explicit loops: np.dot inside numba would pull in scipy's BLAS
        n = A.shape[0]
        x = np.ones(n) / np.sqrt(n)
        y = np.empty(n)
        lam = 0.0
        for _ in range(max_iter):
            lam_new = 0.0
            norm = 0.0
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += A[i, j] * x[j]
                y[i] = acc
                lam_new += x[i] * acc
                norm += acc * acc
            norm = np.sqrt(norm)
            if norm == 0.0:
                return 0.0
            for i in range(n):
                x[i] = y[i] / norm
            if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
                return lam_new
            lam = lam_new
        return lam


if NUMBA_ENABLED:
    sweep = sweep_numba
    anneal_loop = anneal_numba
    jacobi_eigenvalues = jacobi_eigenvalues_numba
    power_iteration = power_iteration_numba
else:
    sweep = sweep_numpy
    anneal_loop = anneal_numpy
    jacobi_eigenvalues = jacobi_eigenvalues_numpy
    power_iteration = power_iteration_numpy

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
