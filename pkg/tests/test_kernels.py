import numpy as np
import pytest

from pottsclust import _kernels
from pottsclust.annealer import critical_temperature, extreme_eigenvalues
from pottsclust.rng import derive_key

needs_numba = pytest.mark.skipif(not _kernels._HAVE_NUMBA, reason="numba not installed")


def sym(rng, n, scale=1.0):
    a = rng.normal(scale=scale, size=(n, n))
    return (a + a.T) / 2


def random_state(rng, n, k):
    v = rng.uniform(0.1, 1.0, size=(n, k))
    return v / v.sum(axis=1, keepdims=True)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 30])
def test_jacobi_against_dense_solver(rng, n):
    a = sym(rng, n)
    ref = np.linalg.eigvalsh(a)
    assert np.allclose(_kernels.jacobi_eigenvalues_numpy(a), ref, atol=1e-6)
    if _kernels._HAVE_NUMBA:
        assert np.allclose(_kernels.jacobi_eigenvalues_numba(a), ref, atol=1e-6)


def test_random_8x8_extremes(rng):
    for _ in range(20):
        m = sym(rng, 8, scale=3.0)
        ref = np.linalg.eigvalsh(m)
        lo, hi = extreme_eigenvalues(m)
        assert lo == pytest.approx(ref[0], abs=1e-6)
        assert hi == pytest.approx(ref[-1], abs=1e-6)


def test_power_iteration_path(rng, monkeypatch):
    # force the large-N path on a small matrix
    monkeypatch.setattr("pottsclust.annealer.JACOBI_MAX_N", 4)
    j = np.abs(sym(rng, 40))
    np.fill_diagonal(j, 0.0)
    m = j - 0.5 * np.eye(40)
    ref = np.linalg.eigvalsh(m)
    lo, hi = extreme_eigenvalues(m)
    assert hi == pytest.approx(ref[-1], rel=1e-4)
    assert lo == pytest.approx(ref[0], rel=1e-3)
    assert critical_temperature(j, 0.0, 0.5, 3) == pytest.approx(max(-ref[0], ref[-1]) / 3, rel=1e-3)


@needs_numba
def test_power_iteration_backends_agree(rng):
    a = np.abs(sym(rng, 12)) + np.eye(12)
    assert _kernels.power_iteration_numba(a) == pytest.approx(_kernels.power_iteration_numpy(a), rel=1e-10)


@needs_numba
@pytest.mark.parametrize("eps", [0.0, 0.001])
def test_sweep_backends_agree(rng, eps):
    n, k = 9, 3
    j = np.abs(sym(rng, n))
    np.fill_diagonal(j, 0.0)
    v0 = random_state(rng, n, k)
    key = np.uint64(derive_key(5))
    a, b = v0.copy(), v0.copy()
    da, ca = _kernels.sweep_numpy(j, a, 0.3, eps, 1e-3, 0.5, key, 17)
    db, cb = _kernels.sweep_numba(j, b, 0.3, eps, 1e-3, 0.5, key, 17)
    assert ca == cb == 17 + n * k
    assert np.allclose(a, b, atol=1e-12, rtol=0)
    assert da == pytest.approx(db, abs=1e-12)


@needs_numba
def test_anneal_backends_agree(rng):
    n, k = 12, 3
    j = np.abs(sym(rng, n))
    np.fill_diagonal(j, 0.0)
    v0 = np.full((n, k), 1.0 / k)
    key = np.uint64(derive_key(9))
    a, b = v0.copy(), v0.copy()
    args = (2.0, 0.9, 0.001, 0.0, 0.5, 0.01, 0.99, 1000, 500, key, 0)
    ra = _kernels.anneal_numpy(j, a, *args)
    rb = _kernels.anneal_numba(j, b, *args)
    assert ra[1:] == rb[1:]
    assert ra[0] == pytest.approx(rb[0], rel=1e-12)
    assert np.array_equal(a.argmax(axis=1), b.argmax(axis=1))
    assert np.allclose(a, b, atol=1e-9)


def test_boltzmann_row_shift_invariance(rng):
    for _ in range(100):
        h = rng.normal(scale=10, size=5)
        t = float(rng.uniform(0.01, 5))
        base = _kernels.boltzmann_row(h, t)
        for c in (-1e3, 3.7, 1e4):
            assert np.allclose(_kernels.boltzmann_row(h + c, t), base, atol=1e-12, rtol=0)


def test_boltzmann_row_no_overflow():
    row = _kernels.boltzmann_row(np.array([0.0, 1e6, -1e6]), 1e-3)
    assert np.all(np.isfinite(row))
    assert row.tolist() == [0.0, 0.0, 1.0]
