import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tpspectra import _accel
from tpspectra.kernel import kernel_series, z_kernel
from tpspectra.schur import MeasureContext
from tpspectra.series import SymbolParams, ratio_window

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")

seeds = st.integers(0, 2 ** 32 - 1)


def both(fn):
    with _accel.use_backend("numba"):
        a = fn()
    with _accel.use_backend("numpy"):
        b = fn()
    return a, b


@given(seeds, st.integers(1, 12))
def test_lu_backends_agree(seed, n):
    m = np.random.default_rng(seed).standard_normal((n, n)) + n * np.eye(n)
    (lu1, piv1, s1), (lu2, piv2, s2) = both(lambda: _accel.lu_factor(m))
    assert np.allclose(lu1, lu2, atol=1e-12) and np.array_equal(piv1, piv2) and s1 == s2
    rhs = np.eye(n)
    x1, x2 = both(lambda: _accel.lu_solve(lu1, piv1, rhs))
    assert np.allclose(m @ x1, rhs, atol=1e-10) and np.allclose(x1, x2, atol=1e-12)


@given(seeds, st.integers(0, 5))
def test_batch_det_backends_agree(seed, k):
    mats = np.random.default_rng(seed).standard_normal((20, k, k))
    a, b = both(lambda: _accel.batch_det(mats))
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


@given(seeds, st.integers(1, 4))
def test_minor_dets_backends_agree(seed, k):
    rng = np.random.default_rng(seed)
    m = rng.random((9, 9))
    rows = np.sort(np.array([rng.choice(9, k, replace=False) for _ in range(30)]), axis=1)
    cols = np.sort(np.array([rng.choice(9, k, replace=False) for _ in range(30)]), axis=1)
    a, b = both(lambda: _accel.minor_dets(m, rows, cols))
    assert np.allclose(a, b, rtol=1e-10, atol=1e-14)
    assert np.allclose(a, np.linalg.det(m[rows[:, :, None], cols[:, None, :]]), atol=1e-14)


def test_empty_batches():
    for be in ("numba", "numpy"):
        with _accel.use_backend(be):
            assert _accel.minor_dets(np.eye(3), np.zeros((0, 2), int), np.zeros((0, 2), int)).size == 0
            assert np.array_equal(_accel.batch_det(np.zeros((3, 0, 0))), np.ones(3))


@pytest.mark.parametrize("maps", [((0, 1, 1), (0, -1, -1), 1), ((0, 1, -1), (1, 1, 1), 0),
                                  ((-1, -1, -1), (0, -1, 1), 0), ((4, -1, -1), (-4, 1, 1), 1)])
def test_tail_sum_backends_agree(mixed, maps):
    r, t, k0 = maps
    w = ratio_window(mixed, -120, 120)
    a, b = both(lambda: _accel.tail_sum(w.coeffs, w.lo, w.dual_coeffs, w.lo, (10, 10), *r, *t, k0=k0, tol=1e-17))
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-16)
    assert a[2] == b[2] is False


def test_tail_sum_late_support():
    # vacuum kernel: the only nonzero term sits at k = -x
    w = ratio_window(SymbolParams(), -20, 20)
    for be in ("numba", "numpy"):
        with _accel.use_backend(be):
            out, _, over = _accel.tail_sum(w.coeffs, w.lo, w.dual_coeffs, w.lo, (1, 1), 8, -1, -1, -8, 1, 1)
            assert out[0, 0] == 1.0 and not over


def test_tail_sum_reports_overflow():
    w = ratio_window(SymbolParams(alpha_plus=(0.9,), alpha_minus=(0.9,)), -3, 3)
    for be in ("numba", "numpy"):
        with _accel.use_backend(be):
            assert _accel.tail_sum(w.coeffs, w.lo, w.dual_coeffs, w.lo, (2, 2), 0, 1, 1, 0, -1, -1)[2]


def test_high_level_results_backend_independent(mixed):
    a, b = both(lambda: kernel_series(mixed, 12).assembled())
    assert np.allclose(a, b, atol=1e-16)
    a, b = both(lambda: z_kernel(mixed, -4, 4).values)
    assert np.allclose(a, b, atol=1e-16)
    a, b = both(lambda: MeasureContext.build(mixed).weight_table(12).weights)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-18)


def test_set_backend_validation():
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, TPSPECTRA_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from tpspectra import _accel; print(_accel.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
