"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorised pure-numpy version.  The numba path is used when numba imports and
the environment variable ``TPSPECTRA_DISABLE_NUMBA`` is unset (or ``0``).
``use_backend`` switches at runtime, which the tests and the benchmark rely on.
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kw):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _env_disabled() -> bool:
    return os.environ.get("TPSPECTRA_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


_BACKEND = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def backend() -> str:
    return _BACKEND


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _BACKEND = name


@contextlib.contextmanager
def use_backend(name: str):
    old = _BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


# ---------------------------------------------------------------------------
# LU with partial pivoting
# ---------------------------------------------------------------------------

@njit(cache=True)
def _lu_nb(a):
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1.0
    for j in range(n):
        p = j
        best = abs(a[j, j])
        for i in range(j + 1, n):
            v = abs(a[i, j])
            if v > best:
                best = v
                p = i
        if p != j:
            for k in range(n):
                t = a[j, k]
                a[j, k] = a[p, k]
                a[p, k] = t
            t2 = piv[j]
            piv[j] = piv[p]
            piv[p] = t2
            sign = -sign
        d = a[j, j]
        if d == 0.0:
            continue
        for i in range(j + 1, n):
            f = a[i, j] / d
            a[i, j] = f
            if f != 0.0:
                for k in range(j + 1, n):
                    a[i, k] -= f * a[j, k]
    return a, piv, sign


def _lu_np(a):
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1.0
    for j in range(n):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if p != j:
            a[[j, p]] = a[[p, j]]
            piv[[j, p]] = piv[[p, j]]
            sign = -sign
        d = a[j, j]
        if d == 0.0:
            continue
        a[j + 1:, j] /= d
        a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:])
    return a, piv, sign


def lu_factor(m: np.ndarray):
    """Return ``(lu, perm, sign)`` with ``m[perm] = L @ U`` packed in ``lu``."""
    a = np.array(m, dtype=np.float64, copy=True)
    if _BACKEND == "numba":
        return _lu_nb(a)
    return _lu_np(a)


@njit(cache=True)
def _lu_solve_nb(lu, piv, b):
    n = lu.shape[0]
    ncol = b.shape[1]
    x = np.empty((n, ncol))
    for i in range(n):
        for c in range(ncol):
            x[i, c] = b[piv[i], c]
    for i in range(n):
        for k in range(i):
            f = lu[i, k]
            if f != 0.0:
                for c in range(ncol):
                    x[i, c] -= f * x[k, c]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            f = lu[i, k]
            if f != 0.0:
                for c in range(ncol):
                    x[i, c] -= f * x[k, c]
        d = lu[i, i]
        for c in range(ncol):
            x[i, c] /= d
    return x


def _lu_solve_np(lu, piv, b):
    n = lu.shape[0]
    x = b[piv].astype(np.float64, copy=True)
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def lu_solve(lu, piv, b):
    b = np.asarray(b, dtype=np.float64)
    vec = b.ndim == 1
    b2 = b.reshape(-1, 1) if vec else b
    x = (_lu_solve_nb if _BACKEND == "numba" else _lu_solve_np)(lu, piv, np.ascontiguousarray(b2))
    return x[:, 0] if vec else x


# ---------------------------------------------------------------------------
# many small determinants
# ---------------------------------------------------------------------------

@njit(cache=True)
def _det_small_nb(a):
    n = a.shape[0]
    det = 1.0
    for j in range(n):
        p = j
        best = abs(a[j, j])
        for i in range(j + 1, n):
            v = abs(a[i, j])
            if v > best:
                best = v
                p = i
        if best == 0.0:
            return 0.0
        if p != j:
            for k in range(j, n):
                t = a[j, k]
                a[j, k] = a[p, k]
                a[p, k] = t
            det = -det
        d = a[j, j]
        det *= d
        for i in range(j + 1, n):
            f = a[i, j] / d
            if f != 0.0:
                for k in range(j + 1, n):
                    a[i, k] -= f * a[j, k]
    return det


@njit(cache=True)
def _batch_det_nb(mats):
    out = np.empty(mats.shape[0])
    for b in range(mats.shape[0]):
        out[b] = _det_small_nb(mats[b].copy())
    return out


def batch_det(mats: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices, shape ``(B, k, k)``."""
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    if mats.shape[0] == 0:
        return np.empty(0)
    if mats.shape[1] == 0:
        return np.ones(mats.shape[0])
    if _BACKEND == "numba":
        return _batch_det_nb(mats)
    return np.linalg.det(mats)


@njit(cache=True)
def _minor_dets_nb(m, rows, cols):
    nb, k = rows.shape
    out = np.empty(nb)
    sub = np.empty((k, k))
    for b in range(nb):
        for i in range(k):
            ri = rows[b, i]
            for j in range(k):
                sub[i, j] = m[ri, cols[b, j]]
        out[b] = _det_small_nb(sub)
    return out


def minor_dets(m: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """``det m[rows[b]][:, cols[b]]`` for every ``b``; rows/cols are ``(B, k)`` int arrays."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    if rows.shape[0] == 0:
        return np.empty(0)
    if rows.shape[1] == 0:
        return np.ones(rows.shape[0])
    if _BACKEND == "numba":
        return _minor_dets_nb(m, rows, cols)
    return np.linalg.det(m[rows[:, :, None], cols[:, None, :]])


# ---------------------------------------------------------------------------
# convolution sums  out[i, j] = sum_k  f[r0 + rs*i + rk*k] * g[t0 + ts*j + tk*k]
# ---------------------------------------------------------------------------
# f and g are windows; position of index x in f is x - f_lo.  The k-sum starts
# at k0 and stops after `run` consecutive terms with |term| < tol.  Leaving a
# window before that happens sets the overflow flag.

@njit(cache=True)
def _tail_sum_nb(f, f_lo, g, g_lo, nrows, ncols, r0, rs, rk, t0, ts, tk, k0, tol, run):
    out = np.zeros((nrows, ncols))
    kmax_used = 0
    overflow = False
    nf = f.shape[0]
    ng = g.shape[0]
    for i in range(nrows):
        for j in range(ncols):
            acc = 0.0
            small = 0
            k = k0
            # terms only decay once both indices move away from 0
            k_start = max(k0, -rk * (r0 + rs * i), -tk * (t0 + ts * j))
            while True:
                fi = r0 + rs * i + rk * k - f_lo
                gi = t0 + ts * j + tk * k - g_lo
                if fi < 0 or fi >= nf or gi < 0 or gi >= ng:
                    overflow = True
                    break
                term = f[fi] * g[gi]
                acc += term
                if abs(term) < tol and k >= k_start:
                    small += 1
                    if small >= run:
                        break
                else:
                    small = 0
                k += 1
            out[i, j] = acc
            if k > kmax_used:
                kmax_used = k
    return out, kmax_used, overflow


def _tail_sum_np(f, f_lo, g, g_lo, nrows, ncols, r0, rs, rk, t0, ts, tk, k0, tol, run):
    nf, ng = f.shape[0], g.shape[0]
    i = np.arange(nrows)[:, None, None]
    j = np.arange(ncols)[None, :, None]
    # longest k range any entry could need before leaving a window
    span = max(nf, ng) + abs(r0) + abs(t0) + abs(rs) * nrows + abs(ts) * ncols + 1
    k = np.arange(k0, k0 + span)[None, None, :]
    fi = r0 + rs * i + rk * k - f_lo
    gi = t0 + ts * j + tk * k - g_lo
    inside = (fi >= 0) & (fi < nf) & (gi >= 0) & (gi < ng)
    terms = np.where(inside, f[np.clip(fi, 0, nf - 1)] * g[np.clip(gi, 0, ng - 1)], 0.0)
    k_start = np.maximum(np.maximum(k0, -rk * (r0 + rs * i)), -tk * (t0 + ts * j))
    small = (np.abs(terms) < tol) & inside & (k >= k_start)
    # position where `run` consecutive small terms end
    csum = np.cumsum(small, axis=2)
    shifted = np.concatenate([np.zeros(csum.shape[:2] + (run,), dtype=csum.dtype), csum[..., :-run]], axis=2)
    hit = (csum - shifted) >= run
    has_hit = hit.any(axis=2)
    stop = np.where(has_hit, np.argmax(hit, axis=2), span - 1)
    first_out = np.where(inside.all(axis=2), span, np.argmax(~inside, axis=2))
    overflow = bool(np.any(~has_hit & (first_out <= span - 1)) | np.any(has_hit & (first_out <= stop)))
    keep = np.arange(span)[None, None, :] <= stop[..., None]
    out = np.sum(np.where(keep, terms, 0.0), axis=2)
    kmax_used = int(k0 + np.minimum(stop, first_out).max()) if nrows and ncols else k0
    return out, kmax_used, overflow


def tail_sum(f, f_lo, g, g_lo, shape, r0, rs, rk, t0, ts, tk, k0=1, tol=1e-16, run=3):
    """Matrix of truncated bilinear sums over two coefficient windows.

    Returns ``(matrix, largest_k_reached, overflow)``.
    """
    f = np.ascontiguousarray(f, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    nrows, ncols = shape
    args = (f, int(f_lo), g, int(g_lo), int(nrows), int(ncols), int(r0), int(rs), int(rk),
            int(t0), int(ts), int(tk), int(k0), float(tol), int(run))
    if _BACKEND == "numba":
        out, kmax, overflow = _tail_sum_nb(*args)
        return out, int(kmax), bool(overflow)
    return _tail_sum_np(*args)
