"""Dense matrices over a pluggable scalar.

Two scalar kinds are supported and never mixed within one computation:

* float mode: ``numpy.float64`` arrays;
* rational mode: ``object`` arrays holding :class:`fractions.Fraction`.

The dtype of the array decides the mode.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _accel
from .errors import ConvergenceError, DimensionError, IndexRangeError, SingularMatrixError

FLOAT = "float"
RATIONAL = "rational"

# pivot magnitude below this fraction of the largest row norm counts as singular
SINGULAR_PIVOT_RATIO = 1e-13


def is_exact(m) -> bool:
    return isinstance(m, np.ndarray) and m.dtype == object


def scalar_kind(m) -> str:
    return RATIONAL if is_exact(m) else FLOAT


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        # decimal round trip: 0.4 -> 2/5, not the binary expansion
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def as_matrix(data, scalar: str = FLOAT) -> np.ndarray:
    """Build a 2-d matrix of the requested scalar kind from nested sequences."""
    if scalar == FLOAT:
        m = to_float(data) if is_exact(data) else np.array(data, dtype=np.float64)
    elif scalar == RATIONAL:
        arr = np.array(data, dtype=object)
        m = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            m[idx] = to_fraction(v)
    else:
        raise ValueError(f"unknown scalar kind {scalar!r}")
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def identity(n: int, scalar: str = FLOAT) -> np.ndarray:
    if scalar == RATIONAL:
        m = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            m[i, i] = Fraction(1)
        return m
    return np.eye(n)


def zeros(shape, scalar: str = FLOAT) -> np.ndarray:
    if scalar == RATIONAL:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def to_float(m) -> np.ndarray:
    if is_exact(m):
        return np.vectorize(float, otypes=[np.float64])(m) if m.size else np.zeros(m.shape)
    return np.asarray(m, dtype=np.float64)


def _check_square(m) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"square matrix required, got shape {m.shape}")
    return m.shape[0]


# ---------------------------------------------------------------------------
# determinant
# ---------------------------------------------------------------------------

def _bareiss_int(rows: list[list[int]]) -> int:
    n = len(rows)
    a = [r[:] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_exact(m) -> Fraction:
    n = m.shape[0]
    if n == 0:
        return Fraction(1)
    rows = []
    scale = 1
    for i in range(n):
        row = [to_fraction(x) for x in m[i]]
        den = math.lcm(*(x.denominator for x in row))
        rows.append([x.numerator * (den // x.denominator) for x in row])
        scale *= den
    return Fraction(_bareiss_int(rows), scale)


def determinant(m):
    """Determinant by fraction-free elimination (rational) or partial-pivot LU (float)."""
    n = _check_square(m)
    if is_exact(m):
        return _det_exact(m)
    if n == 0:
        return 1.0
    lu, _, sign = _accel.lu_factor(m)
    return float(sign * np.prod(np.diag(lu)))


# ---------------------------------------------------------------------------
# inverse
# ---------------------------------------------------------------------------

def _inverse_exact(m):
    n = m.shape[0]
    a = [[to_fraction(x) for x in m[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular", determinant=Fraction(0))
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                rc = a[c]
                a[r] = [x - f * y for x, y in zip(a[r], rc)]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        out[i, :] = a[i][n:]
    return out


def inverse(m):
    """Matrix inverse.

    Float mode raises :class:`SingularMatrixError` when an LU pivot falls
    below ``1e-13`` times the largest row norm; the error carries the
    determinant and a 1-norm condition estimate.
    """
    n = _check_square(m)
    if is_exact(m):
        return _inverse_exact(m)
    if n == 0:
        return np.zeros((0, 0))
    m = np.asarray(m, dtype=np.float64)
    lu, piv, sign = _accel.lu_factor(m)
    scale = np.abs(m).sum(axis=1).max()
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < SINGULAR_PIVOT_RATIO * scale:
        cond = float(np.linalg.cond(m, 1)) if scale else math.inf
        raise SingularMatrixError(
            f"numerically singular: min pivot {pivots.min():.3e}, condition estimate {cond:.3e}",
            determinant=float(sign * np.prod(np.diag(lu))), condition=cond)
    return _accel.lu_solve(lu, piv, np.eye(n))


def condition_number(m) -> float:
    """1-norm condition number of a float matrix."""
    return float(np.linalg.cond(to_float(m), 1))


# ---------------------------------------------------------------------------
# minors
# ---------------------------------------------------------------------------

def _check_indices(idx: Sequence[int], bound: int, what: str) -> list[int]:
    idx = [int(i) for i in idx]
    for a, b in zip(idx, idx[1:]):
        if b <= a:
            raise IndexRangeError(f"{what} indices must be strictly increasing: {idx}")
    if idx and (idx[0] < 0 or idx[-1] >= bound):
        raise IndexRangeError(f"{what} indices {idx} out of range for size {bound}")
    return idx


def minor(m, rows: Sequence[int], cols: Sequence[int]):
    """Determinant of ``m[rows][:, cols]``; the empty minor is 1."""
    rows = _check_indices(rows, m.shape[0], "row")
    cols = _check_indices(cols, m.shape[1], "column")
    if len(rows) != len(cols):
        raise DimensionError(f"minor needs equal index counts, got {len(rows)} and {len(cols)}")
    if not rows:
        return Fraction(1) if is_exact(m) else 1.0
    return determinant(m[np.ix_(rows, cols)])


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------

class EigenResult(NamedTuple):
    values: np.ndarray
    backward_error: float


def eigenvalues(m) -> EigenResult:
    """Eigenvalues of a real nonsymmetric matrix.

    LAPACK ``geev`` does the Hessenberg reduction and shifted QR.  The
    reported backward error is the largest normalised eigenpair residual
    ``|M v - lambda v| / (|M|_F |v|)``.
    """
    if is_exact(m):
        m = to_float(m)
    n = _check_square(m)
    if n == 0:
        return EigenResult(np.zeros(0, dtype=complex), 0.0)
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ConvergenceError("matrix has non-finite entries")
    try:
        vals, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return EigenResult(vals.astype(complex), 0.0)
    res = np.linalg.norm(m @ vecs - vecs * vals, axis=0) / (norm * np.linalg.norm(vecs, axis=0))
    return EigenResult(vals.astype(complex), float(res.max()))
