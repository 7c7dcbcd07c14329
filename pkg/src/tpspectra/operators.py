"""Finite corners of the matrices A, B, L, A^t B and Widom's T."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DimensionError, DomainError, IndexRangeError, TruncationError
from .linalg import FLOAT, RATIONAL, is_exact, scalar_kind, zeros
from .series import MINUS, PLUS, SymbolParams, e_coefficients, h_coefficients, ratio_window

GENERATING_RECURRENCE = "generatingRecurrence"
HOOK_SCHUR = "hookSchur"
SERIES_SUM = "seriesSum"
ROUTES = (GENERATING_RECURRENCE, HOOK_SCHUR)

# k-sum cut: this many consecutive terms below the tolerance
RUN_LENGTH = 3
K_TOLERANCE = 1e-17


@dataclass(frozen=True, eq=False)
class OperatorTruncation:
    matrix: np.ndarray
    order: int
    route: str
    tail_bound: float

    @property
    def scalar(self) -> str:
        return scalar_kind(self.matrix)


def _antidiagonal_tail(m: np.ndarray) -> float:
    """Largest entry magnitude on the last two anti-diagonals of a square corner."""
    n = m.shape[0]
    if n < 2:
        return float(abs(m[0, 0])) if n else 0.0
    p, q = np.indices(m.shape)
    mask = (p + q) >= 2 * n - 3
    return float(max(abs(float(x)) for x in m[mask]))


def hook_values(h: np.ndarray, e: np.ndarray, n: int) -> np.ndarray:
    """``s_(p|q) = sum_j (-1)^j h_{p+1+j} e_{q-j}`` for ``p, q < n``."""
    if len(h) < 2 * n or len(e) < n:
        raise TruncationError(f"hook values up to {n} need h through index {2 * n - 1}")
    out = zeros((n, n), RATIONAL if h.dtype == object else FLOAT)
    for q in range(n):
        signs = np.array([(-1) ** j for j in range(q + 1)])
        e_rev = e[q::-1] * signs  # (-1)^j e_{q-j}, j = 0..q
        for p in range(n):
            out[p, q] = np.dot(h[p + 1:p + q + 2], e_rev)
    return out


def recurrence_values(h: np.ndarray, e: np.ndarray, n: int) -> np.ndarray:
    """Solve ``A_{p-1,q} + A_{p,q-1} = h_p e_q`` column by column.

    Column ``q = 0`` is ``A_{p,0} = h_{p+1}``; each later column is
    ``A_{p,q} = h_{p+1} e_q - A_{p+1,q-1}``, so a column needs one more row of
    the previous one.  Rows run to ``2n - 1``.
    """
    if len(h) < 2 * n or len(e) < n:
        raise TruncationError(f"recurrence up to {n} needs h through index {2 * n - 1}")
    rows = 2 * n - 1
    col = h[1:rows + 1] * e[0]
    out = zeros((n, n), RATIONAL if h.dtype == object else FLOAT)
    out[:, 0] = col[:n]
    for q in range(1, n):
        col = h[1:rows + 1 - q] * e[q] - col[1:]
        out[:, q] = col[:n]
    return out


def _side_matrix(params: SymbolParams, side: str, n: int, route: str, scalar: str | None) -> OperatorTruncation:
    if n < 1:
        raise DomainError("truncation order must be >= 1")
    scalar = scalar or FLOAT
    h = h_coefficients(params, side, 2 * n, scalar).coeffs
    e = e_coefficients(params, side, 2 * n, scalar).coeffs
    if route == HOOK_SCHUR:
        m = hook_values(h, e, n)
    elif route == GENERATING_RECURRENCE:
        m = recurrence_values(h, e, n)
    else:
        raise ValueError(f"unknown route {route!r}")
    return OperatorTruncation(m, n, route, _antidiagonal_tail(m))


def build_a(params: SymbolParams, n: int, route: str = HOOK_SCHUR, scalar: str | None = None) -> OperatorTruncation:
    """``n x n`` corner of A: ``sum A_pq u^p v^q = (phi_plus(u)/phi_plus(-v) - 1)/(u + v)``."""
    return _side_matrix(params, PLUS, n, route, scalar)


def build_b(params: SymbolParams, n: int, route: str = HOOK_SCHUR, scalar: str | None = None) -> OperatorTruncation:
    """``n x n`` corner of B, the same construction on ``phi_minus(1/u)``."""
    return _side_matrix(params, MINUS, n, route, scalar)


def _mat(x):
    return x.matrix if isinstance(x, OperatorTruncation) else np.asarray(x)


def build_l(a, b) -> np.ndarray:
    """Block matrix ``[[0, A^t], [-B, 0]]``."""
    a, b = _mat(a), _mat(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionError(f"A and B must be square of equal size, got {a.shape} and {b.shape}")
    n = a.shape[0]
    out = zeros((2 * n, 2 * n), scalar_kind(a))
    out[:n, n:] = a.T
    out[n:, :n] = -b
    return out


def product_atb(a, b) -> np.ndarray:
    a, b = _mat(a), _mat(b)
    return a.T.dot(b)


def project_tail(m: np.ndarray, n: int) -> np.ndarray:
    """Rows and columns ``>= n``; the nonzero spectrum equals that of ``(1-P_n) M (1-P_n)``."""
    m = _mat(m)
    if not 0 <= n < m.shape[0]:
        raise IndexRangeError(f"tail start {n} out of range for size {m.shape[0]}")
    return m[n:, n:].copy()


# ---------------------------------------------------------------------------
# sums over ratio coefficients
# ---------------------------------------------------------------------------

def ratio_sum(params: SymbolParams, shape, r_map, t_map, k0: int, tol: float = K_TOLERANCE,
              margin: int | None = None):
    """Evaluate ``out[i, j] = sum_{k >= k0} R[r(i,k)] Rt[t(j,k)]`` with adaptive windows.

    ``R = phi_minus/phi_plus``, ``Rt = phi_plus/phi_minus``; ``r_map`` and
    ``t_map`` are ``(offset, per_index, per_k)`` affine index maps.  The window
    is widened until no entry runs off its edge.  Returns ``(matrix, kmax, window)``.
    """
    nrows, ncols = shape
    reach = max(abs(r_map[0]) + abs(r_map[1]) * nrows, abs(t_map[0]) + abs(t_map[1]) * ncols)
    margin = margin or max(32, int(np.ceil(40.0 / max(-np.log10(max(params.rho, 1e-3)), 0.05))))
    while True:
        half = reach + margin
        win = ratio_window(params, -half, half)
        out, kmax, overflow = _accel.tail_sum(win.coeffs, win.lo, win.dual_coeffs, win.lo, shape,
                                              r_map[0], r_map[1], r_map[2], t_map[0], t_map[1], t_map[2],
                                              k0=k0, tol=tol, run=RUN_LENGTH)
        if not overflow:
            return out, kmax, win
        if margin > 1 << 14:
            raise TruncationError(f"k-sum did not fall below {tol:g} within a window of half-width {half}")
        margin *= 2


def build_t(params: SymbolParams, n: int, order: int, tol: float = K_TOLERANCE) -> OperatorTruncation:
    """``T_pq = sum_{k>=1} (phi_-/phi_+)_{p+k} (phi_+/phi_-)_{-q-k}`` for ``n <= p, q < order``."""
    if n < 0 or n >= order:
        raise DomainError(f"tail start must satisfy 0 <= n < order, got n={n}, order={order}")
    size = order - n
    m, kmax, _ = ratio_sum(params, (size, size), (n, 1, 1), (-n, -1, -1), k0=1, tol=tol)
    res = OperatorTruncation(m, order, SERIES_SUM, _antidiagonal_tail(m) if size else 0.0)
    object.__setattr__(res, "k_cutoff", kmax)
    return res


def sign_conjugate(m: np.ndarray, offset: int = 0) -> np.ndarray:
    """``D M D`` with ``D = diag((-1)^(offset + i))``."""
    s = (-1.0) ** (np.arange(m.shape[0]) + offset)
    return m * s[:, None] * s[None, :]
