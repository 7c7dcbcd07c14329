"""Correlation kernels: K = L (1 + L)^-1 by three routes, and the kernel on Z."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularMatrixError
from .linalg import determinant, identity, inverse, is_exact, scalar_kind, to_float
from .operators import (HOOK_SCHUR, K_TOLERANCE, OperatorTruncation, build_a, build_b, build_l,
                        ratio_sum, sign_conjugate)
from .series import SymbolParams

DIRECT = "directResolvent"
BLOCKS = "blockFormula"
SERIES = "seriesFormula"

DIRECT_TOLERANCE = 1e-10
SERIES_TOLERANCE = 1e-8


@dataclass(eq=False)
class KernelBundle:
    k11: np.ndarray
    k12: np.ndarray
    k21: np.ndarray
    k22: np.ndarray
    route: str
    order: int
    residuals: dict = field(default_factory=dict)

    def blocks(self) -> dict:
        return {"k11": self.k11, "k12": self.k12, "k21": self.k21, "k22": self.k22}

    def assembled(self) -> np.ndarray:
        return np.block([[self.k11, self.k12], [self.k21, self.k22]])


def _split(k: np.ndarray, route: str) -> KernelBundle:
    n = k.shape[0] // 2
    return KernelBundle(k[:n, :n], k[:n, n:], k[n:, :n], k[n:, n:], route, n)


def _mat(x):
    return x.matrix if isinstance(x, OperatorTruncation) else np.asarray(x)


def kernel_direct(l: np.ndarray) -> KernelBundle:
    """``K = 1 - (1 + L)^-1`` split into four blocks."""
    l = _mat(l)
    one = identity(l.shape[0], scalar_kind(l))
    shifted = one + l
    try:
        resolvent = inverse(shifted)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"1 + L is singular at truncation: {exc}",
                                  determinant=exc.determinant, condition=exc.condition) from exc
    bundle = _split(one - resolvent, DIRECT)
    check = shifted.dot(resolvent) - one
    bundle.residuals["resolvent_identity"] = float(np.max(np.abs(to_float(check)))) if check.size else 0.0
    return bundle


def kernel_blocks(a, b) -> KernelBundle:
    """Blocks from ``(1 + A^t B)^-1`` and ``(1 + B A^t)^-1``."""
    a, b = _mat(a), _mat(b)
    n = a.shape[0]
    one = identity(n, scalar_kind(a))
    at = a.T
    left = inverse(one + at.dot(b))
    right = inverse(one + b.dot(at))
    return KernelBundle(one - left, left.dot(at), -right.dot(b), one - right, BLOCKS, n)


def _signs(n: int, offset: int = 0) -> np.ndarray:
    return (-1.0) ** (np.arange(n) + offset)


def kernel_series(params: SymbolParams, n: int, tol: float = K_TOLERANCE) -> KernelBundle:
    """Blocks by coefficient extraction from the double contour integrals.

    With ``R = phi_-/phi_+`` and ``Rt = phi_+/phi_-``::

        K11[p,q] = (-1)^(p+q) sum_{k>=1} R[p+k]    Rt[-q-k]
        K12[p,q] = (-1)^p     sum_{k>=0} R[p-k]    Rt[q+1+k]
        K21[p,q] = (-1)^(q+1) sum_{k>=0} R[-p-1-k] Rt[k-q]
        K22[p,q] =            sum_{k>=1} R[-p-k]   Rt[q+k]

    K21 reads its integrand monomial as ``z^p / w^(q+1)``, the mirror image of
    K12; this is the reading that agrees with ``-(1 + B A^t)^-1 B``.
    """
    shape = (n, n)
    s = _signs(n)
    k11, kmax11, _ = ratio_sum(params, shape, (0, 1, 1), (0, -1, -1), k0=1, tol=tol)
    k12, kmax12, _ = ratio_sum(params, shape, (0, 1, -1), (1, 1, 1), k0=0, tol=tol)
    k21, kmax21, _ = ratio_sum(params, shape, (-1, -1, -1), (0, -1, 1), k0=0, tol=tol)
    k22, kmax22, _ = ratio_sum(params, shape, (0, -1, -1), (0, 1, 1), k0=1, tol=tol)
    bundle = KernelBundle(sign_conjugate(k11), k12 * s[:, None], -k21 * s[None, :], k22, SERIES, n)
    bundle.residuals["k_cutoff"] = max(kmax11, kmax12, kmax21, kmax22)
    return bundle


def k21_as_printed(params: SymbolParams, n: int, tol: float = K_TOLERANCE) -> np.ndarray:
    """K21 with the integrand monomial ``w^p / z^(q+1)`` taken literally.

    Kept for comparison only; it does not match ``-(1 + B A^t)^-1 B``.
    """
    s, _, _ = ratio_sum(params, (n, n), (0, 1, -1), (1, 1, 1), k0=0, tol=tol)
    return -(s.T) * _signs(n)[None, :]


@dataclass(eq=False)
class ZKernel:
    """Values of the kernel on Z over the integer window ``[xmin, xmax]``."""

    xmin: int
    xmax: int
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __call__(self, x: int, y: int) -> float:
        return float(self.values[x - self.xmin, y - self.xmin])

    def correlation(self, points) -> float:
        """``det[K(x_i, x_j)]``; the empty configuration gives 1."""
        pts = [int(x) - self.xmin for x in points]
        if not pts:
            return 1.0
        if min(pts) < 0 or max(pts) > self.xmax - self.xmin:
            raise IndexError(f"points {list(points)} outside window [{self.xmin}, {self.xmax}]")
        return float(np.linalg.det(self.values[np.ix_(pts, pts)]))


def z_kernel(params: SymbolParams, xmin: int, xmax: int, tol: float = K_TOLERANCE) -> ZKernel:
    """``K(x, y) = sum_{k>=1} (phi_-/phi_+)_{-x-k} (phi_+/phi_-)_{y+k}`` for integer x, y."""
    if xmax < xmin:
        raise ValueError(f"empty window [{xmin}, {xmax}]")
    size = xmax - xmin + 1
    vals, kmax, win = ratio_sum(params, (size, size), (-xmin, -1, -1), (xmin, 1, 1), k0=1, tol=tol)
    return ZKernel(xmin, xmax, vals, {"k_cutoff": kmax, "window": [win.lo, win.hi], "series_order": win.order})


# ---------------------------------------------------------------------------
# cross-route certification
# ---------------------------------------------------------------------------

@dataclass
class Theorem1Report:
    params: dict
    order: int
    corner: int
    residuals: dict
    identities: dict
    determinant: dict
    tolerances: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"params": self.params, "order": self.order, "corner": self.corner,
                "residuals": self.residuals, "identities": self.identities,
                "determinant": self.determinant, "tolerances": self.tolerances, "passed": self.passed}


def max_block_difference(x: KernelBundle, y: KernelBundle, corner: int | None = None) -> float:
    worst = 0.0
    for name, bx in x.blocks().items():
        by = y.blocks()[name]
        c = corner or bx.shape[0]
        d = np.abs(to_float(bx)[:c, :c] - to_float(by)[:c, :c])
        worst = max(worst, float(d.max()) if d.size else 0.0)
    return worst


def verify_theorem1(params: SymbolParams, n: int, corner: int | None = None,
                    direct_tol: float = DIRECT_TOLERANCE, series_tol: float = SERIES_TOLERANCE) -> Theorem1Report:
    """Build K three ways and compare them on the top-left ``corner`` of every block."""
    from .schur import normalization_z  # local: schur imports operators as well

    p = params.as_float()
    corner = corner or max(1, n // 2)
    a = build_a(p, n, HOOK_SCHUR)
    b = build_b(p, n, HOOK_SCHUR)
    l = build_l(a, b)
    routes = {DIRECT: kernel_direct(l), BLOCKS: kernel_blocks(a, b), SERIES: kernel_series(p, n)}

    residuals = {}
    for r1, r2 in itertools.combinations(routes, 2):
        residuals[f"{r1}~{r2}"] = max_block_difference(routes[r1], routes[r2], corner)
    residuals["full:" + DIRECT + "~" + BLOCKS] = max_block_difference(routes[DIRECT], routes[BLOCKS])

    atb = a.matrix.T @ b.matrix
    ser = routes[SERIES]
    c = corner
    one = np.eye(n)
    identities = {
        "resolvent_identity": routes[DIRECT].residuals["resolvent_identity"],
        "k11_fixed_point": float(np.abs((atb @ (one - ser.k11))[:c, :c] - ser.k11[:c, :c]).max()),
        "k12_relation": float(np.abs((atb @ ser.k12)[:c, :c] - (a.matrix.T - ser.k12)[:c, :c]).max()),
    }
    det_l = float(np.linalg.det(np.eye(2 * n) + l))
    z, z_tail = normalization_z(p)
    rel = abs(det_l - z) / abs(z)
    determinant_info = {"det_1_plus_L": det_l, "Z": z, "Z_tail": z_tail, "relative_difference": rel}

    tolerances = {"direct_vs_blocks": direct_tol, "series": series_tol, "determinant_relative": 1e-6}
    passed = (residuals[f"{DIRECT}~{BLOCKS}"] < direct_tol
              and residuals[f"{DIRECT}~{SERIES}"] < series_tol
              and residuals[f"{BLOCKS}~{SERIES}"] < series_tol
              and identities["resolvent_identity"] < direct_tol
              and identities["k11_fixed_point"] < 1e-9
              and identities["k12_relation"] < 1e-9
              and rel < 1e-6)
    return Theorem1Report(p.to_dict(), n, corner, residuals, identities, determinant_info, tolerances, passed)
