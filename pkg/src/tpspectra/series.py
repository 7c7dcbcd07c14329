"""Truncated power series and the coefficient data of a totally positive symbol.

The symbol is ``phi = phi_plus * phi_minus`` with

    phi_plus(z)  = exp(g+ z)   prod(1 + b+_i z)   / prod(1 - a+_i z)
    phi_minus(z) = exp(g- / z) prod(1 + b-_i / z) / prod(1 - a-_i / z)

Index convention: ``(f)_k`` is always the coefficient of ``z**k`` in the
Laurent expansion on the unit circle.  ``phi_plus`` only has ``k >= 0``,
``phi_minus`` only ``k <= 0``; one-sided coefficient arrays store
``(phi_minus)_{-n}`` at position ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DimensionError, DomainError, IndexRangeError, TruncationError
from .linalg import FLOAT, RATIONAL, to_fraction

PLUS = "plus"
MINUS = "minus"

TAIL_TOLERANCE = 1e-12


def _side(side: str) -> str:
    if side not in (PLUS, MINUS):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    return side


def _is_exact_number(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


@dataclass(frozen=True)
class SymbolParams:
    """Finite parameter lists of the pair ``phi_plus``, ``phi_minus``."""

    alpha_plus: tuple = ()
    beta_plus: tuple = ()
    alpha_minus: tuple = ()
    beta_minus: tuple = ()
    gamma_plus: float | Fraction = 0
    gamma_minus: float | Fraction = 0

    def __post_init__(self):
        for name in ("alpha_plus", "beta_plus", "alpha_minus", "beta_minus"):
            vals = tuple(getattr(self, name))
            for v in vals:
                if not (0 <= v < 1):
                    raise DomainError(f"{name} entries must satisfy 0 <= value < 1, got {v}")
            object.__setattr__(self, name, vals)
        for name in ("gamma_plus", "gamma_minus"):
            v = getattr(self, name)
            if not (v >= 0) or (isinstance(v, float) and not math.isfinite(v)):
                raise DomainError(f"{name} must be a finite nonnegative number, got {v}")

    @classmethod
    def widom(cls, r: Iterable = (), s: Iterable = ()) -> "SymbolParams":
        """``phi_plus = prod(1 + r_i z)``, ``phi_minus = prod(1 - s_i / z)^-1``."""
        return cls(beta_plus=tuple(r), alpha_minus=tuple(s))

    def side(self, side: str):
        """``(alpha, beta, gamma)`` of one factor."""
        if _side(side) == PLUS:
            return self.alpha_plus, self.beta_plus, self.gamma_plus
        return self.alpha_minus, self.beta_minus, self.gamma_minus

    @property
    def rho(self) -> float:
        vals = self.alpha_plus + self.beta_plus + self.alpha_minus + self.beta_minus
        return float(max(vals)) if vals else 0.0

    @property
    def radius(self) -> float:
        """Admissible holomorphy radius ``r`` with ``1 < r < 1/rho``."""
        rho = self.rho
        return 1.0 / math.sqrt(rho) if rho > 0 else 2.0

    def bounds(self) -> dict:
        return {"rho": self.rho, "radius": self.radius, "inverse_radius": 1.0 / self.radius,
                "entry_bound": 1.0}

    @property
    def has_gamma(self) -> bool:
        return self.gamma_plus != 0 or self.gamma_minus != 0

    @property
    def is_rational(self) -> bool:
        vals = self.alpha_plus + self.beta_plus + self.alpha_minus + self.beta_minus
        return not self.has_gamma and all(_is_exact_number(v) for v in vals)

    def exact(self) -> "SymbolParams":
        """Same parameters as Fractions; exponential factors are not rational."""
        if self.has_gamma:
            raise DomainError("rational mode requires gamma_plus = gamma_minus = 0")
        conv = lambda xs: tuple(to_fraction(x) for x in xs)  # noqa: E731
        return SymbolParams(conv(self.alpha_plus), conv(self.beta_plus),
                            conv(self.alpha_minus), conv(self.beta_minus), Fraction(0), Fraction(0))

    def as_float(self) -> "SymbolParams":
        conv = lambda xs: tuple(float(x) for x in xs)  # noqa: E731
        return SymbolParams(conv(self.alpha_plus), conv(self.beta_plus),
                            conv(self.alpha_minus), conv(self.beta_minus),
                            float(self.gamma_plus), float(self.gamma_minus))

    def swapped(self) -> "SymbolParams":
        """Parameters of ``(phi_minus(1/u), phi_plus(1/v))``; exchanges A and B."""
        return SymbolParams(self.alpha_minus, self.beta_minus, self.alpha_plus, self.beta_plus,
                            self.gamma_minus, self.gamma_plus)

    def to_dict(self) -> dict:
        f = lambda xs: [float(x) for x in xs]  # noqa: E731
        return {"alphaPlus": f(self.alpha_plus), "betaPlus": f(self.beta_plus),
                "alphaMinus": f(self.alpha_minus), "betaMinus": f(self.beta_minus),
                "gammaPlus": float(self.gamma_plus), "gammaMinus": float(self.gamma_minus)}


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------

def _coerce(values, scalar: str) -> np.ndarray:
    if scalar == RATIONAL:
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = to_fraction(v)
        return out
    return np.asarray(values, dtype=np.float64).copy()


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients of ``z**0 .. z**N``."""

    coeffs: np.ndarray

    @classmethod
    def of(cls, values, scalar: str = FLOAT) -> "TruncatedSeries":
        return cls(_coerce(list(values), scalar))

    @classmethod
    def one(cls, order: int, scalar: str = FLOAT) -> "TruncatedSeries":
        return cls.of([1] + [0] * order, scalar)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def scalar(self) -> str:
        return RATIONAL if self.coeffs.dtype == object else FLOAT

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and bool(np.all(self.coeffs == other.coeffs))

    def substitute_negated(self) -> "TruncatedSeries":
        """Coefficients of ``f(-z)``."""
        c = self.coeffs.copy()
        c[1::2] = -c[1::2]
        return TruncatedSeries(c)

    def evaluate(self, x: float) -> float:
        return float(np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs, dtype=float)))


def _zero(scalar):
    return Fraction(0) if scalar == RATIONAL else 0.0


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.order != b.order:
        raise DimensionError(f"series orders differ: {a.order} vs {b.order}")
    return TruncatedSeries(np.convolve(a.coeffs, b.coeffs)[: a.order + 1])


def series_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    c = a.coeffs
    if c[0] == 0:
        raise DomainError("series with zero constant term is not invertible")
    n = a.order
    out = np.empty_like(c)
    inv0 = 1 / c[0]
    out[0] = inv0
    for k in range(1, n + 1):
        # sum_{j=1..k} c_j out_{k-j}
        out[k] = -np.dot(c[1:k + 1], out[k - 1::-1]) * inv0
    return TruncatedSeries(out)


def series_log(a: TruncatedSeries) -> TruncatedSeries:
    """``log a`` by the derivative recurrence ``a b' = a'``; needs ``a_0 = 1``."""
    c = a.coeffs
    if c[0] != 1:
        raise DomainError("series log requires constant term 1")
    n = a.order
    out = np.empty_like(c)
    out[0] = _zero(a.scalar)
    for k in range(1, n + 1):
        s = np.dot(np.arange(1, k) * out[1:k], c[k - 1:0:-1]) if k > 1 else _zero(a.scalar)
        out[k] = c[k] - s / k
    return TruncatedSeries(out)


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    """``exp a`` by ``n b_n = sum k a_k b_{n-k}``; needs ``a_0 = 0``."""
    c = a.coeffs
    if c[0] != 0:
        raise DomainError("series exp requires constant term 0")
    n = a.order
    out = np.empty_like(c)
    out[0] = Fraction(1) if a.scalar == RATIONAL else 1.0
    weighted = np.arange(0, n + 1) * c
    for k in range(1, n + 1):
        out[k] = np.dot(weighted[1:k + 1], out[k - 1::-1]) / k
    return TruncatedSeries(out)


# ---------------------------------------------------------------------------
# symbol coefficients
# ---------------------------------------------------------------------------

def _resolve_scalar(params: SymbolParams, scalar: str | None) -> tuple[SymbolParams, str]:
    if scalar is None:
        scalar = FLOAT
    if scalar == RATIONAL:
        return params.exact(), scalar
    if scalar == FLOAT:
        return params.as_float(), scalar
    raise ValueError(f"unknown scalar kind {scalar!r}")


def _exp_series(gamma, order: int, scalar: str) -> TruncatedSeries:
    out = np.empty(order + 1, dtype=object if scalar == RATIONAL else np.float64)
    out[0] = Fraction(1) if scalar == RATIONAL else 1.0
    for n in range(1, order + 1):
        out[n] = out[n - 1] * gamma / n
    return TruncatedSeries(out)


def _geometric(x, order: int, scalar: str) -> TruncatedSeries:
    out = np.empty(order + 1, dtype=object if scalar == RATIONAL else np.float64)
    out[0] = Fraction(1) if scalar == RATIONAL else 1.0
    for n in range(1, order + 1):
        out[n] = out[n - 1] * x
    return TruncatedSeries(out)


def power_sums(params: SymbolParams, side: str, order: int, scalar: str | None = None) -> np.ndarray:
    """``p_k = gamma [k=1] + sum alpha^k + (-1)^(k-1) sum beta^k`` for ``k = 0..order`` (``p_0 = 0``)."""
    params, scalar = _resolve_scalar(params, scalar)
    alpha, beta, gamma = params.side(side)
    out = np.empty(order + 1, dtype=object if scalar == RATIONAL else np.float64)
    out[0] = _zero(scalar)
    for k in range(1, order + 1):
        s = sum((a ** k for a in alpha), _zero(scalar))
        s += (-1) ** (k - 1) * sum((b ** k for b in beta), _zero(scalar))
        if k == 1:
            s += gamma
        out[k] = s
    return out


def h_coefficients(params: SymbolParams, side: str, order: int, scalar: str | None = None,
                   method: str = "product") -> TruncatedSeries:
    """Coefficients of ``exp(g z) prod(1 + b_i z) / prod(1 - a_i z)`` through ``z**order``.

    ``method="product"`` multiplies the factor series together;
    ``method="newton"`` runs ``n h_n = sum_k p_k h_{n-k}`` on the power sums.
    For ``side="minus"`` the returned ``h_n`` is the coefficient of ``z**-n``.
    """
    _side(side)
    if order < 0:
        raise DomainError("order must be nonnegative")
    params, scalar = _resolve_scalar(params, scalar)
    alpha, beta, gamma = params.side(side)
    if method == "product":
        acc = _exp_series(gamma, order, scalar)
        for b in beta:
            linear = TruncatedSeries.of(([1, b] + [0] * order)[: order + 1], scalar)
            acc = acc * linear
        for a in alpha:
            acc = acc * _geometric(a, order, scalar)
        return acc
    if method == "newton":
        p = power_sums(params, side, order, scalar)
        out = np.empty(order + 1, dtype=p.dtype)
        out[0] = Fraction(1) if scalar == RATIONAL else 1.0
        for n in range(1, order + 1):
            out[n] = np.dot(p[1:n + 1], out[n - 1::-1]) / n
        return TruncatedSeries(out)
    raise ValueError(f"unknown method {method!r}")


def e_coefficients(params: SymbolParams, side: str, order: int, scalar: str | None = None) -> TruncatedSeries:
    """Coefficients of ``1 / H(-v)``."""
    return series_reciprocal(h_coefficients(params, side, order, scalar).substitute_negated())


def log_coefficients(params: SymbolParams, side: str, order: int, scalar: str | None = None) -> TruncatedSeries:
    """``(ln phi_plus)_k`` or ``(ln phi_minus)_{-k}`` for ``k = 0..order``."""
    return series_log(h_coefficients(params, side, order, scalar))


def closed_form_value(params: SymbolParams, side: str, x: float) -> float:
    """``F(alpha, beta, gamma)(x)`` evaluated directly."""
    alpha, beta, gamma = params.as_float().side(side)
    val = math.exp(gamma * x)
    for b in beta:
        val *= 1 + b * x
    for a in alpha:
        val /= 1 - a * x
    return val


# ---------------------------------------------------------------------------
# Laurent coefficients of the ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RatioWindow:
    """``(phi_minus/phi_plus)_k`` and ``(phi_plus/phi_minus)_k`` for ``lo <= k <= hi``."""

    lo: int
    hi: int
    coeffs: np.ndarray
    dual_coeffs: np.ndarray
    order: int
    tail_mass: float = 0.0
    meta: dict = field(default_factory=dict)

    def _pos(self, k: int) -> int:
        if not (self.lo <= k <= self.hi):
            raise IndexRangeError(f"index {k} outside ratio window [{self.lo}, {self.hi}]")
        return k - self.lo

    def coeff(self, k: int) -> float:
        return float(self.coeffs[self._pos(k)])

    def dual_coeff(self, k: int) -> float:
        return float(self.dual_coeffs[self._pos(k)])

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def envelope(self, x: float) -> float:
        """Smallest ``C`` with ``|coeff(k)|, |dual_coeff(k)| <= C x^-|k|`` on the window."""
        w = float(x) ** np.abs(self.indices())
        return float(max(np.max(np.abs(self.coeffs) * w), np.max(np.abs(self.dual_coeffs) * w)))


def _laurent_product(pos: np.ndarray, neg: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Coefficients k in [lo, hi] of ``sum_b pos_b z^b * sum_a neg_a z^-a``."""
    m = len(neg) - 1
    full = np.convolve(pos, neg[::-1])  # full[k + m] = sum_a neg_a pos_{a+k}
    out = np.zeros(hi - lo + 1)
    ks = np.arange(lo, hi + 1)
    idx = ks + m
    ok = (idx >= 0) & (idx < len(full))
    out[ok] = full[idx[ok]]
    return out


def ratio_window(params: SymbolParams, lo: int, hi: int, tail_tol: float = TAIL_TOLERANCE,
                 max_order: int = 1 << 15) -> RatioWindow:
    """Float Laurent coefficients of both ratios over ``[lo, hi]``.

    The one-sided series are truncated at an internal order that starts at
    ``max(64, 4 * width)`` and doubles until the coefficient mass of the last
    octave of every one-sided series is below ``tail_tol``.
    """
    if not lo <= 0 <= hi:
        raise DomainError(f"window must contain 0, got [{lo}, {hi}]")
    p = params.as_float()
    width = hi - lo
    n = max(64, 4 * width)
    reach = max(-lo, hi)
    while True:
        m = n + reach
        h_plus = h_coefficients(p, PLUS, m).coeffs
        h_minus = h_coefficients(p, MINUS, m).coeffs
        inv_plus = e_coefficients(p, PLUS, m).substitute_negated().coeffs   # 1/phi_plus
        inv_minus = e_coefficients(p, MINUS, m).substitute_negated().coeffs  # 1/phi_minus, z^-a
        octave = slice(m // 2, m + 1)
        tail = max(float(np.abs(s[octave]).sum()) for s in (h_plus, h_minus, inv_plus, inv_minus))
        if tail < tail_tol and all(np.all(np.isfinite(s)) for s in (h_plus, h_minus, inv_plus, inv_minus)):
            break
        if 2 * n > max_order:
            raise TruncationError(
                f"ratio window [{lo}, {hi}] needs internal order above {max_order} (tail mass {tail:.2e})")
        n *= 2
    coeffs = _laurent_product(inv_plus, h_minus, lo, hi)
    dual = _laurent_product(h_plus, inv_minus, lo, hi)
    return RatioWindow(lo, hi, coeffs, dual, order=m, tail_mass=tail)
