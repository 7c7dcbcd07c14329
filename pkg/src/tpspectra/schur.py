"""Partitions, Schur values under the two specialisations, and the Schur measure."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import _accel
from .errors import DomainError, ResourceLimitError, TruncationError
from .linalg import FLOAT, RATIONAL, determinant, to_float
from .operators import OperatorTruncation, build_a, build_b
from .series import (MINUS, PLUS, SymbolParams, TruncatedSeries, h_coefficients, log_coefficients,
                     power_sums, series_exp)

MAX_ENUMERATION_SIZE = 60


@dataclass(frozen=True)
class Partition:
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(x <= 0 for x in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise DomainError(f"parts must be weakly decreasing positive integers: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def part(self, i: int) -> int:
        """``lambda_i`` with 1-based ``i``; zero past the length."""
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for x in self.parts if x > j) for j in range(self.parts[0])))

    @property
    def rank(self) -> int:
        return sum(1 for i, x in enumerate(self.parts, start=1) if x >= i)

    @property
    def frobenius(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Arm and leg lengths ``(p_1 > ... > p_d | q_1 > ... > q_d)``."""
        d = self.rank
        conj = self.conjugate().parts
        return (tuple(self.parts[i] - i - 1 for i in range(d)),
                tuple(conj[i] - i - 1 for i in range(d)))

    @classmethod
    def from_frobenius(cls, p: Sequence[int], q: Sequence[int]) -> "Partition":
        p, q = list(p), list(q)
        if len(p) != len(q):
            raise DomainError("Frobenius coordinates need equal lengths")
        if any(a <= b for a, b in zip(p, p[1:])) or any(a <= b for a, b in zip(q, q[1:])) \
                or any(x < 0 for x in p + q):
            raise DomainError(f"Frobenius coordinates must be strictly decreasing and >= 0: ({p}|{q})")
        d = len(p)
        if d == 0:
            return cls(())
        length = q[0] + 1
        rows = []
        for i in range(1, length + 1):
            if i <= d:
                rows.append(p[i - 1] + i)
            else:
                # boxes of row i lie in columns j <= d with leg q_j reaching row i
                rows.append(sum(1 for j in range(d) if q[j] + j + 1 >= i))
        return cls(tuple(rows))

    def point(self, i: int) -> int:
        """``lambda_i - i``."""
        return self.part(i) - i

    def contains(self, x: int) -> bool:
        """Whether ``x`` lies in ``{lambda_i - i : i >= 1}``."""
        n = len(self.parts)
        if x <= -n - 1:
            return True
        return any(self.parts[i - 1] - i == x for i in range(1, n + 1))

    def points(self, lowest: int) -> list[int]:
        """Elements of ``{lambda_i - i}`` that are ``>= lowest``, decreasing."""
        out, i = [], 1
        while True:
            v = self.point(i)
            if v < lowest:
                return out
            out.append(v)
            i += 1


def enumerate_partitions(max_size: int) -> Iterator[Partition]:
    """Every partition of every ``n <= max_size``, by size, then lexicographically decreasing."""
    if max_size > MAX_ENUMERATION_SIZE:
        raise ResourceLimitError(f"enumeration capped at size {MAX_ENUMERATION_SIZE}, asked for {max_size}")
    for n in range(max_size + 1):
        for parts in partitions_of(n):
            yield Partition(parts)


def partitions_of(n: int) -> Iterator[tuple]:
    """Partitions of ``n`` as tuples in decreasing lexicographic order."""
    if n == 0:
        yield ()
        return
    x = [1] * (n + 1)
    x[1] = n
    m = h = 1
    yield (n,)
    while x[1] != 1:
        if x[h] == 2:
            m += 1
            x[h] = 1
            h -= 1
        else:
            r = x[h] - 1
            t = m - h + 1
            x[h] = r
            while t >= r:
                h += 1
                x[h] = r
                t -= r
            if t == 0:
                m = h
            else:
                m = h + 1
                if t > 1:
                    h += 1
                    x[h] = t
        yield tuple(x[1:m + 1])


# ---------------------------------------------------------------------------
# Schur values
# ---------------------------------------------------------------------------

def _coeffs(h):
    return h.coeffs if isinstance(h, TruncatedSeries) else np.asarray(h)


def schur_jacobi_trudi(lam: Partition, h) -> float | Fraction:
    """``det[h_{lambda_i - i + j}]`` over the nonzero parts."""
    c = _coeffs(h)
    n = lam.length
    if n == 0:
        return Fraction(1) if c.dtype == object else 1.0
    need = lam.parts[0] + n - 1
    if need > len(c) - 1:
        raise TruncationError(f"Jacobi-Trudi for {lam.parts} needs h up to {need}, have {len(c) - 1}")
    zero = Fraction(0) if c.dtype == object else 0.0
    m = np.empty((n, n), dtype=c.dtype)
    for i in range(n):
        for j in range(n):
            k = lam.parts[i] - i + j
            m[i, j] = c[k] if k >= 0 else zero
    return determinant(m)


def schur_giambelli(lam: Partition, hooks) -> float | Fraction:
    """``det[s_(p_i|q_j)]`` from a matrix of hook values (e.g. the A or B corner)."""
    m = hooks.matrix if isinstance(hooks, OperatorTruncation) else np.asarray(hooks)
    p, q = lam.frobenius
    if not p:
        return Fraction(1) if m.dtype == object else 1.0
    if max(p[0], q[0]) >= m.shape[0]:
        raise TruncationError(f"Frobenius coordinates of {lam.parts} exceed the {m.shape[0]}x{m.shape[0]} hook table")
    return determinant(m[np.ix_(list(p), list(q))])


# ---------------------------------------------------------------------------
# normalisation
# ---------------------------------------------------------------------------

def normalization_z_closed_form(params: SymbolParams):
    """``Z`` from the Cauchy identity; exact for rational parameters."""
    exact = params.is_rational
    p = params.exact() if exact else params.as_float()
    val = Fraction(1) if exact else 1.0
    for a in p.alpha_plus:
        for b in p.alpha_minus:
            val /= 1 - a * b
        for b in p.beta_minus:
            val *= 1 + a * b
    for a in p.beta_plus:
        for b in p.beta_minus:
            val /= 1 - a * b
        for b in p.alpha_minus:
            val *= 1 + a * b
    if not exact:
        val *= math.exp(p.gamma_plus * p.gamma_minus
                        + p.gamma_plus * (sum(p.alpha_minus) + sum(p.beta_minus))
                        + p.gamma_minus * (sum(p.alpha_plus) + sum(p.beta_plus)))
    return val


def _z_tail_bound(params: SymbolParams, order: int) -> float:
    """Bound on the dropped part of ``sum_k k (ln phi+)_k (ln phi-)_-k`` past ``order``."""
    npl = len(params.alpha_plus) + len(params.beta_plus)
    nmi = len(params.alpha_minus) + len(params.beta_minus)
    rp = max(params.alpha_plus + params.beta_plus, default=0.0)
    rm = max(params.alpha_minus + params.beta_minus, default=0.0)
    q = float(rp) * float(rm)
    if q == 0.0 or order < 1:
        return 0.0 if order >= 1 else math.inf
    return npl * nmi * q ** (order + 1) / ((order + 1) * (1 - q))


def normalization_z(params: SymbolParams, order: int | None = None, tol: float = 1e-16) -> tuple[float, float]:
    """``Z = exp sum_k k (ln phi+)_k (ln phi-)_{-k}`` from log-series coefficients.

    Returns ``(Z, relative tail bound)``.  With ``order=None`` the order doubles
    from 32 until the tail bound is below ``tol``; an explicit order whose tail
    exceeds ``tol`` raises :class:`TruncationError`.
    """
    p = params.as_float()
    n = order or 32
    while True:
        tail = _z_tail_bound(p, n)
        if tail < tol:
            break
        if order is not None or n > 1 << 14:
            raise TruncationError(f"log-series for Z not converged at order {n} (tail {tail:.2e})")
        n *= 2
    lp = log_coefficients(p, PLUS, n).coeffs
    lm = log_coefficients(p, MINUS, n).coeffs
    k = np.arange(n + 1)
    s = float(np.sum(k[1:] * lp[1:] * lm[1:]))
    z = math.exp(s)
    return z, math.expm1(tail) if tail else 0.0


def size_series(params: SymbolParams, order: int, scalar: str = FLOAT) -> TruncatedSeries:
    """``[t^n] Z(t) = sum_{|lambda| = n} s_lambda^+ s_lambda^-`` through ``t^order``."""
    pp = power_sums(params, PLUS, order, scalar)
    pm = power_sums(params, MINUS, order, scalar)
    c = np.empty(order + 1, dtype=pp.dtype)
    c[0] = Fraction(0) if scalar == RATIONAL else 0.0
    for k in range(1, order + 1):
        c[k] = pp[k] * pm[k] / k
    return series_exp(TruncatedSeries(c))


def size_tail_bound(params: SymbolParams, max_size: int, z: float | None = None) -> float:
    """Probability mass of ``|lambda| > max_size``.

    The size series is summed out to ``4 * max_size + 64`` and the rest is
    covered by a geometric envelope fitted on the last coefficients.
    """
    p = params.as_float()
    z = z if z is not None else normalization_z(p)[0]
    far = 4 * max_size + 64
    c = size_series(p, far).coeffs
    mass = float(np.sum(np.abs(c[max_size + 1:])))
    last, prev = abs(c[-1]), abs(c[-2])
    # polynomial size series (no alpha-alpha or beta-beta pairs) end in roundoff
    if last <= 1e-18 * float(np.max(np.abs(c))):
        rest = 0.0
    else:
        q = last / prev if prev > 0 else 1.0
        rest = last * q / (1 - q) if q < 1 else math.inf
    return (mass + rest) / z


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class MeasureContext:
    """Data of one Schur measure; weights are cached per partition."""

    params: SymbolParams
    scalar: str
    order: int
    h_plus: TruncatedSeries
    h_minus: TruncatedSeries
    z: float | Fraction
    z_tail: float
    _cache: dict = field(default_factory=dict, repr=False)
    _tables: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def build(cls, params: SymbolParams, order: int = 64, scalar: str = FLOAT) -> "MeasureContext":
        if scalar == RATIONAL:
            p = params.exact()
            z, tail = normalization_z_closed_form(p), 0.0
        else:
            p = params.as_float()
            z, tail = normalization_z(p)
        return cls(p, scalar, order, h_coefficients(p, PLUS, order, scalar),
                   h_coefficients(p, MINUS, order, scalar), z, tail)

    def schur_pair(self, lam: Partition):
        return schur_jacobi_trudi(lam, self.h_plus), schur_jacobi_trudi(lam, self.h_minus)

    def weight(self, lam: Partition):
        hit = self._cache.get(lam.parts)
        if hit is not None:
            return hit
        sp, sm = self.schur_pair(lam)
        w = sp * sm / self.z
        # identical values may race in from several threads; last write wins
        self._cache[lam.parts] = w
        return w

    def weight_table(self, max_size: int) -> "WeightTable":
        with self._lock:
            table = self._tables.get(max_size)
            if table is None:
                table = _weight_table(self, max_size)
                self._tables[max_size] = table
            return table


def measure_weight(ctx: MeasureContext, lam: Partition):
    """``P{lambda} = s_lambda^+ s_lambda^- / Z`` via Jacobi-Trudi."""
    return ctx.weight(lam)


@dataclass(eq=False)
class WeightTable:
    """All partitions up to a size with their weights and point-set rows.

    ``points[b, i-1] = lambda_i - i`` for ``i = 1 .. width``; beyond the table
    width every integer belongs to the configuration.
    """

    max_size: int
    weights: np.ndarray
    sizes: np.ndarray
    points: np.ndarray
    tail_bound: float

    @property
    def floor(self) -> int:
        return -self.points.shape[1]

    def membership(self, x: int) -> np.ndarray:
        if x < self.floor:
            return np.ones(len(self.weights), dtype=bool)
        return np.any(self.points == x, axis=1)


def _weight_table(ctx: MeasureContext, max_size: int) -> WeightTable:
    parts = list(enumerate_partitions(max_size))
    width = max_size + 1
    pts = np.empty((len(parts), width), dtype=np.int64)
    idx = np.arange(1, width + 1)
    sizes = np.empty(len(parts), dtype=np.int64)
    by_rank: dict[int, tuple[list, list, list]] = {}
    for b, lam in enumerate(parts):
        row = np.zeros(width, dtype=np.int64)
        row[:lam.length] = lam.parts
        pts[b] = row - idx
        sizes[b] = lam.size
        p, q = lam.frobenius
        slot = by_rank.setdefault(len(p), ([], [], []))
        slot[0].append(b)
        slot[1].append(p)
        slot[2].append(q)

    if ctx.scalar == RATIONAL:
        weights = np.array([float(ctx.weight(lam)) for lam in parts])
    else:
        n = max(max_size, 1)
        a = build_a(ctx.params, n).matrix
        bm = build_b(ctx.params, n).matrix
        weights = np.empty(len(parts))
        for d, (rows, p, q) in by_rank.items():
            rows = np.asarray(rows)
            if d == 0:
                weights[rows] = 1.0
                continue
            p = np.asarray(p, dtype=np.int64)
            q = np.asarray(q, dtype=np.int64)
            weights[rows] = _accel.minor_dets(a, p, q) * _accel.minor_dets(bm, p, q)
        weights /= float(ctx.z)
    tail = size_tail_bound(ctx.params, max_size, float(ctx.z))
    return WeightTable(max_size, weights, sizes, pts, tail)


@dataclass
class CorrelationEstimate:
    points: tuple
    value: float
    tail_bound: float
    max_size: int


def brute_correlation(ctx: MeasureContext, points: Sequence[int], max_size: int) -> CorrelationEstimate:
    """``sum P{lambda}`` over ``|lambda| <= max_size`` with ``points`` inside ``L(lambda)``."""
    pts = tuple(int(x) for x in points)
    if len(set(pts)) != len(pts):
        raise DomainError(f"points must be distinct: {pts}")
    table = ctx.weight_table(max_size)
    mask = np.ones(len(table.weights), dtype=bool)
    for x in pts:
        mask &= table.membership(x)
    return CorrelationEstimate(pts, float(np.sum(table.weights[mask])), table.tail_bound, max_size)


@dataclass
class Theorem3Report:
    max_size: int
    tolerance: float
    tail_bound: float
    total_mass: float
    entries: list
    passed: bool

    def to_dict(self) -> dict:
        return {"max_size": self.max_size, "tolerance": self.tolerance, "tail_bound": self.tail_bound,
                "total_mass": self.total_mass, "entries": self.entries, "passed": self.passed}


def verify_theorem3(ctx: MeasureContext, point_sets: Sequence[Sequence[int]], max_size: int,
                    tol: float = 1e-7) -> Theorem3Report:
    """Brute-force correlations against ``det[K(x_i, x_j)]`` for each point set."""
    from .kernel import z_kernel  # kernel imports this module lazily as well

    sets = [tuple(int(x) for x in s) for s in point_sets]
    flat = [x for s in sets for x in s] or [0]
    zk = z_kernel(ctx.params.as_float(), min(flat), max(flat))
    table = ctx.weight_table(max_size)
    entries = []
    ok = True
    for s in sets:
        est = brute_correlation(ctx, s, max_size)
        det = zk.correlation(s)
        diff = abs(est.value - det)
        passed = diff <= est.tail_bound + tol
        ok &= passed
        entries.append({"points": list(s), "brute_force": est.value, "determinant": det,
                        "difference": diff, "tail_bound": est.tail_bound, "passed": bool(passed)})
    total = float(np.sum(table.weights))
    return Theorem3Report(max_size, tol, table.tail_bound, total, entries, bool(ok))
