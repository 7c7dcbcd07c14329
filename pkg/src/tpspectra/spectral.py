"""Spectral verdicts, total-positivity audits and the corner-resolvent minor identity."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _accel
from .errors import DomainError, ResourceLimitError, SingularMatrixError
from .linalg import (RATIONAL, as_matrix, determinant, eigenvalues, identity, inverse, is_exact, minor,
                     to_float)
from .operators import build_a, build_b, build_t, project_tail, sign_conjugate
from .series import SymbolParams

IMAG_TOLERANCE = 1e-8
EDGE_TOLERANCE = 1e-8
ZERO_EIGENVALUE = 1e-12
CONVERGENCE_TOLERANCE = 1e-8
MINOR_TOLERANCE = 1e-12
MAX_MINOR_SIZE = 5
MAX_WINDOW = 64


# ---------------------------------------------------------------------------
# total positivity
# ---------------------------------------------------------------------------

@dataclass
class TotalPositivityAudit:
    matrix_tag: str
    max_minor_size: int
    window: tuple
    minors_examined: int
    consecutive_examined: int
    sampled_examined: int
    min_minor_value: float | Fraction
    violations: list
    scalar: str
    exhaustive: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"matrixTag": self.matrix_tag, "maxMinorSize": self.max_minor_size,
                "window": list(self.window), "minorsExamined": self.minors_examined,
                "consecutiveExamined": self.consecutive_examined, "sampledExamined": self.sampled_examined,
                "minMinorValue": float(self.min_minor_value), "minMinorExact": str(self.min_minor_value)
                if self.scalar == RATIONAL else None,
                "violations": [[list(r), list(c), float(v)] for r, c, v in self.violations[:50]],
                "violationCount": len(self.violations), "scalar": self.scalar,
                "exhaustive": self.exhaustive, "passed": self.passed}


def _consecutive_sets(n: int, k: int) -> np.ndarray:
    return np.arange(n - k + 1)[:, None] + np.arange(k)[None, :]


def _all_sets(n: int, k: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def _sampled_sets(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    out = np.empty((count, k), dtype=np.int64)
    for i in range(count):
        out[i] = np.sort(rng.choice(n, size=k, replace=False))
    return out


def audit_total_positivity(m, max_minor_size: int = 4, window_cap: int = 12, samples: int = 500,
                           seed: int = 0, tol: float = MINOR_TOLERANCE, exhaustive: bool = False,
                           tag: str = "matrix") -> TotalPositivityAudit:
    """Check minors of the top-left ``window_cap`` corner for nonnegativity.

    Every minor with consecutive row and column index sets is examined; on top
    of that ``samples`` index-set pairs per size are drawn (seeded) from all
    subsets.  ``exhaustive=True`` replaces the sample by every subset pair.
    A clean audit is evidence, not a proof of total positivity.
    Rational matrices are checked exactly (``value >= 0``); float ones at
    ``value >= -tol``.
    """
    if max_minor_size > MAX_MINOR_SIZE:
        raise ResourceLimitError(f"minor size capped at {MAX_MINOR_SIZE}, asked for {max_minor_size}")
    if window_cap > MAX_WINDOW:
        raise ResourceLimitError(f"audit window capped at {MAX_WINDOW}, asked for {window_cap}")
    exact = is_exact(m)
    m = np.asarray(m) if exact else np.asarray(m, dtype=np.float64)
    wr, wc = min(window_cap, m.shape[0]), min(window_cap, m.shape[1])
    sub = m[:wr, :wc]
    rng = np.random.default_rng(seed)
    floor = Fraction(0) if exact else -tol
    violations = []
    min_val = None
    n_consec = n_sampled = 0

    def examine(rows: np.ndarray, cols: np.ndarray):
        nonlocal min_val
        if exact:
            vals = [minor(sub, r, c) for r, c in zip(rows, cols)]
        else:
            vals = _accel.minor_dets(sub, rows, cols)
        for r, c, v in zip(rows, cols, vals):
            if min_val is None or v < min_val:
                min_val = v
            if v < floor:
                violations.append((tuple(int(x) for x in r), tuple(int(x) for x in c), v))
        return len(vals)

    for k in range(1, min(max_minor_size, wr, wc) + 1):
        rs, cs = _consecutive_sets(wr, k), _consecutive_sets(wc, k)
        ri, ci = np.meshgrid(np.arange(len(rs)), np.arange(len(cs)), indexing="ij")
        n_consec += examine(rs[ri.ravel()], cs[ci.ravel()])
        if exhaustive:
            ra, ca = _all_sets(wr, k), _all_sets(wc, k)
            ri, ci = np.meshgrid(np.arange(len(ra)), np.arange(len(ca)), indexing="ij")
            rows, cols = ra[ri.ravel()], ca[ci.ravel()]
            # drop the consecutive pairs examined above
            keep = ~(np.all(np.diff(rows, axis=1) == 1, axis=1) & np.all(np.diff(cols, axis=1) == 1, axis=1))
            n_sampled += examine(rows[keep], cols[keep])
        elif samples and k >= 2:
            pairs = np.unique(np.hstack([_sampled_sets(rng, wr, k, samples),
                                         _sampled_sets(rng, wc, k, samples)]), axis=0)
            rows, cols = pairs[:, :k], pairs[:, k:]
            keep = ~(np.all(np.diff(rows, axis=1) == 1, axis=1) & np.all(np.diff(cols, axis=1) == 1, axis=1))
            n_sampled += examine(rows[keep], cols[keep])
    if min_val is None:
        min_val = Fraction(0) if exact else 0.0
    return TotalPositivityAudit(tag, max_minor_size, (wr, wc), n_consec + n_sampled, n_consec, n_sampled,
                                min_val if exact else float(min_val), violations,
                                RATIONAL if exact else "float", exhaustive)


def toeplitz_lower(h, size: int) -> np.ndarray:
    """``[h_{i-j}]`` for ``0 <= i, j < size`` with ``h_{-k} = 0``."""
    c = h.coeffs if hasattr(h, "coeffs") else np.asarray(h)
    exact = c.dtype == object
    out = np.full((size, size), Fraction(0), dtype=object) if exact else np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1):
            out[i, j] = c[i - j]
    return out


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    operator_tag: str
    truncation_order: int
    tail_start: int
    eigenvalues: np.ndarray
    max_imag_abs: float
    range: tuple
    backward_error: float
    imag_tolerance: float
    edge_tolerance: float
    near_one: list = field(default_factory=list)
    convergence_trace: list = field(default_factory=list)
    determinants: list = field(default_factory=list)
    verdict: str = "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, with_eigenvalues: bool = True) -> dict:
        out = {"operatorTag": self.operator_tag, "truncationOrder": self.truncation_order,
               "tailStart": self.tail_start, "maxImagAbs": self.max_imag_abs,
               "range": [float(x) for x in self.range], "backwardError": self.backward_error,
               "imagTolerance": self.imag_tolerance, "edgeTolerance": self.edge_tolerance,
               "nearOne": [[float(z.real), float(z.imag)] for z in self.near_one],
               "convergenceTrace": [[int(n), float(d)] for n, d in self.convergence_trace],
               "determinants": [[int(n), float(d)] for n, d in self.determinants],
               "verdict": self.verdict}
        if with_eigenvalues:
            out["eigenvalues"] = [[float(z.real), float(z.imag)] for z in self.eigenvalues]
        return out


def spectrum_verdict(m, tag: str = "matrix", order: int | None = None, tail_start: int = 0,
                     imag_tol: float = IMAG_TOLERANCE, edge_tol: float = EDGE_TOLERANCE) -> SpectrumReport:
    """Eigenvalues and the real-and-in-[0, 1] verdict."""
    m = to_float(m)
    res = eigenvalues(m)
    vals = np.sort_complex(res.values)
    if len(vals):
        max_imag = float(np.max(np.abs(vals.imag)))
        lo, hi = float(vals.real.min()), float(vals.real.max())
    else:
        max_imag, lo, hi = 0.0, 0.0, 0.0
    ok = max_imag < imag_tol and lo >= -edge_tol and hi <= 1 + edge_tol
    near_one = [z for z in vals if abs(z.real - 1) <= edge_tol]
    return SpectrumReport(tag, order if order is not None else m.shape[0] + tail_start, tail_start, vals,
                          max_imag, (lo, hi), res.backward_error, imag_tol, edge_tol, near_one,
                          verdict="pass" if ok else "fail")


def nonzero_spectrum(vals: np.ndarray, zero_tol: float = ZERO_EIGENVALUE) -> np.ndarray:
    vals = np.asarray(vals, dtype=complex)
    return vals[np.abs(vals) > zero_tol]


def hausdorff_distance(s1, s2, zero_tol: float = ZERO_EIGENVALUE) -> float:
    """Hausdorff distance between the nonzero spectra, each joined with ``{0}``."""
    a = np.concatenate([nonzero_spectrum(s1, zero_tol), [0j]])
    b = np.concatenate([nonzero_spectrum(s2, zero_tol), [0j]])
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def matched_distance(s1, s2) -> float:
    """Largest gap under an optimal one-to-one matching of two equal-size spectra."""
    a, b = np.asarray(s1, dtype=complex), np.asarray(s2, dtype=complex)
    if a.shape != b.shape:
        raise DomainError(f"spectra differ in size: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    d = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(d)
    return float(d[r, c].max())


def sweep_convergence(builder: Callable[[int], np.ndarray], schedule: Sequence[int], tag: str = "operator",
                      tol: float = CONVERGENCE_TOLERANCE, imag_tol: float = IMAG_TOLERANCE,
                      edge_tol: float | None = None) -> SpectrumReport:
    """Spectra of ``builder(N)`` along an increasing schedule.

    The trace holds the Hausdorff distance between consecutive nonzero
    spectra; ``determinants`` holds ``det(1 + M_N)``.  The verdict is
    ``"pass"`` once the last distance is below ``tol``, ``"inconclusive"``
    otherwise.  ``edge_tol=None`` skips the [0, 1] range test (for operators
    such as ``A^t B`` whose spectrum is only claimed nonnegative).
    """
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError(f"schedule must be increasing: {schedule}")
    trace, dets = [], []
    prev = None
    last = None
    for n in schedule:
        m = to_float(builder(n))
        rep = spectrum_verdict(m, tag, order=n, imag_tol=imag_tol,
                               edge_tol=edge_tol if edge_tol is not None else np.inf)
        dets.append((n, float(np.linalg.det(np.eye(m.shape[0]) + m))))
        if prev is not None:
            trace.append((n, hausdorff_distance(prev.eigenvalues, rep.eigenvalues)))
        prev = last = rep
    last.convergence_trace = trace
    last.determinants = dets
    converged = (trace[-1][1] < tol) if trace else False
    last.verdict = "pass" if converged and last.verdict == "pass" else ("inconclusive" if not converged else "fail")
    return last


def is_monotone_nonincreasing(trace: Sequence[tuple]) -> bool:
    d = [x for _, x in trace]
    return all(b <= a for a, b in zip(d, d[1:]))


# ---------------------------------------------------------------------------
# Widom's operator and the tail-projected kernel blocks
# ---------------------------------------------------------------------------

@dataclass
class Theorem4Report:
    params: dict
    order: int
    tail_starts: list
    spectra: list
    similarity: list
    atb_nonnegative: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"params": self.params, "order": self.order, "tailStarts": self.tail_starts,
                "spectra": [s.to_dict() for s in self.spectra], "similarity": self.similarity,
                "atbNonnegative": self.atb_nonnegative, "passed": self.passed}


def verify_theorem4(params: SymbolParams, order: int = 40, tail_starts: Sequence[int] = range(6),
                    imag_tol: float = IMAG_TOLERANCE, edge_tol: float = EDGE_TOLERANCE,
                    match_tol: float = 1e-10) -> Theorem4Report:
    """Spectra of ``K11^(n)``, ``K22^(n)`` and ``T^(n)`` at truncation ``order``.

    ``K11`` and ``K22`` come from the resolvents of ``A^t B`` and ``B A^t``;
    ``T^(n)`` is compared with the sign conjugate of the series-route ``K11``
    tail, which it equals entry by entry.
    """
    from .kernel import kernel_blocks, kernel_series

    p = params.as_float()
    a = build_a(p, order)
    b = build_b(p, order)
    blocks = kernel_blocks(a, b)
    series = kernel_series(p, order)
    spectra, similarity = [], []
    ok = True
    for n in tail_starts:
        k11n = project_tail(blocks.k11, n)
        k22n = project_tail(blocks.k22, n)
        t = build_t(p, n, order).matrix
        reps = [spectrum_verdict(k11n, f"K11^({n})", order, n, imag_tol, edge_tol),
                spectrum_verdict(k22n, f"K22^({n})", order, n, imag_tol, edge_tol),
                spectrum_verdict(t, f"T^({n})", order, n, imag_tol, edge_tol)]
        ok &= all(r.passed for r in reps)
        spectra.extend(reps)
        conj = sign_conjugate(project_tail(series.k11, n), offset=n)
        entry_gap = float(np.abs(conj - t).max()) if t.size else 0.0
        series_spec = eigenvalues(conj).values
        spec_gap = matched_distance(reps[2].eigenvalues, series_spec)
        blocks_gap = matched_distance(reps[0].eigenvalues, reps[2].eigenvalues)
        ok &= spec_gap < match_tol
        similarity.append({"tailStart": n, "entryGap": entry_gap, "spectrumGap": spec_gap,
                           "blocksRouteSpectrumGap": blocks_gap, "passed": bool(spec_gap < match_tol)})
    atb = a.matrix.T @ b.matrix
    vals = eigenvalues(atb).values
    min_re = float(vals.real.min()) if vals.size else 0.0
    atb_ok = min_re >= -edge_tol and (float(np.abs(vals.imag).max()) if vals.size else 0.0) < imag_tol
    ok &= atb_ok
    return Theorem4Report(p.to_dict(), order, list(tail_starts), spectra, similarity,
                          {"minReal": min_re, "passed": bool(atb_ok)}, bool(ok))


# ---------------------------------------------------------------------------
# minor identity for the corner of C (1 + C)^-1
# ---------------------------------------------------------------------------

@dataclass
class Lemma6Report:
    m: int
    n: int
    det_one_plus_c: Fraction
    det_one_minus_d: Fraction
    determinant_identity: bool
    minors_checked: int
    minor_failures: list
    d: np.ndarray = field(repr=False, default=None)
    e: np.ndarray = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return self.determinant_identity and not self.minor_failures

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "det1PlusC": str(self.det_one_plus_c),
                "det1MinusD": str(self.det_one_minus_d), "determinantIdentity": self.determinant_identity,
                "minorsChecked": self.minors_checked,
                "minorFailures": [[list(x), list(y)] for x, y in self.minor_failures],
                "passed": self.passed}


def _subsets(indices: Sequence[int], max_size: int | None = None):
    top = len(indices) if max_size is None else min(max_size, len(indices))
    for k in range(top + 1):
        yield from itertools.combinations(indices, k)


def lemma6_check(c, m: int, max_minor: int = 2) -> Lemma6Report:
    """Check both minor identities for the lower-right ``n x n`` corner of ``C (1 + C)^-1``.

    Exact arithmetic only: ``C`` is converted to Fractions and float input is
    rejected.
    """
    if isinstance(c, np.ndarray) and c.dtype != object and np.issubdtype(c.dtype, np.floating):
        raise DomainError("the minor identity is checked in exact arithmetic only")
    c = as_matrix(c, RATIONAL)
    size = c.shape[0]
    n = size - m
    if not 0 <= m <= size:
        raise DomainError(f"split m={m} outside 0..{size}")
    one = identity(size, RATIONAL)
    det_c = determinant(one + c)
    if det_c == 0:
        raise SingularMatrixError("1 + C is singular", determinant=det_c)
    d = c.dot(inverse(one + c))[m:, m:]
    one_n = identity(n, RATIONAL)
    det_d = determinant(one_n - d)
    if det_d == 0:
        raise SingularMatrixError("1 - D is singular", determinant=det_d)
    head = list(range(m))
    rhs = sum((minor(c, z, z) for z in _subsets(head)), Fraction(0)) / det_c
    ident1 = det_d == rhs

    e = d.dot(inverse(one_n - d))
    det_e = determinant(one_n + e)
    failures = []
    checked = 0
    for k in range(max_minor + 1):
        for x in itertools.combinations(range(n), k):
            for y in itertools.combinations(range(n), k):
                lhs = minor(e, x, y) / det_e
                total = Fraction(0)
                for z in _subsets(head):
                    total += minor(c, list(z) + [m + i for i in x], list(z) + [m + j for j in y])
                checked += 1
                if lhs != total / det_c:
                    failures.append((x, y))
    return Lemma6Report(m, n, det_c, det_d, ident1, checked, failures, d, e)


def random_rational_matrix(rng: np.random.Generator, size: int, num: int = 3, den: int = 4) -> np.ndarray:
    nums = rng.integers(-num, num + 1, size=(size, size))
    dens = rng.integers(1, den + 1, size=(size, size))
    out = np.empty((size, size), dtype=object)
    for i in range(size):
        for j in range(size):
            out[i, j] = Fraction(int(nums[i, j]), int(dens[i, j]))
    return out


def lemma6_trials(m: int = 3, n: int = 3, trials: int = 20, seed: int = 0, max_minor: int = 2) -> list[Lemma6Report]:
    """Seeded random instances; each trial has its own generator and redraws singular cases."""
    reports = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        while True:
            c = random_rational_matrix(rng, m + n)
            try:
                reports.append(lemma6_check(c, m, max_minor))
                break
            except SingularMatrixError:
                continue
    return reports


def structured_lemma6(params: SymbolParams, m: int = 3, n: int = 3, window: int = 12,
                      audit_size: int = 3) -> dict:
    """Lemma-6 data for ``C`` = top-left ``(m+n)`` corner of ``A^t B`` (rational corners of size ``window``)."""
    p = params.exact()
    size = m + n
    window = max(window, size)
    a = build_a(p, window, scalar=RATIONAL).matrix
    b = build_b(p, window, scalar=RATIONAL).matrix
    c = a[:, :size].T.dot(b[:, :size])
    rep = lemma6_check(c, m)
    d_audit = audit_total_positivity(rep.d, audit_size, window_cap=n, samples=0, exhaustive=True, tag="D")
    e_audit = audit_total_positivity(rep.e, audit_size, window_cap=n, samples=0, exhaustive=True, tag="E")
    positive = rep.det_one_minus_d > 0
    return {"report": rep, "det1MinusDPositive": bool(positive), "auditD": d_audit, "auditE": e_audit,
            "passed": bool(rep.passed and positive and d_audit.passed and e_audit.passed)}
