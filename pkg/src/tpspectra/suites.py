"""Verification suites and their report files."""
from __future__ import annotations

import csv
import json
import math
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _accel
from .config import RunConfig
from .kernel import kernel_direct, verify_theorem1, z_kernel
from .linalg import RATIONAL
from .operators import build_a, build_b, build_l
from .schur import MeasureContext, normalization_z, normalization_z_closed_form, verify_theorem3
from .series import MINUS, PLUS, h_coefficients
from .spectral import (audit_total_positivity, is_monotone_nonincreasing, lemma6_trials, structured_lemma6,
                       sweep_convergence, toeplitz_lower, verify_theorem4)

SCHEMA_VERSION = "1.0"
SUITES = ("theorem1", "theorem3", "theorem4", "lemma6", "tpAudit")
ALL = "all"

CONVERGENCE_SCHEDULE = (8, 16, 32, 64)
CONVERGENCE_RHO = 0.5
NORMALIZATION_ORDER = 48
TP_WINDOW = 12
TP_MINOR_SIZE = 4
TP_SAMPLES = 500

_write_lock = threading.Lock()


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    report: dict
    files: list = field(default_factory=list)


def safe_tag(tag: str) -> str:
    """``K11^(3)`` -> ``K11_3``; file-name safe."""
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", tag).strip("_")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if x is None or isinstance(x, str):
        return x
    return str(x)


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class ReportWriter:
    """Serialises all file output of concurrently running suites."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.written: list[str] = []

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def json(self, name: str, report: dict) -> str:
        with _write_lock:
            p = self._path(name)
            p.write_text(dumps_report(report), encoding="utf-8")
            self.written.append(p.name)
            return p.name

    def eigenvalues(self, tag: str, values) -> str:
        with _write_lock:
            p = self._path(f"{safe_tag(tag)}.eigenvalues.csv")
            with p.open("w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["index", "re", "im"])
                for i, z in enumerate(np.asarray(values, dtype=complex)):
                    w.writerow([i, repr(float(z.real)), repr(float(z.imag))])
            self.written.append(p.name)
            return p.name

    def matrix(self, tag: str, m, row_offset: int = 0, col_offset: int = 0) -> str:
        m = np.asarray(m)
        with _write_lock:
            p = self._path(f"{safe_tag(tag)}.matrix.csv")
            with p.open("w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["row", "col", "value"])
                for (i, j), v in np.ndenumerate(m):
                    w.writerow([i + row_offset, j + col_offset, str(v) if m.dtype == object else repr(float(v))])
            self.written.append(p.name)
            return p.name


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_theorem1(cfg: RunConfig, out: ReportWriter) -> SuiteResult:
    n = cfg.matrix_order
    tol = cfg.tolerance
    rep = verify_theorem1(cfg.params, n, max(1, n // 2),
                          **({} if tol is None else {"series_tol": tol, "direct_tol": min(tol, 1e-10)}))
    files = [out.matrix(f"theorem1.K.N{n}", kernel_direct(build_l(build_a(cfg.params.as_float(), n),
                                                                   build_b(cfg.params.as_float(), n))).assembled())]
    return SuiteResult("theorem1", rep.passed, rep.to_dict(), files)


def _normalization(cfg: RunConfig, mass: float) -> dict:
    p = cfg.params
    z_series, z_tail = normalization_z(p.as_float())
    closed = normalization_z_closed_form(p.exact() if p.is_rational else p.as_float())
    n = NORMALIZATION_ORDER
    det_l = float(np.linalg.det(np.eye(2 * n) + build_l(build_a(p.as_float(), n), build_b(p.as_float(), n))))
    closed_f = float(closed)
    z_gap = abs(z_series - closed_f)
    det_rel = abs(det_l - closed_f) / closed_f
    ok = (1 - 1e-8 <= mass <= 1 + 1e-12) and z_gap < 1e-12 and det_rel < 1e-6
    return {"totalMass": mass, "zClosedForm": closed_f, "zClosedFormExact": str(closed),
            "zSeries": z_series, "zSeriesTail": z_tail, "zDifference": z_gap,
            "detOnePlusL": det_l, "detOrder": n, "detRelativeDifference": det_rel, "passed": bool(ok)}


def suite_theorem3(cfg: RunConfig, out: ReportWriter) -> SuiteResult:
    w = cfg.point_window
    pts = list(range(-w, w + 1))
    sets = [(x,) for x in pts] + [(x, y) for i, x in enumerate(pts) for y in pts[i + 1:]]
    ctx = MeasureContext.build(cfg.params, order=max(cfg.series_order, cfg.enumeration_cap + 1))
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-7
    rep = verify_theorem3(ctx, sets, cfg.enumeration_cap, tol)
    tail_ok = rep.tail_bound < 1e-8
    norm = _normalization(cfg, rep.total_mass)
    report = rep.to_dict()
    report.update({"tailBoundBelow1e-8": bool(tail_ok), "normalization": norm})
    zk = z_kernel(cfg.params.as_float(), -w, w)
    files = [out.matrix("theorem3.kernel", zk.values, -w, -w)]
    report["kernelMeta"] = zk.meta
    return SuiteResult("theorem3", bool(rep.passed and tail_ok and norm["passed"]), report, files)


def _convergence(cfg: RunConfig) -> dict:
    p = cfg.params.as_float()
    rep = sweep_convergence(lambda n: build_a(p, n).matrix.T @ build_b(p, n).matrix, CONVERGENCE_SCHEDULE, "AtB")
    monotone = is_monotone_nonincreasing(rep.convergence_trace)
    final = rep.convergence_trace[-1][1]
    gated = p.rho <= CONVERGENCE_RHO
    ok = monotone and final < 1e-8
    return {"schedule": list(CONVERGENCE_SCHEDULE), "trace": rep.to_dict(False)["convergenceTrace"],
            "determinants": rep.to_dict(False)["determinants"], "monotone": bool(monotone),
            "finalDistance": final, "gated": bool(gated), "rho": p.rho,
            "verdict": "pass" if ok else ("fail" if gated else "inconclusive"), "_values": rep.eigenvalues}


def suite_theorem4(cfg: RunConfig, out: ReportWriter) -> SuiteResult:
    tol = cfg.tolerance
    kw = {} if tol is None else {"imag_tol": tol, "edge_tol": tol}
    rep = verify_theorem4(cfg.params, cfg.matrix_order, cfg.tail_starts, **kw)
    files = [out.eigenvalues(f"theorem4.{s.operator_tag}", s.eigenvalues) for s in rep.spectra]
    conv = _convergence(cfg)
    files.append(out.eigenvalues(f"theorem4.AtB.N{CONVERGENCE_SCHEDULE[-1]}", conv.pop("_values")))
    report = rep.to_dict()
    report["convergence"] = conv
    ok = rep.passed and (conv["verdict"] == "pass" or not conv["gated"])
    return SuiteResult("theorem4", bool(ok), report, files)


def suite_lemma6(cfg: RunConfig, out: ReportWriter) -> SuiteResult:
    trials = lemma6_trials(3, 3, 20, seed=cfg.seed)
    report = {"seed": cfg.seed, "trials": [t.to_dict() for t in trials]}
    ok = all(t.passed for t in trials)
    files = []
    if cfg.params.has_gamma:
        report["structured"] = {"skipped": "exponential parameters have no exact corners"}
    else:
        s = structured_lemma6(cfg.params)
        report["structured"] = {"report": s["report"].to_dict(), "det1MinusDPositive": s["det1MinusDPositive"],
                                "auditD": s["auditD"].to_dict(), "auditE": s["auditE"].to_dict(),
                                "passed": s["passed"]}
        files.append(out.matrix("lemma6.D", s["report"].d))
        ok &= s["passed"]
    return SuiteResult("lemma6", bool(ok), report, files)


def suite_tp_audit(cfg: RunConfig, out: ReportWriter) -> SuiteResult:
    scalar = cfg.resolved_scalar
    p = cfg.params.exact() if scalar == RATIONAL else cfg.params.as_float()
    n = TP_WINDOW
    a = build_a(p, n, scalar=scalar).matrix
    b = build_b(p, n, scalar=scalar).matrix
    mats = {"A": a, "B": b, "AtB": a.T.dot(b),
            "ToeplitzHPlus": toeplitz_lower(h_coefficients(p, PLUS, n, scalar), n),
            "ToeplitzHMinus": toeplitz_lower(h_coefficients(p, MINUS, n, scalar), n)}
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-12
    audits = {k: audit_total_positivity(m, TP_MINOR_SIZE, TP_WINDOW, TP_SAMPLES, seed=cfg.seed, tol=tol, tag=k)
              for k, m in mats.items()}
    files = [out.matrix(f"tpAudit.{k}", m) for k, m in mats.items()]
    report = {"scalar": scalar, "audits": {k: v.to_dict() for k, v in audits.items()}}
    return SuiteResult("tpAudit", all(v.passed for v in audits.values()), report, files)


RUNNERS = {"theorem1": suite_theorem1, "theorem3": suite_theorem3, "theorem4": suite_theorem4,
           "lemma6": suite_lemma6, "tpAudit": suite_tp_audit}


def _run_one(cfg: RunConfig, suite: str, out: ReportWriter) -> SuiteResult:
    t0 = time.perf_counter()
    res = RUNNERS[suite](cfg, out)
    report = {"schemaVersion": SCHEMA_VERSION, "suite": suite, "inputs": cfg.to_dict(),
              "backend": _accel.backend(), "verdict": "pass" if res.passed else "fail",
              "results": res.report, "files": sorted(res.files),
              "wallClockSeconds": round(time.perf_counter() - t0, 6)}
    res.report = report
    res.files.append(out.json(f"{suite}.report.json", report))
    return res


def run_suite(cfg: RunConfig, suite: str = ALL, out_dir=None, parallel: bool = False) -> tuple[int, list]:
    """Run one suite or all of them; returns ``(exit_status, results)``.

    The exit status is 0 iff every verdict passes and 1 otherwise.
    """
    names = list(SUITES) if suite == ALL else [suite]
    unknown = [s for s in names if s not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES + (ALL,))}")
    out = ReportWriter(out_dir if out_dir is not None else cfg.out_dir)
    if parallel and len(names) > 1:
        with ThreadPoolExecutor(max_workers=len(names)) as pool:
            results = list(pool.map(lambda s: _run_one(cfg, s, out), names))
    else:
        results = [_run_one(cfg, s, out) for s in names]
    return (0 if all(r.passed for r in results) else 1), results


def strip_timing(report: dict) -> dict:
    """Copy of a report without wall-clock fields, for golden comparisons."""
    return {k: v for k, v in report.items() if k != "wallClockSeconds"}
