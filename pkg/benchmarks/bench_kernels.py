"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs once per backend before timing so JIT compilation is not
counted.  Results of the two backends are compared as a sanity check.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from tpspectra import _accel
from tpspectra.operators import build_a
from tpspectra.series import SymbolParams, ratio_window


def _cases(rng: np.random.Generator):
    p = SymbolParams((0.3,), (0.2,), (0.25,), (0.15,))
    a = build_a(p, 40).matrix
    k = 4
    rows = np.sort(np.array([rng.choice(40, k, replace=False) for _ in range(20000)]), axis=1)
    cols = np.sort(np.array([rng.choice(40, k, replace=False) for _ in range(20000)]), axis=1)
    win = ratio_window(p, -200, 200)
    mats = rng.standard_normal((20000, 5, 5))
    big = rng.standard_normal((300, 300)) + 300 * np.eye(300)
    return {
        "minor_dets 20000 x 4x4": lambda: _accel.minor_dets(a, rows, cols),
        "tail_sum 64x64": lambda: _accel.tail_sum(win.coeffs, win.lo, win.dual_coeffs, win.lo, (64, 64),
                                                  0, 1, 1, 0, -1, -1, k0=1, tol=1e-17)[0],
        "batch_det 20000 x 5x5": lambda: _accel.batch_det(mats),
        "lu_factor 300x300": lambda: _accel.lu_factor(big)[0],
    }


def _time(fn, repeat: int) -> tuple[float, object]:
    out = fn()  # warm-up / JIT
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can run")
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':28s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, fn in cases.items():
        res = {}
        for be in ("numba", "numpy"):
            if be == "numba" and not _accel.HAVE_NUMBA:
                continue
            with _accel.use_backend(be):
                res[be] = _time(fn, args.repeat)
        t_np, v_np = res["numpy"]
        if "numba" in res:
            t_nb, v_nb = res["numba"]
            diff = float(np.max(np.abs(np.asarray(v_nb) - np.asarray(v_np))))
            print(f"{name:28s} {1e3 * t_nb:11.3f} {1e3 * t_np:11.3f} {t_np / t_nb:8.1f} {diff:11.2e}")
        else:
            print(f"{name:28s} {'-':>11s} {1e3 * t_np:11.3f} {'-':>8s} {'-':>11s}")


if __name__ == "__main__":
    main()
