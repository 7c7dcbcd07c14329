"""Command line front end.

Exit status: 0 all verdicts pass, 1 a verdict failed, 2 configuration error,
3 resource limit exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import load_config, preset, preset_catalog
from .errors import ConfigError, DomainError, ResourceLimitError
from .kernel import kernel_direct
from .linalg import FLOAT, RATIONAL
from .operators import build_a, build_b, build_l, build_t, product_atb, project_tail
from .series import MINUS, PLUS, e_coefficients, h_coefficients, ratio_window
from .spectral import spectrum_verdict
from .suites import ALL, SUITES, ReportWriter, dumps_report, run_suite

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
OPERATORS = ("T", "K11", "K22", "AtB")


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="TOML run configuration")
    src.add_argument("--preset", help="named preset (see `presets`)")
    p.add_argument("--order", type=int, help="matrix truncation order N")
    p.add_argument("--scalar", choices=(FLOAT, RATIONAL), help="scalar mode")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="seed for sampled audits and random instances")
    p.add_argument("--tolerance", type=float, help="override the suite tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpspectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a verification suite and write reports")
    p.add_argument("suite", choices=SUITES + (ALL,))
    _common(p)
    p.add_argument("--parallel", action="store_true", help="run independent suites concurrently")

    sub.add_parser("presets", help="list the preset catalog")

    p = sub.add_parser("coeffs", help="dump h, e and ratio coefficients")
    _common(p)

    p = sub.add_parser("kernel", help="dump the K blocks at truncation N")
    _common(p)

    p = sub.add_parser("spectrum", help="spectrum report of a truncated operator")
    _common(p)
    p.add_argument("--operator", choices=OPERATORS, default="T")
    p.add_argument("--tail-start", type=int, default=0)
    return parser


def resolve_config(args):
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = preset(args.preset or "trivial")
    changes = {}
    if args.order is not None:
        changes["matrix_order"] = args.order
        changes["tail_starts"] = tuple(n for n in cfg.tail_starts if n < args.order)
    for attr in ("scalar", "seed", "tolerance"):
        if getattr(args, attr) is not None:
            changes[attr] = getattr(args, attr)
    if args.out is not None:
        changes["out_dir"] = str(args.out)
    return cfg.replace(**changes) if changes else cfg


def _print(obj) -> None:
    sys.stdout.write(dumps_report(obj))


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    status, results = run_suite(cfg, args.suite, parallel=args.parallel)
    for r in results:
        print(f"{r.suite}: {'pass' if r.passed else 'FAIL'}")
    print(f"reports written to {cfg.out_dir}")
    return status


def cmd_presets(args) -> int:
    _print({name: cfg.to_dict() for name, cfg in preset_catalog().items()})
    return EXIT_OK


def _num(v, scalar):
    return str(v) if scalar == RATIONAL else float(v)


def cmd_coeffs(args) -> int:
    cfg = resolve_config(args)
    scalar = cfg.resolved_scalar
    p = cfg.params.exact() if scalar == RATIONAL else cfg.params.as_float()
    n = cfg.matrix_order
    out = {"inputs": cfg.to_dict(), "order": n}
    for side in (PLUS, MINUS):
        out[f"h_{side}"] = [_num(v, scalar) for v in h_coefficients(p, side, n, scalar).coeffs]
        out[f"e_{side}"] = [_num(v, scalar) for v in e_coefficients(p, side, n, scalar).coeffs]
    win = ratio_window(cfg.params.as_float(), -n, n)
    out["ratio"] = {"lo": win.lo, "hi": win.hi, "minusOverPlus": [float(x) for x in win.coeffs],
                    "plusOverMinus": [float(x) for x in win.dual_coeffs], "tailMass": win.tail_mass}
    _print(out)
    return EXIT_OK


def cmd_kernel(args) -> int:
    cfg = resolve_config(args)
    p = cfg.params.as_float()
    n = cfg.matrix_order
    k = kernel_direct(build_l(build_a(p, n), build_b(p, n)))
    summary = {"inputs": cfg.to_dict(), "order": n, "route": k.route, "residuals": k.residuals}
    if args.out is not None:
        w = ReportWriter(args.out)
        summary["files"] = [w.matrix(f"kernel.{name}.N{n}", m) for name, m in k.blocks().items()]
    else:
        summary["blocks"] = {name: m.tolist() for name, m in k.blocks().items()}
    _print(summary)
    return EXIT_OK


def _operator(cfg, name: str, n: int) -> np.ndarray:
    p = cfg.params.as_float()
    order = cfg.matrix_order
    if name == "T":
        return build_t(p, n, order).matrix
    a, b = build_a(p, order), build_b(p, order)
    if name == "AtB":
        return project_tail(product_atb(a, b), n)
    from .kernel import kernel_blocks
    kb = kernel_blocks(a, b)
    return project_tail(kb.k11 if name == "K11" else kb.k22, n)


def cmd_spectrum(args) -> int:
    cfg = resolve_config(args)
    n = args.tail_start
    if not 0 <= n < cfg.matrix_order:
        raise ConfigError(f"--tail-start must lie in [0, {cfg.matrix_order}), got {n}")
    m = _operator(cfg, args.operator, n)
    tag = f"{args.operator}^({n})"
    kw = {} if cfg.tolerance is None else {"imag_tol": cfg.tolerance, "edge_tol": cfg.tolerance}
    if args.operator == "AtB":
        kw["edge_tol"] = np.inf  # only nonnegativity is claimed
    rep = spectrum_verdict(m, tag, cfg.matrix_order, n, **kw)
    out = {"inputs": cfg.to_dict(), "spectrum": rep.to_dict()}
    if args.out is not None:
        w = ReportWriter(args.out)
        out["files"] = [w.eigenvalues(f"spectrum.{tag}", rep.eigenvalues), w.json("spectrum.report.json", out)]
    _print(out)
    return EXIT_OK if rep.passed else EXIT_VERDICT


COMMANDS = {"run": cmd_run, "presets": cmd_presets, "coeffs": cmd_coeffs, "kernel": cmd_kernel,
            "spectrum": cmd_spectrum}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
