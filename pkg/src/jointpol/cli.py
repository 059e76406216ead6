"""Command-line front end.

Exit codes: 0 success, 1 domain validation failure, 2 I/O or format
failure, 3 witness failure (C^2 unrecoverable).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DEFAULT_REPLICATES, METHODS, analyze
from .core import CONVENTIONS, DEFAULT_CONVENTION
from .design import solve_waveplate_angles, theoretical_visibilities
from .errors import DesignError, FormatError, JointPolError
from .io import (
    bundled_path,
    dump_json,
    file_sha256,
    format_counts_csv,
    read_correlations,
    read_counts_csv,
    read_design,
)
from .simulator import (
    DEFAULT_DURATION,
    TABLE3_MAX_COUNT,
    AcquisitionConfig,
    calibrated_pair_rate,
    joint_probabilities,
    sample_counts,
)
from .states import NoiseModel, fit_noise, noisy_singlet, product_bounds, singlet, witness

log = logging.getLogger("jointpol")


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _fmt(v, se=None, digits=4):
    if v is None:
        return "n/a"
    return f"{v:.{digits}f}" if se is None else f"{v:.{digits}f} +/- {se:.{digits}f}"


def cmd_design_validate(args) -> int:
    design, info = read_design(args.file, args.convention)
    checks = design.check(info["tol"])
    ok = all(passed for passed, _ in checks.values())
    report = {
        "file": str(args.file),
        "source": info["source"],
        "convention": info["convention"],
        "valid": ok,
        "checks": {name: {"pass": passed, "vector": vec} for name, (passed, vec) in checks.items()},
        "directions": [{"label": lab, "theta_B": d.theta_B, "phi_B": d.phi_B}
                       for lab, d in zip("abcd", design.directions)],
    }
    if ok:
        try:
            tv = theoretical_visibilities(design, info["tol"])
            report["visibilities"] = {"v_x": tv.v_x, "v_y": tv.v_y, "c_magnitude": tv.c_magnitude}
        except DesignError as exc:
            report["visibilities"] = None
            report["visibility_note"] = str(exc)
        report["waveplates"] = [
            {"label": lab, "theta_H": s.theta_H, "theta_Q": s.theta_Q}
            for lab, s in zip("abcd", (solve_waveplate_angles(d, info["convention"]) for d in design.directions))
        ]

    if args.json:
        _emit(dump_json(report), None)
    else:
        lines = [f"design {args.file} ({info['source']}, convention {info['convention']}): "
                 f"{'VALID' if ok else 'INVALID'}"]
        for name, (passed, vec) in checks.items():
            lines.append(f"  {'ok  ' if passed else 'FAIL'} {name:<26} "
                         f"({vec[0]:+.6f}, {vec[1]:+.6f}, {vec[2]:+.6f})")
        vis = report.get("visibilities")
        if vis:
            lines.append(f"  visibilities: V_x={vis['v_x']:.4f} V_y={vis['v_y']:.4f} |C|={vis['c_magnitude']:.4f}")
        for wp in report.get("waveplates", []):
            lines.append(f"  {wp['label']}: theta_H={wp['theta_H']:8.3f}  theta_Q={wp['theta_Q']:8.3f}")
        _emit("\n".join(lines), None)
    return 0 if ok else 1


def _build_state(args):
    if args.state == "singlet":
        return singlet(), "singlet"
    if args.state == "white":
        return noisy_singlet(NoiseModel(0.0, 1.0)), "white noise (eta=0)"
    if args.state == "noisy":
        model = NoiseModel(args.eta, args.dephasing)
    else:
        model = fit_noise(read_correlations(args.correlations or bundled_path("correlations"))).model
    return noisy_singlet(model), f"noisy singlet eta={model.eta:.6g} d={model.d:.6g}"


def cmd_simulate(args) -> int:
    design_path = args.design or bundled_path("design")
    design, info = read_design(design_path, args.convention)
    design.validate(info["tol"])
    rho, label = _build_state(args)
    probs = joint_probabilities(rho, design)
    rate = args.rate if args.rate is not None else calibrated_pair_rate(probs, TABLE3_MAX_COUNT, args.duration)
    config = AcquisitionConfig(rate, args.duration, args.seed)
    table = sample_counts(probs, config, workers=args.workers)
    table.metadata.update({
        "state": label,
        "design_sha256": file_sha256(design_path),
        "provenance": f"jointpol {__version__} simulate",
    })
    _emit(format_counts_csv(table), args.output)
    return 0


def _provenance(args, paths: dict) -> dict:
    return {
        "version": __version__,
        "inputs": {k: {"path": str(p), "sha256": file_sha256(p)} for k, p in paths.items()},
        "method": args.method,
        "replicates": args.replicates if args.method == "bootstrap" else None,
        "seed": args.seed,
        "product_only": args.product_only,
    }


def _report_text(result) -> str:
    e, c, r = result.averages, result.correlations, result.report
    lines = [
        f"total counts: {e.total_counts}   error propagation: {e.method}",
        "error-pattern averages:",
        *(f"  E{ij} = {_fmt(getattr(e, 'e' + ij), getattr(e, 'se' + ij), 5)}" for ij in ("00", "01", "10", "11")),
        "experimental correlations:",
        f"  <x1x2>_exp       = {_fmt(c.c_xx_exp, c.se_xx)}",
        f"  <y1y2>_exp       = {_fmt(c.c_yy_exp, c.se_yy)}",
        f"  <x1y1x2y2>_exp   = {_fmt(c.c_prod_exp, c.se_prod)}",
        f"witness -<x1x2>_0 - <y1y2>_0 = {_fmt(r.witness_value, r.witness_se)}  "
        f"(product correlation in [{r.product_lower_bound:.4f}, 1])",
    ]
    prod = " (products V1 V2, no identical-measurement assumption)" if r.product_only else ""
    lines += [
        f"visibilities{prod}:",
        f"  Vx^2 = {_fmt(r.vx2, r.se_vx2)}",
        f"  Vy^2 = {_fmt(r.vy2, r.se_vy2)}",
        f"  C^2 in [{_fmt(r.c2_interval[0], r.se_c2_interval[0])}, {_fmt(r.c2_interval[1], r.se_c2_interval[1])}]",
    ]
    if not r.product_only:
        lines.append(f"  Vx = {_fmt(r.vx)}   Vy = {_fmt(r.vy)}")
    if r.imag_c_interval is not None:
        lines.append(f"  C imaginary: |iC| in [{_fmt(r.imag_c_interval[0], r.se_imag_c_interval[0])}, "
                     f"{_fmt(r.imag_c_interval[1], r.se_imag_c_interval[1])}]")
    lines.append(f"  C^2 < 0: {'yes' if r.c2_negative else 'no'}")
    if r.fragile:
        lines.append("  WARNING: witness within one standard error of 1; C^2 interval is fragile")
    return "\n".join(lines)


def _figures(args, counts, report, prefix=""):
    if not args.figures:
        return []
    from .plotting import write_figures

    paths = write_figures(counts, report, args.figures, prefix)
    for p in paths:
        log.info("wrote %s", p)
    return [str(p) for p in paths]


def cmd_analyze(args) -> int:
    table = read_counts_csv(args.counts)
    corrs = read_correlations(args.correlations)
    result = analyze(table, corrs, args.method, args.replicates, args.seed, args.product_only)
    figs = _figures(args, table.counts, result.report)
    payload = result.to_dict()
    payload["provenance"] = _provenance(args, {"counts": args.counts, "correlations": args.correlations})
    payload["figures"] = figs
    if args.output:
        _emit(dump_json(payload), args.output)
    _emit(dump_json(payload) if args.json else _report_text(result), None)
    return 0


def cmd_fit_state(args) -> int:
    corrs = read_correlations(args.correlations)
    fit = fit_noise(corrs)
    w = witness(corrs)
    payload = {
        "eta": fit.model.eta, "d": fit.model.d,
        "predicted": fit.model.predicted(),
        "residual_c_zz": fit.residual_c_zz,
        "witness": {"value": w.value, "se": w.se, "entangled": w.entangled},
        "product_bounds": None,
    }
    if w.entangled:
        b = product_bounds(corrs)
        payload["product_bounds"] = {"lower": b.lower, "upper": b.upper}
    if args.json:
        _emit(dump_json(payload), None)
    else:
        lines = [f"eta = {fit.model.eta:.6f}   d = {fit.model.d:.6f}",
                 f"predicted <ZZ> = {fit.predicted_c_zz:.6f}"
                 + ("" if fit.residual_c_zz is None else f"   residual = {fit.residual_c_zz:+.6f}"),
                 f"witness = {w.value:.6f} ({'entangled' if w.entangled else 'not certified'})"]
        if payload["product_bounds"]:
            lines.append(f"product correlation bounds: [{payload['product_bounds']['lower']:.6f}, 1]")
        _emit("\n".join(lines), None)
    return 0


def cmd_reproduce_paper(args) -> int:
    from .reproduce import compare, format_table

    counts_path = args.counts or bundled_path("counts")
    corr_path = args.correlations or bundled_path("correlations")
    table = read_counts_csv(counts_path)
    corrs = read_correlations(corr_path)
    result, rows = compare(table, corrs, args.method, args.replicates, args.seed, args.product_only)
    ok = all(r.passed for r in rows) and result.report.c2_negative
    figs = _figures(args, table.counts, result.report, prefix="bundled_")
    if args.json:
        payload = {
            "rows": [r.to_dict() for r in rows],
            "c2_negative": result.report.c2_negative,
            "all_pass": ok,
            "analysis": result.to_dict(),
            "provenance": _provenance(args, {"counts": counts_path, "correlations": corr_path}),
            "figures": figs,
        }
        _emit(dump_json(payload), None)
    else:
        text = format_table(rows)
        text += f"\nC^2 upper endpoint < 0: {'PASS' if result.report.c2_negative else 'FAIL'}"
        if args.product_only:
            r = result.report
            text += f"\nproducts: Vx1Vx2 = {r.vx2:.4f}, Vy1Vy2 = {r.vy2:.4f}, C1C2 in [{r.c2_interval[0]:.4f}, {r.c2_interval[1]:.4f}]"
        text += f"\noverall: {'ALL PASS' if ok else 'FAILURES'}"
        _emit(text, None)
    return 0 if ok else 1


def _add_analysis_flags(p):
    p.add_argument("--method", choices=METHODS, default="delta", help="error propagation (default: delta)")
    p.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed (default: 0)")
    p.add_argument("--product-only", action="store_true",
                   help="report V1*V2 products without assuming identical measurements")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--figures", metavar="DIR", help="also write PNG figures to DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jointpol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="joint-measurement design tools")
    dsub = design.add_subparsers(dest="design_command", required=True)
    val = dsub.add_parser("validate", help="check a design file")
    val.add_argument("file")
    val.add_argument("--convention", choices=sorted(CONVENTIONS), default=None,
                     help=f"wave-plate sign branch (default: file's, else {DEFAULT_CONVENTION})")
    val.add_argument("--json", action="store_true")
    val.set_defaults(func=cmd_design_validate)

    sim = sub.add_parser("simulate", help="sample a 16-setting coincidence table")
    sim.add_argument("--design", help="design file (default: bundled experimental design)")
    sim.add_argument("--state", choices=("singlet", "noisy", "fitted", "white"), default="singlet")
    sim.add_argument("--eta", type=float, default=1.0, help="noise model weight (state=noisy)")
    sim.add_argument("--dephasing", type=float, default=1.0, help="HV dephasing factor d (state=noisy)")
    sim.add_argument("--correlations", help="correlations file to fit (state=fitted; default bundled)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--rate", type=float, default=None,
                     help=f"pair rate per second (default: largest cell mean = {TABLE3_MAX_COUNT})")
    sim.add_argument("--duration", type=float, default=DEFAULT_DURATION, help="seconds per setting")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--convention", choices=sorted(CONVENTIONS), default=None)
    sim.add_argument("-o", "--output", help="write CSV here instead of stdout")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="recover visibilities from a count table")
    ana.add_argument("counts")
    ana.add_argument("correlations")
    ana.add_argument("-o", "--output", help="also write the JSON report here")
    _add_analysis_flags(ana)
    ana.set_defaults(func=cmd_analyze)

    fit = sub.add_parser("fit-state", help="fit the dephased-singlet noise model")
    fit.add_argument("correlations")
    fit.add_argument("--json", action="store_true")
    fit.set_defaults(func=cmd_fit_state)

    rep = sub.add_parser("reproduce-paper", help="analyze the bundled data against published values")
    rep.add_argument("--counts", help=argparse.SUPPRESS)
    rep.add_argument("--correlations", help=argparse.SUPPRESS)
    _add_analysis_flags(rep)
    rep.set_defaults(func=cmd_reproduce_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except JointPolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FormatError.exit_code


if __name__ == "__main__":
    sys.exit(main())
