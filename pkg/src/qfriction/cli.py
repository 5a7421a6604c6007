"""Command-line interface: ``qfriction {scales,scan,validate,reflect,dn}``.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from .config import ConfigError, RunConfig, apply_override, build_config, load_config
from .friction import d_values, force_lowv, force_ratio_asymp
from .response import SCIB, NonlocalAsymptotic, QuadratureError, ValidityWarning, impedance_ratio, reflection
from .units import angular_to_ev, default_atom, derived_scales
from .validation import format_report, run_checks

__all__ = ["main", "SCAN_COLUMNS", "scan_rows", "EXIT_OK", "EXIT_VALIDATION", "EXIT_CONFIG", "EXIT_NONCONVERGED"]

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2, 3

SCAN_COLUMNS = ["z_m", "z_over_lambda_tf", "z_over_ell", "F_lte", "F_j", "F_total", "F_local_ref",
                "ratio_total", "ratio_j_lte", "asymp_ratio_lte", "asymp_ratio_j", "converged"]

log = logging.getLogger("qfriction")


def _scan_point(args):
    z, cfg = args
    spec, metal = cfg.scan, cfg.metal
    sc = derived_scales(metal)
    atom = spec.atom or default_atom()
    v_x = spec.v_x or 1.0
    row = dict.fromkeys(SCAN_COLUMNS)
    row.update(z_m=z, z_over_lambda_tf=z / sc.lambda_tf, z_over_ell=z / sc.ell)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        try:
            fb = force_lowv(z, v_x, atom, spec.model, damping=spec.damping, cfg=cfg.quadrature,
                            include_shift=spec.include_shift)
        except QuadratureError as exc:
            log.warning("z = %.6e m: %s", z, exc)
            row["converged"] = False
            return row
    scale = abs(fb.f_lte_local_ref) if spec.normalize and fb.f_lte_local_ref != 0 else 1.0
    row.update(F_lte=fb.f_lte / scale, F_j=None if fb.f_j is None else fb.f_j / scale,
               F_total=fb.f_total / scale, F_local_ref=fb.f_lte_local_ref / scale,
               ratio_total=fb.ratio_total, ratio_j_lte=fb.ratio_j_lte, converged=fb.d.converged)
    # the closed forms describe the nonlocal window lambda_TF < z <= ell only
    if isinstance(spec.model, (SCIB, NonlocalAsymptotic)) and sc.lambda_tf < z <= sc.ell and metal.gamma > 0:
        lte, j = force_ratio_asymp(z, metal, spec.damping)
        row.update(asymp_ratio_lte=lte, asymp_ratio_j=j)
    return row


def scan_rows(cfg: RunConfig) -> List[dict]:
    """Evaluate the configured z grid; rows come back in grid order."""
    spec = cfg.scan
    zs = np.geomspace(spec.z_min, spec.z_max, spec.points)
    jobs = [(float(z), cfg) for z in zs]
    if spec.workers == 1:
        return [_scan_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        return list(pool.map(_scan_point, jobs))


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return format(float(value), ".17e")


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return None
    return float(value)


def render(rows: List[dict], fmt: str, columns: Sequence[str]) -> str:
    if fmt == "json":
        records = [{c: _json_value(r[c]) for c in columns} for r in rows]
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_scales(cfg: RunConfig) -> int:
    m = cfg.metal
    sc = derived_scales(m)
    ell = "inf" if math.isinf(sc.ell) else f"{sc.ell * 1e9:.4f} nm"
    print(f"omega_p   = {angular_to_ev(m.omega_p):.6g} eV ({m.omega_p:.6e} rad/s)")
    print(f"Gamma     = {angular_to_ev(m.gamma):.6g} eV ({m.gamma:.6e} rad/s)")
    print(f"v_F       = {m.v_F:.6e} m/s")
    print(f"ell = {ell}")
    print(f"lambda_TF = {sc.lambda_tf * 1e10:.5f} angstrom")
    print(f"k_F       = {m.k_fermi:.6e} 1/m (k_F lambda_TF = {m.k_fermi * sc.lambda_tf:.4g})")
    print(f"rho_local = {m.rho_local:.6e} ohm m")
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    rows = scan_rows(cfg)
    _emit(render(rows, cfg.output_format, SCAN_COLUMNS), cfg.output_path)
    bad = sum(not r["converged"] for r in rows)
    if bad:
        log.error("%d of %d scan points did not converge", bad, len(rows))
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    results = run_checks(cfg.metal, cfg.quadrature)
    print(format_report(results))
    return EXIT_OK if all(c.passed for c in results) else EXIT_VALIDATION


def cmd_reflect(cfg: RunConfig) -> int:
    pr = cfg.probe
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        z = impedance_ratio(pr.omega, pr.p, pr.model, cfg.quadrature)
        r = reflection(pr.omega, pr.p, pr.model, cfg.quadrature)
    cols = ["omega_rad_s", "p_inv_m", "Z_re", "Z_im", "r_re", "r_im"]
    row = dict(zip(cols, [pr.omega, pr.p, z.real, z.imag, r.real, r.imag]))
    _emit(render([row], cfg.output_format, cols), cfg.output_path)
    return EXIT_OK


def cmd_dn(cfg: RunConfig) -> int:
    pr = cfg.probe
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        dv = d_values(pr.z, pr.model, cfg.quadrature)
    cols = ["z_m", "D0", "D1", "D2", "converged"]
    row = dict(zip(cols, [pr.z, *dv.d, dv.converged]))
    _emit(render([row], cfg.output_format, cols), cfg.output_path)
    return EXIT_OK


SECTIONS = {"scales": (), "scan": ("scan",), "validate": (), "reflect": ("probe",), "dn": ("probe",)}

COMMANDS = {"scales": cmd_scales, "scan": cmd_scan, "validate": cmd_validate, "reflect": cmd_reflect,
            "dn": cmd_dn}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfriction", description="Low-velocity quantum friction above a "
                                     "nonlocal metal surface.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file (merged over the defaults)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field by dotted path, e.g. scan.points=20")
    parser.add_argument("--output", help="output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], help="output format")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = load_config(args.config)
        for item in args.overrides:
            apply_override(doc, item)
        if args.output is not None:
            doc["output"]["path"] = args.output
        if args.format is not None:
            doc["output"]["format"] = args.format
        cfg = build_config(doc, SECTIONS[args.command])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg)
    except QuadratureError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
