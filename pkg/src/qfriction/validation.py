"""Cross-check suite behind ``qfriction validate``.

Each check compares a computed number with an independent expectation and a
stated tolerance.  Checks never adjust their own tolerances: a check that
fails for physical reasons is reported as failing.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .friction import (
    B_TILDE_0,
    Intrinsic,
    b_const,
    c_const,
    d_n_local,
    d_n_nonlocal_asymp,
    d_values,
    force_lowv,
    force_ratio_asymp,
    orientation_avg_pair,
)
from .oracle import force_lte_smallv_oracle
from .quadrature import QuadratureConfig
from .response import (
    SCIB,
    DrudeLocal,
    NonlocalAsymptotic,
    ValidityWarning,
    epsilon_l,
    epsilon_tf,
    impedance_ratio,
    q_function,
    r_prime_I,
    reflection_imag,
    rho_p,
)
from .units import MetalParams, default_atom, derived_scales

__all__ = ["Check", "run_checks", "CHECKS", "format_report", "TOLERANCE_SUFFICIENT"]

# tightest acceptance tolerance is 1e-6; integrals must sit two orders below
TOLERANCE_SUFFICIENT = 1e-8


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: str
    tolerance: str
    passed: bool
    seconds: float = 0.0


def _rel(a, b):
    return abs(a / b - 1.0)


def _local_ratio(metal, cfg):
    z = 10e-9
    a0 = 1.0
    closed = 3 * orientation_avg_pair(1, 1, a0) * d_n_local(1, z, metal) ** 2 / (
        orientation_avg_pair(0, 2, a0) * d_n_local(0, z, metal) * d_n_local(2, z, metal))
    fb = force_lowv(z, 1.0, default_atom(), DrudeLocal(metal), cfg=cfg, include_shift=False)
    return Check("local J/LTE ratio = 29/35", fb.ratio_j_lte, "29/35",
                 "1e-12 closed form, 1e-6 quadrature",
                 abs(closed - 29 / 35) <= 1e-12 and abs(fb.ratio_j_lte - 29 / 35) <= 1e-6)


def _local_coefficient(metal, cfg):
    fb = force_lowv(10e-9, 1.0, default_atom(), DrudeLocal(metal), cfg=cfg, include_shift=False)
    err = _rel(fb.f_lte, fb.f_lte_local_ref)
    return Check("local LTE force coefficient 189/(2 pi^3)", err, "0 (relative deviation)", "1e-9", err <= 1e-9)


def _drude_exact(metal, cfg):
    worst = max(_rel(d_values(z, DrudeLocal(metal), cfg).d[n], d_n_local(n, z, metal))
                for z in (1e-9, 1e-8, 1e-7) for n in range(3))
    return Check("Drude D_n quadrature vs closed form", worst, "0 (relative deviation)", "1e-8", worst <= 1e-8)


def _constants(metal, cfg):
    got = [b_const(0), b_const(1), b_const(2), c_const(0), c_const(1), c_const(2), B_TILDE_0]
    quoted = [0.69, 0.44, 0.32, 0.98, 0.59, 0.42, 2.52]
    worst = max(abs(round(g, 2) - q) for g, q in zip(got, quoted))
    return Check("asymptotic constants B_n, C_n, B~_0", worst, "quoted two-decimal values", "exact at 2 decimals",
                 worst < 1e-9)


def _q_grid(metal, cfg):
    worst = 0.0
    for a in np.geomspace(1e-3, 1e3, 13):
        for b in (0.0, 0.1, 1.0):
            worst = max(worst, _rel(q_function(a, b), q_function(a, b, method="quadrature", cfg=cfg)))
    return Check("Q closed form vs quadrature", worst, "0 (relative deviation)", "1e-9", worst <= 1e-9)


def _q_limit(metal, cfg):
    err = abs(q_function(100.0, 0.0) - 2 / (3 * math.sqrt(3)))
    return Check("Q(100, 0) -> 2/(3 sqrt 3)", err, "0 (absolute deviation)", "1e-4", err <= 1e-4)


def _forms(metal, cfg):
    rng = np.random.default_rng(7)
    w = 10 ** rng.uniform(10, 16, 1000) * rng.choice([-1, 1], 1000)
    k = 10 ** rng.uniform(5, 11, 1000)
    a = epsilon_l(w, k, metal)
    b = epsilon_l(w, k, metal, form="factorized")
    # measured on the size of the terms the factorized form cancels
    scale = np.maximum(np.abs(a), 1.0 + 1.0 / (k * derived_scales(metal).lambda_tf) ** 2)
    worst = float(np.max(np.abs(a - b) / scale))
    static = float(np.max(np.abs(epsilon_l(0.0, k, metal) - epsilon_tf(k, metal)) / epsilon_tf(k, metal)))
    return Check("Lindhard vs factorized epsilon_l; static limit", max(worst, static), "0", "1e-12",
                 max(worst, static) <= 1e-12)


def _passivity(metal, cfg):
    rng = np.random.default_rng(11)
    w = 10 ** rng.uniform(9, 16, 1000)
    k = 10 ** rng.uniform(5, 11, 1000)
    eps = epsilon_l(w, k, metal)
    conj = float(np.max(np.abs(epsilon_l(-w, k, metal) - np.conj(eps)) / np.abs(eps)))
    min_im = float(np.min(eps.imag))
    return Check("passivity Im eps_l >= 0 and eps(-w) = eps(w)*", min_im, ">= 0; symmetry 1e-12",
                 "sign; 1e-12", min_im >= 0 and conj <= 1e-12)


def _slope_routes(metal, cfg):
    lam = metal.lambda_tf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        worst = max(_rel(r_prime_I(p, SCIB(metal), cfg), r_prime_I(p, SCIB(metal), cfg, method="richardson"))
                    for p in (1e-3 / metal.ell, 1 / metal.ell, 0.2 / lam, 1 / lam))
    return Check("r_I' analytic vs Richardson", worst, "0 (relative deviation)", "1e-6", worst <= 1e-6)


def _eq14(metal, cfg):
    p = 1.0 / metal.lambda_tf
    w = 1e-4 * metal.omega_p
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        a = impedance_ratio(w, p, SCIB(metal), cfg)
        b = impedance_ratio(w, p, NonlocalAsymptotic(metal), cfg)
    err = max(abs(a.real / b.real - 1), abs(a.imag / b.imag - 1))
    return Check("SCIB impedance vs asymptotic form at p = 1/lambda_TF", err, "0 (relative deviation)", "5e-2",
                 err <= 5e-2)


def _resistivity(metal, cfg):
    lam = metal.lambda_tf
    p = np.geomspace(1e-2 / lam, 10 / lam, 601)
    rho = rho_p(p, metal)
    i = int(np.argmax(rho))
    ratio = rho[i] / metal.rho_local
    ok = 1 / (10 * lam) <= p[i] <= 1 / (2 * lam) and ratio > 10
    return Check("resistivity peak in [1/(10 l_TF), 1/(2 l_TF)], > 10 rho_local", ratio, "> 10 at p lambda_TF "
                 f"= {p[i] * lam:.3f}", "window", ok)


def _scan(metal, cfg, n=60):
    atom = default_atom()
    zs = np.geomspace(3 * metal.lambda_tf, 30 * metal.ell, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return zs, [force_lowv(z, 1.0, atom, SCIB(metal), cfg=cfg, include_shift=False) for z in zs]


def _peak_and_plateau(metal, cfg):
    zs, rows = _scan(metal, cfg)
    ratio = np.array([r.ratio_total for r in rows])
    i = int(np.argmax(ratio))
    x = zs[i] / metal.lambda_tf
    peak = Check("SCIB peak location and height", ratio[i], f"z in [5, 20] lambda_TF (at {x:.1f}), "
                 "height in [10^2.5, 10^3.5]", "window", 5 <= x <= 20 and 10**2.5 <= ratio[i] <= 10**3.5)
    mask = (zs >= 5 * metal.lambda_tf) & (zs <= 20 * metal.lambda_tf)
    jl = np.array([r.ratio_j_lte for r in rows])[mask]
    frac = Check("SCIB J/LTE in the peak region", float(jl.min()), "[0.90, 1.00]", "window",
                 bool(np.all((jl >= 0.9) & (jl <= 1.0))))
    far = zs >= 10 * metal.ell
    dev = float(np.max(np.abs(ratio[far] / (64 / 35) - 1)))
    plateau = Check("SCIB plateau 64/35 for z >= 10 ell", dev, "0 (relative deviation)", "2e-2", dev <= 2e-2)
    return [peak, frac, plateau]


def _asymptotes(metal, cfg):
    atom = default_atom()
    zs = np.geomspace(30 * metal.lambda_tf, metal.ell / 2, 12)
    intr = Intrinsic(1e-3 * metal.gamma)
    worst_r = worst_i = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        for z in zs:
            num = force_lowv(z, 1.0, atom, SCIB(metal), cfg=cfg, include_shift=False).ratio_total
            worst_r = max(worst_r, _rel(sum(force_ratio_asymp(z, metal)), num))
            num_i = force_lowv(z, 1.0, atom, SCIB(metal), damping=intr, cfg=cfg).ratio_total
            worst_i = max(worst_i, _rel(force_ratio_asymp(z, metal, intr)[0], num_i))
        grid = np.geomspace(5 * metal.lambda_tf, 50 * metal.lambda_tf, 31)
        vals = [force_lowv(z, 1.0, atom, SCIB(metal), damping=intr, cfg=cfg).ratio_total for z in grid]
    x = grid[int(np.argmax(vals))] / metal.lambda_tf
    return [
        Check("radiative asymptote vs quadrature on [30 lambda_TF, ell/2]", worst_r, "0 (relative deviation)",
              "0.2", worst_r <= 0.2),
        Check("intrinsic asymptote vs quadrature on [30 lambda_TF, ell/2]", worst_i, "0 (relative deviation)",
              "0.2", worst_i <= 0.2),
        Check("intrinsic enhancement maximum near 15 lambda_TF", x, "15 lambda_TF", "factor 2 window",
              7.5 <= x <= 30),
    ]


def _oracle(metal, cfg):
    z = 10 * metal.lambda_tf
    atom = default_atom()
    v1, v2 = 1e-4 * metal.v_F, 1e-3 * metal.v_F
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        f1 = force_lte_smallv_oracle(z, v1, atom, SCIB(metal), cfg, check=False).value
        f2 = force_lte_smallv_oracle(z, v2, atom, SCIB(metal), cfg, check=False).value
        ref = force_lowv(z, v1, atom, SCIB(metal), cfg=cfg).f_lte
    slope = math.log(f2 / f1) / math.log(v2 / v1)
    dev = _rel(f1, ref)
    return [Check("oracle velocity exponent", slope, "3", "0.05", abs(slope - 3) <= 0.05),
            Check("oracle vs factorised LTE at v = 1e-4 v_F", dev, "0 (relative deviation)", "5e-2", dev <= 5e-2)]


def _properties(metal, cfg):
    rng = np.random.default_rng(3)
    lam = metal.lambda_tf
    ws = 10 ** rng.uniform(9, 15, 1000)
    ps = 10 ** rng.uniform(-2.5, 0.5, 1000) / lam
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        ri = [reflection_imag(w, p, SCIB(metal), cfg) for w, p in zip(ws, ps)]
        clean = metal.with_gamma(0.0)
        r0 = [reflection_imag(w, p, SCIB(clean), cfg) for w, p in zip(ws[:200], ps[:200])]
    pos = min(ri)
    landau = min(r0)
    return [Check("passivity r_I >= 0 (1000 random points)", pos, ">= 0", "sign", pos >= 0),
            Check("Landau damping r_I > 0 at Gamma = 0", landau, "> 0", "sign", landau > 0)]


def _honesty(metal, cfg):
    """Integrals at ``cfg`` agree with a much tighter reference, and ``cfg`` is tight enough."""
    z = 10 * metal.lambda_tf
    ref_cfg = QuadratureConfig(rel_tol=1e-12, max_subdivisions=8000)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        got = d_values(z, SCIB(metal), cfg).d
        ref = d_values(z, SCIB(metal), ref_cfg).d
    dev = max(_rel(g, r) for g, r in zip(got, ref))
    ok = dev <= max(cfg.rel_tol, 1e-12) * 10 and cfg.rel_tol <= TOLERANCE_SUFFICIENT
    return Check("tolerance honesty and sufficiency", dev,
                 f"deviation <= 10 rel_tol ({cfg.rel_tol:g}); rel_tol <= {TOLERANCE_SUFFICIENT:g}", "see expected", ok)


CHECKS: List[Callable] = [
    _local_ratio, _local_coefficient, _drude_exact, _constants, _q_grid, _q_limit, _forms, _passivity,
    _slope_routes, _eq14, _resistivity, _honesty, _peak_and_plateau, _asymptotes, _properties, _oracle,
]


def run_checks(metal: MetalParams, cfg: QuadratureConfig, checks=None) -> List[Check]:
    results = []
    for fn in checks or CHECKS:
        start = time.perf_counter()
        out = fn(metal, cfg)
        elapsed = time.perf_counter() - start
        for c in out if isinstance(out, list) else [out]:
            results.append(Check(c.name, float(c.measured), c.expected, c.tolerance, bool(c.passed), elapsed))
    return results


def format_report(results: List[Check]) -> str:
    lines = []
    for c in results:
        tag = "PASS" if c.passed else "FAIL"
        lines.append(f"{tag}  {c.name}: measured {c.measured:.6g}, expected {c.expected}, tol {c.tolerance}")
    n_fail = sum(not c.passed for c in results)
    lines.append(f"{len(results) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines)
