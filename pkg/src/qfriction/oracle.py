"""Small-velocity oracle for the LTE friction force.

Evaluates the LTE force *before* the Green tensor is linearised in
frequency, with the atomic amplitude frozen at ``|A(0, 0)|^2``:

    F = -4 hbar |A|^2 int_0^inf dp_x/(2 pi) p_x int_0^{p_x v} dw/(2 pi)
            sum_ij W_ij T_i(p_x, w) U_j(p_x v - w)

where ``T_i`` is the p_y-integrated imaginary Green tensor and ``U_j`` the
full in-plane integral at Doppler-shifted frequency (the damping-rate
integrand).  ``W_ij`` is ``alpha_ii alpha_jj`` for a fixed dipole and the
fourth-moment average for random orientation.

All levels use fixed Gauss rules, vectorised over every (w, p) pair, and the
result is checked by repeating the computation with finer rules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .friction import _FOURTH_MOMENTS, delta_static
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .response import SCIB, DrudeLocal, ResponseModel, epsilon_l
from .units import EPS0, HBAR, AtomParams, MetalParams, derived_scales

__all__ = ["OracleOrders", "OracleResult", "r_imag_batch", "force_lte_smallv_oracle"]


@dataclass(frozen=True)
class OracleOrders:
    """Node counts of the fixed rules (q panels, p_x, w, s, p, phi)."""

    q_panels: int = 8
    p_x: int = 32
    omega: int = 8
    s: int = 40
    p: int = 32
    phi: int = 9

    def refined(self) -> "OracleOrders":
        return OracleOrders(*(int(math.ceil(1.5 * getattr(self, f))) for f in self.__dataclass_fields__))


@dataclass(frozen=True)
class OracleResult:
    value: float
    error_estimate: float
    converged: bool

    def __float__(self):
        return self.value


_GL16 = np.polynomial.legendre.leggauss(16)


def _q_rule(panels):
    """Composite 16-point Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = _GL16
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _scib_r_imag(omega, p, metal, panels, chunk=4096):
    """r_I for SCIB with q = p sinh(x), x in [0, asinh(q_max/p)].

    The Z integrand is vectorised over all pairs; the rule is fixed, so the
    caller checks convergence by refinement.
    """
    sc = derived_scales(metal)
    inv_len = max(1.0 / sc.lambda_tf, 0.0 if math.isinf(sc.ell) else 1.0 / sc.ell)
    xi, wi = _q_rule(panels)
    out = np.zeros(omega.shape)
    live = np.flatnonzero(omega != 0)
    for start in range(0, live.size, chunk):
        idx = live[start:start + chunk]
        w, pp = np.abs(omega[idx]), p[idx]
        x_max = np.arcsinh(300.0 * np.maximum(pp, inv_len) / pp)
        x = x_max[:, None] * xi[None, :]
        q = pp[:, None] * np.sinh(x)
        k2 = pp[:, None] ** 2 + q * q
        eps = epsilon_l(w[:, None], np.sqrt(k2), metal)
        dq = pp[:, None] * np.cosh(x) * x_max[:, None]
        # (2/pi) int p/k^2 dq = 1 exactly; integrate only the decaying remainder
        z = 1.0 + 2.0 / math.pi * np.sum(wi[None, :] * dq * pp[:, None] / k2 * (1.0 / eps - 1.0), axis=1)
        out[idx] = np.sign(omega[idx]) * (-2.0 * z.imag / np.abs(1.0 + z) ** 2)
    return out


def r_imag_batch(omega, p, model: ResponseModel, q_panels: int = 8):
    """Im r(w, p) for arrays of frequencies (any sign) and wavevectors."""
    omega, p = np.broadcast_arrays(np.asarray(omega, float), np.asarray(p, float))
    shape = omega.shape
    omega, p = omega.ravel(), p.ravel()
    metal = model.metal
    if isinstance(model, DrudeLocal):
        wp2 = metal.omega_p**2
        r = wp2 / (wp2 - 2.0 * omega**2 - 2j * omega * metal.gamma)
        return r.imag.reshape(shape)
    if isinstance(model, SCIB):
        return _scib_r_imag(omega, p, metal, q_panels).reshape(shape)
    raise ValueError("the oracle supports the SCIB and Drude models only")


def _laguerre(n, scale):
    x, w = np.polynomial.laguerre.laggauss(n)
    # integrate g(p) dp over [0, inf) as sum w e^x g(x scale) scale
    return x * scale, w * np.exp(x) * scale


def _weights(atom: AtomParams):
    if atom.averaged:
        return 9.0 * atom.alpha0**2 * _FOURTH_MOMENTS
    a = atom.alpha_diagonal()
    return np.outer(a, a)


def _evaluate(z_a, v_x, model, weights, orders: OracleOrders):
    kern = lambda pp: pp * pp * np.exp(-2.0 * z_a * pp) / (2.0 * EPS0)
    px, wpx = _laguerre(orders.p_x, 1.0 / (2.0 * z_a))
    eta, weta = np.polynomial.legendre.leggauss(orders.omega)
    eta, weta = 0.5 * (eta + 1.0), 0.5 * weta

    # T_i(p_x, w): p_y = p_x sinh(s), s in [0, s_max]
    s_nodes, s_w = np.polynomial.legendre.leggauss(orders.s)
    s_max = np.arccosh(1.0 + 40.0 / (2.0 * z_a * px))
    s = 0.5 * s_max[:, None] * (s_nodes[None, :] + 1.0)
    ws = 0.5 * s_max[:, None] * s_w[None, :]
    pt = px[:, None] * np.cosh(s)
    omega_t = px[:, None] * v_x * eta[None, :]
    r_t = r_imag_batch(omega_t[:, :, None], pt[:, None, :], model, orders.q_panels)
    sech2 = 1.0 / np.cosh(s) ** 2
    ang_t = np.stack([sech2, 1.0 - sech2, np.ones_like(s)], axis=-1)
    base_t = (ws * kern(pt))[:, None, :] * r_t
    T = 2.0 / (2.0 * math.pi) * np.einsum("aes,asi->aei", base_t, ang_t)

    # U_j(Omega) at Omega = p_x v (1 - eta); phi in [0, pi] by symmetry
    pu, wpu = _laguerre(orders.p, 1.0 / (2.0 * z_a))
    phi = np.linspace(0.0, math.pi, orders.phi)
    wphi = np.full(orders.phi, math.pi / (orders.phi - 1))
    wphi[[0, -1]] *= 0.5
    big_omega = px[:, None] * v_x * (1.0 - eta[None, :])
    freq = big_omega[:, :, None, None] + pu[None, None, :, None] * v_x * np.cos(phi)[None, None, None, :]
    r_u = r_imag_batch(freq, pu[None, None, :, None], model, orders.q_panels)
    ang_u = np.stack([np.cos(phi) ** 2, np.sin(phi) ** 2, np.ones_like(phi)], axis=-1)
    radial = wpu * kern(pu)
    U = 2.0 / (4.0 * math.pi**2) * np.einsum("aepf,p,f,fj->aej", r_u, radial, wphi, ang_u)

    inner = np.einsum("aei,ij,aej->ae", T, weights, U)
    omega_int = px * v_x / (2.0 * math.pi) * (inner @ weta)
    return -4.0 * HBAR * np.sum(wpx / (2.0 * math.pi) * px * omega_int)


def force_lte_smallv_oracle(z_a: float, v_x: float, atom: AtomParams, model: ResponseModel,
                            cfg: QuadratureConfig = DEFAULT_QUADRATURE, include_shift: bool = True,
                            orders: OracleOrders = OracleOrders(), check: bool = True) -> OracleResult:
    """LTE force from the frequency-resolved integrals (no Taylor expansion in w).

    With ``check`` the computation is repeated with finer rules and the
    difference is reported as the error estimate; ``converged`` compares it
    with ``1e3 * cfg.rel_tol`` (the oracle is a 1e-6-level cross-check).
    """
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    if not v_x > 0:
        raise ValueError("v_x must be positive")
    metal: MetalParams = model.metal
    ratio = v_x / metal.v_F
    if not 1e-5 <= ratio <= 1e-2:
        raise ValueError("the oracle is meant for v_x/v_F in [1e-5, 1e-2]")
    amp = 1.0
    if include_shift:
        amp = 1.0 / (1.0 - delta_static(z_a, atom, model, cfg) / atom.omega_a**2) ** 2
    w = _weights(atom)
    value = amp * _evaluate(z_a, v_x, model, w, orders)
    if not check:
        return OracleResult(float(value), math.nan, True)
    fine = amp * _evaluate(z_a, v_x, model, w, orders.refined())
    err = abs(fine - value)
    return OracleResult(float(fine), float(err), bool(err <= 1e3 * cfg.rel_tol * abs(fine)))
