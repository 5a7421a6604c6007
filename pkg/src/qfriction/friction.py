"""Low-velocity quantum friction on an atom above a metal surface.

The force at small velocity factorises into dipole-orientation factors
``Phi_n`` and surface moments

    D_n(z) = int_0^inf dp p^(2n+2) exp(-2 z p) r_I'(0, p),

so that (``P = -2 hbar v^3 / pi``)

    F_LTE = P * Phi_0 Phi_2 / 3 * D_0 D_2 / (1 - Delta/omega_a^2)^2
    F_J   = P * Phi_1^2 * D_1^2 / (1 - Delta/omega_a^2)^2.

With orientation averaging the products ``Phi_n Phi_m`` are averaged as
products (fourth moments of the dipole direction).
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_semi_infinite
from .response import (
    SCIB,
    DrudeLocal,
    NonlocalAsymptotic,
    QuadratureError,
    ResponseModel,
    ThomasFermiStatic,
    ValidityWarning,
    r_prime_I,
)
from .units import ANGSTROM, EPS0, HBAR, AtomParams, MetalParams, derived_scales

__all__ = [
    "Radiative",
    "Intrinsic",
    "DampingKind",
    "GeometryFactors",
    "DnValues",
    "ForceBreakdown",
    "EULER_GAMMA",
    "B_TILDE_0",
    "b_const",
    "c_const",
    "phi_n",
    "phi_n_averaged",
    "orientation_avg_pair",
    "geometry_factors",
    "d_n",
    "d_values",
    "d_n_local",
    "d_n_nonlocal_asymp",
    "delta_static",
    "gamma_static",
    "local_lte_reference",
    "force_lowv",
    "force_ratio_asymp",
]

EULER_GAMMA = float(np.euler_gamma)
B_TILDE_0 = math.sqrt(2.0) * math.exp(EULER_GAMMA)
_F_CONST = (7 / 3, 167 / 60, 433 / 140)
_H_CONST = (6, 10, 14)

# <d_i^2 d_j^2> over uniformly distributed unit vectors
_FOURTH_MOMENTS = np.full((3, 3), 1 / 15) + np.eye(3) * (2 / 15)


@dataclass(frozen=True)
class Radiative:
    """Atomic damping from coupling to the field (the self-consistent case)."""

    name = "radiative"


@dataclass(frozen=True)
class Intrinsic:
    """Constant internal damping rate ``gamma_int`` (rad/s), no frequency shift."""

    gamma_int: float
    name = "intrinsic"

    def __post_init__(self):
        if not self.gamma_int > 0:
            raise ValueError("gamma_int must be positive")


DampingKind = Union[Radiative, Intrinsic]


def b_const(n: int) -> float:
    """Logarithm constant of the nonlocal D_n asymptote, 4 exp(gamma_E - f_n)."""
    return 4.0 * math.exp(EULER_GAMMA - _F_CONST[n])


def c_const(n: int) -> float:
    """Collision-correction constant (pi^2 - 4) / (4n + 6)."""
    return (math.pi**2 - 4.0) / _H_CONST[n]


def _check_n(n):
    if n not in (0, 1, 2):
        raise ValueError("n must be 0, 1 or 2")


def _phi_weights(n):
    return np.array([(2 * n + 1) / (2 * (n + 1)), 1 / (2 * (n + 1)), 1.0])


def _phi_scale(n):
    return math.comb(2 * n, n) / (2 ** (2 * n + 3) * math.pi * EPS0)


def phi_n(n: int, atom: AtomParams) -> float:
    """Orientation factor Phi_n (m^3) of a dipole with fixed direction."""
    _check_n(n)
    if atom.averaged:
        raise ValueError("phi_n needs a fixed orientation; use orientation_avg_pair")
    return float(_phi_scale(n) * _phi_weights(n) @ atom.alpha_diagonal())


def phi_n_averaged(n: int, alpha0: float) -> float:
    """<Phi_n> over directions, i.e. Phi_n of the isotropic tensor."""
    _check_n(n)
    return float(_phi_scale(n) * _phi_weights(n).sum() * alpha0)


def orientation_avg_pair(n: int, m: int, alpha0: float) -> float:
    """<Phi_n Phi_m> for alpha = 3 alpha0 d d with d uniform on the sphere."""
    _check_n(n)
    _check_n(m)
    if alpha0 < 0:
        raise ValueError("alpha0 must be non-negative")
    quad = _phi_weights(n) @ _FOURTH_MOMENTS @ _phi_weights(m)
    return float(9.0 * alpha0**2 * _phi_scale(n) * _phi_scale(m) * quad)


@dataclass(frozen=True)
class GeometryFactors:
    """Phi_n for a fixed dipole, or the averaged products for random orientation."""

    phi: Optional[Tuple[float, float, float]]
    pair_averages: dict

    def pair(self, n: int, m: int) -> float:
        if self.phi is not None:
            return self.phi[n] * self.phi[m]
        return self.pair_averages[tuple(sorted((n, m)))]

    def single(self, n: int) -> float:
        return self.phi[n] if self.phi is not None else self.pair_averages[("single", n)]


def geometry_factors(atom: AtomParams) -> GeometryFactors:
    if not atom.averaged:
        phis = tuple(phi_n(n, atom) for n in range(3))
        pairs = {(n, m): phis[n] * phis[m] for n in range(3) for m in range(n, 3)}
        return GeometryFactors(phis, pairs)
    pairs = {(n, m): orientation_avg_pair(n, m, atom.alpha0) for n in range(3) for m in range(n, 3)}
    pairs.update({("single", n): phi_n_averaged(n, atom.alpha0) for n in range(3)})
    return GeometryFactors(None, pairs)


# -- surface moments ----------------------------------------------------------

@dataclass(frozen=True)
class DnValues:
    d: Tuple[float, float, float]
    method: str
    z_a: float
    converged: bool = True


@functools.lru_cache(maxsize=1 << 16)
def _r_prime_cached(p: float, model: ResponseModel, cfg: QuadratureConfig) -> float:
    return r_prime_I(p, model, cfg)


def _r_prime_array(p, model, cfg):
    if isinstance(model, DrudeLocal):
        return np.full(p.shape, 2.0 * model.metal.gamma / model.metal.omega_p**2)
    if isinstance(model, ThomasFermiStatic):
        return np.zeros(p.shape)
    if isinstance(model, NonlocalAsymptotic):
        return np.array([r_prime_I(pi, model, cfg) if pi > 0 else 0.0 for pi in p])
    inner = cfg.tightened()
    return np.array([_r_prime_cached(float(pi), model, inner) if pi > 0 else 0.0 for pi in p])


def _warn_distance(z_a, model, ns):
    if z_a < ANGSTROM:
        warnings.warn(f"z_a = {z_a:.3g} m is below 1 angstrom; continuum description unreliable",
                      ValidityWarning, stacklevel=3)
    metal = model.metal
    if isinstance(model, SCIB) and (max(ns) + 1) / z_a > 0.1 * metal.k_fermi:
        warnings.warn("dominant wavevector of D_n exceeds k_F/10", ValidityWarning, stacklevel=3)
    if isinstance(model, NonlocalAsymptotic) and z_a > derived_scales(metal).ell:
        warnings.warn("nonlocal asymptotic impedance used at z_a > ell", ValidityWarning, stacklevel=3)


def d_values(z_a: float, model: ResponseModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
             ns=(0, 1, 2)) -> DnValues:
    """D_n(z_a) by quadrature for the requested ``ns``, sharing one subdivision.

    Missing orders are reported as NaN.
    """
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    for n in ns:
        _check_n(n)
    _warn_distance(z_a, model, ns)
    powers = np.array([2 * n + 2 for n in ns], dtype=float)

    def integrand(p):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            rp = _r_prime_array(p, model, cfg)
        return p[:, None] ** powers[None, :] * (np.exp(-2.0 * z_a * p) * rp)[:, None]

    res = integrate_semi_infinite(integrand, 1.0 / (2.0 * z_a), cfg)
    if not res.converged:
        raise QuadratureError(f"D_n at z_a={z_a!r}", res)
    d = [math.nan] * 3
    for n, val in zip(ns, np.atleast_1d(res.value)):
        d[n] = float(val)
    return DnValues(tuple(d), "quadrature", z_a, res.converged)


def d_n(n: int, z_a: float, model: ResponseModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Surface moment D_n(z_a) in s m^-(2n+3)."""
    return d_values(z_a, model, cfg, ns=(n,)).d[n]


def d_n_local(n: int, z_a: float, params: MetalParams) -> float:
    """Drude (local) moment 2 (Gamma/omega_p^2) (2n+2)! / (2 z_a)^(2n+3)."""
    _check_n(n)
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    return 2.0 * params.gamma / params.omega_p**2 * math.factorial(2 * n + 2) / (2.0 * z_a) ** (2 * n + 3)


def d_n_nonlocal_asymp(n: int, z_a: float, params: MetalParams, branch: str = "far") -> float:
    """Asymptotic D_n for lambda_TF << z_a < ell (``"far"``) or z_a << lambda_TF (``"near"``)."""
    _check_n(n)
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    sc = derived_scales(params)
    lam, ell, wp = sc.lambda_tf, sc.ell, params.omega_p
    if branch == "far":
        log_term = math.log(b_const(n) * z_a / lam) + c_const(n) * z_a / ell
        return 2.0 * lam / math.sqrt(3.0) * math.factorial(2 * n + 3) / (2.0 * z_a) ** (2 * n + 4) * log_term / wp
    if branch == "near":
        pre = 1.0 / (3.0 * math.sqrt(3.0) * lam**3 * wp)
        if n == 0:
            return -pre * (math.log(B_TILDE_0 * z_a / lam) - math.pi * z_a / (math.sqrt(2.0) * lam))
        return pre * math.factorial(2 * n - 1) / (2.0 * z_a) ** (2 * n)
    raise ValueError(f"unknown branch {branch!r}")


# -- static shift and damping -------------------------------------------------

def _static_reflection(p, model):
    if isinstance(model, DrudeLocal):
        return np.ones_like(p)
    a = p * derived_scales(model.metal).lambda_tf
    z = a / np.sqrt(1.0 + a * a)
    return (1.0 - z) / (1.0 + z)


def _alpha_bar(atom):
    # alpha_xx/2 + alpha_yy/2 + alpha_zz; isotropic tensor when averaged
    a = atom.alpha_diagonal()
    return 0.5 * a[0] + 0.5 * a[1] + a[2]


def delta_static(z_a: float, atom: AtomParams, model: ResponseModel,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Static frequency shift Delta(0, 0) in rad^2/s^2.

    Delta/omega_a^2 = alpha_bar/(4 pi eps0) int dp p^2 exp(-2 z p) r(0, p).
    """
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    res = integrate_semi_infinite(
        lambda p: p * p * np.exp(-2.0 * z_a * p) * _static_reflection(p, model), 1.0 / (2.0 * z_a), cfg)
    if not res.converged:
        raise QuadratureError("static shift", res)
    return atom.omega_a**2 * _alpha_bar(atom) / (4.0 * math.pi * EPS0) * res.value


def gamma_static(z_a: float, atom: AtomParams, model: ResponseModel,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE, d0: Optional[float] = None) -> float:
    """Radiative damping rate gamma(0, 0) = 2 omega_a^2 Phi_0 D_0 (rad/s)."""
    if d0 is None:
        d0 = d_n(0, z_a, model, cfg)
    phi0 = _phi_scale(0) * _phi_weights(0) @ atom.alpha_diagonal()
    return 2.0 * atom.omega_a**2 * phi0 * d0


# -- forces -------------------------------------------------------------------

@dataclass(frozen=True)
class ForceBreakdown:
    """Low-velocity friction at one (z_a, v_x); forces in newtons.

    ``f_j`` and ``ratio_j_lte`` are ``None`` for intrinsic damping, where
    only the LTE term is defined.
    """

    z_a: float
    v_x: float
    f_lte: float
    f_j: Optional[float]
    f_total: float
    f_lte_local_ref: float
    ratio_total: float
    ratio_j_lte: Optional[float]
    correction_factor: float
    d: DnValues


def local_lte_reference(z_a: float, v_x: float, alpha0: float, params: MetalParams) -> float:
    """Orientation-averaged local-optics LTE force, -hbar 189/(2 pi^3) (a0 G/(e0 wp^2))^2 v^3/(2z)^10."""
    s = alpha0 / EPS0 * params.gamma / params.omega_p**2
    return -HBAR * 189.0 / (2.0 * math.pi**3) * s * s * v_x**3 / (2.0 * z_a) ** 10


def _ratio(num, den):
    # the local reference vanishes for a collisionless metal
    return num / den if den != 0 else math.nan


def force_lowv(z_a: float, v_x: float, atom: AtomParams, model: ResponseModel,
               damping: DampingKind = Radiative(), cfg: QuadratureConfig = DEFAULT_QUADRATURE,
               include_shift: bool = True, d: Optional[DnValues] = None) -> ForceBreakdown:
    """Friction force at low velocity, split into LTE and non-equilibrium parts.

    ``include_shift`` applies the static frequency-shift factor
    [1 - Delta(0,0)/omega_a^2]^-2 (radiative damping only).  Precomputed
    surface moments may be passed as ``d``.
    """
    if not z_a > 0:
        raise ValueError("z_a must be positive")
    if not v_x > 0:
        raise ValueError("v_x must be positive")
    metal = model.metal
    if v_x > 0.1 * metal.v_F:
        warnings.warn("v_x > v_F/10: low-velocity expansion is questionable", ValidityWarning, stacklevel=2)
    geo = geometry_factors(atom)
    pref = -2.0 * HBAR * v_x**3 / math.pi

    if isinstance(damping, Intrinsic):
        if d is None:
            d = d_values(z_a, model, cfg, ns=(2,))
        scale = pref * geo.single(2) / 3.0 * damping.gamma_int / atom.omega_a**2
        f_lte = scale * d.d[2]
        ref = scale * d_n_local(2, z_a, metal)
        return ForceBreakdown(z_a, v_x, f_lte, None, f_lte, ref, _ratio(f_lte, ref), None, 1.0, d)

    if d is None:
        d = d_values(z_a, model, cfg)
    corr = 1.0
    if include_shift:
        corr = 1.0 / (1.0 - delta_static(z_a, atom, model, cfg) / atom.omega_a**2) ** 2
    d0, d1, d2 = d.d
    f_lte = pref * geo.pair(0, 2) / 3.0 * d0 * d2 * corr
    f_j = pref * geo.pair(1, 1) * d1 * d1 * corr
    total = f_lte + f_j
    ref = local_lte_reference(z_a, v_x, atom.alpha0, metal)
    return ForceBreakdown(z_a, v_x, f_lte, f_j, total, ref, _ratio(total, ref), _ratio(f_j, f_lte), corr, d)


def force_ratio_asymp(z_a: float, params: MetalParams,
                      damping: DampingKind = Radiative()) -> Tuple[float, Optional[float]]:
    """Closed-form (F_LTE/F_local, F_J/F_local) for lambda_TF << z_a < ell.

    For intrinsic damping the second entry is ``None``.
    """
    if params.gamma == 0:
        raise ValueError("the asymptotic ratios need a finite collision rate")
    sc = derived_scales(params)
    x = 2.0 * z_a / sc.lambda_tf
    w = params.omega_p / params.gamma

    def log_term(n):
        return math.log(b_const(n) * z_a / sc.lambda_tf) + c_const(n) * z_a / sc.ell

    if isinstance(damping, Intrinsic):
        return 7.0 / math.sqrt(3.0) * w * log_term(2) / x, None
    lte = 7.0 * w * w * log_term(0) * log_term(2) / x**2
    j = 145.0 / 21.0 * w * w * (log_term(1) / x) ** 2
    return lte, j
