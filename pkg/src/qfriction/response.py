"""Optical response of the metal half-space.

Longitudinal (semiclassical Lindhard) and Drude dielectric functions, the
non-retarded TM surface impedance of the semi-classical infinite barrier
(SCIB) model, the resulting reflection coefficient and its low-frequency
slope, which sets the wavevector-dependent resistivity.

Array arguments broadcast; scalar arguments return Python scalars.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    deriv_at_zero_plus,
    integrate_finite,
    integrate_semi_infinite,
)
from .units import EPS0, MetalParams, derived_scales

__all__ = [
    "ValidityWarning",
    "QuadratureError",
    "ResponseModel",
    "SCIB",
    "DrudeLocal",
    "ThomasFermiStatic",
    "NonlocalAsymptotic",
    "MODELS",
    "make_model",
    "f_l",
    "epsilon_l",
    "epsilon_drude",
    "epsilon_tf",
    "impedance_ratio",
    "q_function",
    "reflection",
    "reflection_imag",
    "rho_p",
    "r_prime_I",
    "landau_b",
]

SQRT3 = math.sqrt(3.0)


class ValidityWarning(UserWarning):
    """A formula is used outside the regime it was derived for."""


class QuadratureError(ArithmeticError):
    """An integral did not reach its tolerance within the panel budget."""

    def __init__(self, what, result):
        super().__init__(f"{what}: quadrature did not converge "
                         f"(estimate {result.value!r}, error {result.error_estimate!r})")
        self.result = result


@dataclass(frozen=True)
class ResponseModel:
    metal: MetalParams

    name = "abstract"


@dataclass(frozen=True)
class SCIB(ResponseModel):
    """Semi-classical infinite barrier: Lindhard bulk, specular surface."""

    name = "scib"


@dataclass(frozen=True)
class DrudeLocal(ResponseModel):
    name = "drude"


@dataclass(frozen=True)
class ThomasFermiStatic(ResponseModel):
    """Static screening only; lossless, so r_I vanishes identically."""

    name = "thomas_fermi"


@dataclass(frozen=True)
class NonlocalAsymptotic(ResponseModel):
    """Small-|u| expansion of the SCIB impedance, valid for p ell >> 1."""

    name = "nonlocal_asymptotic"


MODELS = {cls.name: cls for cls in (SCIB, DrudeLocal, ThomasFermiStatic, NonlocalAsymptotic)}


def make_model(name: str, metal: MetalParams) -> ResponseModel:
    try:
        return MODELS[name.lower()](metal)
    except KeyError:
        raise ValueError(f"unknown response model {name!r}; choose from {sorted(MODELS)}") from None


def _scalar(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check_kf(p, metal):
    if np.any(np.asarray(p) > 0.1 * metal.k_fermi):
        warnings.warn("wavevector above k_F/10: semiclassical Lindhard response is "
                      "outside its validity range", ValidityWarning, stacklevel=3)


def f_l(u):
    """Lindhard auxiliary function 1 - (u/2) Log[(u+1)/(u-1)].

    The logarithm is evaluated as Log(u+1) - Log(u-1), which equals the
    principal Log of the ratio for Im u > 0 and is its Im u -> 0+ limit on
    the real axis.  For |u| > 8 the convergent series in 1/u^2 is used to
    avoid cancellation.  Points with Re u < 0 are mapped through
    f(-conj u) = conj f(u), so the reflection symmetry holds to the last bit.
    """
    u = np.asarray(u, dtype=complex)
    left = u.real < 0
    u = np.where(left, -np.conj(u), u)
    # normalise -0.0 imaginary parts to +0.0 (upper-half-plane limit)
    u = u.real + 1j * (u.imag + 0.0)
    if np.any((u.imag == 0) & (np.abs(u.real) == 1)):
        raise ValueError("f_l is singular at u = +-1")
    out = np.empty_like(u)
    big = np.abs(u) > 8.0
    small = ~big
    us = u[small]
    out[small] = 1.0 - 0.5 * us * (np.log(us + 1.0) - np.log(us - 1.0))
    if big.any():
        inv2 = 1.0 / u[big] ** 2
        acc = np.zeros_like(inv2)
        term = np.ones_like(inv2)
        for j in range(1, 22):
            term = term * inv2
            acc -= term / (2 * j + 1)
        out[big] = acc
    out = np.where(left, np.conj(out), out)
    return _scalar(out)


def _f_imag_axis(y):
    """f_l(i y) for real y >= 0, which is real: 1 - y arctan(1/y)."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    big = y > 4.0
    yb = y[~big]
    with np.errstate(divide="ignore"):
        out[~big] = 1.0 - yb * np.arctan2(1.0, yb)
    if big.any():
        inv2 = 1.0 / y[big] ** 2
        acc = np.zeros_like(inv2)
        term = -np.ones_like(inv2)
        for j in range(1, 30):
            term = -term * inv2
            acc += term / (2 * j + 1)
        out[big] = acc
    return out


def epsilon_tf(k, params: MetalParams):
    """Thomas-Fermi static dielectric function 1 + 1/(k lambda_TF)^2."""
    lam = derived_scales(params).lambda_tf
    return _scalar(1.0 + 1.0 / (np.asarray(k, dtype=float) * lam) ** 2)


def epsilon_l(omega, k, params: MetalParams, form: str = "lindhard"):
    """Semiclassical Lindhard longitudinal dielectric function.

    ``form="lindhard"`` evaluates the textbook expression
    ``1 + wp^2/(w + iG) * 3 u^2 f/(w + iG f)``; ``form="factorized"`` uses
    the Thomas-Fermi factor times a correction.  The two are algebraically
    identical.
    """
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("epsilon_l needs k > 0; use epsilon_drude for k = 0")
    g, wp, vf = params.gamma, params.omega_p, params.v_F
    w = omega + 1j * g
    u = w / (vf * k)
    f = np.asarray(f_l(u))
    lam = derived_scales(params).lambda_tf
    with np.errstate(divide="ignore", invalid="ignore"):
        if form == "lindhard":
            eps = 1.0 + wp**2 / w * 3.0 * u**2 * f / (omega + 1j * g * f)
        elif form == "factorized":
            a = 1.0 / (k * lam) ** 2
            corr = (f - 1.0) / (1.0 + 1j * g * f / omega)
            eps = (1.0 + a) * (1.0 + a / (1.0 + a) * corr)
        else:
            raise ValueError(f"unknown form {form!r}")
    # omega = 0 is the Thomas-Fermi limit in both forms
    static = np.broadcast_to(omega == 0, np.shape(eps))
    if static.any():
        eps = np.where(static, 1.0 + 1.0 / (k * lam) ** 2 + 0j, eps)
    return _scalar(eps)


def epsilon_drude(omega, params: MetalParams):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise ValueError("epsilon_drude has a pole at omega = 0")
    return _scalar(1.0 - params.omega_p**2 / (omega * (omega + 1j * params.gamma)))


def landau_b(p, params: MetalParams):
    """Second argument of Q: (pi^2 - 4) / (2 pi p ell); zero when ell is infinite."""
    ell = derived_scales(params).ell
    return (math.pi**2 - 4.0) / (2.0 * math.pi * np.asarray(p, dtype=float) * ell)


def _z_tf(a):
    return a / np.sqrt(1.0 + a * a)


def _require_converged(what, res):
    if not res.converged:
        raise QuadratureError(what, res)
    return res


def _scib_impedance(omega, p, metal, cfg, parts):
    """(2/pi) int_0^inf dq p / (k^2 eps_l), split where |u| = 1.

    ``parts`` selects the real components returned: "complex" or "both"
    (real and imaginary integrated as separate components).
    """
    sc = derived_scales(metal)
    kappa = abs(sc.kappa_F_at(omega))

    def integrand(q):
        k2 = p * p + q * q
        val = (2.0 / math.pi) * p / (k2 * epsilon_l(omega, np.sqrt(k2), metal))
        if parts == "complex":
            return val
        return np.stack([val.real, val.imag], axis=-1)

    scale = max(p, kappa)
    q_split = kappa * kappa - p * p
    if q_split > 0:
        qs = math.sqrt(q_split)
        inner = _require_converged("impedance", integrate_finite(integrand, 0.0, qs, cfg))
        outer = _require_converged("impedance",
                                   integrate_semi_infinite(lambda s: integrand(qs + s), scale, cfg))
        return inner.value + outer.value
    return _require_converged("impedance", integrate_semi_infinite(integrand, scale, cfg)).value


def impedance_ratio(omega: float, p: float, model: ResponseModel,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Non-retarded TM surface impedance Z/Z0 at frequency omega, wavevector p.

    Raises :class:`QuadratureError` if the SCIB integral does not converge.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    metal = model.metal
    lam = derived_scales(metal).lambda_tf
    a = p * lam
    if isinstance(model, SCIB):
        _check_kf(p, metal)
        if omega == 0:
            return complex(_z_tf(a))
        return complex(_scib_impedance(float(omega), float(p), metal, cfg, "complex"))
    if isinstance(model, DrudeLocal):
        if omega == 0:
            return 0j
        return complex(1.0 / epsilon_drude(omega, metal))
    if isinstance(model, ThomasFermiStatic):
        return complex(_z_tf(a))
    if isinstance(model, NonlocalAsymptotic):
        _warn_nonlocal_validity(p, metal)
        q = q_function(a, landau_b(p, metal))
        return complex(_z_tf(a), -(omega / metal.omega_p) * q / (a * (1.0 + a * a)))
    raise TypeError(f"unsupported model {model!r}")


def _warn_nonlocal_validity(p, metal):
    if np.any(np.asarray(p) * derived_scales(metal).ell < 1.0):
        warnings.warn("p ell < 1: nonlocal asymptotic impedance used outside its regime",
                      ValidityWarning, stacklevel=3)


def reflection(omega: float, p: float, model: ResponseModel,
               cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """TM reflection coefficient (1 - Z/Z0) / (1 + Z/Z0)."""
    z = impedance_ratio(omega, p, model, cfg)
    return (1.0 - z) / (1.0 + z)


def reflection_imag(omega: float, p: float, model: ResponseModel,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Im r = -2 Im Z / |1 + Z|^2, with Im Z integrated to its own tolerance."""
    if isinstance(model, SCIB) and omega != 0:
        _check_kf(p, model.metal)
        re_z, im_z = _scib_impedance(float(omega), float(p), model.metal, cfg, "both")
        return float(-2.0 * im_z / ((1.0 + re_z) ** 2 + im_z**2))
    z = impedance_ratio(omega, p, model, cfg)
    return float(-2.0 * z.imag / abs(1.0 + z) ** 2)


# -- Q function ---------------------------------------------------------------

def _asinh_series_coeffs(n):
    """Taylor coefficients in x of (1 + 2x)/sqrt(1 + x) * asinh(sqrt x)/sqrt x."""
    ks = np.arange(n)
    fact = np.array([math.comb(2 * k, k) / 4**k for k in range(n)])
    c_asinh = (-1.0) ** ks * fact / (2 * ks + 1)
    c_isqrt = (-1.0) ** ks * fact
    prod = np.polynomial.polynomial.polymul(np.polynomial.polynomial.polymul([1.0, 2.0], c_isqrt), c_asinh)
    return prod[:n]


_Q_SERIES = _asinh_series_coeffs(16)


def _q_closed(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.sqrt(a * a + 1.0)
    big = a > 30.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_part = np.where(big, 0.0, (a * a + 2.0) / s * np.arcsinh(1.0 / a) - 1.0)
    if np.any(big):
        x = 1.0 / np.where(big, a, 1.0) ** 2
        series = np.polynomial.polynomial.polyval(x, _Q_SERIES) - 1.0
        log_part = np.where(big, series, log_part)
    # a^2 + 1 - a (a^2 + 3/2)/sqrt(a^2+1), rearranged to avoid cancellation
    b_part = (1.0 - 0.5 * a / (s + a)) / ((s + a) * s)
    return a * a / (2.0 * SQRT3) * (log_part + b_part * math.pi * b)


def _q_small(a, b):
    return (2.0 / SQRT3) * (-0.5 * a * a) * (np.log(a / 2.0) + 0.5 * (1.0 - math.pi * b))


def q_function(a, b, method: str = "closed", cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Landau-damping integral

    Q(a, b) = a^2 (a^2 + 1)/sqrt(3) * int_0^1 dx (1 + b x) x^3 / ((a^2 + x^2)^2 sqrt(1 - x^2)).

    ``method="closed"`` uses the analytic antiderivative (with a series for
    large ``a`` and the leading small-``a`` form below 1e-8);
    ``method="quadrature"`` integrates the definition directly.
    """
    if np.any(np.asarray(a) <= 0):
        raise ValueError("Q(a, b) needs a > 0")
    if np.any(np.asarray(b) < 0):
        raise ValueError("Q(a, b) needs b >= 0")
    if method == "quadrature":
        return _q_quadrature(float(a), float(b), cfg)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    a_arr = np.asarray(a, dtype=float)
    out = np.where(a_arr < 1e-8, _q_small(np.maximum(a_arr, 1e-300), b), _q_closed(np.maximum(a_arr, 1e-8), b))
    return _scalar(out)


def _q_quadrature(a, b, cfg):
    a2 = a * a

    def integrand(x):
        return (1.0 + b * x) * x**3 / ((a2 + x * x) ** 2 * np.sqrt((1.0 - x) * (1.0 + x)))

    # the peak of x^3/(a^2+x^2)^2 sits at x ~ a; give the adaptive rule a breakpoint there
    if a < 0.5:
        parts = [integrate_finite(integrand, 0.0, a, cfg), integrate_finite(integrand, a, 1.0, cfg)]
    else:
        parts = [integrate_finite(integrand, 0.0, 1.0, cfg)]
    for res in parts:
        _require_converged("Q quadrature", res)
    return a2 * (a2 + 1.0) / SQRT3 * sum(r.value for r in parts)


# -- low-frequency loss -------------------------------------------------------

def rho_p(p, params: MetalParams):
    """Wavevector-dependent resistivity (Ohm m) from the nonlocal asymptotic r_I.

    Emits :class:`ValidityWarning` where ``p ell < 1``.
    """
    _warn_nonlocal_validity(p, params)
    lam = derived_scales(params).lambda_tf
    a = np.asarray(p, dtype=float) * lam
    q = q_function(a, landau_b(p, params))
    r_slope = 2.0 * q / (params.omega_p * a * (np.sqrt(1.0 + a * a) + a) ** 2)
    return _scalar(r_slope / (2.0 * EPS0))


def _scib_r_prime(p, metal, cfg):
    """Exact d r_I / d omega at omega = 0 for SCIB, differentiated under the integral.

    At omega = 0, eps_l = eps_TF is real and
    d eps_l/d omega = i (1 - f)/(Gamma f) / (k lambda)^2, f = f_l(i/(k ell)),
    which gives a single real q-integral.
    """
    sc = derived_scales(metal)
    lam, ell, vf = sc.lambda_tf, sc.ell, metal.v_F
    a = p * lam

    def integrand(q):
        k = np.sqrt(p * p + q * q)
        kl = k * ell
        with np.errstate(divide="ignore"):
            y = 1.0 / kl
        f = _f_imag_axis(y)
        return np.arctan(kl) / ((1.0 + (k * lam) ** 2) ** 2 * k * f)

    scale = max(p, 1.0 / ell) if math.isfinite(ell) else p
    res = _require_converged("r_I slope", integrate_semi_infinite(integrand, scale, cfg))
    pref = 4.0 * lam * lam * p / (math.pi * vf) / (1.0 + _z_tf(a)) ** 2
    return pref * res.value


def r_prime_I(p: float, model: ResponseModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
              method: str = "analytic") -> float:
    """Slope d r_I(omega, p)/d omega at omega = 0 (seconds).

    For SCIB, ``method="analytic"`` differentiates the impedance integral
    under the integral sign; ``method="richardson"`` extrapolates difference
    quotients of :func:`reflection_imag`, starting at
    ``h0 = 1e-3 min(Gamma, v_F p)``.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    metal = model.metal
    if isinstance(model, DrudeLocal):
        return 2.0 * metal.gamma / metal.omega_p**2
    if isinstance(model, ThomasFermiStatic):
        return 0.0
    if isinstance(model, NonlocalAsymptotic):
        return 2.0 * EPS0 * rho_p(p, metal)
    if not isinstance(model, SCIB):
        raise TypeError(f"unsupported model {model!r}")
    _check_kf(p, metal)
    if method == "analytic":
        return float(_scib_r_prime(float(p), metal, cfg))
    if method != "richardson":
        raise ValueError(f"unknown method {method!r}")
    scale = metal.v_F * p if metal.gamma == 0 else min(metal.gamma, metal.v_F * p)
    inner = cfg.tightened()
    res = deriv_at_zero_plus(lambda w: reflection_imag(w, p, model, inner), 1e-3 * scale)
    if not res.converged:
        raise ArithmeticError(f"Richardson ladder did not settle at p={p!r} "
                              f"(best {res.value!r} +- {res.error_estimate!r})")
    return res.value
