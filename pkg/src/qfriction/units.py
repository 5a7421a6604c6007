"""Physical constants, material/atom parameter records and derived scales.

Everything inside the package is SI with angular frequencies in rad/s.
Energies in eV and velocities as fractions of ``c`` are only accepted at the
boundary (``from_ev`` constructors, config files, CLI).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import constants as _const

HBAR = _const.hbar
E_CHARGE = _const.e
C_LIGHT = _const.c
EPS0 = _const.epsilon_0
M_E = _const.m_e
ANGSTROM = 1e-10

__all__ = [
    "HBAR", "E_CHARGE", "C_LIGHT", "EPS0", "M_E", "ANGSTROM",
    "ev_to_angular", "angular_to_ev",
    "MetalParams", "LengthScales", "AtomParams", "AVERAGED",
    "derived_scales", "DEFAULT_METAL", "default_atom",
]


def ev_to_angular(x):
    """Convert an energy in eV to an angular frequency in rad/s."""
    return np.multiply(x, E_CHARGE / HBAR)


def angular_to_ev(w):
    """Inverse of :func:`ev_to_angular`."""
    return np.multiply(w, HBAR / E_CHARGE)


@dataclass(frozen=True)
class MetalParams:
    """Free-electron metal: plasma frequency, collision rate, Fermi velocity.

    Parameters
    ----------
    omega_p : float
        Plasma frequency in rad/s.
    gamma : float
        Collision (dissipation) rate in rad/s. Zero is allowed and means a
        collisionless metal with infinite mean free path.
    v_F : float
        Fermi velocity in m/s.
    m_eff : float
        Effective electron mass, only used for the Fermi-wavevector
        diagnostic.
    """

    omega_p: float
    gamma: float
    v_F: float
    m_eff: float = M_E

    def __post_init__(self):
        for name in ("omega_p", "gamma", "v_F", "m_eff"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega_p <= 0:
            raise ValueError("omega_p must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if not 0 < self.v_F < C_LIGHT:
            raise ValueError("v_F must satisfy 0 < v_F < c")
        if self.m_eff <= 0:
            raise ValueError("m_eff must be positive")

    @classmethod
    def from_ev(cls, omega_p_ev: float, gamma_ev: float, v_f_over_c: float, **kw) -> "MetalParams":
        return cls(ev_to_angular(omega_p_ev), ev_to_angular(gamma_ev), v_f_over_c * C_LIGHT, **kw)

    @property
    def ell(self) -> float:
        return derived_scales(self).ell

    @property
    def lambda_tf(self) -> float:
        return derived_scales(self).lambda_tf

    @property
    def k_fermi(self) -> float:
        return self.m_eff * self.v_F / HBAR

    @property
    def rho_local(self) -> float:
        """Drude dc resistivity Gamma / (eps0 omega_p^2), in Ohm m."""
        return self.gamma / (EPS0 * self.omega_p**2)

    def with_gamma(self, gamma: float) -> "MetalParams":
        return MetalParams(self.omega_p, gamma, self.v_F, self.m_eff)


@dataclass(frozen=True)
class LengthScales:
    """Mean free path and Thomas-Fermi length of a metal.

    ``ell`` is ``math.inf`` for a collisionless metal.
    """

    ell: float
    lambda_tf: float
    v_F: float
    gamma: float

    def kappa_F_at(self, omega):
        """Complex wavevector (omega + i Gamma) / v_F."""
        return (omega + 1j * self.gamma) / self.v_F


def derived_scales(params: MetalParams) -> LengthScales:
    ell = math.inf if params.gamma == 0 else params.v_F / params.gamma
    lambda_tf = params.v_F / (math.sqrt(3.0) * params.omega_p)
    return LengthScales(ell=ell, lambda_tf=lambda_tf, v_F=params.v_F, gamma=params.gamma)


AVERAGED = "averaged"

Orientation = Union[str, Sequence[float]]


@dataclass(frozen=True)
class AtomParams:
    """Two-level-like atom modelled as a harmonic dipole.

    ``alpha0`` is the isotropic static polarizability Tr[alpha]/3 in SI
    units (C m^2 / V).  ``orientation`` is either :data:`AVERAGED` or a
    3-vector giving the dipole direction; in the fixed case the tensor is
    ``3 alpha0 d d`` so that its trace is ``3 alpha0``.
    """

    alpha0: float
    omega_a: float
    orientation: Orientation = AVERAGED
    _dhat: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.alpha0) and self.alpha0 >= 0):
            raise ValueError("alpha0 must be finite and non-negative")
        if not (math.isfinite(self.omega_a) and self.omega_a > 0):
            raise ValueError("omega_a must be positive")
        if isinstance(self.orientation, str):
            if self.orientation != AVERAGED:
                raise ValueError(f"unknown orientation {self.orientation!r}")
            object.__setattr__(self, "_dhat", None)
        else:
            d = np.asarray(self.orientation, dtype=float)
            if d.shape != (3,):
                raise ValueError("orientation vector must have three components")
            norm = float(np.linalg.norm(d))
            if abs(norm - 1.0) > 1e-12:
                raise ValueError("orientation vector must have unit norm")
            object.__setattr__(self, "orientation", tuple(float(c) for c in d))
            object.__setattr__(self, "_dhat", tuple(float(c) for c in d))

    @property
    def averaged(self) -> bool:
        return self._dhat is None

    @property
    def dhat(self):
        return self._dhat

    def alpha_diagonal(self) -> np.ndarray:
        """Diagonal of the polarizability tensor in the motion frame (x, y, z).

        For the averaged orientation this is the isotropic tensor.
        """
        if self.averaged:
            return np.full(3, self.alpha0)
        return 3.0 * self.alpha0 * np.asarray(self._dhat) ** 2

    @classmethod
    def from_angstrom3(cls, alpha_a3: float, omega_a_ev: float, orientation: Orientation = AVERAGED):
        """Polarizability volume in cubic angstrom (alpha0 / (4 pi eps0))."""
        return cls(4 * math.pi * EPS0 * alpha_a3 * ANGSTROM**3, ev_to_angular(omega_a_ev), orientation)


DEFAULT_METAL = MetalParams.from_ev(9.0, 0.030, 1.0 / 137.0)


def default_atom(orientation: Orientation = AVERAGED) -> AtomParams:
    """Rubidium-scale atom used when absolute forces are requested."""
    return AtomParams.from_angstrom3(47.3, 1.6, orientation)
