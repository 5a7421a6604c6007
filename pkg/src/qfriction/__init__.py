"""Low-velocity quantum friction of an atom above a spatially dispersive metal."""
from .friction import (
    DnValues,
    ForceBreakdown,
    GeometryFactors,
    Intrinsic,
    Radiative,
    d_n,
    d_n_local,
    d_n_nonlocal_asymp,
    d_values,
    delta_static,
    force_lowv,
    force_ratio_asymp,
    gamma_static,
    orientation_avg_pair,
    phi_n,
)
from .estimator import FrictionTransformer
from .oracle import force_lte_smallv_oracle
from .quadrature import QuadratureConfig, integrate_finite, integrate_semi_infinite
from .response import (
    SCIB,
    DrudeLocal,
    NonlocalAsymptotic,
    ThomasFermiStatic,
    ValidityWarning,
    epsilon_l,
    f_l,
    impedance_ratio,
    q_function,
    r_prime_I,
    reflection,
    rho_p,
)
from .units import DEFAULT_METAL, AtomParams, MetalParams, default_atom, derived_scales

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
