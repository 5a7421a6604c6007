"""scikit-learn wrapper: map atom-surface distances to friction features.

``FrictionTransformer`` takes a column of distances ``z_a`` (metres) and
returns, per row, either the normalised force ratios, the surface moments
D_0..D_2 or the absolute forces.  ``fit`` only validates the
hyper-parameters and records the derived length scales, so the transformer
can sit in a :class:`sklearn.pipeline.Pipeline`.
"""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .friction import Intrinsic, Radiative, d_values, force_lowv
from .quadrature import QuadratureConfig
from .response import MODELS, ValidityWarning, make_model
from .units import AtomParams, MetalParams, derived_scales, ev_to_angular

__all__ = ["FrictionTransformer"]

_OUTPUTS = {
    "ratios": ["ratio_total", "ratio_j_lte"],
    "moments": ["D0", "D1", "D2"],
    "forces": ["F_lte", "F_j", "F_total", "F_local_ref"],
}


class FrictionTransformer(TransformerMixin, BaseEstimator):
    """Low-velocity friction features as a function of distance.

    Parameters
    ----------
    model : {"scib", "drude", "thomas_fermi", "nonlocal_asymptotic"}
    omega_p_ev, gamma_ev, v_f_over_c : metal parameters
    output : {"ratios", "moments", "forces"}
    damping : {"radiative", "intrinsic"}
    gamma_int_ev : internal damping rate, required for ``damping="intrinsic"``
    alpha0_a3, omega_a_ev : atom (only absolute forces depend on them)
    v_x : velocity in m/s used for absolute forces
    include_shift : apply the static frequency-shift factor
    rel_tol : relative tolerance of every integral
    suppress_warnings : silence :class:`ValidityWarning` during ``transform``

    Examples
    --------
    >>> import numpy as np
    >>> t = FrictionTransformer(model="drude").fit(np.array([[1e-8]]))
    >>> np.round(t.transform(np.array([[1e-8], [2e-8]])), 6)
    array([[1.828571, 0.828571],
           [1.828571, 0.828571]])
    """

    def __init__(self, model="scib", omega_p_ev=9.0, gamma_ev=0.030, v_f_over_c=1 / 137, output="ratios",
                 damping="radiative", gamma_int_ev=None, alpha0_a3=47.3, omega_a_ev=1.6, v_x=1.0,
                 include_shift=False, rel_tol=1e-9, suppress_warnings=True):
        self.model = model
        self.omega_p_ev = omega_p_ev
        self.gamma_ev = gamma_ev
        self.v_f_over_c = v_f_over_c
        self.output = output
        self.damping = damping
        self.gamma_int_ev = gamma_int_ev
        self.alpha0_a3 = alpha0_a3
        self.omega_a_ev = omega_a_ev
        self.v_x = v_x
        self.include_shift = include_shift
        self.rel_tol = rel_tol
        self.suppress_warnings = suppress_warnings

    def _validate_params(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {sorted(MODELS)}, got {self.model!r}")
        if self.output not in _OUTPUTS:
            raise ValueError(f"output must be one of {sorted(_OUTPUTS)}, got {self.output!r}")
        if self.damping == "radiative":
            damping = Radiative()
        elif self.damping == "intrinsic":
            if self.gamma_int_ev is None:
                raise ValueError("gamma_int_ev is required for intrinsic damping")
            damping = Intrinsic(float(ev_to_angular(self.gamma_int_ev)))
        else:
            raise ValueError(f"damping must be 'radiative' or 'intrinsic', got {self.damping!r}")
        if not self.v_x > 0:
            raise ValueError("v_x must be positive")
        metal = MetalParams.from_ev(self.omega_p_ev, self.gamma_ev, self.v_f_over_c)
        atom = AtomParams.from_angstrom3(self.alpha0_a3, self.omega_a_ev)
        return metal, atom, damping, QuadratureConfig(rel_tol=self.rel_tol)

    def _check_z(self, X, reset):
        X = check_array(X, dtype=np.float64, ensure_min_samples=1)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of distances, got {X.shape[1]} columns")
        if np.any(X <= 0):
            raise ValueError("distances must be positive")
        if reset:
            self.n_features_in_ = 1
        return X[:, 0]

    def fit(self, X, y=None):
        self._check_z(X, reset=True)
        self.metal_, self.atom_, self.damping_, self.quadrature_ = self._validate_params()
        self.model_ = make_model(self.model, self.metal_)
        sc = derived_scales(self.metal_)
        self.ell_ = sc.ell
        self.lambda_tf_ = sc.lambda_tf
        return self

    def _row(self, z):
        if self.output == "moments":
            return list(d_values(z, self.model_, self.quadrature_).d)
        fb = force_lowv(z, self.v_x, self.atom_, self.model_, damping=self.damping_, cfg=self.quadrature_,
                        include_shift=self.include_shift)
        nan = np.nan
        if self.output == "ratios":
            return [fb.ratio_total, nan if fb.ratio_j_lte is None else fb.ratio_j_lte]
        return [fb.f_lte, nan if fb.f_j is None else fb.f_j, fb.f_total, fb.f_lte_local_ref]

    def transform(self, X):
        check_is_fitted(self, "model_")
        z = self._check_z(X, reset=False)
        with warnings.catch_warnings():
            if self.suppress_warnings:
                warnings.simplefilter("ignore", ValidityWarning)
            return np.array([self._row(float(zi)) for zi in z], dtype=float)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "model_")
        return np.array(_OUTPUTS[self.output], dtype=object)
