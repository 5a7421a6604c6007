import math

import numpy as np
import pytest

from qfriction.units import (
    ANGSTROM,
    C_LIGHT,
    EPS0,
    AtomParams,
    MetalParams,
    angular_to_ev,
    default_atom,
    derived_scales,
    ev_to_angular,
)


def test_fig1_scales(metal):
    sc = derived_scales(metal)
    assert sc.ell == pytest.approx(48.01e-9, rel=1e-3)
    assert sc.lambda_tf == pytest.approx(0.92398e-10, rel=1e-4)
    assert 40e-9 < sc.ell < 60e-9


def test_ev_roundtrip():
    x = np.array([1e-3, 0.03, 9.0])
    assert np.allclose(angular_to_ev(ev_to_angular(x)), x, rtol=1e-15)
    assert ev_to_angular(1.0) == pytest.approx(1.519267447e15, rel=1e-9)


def test_collisionless_metal_has_infinite_mean_free_path(metal):
    clean = metal.with_gamma(0.0)
    assert math.isinf(clean.ell)
    assert clean.lambda_tf == metal.lambda_tf


def test_kappa_f():
    sc = derived_scales(MetalParams.from_ev(9.0, 0.03, 1 / 137))
    k = sc.kappa_F_at(0.0)
    assert k.real == 0 and k.imag == pytest.approx(1 / sc.ell)


@pytest.mark.parametrize("kwargs", [
    dict(omega_p=-1.0, gamma=1.0, v_F=1e6),
    dict(omega_p=1e16, gamma=-1.0, v_F=1e6),
    dict(omega_p=1e16, gamma=1.0, v_F=2 * C_LIGHT),
    dict(omega_p=math.nan, gamma=1.0, v_F=1e6),
])
def test_metal_validation(kwargs):
    with pytest.raises(ValueError):
        MetalParams(**kwargs)


def test_atom_orientation_handling():
    a = AtomParams(1e-39, 1e15, (0.0, 0.0, 1.0))
    assert np.allclose(a.alpha_diagonal(), [0, 0, 3e-39])
    assert not a.averaged
    iso = default_atom()
    assert iso.averaged
    assert iso.alpha0 == pytest.approx(4 * math.pi * EPS0 * 47.3 * ANGSTROM**3)
    with pytest.raises(ValueError):
        AtomParams(1e-39, 1e15, (1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        AtomParams(1e-39, 1e15, "sideways")
    with pytest.raises(ValueError):
        AtomParams(-1.0, 1e15)
