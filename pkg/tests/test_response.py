import math
import warnings

import numpy as np
import pytest

from qfriction.quadrature import QuadratureConfig
from qfriction.response import (
    SCIB,
    DrudeLocal,
    NonlocalAsymptotic,
    ThomasFermiStatic,
    ValidityWarning,
    epsilon_drude,
    epsilon_l,
    epsilon_tf,
    f_l,
    impedance_ratio,
    make_model,
    q_function,
    r_prime_I,
    reflection,
    reflection_imag,
    rho_p,
)

# Q(1, 0) from direct quadrature of the defining integral at rel_tol 1e-13
Q_1_0 = 0.25105375564628


class TestLindhard:
    def test_real_argument(self):
        assert f_l(2.0) == pytest.approx(1 - math.log(3), abs=1e-15)

    def test_imaginary_axis(self):
        # f(iy) = 1 - y arctan(1/y), an independent closed form
        for y in (1e-3, 0.01, 0.5, 3.0, 20.0):
            assert f_l(1j * y).real == pytest.approx(1 - y * math.atan(1 / y), rel=1e-12)
            assert abs(f_l(1j * y).imag) < 1e-15

    def test_small_argument(self):
        u = 0.01j
        # f = 1 + i pi u/2 - u^2 - u^4/3 - ...
        assert abs(f_l(u) - (1 + 0.5j * math.pi * u - u**2)) < 1e-7

    def test_large_argument_series(self):
        u = 100j
        three_terms = -1 / (3 * u**2) - 1 / (5 * u**4) - 1 / (7 * u**6)
        assert abs(f_l(u) / three_terms - 1) < 1e-12
        # leading term alone carries a 3/(5 u^2) relative correction
        assert abs(f_l(u) / (-1 / (3 * u**2)) - 1) == pytest.approx(3 / 5e4, rel=1e-3)

    def test_branch_switch_is_continuous(self):
        for phase in np.linspace(0.05, 3.1, 9):
            lo = f_l(7.999999 * np.exp(1j * phase))
            hi = f_l(8.000001 * np.exp(1j * phase))
            assert abs(lo - hi) < 1e-6 * abs(lo) + 1e-9

    def test_singular_points(self):
        with pytest.raises(ValueError):
            f_l(1.0)
        with pytest.raises(ValueError):
            f_l(-1.0)

    def test_landau_damping_on_real_axis(self):
        # +i0 limit: Im f = pi u / 2 inside the particle-hole continuum
        assert f_l(0.5).imag == pytest.approx(math.pi / 4, rel=1e-14)
        assert f_l(1.5).imag == 0.0


class TestDielectric:
    def test_forms_agree(self, metal):
        rng = np.random.default_rng(0)
        w = 10 ** rng.uniform(9, 16.5, 2000) * rng.choice([-1, 1], 2000)
        k = 10 ** rng.uniform(4, 11, 2000)
        a = epsilon_l(w, k, metal)
        b = epsilon_l(w, k, metal, form="factorized")
        # the factorized form adds terms of size 1 + 1/(k lambda)^2 and
        # cancels down to eps, so compare on that scale
        scale = np.maximum(np.abs(a), 1 + 1 / (k * metal.lambda_tf) ** 2)
        assert np.max(np.abs(a - b) / scale) < 1e-12

    def test_static_limit_is_thomas_fermi(self, metal, lam):
        k = np.geomspace(1e-3, 1e2, 50) / lam
        assert np.allclose(epsilon_l(0.0, k, metal), epsilon_tf(k, metal), rtol=1e-15)
        assert epsilon_l(0.0, 1 / lam, metal) == 2.0

    def test_drude_limit(self, metal, lam):
        w = metal.gamma
        got = epsilon_l(w, 1e-6 / lam, metal)
        assert abs(got / epsilon_drude(w, metal) - 1) < 1e-4

    def test_passivity_and_conjugation(self, metal):
        rng = np.random.default_rng(1)
        w = 10 ** rng.uniform(8, 16.5, 2000)
        k = 10 ** rng.uniform(4, 11, 2000)
        eps = epsilon_l(w, k, metal)
        assert np.all(eps.imag >= 0)
        assert np.array_equal(epsilon_l(-w, k, metal), np.conj(eps))

    def test_collisionless_landau_damping(self, metal, lam):
        clean = metal.with_gamma(0.0)
        w = 1e13
        k = 2 * w / clean.v_F  # |u| = 1/2
        assert epsilon_l(w, k, clean).imag > 0

    def test_invalid_inputs(self, metal):
        with pytest.raises(ValueError):
            epsilon_l(1e13, 0.0, metal)
        with pytest.raises(ValueError):
            epsilon_l(1e13, 1e9, metal, form="other")
        with pytest.raises(ValueError):
            epsilon_drude(0.0, metal)


class TestImpedance:
    def test_static_models(self, metal, lam, quiet):
        a = 0.7
        z_tf = a / math.sqrt(1 + a * a)
        assert impedance_ratio(0.0, a / lam, SCIB(metal)) == pytest.approx(z_tf, rel=1e-15)
        assert impedance_ratio(3e13, a / lam, ThomasFermiStatic(metal)) == pytest.approx(z_tf, rel=1e-15)
        assert impedance_ratio(0.0, a / lam, DrudeLocal(metal)) == 0

    def test_drude_impedance(self, metal):
        w = 2e14
        assert impedance_ratio(w, 1e8, DrudeLocal(metal)) == pytest.approx(1 / epsilon_drude(w, metal), rel=1e-15)

    def test_scib_matches_asymptotic_form(self, metal, lam, quiet):
        p, w = 1 / lam, 1e-4 * metal.omega_p
        a = impedance_ratio(w, p, SCIB(metal))
        b = impedance_ratio(w, p, NonlocalAsymptotic(metal))
        assert abs(a.real / b.real - 1) < 0.05
        assert abs(a.imag / b.imag - 1) < 0.05

    def test_scib_local_limit(self, metal, ell):
        # p ell << 1 and omega >> v_F p: the bulk response is Drude-like
        w = 5 * metal.gamma
        p = 1e-4 / ell
        z = impedance_ratio(w, p, SCIB(metal))
        assert abs(z / impedance_ratio(w, p, DrudeLocal(metal)) - 1) < 1e-2

    def test_reflection_definition(self, metal, lam, quiet):
        z = impedance_ratio(1e13, 0.3 / lam, SCIB(metal))
        r = reflection(1e13, 0.3 / lam, SCIB(metal))
        assert r == pytest.approx((1 - z) / (1 + z), rel=1e-14)
        assert reflection_imag(1e13, 0.3 / lam, SCIB(metal)) == pytest.approx(r.imag, rel=1e-8)

    def test_reflection_odd_in_frequency(self, metal, lam, quiet):
        p = 0.2 / lam
        assert reflection_imag(-1e12, p, SCIB(metal)) == pytest.approx(-reflection_imag(1e12, p, SCIB(metal)),
                                                                      rel=1e-9)

    def test_kf_diagnostic(self, metal):
        with pytest.warns(ValidityWarning):
            impedance_ratio(1e12, metal.k_fermi, SCIB(metal))

    def test_nonpositive_p(self, metal):
        with pytest.raises(ValueError):
            impedance_ratio(1e12, 0.0, SCIB(metal))

    def test_make_model(self, metal):
        assert isinstance(make_model("scib", metal), SCIB)
        with pytest.raises(ValueError):
            make_model("hydrodynamic", metal)


class TestQFunction:
    def test_frozen_value(self):
        assert q_function(1.0, 0.0) == pytest.approx(Q_1_0, rel=1e-12)
        assert q_function(1.0, 0.0, method="quadrature") == pytest.approx(Q_1_0, rel=1e-12)

    @pytest.mark.parametrize("b", [0.0, 0.1, 1.0])
    def test_closed_form_vs_quadrature(self, b):
        for a in np.geomspace(1e-3, 1e3, 25):
            assert q_function(a, b) == pytest.approx(q_function(a, b, method="quadrature"), rel=1e-9)

    def test_large_a_limit(self):
        assert abs(q_function(100.0, 0.0) - 2 / (3 * math.sqrt(3))) < 1e-4

    def test_small_a_branch_is_continuous(self):
        below = q_function(0.99e-8, 0.5)
        above = q_function(1.01e-8, 0.5)
        assert below == pytest.approx(above, rel=5e-2)

    def test_vectorised(self):
        a = np.array([0.1, 1.0, 10.0])
        assert np.allclose(q_function(a, 0.2), [q_function(x, 0.2) for x in a], rtol=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            q_function(0.0, 0.0)
        with pytest.raises(ValueError):
            q_function(1.0, -1.0)


class TestResistivity:
    def test_peak(self, metal, lam, quiet):
        p = np.geomspace(1e-2, 10, 801) / lam
        rho = rho_p(p, metal)
        i = int(np.argmax(rho))
        assert 1 / 10 <= p[i] * lam <= 1 / 2
        assert rho[i] > 10 * metal.rho_local

    def test_matches_scib_slope(self, metal, lam, quiet):
        for a in (0.2, 1.0):
            exact = r_prime_I(a / lam, SCIB(metal))
            assert 2 * 8.8541878128e-12 * rho_p(a / lam, metal) == pytest.approx(exact, rel=1e-3)

    def test_warns_outside_window(self, metal, ell):
        with pytest.warns(ValidityWarning):
            rho_p(0.1 / ell, metal)


class TestSlope:
    def test_routes_agree(self, metal, lam, ell, quiet):
        for p in (1e-3 / ell, 1 / ell, 0.2 / lam, 1 / lam):
            a = r_prime_I(p, SCIB(metal))
            b = r_prime_I(p, SCIB(metal), method="richardson")
            assert a == pytest.approx(b, rel=1e-8)

    def test_local_models(self, metal):
        assert r_prime_I(1e8, DrudeLocal(metal)) == 2 * metal.gamma / metal.omega_p**2
        assert r_prime_I(1e8, ThomasFermiStatic(metal)) == 0.0

    def test_scib_approaches_drude_at_small_p(self, metal, ell):
        got = r_prime_I(1e-4 / ell, SCIB(metal))
        assert got / (2 * metal.gamma / metal.omega_p**2) - 1 == pytest.approx(0, abs=1e-3)

    def test_nonanalytic_first_order_correction(self, metal, ell):
        # the departure from the Drude slope is linear in p ell
        drude = 2 * metal.gamma / metal.omega_p**2
        d1 = r_prime_I(1e-3 / ell, SCIB(metal)) / drude - 1
        d2 = r_prime_I(2e-3 / ell, SCIB(metal)) / drude - 1
        assert d2 / d1 == pytest.approx(2.0, rel=2e-2)

    def test_positive_on_random_grid(self, metal, lam, quiet):
        rng = np.random.default_rng(5)
        cfg = QuadratureConfig(rel_tol=1e-8)
        for p in 10 ** rng.uniform(-4, 0.5, 60) / lam:
            assert r_prime_I(p, SCIB(metal), cfg) > 0

    def test_collisionless_metal_still_dissipates(self, metal, lam, quiet):
        clean = metal.with_gamma(0.0)
        a = r_prime_I(1 / lam, SCIB(clean))
        assert a > 0
        assert a == pytest.approx(r_prime_I(1 / lam, SCIB(clean), method="richardson"), rel=1e-8)
