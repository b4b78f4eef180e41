import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.elliptic_core.elliptic_core import (
    THETA1,
    TWO_PI_I,
    Characteristic,
    EllipticDomainError,
    LatticeProximityError,
    Tau,
    UndefinedKernelError,
    lattice_minimum,
    nearest_lattice_point,
)
from src.elliptic_core.qseries import dedekind_eta, eisenstein
from src.elliptic_core.theta import (
    prime_form_K,
    theta_char_g1,
    theta_char_g1_derivative,
    theta_char_g2,
)
from src.elliptic_core.weierstrass import (
    characteristic_from_multipliers,
    twisted_P1,
    weierstrass_P,
    weierstrass_P_table,
)

taus = st.builds(
    complex, st.floats(min_value=-0.5, max_value=0.5), st.floats(min_value=0.8, max_value=2.0)
).map(Tau)
characteristics = st.builds(
    Characteristic,
    st.floats(min_value=-0.5, max_value=0.5),
    st.floats(min_value=-0.5, max_value=0.5),
)
small_points = st.builds(
    complex, st.floats(min_value=-1.0, max_value=1.0), st.floats(min_value=-1.0, max_value=1.0)
)


def test_tau_must_lie_in_upper_half_plane():
    with pytest.raises(EllipticDomainError):
        Tau(0.1 - 1j)
    with pytest.raises(EllipticDomainError):
        Tau(complex(math.nan, 1.0))


@given(tau=taus, c=characteristics, z=small_points)
@settings(max_examples=40, deadline=None)
def test_theta_quasi_periodicity(tau, c, z):
    """ϑ[α;β](z + 2πi) = e^{2πiα}ϑ, ϑ[α;β](z + 2πiτ) = e^{−iπτ − z − 2πiβ}ϑ"""
    value = theta_char_g1(c, z, tau)
    shifted_a = theta_char_g1(c, z + TWO_PI_I, tau)
    shifted_b = theta_char_g1(c, z + TWO_PI_I * tau.value, tau)
    assert shifted_a == pytest.approx(cmath.exp(TWO_PI_I * c.alpha) * value, rel=1e-9, abs=1e-10)
    factor = cmath.exp(-1j * math.pi * tau.value - z - TWO_PI_I * c.beta)
    assert shifted_b == pytest.approx(factor * value, rel=1e-9, abs=1e-10)


def test_theta_accepts_arrays(tau):
    z = np.array([0.1 + 0.2j, -0.3 + 0.05j])
    values = theta_char_g1(THETA1, z, tau)
    assert values.shape == (2,)
    assert values[0] == pytest.approx(theta_char_g1(THETA1, z[0], tau))


def test_theta_derivative_matches_finite_difference(tau):
    c, z, h = Characteristic(0.2, 0.3), 0.4 - 0.2j, 1e-5
    derivative = (theta_char_g1(c, z + h, tau) - theta_char_g1(c, z - h, tau)) / (2 * h)
    assert theta_char_g1_derivative(c, z, tau) == pytest.approx(derivative, rel=1e-7)
    assert theta_char_g1_derivative(c, z, tau, order=0) == pytest.approx(theta_char_g1(c, z, tau))
    with pytest.raises(EllipticDomainError):
        theta_char_g1_derivative(c, z, tau, order=-1)


def test_prime_form_is_odd_with_unit_derivative(tau):
    z = 0.4 + 0.3j
    assert prime_form_K(-z, tau) == pytest.approx(-prime_form_K(z, tau), rel=1e-12)
    h = 1e-4
    assert prime_form_K(h, tau) / h == pytest.approx(1.0, abs=1e-7)


def test_prime_form_rejects_lattice_points(tau):
    with pytest.raises(LatticeProximityError):
        prime_form_K(TWO_PI_I * tau.value, tau)


def test_eta_modular_transformations(tau):
    eta = dedekind_eta(tau)
    assert dedekind_eta(Tau(tau.value + 1)) == pytest.approx(
        cmath.exp(1j * math.pi / 12) * eta, rel=1e-12
    )
    assert dedekind_eta(Tau(-1 / tau.value)) == pytest.approx(
        cmath.sqrt(-1j * tau.value) * eta, rel=1e-10
    )


@pytest.mark.parametrize("k", [4, 6])
def test_eisenstein_modular_weight(tau, k):
    assert eisenstein(k, Tau(-1 / tau.value)) == pytest.approx(
        tau.value**k * eisenstein(k, tau), rel=1e-10
    )


def test_eisenstein_constant_terms():
    tau = Tau(5j)
    assert eisenstein(2, tau) == pytest.approx(-1 / 12, abs=1e-10)
    assert eisenstein(4, tau) == pytest.approx(1 / 720, abs=1e-10)


@pytest.mark.parametrize("k", [1, 3, 0])
def test_eisenstein_rejects_odd_or_small_weight(tau, k):
    with pytest.raises(EllipticDomainError):
        eisenstein(k, tau)


def test_weierstrass_laurent_expansion(tau):
    z = 0.05 + 0.0j
    expected = (
        1 / z**2
        + eisenstein(2, tau)
        + 3 * eisenstein(4, tau) * z**2
        + 5 * eisenstein(6, tau) * z**4
    )
    assert weierstrass_P(2, z, tau) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_weierstrass_functions_are_elliptic(tau, k):
    z = 0.7 + 0.3j
    value = weierstrass_P(k, z, tau)
    assert weierstrass_P(k, z + TWO_PI_I, tau) == pytest.approx(value, rel=1e-10)
    assert weierstrass_P(k, z + TWO_PI_I * tau.value, tau) == pytest.approx(value, rel=1e-10)


def test_weierstrass_derivative_recursion(tau):
    """P₃ = −½ ∂P₂"""
    z, h = 0.7 + 0.3j, 1e-5
    derivative = (weierstrass_P(2, z + h, tau) - weierstrass_P(2, z - h, tau)) / (2 * h)
    assert weierstrass_P(3, z, tau) == pytest.approx(-0.5 * derivative, rel=1e-6)


def test_weierstrass_rejects_low_order(tau):
    with pytest.raises(EllipticDomainError):
        weierstrass_P(1, 0.5, tau)


def test_weierstrass_table_shares_lattice_images(tau):
    z = 0.7 + 0.3j
    table = weierstrass_P_table(6, z, tau)
    assert sorted(table) == [2, 3, 4, 5, 6]
    for k, value in table.items():
        assert value == pytest.approx(weierstrass_P(k, z, tau), rel=1e-12)
    with pytest.raises(EllipticDomainError):
        weierstrass_P_table(1, z, tau)


def test_characteristic_from_multipliers_recovers_alpha_beta():
    theta1 = -cmath.exp(-TWO_PI_I * 0.3)
    phi1 = -cmath.exp(TWO_PI_I * 0.2)
    c = characteristic_from_multipliers(theta1, phi1)
    assert c.alpha == pytest.approx(0.2)
    assert c.beta == pytest.approx(0.3)


def test_twisted_P1_has_unit_residue(tau):
    theta1 = -cmath.exp(-TWO_PI_I * 0.3)
    phi1 = -cmath.exp(TWO_PI_I * 0.2)
    z = 1e-6
    assert z * twisted_P1(theta1, phi1, z, tau) == pytest.approx(1.0, abs=1e-4)


def test_twisted_P1_undefined_for_trivial_multipliers(tau):
    with pytest.raises(UndefinedKernelError):
        twisted_P1(1.0, 1.0, 0.5, tau)


def test_genus_two_theta_factorizes_on_diagonal_period_matrix():
    tau1, tau2 = Tau(0.1 + 1.1j), Tau(-0.2 + 0.9j)
    omega = np.diag([tau1.value, tau2.value])
    value = theta_char_g2((0.2, 0.1), (0.3, 0.15), omega)
    expected = theta_char_g1(Characteristic(0.2, 0.3), 0.0, tau1) * theta_char_g1(
        Characteristic(0.1, 0.15), 0.0, tau2
    )
    assert value == pytest.approx(expected, rel=1e-12)


def test_genus_two_theta_rejects_bad_period_matrix():
    with pytest.raises(EllipticDomainError):
        theta_char_g2((0, 0), (0, 0), [[1j, 0.1], [0.2, 1j]])
    with pytest.raises(EllipticDomainError):
        theta_char_g2((0, 0), (0, 0), [[1j, 0], [0, -1j]])


def test_lattice_helpers(tau):
    assert lattice_minimum(Tau(1j)) == pytest.approx(2 * math.pi)
    lam = TWO_PI_I * (2 * tau.value + 1)
    assert nearest_lattice_point(lam + 0.01 - 0.02j, tau) == pytest.approx(lam)
