import cmath
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from src.determinants.determinants import DeterminantMethodKey
from src.elliptic_core.elliptic_core import TWO_PI_I, Characteristic
from src.elliptic_core.qseries import dedekind_eta
from src.elliptic_core.theta import prime_form_K, theta_char_g1
from src.genus2_szego.genus2_szego import SewingDomainError
from src.genus2_szego.kernel import s2_eval
from src.partition.fock import (
    MAX_ORACLE_WEIGHT,
    dual_pair,
    enumerate_labels,
    extract_fock_coefficient,
    fock_2pt,
    fock_sign,
    fock_sum_oracle,
    fock_term_prefactor,
)
from src.partition.genus_one import (
    frobenius_residual,
    gen1_form,
    z1_alpha_npoint,
    z1_twisted_2pt,
    z1_twisted_2pt_lattice_sum,
)
from src.partition.genus_two import (
    fermionic_factors,
    gen2_form,
    leading_order_period_matrix,
    triple_product_ray,
    triple_product_residual,
    z2_fermionic,
    z2_heisenberg,
    z2_mu_nu,
    z2_theta_form,
)
from src.partition.partition import (
    ChargeBalanceError,
    ChargeMode,
    CoincidentInsertionError,
    FockBalanceError,
    FockLabel,
    InsertionList,
    PeriodMatrixError,
    WeightCutoffError,
)
from src.szego_genus1.kernel import cross_ratio_power, s_kappa

N = 8
QUAD_M = 128


def test_fock_label_weights():
    label = FockLabel(k_list=(1, 2), l_list=(3,))
    assert (label.s, label.t) == (2, 1)
    assert label.weight == pytest.approx(4.5)
    assert label.twisted_weight(0.1) == pytest.approx(4.605)
    assert label.max_mode() == 3
    assert FockLabel().max_mode() == 0


@pytest.mark.parametrize("modes", [(2, 1), (1, 1), (0, 2)])
def test_fock_label_requires_increasing_positive_modes(modes):
    with pytest.raises(ValidationError):
        FockLabel(k_list=modes)


def test_insertion_list_total_charge():
    ins = InsertionList.of((0.5, 1j), (-0.25, 2j), (-0.25, 3j))
    assert ins.total_charge == 0
    with pytest.raises(ValueError):
        InsertionList((1.0,), ())


def test_npoint_function_without_insertions(tau):
    assert z1_alpha_npoint(0.0, InsertionList((), ()), tau) == pytest.approx(
        1 / dedekind_eta(tau)
    )
    alpha = 0.3
    expected = cmath.exp(1j * math.pi * alpha**2 * tau.value) / dedekind_eta(tau)
    assert z1_alpha_npoint(alpha, InsertionList((), ()), tau) == pytest.approx(expected)


def test_npoint_function_charge_modes(tau):
    unbalanced = InsertionList.of((0.5, 1j), (0.25, 2j))
    with pytest.raises(ChargeBalanceError):
        z1_alpha_npoint(0.0, unbalanced, tau)
    assert z1_alpha_npoint(0.0, unbalanced, tau, mode=ChargeMode.LENIENT) == 0


def test_npoint_function_rejects_coincident_insertions(tau):
    ins = InsertionList.of((0.5, 1j), (-0.5, 1j + TWO_PI_I))
    with pytest.raises(CoincidentInsertionError):
        z1_alpha_npoint(0.0, ins, tau)


def test_npoint_function_locality(tau):
    (b1, z1), (b2, z2), (b3, z3) = (0.3, 0.3 + 0.4j), (-0.5, 0.1j), (0.2, 1.2 + 0.9j)
    alpha = 0.25
    value = z1_alpha_npoint(alpha, InsertionList.of((b1, z1), (b2, z2), (b3, z3)), tau)
    swapped = z1_alpha_npoint(alpha, InsertionList.of((b2, z2), (b1, z1), (b3, z3)), tau)
    assert cmath.exp(-b1 * b2 * cmath.log(z1 - z2)) * value == pytest.approx(
        cmath.exp(-b1 * b2 * cmath.log(z2 - z1)) * swapped, rel=1e-9
    )


def test_twisted_two_point_function_lattice_sum(sew, tw):
    closed = z1_twisted_2pt(sew, tw)
    assert z1_twisted_2pt_lattice_sum(sew, tw) == pytest.approx(closed, rel=1e-10)


def test_genus_one_form(sew, tw, generic_points):
    x, y = generic_points
    z1 = z1_twisted_2pt(sew, tw)
    assert gen1_form([], [], sew, tw) == pytest.approx(z1)
    assert gen1_form([x], [y], sew, tw) == pytest.approx(z1 * complex(s_kappa(x, y, sew, tw)))
    with pytest.raises(ValueError):
        gen1_form([x], [], sew, tw)


def _clustered_points(x: complex) -> tuple[list[complex], list[complex]]:
    return [x, x + 0.4], [x + 0.25j, x + 0.35 + 0.3j]


def test_genus_one_form_matches_frobenius_product(sew, tw, generic_points):
    xs, ys = _clustered_points(generic_points[0])
    c = tw.characteristic
    shift = tw.kappa * sew.w
    theta_part = theta_char_g1(c, sum(xs) - sum(ys) + shift, sew.tau) / theta_char_g1(
        c, shift, sew.tau
    )
    k_part = prime_form_K(xs[0] - xs[1], sew.tau) * prime_form_K(ys[1] - ys[0], sew.tau)
    for x in xs:
        for y in ys:
            k_part /= prime_form_K(x - y, sew.tau)
    # 点が近いので交差比はどれも 1 に近く、主値の κ 乗は行と列に分解できる
    diagonal = cross_ratio_power(xs[0], ys[0], sew, tw) * cross_ratio_power(xs[1], ys[1], sew, tw)
    expected = z1_twisted_2pt(sew, tw) * diagonal * theta_part * k_part
    assert gen1_form(xs, ys, sew, tw) == pytest.approx(complex(expected), rel=1e-9)


def test_genus_one_form_is_antisymmetric_in_rows(sew, tw, generic_points):
    xs, ys = _clustered_points(generic_points[0])
    value = gen1_form(xs, ys, sew, tw)
    assert gen1_form(xs[::-1], ys, sew, tw) == pytest.approx(-value, rel=1e-12)
    assert gen1_form(xs, ys[::-1], sew, tw) == pytest.approx(-value, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_frobenius_identity(tau, n):
    xs = [TWO_PI_I * (0.3 * tau.value + 0.7), TWO_PI_I * (0.6 * tau.value + 0.1), 0.4 + 0.2j]
    ys = [TWO_PI_I * (0.5 * tau.value + 0.3), TWO_PI_I * (0.2 * tau.value + 0.55), -0.9 + 1.1j]
    c = Characteristic(0.2, 0.3)
    assert frobenius_residual(xs[:n], ys[:n], c, tau) < 1e-9


def test_frobenius_rejects_coincident_points(tau):
    with pytest.raises(CoincidentInsertionError):
        frobenius_residual([0.5j, 0.5j], [1.5j, 2.5j], Characteristic(0.2, 0.3), tau)


def test_frobenius_flags_degenerate_configuration(tau, caplog):
    c = Characteristic(0.2, 0.3)
    # ϑ[α;β] は 2πi((½ − β) + (½ − α)τ) で零になる
    theta_zero = TWO_PI_I * ((0.5 - c.beta) + (0.5 - c.alpha) * tau.value)
    xs = [TWO_PI_I * (0.3 * tau.value + 0.7), 0.4 + 0.2j]
    y1 = TWO_PI_I * (0.5 * tau.value + 0.3)
    ys = [y1, sum(xs) - y1 - theta_zero]
    with caplog.at_level(logging.WARNING, logger="src.partition.genus_one"):
        frobenius_residual(xs, ys, c, tau)
    assert "Near-degenerate" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="src.partition.genus_one"):
        assert frobenius_residual(xs, [y1, -0.9 + 1.1j], c, tau) < 1e-9
    assert "Near-degenerate" not in caplog.text


def test_fock_sign_values():
    kappa = 0.1
    assert fock_sign(0, 0, 0, 0, 1, kappa) == 1
    assert fock_sign(1, 1, 0, 0, 1, kappa) == pytest.approx(cmath.exp(-1j * math.pi * kappa))
    assert fock_sign(0, 0, 1, 1, 1, kappa) == pytest.approx(-cmath.exp(1j * math.pi * kappa))
    assert fock_sign(1, 1, 0, 0, -1, kappa) == pytest.approx(cmath.exp(1j * math.pi * kappa))


@given(W=st.floats(min_value=0.0, max_value=3.0), kappa=st.floats(min_value=-0.45, max_value=0.45))
@settings(max_examples=25, deadline=None)
def test_enumerated_labels_respect_cutoff_and_order(W, kappa):
    labels = enumerate_labels(W, kappa)
    weights = [label.twisted_weight(kappa) for label in labels]
    assert all(w <= W + 1e-12 for w in weights)
    assert weights == sorted(weights)
    assert len(set(labels)) == len(labels)
    if 0.5 * kappa**2 <= W:
        assert labels[0] == FockLabel()


def test_low_weight_labels():
    assert enumerate_labels(0.5, 0.1) == [FockLabel(), FockLabel(l_list=(1,))]


def test_dual_pair_swaps_modes():
    label = FockLabel(k_list=(1, 3), l_list=(2,))
    first, second = dual_pair(label)
    assert first == label
    assert second == FockLabel(k_list=(2,), l_list=(1, 3))


def test_vacuum_only_oracle(sew, tw):
    expected = fock_term_prefactor(FockLabel(), sew, tw) * z1_twisted_2pt(sew, tw)
    assert fock_sum_oracle(0.01, sew, tw, N, QUAD_M) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("kappa, tolerance", [(0.1, 1e-6), (0.3, 1e-4), (-0.3, 1e-4)])
def test_fock_sum_matches_closed_form(sew, tw, kappa, tolerance):
    tw = tw.model_copy(update={"kappa": kappa})
    closed = z2_fermionic(sew, tw, N, QUAD_M)
    residuals = [
        abs(fock_sum_oracle(W, sew, tw, N, QUAD_M) / closed - 1) for W in (1, 2, 3, 4)
    ]
    assert residuals[-1] < tolerance
    assert residuals[-1] < residuals[0]


def test_fock_sum_limits(sew, tw):
    with pytest.raises(WeightCutoffError):
        fock_sum_oracle(MAX_ORACLE_WEIGHT + 1, sew, tw, N, QUAD_M)
    with pytest.raises(WeightCutoffError):
        fock_2pt(FockLabel(k_list=(N + 1,)), FockLabel(l_list=(1,)), sew, tw, N, QUAD_M)


def test_fock_labels_must_balance(sew, tw):
    with pytest.raises(FockBalanceError):
        fock_2pt(FockLabel(k_list=(1,)), FockLabel(), sew, tw, N, QUAD_M)


@pytest.mark.parametrize(
    "label1, label2",
    [
        (FockLabel(k_list=(1,)), FockLabel(l_list=(1,))),
        (FockLabel(k_list=(1,), l_list=(2,)), FockLabel()),
        (FockLabel(), FockLabel(k_list=(2,), l_list=(1,))),
        (FockLabel(k_list=(2,), l_list=(1,)), FockLabel(k_list=(1,), l_list=(2,))),
    ],
)
def test_extracted_coefficients_match_moment_minors(sew, tw, label1, label2):
    direct = fock_2pt(label1, label2, sew, tw, N, QUAD_M)
    extracted = extract_fock_coefficient(label1, label2, sew, tw)
    scale = max(abs(direct), abs(z1_twisted_2pt(sew, tw)))
    assert abs(direct - extracted) / scale < 1e-6


@pytest.mark.parametrize("B", [-1, 3])
def test_extraction_follows_the_anchored_branch(sew, tw, B):
    twisted = tw.model_copy(update={"B": B})
    label1, label2 = FockLabel(k_list=(1,)), FockLabel(l_list=(1,))
    direct = fock_2pt(label1, label2, sew, twisted, N, QUAD_M)
    extracted = extract_fock_coefficient(label1, label2, sew, twisted)
    scale = max(abs(direct), abs(z1_twisted_2pt(sew, twisted)))
    assert abs(direct - extracted) / scale < 1e-6


def test_extraction_grid_limit(sew, tw):
    label = FockLabel(k_list=(1, 2), l_list=(1, 2))
    with pytest.raises(WeightCutoffError):
        extract_fock_coefficient(label, FockLabel(k_list=(3,), l_list=(3,)), sew, tw, quad_M=64)


def test_fermionic_factors_and_methods(sew, tw):
    factors = fermionic_factors(sew, tw, N, QUAD_M)
    assert factors.value == factors.prefactor * factors.det
    assert z2_fermionic(sew, tw, N, QUAD_M) == pytest.approx(factors.value)
    trace_log = z2_fermionic(sew, tw, N, QUAD_M, method=DeterminantMethodKey.TRACE_LOG)
    assert trace_log == pytest.approx(factors.value, rel=1e-10)


def test_fermionic_partition_needs_sewable_point(sew, tw):
    with pytest.raises(SewingDomainError):
        z2_fermionic(sew.with_rho(0), tw, N, QUAD_M)
    with pytest.raises(SewingDomainError):
        z2_fermionic(sew.with_rho(0.7), tw, N, QUAD_M)


def test_genus_two_form(sew, tw, generic_points):
    x, y = generic_points
    z2 = z2_fermionic(sew, tw, N, QUAD_M)
    assert gen2_form([], [], sew, tw, N, QUAD_M) == pytest.approx(z2)
    kernel = s2_eval(x, y, sew, tw, N, QUAD_M).value
    assert gen2_form([x], [y], sew, tw, N, QUAD_M) == pytest.approx(z2 * kernel)


def test_heisenberg_partition_function(sew):
    assert z2_heisenberg(sew.with_rho(0), N) == pytest.approx(1 / dedekind_eta(sew.tau))
    z = z2_heisenberg(sew, N)
    assert z == pytest.approx(1 / dedekind_eta(sew.tau), rel=0.1)
    omega = np.array([[sew.tau.value, 0.1], [0.1, 1.5j]])
    assert z2_mu_nu(0.0, 0.0, omega, sew, N) == pytest.approx(z)
    assert z2_mu_nu(1.0, 0.0, omega, sew, N) == pytest.approx(
        cmath.exp(1j * math.pi * sew.tau.value) * z
    )


def test_heisenberg_partition_function_is_holomorphic_in_rho(sew):
    h = 1e-5

    def z(rho: complex) -> complex:
        return z2_heisenberg(sew.with_rho(rho), N)

    along_re = z(sew.rho + h) - z(sew.rho - h)
    along_im = z(sew.rho + 1j * h) - z(sew.rho - 1j * h)
    d_bar = (along_re + 1j * along_im) / (4 * h)
    assert abs(d_bar) < 1e-6
    assert abs(along_re) > 0


def test_theta_form_rejects_bad_period_matrix(sew, tw):
    with pytest.raises(PeriodMatrixError):
        z2_theta_form([[1j, 0.1], [0.2, 1j]], sew, tw, N)
    with pytest.raises(PeriodMatrixError):
        z2_theta_form(np.eye(3), sew, tw, N)


def test_triple_product_residual_decays_along_ray(sew, tw):
    report = triple_product_ray(sew, tw, N, QUAD_M, steps=3)
    assert len(report.rhos) == len(report.plain) == len(report.leading_order) == 3
    assert abs(report.rhos[-1]) == pytest.approx(abs(sew.rho) * 0.1)
    assert report.plain[-1] < report.plain[0]
    assert report.plain_order > 0.2
    assert all(math.isfinite(r) for r in report.leading_order)


def test_triple_product_residual_with_and_without_period_matrix(sew, tw):
    report = triple_product_ray(sew, tw, N, QUAD_M, steps=1)
    assert triple_product_residual(sew, tw, N, QUAD_M) == pytest.approx(report.plain[0])
    omega = leading_order_period_matrix(sew, tw)
    assert omega[0, 1] == omega[1, 0] == pytest.approx(sew.w / TWO_PI_I)
    assert triple_product_residual(sew, tw, N, QUAD_M, Omega=omega) == pytest.approx(
        report.leading_order[0]
    )
    with pytest.raises(PeriodMatrixError):
        triple_product_residual(sew, tw, N, QUAD_M, Omega=[[1j, 0.1], [0.2, 1j]])
