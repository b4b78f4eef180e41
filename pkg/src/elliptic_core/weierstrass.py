import logging
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .elliptic_core import (
    DEFAULT_BUDGET,
    TWO_PI_I,
    BudgetExhaustedError,
    Characteristic,
    DegenerateCharacteristicError,
    EllipticDomainError,
    SeriesBudget,
    Tau,
    UndefinedKernelError,
    nearest_lattice_point,
    require_off_lattice,
)
from .theta import prime_form_K, theta_char_g1

logger = logging.getLogger(__name__)

# ϑ[α;β](0) がこの値を下回ると特性が退化しているとみなす
DEGENERATE_THETA_TOL = 1e-12


@lru_cache(maxsize=None)
def _coth_derivative(order: int) -> tuple[tuple[int, int, Fraction], ...]:
    """
    ∂_u^order (½ coth(u/2)) を c = coth(u/2), s = csch²(u/2) の多項式で表す。

    ∂c = −s/2, ∂s = −cs から ∂(c^a s^b) = −(a/2)c^{a−1}s^{b+1} − b c^{a+1}s^b。
    """
    if order == 0:
        return ((1, 0, Fraction(1, 2)),)
    terms: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for a, s_pow, coeff in _coth_derivative(order - 1):
        if a:
            terms[(a - 1, s_pow + 1)] -= coeff * Fraction(a, 2)
        if s_pow:
            terms[(a + 1, s_pow)] -= coeff * s_pow
    return tuple((a, s_pow, coeff) for (a, s_pow), coeff in terms.items() if coeff)


@lru_cache(maxsize=256)
def weierstrass_P_table(
    kmax: int, z: complex, tau: Tau, b: SeriesBudget = DEFAULT_BUDGET
) -> dict[int, complex]:
    """
    P_k(τ, z) (2 ≤ k ≤ kmax) をまとめて評価する。

    P_k(z) = Σ_n ((−1)^{k−1}/(k−1)!) ∂^{k−1}(½coth)((z + 2πinτ)/2) と τ 方向の格子和で計算し、
    2πi 方向の和は coth に含まれる。P₂ = ℘ + E₂。
    """
    if kmax < 2:
        raise EllipticDomainError(f"k は 2 以上でなければなりません: {kmax}")
    require_off_lattice(z, tau)
    z = complex(z - nearest_lattice_point(z, tau))
    with mpmath.workdps(40 + kmax):
        polynomials = {
            k: [
                (a, s_pow, mpmath.mpf(coeff.numerator) / coeff.denominator)
                for a, s_pow, coeff in _coth_derivative(k - 1)
            ]
            for k in range(2, kmax + 1)
        }
        prefactor = {
            k: mpmath.mpf(-1) ** (k - 1) / mpmath.factorial(k - 1)
            for k in range(2, kmax + 1)
        }
        step = TWO_PI_I * mpmath.mpc(tau.value)
        totals = {k: mpmath.mpc(0) for k in polynomials}
        scale = {k: mpmath.mpf(0) for k in polynomials}

        def image(n: int) -> dict[int, mpmath.mpc]:
            half = (mpmath.mpc(z) + n * step) / 2
            c = mpmath.coth(half)
            s = mpmath.csch(half) ** 2
            return {
                k: prefactor[k]
                * mpmath.fsum(coeff * c**a * s**s_pow for a, s_pow, coeff in poly)
                for k, poly in polynomials.items()
            }

        def accumulate(values: dict[int, mpmath.mpc]) -> None:
            for k, value in values.items():
                totals[k] += value
                scale[k] += abs(value)

        accumulate(image(0))
        for n in range(1, b.qseries_cutoff * 2 ** b.max_doublings + 1):
            plus, minus = image(n), image(-n)
            accumulate(plus)
            accumulate(minus)
            if all(
                abs(plus[k]) + abs(minus[k]) <= b.rel_tol * scale[k] for k in polynomials
            ):
                logger.debug(f"Weierstrass table up to P_{kmax} used {2 * n + 1} images")
                return {k: complex(v) for k, v in totals.items()}
    raise BudgetExhaustedError("P_k の格子和が収束しませんでした")


def weierstrass_P(
    k: int, z: complex, tau: Tau, b: SeriesBudget = DEFAULT_BUDGET
) -> complex:
    """ワイエルシュトラス型関数 P_k(τ, z)。P_{k+1} = −(1/k) ∂_z P_k。"""
    return weierstrass_P_table(k, complex(z), tau, b)[k]


def characteristic_from_multipliers(theta1: complex, phi1: complex) -> Characteristic:
    """−φ = e^{2πiα}, −θ = e^{−2πiβ} の主値から (α, β) を復元する。α, β ∈ (−½, ½]。"""
    alpha = float(np.angle(-phi1)) / (2 * math.pi)
    beta = -float(np.angle(-theta1)) / (2 * math.pi)
    if beta == -0.5:
        beta = 0.5
    return Characteristic(alpha, beta)


def twisted_P1(
    theta1: complex,
    phi1: complex,
    z,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
):
    """
    ねじれワイエルシュトラス関数（種数1のセゲー核）
    P₁(z) = ϑ[α₁;β₁](z) / (ϑ[α₁;β₁](0) K(z))。
    """
    if abs(theta1 - 1) < 1e-12 and abs(phi1 - 1) < 1e-12:
        raise UndefinedKernelError("(θ₁, φ₁) = (1, 1) ではねじれ核が定義されません")
    c = characteristic_from_multipliers(theta1, phi1)
    at_zero = theta_char_g1(c, 0.0, tau, b)
    if abs(at_zero) < DEGENERATE_THETA_TOL:
        raise DegenerateCharacteristicError(
            f"ϑ[{c.alpha};{c.beta}](0) がほぼ零です: {abs(at_zero):.3e}"
        )
    return theta_char_g1(c, z, tau, b) / (at_zero * prime_form_K(z, tau, b))
