import logging
import math
from typing import NamedTuple

import numpy as np

from src.determinants.bosonic import det_inv_sqrt_I_minus_R
from src.determinants.determinants import DeterminantMethod, DeterminantMethodKey
from src.determinants.regularized import det_I_minus
from src.elliptic_core.elliptic_core import (
    DEFAULT_BUDGET,
    TWO_PI_I,
    EllipticDomainError,
    SeriesBudget,
    require_off_lattice,
)
from src.elliptic_core.qseries import dedekind_eta
from src.elliptic_core.theta import log_prime_form, theta_char_g2
from src.genus2_szego.domain import domain_check
from src.genus2_szego.genus2_szego import SewingDomainError
from src.genus2_szego.kernel import s2_eval
from src.szego_genus1.kernel import twist_theta_at_kappa_w
from src.szego_genus1.szego_genus1 import AnnulusError, SewingConfig, TwistConfig
from src.szego_genus1.transfer import build_T

from .genus_one import z1_twisted_2pt
from .partition import PeriodMatrixError

logger = logging.getLogger(__name__)


class FermionicFactors(NamedTuple):
    """Z^(2) = prefactor · det(I − T)"""

    prefactor: complex
    det: complex

    @property
    def value(self) -> complex:
        return self.prefactor * self.det


class RayReport(NamedTuple):
    """ρ の半直線に沿った三重積の残差"""

    rhos: list[complex]
    plain: list[float]
    leading_order: list[float]
    plain_order: float
    leading_order_order: float


def _require_domain(sew: SewingConfig) -> None:
    report = domain_check(sew)
    if not report.valid:
        raise SewingDomainError("; ".join(report.diagnostics))


def _log_twisted_power(sew: SewingConfig, tw: TwistConfig, b: SeriesBudget) -> complex:
    """log of (e^{iπB}ρ / K(w)²)^{½κ²} on the recorded sheet"""
    log_k = complex(log_prime_form(sew.w, sew.tau, b))
    return 0.5 * tw.kappa**2 * (1j * math.pi * tw.B + sew.log_rho - 2 * log_k)


def fermionic_factors(
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    method: DeterminantMethod | DeterminantMethodKey | str = DeterminantMethodKey.LU,
) -> FermionicFactors:
    _require_domain(sew)
    try:
        T = build_T(N, sew, tw, quad_M, b)
    except AnnulusError as e:
        raise SewingDomainError(f"縫合点が定義域の外です: {e}") from e
    det = det_I_minus(T, method).value
    prefactor = (
        np.exp(2j * math.pi * tw.beta2 * tw.kappa)
        * np.exp(0.5j * math.pi * tw.B * tw.kappa**2)
        * complex(sew.rho_pow(0.5 * tw.kappa**2))
        * z1_twisted_2pt(sew, tw, b)
    )
    return FermionicFactors(complex(prefactor), complex(det))


def z2_fermionic(
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    method: DeterminantMethod | DeterminantMethodKey | str = DeterminantMethodKey.LU,
) -> complex:
    """
    種数2のねじれ分配関数 e^{2πiβ₂κ}(e^{iπB}ρ)^{½κ²} Z^(1) det(I − T)。

    ρ の冪は記録された葉 sew.sheet で取る。
    """
    factors = fermionic_factors(sew, tw, N, quad_M, b, method)
    logger.debug(f"z2_fermionic: prefactor={factors.prefactor}, det={factors.det}")
    return factors.value


def z2_heisenberg(sew: SewingConfig, N: int, b: SeriesBudget = DEFAULT_BUDGET) -> complex:
    """ハイゼンベルク分配関数 Z_M^(2) = det(1 − R)^{−½} / η(τ)。ρ = 0 では 1/η。"""
    if sew.rho == 0:
        require_off_lattice(sew.w, sew.tau)
    else:
        _require_domain(sew)
    return complex(det_inv_sqrt_I_minus_R(N, sew, b) / dedekind_eta(sew.tau, b))


def _period_matrix(Omega) -> np.ndarray:
    Omega = np.asarray(Omega, dtype=complex)
    if Omega.shape != (2, 2):
        raise PeriodMatrixError(f"Ω は 2×2 でなければなりません: {Omega.shape}")
    return Omega


def z2_mu_nu(
    mu: float,
    nu: float,
    Omega,
    sew: SewingConfig,
    N: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """e^{iπ(μ²Ω₁₁ + 2μνΩ₁₂ + ν²Ω₂₂)} Z_M^(2)"""
    O = _period_matrix(Omega)
    exponent = mu**2 * O[0, 0] + 2 * mu * nu * O[0, 1] + nu**2 * O[1, 1]
    return complex(np.exp(1j * math.pi * exponent) * z2_heisenberg(sew, N, b))


def z2_theta_form(
    Omega,
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """θ^(2)[(α₁, κ); (β₁, β₂)](Ω) · Z_M^(2)"""
    try:
        theta = theta_char_g2(
            (tw.alpha1, tw.kappa), (tw.beta1, tw.beta2), _period_matrix(Omega), b
        )
    except EllipticDomainError as e:
        raise PeriodMatrixError(f"周期行列が不正です: {e}") from e
    return complex(theta * z2_heisenberg(sew, N, b))


def leading_order_period_matrix(
    sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET
) -> np.ndarray:
    """
    ρ の最低次の周期行列。

    Ω₁₁ = τ, Ω₁₂ = w/2πi, 2πiΩ₂₂ = iπB + L_ρ − 2 Log K(w)。
    """
    log_k = complex(log_prime_form(sew.w, sew.tau, b))
    omega22 = (1j * math.pi * tw.B + sew.log_rho - 2 * log_k) / TWO_PI_I
    omega12 = sew.w / TWO_PI_I
    return np.array([[sew.tau.value, omega12], [omega12, omega22]], dtype=complex)


def triple_product_residual(
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    Omega=None,
) -> float:
    """
    三重積の残差。

    Ω を与えると |θ^(2)(Ω) / (e^{2πiβ₂κ}(e^{iπB}ρ/K(w)²)^{½κ²} ϑ[α₁;β₁](κw) det(I − T) det(I − R)^{½}) − 1|、
    与えなければ最低次の |det(I − T) det(I − R)^{½} − 1|。
    """
    det_T = fermionic_factors(sew, tw, N, quad_M, b).det
    det_R_sqrt = 1 / det_inv_sqrt_I_minus_R(N, sew, b)
    if Omega is None:
        return float(abs(det_T * det_R_sqrt - 1))
    try:
        theta = theta_char_g2(
            (tw.alpha1, tw.kappa), (tw.beta1, tw.beta2), _period_matrix(Omega), b
        )
    except EllipticDomainError as e:
        raise PeriodMatrixError(f"周期行列が不正です: {e}") from e
    expected = (
        np.exp(2j * math.pi * tw.beta2 * tw.kappa + _log_twisted_power(sew, tw, b))
        * twist_theta_at_kappa_w(sew, tw, b)
        * det_T
        * det_R_sqrt
    )
    return float(abs(theta / expected - 1))


def _fitted_order(rhos: list[complex], residuals: list[float]) -> float:
    usable = [(abs(r), e) for r, e in zip(rhos, residuals) if e > 0]
    if len(usable) < 2:
        return math.nan
    x, y = np.log([u[0] for u in usable]), np.log([u[1] for u in usable])
    return float(np.polyfit(x, y, 1)[0])


def triple_product_ray(
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    steps: int = 5,
    factor: float = 10**-0.5,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> RayReport:
    """ρ → ρ·factor^j（j = 0..steps−1）に沿って二種類の残差と減衰の次数を求める。"""
    rhos, plain, leading = [], [], []
    for j in range(steps):
        point = sew.with_rho(sew.rho * factor**j)
        rhos.append(point.rho)
        plain.append(triple_product_residual(point, tw, N, quad_M, b))
        omega = leading_order_period_matrix(point, tw, b)
        leading.append(triple_product_residual(point, tw, N, quad_M, b, Omega=omega))
        logger.info(
            f"Triple product at |rho|={abs(point.rho):.3e}: "
            f"plain={plain[-1]:.3e}, leading-order={leading[-1]:.3e}"
        )
    return RayReport(
        rhos, plain, leading, _fitted_order(rhos, plain), _fitted_order(rhos, leading)
    )


def gen2_form(
    xs: list[complex],
    ys: list[complex],
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """Z^(2) · det[S^(2)(x_i, y_j)]"""
    if len(xs) != len(ys):
        raise ValueError("x と y の個数が一致しません")
    matrix = np.array(
        [[s2_eval(x, y, sew, tw, N, quad_M, b).value for y in ys] for x in xs],
        dtype=complex,
    )
    det = np.linalg.det(matrix) if len(xs) else 1.0
    return complex(z2_fermionic(sew, tw, N, quad_M, b) * det)
