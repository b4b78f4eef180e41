import logging
import math
from functools import lru_cache

import numpy as np

from .elliptic_core import (
    DEFAULT_BUDGET,
    THETA1,
    TWO_PI_I,
    BudgetExhaustedError,
    Characteristic,
    EllipticDomainError,
    SeriesBudget,
    Tau,
    require_off_lattice,
)

logger = logging.getLogger(__name__)


def _as_output(value: np.ndarray):
    return value if value.ndim else complex(value)


def theta_series(
    alpha: complex,
    beta: complex,
    z,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
    order: int = 0,
):
    """
    Σ_n (n+α)^order · exp(iπ(n+α)²τ + (n+α)(z + 2πiβ)) を評価する。

    α, β は複素数に拡張してもよい。z はスカラーまたは配列。
    打ち切り c での和と c/2 での和の差が rel_tol 未満になるまで c を倍にする。
    """
    z_arr = np.asarray(z, dtype=complex)
    shift = z_arr + TWO_PI_I * beta
    center = np.round(shift.real / (2 * math.pi * tau.value.imag) - complex(alpha).real)
    cutoff = b.lattice_cutoff
    for _ in range(b.max_doublings + 1):
        n = np.arange(-cutoff, cutoff + 1)
        nu = center[..., None] + n + alpha
        terms = np.exp(1j * math.pi * nu**2 * tau.value + nu * shift[..., None])
        if order:
            terms = terms * nu**order
        magnitude = np.abs(terms)
        tail = magnitude[..., np.abs(n) > cutoff // 2].sum(axis=-1)
        scale = magnitude.sum(axis=-1)
        if np.all(tail <= b.rel_tol * scale):
            return _as_output(terms.sum(axis=-1))
        logger.debug(f"Theta series not converged at cutoff {cutoff}, doubling")
        cutoff *= 2
    raise BudgetExhaustedError(
        f"テータ級数が打ち切り {cutoff // 2} までに収束しませんでした"
    )


def theta_char_g1(
    c: Characteristic,
    z,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
):
    """特性 (α, β) 付きの種数1テータ関数 ϑ[α;β](z, τ)"""
    return theta_series(c.alpha, c.beta, z, tau, b)


def theta_char_g1_derivative(
    c: Characteristic,
    z,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
    order: int = 1,
):
    """ϑ[α;β] の z についての order 階導関数（項別微分）"""
    if order < 0:
        raise EllipticDomainError(f"微分の階数は非負でなければなりません: {order}")
    return theta_series(c.alpha, c.beta, z, tau, b, order=order)


@lru_cache(maxsize=256)
def _theta1_prime_zero(tau: Tau, b: SeriesBudget) -> complex:
    return theta_char_g1_derivative(THETA1, 0.0, tau, b, order=1)


def prime_form_K(z, tau: Tau, b: SeriesBudget = DEFAULT_BUDGET):
    """種数1のプライム形式 K(z, τ) = ϑ₁(z, τ) / ϑ₁′(0, τ)"""
    require_off_lattice(z, tau)
    return theta_char_g1(THETA1, z, tau, b) / _theta1_prime_zero(tau, b)


def log_prime_form(z, tau: Tau, b: SeriesBudget = DEFAULT_BUDGET):
    """主値の対数 Log K(z, τ)"""
    value = np.log(np.asarray(prime_form_K(z, tau, b), dtype=complex))
    return _as_output(value)


def theta_char_g2(
    alpha: tuple[float, float],
    beta: tuple[float, float],
    Omega,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """
    種数2の特性付きテータ定数 θ^(2)[α;β](Ω)。

    Σ_{n∈ℤ²} exp(iπ(n+α)ᵀΩ(n+α) + 2πi(n+α)·β) を z = 0 で評価する。
    """
    Omega = np.asarray(Omega, dtype=complex)
    if Omega.shape != (2, 2) or not np.allclose(Omega, Omega.T, rtol=0, atol=1e-12):
        raise EllipticDomainError("Ωは2×2の対称行列でなければなりません")
    if np.min(np.linalg.eigvalsh(Omega.imag)) <= 0:
        raise EllipticDomainError("Im Ω が正定値ではありません")
    a = np.asarray(alpha, dtype=float)
    bt = np.asarray(beta, dtype=float)
    cutoff = b.lattice_cutoff
    for _ in range(b.max_doublings + 1):
        n = np.arange(-cutoff, cutoff + 1)
        n1, n2 = np.meshgrid(n, n, indexing="ij")
        nu1 = n1 - np.round(a[0]) + a[0]
        nu2 = n2 - np.round(a[1]) + a[1]
        quad = Omega[0, 0] * nu1**2 + 2 * Omega[0, 1] * nu1 * nu2 + Omega[1, 1] * nu2**2
        terms = np.exp(1j * math.pi * quad + TWO_PI_I * (nu1 * bt[0] + nu2 * bt[1]))
        magnitude = np.abs(terms)
        outer = np.maximum(np.abs(n1), np.abs(n2)) > cutoff // 2
        if magnitude[outer].sum() <= b.rel_tol * magnitude.sum():
            return complex(terms.sum())
        logger.debug(f"Genus-two theta not converged at cutoff {cutoff}, doubling")
        cutoff *= 2
    raise BudgetExhaustedError(
        f"種数2テータ級数が打ち切り {cutoff // 2} までに収束しませんでした"
    )
