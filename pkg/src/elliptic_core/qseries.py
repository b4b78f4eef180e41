import logging
from functools import lru_cache

import mpmath
import numpy as np

from .elliptic_core import (
    DEFAULT_BUDGET,
    TWO_PI_I,
    BudgetExhaustedError,
    EllipticDomainError,
    SeriesBudget,
    Tau,
)

logger = logging.getLogger(__name__)

# 中間計算の精度（結果は倍精度で返す）
WORKING_DPS = 30


@lru_cache(maxsize=256)
def dedekind_eta(tau: Tau, b: SeriesBudget = DEFAULT_BUDGET) -> complex:
    """デデキントのイータ関数 η(τ) = q^{1/24} Π_{n≥1} (1 − qⁿ)"""
    q = tau.q
    cutoff = b.qseries_cutoff
    for _ in range(b.max_doublings + 1):
        if abs(q) ** (cutoff + 1) <= b.rel_tol:
            n = np.arange(1, cutoff + 1)
            product = np.prod(1 - q**n)
            return complex(np.exp(TWO_PI_I * tau.value / 24) * product)
        logger.debug(f"Eta product needs more than {cutoff} factors, doubling")
        cutoff *= 2
    raise BudgetExhaustedError(f"η の積が {cutoff // 2} 項までに収束しませんでした")


@lru_cache(maxsize=1024)
def eisenstein(k: int, tau: Tau, b: SeriesBudget = DEFAULT_BUDGET) -> complex:
    """
    アイゼンシュタイン級数 E_k(τ)。

    正規化は P₂(z) = 1/z² + Σ_{k≥2} (k−1) E_k z^{k−2} となるもの:
    E_k = −B_k/k! + (2/(k−1)!) Σ_{m≥1} m^{k−1} q^m / (1 − q^m)
    """
    if k < 2 or k % 2:
        raise EllipticDomainError(f"E_k は偶数 k ≥ 2 に対してのみ定義されます: k={k}")
    with mpmath.workdps(WORKING_DPS):
        q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau.value))
        constant = -mpmath.bernoulli(k) / mpmath.factorial(k)
        weight = 2 / mpmath.factorial(k - 1)
        total = mpmath.mpc(0)
        m = 0
        cutoff = b.qseries_cutoff
        for _ in range(b.max_doublings + 1):
            while m < cutoff:
                m += 1
                qm = q**m
                term = mpmath.mpf(m) ** (k - 1) * qm / (1 - qm)
                total += term
            value = constant + weight * total
            if abs(weight * term) <= b.rel_tol * max(abs(value), mpmath.mpf(b.rel_tol)):
                return complex(value)
            logger.debug(f"Eisenstein E_{k} needs more than {cutoff} terms, doubling")
            cutoff *= 2
    raise BudgetExhaustedError(f"E_{k} の q 級数が収束しませんでした")
