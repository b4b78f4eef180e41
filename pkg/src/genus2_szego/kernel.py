import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, SeriesBudget
from src.szego_genus1.kernel import cross_ratio_power, regular_q_kernel, s_kappa
from src.szego_genus1.moments import regular_column, regular_row
from src.szego_genus1.szego_genus1 import (
    AnnulusError,
    BlockMatrix,
    SewingConfig,
    TwistConfig,
)
from src.szego_genus1.transfer import build_T, rho_weights, theta2_signs

from .genus2_szego import KernelEval, KernelSolveError, SewingDomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SewnKernel:
    """
    一つの (sew, tw, N, quad_M) に対する T と I − T のLU分解。

    S^(2)(x, y) = E(x, y)[Q(x − y) + ξ ê(x) P D (I − T)⁻¹ P ē(y)] を評価する。
    E は比全体の κ 乗の主値。
    """

    sew: SewingConfig
    tw: TwistConfig
    N: int
    quad_M: int
    budget: SeriesBudget
    T: BlockMatrix
    factorization: tuple[np.ndarray, np.ndarray]

    @property
    def weights(self) -> np.ndarray:
        return rho_weights(self.N, self.sew, self.tw)

    @property
    def signs(self) -> np.ndarray:
        return theta2_signs(self.N, self.tw)

    def h_row(self, x: complex) -> np.ndarray:
        """外部因子を除いた h(x) = ê(x) P"""
        return regular_row(x, self.N, self.sew, self.tw, self.quad_M, self.budget) * self.weights

    def hbar_column(self, y: complex) -> np.ndarray:
        """外部因子を除いた h̄(y) = P ē(y)"""
        return self.weights * regular_column(
            y, self.N, self.sew, self.tw, self.quad_M, self.budget
        )

    def correction(self, x: complex, y: complex) -> complex:
        solved = scipy.linalg.lu_solve(self.factorization, self.hbar_column(y))
        return complex(self.tw.xi * (self.h_row(x) * self.signs) @ solved)

    def bracket(self, x: complex, y: complex) -> complex:
        """S^(2)(x, y) / E(x, y)"""
        return complex(regular_q_kernel(x - y, self.sew, self.tw, self.budget)) + self.correction(
            x, y
        )

    def evaluate(self, x: complex, y: complex) -> complex:
        return complex(s_kappa(x, y, self.sew, self.tw, self.budget)) + complex(
            cross_ratio_power(x, y, self.sew, self.tw, self.budget)
        ) * self.correction(x, y)


@lru_cache(maxsize=32)
def sewn_kernel(
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> SewnKernel:
    try:
        T = build_T(N, sew, tw, quad_M, b)
    except AnnulusError as e:
        raise SewingDomainError(f"縫合点が定義域の外です: {e}") from e
    lu, piv = scipy.linalg.lu_factor(np.eye(2 * N) - T.entries)
    if np.min(np.abs(np.diag(lu))) == 0:
        raise KernelSolveError("I − T が特異です")
    logger.debug(f"Factorized I - T for N={N}, quad_M={quad_M}")
    return SewnKernel(sew, tw, N, quad_M, b, T, (lu, piv))


def _require_outside_disks(point: complex, sew: SewingConfig) -> None:
    for a in (1, 2):
        excised = abs(sew.rho) / sew.radius(3 - a)
        if abs(point - sew.puncture(a)) <= excised:
            raise SewingDomainError(
                f"評価点 {point} が穴 {a} の除去円板（半径 {excised:.3e}）の中にあります"
            )


def s2_eval(
    x: complex,
    y: complex,
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> KernelEval:
    """
    種数2のセゲー核 S^(2)(x, y) = S_κ(x, y) + ξ h(x) D^{θ₂} (I − T)⁻¹ h̄ᵀ(y)。

    逆行列は作らずLU分解で解く。N = 0 では補正項がなく S_κ に一致する。
    """
    for point in (x, y):
        _require_outside_disks(point, sew)
    if N == 0:
        value = complex(s_kappa(x, y, sew, tw, b))
    else:
        value = sewn_kernel(sew, tw, N, quad_M, b).evaluate(x, y)
    return KernelEval(value, N, quad_M, sew.sheet, tw.B)
