import logging

import numpy as np

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, SeriesBudget

from .moments import moment_block
from .szego_genus1 import BlockMatrix, SewingConfig, TwistConfig

logger = logging.getLogger(__name__)


def shifted_modes(N: int, tw: TwistConfig) -> np.ndarray:
    """(a, k) の順に並べた k_a = k + κ(−1)^{ā}"""
    k = np.arange(1, N + 1)
    return np.concatenate([tw.shifted_mode(1, k), tw.shifted_mode(2, k)])


def rho_weights(N: int, sew: SewingConfig, tw: TwistConfig) -> np.ndarray:
    """対角因子 ρ^{½(k_a − ½)}"""
    return sew.rho_pow(0.5 * (shifted_modes(N, tw) - 0.5))


def theta2_signs(N: int, tw: TwistConfig) -> np.ndarray:
    """D^{θ₂} = diag(θ₂⁻¹, −θ₂) の対角成分"""
    return np.concatenate([np.full(N, 1 / tw.theta2), np.full(N, -tw.theta2)])


def moment_matrix(
    N: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> np.ndarray:
    """2N×2N のモーメント行列 C"""
    return np.block(
        [
            [moment_block(a, b_, N, sew, tw, quad_M, b) for b_ in (1, 2)]
            for a in (1, 2)
        ]
    )


def build_T(
    N: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> BlockMatrix:
    """T = ξ G D^{θ₂}, G_ab(k, l) = ρ^{½(k_a + l_b − 1)} C_ab(k, l) の 2N×2N 切断"""
    if N < 1:
        raise ValueError(f"打ち切り次数 N は 1 以上でなければなりません: {N}")
    weights = rho_weights(N, sew, tw)
    G = weights[:, None] * moment_matrix(N, sew, tw, quad_M, b) * weights[None, :]
    T = tw.xi * G * theta2_signs(N, tw)[None, :]
    logger.debug(f"Built T with N={N}, quad_M={quad_M}, sheet={sew.sheet}, B={tw.B}")
    return BlockMatrix(N, T, sheet=sew.sheet, B=tw.B, meta={"quad_M": quad_M})
