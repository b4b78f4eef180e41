import logging

import numpy as np
from scipy.special import gammaln

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, SeriesBudget
from src.elliptic_core.qseries import eisenstein
from src.elliptic_core.weierstrass import weierstrass_P_table
from src.szego_genus1.szego_genus1 import BlockMatrix, SewingConfig

from .determinants import BranchAmbiguityError
from .lu import lu_determinant

logger = logging.getLogger(__name__)

INITIAL_RAY_STEPS = 16
MAX_SUBDIVISION_DEPTH = 24
# 1ステップでの平方根の相対変化の上限
MAX_ROOT_JUMP = 0.25


def _mode_grid(N: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, N + 1)
    return np.meshgrid(k, k, indexing="ij")


def build_R(N: int, sew: SewingConfig, b: SeriesBudget = DEFAULT_BUDGET) -> BlockMatrix:
    """
    ボソンの行列 R_ab(k, l) = −ρ^{(k+l)/2}/√(kl) · [[D(k,l), C(k,l)], [C(k,l), D(l,k)]]。

    C(k,l) = (−1)^{k+1}(k+l−1)!/((k−1)!(l−1)!) E_{k+l}(τ)、D は E を P_{k+l}(τ, w) に置き換えたもの。
    階乗の比は対数で計算する。
    """
    if N < 1:
        raise ValueError(f"打ち切り次数 N は 1 以上でなければなりません: {N}")
    K, L = _mode_grid(N)
    weight = K + L
    combinatorial = np.exp(gammaln(weight) - gammaln(K) - gammaln(L))
    eisenstein_values = np.vectorize(
        lambda n: eisenstein(int(n), sew.tau, b) if n % 2 == 0 else 0j, otypes=[complex]
    )(weight)
    table = weierstrass_P_table(2 * N, sew.w, sew.tau, b)
    p_values = np.vectorize(lambda n: table[int(n)], otypes=[complex])(weight)
    sign_k = (-1.0) ** (K + 1)
    sign_l = (-1.0) ** (L + 1)
    prefactor = -sew.rho_pow(weight / 2) / np.sqrt(K * L)
    C = prefactor * sign_k * combinatorial * eisenstein_values
    D_kl = prefactor * sign_k * combinatorial * p_values
    D_lk = prefactor * sign_l * combinatorial * p_values
    R = np.block([[D_kl, C], [C, D_lk]])
    return BlockMatrix(N, R, sheet=sew.sheet, meta={"kind": "R"})


def det_I_minus_R(N: int, sew: SewingConfig, b: SeriesBudget = DEFAULT_BUDGET) -> complex:
    R = build_R(N, sew, b).entries
    return lu_determinant(np.eye(2 * N) - R)


def det_inv_sqrt_I_minus_R(
    N: int, sew: SewingConfig, b: SeriesBudget = DEFAULT_BUDGET
) -> complex:
    """
    det(1 − R)^{−½}。

    平方根の枝は ρ = 0（値 1）から半直線 sρ, s ∈ [0, 1] に沿って連続に選ぶ。
    R(sρ) の成分は s^{(k+l)/2} 倍になる。
    """
    if sew.rho == 0:
        return 1.0 + 0j
    R = build_R(N, sew, b).entries
    modes = np.concatenate([np.arange(1, N + 1)] * 2)
    exponent = (modes[:, None] + modes[None, :]) / 2
    identity = np.eye(2 * N)

    def root_at(s: float, previous: complex) -> complex:
        candidate = complex(np.sqrt(lu_determinant(identity - R * s**exponent)))
        return candidate if abs(candidate - previous) <= abs(candidate + previous) else -candidate

    def track(s0: float, r0: complex, s1: float, depth: int) -> complex:
        r1 = root_at(s1, r0)
        if abs(r1 - r0) <= MAX_ROOT_JUMP * max(abs(r0), 1e-300):
            return r1
        if depth >= MAX_SUBDIVISION_DEPTH:
            raise BranchAmbiguityError(
                f"det(1 − R) の平方根を s ∈ [{s0}, {s1}] で追跡できませんでした"
            )
        middle = 0.5 * (s0 + s1)
        return track(middle, track(s0, r0, middle, depth + 1), s1, depth + 1)

    root = 1.0 + 0j
    grid = np.linspace(0.0, 1.0, INITIAL_RAY_STEPS + 1)
    for s0, s1 in zip(grid[:-1], grid[1:]):
        root = track(float(s0), root, float(s1), 0)
    logger.debug(f"det(1-R)^(1/2) continued along the ray to {root}")
    return 1 / root
