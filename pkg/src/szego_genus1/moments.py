import logging
from functools import lru_cache
from typing import Literal

import numpy as np

from src.elliptic_core.elliptic_core import (
    DEFAULT_BUDGET,
    SeriesBudget,
    distance_to_lattice,
)

from .kernel import external_factor, local_factor, regular_q_kernel
from .szego_genus1 import (
    AnnulusError,
    SewingConfig,
    TwistConfig,
    UnderResolutionError,
    bar,
)

logger = logging.getLogger(__name__)

# 同じ穴の上で y の円を x の円より小さくする倍率
SAME_PUNCTURE_SHRINK = 0.8
# 外部点までの距離に対する求積円の半径の倍率
EXTERNAL_POINT_FACTOR = 0.7


def require_resolution(N: int, quad_M: int) -> None:
    if quad_M < 2 * (N + 4):
        raise UnderResolutionError(
            f"求積点数 {quad_M} が打ち切り N={N} に対して不足しています（2(N+4) 以上が必要）"
        )


def _circle(radius: float, quad_M: int) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(quad_M) / quad_M)


@lru_cache(maxsize=64)
def _moment_grid(
    a: int,
    b_: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget,
) -> tuple[np.ndarray, float, float]:
    x_side = bar(a)
    r_x = sew.radius(x_side)
    r_y = sew.radius(b_) * (SAME_PUNCTURE_SHRINK if x_side == b_ else 1.0)
    x = _circle(r_x, quad_M)
    y = _circle(r_y, quad_M)
    samples = (
        local_factor(x_side, x, sew, tw, b)[:, None]
        / local_factor(b_, y, sew, tw, b)[None, :]
        * regular_q_kernel(
            (sew.puncture(x_side) + x)[:, None] - (sew.puncture(b_) + y)[None, :],
            sew,
            tw,
            b,
        )
    )
    logger.debug(f"Moment grid C_{a}{b_} sampled on {quad_M}x{quad_M} points")
    return np.fft.fft2(samples) / quad_M**2, r_x, r_y


def moment_block(
    a: int,
    b_: int,
    N: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> np.ndarray:
    """
    モーメント行列のブロック C_ab(k, l)（1 ≤ k, l ≤ N）。

    Φ_ā(x)Φ_b(y)⁻¹Q(x − y) の x_ā^{k−1} y_b^{l−1} の係数を二重台形則（2次元FFT）で求める。
    """
    require_resolution(N, quad_M)
    sew.require_sewable()
    grid, r_x, r_y = _moment_grid(a, b_, sew, tw, quad_M, b)
    powers = np.arange(N)
    return grid[:N, :N] / np.outer(r_x**powers, r_y**powers)


def moment_C(
    a: int,
    b_: int,
    k: int,
    l: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """ブロックモーメント行列の成分 C_ab(k, l)"""
    if k < 1 or l < 1:
        raise ValueError(f"k, l は 1 以上でなければなりません: k={k}, l={l}")
    return complex(moment_block(a, b_, max(k, l), sew, tw, quad_M, b)[k - 1, l - 1])


def _contour_radius(point: complex, side: int, sew: SewingConfig) -> float:
    gap = float(distance_to_lattice(point - sew.puncture(side), sew.tau))
    radius = min(sew.radius(side), EXTERNAL_POINT_FACTOR * gap)
    if radius <= 0:
        raise AnnulusError(f"評価点が穴 {side} の上にあります")
    return radius


def regular_row(
    x: complex,
    N: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> np.ndarray:
    """ê_(a,k)(x): Φ_a(y)⁻¹Q(x − y) の y_a^{k−1} の係数を (a, k) の順に並べたもの。"""
    require_resolution(N, quad_M)
    rows = []
    for side in (1, 2):
        radius = _contour_radius(x, side, sew)
        y = _circle(radius, quad_M)
        samples = regular_q_kernel(x - sew.puncture(side) - y, sew, tw, b) / local_factor(
            side, y, sew, tw, b
        )
        rows.append(np.fft.fft(samples)[:N] / (quad_M * radius ** np.arange(N)))
    return np.concatenate(rows)


def regular_column(
    y: complex,
    N: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> np.ndarray:
    """ē_(a,k)(y): Φ_ā(x)Q(x − y) の x_ā^{k−1} の係数を (a, k) の順に並べたもの。"""
    require_resolution(N, quad_M)
    columns = []
    for a in (1, 2):
        side = bar(a)
        radius = _contour_radius(y, side, sew)
        x = _circle(radius, quad_M)
        samples = local_factor(side, x, sew, tw, b) * regular_q_kernel(
            sew.puncture(side) + x - y, sew, tw, b
        )
        columns.append(np.fft.fft(samples)[:N] / (quad_M * radius ** np.arange(N)))
    return np.concatenate(columns)


def half_diff(
    side: Literal["d", "dbar"],
    a: int,
    point: complex,
    k: int,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """
    半次微分 d_a(x, k) または d̄_a(y, k)。

    d_a(x, k) = (2πi)⁻¹∮ y_a^{−k_a} S_κ(x, y_a) dy_a、
    d̄_a(y, k) = (2πi)⁻¹∮ x_ā^{−k_a} S_κ(x_ā, y) dx_ā。外部点の κ 乗は主値。
    """
    if side == "d":
        regular = regular_row(point, k, sew, tw, quad_M, b)
        return complex(external_factor(point, sew, tw, b) * regular[(a - 1) * k + k - 1])
    if side == "dbar":
        regular = regular_column(point, k, sew, tw, quad_M, b)
        return complex(regular[(a - 1) * k + k - 1] / external_factor(point, sew, tw, b))
    raise ValueError(f"不明な種類です: {side}")
