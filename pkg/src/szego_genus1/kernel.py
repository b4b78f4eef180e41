import logging
import math

import numpy as np

from src.elliptic_core.elliptic_core import (
    DEFAULT_BUDGET,
    THETA1,
    TWO_PI_I,
    DegenerateCharacteristicError,
    SeriesBudget,
    distance_to_lattice,
    lattice_minimum,
)
from src.elliptic_core.theta import (
    log_prime_form,
    prime_form_K,
    theta_char_g1,
    theta_series,
)
from src.elliptic_core.weierstrass import DEGENERATE_THETA_TOL

from .szego_genus1 import (
    AnnulusError,
    CoincidentPointsError,
    PunctureProximityError,
    SewingConfig,
    TwistConfig,
    bar,
)

logger = logging.getLogger(__name__)

# 局所因子 Φ_c を 0 から動径方向に解析接続するときの分割数
RADIAL_STEPS = 32


def _scalar_or_array(value):
    value = np.asarray(value)
    return value if value.ndim else complex(value)


def _require_apart(x, y, sew: SewingConfig) -> None:
    scale = lattice_minimum(sew.tau)
    if np.min(np.atleast_1d(distance_to_lattice(np.asarray(x) - np.asarray(y), sew.tau))) < 1e-8 * scale:
        raise CoincidentPointsError("x と y が一致しています")
    for point in (x, y):
        for puncture in (0j, sew.w):
            gap = np.min(np.atleast_1d(distance_to_lattice(np.asarray(point) - puncture, sew.tau)))
            if gap < 1e-10 * scale:
                raise PunctureProximityError(f"評価点が穴 {puncture} に近すぎます")


def twist_theta_at_kappa_w(sew: SewingConfig, tw: TwistConfig, b: SeriesBudget) -> complex:
    """ϑ[α₁;β₁](κw)。零に近ければ退化エラー。"""
    value = theta_char_g1(tw.characteristic, tw.kappa * sew.w, sew.tau, b)
    if abs(value) < DEGENERATE_THETA_TOL:
        raise DegenerateCharacteristicError(
            f"ϑ[α₁;β₁](κw) がほぼ零です: {abs(value):.3e}"
        )
    return value


def regular_q_kernel(z, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET):
    """Q(z) = ϑ[α₁;β₁](z + κw) / (ϑ[α₁;β₁](κw) K(z))"""
    numerator = theta_series(
        tw.alpha1, tw.beta1, np.asarray(z) + tw.kappa * sew.w, sew.tau, b
    )
    return numerator / (twist_theta_at_kappa_w(sew, tw, b) * prime_form_K(z, sew.tau, b))


def theta_ratio(x, sew: SewingConfig, b: SeriesBudget = DEFAULT_BUDGET):
    """ϑ₁(x − w) / ϑ₁(x)"""
    x = np.asarray(x, dtype=complex)
    return theta_char_g1(THETA1, x - sew.w, sew.tau, b) / theta_char_g1(
        THETA1, x, sew.tau, b
    )


def external_factor(x, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET):
    """主値の (ϑ₁(x − w)/ϑ₁(x))^κ"""
    return _scalar_or_array(np.exp(tw.kappa * np.log(theta_ratio(x, sew, b))))


def cross_ratio_power(x, y, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET):
    """主値の (ϑ₁(x−w)ϑ₁(y) / ϑ₁(x)ϑ₁(y−w))^κ"""
    ratio = theta_ratio(x, sew, b) / theta_ratio(y, sew, b)
    return _scalar_or_array(np.exp(tw.kappa * np.log(ratio)))


def s_kappa(x, y, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET):
    """
    ねじれ核 S_κ(x, y) の座標値。

    (ϑ₁(x−w)ϑ₁(y)/ϑ₁(x)ϑ₁(y−w))^κ · ϑ[α₁;β₁](x−y+κw) / (ϑ[α₁;β₁](κw) K(x−y))。
    κ 乗は比全体の主値。x を 2πi ずらすと −e^{2πiα₁} 倍になる。
    """
    _require_apart(x, y, sew)
    z = np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex)
    return _scalar_or_array(
        cross_ratio_power(x, y, sew, tw, b) * regular_q_kernel(z, sew, tw, b)
    )


def _anchor_log(c: int, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget) -> complex:
    log_k = complex(log_prime_form(sew.w, sew.tau, b))
    if c == 1:
        # g₁(0) = −K(w) の対数の枝は B で決める
        return log_k - 1j * math.pi * tw.B
    return -log_k


def _local_g(c: int, u: np.ndarray, sew: SewingConfig, b: SeriesBudget) -> np.ndarray:
    theta1_u = theta_char_g1(THETA1, u, sew.tau, b)
    if c == 1:
        return u * theta_char_g1(THETA1, u - sew.w, sew.tau, b) / theta1_u
    return theta1_u / (u * theta_char_g1(THETA1, u + sew.w, sew.tau, b))


def local_factor(
    c: int,
    coord,
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget = DEFAULT_BUDGET,
):
    """
    穴 c での正則因子 Φ_c(x_c)。

    Φ₁(x) = (x ϑ₁(x−w)/ϑ₁(x))^κ, Φ₂(x) = (ϑ₁(x)/(x ϑ₁(x+w)))^κ を
    Φ₁(0) = exp(κ(Log K(w) − iπB)), Φ₂(0) = exp(−κ Log K(w)) から動径方向に接続する。
    """
    coord = np.asarray(coord, dtype=complex)
    anchor = _anchor_log(c, sew, tw, b)
    at_origin = coord == 0
    safe = np.where(at_origin, 1.0, coord)
    steps = np.arange(1, RADIAL_STEPS + 1) / RADIAL_STEPS
    g = _local_g(c, safe[..., None] * steps, sew, b)
    g0 = np.exp(anchor)
    previous = np.concatenate([np.broadcast_to(g0, g.shape[:-1] + (1,)), g[..., :-1]], axis=-1)
    log_g = anchor + np.log(g / previous).sum(axis=-1)
    log_g = np.where(at_origin, anchor, log_g)
    return _scalar_or_array(np.exp(tw.kappa * log_g))


def s_kappa_regular(
    x_coord,
    y_coord,
    a_side: int,
    b_side: int,
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget = DEFAULT_BUDGET,
):
    """
    正則化された核 S̃ = Φ_ā(x_ā) Φ_b(y_b)⁻¹ Q(x − y)。

    x_coord は穴 ā、y_coord は穴 b での局所座標。円周上で一価になる。
    """
    x_side = bar(a_side)
    x_coord = np.asarray(x_coord, dtype=complex)
    y_coord = np.asarray(y_coord, dtype=complex)
    for coord, side in ((x_coord, x_side), (y_coord, b_side)):
        if np.max(np.abs(coord), initial=0.0) > sew.radius(side) * (1 + 1e-9):
            raise AnnulusError(
                f"局所座標が穴 {side} の半径 {sew.radius(side):.3e} の外にあります"
            )
    x = sew.puncture(x_side) + x_coord
    y = sew.puncture(b_side) + y_coord
    value = (
        local_factor(x_side, x_coord, sew, tw, b)
        / local_factor(b_side, y_coord, sew, tw, b)
        * regular_q_kernel(x - y, sew, tw, b)
    )
    return _scalar_or_array(value)
