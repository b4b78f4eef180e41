import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi


class EllipticCoreError(Exception):
    """楕円関数の評価中に発生したエラーの基底クラス。"""

    pass


class EllipticDomainError(EllipticCoreError):
    """入力が関数の定義域の外にある場合のエラー。"""

    pass


class BudgetExhaustedError(EllipticCoreError):
    """最大の打ち切りまで広げても級数が収束しなかった場合のエラー。"""

    pass


class LatticeProximityError(EllipticCoreError):
    """評価点が周期格子の点に近すぎる場合のエラー。"""

    pass


class DegenerateCharacteristicError(EllipticCoreError):
    """特性付きテータ関数が原点でほぼ零となる場合のエラー。"""

    pass


class UndefinedKernelError(EllipticCoreError):
    """乗数 (θ, φ) = (1, 1) のためにねじれカーネルが定義されない場合のエラー。"""

    pass


@dataclass(frozen=True)
class Tau:
    """上半平面のモジュラス τ"""

    value: complex

    def __post_init__(self):
        value = complex(self.value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise EllipticDomainError(f"τが有限ではありません: {value}")
        if value.imag <= 0:
            raise EllipticDomainError(f"τは上半平面になければなりません: {value}")
        object.__setattr__(self, "value", value)

    @property
    def q(self) -> complex:
        """ノーム q = e^{2πiτ}"""
        return complex(np.exp(TWO_PI_I * self.value))


@dataclass(frozen=True)
class Characteristic:
    """テータ関数の実特性 (α, β)"""

    alpha: float
    beta: float


THETA1 = Characteristic(0.5, 0.5)


class SeriesBudget(BaseModel):
    """級数の打ち切りと許容誤差の設定"""

    model_config = {"frozen": True}

    lattice_cutoff: int = Field(
        default=8, ge=4, description="テータ級数の格子和の打ち切り |n| ≤ cutoff"
    )
    qseries_cutoff: int = Field(default=64, ge=4, description="q級数の項数")
    rel_tol: float = Field(default=1e-14, gt=0.0, lt=1.0, description="相対許容誤差")
    max_doublings: int = Field(
        default=4, ge=0, le=8, description="打ち切りを倍にする最大回数"
    )


DEFAULT_BUDGET = SeriesBudget()


def lattice_coordinates(z, tau: Tau) -> tuple[np.ndarray, np.ndarray]:
    """z = 2πi(mτ + n) となる実座標 (m, n) を返す。"""
    u = np.asarray(z, dtype=complex) / TWO_PI_I
    m = u.imag / tau.value.imag
    n = u.real - m * tau.value.real
    return m, n


def nearest_lattice_point(z, tau: Tau):
    """格子 2πi(ℤτ ⊕ ℤ) の中で z に最も近い点を返す。"""
    z_arr = np.asarray(z, dtype=complex)
    m0, _ = lattice_coordinates(z_arr, tau)
    best = np.full(z_arr.shape, np.nan + 0j)
    best_dist = np.full(z_arr.shape, np.inf)
    for dm in (-1, 0, 1):
        m = np.round(m0) + dm
        n0 = (z_arr / TWO_PI_I).real - m * tau.value.real
        for dn in (-1, 0, 1):
            n = np.round(n0) + dn
            lam = TWO_PI_I * (m * tau.value + n)
            dist = np.abs(z_arr - lam)
            closer = dist < best_dist
            best = np.where(closer, lam, best)
            best_dist = np.where(closer, dist, best_dist)
    return best if best.ndim else complex(best)


def distance_to_lattice(z, tau: Tau):
    z_arr = np.asarray(z, dtype=complex)
    dist = np.abs(z_arr - nearest_lattice_point(z_arr, tau))
    return dist if dist.ndim else float(dist)


def lattice_minimum(tau: Tau) -> float:
    """格子の最短の非零ベクトルの長さ D(q) を返す。"""
    best = 2 * math.pi
    m = 1
    while 2 * math.pi * m * tau.value.imag < best:
        n_star = round(-m * tau.value.real)
        for n in (n_star - 1, n_star, n_star + 1):
            best = min(best, 2 * math.pi * abs(m * tau.value + n))
        m += 1
    return best


def lattice_points_within(z: complex, tau: Tau, radius: float) -> list[complex]:
    """|z − λ| ≤ radius を満たす格子点 λ をすべて列挙する。"""
    m0, _ = lattice_coordinates(z, tau)
    m_span = int(math.ceil(radius / (2 * math.pi * tau.value.imag))) + 1
    n_span = int(math.ceil(radius / (2 * math.pi))) + 1
    points = []
    for m in range(int(round(float(m0))) - m_span, int(round(float(m0))) + m_span + 1):
        n0 = (z / TWO_PI_I).real - m * tau.value.real
        for n in range(int(round(n0)) - n_span, int(round(n0)) + n_span + 1):
            lam = TWO_PI_I * (m * tau.value + n)
            if abs(z - lam) <= radius:
                points.append(complex(lam))
    return points


def require_off_lattice(z, tau: Tau, rel_tol: float = 1e-10) -> None:
    """z が格子点から rel_tol·D(q) 以上離れていることを確認する。"""
    dist = np.min(np.atleast_1d(distance_to_lattice(z, tau)))
    if dist < rel_tol * lattice_minimum(tau):
        raise LatticeProximityError(f"評価点が格子点に近すぎます: 距離 {dist:.3e}")
