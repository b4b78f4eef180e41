import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.elliptic_core.elliptic_core import (
    TWO_PI_I,
    Characteristic,
    Tau,
    lattice_minimum,
    lattice_points_within,
    nearest_lattice_point,
)

Label = Literal[1, 2]

# 既定の求積半径は min(|w − λ*|, D(q)) のこの倍率
DEFAULT_RADIUS_FACTOR = 0.45


class SzegoError(Exception):
    """種数1のセゲー核の評価中に発生したエラーの基底クラス。"""

    pass


class CoincidentPointsError(SzegoError):
    """x と y が一致している（近すぎる）場合のエラー。"""

    pass


class PunctureProximityError(SzegoError):
    """評価点が穴 0 または w に近すぎる場合のエラー。"""

    pass


class AnnulusError(SzegoError):
    """局所座標が円環の外にある、または縫合の条件を満たさない場合のエラー。"""

    pass


class UnderResolutionError(SzegoError):
    """求積点数が打ち切り次数に対して不足している場合のエラー。"""

    pass


def bar(a: int) -> int:
    """ラベルの対合 1̄ = 2, 2̄ = 1"""
    return 3 - a


class TwistConfig(BaseModel):
    """ねじれのパラメータ (α₁, β₁, β₂, κ) と二重被覆の枝 B"""

    model_config = {"frozen": True}

    alpha1: float = Field(description="a₁ サイクルの特性 α₁")
    beta1: float = Field(description="b₁ サイクルの特性 β₁")
    beta2: float = Field(description="縫合サイクルの特性 β₂")
    kappa: float = Field(gt=-0.5, lt=0.5, description="ねじれ κ ∈ (−½, ½)")
    B: int = Field(default=1, description="二重被覆の枝を選ぶ奇数 B")

    @field_validator("B")
    @classmethod
    def _odd_branch(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"B は奇数でなければなりません: {value}")
        return value

    @property
    def theta1(self) -> complex:
        return complex(-np.exp(-TWO_PI_I * self.beta1))

    @property
    def phi1(self) -> complex:
        return complex(-np.exp(TWO_PI_I * self.alpha1))

    @property
    def theta2(self) -> complex:
        return complex(-np.exp(-TWO_PI_I * self.beta2))

    @property
    def phi2(self) -> complex:
        return complex(-np.exp(TWO_PI_I * self.kappa))

    @property
    def xi(self) -> complex:
        """ξ = e^{iπB/2} ∈ {±i}"""
        return complex(np.exp(0.5j * math.pi * self.B))

    @property
    def characteristic(self) -> Characteristic:
        return Characteristic(self.alpha1, self.beta1)

    def shifted_mode(self, a: int, k):
        """k_a = k + κ(−1)^{ā}"""
        return k + self.kappa if a == 1 else k - self.kappa


class BlockIndex(NamedTuple):
    """ブロック行列の添字 (a, k)"""

    a: int
    k: int

    def shifted(self, tw: TwistConfig) -> float:
        return tw.shifted_mode(self.a, self.k)


@dataclass(frozen=True)
class SewingConfig:
    """
    縫合点 (τ, w, ρ) と求積半径 r₁, r₂。

    sheet は ρ の冪 ρ^x = exp(x(Log ρ + 2πi·sheet)) の葉を指定する。
    𝒟^ρ に属するかどうかは生成時には検査せず、require_sewable で確認する。
    """

    tau: Tau
    w: complex
    rho: complex
    r1: float
    r2: float
    sheet: int = 0

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "rho", complex(self.rho))
        if not all(math.isfinite(r) and r >= 0 for r in (self.r1, self.r2)):
            raise AnnulusError(f"求積半径が不正です: r1={self.r1}, r2={self.r2}")

    @classmethod
    def at(
        cls,
        tau: Tau | complex,
        w: complex,
        rho: complex,
        sheet: int = 0,
        r1: float | None = None,
        r2: float | None = None,
    ) -> "SewingConfig":
        """既定の半径 0.45·min(|w − λ*|, D(q)) で縫合点を作る。"""
        tau = tau if isinstance(tau, Tau) else Tau(tau)
        w = complex(w)
        reach = min(
            abs(w - nearest_lattice_point(w, tau)),
            lattice_minimum(tau),
        )
        default = DEFAULT_RADIUS_FACTOR * reach
        return cls(
            tau,
            w,
            complex(rho),
            default if r1 is None else r1,
            default if r2 is None else r2,
            sheet,
        )

    def with_rho(self, rho: complex) -> "SewingConfig":
        return SewingConfig(self.tau, self.w, complex(rho), self.r1, self.r2, self.sheet)

    def with_sheet(self, sheet: int) -> "SewingConfig":
        return SewingConfig(self.tau, self.w, self.rho, self.r1, self.r2, sheet)

    @property
    def log_rho(self) -> complex:
        """L_ρ = Log ρ + 2πi·sheet"""
        return complex(np.log(self.rho)) + TWO_PI_I * self.sheet

    def rho_pow(self, x):
        """記録された葉での ρ^x"""
        return np.exp(np.asarray(x) * self.log_rho)

    def puncture(self, a: int) -> complex:
        return 0j if a == 1 else self.w

    def radius(self, a: int) -> float:
        return self.r1 if a == 1 else self.r2

    def domain_margin(self) -> tuple[float, complex]:
        """min_λ |w − λ| − 2|ρ|^{½} と、それを与える格子点 λ を返す。"""
        reach = 2 * math.sqrt(abs(self.rho))
        candidates = lattice_points_within(
            self.w, self.tau, reach + lattice_minimum(self.tau)
        ) or [nearest_lattice_point(self.w, self.tau)]
        worst = min(candidates, key=lambda lam: abs(self.w - lam))
        return abs(self.w - worst) - reach, worst

    def require_sewable(self) -> None:
        """(τ, w, ρ) ∈ 𝒟^ρ と円環の条件を確認する。"""
        margin, worst = self.domain_margin()
        if self.rho == 0 or margin <= 0:
            raise AnnulusError(
                f"縫合点が 𝒟^ρ にありません: ρ={self.rho}, 最悪の格子点 λ={worst}"
            )
        if min(self.r1, self.r2) <= 0:
            raise AnnulusError("求積半径は正でなければなりません")
        if abs(self.rho) > self.r1 * self.r2:
            raise AnnulusError(
                f"|ρ| = {abs(self.rho):.3e} が r₁r₂ = {self.r1 * self.r2:.3e} を超えています"
            )
        half_min = 0.5 * lattice_minimum(self.tau)
        if max(self.r1, self.r2) >= half_min:
            raise AnnulusError(f"求積半径が ½D(q) = {half_min:.3e} 以上です")
        if self.r1 + self.r2 >= abs(self.w - worst):
            raise AnnulusError("0 と w の円環が交わっています")


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """
    (a, k) で添字付けられた 2N×2N 行列。

    並びは (a=1, k=1..N) の後に (a=2, k=1..N)。sheet と B は枝の記録。
    """

    order: int
    entries: np.ndarray
    sheet: int = 0
    B: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.entries.shape != (2 * self.order, 2 * self.order):
            raise ValueError(
                f"行列の形 {self.entries.shape} が次数 {self.order} と合いません"
            )
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("行列に有限でない成分があります")

    def flat_index(self, index: BlockIndex) -> int:
        return (index.a - 1) * self.order + index.k - 1

    def __getitem__(self, key: tuple[BlockIndex, BlockIndex]) -> complex:
        row, col = key
        return complex(self.entries[self.flat_index(row), self.flat_index(col)])

    def block(self, a: int, b: int) -> np.ndarray:
        N = self.order
        return self.entries[(a - 1) * N : a * N, (b - 1) * N : b * N]
