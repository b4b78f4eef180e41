from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, Field, field_validator


class PartitionError(Exception):
    """分配関数・相関関数の評価中に発生したエラーの基底クラス。"""

    pass


class ChargeBalanceError(PartitionError):
    """挿入の電荷の和が零でない場合のエラー。"""

    pass


class CoincidentInsertionError(PartitionError):
    """挿入点が格子を法として一致している場合のエラー。"""

    pass


class FockBalanceError(PartitionError):
    """フォックラベルの組で s₁ + s₂ ≠ t₁ + t₂ となる場合のエラー。"""

    pass


class WeightCutoffError(PartitionError):
    """重みの打ち切りやモードが上限を超えた場合のエラー。"""

    pass


class PeriodMatrixError(PartitionError):
    """周期行列 Ω が不正な場合のエラー。"""

    pass


class ChargeMode(str, Enum):
    """電荷の和が零でないときの扱い"""

    STRICT = "strict"
    LENIENT = "lenient"


class FockLabel(BaseModel):
    """フォックベクトル Ψ(𝐤, 𝐥) のモード列"""

    model_config = {"frozen": True}

    k_list: tuple[int, ...] = Field(default=(), description="ψ⁺ のモード（狭義単調増加）")
    l_list: tuple[int, ...] = Field(default=(), description="ψ⁻ のモード（狭義単調増加）")

    @field_validator("k_list", "l_list")
    @classmethod
    def _strictly_increasing(cls, modes: tuple[int, ...]) -> tuple[int, ...]:
        if any(m < 1 for m in modes):
            raise ValueError(f"モードは正の整数でなければなりません: {modes}")
        if any(a >= b for a, b in zip(modes, modes[1:])):
            raise ValueError(f"モードは狭義単調増加でなければなりません: {modes}")
        return modes

    @property
    def s(self) -> int:
        return len(self.k_list)

    @property
    def t(self) -> int:
        return len(self.l_list)

    @property
    def weight(self) -> float:
        """wt = Σ(k_i − ½) + Σ(l_j − ½)"""
        return sum(self.k_list) + sum(self.l_list) - 0.5 * (self.s + self.t)

    def twisted_weight(self, kappa: float) -> float:
        """wt + κ(s − t) + ½κ²"""
        return self.weight + kappa * (self.s - self.t) + 0.5 * kappa**2

    def max_mode(self) -> int:
        return max(self.k_list + self.l_list, default=0)


@dataclass(frozen=True)
class InsertionList:
    """頂点作用素の挿入 (β_i, z_i)"""

    charges: tuple[complex, ...]
    positions: tuple[complex, ...]

    def __post_init__(self):
        if len(self.charges) != len(self.positions):
            raise ValueError("電荷と位置の個数が一致しません")

    @classmethod
    def of(cls, *pairs: tuple[complex, complex]) -> "InsertionList":
        return cls(
            tuple(complex(beta) for beta, _ in pairs),
            tuple(complex(z) for _, z in pairs),
        )

    @property
    def total_charge(self) -> complex:
        return sum(self.charges, 0j)
