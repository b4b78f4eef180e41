from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DeterminantError(Exception):
    """行列式の計算中に発生したエラーの基底クラス。"""

    pass


class SpectralRadiusError(DeterminantError):
    """トレース対数法でスペクトル半径が 1 以上となった場合のエラー。"""

    pass


class BranchAmbiguityError(DeterminantError):
    """平方根の枝を経路に沿って追跡できなかった場合のエラー。"""

    pass


class MinorExpansionLimitError(DeterminantError):
    """小行列式展開の次元が上限を超えた場合のエラー。"""

    pass


class DeterminantMethodKey(str, Enum):
    """det(I − M) の計算方法"""

    TRACE_LOG = "trace_log"
    LU = "lu"


@dataclass(frozen=True)
class DetResult:
    """det(I − M) の値と誤差の見積もり"""

    value: complex
    truncation: int
    method: DeterminantMethodKey
    est_error: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise DeterminantError(f"行列式が有限ではありません: {self.value}")
        if self.est_error < 0:
            raise DeterminantError(f"誤差の見積もりが負です: {self.est_error}")


class DeterminantMethod(ABC):
    """切断された行列 M に対して det(I − M) を計算するための抽象基底クラス。"""

    key: DeterminantMethodKey

    def determinant(self, matrix: np.ndarray) -> DetResult:
        """
        det(I − M) を計算する。

        Args:
            matrix: 正方複素行列 M。(a, k) の並びで 2N×2N のとき truncation は N。
        """
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DeterminantError(f"正方行列ではありません: {matrix.shape}")
        return self._determinant_internal(matrix)

    @abstractmethod
    def _determinant_internal(self, matrix: np.ndarray) -> DetResult:
        """具象クラスで実装される実際の計算。"""
        pass
