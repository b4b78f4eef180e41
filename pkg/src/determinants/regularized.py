import logging

import numpy as np

from src.szego_genus1.szego_genus1 import BlockMatrix

from .determinants import (
    DeterminantMethod,
    DeterminantMethodKey,
    DetResult,
    SpectralRadiusError,
)
from .lu import LUDeterminant
from .trace_log import TraceLogDeterminant

logger = logging.getLogger(__name__)

METHODS: dict[DeterminantMethodKey, DeterminantMethod] = {
    DeterminantMethodKey.TRACE_LOG: TraceLogDeterminant(),
    DeterminantMethodKey.LU: LUDeterminant(),
}


def resolve_method(method: DeterminantMethod | DeterminantMethodKey | str) -> DeterminantMethod:
    if isinstance(method, DeterminantMethod):
        return method
    return METHODS[DeterminantMethodKey(method)]


def det_I_minus(
    M: BlockMatrix | np.ndarray,
    method: DeterminantMethod | DeterminantMethodKey | str = DeterminantMethodKey.LU,
) -> DetResult:
    """
    正則化行列式 det(I − M)。

    トレース対数法でスペクトル半径が 1 以上のときはLU分解に切り替える。
    """
    matrix = M.entries if isinstance(M, BlockMatrix) else np.asarray(M, dtype=complex)
    solver = resolve_method(method)
    try:
        return solver.determinant(matrix)
    except SpectralRadiusError as e:
        logger.warning(f"Falling back to LU determinant: {e}")
        return METHODS[DeterminantMethodKey.LU].determinant(matrix)
