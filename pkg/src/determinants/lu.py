import numpy as np
import scipy.linalg

from .determinants import DeterminantMethod, DeterminantMethodKey, DetResult


def lu_determinant(matrix: np.ndarray) -> complex:
    """部分ピボット付きLU分解による det(A)"""
    lu, piv = scipy.linalg.lu_factor(matrix)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return complex(np.prod(np.diag(lu)) * (-1) ** swaps)


class LUDeterminant(DeterminantMethod):
    """I − M のLU分解による計算"""

    key = DeterminantMethodKey.LU

    def _determinant_internal(self, matrix: np.ndarray) -> DetResult:
        n = matrix.shape[0]
        value = lu_determinant(np.eye(n) - matrix)
        return DetResult(
            value=value,
            truncation=n // 2,
            method=self.key,
            est_error=float(n * np.finfo(float).eps * abs(value)),
        )
