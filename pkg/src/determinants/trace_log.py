import logging

import numpy as np

from .determinants import (
    DeterminantMethod,
    DeterminantMethodKey,
    DetResult,
    SpectralRadiusError,
)

logger = logging.getLogger(__name__)

MAX_POWERS = 200
TRACE_TOL = 1e-14


def spectral_radius_estimate(matrix: np.ndarray, iterations: int = 64) -> float:
    """べき乗法による M のスペクトル半径の見積もり（後半の反復の平均増大率）"""
    n = matrix.shape[0]
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    log_growth = 0.0
    for i in range(iterations):
        v = matrix @ v
        norm = np.linalg.norm(v)
        if norm == 0:
            return 0.0
        v /= norm
        if i >= iterations // 2:
            log_growth += np.log(norm)
    return float(np.exp(log_growth / (iterations - iterations // 2)))


class TraceLogDeterminant(DeterminantMethod):
    """log det(I − M) = −Σ_n Tr Mⁿ / n による計算"""

    key = DeterminantMethodKey.TRACE_LOG

    def _determinant_internal(self, matrix: np.ndarray) -> DetResult:
        radius = spectral_radius_estimate(matrix)
        if radius >= 1:
            raise SpectralRadiusError(
                f"スペクトル半径 {radius:.3f} が 1 以上のためトレース対数法は使えません"
            )
        accumulated = 0j
        power = matrix.copy()
        term = 0j
        for n in range(1, MAX_POWERS + 1):
            term = np.trace(power) / n
            accumulated += term
            if abs(term) < TRACE_TOL * max(abs(accumulated), 1.0):
                break
            power = power @ matrix
        else:
            logger.warning(f"Trace-log series hit the cap of {MAX_POWERS} powers")
        value = complex(np.exp(-accumulated))
        tail = abs(term) * radius / (1 - radius)
        return DetResult(
            value=value,
            truncation=matrix.shape[0] // 2,
            method=self.key,
            est_error=float(abs(value) * tail),
        )
