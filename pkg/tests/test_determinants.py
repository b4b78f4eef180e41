import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.determinants.bosonic import build_R, det_I_minus_R, det_inv_sqrt_I_minus_R
from src.determinants.determinants import (
    DeterminantError,
    DeterminantMethodKey,
    DetResult,
    MinorExpansionLimitError,
    SpectralRadiusError,
)
from src.determinants.lu import LUDeterminant
from src.determinants.minors import MAX_MINOR_DIMENSION, minor_expansion_det
from src.determinants.regularized import det_I_minus, resolve_method
from src.determinants.trace_log import TraceLogDeterminant
from src.szego_genus1.szego_genus1 import SewingConfig
from src.szego_genus1.transfer import build_T

N = 6
QUAD_M = 128


def contraction(seed: int, size: int, norm: float = 0.5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return norm * M / np.linalg.norm(M, 2)


@given(seed=st.integers(min_value=0, max_value=10_000), size=st.integers(min_value=1, max_value=8))
@settings(max_examples=30, deadline=None)
def test_methods_agree_on_contractions(seed, size):
    M = contraction(seed, size)
    expected = np.linalg.det(np.eye(size) - M)
    lu = LUDeterminant().determinant(M)
    trace_log = TraceLogDeterminant().determinant(M)
    assert lu.value == pytest.approx(expected, rel=1e-10)
    assert trace_log.value == pytest.approx(expected, rel=1e-10)
    assert lu.method == DeterminantMethodKey.LU
    assert trace_log.method == DeterminantMethodKey.TRACE_LOG


def test_trace_log_refuses_large_spectral_radius():
    with pytest.raises(SpectralRadiusError):
        TraceLogDeterminant().determinant(2 * np.eye(3))


def test_regularized_determinant_falls_back_to_lu():
    result = det_I_minus(2 * np.eye(3), DeterminantMethodKey.TRACE_LOG)
    assert result.value == pytest.approx(-1.0)
    assert result.method == DeterminantMethodKey.LU


def test_resolve_method_accepts_keys_and_strings():
    assert isinstance(resolve_method("trace_log"), TraceLogDeterminant)
    assert isinstance(resolve_method(DeterminantMethodKey.LU), LUDeterminant)
    with pytest.raises(ValueError):
        resolve_method("cholesky")


def test_non_square_matrix_is_rejected():
    with pytest.raises(DeterminantError):
        LUDeterminant().determinant(np.ones((2, 3)))


def test_det_result_validation():
    with pytest.raises(DeterminantError):
        DetResult(complex("nan"), 1, DeterminantMethodKey.LU, 0.0)
    with pytest.raises(DeterminantError):
        DetResult(1.0, 1, DeterminantMethodKey.LU, -1.0)


def test_transfer_determinant_methods_agree(sew, tw):
    T = build_T(N, sew, tw, QUAD_M)
    lu = det_I_minus(T, DeterminantMethodKey.LU)
    trace_log = det_I_minus(T, DeterminantMethodKey.TRACE_LOG)
    assert trace_log.value == pytest.approx(lu.value, rel=1e-10)
    assert trace_log.method == DeterminantMethodKey.TRACE_LOG
    assert lu.truncation == N


@pytest.mark.parametrize("tau_value", [0.1 + 1.1j, 1j])
@pytest.mark.parametrize("w", [0.6 + 1.7j, -1.2 + 2.5j])
@pytest.mark.parametrize("rho", [cmath.rect(1e-3, 0.4), cmath.rect(1e-4, -2.0)])
def test_transfer_determinant_methods_agree_across_the_domain(tw, tau_value, w, rho):
    T = build_T(N, SewingConfig.at(tau_value, w, rho), tw, QUAD_M)
    lu = det_I_minus(T, DeterminantMethodKey.LU)
    trace_log = det_I_minus(T, DeterminantMethodKey.TRACE_LOG)
    assert trace_log.method == DeterminantMethodKey.TRACE_LOG
    assert abs(lu.value) > 0
    assert abs(trace_log.value / lu.value - 1) < 1e-9


@given(seed=st.integers(min_value=0, max_value=10_000), size=st.integers(min_value=1, max_value=6))
@settings(max_examples=20, deadline=None)
def test_minor_expansion_matches_dense_determinant(seed, size):
    M = contraction(seed, size, norm=1.5)
    assert minor_expansion_det(M) == pytest.approx(
        np.linalg.det(np.eye(size) + M), rel=1e-9, abs=1e-10
    )


def test_bordered_minor_expansion():
    M = contraction(7, 4, norm=0.8)
    rng = np.random.default_rng(3)
    S = np.array([[0.7 + 0.2j]])
    U = rng.standard_normal((1, 4)) + 0j
    V = rng.standard_normal((4, 1)) + 0j
    full = np.block([[S, U], [V, np.eye(4) + M]])
    assert minor_expansion_det(M, S, U, V) == pytest.approx(np.linalg.det(full), rel=1e-9)


def test_minor_expansion_dimension_limit():
    size = MAX_MINOR_DIMENSION + 1
    with pytest.raises(MinorExpansionLimitError):
        minor_expansion_det(np.zeros((size, size)))


def test_bosonic_matrix_transpose_swaps_punctures(sew):
    R = build_R(N, sew).entries
    swap = np.block([[np.zeros((N, N)), np.eye(N)], [np.eye(N), np.zeros((N, N))]])
    np.testing.assert_allclose(R.T, swap @ R @ swap, rtol=1e-12, atol=1e-300)


def test_bosonic_square_root_branch(sew):
    root = det_inv_sqrt_I_minus_R(N, sew)
    assert root**-2 == pytest.approx(det_I_minus_R(N, sew), rel=1e-10)
    # 小さな ρ では連続に選んだ枝は 1 に近い
    assert abs(root - 1) < 0.1
    assert det_inv_sqrt_I_minus_R(N, sew.with_rho(0)) == 1


def test_bosonic_determinant_ignores_sheet(sew):
    assert det_I_minus_R(N, sew.with_sheet(1)) == pytest.approx(det_I_minus_R(N, sew), rel=1e-12)
