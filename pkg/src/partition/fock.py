import logging
import math
from concurrent.futures import Executor
from itertools import chain, combinations, permutations

import numpy as np

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, THETA1, TWO_PI_I, SeriesBudget
from src.elliptic_core.theta import log_prime_form, theta_char_g1
from src.szego_genus1.kernel import s_kappa
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig, bar
from src.szego_genus1.transfer import moment_matrix

from .genus_one import z1_twisted_2pt
from .partition import FockBalanceError, FockLabel, WeightCutoffError

logger = logging.getLogger(__name__)

MAX_ORACLE_WEIGHT = 6
# 係数抽出の格子点数 M^{2p} の上限
MAX_EXTRACTION_POINTS = 2**22
EXTRACTION_X_FACTOR = 0.5
EXTRACTION_Y_FACTOR = 0.25
EXTRACTION_RADIAL_STEPS = 64


def fock_sign(s1: int, t1: int, s2: int, t2: int, B: int, kappa: float) -> complex:
    """ε = (−1)^{(t₁+s₂)t₂ + ⌊p/2⌋} e^{iπBκ(s₂−t₁)}"""
    p = s1 + s2
    sign = (-1) ** ((t1 + s2) * t2 + p // 2)
    return sign * complex(np.exp(1j * math.pi * B * kappa * (s2 - t1)))


def _split(label1: FockLabel, label2: FockLabel) -> tuple[tuple[int, ...], ...]:
    """(𝐤₁, 𝐥₂) と (𝐤₂, 𝐥₁) から (𝐤₁, 𝐤₂, 𝐥₁, 𝐥₂) を取り出す。"""
    k1, l2 = label1.k_list, label1.l_list
    k2, l1 = label2.k_list, label2.l_list
    if len(k1) + len(k2) != len(l1) + len(l2):
        raise FockBalanceError(
            f"s₁ + s₂ = {len(k1) + len(k2)} と t₁ + t₂ = {len(l1) + len(l2)} が一致しません"
        )
    return k1, k2, l1, l2


def _label_sign(label1: FockLabel, label2: FockLabel, tw: TwistConfig) -> complex:
    k1, k2, l1, l2 = _split(label1, label2)
    return fock_sign(len(k1), len(l1), len(k2), len(l2), tw.B, tw.kappa)


def _minor_indices(
    label1: FockLabel, label2: FockLabel, N: int
) -> tuple[list[int], list[int]]:
    k1, k2, l1, l2 = _split(label1, label2)
    if max(label1.max_mode(), label2.max_mode()) > N:
        raise WeightCutoffError(f"モードが打ち切り N={N} を超えています")
    rows = [k - 1 for k in k1] + [N + k - 1 for k in k2]
    cols = [l - 1 for l in l1] + [N + l - 1 for l in l2]
    return rows, cols


def fock_2pt(
    label1: FockLabel,
    label2: FockLabel,
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """
    フォックベクトルの種数1の2点関数 ε · Z^(1) · det C_ab(𝐤_a, 𝐥_b)。

    label1 は (𝐤₁, 𝐥₂)、label2 は (𝐤₂, 𝐥₁) を持つ。行は 𝐤₁ の後に 𝐤₂、列は 𝐥₁ の後に 𝐥₂。
    p = 0 のときの行列式は 1。
    """
    rows, cols = _minor_indices(label1, label2, N)
    C = moment_matrix(N, sew, tw, quad_M, b)
    return _fock_value(C, rows, cols, _label_sign(label1, label2, tw), sew, tw, b)


def _fock_value(
    C: np.ndarray,
    rows: list[int],
    cols: list[int],
    sign: complex,
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget,
) -> complex:
    det = np.linalg.det(C[np.ix_(rows, cols)]) if rows else 1.0
    return complex(sign * z1_twisted_2pt(sew, tw, b) * det)


def _increasing_subsets(max_mode: int):
    modes = range(1, max_mode + 1)
    return chain.from_iterable(combinations(modes, r) for r in range(max_mode + 1))


def enumerate_labels(W: float, kappa: float) -> list[FockLabel]:
    """
    wt + κ(s − t) + ½κ² ≤ W を満たすフォックラベル。

    (重み, s, t, 𝐤, 𝐥) の順に並べる。
    """
    max_mode = math.floor(W + 1.5)
    labels = []
    for ks in _increasing_subsets(max_mode):
        for ls in _increasing_subsets(max_mode):
            label = FockLabel(k_list=ks, l_list=ls)
            if label.twisted_weight(kappa) <= W + 1e-12:
                labels.append(label)
    return sorted(
        labels,
        key=lambda lab: (lab.twisted_weight(kappa), lab.s, lab.t, lab.k_list, lab.l_list),
    )


def fock_term_prefactor(label: FockLabel, sew: SewingConfig, tw: TwistConfig) -> complex:
    """
    フォック和の一項の前因子 e^{2πiβ₂κ} ε₁ (−θ₂)^{t−s} ρ^{wt_κ}。

    ε₁ = (−1)^{st + ⌊wt⌋} e^{iπB wt_κ} は双対ベクトルの符号と λ の冪。
    """
    weight = label.twisted_weight(tw.kappa)
    epsilon1 = (-1) ** (label.s * label.t + math.floor(label.weight)) * np.exp(
        1j * math.pi * tw.B * weight
    )
    return complex(
        np.exp(2j * math.pi * tw.beta2 * tw.kappa)
        * epsilon1
        * (-tw.theta2) ** (label.t - label.s)
        * sew.rho_pow(weight)
    )


def dual_pair(label: FockLabel) -> tuple[FockLabel, FockLabel]:
    """Ψ(𝐤, 𝐥) の2点関数で使うラベルの組 ((𝐤, 𝐥), (𝐥, 𝐤))"""
    return label, FockLabel(k_list=label.l_list, l_list=label.k_list)


def fock_sum_oracle(
    W: float,
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    executor: Executor | None = None,
) -> complex:
    """
    重み W までのフォック基底の和による種数2の分配関数。

    各項は前因子と fock_2pt の積。和は重みの順に取る。
    """
    if W > MAX_ORACLE_WEIGHT:
        raise WeightCutoffError(f"重みの打ち切り W={W} が上限 {MAX_ORACLE_WEIGHT} を超えています")
    labels = enumerate_labels(W, tw.kappa)
    C = moment_matrix(N, sew, tw, quad_M, b)

    def term(label: FockLabel) -> complex:
        first, second = dual_pair(label)
        rows, cols = _minor_indices(first, second, N)
        sign = _label_sign(first, second, tw)
        return fock_term_prefactor(label, sew, tw) * _fock_value(C, rows, cols, sign, sew, tw, b)

    terms = list(executor.map(term, labels)) if executor else [term(lab) for lab in labels]
    logger.info(f"Fock sum up to weight {W} used {len(labels)} labels")
    return complex(sum(terms, 0j))


def _theta_ratio(x: np.ndarray, sew: SewingConfig, b: SeriesBudget) -> np.ndarray:
    return theta_char_g1(THETA1, x - sew.w, sew.tau, b) / theta_char_g1(THETA1, x, sew.tau, b)


def _anchored_log_g(
    c: int, coords: np.ndarray, sew: SewingConfig, tw: TwistConfig, b: SeriesBudget
) -> np.ndarray:
    """
    円周上の局所座標 coords（coords[0] は正の実数）での log g_c の連続な枝。

    g₁(u) = u ϑ₁(u−w)/ϑ₁(u), g₂(u) = ϑ₁(u)/(u ϑ₁(u+w))。
    log g₁(0) = Log K(w) − iπB, log g₂(0) = −Log K(w) から実軸に沿って coords[0] まで進み、
    そこから円周に沿ってつなぐ。
    """
    log_k = complex(log_prime_form(sew.w, sew.tau, b))
    anchor = log_k - 1j * math.pi * tw.B if c == 1 else -log_k
    radial = coords[0] * np.arange(1, EXTRACTION_RADIAL_STEPS + 1) / EXTRACTION_RADIAL_STEPS
    path = np.concatenate([radial, coords[1:]])
    g = _theta_ratio(sew.puncture(c) + path, sew, b) * path ** (-((-1) ** c))
    previous = np.concatenate([[np.exp(anchor)], g[:-1]])
    logs = anchor + np.cumsum(np.log(g / previous))
    return logs[EXTRACTION_RADIAL_STEPS - 1 :]


def _stripped_kernel(
    a_side: int,
    b_side: int,
    x_coords: np.ndarray,
    y_coords: np.ndarray,
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget,
) -> np.ndarray:
    """
    穴 ā, b の円周上で主値の S_κ(x, y) を標本化し、分数冪 x^{−κ(−1)^ā} y^{κ(−1)^b} を外して
    錨で決まる枝にそろえる。

    主値の比の κ 乗と錨からつないだ枝は標本ごとに e^{2πiκn} だけずれる。
    n は log g の連続な枝と主値の Log から整数として決める。
    """
    x_side = bar(a_side)
    x = sew.puncture(x_side) + x_coords
    y = sew.puncture(b_side) + y_coords
    principal = s_kappa(x[:, None], y[None, :], sew, tw, b)
    log_monomial = (
        (-1) ** x_side * np.log(x_coords)[:, None] - (-1) ** b_side * np.log(y_coords)[None, :]
    )
    log_cross = np.log(_theta_ratio(x, sew, b)[:, None] / _theta_ratio(y, sew, b)[None, :])
    log_g = (
        _anchored_log_g(x_side, x_coords, sew, tw, b)[:, None]
        - _anchored_log_g(b_side, y_coords, sew, tw, b)[None, :]
    )
    winding = np.round(((log_g + log_monomial - log_cross) / TWO_PI_I).real)
    return principal * np.exp(tw.kappa * (TWO_PI_I * winding - log_monomial))


def extract_fock_coefficient(
    label1: FockLabel,
    label2: FockLabel,
    sew: SewingConfig,
    tw: TwistConfig,
    quad_M: int = 32,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """
    種数1の生成行列式 det[S_κ(x_i, y_j)] から分数冪を外した正則部分の
    Π x_i^{k_i−1} Π y_j^{l_j−1} の係数を 2p 次元FFTで取り出し、ε · Z^(1) を掛けて返す。

    S_κ は主値で標本化するので、モーメント行列の経路とは独立に fock_2pt を検算できる。
    """
    k1, k2, l1, l2 = _split(label1, label2)
    row_labels = [(1, k) for k in k1] + [(2, k) for k in k2]
    col_labels = [(1, l) for l in l1] + [(2, l) for l in l2]
    p = len(row_labels)
    sign = _label_sign(label1, label2, tw)
    if p == 0:
        return complex(sign * z1_twisted_2pt(sew, tw, b))
    if quad_M ** (2 * p) > MAX_EXTRACTION_POINTS:
        raise WeightCutoffError(f"係数抽出の格子 {quad_M}^{2 * p} が大きすぎます")
    if max(label1.max_mode(), label2.max_mode()) >= quad_M // 2:
        raise WeightCutoffError(f"モードが求積点数 {quad_M} に対して大きすぎます")
    sew.require_sewable()

    angles = np.exp(2j * math.pi * np.arange(quad_M) / quad_M)
    r_x = [EXTRACTION_X_FACTOR * sew.radius(bar(a)) for a, _ in row_labels]
    r_y = [EXTRACTION_Y_FACTOR * sew.radius(a) for a, _ in col_labels]
    entries = [
        [
            _stripped_kernel(
                row_labels[i][0], col_labels[j][0], r_x[i] * angles, r_y[j] * angles, sew, tw, b
            )
            for j in range(p)
        ]
        for i in range(p)
    ]

    samples = np.zeros((quad_M,) * (2 * p), dtype=complex)
    for perm in permutations(range(p)):
        inversions = sum(1 for i, j in combinations(range(p), 2) if perm[i] > perm[j])
        product = np.ones((1,) * (2 * p), dtype=complex)
        for i, j in enumerate(perm):
            shape = [1] * (2 * p)
            shape[i] = quad_M
            shape[p + j] = quad_M
            product = product * entries[i][j].reshape(shape)
        samples += (-1) ** inversions * product

    spectrum = np.fft.fftn(samples) / quad_M ** (2 * p)
    index = tuple(k - 1 for _, k in row_labels) + tuple(l - 1 for _, l in col_labels)
    scale = math.prod(r**(k - 1) for r, (_, k) in zip(r_x, row_labels)) * math.prod(
        r**(l - 1) for r, (_, l) in zip(r_y, col_labels)
    )
    logger.debug(f"Extracted Fock coefficient with p={p} on {quad_M}^{2 * p} points")
    return complex(sign * z1_twisted_2pt(sew, tw, b) * spectrum[index] / scale)
