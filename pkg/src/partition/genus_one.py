import logging
import math
from itertools import combinations

import numpy as np

from src.elliptic_core.elliptic_core import (
    DEFAULT_BUDGET,
    Characteristic,
    DegenerateCharacteristicError,
    SeriesBudget,
    Tau,
    distance_to_lattice,
    lattice_minimum,
)
from src.elliptic_core.qseries import dedekind_eta
from src.elliptic_core.theta import log_prime_form, prime_form_K, theta_char_g1
from src.elliptic_core.weierstrass import DEGENERATE_THETA_TOL
from src.szego_genus1.kernel import s_kappa, twist_theta_at_kappa_w
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig

from .partition import (
    ChargeBalanceError,
    ChargeMode,
    CoincidentInsertionError,
    InsertionList,
)

logger = logging.getLogger(__name__)

# 電荷の和を零とみなす許容誤差
CHARGE_TOL = 1e-12
# 格子を法とした点の一致判定（D(q) に対する比）
COINCIDENCE_TOL = 1e-8


def _require_distinct(points: list[complex], tau: Tau, what: str) -> None:
    scale = lattice_minimum(tau)
    for z1, z2 in combinations(points, 2):
        if float(distance_to_lattice(z1 - z2, tau)) < COINCIDENCE_TOL * scale:
            raise CoincidentInsertionError(f"{what} {z1} と {z2} が格子を法として一致しています")


def z1_alpha_npoint(
    alpha: complex,
    ins: InsertionList,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
    mode: ChargeMode = ChargeMode.STRICT,
) -> complex:
    """
    種数1の n 点関数 q^{½α²}/η · exp(αΣβ_i z_i) · Π_{r<s} K(z_r − z_s)^{β_rβ_s}。

    非整数冪は主値。Σβ_i ≠ 0 のときは STRICT ならエラー、LENIENT なら 0 を返す。
    """
    if abs(ins.total_charge) > CHARGE_TOL:
        if mode == ChargeMode.LENIENT:
            return 0j
        raise ChargeBalanceError(f"電荷の和が零ではありません: Σβ = {ins.total_charge}")
    _require_distinct(list(ins.positions), tau, "挿入点")
    log_value = 1j * math.pi * alpha**2 * tau.value - np.log(dedekind_eta(tau, b))
    log_value += alpha * sum(
        (beta * z for beta, z in zip(ins.charges, ins.positions)), 0j
    )
    pairs = list(zip(ins.charges, ins.positions))
    for (beta_r, z_r), (beta_s, z_s) in combinations(pairs, 2):
        if beta_r * beta_s != 0:
            log_value += beta_r * beta_s * complex(log_prime_form(z_r - z_s, tau, b))
    return complex(np.exp(log_value))


def z1_twisted_2pt(
    sew: SewingConfig, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET
) -> complex:
    """ねじれ2点関数 ϑ[α₁;β₁](κw, τ) / (η(τ) K(w, τ)^{κ²})。K^{κ²} は主値。"""
    theta = twist_theta_at_kappa_w(sew, tw, b)
    log_k = complex(log_prime_form(sew.w, sew.tau, b))
    return complex(theta * np.exp(-(tw.kappa**2) * log_k) / dedekind_eta(sew.tau, b))


def z1_twisted_2pt_lattice_sum(
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget = DEFAULT_BUDGET,
    mu_cutoff: int = 30,
) -> complex:
    """Σ_{μ∈ℤ+α₁, |μ|≤cutoff} e^{2πiμβ₁} Z_μ(κ at w, −κ at 0) による z1_twisted_2pt の格子和。"""
    insertions = InsertionList.of((tw.kappa, sew.w), (-tw.kappa, 0j))
    total = 0j
    n_range = math.ceil(mu_cutoff + abs(tw.alpha1))
    for n in range(-n_range, n_range + 1):
        mu = n + tw.alpha1
        if abs(mu) > mu_cutoff:
            continue
        total += np.exp(2j * math.pi * mu * tw.beta1) * z1_alpha_npoint(
            mu, insertions, sew.tau, b
        )
    return complex(total)


def gen1_form(
    xs: list[complex],
    ys: list[complex],
    sew: SewingConfig,
    tw: TwistConfig,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """z1_twisted_2pt · det[S_κ(x_i, y_j)]"""
    if len(xs) != len(ys):
        raise ValueError("x と y の個数が一致しません")
    _require_distinct(list(xs) + list(ys), sew.tau, "評価点")
    matrix = np.array([[complex(s_kappa(x, y, sew, tw, b)) for y in ys] for x in xs])
    det = np.linalg.det(matrix) if len(xs) else 1.0
    return complex(z1_twisted_2pt(sew, tw, b) * det)


def _theta_at_zero(c: Characteristic, tau: Tau, b: SeriesBudget) -> complex:
    value = complex(theta_char_g1(c, 0.0, tau, b))
    if abs(value) < DEGENERATE_THETA_TOL:
        raise DegenerateCharacteristicError(f"ϑ[{c.alpha};{c.beta}](0) がほぼ零です")
    return value


def frobenius_lhs(
    xs: list[complex],
    ys: list[complex],
    c: Characteristic,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """
    ϑ[c](Σ(x_i − y_i))/ϑ[c](0) · Π_{i<j} K(x_i − x_j)K(y_j − y_i) / Π_{i,j} K(x_i − y_j)
    """
    value = complex(theta_char_g1(c, sum(xs) - sum(ys), tau, b)) / _theta_at_zero(c, tau, b)
    n = len(xs)
    for i, j in combinations(range(n), 2):
        value *= complex(prime_form_K(xs[i] - xs[j], tau, b))
        value *= complex(prime_form_K(ys[j] - ys[i], tau, b))
    for x in xs:
        for y in ys:
            value /= complex(prime_form_K(x - y, tau, b))
    return value


def frobenius_rhs(
    xs: list[complex],
    ys: list[complex],
    c: Characteristic,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> complex:
    """det[P₁(x_i − y_j)], P₁(z) = ϑ[c](z)/(ϑ[c](0)K(z))"""
    at_zero = _theta_at_zero(c, tau, b)
    z = np.subtract.outer(np.asarray(xs, dtype=complex), np.asarray(ys, dtype=complex))
    matrix = theta_char_g1(c, z, tau, b) / (at_zero * prime_form_K(z, tau, b))
    return complex(np.linalg.det(np.atleast_2d(matrix)))


def _degeneracy(
    xs: list[complex],
    ys: list[complex],
    c: Characteristic,
    tau: Tau,
    b: SeriesBudget,
) -> str | None:
    """両辺がともに零に近く比が信用できない配置なら、その理由を返す。"""
    threshold = math.sqrt(b.rel_tol)
    theta_factor = abs(
        complex(theta_char_g1(c, sum(xs) - sum(ys), tau, b)) / _theta_at_zero(c, tau, b)
    )
    if theta_factor < threshold:
        return f"|ϑ[c](Σx − Σy)/ϑ[c](0)| = {theta_factor:.3e}"
    for group in (xs, ys):
        for z1, z2 in combinations(group, 2):
            k = abs(complex(prime_form_K(z1 - z2, tau, b)))
            if k < threshold:
                return f"|K({z1} − {z2})| = {k:.3e}"
    return None


def frobenius_residual(
    xs: list[complex],
    ys: list[complex],
    c: Characteristic,
    tau: Tau,
    b: SeriesBudget = DEFAULT_BUDGET,
) -> float:
    """
    フロベニウスの行列式恒等式の残差 |LHS/RHS − 1|

    両辺がともに零に近い配置では比が意味を持たないので警告を出す。
    """
    if len(xs) != len(ys) or not xs:
        raise ValueError("x と y は同じ個数（1 以上）でなければなりません")
    _require_distinct(list(xs) + list(ys), tau, "評価点")
    reason = _degeneracy(xs, ys, c, tau, b)
    if reason is not None:
        logger.warning(f"Near-degenerate Frobenius configuration, residual is unreliable: {reason}")
    lhs = frobenius_lhs(xs, ys, c, tau, b)
    rhs = frobenius_rhs(xs, ys, c, tau, b)
    if rhs == 0:
        return math.inf
    residual = abs(lhs / rhs - 1)
    logger.debug(f"Frobenius identity for n={len(xs)}: residual {residual:.3e}")
    return float(residual)
