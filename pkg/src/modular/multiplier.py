import logging
import math
from typing import NamedTuple

import numpy as np

from src.determinants.determinants import DeterminantMethodKey
from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, SeriesBudget
from src.partition.genus_two import FermionicFactors, fermionic_factors
from src.szego_genus1.szego_genus1 import TwistConfig

from .action import act_twist_letter, act_point, act_twist
from .modular import Generator, GroupElement, LiftedPoint

logger = logging.getLogger(__name__)


class InvarianceReport(NamedTuple):
    """Ẑ|_g = χẐ の残差と det(I − T) だけの残差"""

    residual: float
    det_residual: float
    chi: complex


def _chi_generator(gen: Generator, tw: TwistConfig) -> complex:
    a1, b1, k = tw.alpha1, tw.beta1, tw.kappa
    match gen:
        case Generator.A:
            return 1 + 0j
        case Generator.B:
            return complex(np.exp(-2j * math.pi * a1 * k))
        case Generator.C:
            return complex(np.exp(-1j * math.pi * k * (k + 1)))
        case Generator.S:
            return complex(np.exp(-2j * math.pi * a1 * b1))
        case Generator.T:
            return complex(np.exp(-1j * math.pi * (a1**2 + a1 + 1 / 12)))


def _chi_letter(gen: Generator, power: int, tw: TwistConfig) -> complex:
    if power > 0:
        return _chi_generator(gen, tw)
    # χ(g⁻¹, tw) = 1/χ(g, g⁻¹·tw)
    return 1 / _chi_generator(gen, act_twist_letter(gen, -1, tw))


def chi_multiplier(g: GroupElement, tw: TwistConfig) -> complex:
    """
    乗数系 χ(g, tw)。

    生成元の値を χ(g₁g₂, tw) = χ(g₁, g₂·tw) χ(g₂, tw) で合成する。
    """
    chi = 1 + 0j
    for gen, power in reversed(g.word):
        chi *= _chi_letter(gen, power, tw)
        tw = act_twist_letter(gen, power, tw)
    return chi


def lifted_partition(
    p: LiftedPoint,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    method: DeterminantMethodKey | str = DeterminantMethodKey.LU,
) -> FermionicFactors:
    """
    持ち上げた分配関数 Ẑ = e^{2πiβ₂κ} exp(½κ²l̂) ϑ[α₁;β₁](κw)/η · det(I − T)。

    ρ の葉を l̂ から決めて z2_fermionic と同じ因子で計算する。
    """
    sew = p.sewing_config(tw, b)
    return fermionic_factors(sew, tw, N, quad_M, b, method)


def invariance_residual(
    g: GroupElement,
    p: LiftedPoint,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    chi_perturbation: complex = 1.0,
) -> InvarianceReport:
    """
    |Ẑ(g·tw)(g·p) / (χ(g, tw) Ẑ(tw)(p)) − 1| と |det′/det − 1|。

    chi_perturbation は χ に掛ける係数（故障注入用）。
    """
    image = act_point(g, p, b)
    moved = act_twist(g, tw)
    chi = chi_multiplier(g, tw) * chi_perturbation
    before = lifted_partition(p, tw, N, quad_M, b)
    after = lifted_partition(image, moved, N, quad_M, b)
    residual = float(abs(after.value / (chi * before.value) - 1))
    det_residual = float(abs(after.det / before.det - 1))
    logger.info(f"Invariance under {g}: residual={residual:.3e}, det residual={det_residual:.3e}")
    return InvarianceReport(residual, det_residual, chi)
