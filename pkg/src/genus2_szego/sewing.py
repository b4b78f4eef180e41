import logging

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, SeriesBudget
from src.szego_genus1.kernel import local_factor
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig, bar

from .genus2_szego import SewingDomainError
from .kernel import sewn_kernel

logger = logging.getLogger(__name__)


def sewing_multiplier_residual(
    x_a_coord: complex,
    y: complex,
    sew: SewingConfig,
    tw: TwistConfig,
    N: int,
    quad_M: int,
    b: SeriesBudget = DEFAULT_BUDGET,
    side: int = 1,
) -> float:
    """
    円環上の縫合条件 S^(2)(x_a, y) = −θ₂^{a−ā} S^(2)(x_ā, y) の正規化残差。

    x_a = u と x_ā = ρ/u を同一視し、R_c(u) = Φ_c(u) S^(2)(x_c = u, y)/F(x) について
    R_c(u) = σ (−1)^c ξ ρ^{½ − κ(−1)^c} u⁻¹ R_c̄(ρ/u) を比べる。
    σ = −θ₂^{±1} の両方を試し、小さい方の残差を返す。
    """
    c = side
    c_bar = bar(c)
    u = complex(x_a_coord)
    inner = abs(sew.rho) / sew.radius(c_bar)
    if not inner < abs(u) < sew.radius(c):
        raise SewingDomainError(
            f"|x_a| = {abs(u):.3e} が円環 ({inner:.3e}, {sew.radius(c):.3e}) の外にあります"
        )
    kernel = sewn_kernel(sew, tw, N, quad_M, b)
    partner = sew.rho / u
    lhs = complex(local_factor(c, u, sew, tw, b)) * kernel.bracket(sew.puncture(c) + u, y)
    jacobian = (
        (-1) ** c
        * tw.xi
        * complex(sew.rho_pow(0.5 - tw.kappa * (-1) ** c))
        / u
    )
    rhs = (
        jacobian
        * complex(local_factor(c_bar, partner, sew, tw, b))
        * kernel.bracket(sew.puncture(c_bar) + partner, y)
    )
    residuals = []
    for exponent in (c - c_bar, c_bar - c):
        sigma = -(tw.theta2**exponent)
        scale = max(abs(lhs), abs(sigma * rhs))
        residuals.append(abs(lhs - sigma * rhs) / scale)
    logger.debug(f"Sewing residuals for both sign assignments: {residuals}")
    return float(min(residuals))
