import math

from src.szego_genus1.szego_genus1 import SewingConfig

from .genus2_szego import DomainReport


def domain_check(sew: SewingConfig) -> DomainReport:
    """|w − λ| > 2|ρ|^{½} > 0 がすべての格子点 λ で成り立つかを判定する。"""
    margin, worst = sew.domain_margin()
    reach = 2 * math.sqrt(abs(sew.rho))
    diagnostics = []
    if reach == 0:
        diagnostics.append("ρ = 0 は定義域の外です（2|ρ|^{½} > 0 が必要）")
    if margin <= 0:
        diagnostics.append(
            f"|w − λ| = {abs(sew.w - worst):.6g} ≤ 2|ρ|^{{½}} = {reach:.6g} (λ = {worst})"
        )
    return DomainReport(
        valid=not diagnostics,
        margin=margin,
        worst_lattice_point=worst,
        diagnostics=diagnostics,
    )
