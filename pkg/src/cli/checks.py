import logging
import math
from abc import ABC, abstractmethod
from itertools import combinations

import numpy as np
from pydantic import BaseModel, Field

from src.determinants.determinants import SpectralRadiusError
from src.determinants.lu import LUDeterminant
from src.determinants.trace_log import TraceLogDeterminant
from src.elliptic_core.elliptic_core import TWO_PI_I, Characteristic, distance_to_lattice
from src.genus2_szego.kernel import s2_eval
from src.genus2_szego.sewing import sewing_multiplier_residual
from src.modular.multiplier import invariance_residual
from src.partition.fock import extract_fock_coefficient, fock_2pt, fock_sum_oracle
from src.partition.genus_one import (
    frobenius_residual,
    z1_twisted_2pt,
    z1_twisted_2pt_lattice_sum,
)
from src.partition.genus_two import gen2_form, triple_product_ray, z2_fermionic
from src.partition.partition import FockLabel
from src.szego_genus1.szego_genus1 import SewingConfig
from src.szego_genus1.transfer import build_T

from .cli import UnknownTargetError
from .run_config import RunParameters
from .targets import RunContext

logger = logging.getLogger(__name__)


class CheckReport(BaseModel):
    """検査の結果"""

    name: str = Field(description="検査の名前")
    residual: float = Field(description="残差")
    tolerance: float = Field(description="許容誤差")
    passed: bool = Field(description="合格したか")
    trace: list[float] = Field(default_factory=list, description="細分化や半直線に沿った残差の列")

    model_config = {"frozen": True}


class ResidualCheck(ABC):
    """恒等式の数値検査のための抽象基底クラス。"""

    name: str

    def run(self, params: RunParameters, ctx: RunContext) -> CheckReport:
        residual, trace = self._residuals(params, ctx)
        passed = self._passed(residual, trace, params.tolerance)
        logger.info(f"Check {self.name}: residual={residual:.3e}, passed={passed}")
        return CheckReport(
            name=self.name,
            residual=residual,
            tolerance=params.tolerance,
            passed=passed,
            trace=trace,
        )

    def _passed(self, residual: float, trace: list[float], tolerance: float) -> bool:
        return bool(residual < tolerance)

    @abstractmethod
    def _residuals(self, params: RunParameters, ctx: RunContext) -> tuple[float, list[float]]:
        """(残差, 経過) を返す。"""
        pass


def torus_points(
    rng: np.random.Generator, count: int, sew: SewingConfig, exclusion: float
) -> list[complex]:
    """穴 0, w から exclusion 以上離れた一般の位置の点"""
    points: list[complex] = []
    while len(points) < count:
        u, v = rng.uniform(0.05, 0.95, size=2)
        z = complex(TWO_PI_I * (u * sew.tau.value + v))
        gaps = [float(distance_to_lattice(z - c, sew.tau)) for c in [0j, sew.w, *points]]
        if min(gaps) > exclusion:
            points.append(z)
    return points


def _exclusion(sew: SewingConfig) -> float:
    return max(sew.r1, sew.r2)


class FrobeniusCheck(ResidualCheck):
    name = "frobenius"

    def _residuals(self, params, ctx):
        rng = np.random.default_rng(params.seed)
        sew = params.sewing()
        c = Characteristic(params.alpha1, params.beta1)
        n = params.frobenius_n
        trace = []
        for _ in range(params.samples):
            points = torus_points(rng, 2 * n, sew, 0.3)
            trace.append(frobenius_residual(points[:n], points[n:], c, sew.tau, ctx.budget))
        return max(trace), trace


class DetCrossMethodCheck(ResidualCheck):
    name = "det_cross_method"

    def _residuals(self, params, ctx):
        T = build_T(ctx.N, params.sewing(), params.twist(), ctx.quad_M, ctx.budget).entries
        lu = LUDeterminant().determinant(T).value
        try:
            trace_log = TraceLogDeterminant().determinant(T).value
        except SpectralRadiusError as e:
            logger.warning(f"Trace-log method not applicable: {e}")
            return math.inf, [abs(lu)]
        return float(abs(trace_log / lu - 1)), [abs(lu)]

    def _passed(self, residual, trace, tolerance):
        return bool(residual < tolerance and trace[0] > 0)


class FockSumCheck(ResidualCheck):
    name = "fock_sum"

    def _residuals(self, params, ctx):
        sew, tw = params.sewing(), params.twist()
        closed = z2_fermionic(sew, tw, ctx.N, ctx.quad_M, ctx.budget, ctx.method)
        trace = []
        for W in range(2, int(params.weight_cutoff) + 1):
            oracle = fock_sum_oracle(W, sew, tw, ctx.N, ctx.quad_M, ctx.budget)
            trace.append(float(abs(closed / oracle - 1)))
        return trace[-1], trace

    def _passed(self, residual, trace, tolerance):
        decreasing = all(b <= a for a, b in zip(trace, trace[1:]))
        return bool(residual < tolerance and decreasing)


class SewingMultiplierCheck(ResidualCheck):
    name = "sewing_multiplier"
    # 丸め誤差の水準では N を上げても残差は減らない
    floor = 1e-12
    slack = 1e-6

    def _residuals(self, params, ctx):
        rng = np.random.default_rng(params.seed)
        sew, tw = params.sewing(), params.twist()
        samples = []
        for _ in range(params.samples):
            side = int(rng.integers(1, 3))
            modulus = math.sqrt(abs(sew.rho)) * rng.uniform(0.8, 1.25)
            u = modulus * np.exp(1j * rng.uniform(0, 2 * math.pi))
            (y,) = torus_points(rng, 1, sew, _exclusion(sew))
            samples.append((complex(u), y, side))

        def worst(N: int) -> float:
            return max(
                sewing_multiplier_residual(u, y, sew, tw, N, ctx.quad_M, ctx.budget, side)
                for u, y, side in samples
            )

        trace = [worst(ctx.N), worst(ctx.N + 8)]
        return trace[0], trace

    def _passed(self, residual, trace, tolerance):
        coarse, fine = trace
        non_increasing = fine <= coarse * (1 + self.slack) or fine < self.floor
        return bool(residual < tolerance and non_increasing)


class TripleProductCheck(ResidualCheck):
    name = "triple_product"
    # これ未満の残差は打ち切り誤差とみなして減衰率を問わない
    floor = 1e-10

    def _residuals(self, params, ctx):
        report = triple_product_ray(
            params.sewing(), params.twist(), ctx.N, ctx.quad_M, b=ctx.budget
        )
        logger.info(
            f"Fitted orders: plain {report.plain_order:.3f}, "
            f"leading-order {report.leading_order_order:.3f}"
        )
        return report.leading_order[-1], list(report.leading_order)

    def _passed(self, residual, trace, tolerance):
        halving = all(b <= 0.5 * a or b < self.floor for a, b in zip(trace, trace[1:]))
        return bool(residual < tolerance and halving)


class InvarianceCheck(ResidualCheck):
    name = "invariance"

    def _residuals(self, params, ctx):
        report = invariance_residual(
            params.group_element(),
            params.lifted_point(),
            params.twist(),
            ctx.N,
            ctx.quad_M,
            ctx.budget,
            params.chi_perturbation,
        )
        return report.residual, [report.residual, report.det_residual]


class TwistedTwoPointLatticeCheck(ResidualCheck):
    name = "twisted_2pt_lattice"

    def _residuals(self, params, ctx):
        sew, tw = params.sewing(), params.twist()
        closed = z1_twisted_2pt(sew, tw, ctx.budget)
        lattice = z1_twisted_2pt_lattice_sum(sew, tw, ctx.budget)
        residual = float(abs(lattice / closed - 1))
        return residual, [residual]


def small_label_pairs(max_mode: int, max_p: int = 2) -> list[tuple[FockLabel, FockLabel]]:
    """p ≤ max_p, モード ≤ max_mode のラベルの組 ((𝐤₁, 𝐥₂), (𝐤₂, 𝐥₁))"""
    slots = [(a, k) for a in (1, 2) for k in range(1, max_mode + 1)]
    pairs = []
    for p in range(1, max_p + 1):
        for rows in combinations(slots, p):
            for cols in combinations(slots, p):
                k1 = tuple(k for a, k in rows if a == 1)
                k2 = tuple(k for a, k in rows if a == 2)
                l1 = tuple(l for b, l in cols if b == 1)
                l2 = tuple(l for b, l in cols if b == 2)
                pairs.append(
                    (FockLabel(k_list=k1, l_list=l2), FockLabel(k_list=k2, l_list=l1))
                )
    return pairs


class FockCoefficientCheck(ResidualCheck):
    name = "fock_coefficients"

    def _residuals(self, params, ctx):
        sew, tw = params.sewing(), params.twist()
        scale = abs(z1_twisted_2pt(sew, tw, ctx.budget))
        trace = []
        for label1, label2 in small_label_pairs(params.max_mode):
            direct = fock_2pt(label1, label2, sew, tw, ctx.N, ctx.quad_M, ctx.budget)
            extracted = extract_fock_coefficient(label1, label2, sew, tw, b=ctx.budget)
            trace.append(float(abs(direct - extracted) / max(abs(direct), scale)))
        return max(trace), trace


class NpointNormalizationCheck(ResidualCheck):
    name = "npoint_normalization"

    def _residuals(self, params, ctx):
        rng = np.random.default_rng(params.seed)
        sew, tw = params.sewing(), params.twist()
        z2 = z2_fermionic(sew, tw, ctx.N, ctx.quad_M, ctx.budget, ctx.method)
        trace = []
        for _ in range(params.samples):
            x, y = torus_points(rng, 2, sew, _exclusion(sew))
            ratio = gen2_form([x], [y], sew, tw, ctx.N, ctx.quad_M, ctx.budget) / z2
            kernel = s2_eval(x, y, sew, tw, ctx.N, ctx.quad_M, ctx.budget).value
            trace.append(float(abs(ratio / kernel - 1)))
        return max(trace), trace


CHECKS: dict[str, ResidualCheck] = {
    check.name: check
    for check in (
        FrobeniusCheck(),
        DetCrossMethodCheck(),
        FockSumCheck(),
        SewingMultiplierCheck(),
        TripleProductCheck(),
        InvarianceCheck(),
        TwistedTwoPointLatticeCheck(),
        FockCoefficientCheck(),
        NpointNormalizationCheck(),
    )
}


def resolve_check(name: str) -> ResidualCheck:
    if name not in CHECKS:
        raise UnknownTargetError(
            f"不明な検査です: {name}（{', '.join(sorted(CHECKS))} のいずれか）"
        )
    return CHECKS[name]
