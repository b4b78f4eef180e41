import logging
from typing import Callable, NamedTuple

from src.determinants.bosonic import det_inv_sqrt_I_minus_R
from src.determinants.determinants import DeterminantMethod
from src.determinants.regularized import det_I_minus
from src.elliptic_core.elliptic_core import SeriesBudget, Tau
from src.elliptic_core.qseries import dedekind_eta
from src.elliptic_core.theta import prime_form_K
from src.genus2_szego.kernel import s2_eval
from src.modular.multiplier import lifted_partition
from src.partition.fock import fock_sum_oracle
from src.partition.genus_one import gen1_form, z1_twisted_2pt, z1_twisted_2pt_lattice_sum
from src.partition.genus_two import (
    gen2_form,
    leading_order_period_matrix,
    z2_fermionic,
    z2_heisenberg,
    z2_theta_form,
)
from src.szego_genus1.kernel import s_kappa
from src.szego_genus1.transfer import build_T

from .cli import RunConfigError, UnknownTargetError
from .run_config import RunParameters

logger = logging.getLogger(__name__)


class RunContext(NamedTuple):
    """環境変数と実行設定から決まる計算の設定"""

    budget: SeriesBudget
    method: DeterminantMethod
    N: int
    quad_M: int


class EvalOutcome(NamedTuple):
    value: complex
    branch: dict


Target = Callable[[RunParameters, RunContext], complex]


def branch_record(params: RunParameters) -> dict:
    # ρ = 0 では l̂ が定まらないので葉は記録しない
    sheet = params.sewing().sheet if params.rho.value != 0 else None
    return {"B": params.B, "sheet": sheet, "m": params.m}


def _single_pair(params: RunParameters) -> tuple[complex, complex]:
    if not params.x or not params.y:
        raise RunConfigError("評価点 x, y を一つずつ指定してください")
    return params.x[0].value, params.y[0].value


def _points(params: RunParameters) -> tuple[list[complex], list[complex]]:
    if len(params.x) != len(params.y) or not params.x:
        raise RunConfigError("評価点 x, y を同じ個数（1 以上）指定してください")
    return [z.value for z in params.x], [z.value for z in params.y]


def _theta_form(params: RunParameters, ctx: RunContext) -> complex:
    sew, tw = params.sewing(), params.twist()
    omega = params.omega_matrix()
    if omega is None:
        logger.warning("No period matrix given, using the leading-order Omega")
        omega = leading_order_period_matrix(sew, tw, ctx.budget)
    return z2_theta_form(omega, sew, tw, ctx.N, ctx.budget)


EVAL_TARGETS: dict[str, Target] = {
    "prime_form_K": lambda p, ctx: complex(prime_form_K(p.w.value, Tau(p.tau.value), ctx.budget)),
    "dedekind_eta": lambda p, ctx: dedekind_eta(Tau(p.tau.value), ctx.budget),
    "z1_twisted_2pt": lambda p, ctx: z1_twisted_2pt(p.sewing(), p.twist(), ctx.budget),
    "z1_twisted_2pt_lattice_sum": lambda p, ctx: z1_twisted_2pt_lattice_sum(
        p.sewing(), p.twist(), ctx.budget
    ),
    "s_kappa": lambda p, ctx: complex(
        s_kappa(*_single_pair(p), p.sewing(), p.twist(), ctx.budget)
    ),
    "s2_eval": lambda p, ctx: s2_eval(
        *_single_pair(p), p.sewing(), p.twist(), ctx.N, ctx.quad_M, ctx.budget
    ).value,
    "det_I_minus_T": lambda p, ctx: det_I_minus(
        build_T(ctx.N, p.sewing(), p.twist(), ctx.quad_M, ctx.budget), ctx.method
    ).value,
    "det_inv_sqrt_I_minus_R": lambda p, ctx: det_inv_sqrt_I_minus_R(
        ctx.N, p.sewing(sheet=0), ctx.budget
    ),
    "z2_fermionic": lambda p, ctx: z2_fermionic(
        p.sewing(), p.twist(), ctx.N, ctx.quad_M, ctx.budget, ctx.method
    ),
    "z2_heisenberg": lambda p, ctx: z2_heisenberg(p.sewing(sheet=0), ctx.N, ctx.budget),
    "z2_theta_form": _theta_form,
    "fock_sum_oracle": lambda p, ctx: fock_sum_oracle(
        p.weight_cutoff, p.sewing(), p.twist(), ctx.N, ctx.quad_M, ctx.budget
    ),
    "gen1_form": lambda p, ctx: gen1_form(*_points(p), p.sewing(), p.twist(), ctx.budget),
    "gen2_form": lambda p, ctx: gen2_form(
        *_points(p), p.sewing(), p.twist(), ctx.N, ctx.quad_M, ctx.budget
    ),
    "lifted_partition": lambda p, ctx: lifted_partition(
        p.lifted_point(), p.twist(), ctx.N, ctx.quad_M, ctx.budget, ctx.method.key
    ).value,
}


def evaluate_target(name: str, params: RunParameters, ctx: RunContext) -> EvalOutcome:
    if name not in EVAL_TARGETS:
        raise UnknownTargetError(
            f"不明な評価対象です: {name}（{', '.join(sorted(EVAL_TARGETS))} のいずれか）"
        )
    value = complex(EVAL_TARGETS[name](params, ctx))
    logger.info(f"Evaluated {name}: {value}")
    return EvalOutcome(value, branch_record(params))
