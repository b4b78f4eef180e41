import logging

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, TWO_PI_I, SeriesBudget, Tau
from src.szego_genus1.szego_genus1 import TwistConfig

from .modular import (
    HEISENBERG,
    GroupElement,
    Generator,
    LiftedPoint,
    ModularDomainError,
    heisenberg_params,
    modular_params,
)

logger = logging.getLogger(__name__)


def _act_letter(gen: Generator, power: int, p: LiftedPoint, b: SeriesBudget) -> LiftedPoint:
    tau, w, lhat = p.tau.value, p.w, p.lhat(b)
    if gen in HEISENBERG:
        a, b_, c = heisenberg_params(gen, power)
        new_w = w + TWO_PI_I * (a * tau + b_)
        new_lhat = lhat + TWO_PI_I * a**2 * tau + 2 * a * w + TWO_PI_I * (a * b_ + c)
        return LiftedPoint.from_lhat(p.tau, new_w, p.rho, new_lhat, b)
    a1, b1, c1, d1 = modular_params(gen, power)
    denominator = c1 * tau + d1
    new_lhat = lhat - c1 * w**2 / (TWO_PI_I * denominator)
    return LiftedPoint.from_lhat(
        Tau((a1 * tau + b1) / denominator),
        w / denominator,
        p.rho / denominator**2,
        new_lhat,
        b,
    )


def act_point(
    g: GroupElement, p: LiftedPoint, b: SeriesBudget = DEFAULT_BUDGET
) -> LiftedPoint:
    """
    持ち上げた点への L の作用。

    μ(a, b, c): w → w + 2πi(aτ + b), l̂ → l̂ + 2πia²τ + 2aw + 2πi(ab + c)。
    γ₁: τ → (a₁τ + b₁)/(c₁τ + d₁), w → w/(c₁τ + d₁), ρ → ρ/(c₁τ + d₁)²,
    l̂ → l̂ − c₁w²/(2πi(c₁τ + d₁))。巻き数 m は新しい l̂ から決め直す。
    """
    image = p
    for gen, power in reversed(g.word):
        image = _act_letter(gen, power, image, b)
    if not image.in_domain():
        raise ModularDomainError(
            f"{g} による像 (τ={image.tau.value}, w={image.w}, ρ={image.rho}) が 𝒟^ρ の外です"
        )
    logger.debug(f"Point moved by {g}: m {p.m} -> {image.m}")
    return image


def act_twist_letter(gen: Generator, power: int, tw: TwistConfig) -> TwistConfig:
    a1, b1, b2, k = tw.alpha1, tw.beta1, tw.beta2, tw.kappa
    match gen, power:
        case Generator.A, 1:
            update = {"alpha1": a1 - k, "beta2": b2 + b1}
        case Generator.A, -1:
            update = {"alpha1": a1 + k, "beta2": b2 - b1}
        case Generator.B, 1:
            update = {"beta1": b1 - k, "beta2": b2 - a1}
        case Generator.B, -1:
            update = {"beta1": b1 + k, "beta2": b2 + a1}
        case Generator.C, 1:
            update = {"beta2": b2 - k - 0.5}
        case Generator.C, -1:
            update = {"beta2": b2 + k + 0.5}
        case Generator.T, 1:
            update = {"beta1": b1 - a1 - 0.5}
        case Generator.T, -1:
            update = {"beta1": b1 + a1 + 0.5}
        case Generator.S, 1:
            update = {"alpha1": -b1, "beta1": a1}
        case Generator.S, -1:
            update = {"alpha1": b1, "beta1": -a1}
    return tw.model_copy(update=update)


def act_twist(g: GroupElement, tw: TwistConfig) -> TwistConfig:
    """ねじれのパラメータ (α₁, β₁, β₂) への作用。κ と B は不変。"""
    for gen, power in reversed(g.word):
        tw = act_twist_letter(gen, power, tw)
    return tw
