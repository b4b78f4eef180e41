import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, reduce

import numpy as np

from src.elliptic_core.elliptic_core import DEFAULT_BUDGET, TWO_PI_I, SeriesBudget, Tau
from src.elliptic_core.theta import log_prime_form, prime_form_K
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig


class ModularError(Exception):
    """群 L の作用の計算中に発生したエラーの基底クラス。"""

    pass


class ModularDomainError(ModularError):
    """作用の像が縫合の定義域 𝒟^ρ の外に出た場合のエラー。"""

    pass


class LiftInconsistencyError(ModularError):
    """持ち上げた対数 l̂ が exp(l̂) = −ρ/K(w)² を満たさない場合のエラー。"""

    pass


class UnknownGeneratorError(ModularError):
    """生成元の名前が解釈できない場合のエラー。"""

    pass


class Generator(str, Enum):
    """群 L の生成元"""

    A = "A"
    B = "B"
    C = "C"
    S = "S"
    T = "T"


# μ(a, b, c) または γ₁ = (a₁, b₁, c₁, d₁) としての生成元のパラメータ
HEISENBERG: dict[Generator, tuple[int, int, int]] = {
    Generator.A: (1, 0, 0),
    Generator.B: (0, 1, 0),
    Generator.C: (0, 0, 1),
}
MODULAR: dict[Generator, tuple[int, int, int, int]] = {
    Generator.S: (0, -1, 1, 0),
    Generator.T: (1, 1, 0, 1),
}


def mu_matrix(a: int, b: int, c: int) -> np.ndarray:
    return np.array(
        [[1, 0, 0, b], [a, 1, b, c], [0, 0, 1, -a], [0, 0, 0, 1]], dtype=np.int64
    )


def gamma_matrix(a1: int, b1: int, c1: int, d1: int) -> np.ndarray:
    if a1 * d1 - b1 * c1 != 1:
        raise ModularError(f"a₁d₁ − b₁c₁ = 1 を満たしません: {(a1, b1, c1, d1)}")
    return np.array(
        [[a1, 0, b1, 0], [0, 1, 0, 0], [c1, 0, d1, 0], [0, 0, 0, 1]], dtype=np.int64
    )


def heisenberg_params(gen: Generator, power: int) -> tuple[int, int, int]:
    """μ(a, b, c)⁻¹ = μ(−a, −b, −c)"""
    a, b, c = HEISENBERG[gen]
    return (a, b, c) if power > 0 else (-a, -b, -c)


def modular_params(gen: Generator, power: int) -> tuple[int, int, int, int]:
    a1, b1, c1, d1 = MODULAR[gen]
    return (a1, b1, c1, d1) if power > 0 else (d1, -b1, -c1, a1)


def generator_matrix(gen: Generator, power: int = 1) -> np.ndarray:
    if gen in HEISENBERG:
        return mu_matrix(*heisenberg_params(gen, power))
    return gamma_matrix(*modular_params(gen, power))


SYMPLECTIC_FORM = np.block(
    [[np.zeros((2, 2), dtype=np.int64), np.eye(2, dtype=np.int64)],
     [-np.eye(2, dtype=np.int64), np.zeros((2, 2), dtype=np.int64)]]
)

_TOKEN = re.compile(r"^([A-Za-z]+)(?:\^(-?\d+))?$")

Letter = tuple[Generator, int]


@dataclass(frozen=True)
class GroupElement:
    """
    生成元 {A, B, C, S, T} とその逆元の語で表した L の元。

    語 g₁g₂…g_n は g_n から順に作用する。
    """

    word: tuple[Letter, ...] = ()

    def __post_init__(self):
        for gen, power in self.word:
            if not isinstance(gen, Generator) or power not in (1, -1):
                raise UnknownGeneratorError(f"不正な文字です: {(gen, power)}")

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(())

    @classmethod
    def of(cls, gen: Generator | str, power: int = 1) -> "GroupElement":
        try:
            gen = Generator(gen)
        except ValueError as e:
            raise UnknownGeneratorError(f"不明な生成元です: {gen}") from e
        sign = 1 if power > 0 else -1
        return cls(((gen, sign),) * abs(power))

    @classmethod
    def mu(cls, a: int, b: int, c: int) -> "GroupElement":
        """μ(a, b, c) = A^a B^b C^{c − ab}"""
        return cls.of(Generator.A, a) * cls.of(Generator.B, b) * cls.of(Generator.C, c - a * b)

    @classmethod
    def parse_word(cls, text: str) -> "GroupElement":
        """"A B^-1 T" のような空白区切りの語を読む。"1" や空文字列は単位元。"""
        element = cls.identity()
        for token in text.split():
            if token == "1":
                continue
            match = _TOKEN.match(token)
            if not match:
                raise UnknownGeneratorError(f"語を解釈できません: {token}")
            name, power = match.group(1), match.group(2)
            element = element * cls.of(name, int(power) if power else 1)
        return element

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.word + other.word)

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple((gen, -power) for gen, power in reversed(self.word)))

    @cached_property
    def matrix(self) -> np.ndarray:
        return reduce(
            np.matmul,
            (generator_matrix(gen, power) for gen, power in self.word),
            np.eye(4, dtype=np.int64),
        )

    def is_symplectic(self) -> bool:
        M = self.matrix
        return bool(np.array_equal(M.T @ SYMPLECTIC_FORM @ M, SYMPLECTIC_FORM))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(4, dtype=np.int64)))

    def __str__(self) -> str:
        if not self.word:
            return "1"
        return " ".join(gen.value if power > 0 else f"{gen.value}^-1" for gen, power in self.word)


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """[g, h] = g h g⁻¹ h⁻¹"""
    return g * h * g.inverse() * h.inverse()


def defining_relations() -> dict[str, GroupElement]:
    A, B, C = (GroupElement.of(gen) for gen in (Generator.A, Generator.B, Generator.C))
    return {
        "[A,B]C^-2": commutator(A, B) * GroupElement.of(Generator.C, -2),
        "[A,C]": commutator(A, C),
        "[B,C]": commutator(B, C),
    }


# l̂ の整合性の許容誤差
LIFT_TOL = 1e-6


def _principal_log_ratio(tau: Tau, w: complex, rho: complex, b: SeriesBudget) -> complex:
    """Log(−ρ/K(w, τ)²) の主値"""
    return complex(np.log(-rho / complex(prime_form_K(w, tau, b)) ** 2))


@dataclass(frozen=True)
class LiftedPoint:
    """被覆上の点 (τ, w, ρ) と l̂ の巻き数 m"""

    tau: Tau
    w: complex
    rho: complex
    m: int = 0

    def __post_init__(self):
        if not isinstance(self.tau, Tau):
            object.__setattr__(self, "tau", Tau(self.tau))
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "rho", complex(self.rho))
        if self.rho == 0:
            raise ModularDomainError("ρ = 0 は定義域の外です")

    def lhat(self, b: SeriesBudget = DEFAULT_BUDGET) -> complex:
        """l̂ = Log(−ρ/K(w)²) + 2πim"""
        return _principal_log_ratio(self.tau, self.w, self.rho, b) + TWO_PI_I * self.m

    @classmethod
    def from_lhat(
        cls,
        tau: Tau,
        w: complex,
        rho: complex,
        lhat: complex,
        b: SeriesBudget = DEFAULT_BUDGET,
    ) -> "LiftedPoint":
        """l̂ の値から巻き数を復元する。l̂ が主値と 2πi の整数倍だけ違わなければエラー。"""
        principal = _principal_log_ratio(tau, w, rho, b)
        winding = (lhat - principal) / TWO_PI_I
        m = round(winding.real)
        if abs(winding - m) > LIFT_TOL * max(1.0, abs(lhat) / (2 * math.pi)):
            raise LiftInconsistencyError(
                f"exp(l̂) が −ρ/K(w)² と一致しません（巻き数 {winding}）"
            )
        return cls(tau, w, rho, m)

    def sewing_sheet(self, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET) -> int:
        """(l̂ + 2 Log K(w) − iπB − Log ρ)/2πi（整数）"""
        log_k = complex(log_prime_form(self.w, self.tau, b))
        sheet = (self.lhat(b) + 2 * log_k - 1j * math.pi * tw.B - np.log(self.rho)) / TWO_PI_I
        return round(sheet.real)

    def sewing_config(self, tw: TwistConfig, b: SeriesBudget = DEFAULT_BUDGET) -> SewingConfig:
        return SewingConfig.at(self.tau, self.w, self.rho, sheet=self.sewing_sheet(tw, b))

    def in_domain(self) -> bool:
        margin, _ = SewingConfig.at(self.tau, self.w, self.rho).domain_margin()
        return margin > 0
