from dataclasses import dataclass, field


class Genus2SzegoError(Exception):
    """種数2のセゲー核の評価中に発生したエラーの基底クラス。"""

    pass


class SewingDomainError(Genus2SzegoError):
    """縫合点または評価点が縫合の定義域にない場合のエラー。"""

    pass


class KernelSolveError(Genus2SzegoError):
    """I − T の分解に失敗した場合のエラー。"""

    pass


@dataclass(frozen=True)
class KernelEval:
    """S^(2)(x, y) の値と枝の記録"""

    value: complex
    truncation: int
    quad_M: int
    sheet: int
    B: int


@dataclass(frozen=True)
class DomainReport:
    """縫合の定義域 𝒟^ρ の判定結果"""

    valid: bool
    margin: float
    worst_lattice_point: complex
    diagnostics: list[str] = field(default_factory=list)
