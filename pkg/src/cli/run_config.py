import cmath
import json
import logging
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.determinants.determinants import DeterminantMethodKey
from src.elliptic_core.elliptic_core import Tau
from src.modular.modular import GroupElement, LiftedPoint
from src.szego_genus1.szego_genus1 import SewingConfig, TwistConfig

from .cli import RunConfigError, SweepGridError

logger = logging.getLogger(__name__)

Command = Literal["eval", "check", "sweep"]
OutputFormat = Literal["json", "csv"]
AxisName = Literal[
    "alpha1",
    "beta1",
    "beta2",
    "kappa",
    "rho_abs",
    "rho_arg",
    "w_re",
    "w_im",
    "tau_re",
    "tau_im",
    "N",
]
AxisScale = Literal["linear", "log"]

MAX_GRID_POINTS = 10_000


class ComplexValue(BaseModel):
    """{re, im} で表した複素数。数値や "0.1+1.1j" のような文字列も受け付ける。"""

    re: float = Field(description="実部")
    im: float = Field(default=0.0, description="虚部")

    model_config = {"frozen": True}

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data):
        if isinstance(data, str):
            try:
                data = complex(data.replace(" ", "").replace("i", "j"))
            except ValueError as e:
                raise ValueError(f"複素数として解釈できません: {data}") from e
        if isinstance(data, (int, float, complex)):
            return {"re": complex(data).real, "im": complex(data).imag}
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return {"re": data[0], "im": data[1]}
        return data

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        return cls(re=float(z.real), im=float(z.imag))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class RunParameters(BaseModel):
    """一回の評価・検査で使うパラメータ"""

    tau: ComplexValue = Field(default=ComplexValue(re=0.1, im=1.1), description="モジュラス τ")
    w: ComplexValue = Field(default=ComplexValue(re=0.6, im=1.7), description="二つ目の穴の位置 w")
    rho: ComplexValue = Field(
        default=ComplexValue.of(cmath.rect(1e-3, 0.4)), description="縫合パラメータ ρ"
    )
    alpha1: float = Field(default=0.2, description="特性 α₁")
    beta1: float = Field(default=0.3, description="特性 β₁")
    beta2: float = Field(default=0.15, description="特性 β₂")
    kappa: float = Field(default=0.1, gt=-0.5, lt=0.5, description="ねじれ κ")
    B: int = Field(default=1, description="二重被覆の枝を選ぶ奇数")
    m: int = Field(default=0, description="持ち上げた対数 l̂ の巻き数")
    N: Optional[int] = Field(default=None, ge=0, description="打ち切り次数（省略時は環境変数）")
    quad_M: Optional[int] = Field(default=None, ge=8, description="求積点数（省略時は環境変数）")
    tolerance: float = Field(default=1e-6, gt=0, description="検査の許容誤差")
    det_method: Optional[DeterminantMethodKey] = Field(
        default=None, description="行列式の計算方法（省略時は環境変数）"
    )
    omega: Optional[list[list[ComplexValue]]] = Field(
        default=None, description="外部から与える周期行列 Ω"
    )
    x: list[ComplexValue] = Field(default_factory=list, description="評価点 x_i")
    y: list[ComplexValue] = Field(default_factory=list, description="評価点 y_j")
    generator: str = Field(default="T", description="不変性の検査に使う群の語")
    chi_perturbation: float = Field(default=1.0, description="χ に掛ける係数（故障注入）")
    weight_cutoff: float = Field(default=4.0, description="フォック和の重みの打ち切り")
    frobenius_n: int = Field(default=2, ge=1, le=4, description="フロベニウス恒等式の次数 n")
    max_mode: int = Field(default=2, ge=1, description="係数抽出で調べるモードの上限")
    samples: int = Field(default=10, ge=1, description="乱数で選ぶ点の個数")
    seed: int = Field(default=0, description="乱数のシード")

    model_config = {"frozen": True}

    @field_validator("B")
    @classmethod
    def _odd_branch(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"B は奇数でなければなりません: {value}")
        return value

    @field_validator("omega")
    @classmethod
    def _square_omega(cls, value):
        if value is not None and (len(value) != 2 or any(len(row) != 2 for row in value)):
            raise ValueError("Ω は 2×2 でなければなりません")
        return value

    def twist(self) -> TwistConfig:
        return TwistConfig(
            alpha1=self.alpha1, beta1=self.beta1, beta2=self.beta2, kappa=self.kappa, B=self.B
        )

    def lifted_point(self) -> LiftedPoint:
        return LiftedPoint(Tau(self.tau.value), self.w.value, self.rho.value, self.m)

    def sewing(self, sheet: int | None = None) -> SewingConfig:
        """l̂ の巻き数 m から決めた葉での縫合点"""
        if sheet is None:
            return self.lifted_point().sewing_config(self.twist())
        return SewingConfig.at(self.tau.value, self.w.value, self.rho.value, sheet=sheet)

    def group_element(self) -> GroupElement:
        return GroupElement.parse_word(self.generator)

    def omega_matrix(self) -> np.ndarray | None:
        if self.omega is None:
            return None
        return np.array([[z.value for z in row] for row in self.omega], dtype=complex)

    def with_axis(self, name: AxisName, value: float) -> "RunParameters":
        """スイープ軸の値を一つ反映したパラメータ"""
        match name:
            case "rho_abs":
                update = {"rho": ComplexValue.of(cmath.rect(value, cmath.phase(self.rho.value)))}
            case "rho_arg":
                update = {"rho": ComplexValue.of(cmath.rect(abs(self.rho.value), value))}
            case "w_re" | "w_im" | "tau_re" | "tau_im":
                field, part = name.split("_")
                current = getattr(self, field)
                update = {field: current.model_copy(update={part: value})}
            case "N":
                update = {"N": int(round(value))}
            case _:
                update = {name: value}
        return self.model_validate({**self.model_dump(), **update})


class SweepAxis(BaseModel):
    """スイープの軸"""

    name: AxisName = Field(description="変化させるパラメータ")
    start: float = Field(description="始点")
    stop: float = Field(description="終点")
    num: int = Field(ge=0, description="点の個数")
    scale: AxisScale = Field(default="linear", description="等間隔（linear）か等比（log）か")

    model_config = {"frozen": True}

    def values(self) -> np.ndarray:
        if self.scale == "log":
            if self.start <= 0 or self.stop <= 0:
                raise SweepGridError(f"等比の軸 {self.name} の端点は正でなければなりません")
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


class RunConfig(BaseModel):
    """実行設定ファイルの内容"""

    target: str = Field(description="評価対象または検査の名前")
    parameters: RunParameters = Field(default_factory=RunParameters, description="パラメータ")
    axes: list[SweepAxis] = Field(default_factory=list, description="スイープの軸（1〜2本）")
    out: Optional[Path] = Field(default=None, description="出力先（省略時は標準出力）")
    format: OutputFormat = Field(default="json", description="出力形式")
    record_timing: bool = Field(default=False, description="経過時間を出力に含めるか")

    model_config = {"frozen": True}

    @field_validator("axes")
    @classmethod
    def _at_most_two_axes(cls, axes: list[SweepAxis]) -> list[SweepAxis]:
        if len(axes) > 2:
            raise ValueError(f"スイープの軸は2本までです: {len(axes)}")
        return axes


def load_run_config(
    path: Path,
    out: Path | None = None,
    fmt: OutputFormat | None = None,
) -> RunConfig:
    """JSONの実行設定を読み、コマンドラインの --out / --format で上書きする。"""
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise RunConfigError(f"設定ファイル {path} を読めません: {e}") from e
    if out is not None:
        raw["out"] = str(out)
    if fmt is not None:
        raw["format"] = fmt
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as e:
        raise RunConfigError(f"設定ファイル {path} の検証に失敗しました:\n{e}") from e
    logger.debug(f"Loaded run config for target {cfg.target}")
    return cfg
