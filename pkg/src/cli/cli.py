from src.determinants.determinants import DeterminantError
from src.elliptic_core.elliptic_core import EllipticCoreError
from src.genus2_szego.genus2_szego import Genus2SzegoError
from src.modular.modular import ModularError
from src.partition.partition import PartitionError
from src.szego_genus1.szego_genus1 import SzegoError


class RunConfigError(Exception):
    """実行設定ファイルの読み込みや検証に失敗した場合のエラー。"""

    pass


class SweepGridError(RunConfigError):
    """スイープの格子が空または大きすぎる場合のエラー。"""

    pass


class UnknownTargetError(RunConfigError):
    """評価対象や検査の名前が登録されていない場合のエラー。"""

    pass


# 検証エラー（終了コード 2）として扱う数値ライブラリのエラー
DOMAIN_ERRORS = (
    EllipticCoreError,
    SzegoError,
    DeterminantError,
    Genus2SzegoError,
    PartitionError,
    ModularError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
