from pathlib import Path
from typing import Annotated, Optional, cast, get_args

import click
import typer

from src.cli.check import handle_check_command
from src.cli.eval import handle_eval_command
from src.cli.run_config import OutputFormat
from src.cli.sweep import handle_sweep_command

app = typer.Typer(help="種数2のセゲー核と分配関数の評価・検査CLI")

ConfigOption = Annotated[
    Path,
    typer.Option("--config", help="実行設定のJSONファイル", exists=True, dir_okay=False),
]
OutOption = Annotated[
    Optional[Path],
    typer.Option("--out", help="出力先のパス（省略時は標準出力）"),
]
FormatOption = Annotated[
    Optional[str],
    typer.Option(
        "--format",
        help="出力形式（省略時は設定ファイルの値）",
        click_type=click.Choice(get_args(OutputFormat)),
    ),
]


@app.command("eval")
def eval_(config: ConfigOption, out: OutOption = None, fmt: FormatOption = None) -> None:
    """評価対象を一点で評価"""
    handle_eval_command(config, out, cast(Optional[OutputFormat], fmt))


@app.command()
def check(config: ConfigOption, out: OutOption = None, fmt: FormatOption = None) -> None:
    """恒等式の残差を検査（合格なら終了コード 0、不合格なら 1）"""
    handle_check_command(config, out, cast(Optional[OutputFormat], fmt))


@app.command()
def sweep(config: ConfigOption, out: OutOption = None, fmt: FormatOption = None) -> None:
    """1〜2本の軸に沿ってパラメータをスイープ"""
    handle_sweep_command(config, out, cast(Optional[OutputFormat], fmt))


if __name__ == "__main__":
    app()
