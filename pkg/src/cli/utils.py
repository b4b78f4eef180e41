from pathlib import Path
from typing import NoReturn

import typer

from container import container
from src.determinants.regularized import resolve_method

from .cli import EXIT_INVALID, RunConfigError
from .run_config import OutputFormat, RunConfig, RunParameters, load_run_config
from .targets import RunContext


def fail(message: str, code: int = EXIT_INVALID) -> NoReturn:
    typer.echo(message, err=True)
    raise typer.Exit(code)


def load_or_exit(path: Path, out: Path | None, fmt: OutputFormat | None) -> RunConfig:
    try:
        return load_run_config(path, out, fmt)
    except RunConfigError as e:
        fail(f"設定の読み込みに失敗: {e}")


def run_context(params: RunParameters) -> RunContext:
    """実行設定の値を優先し、省略された値は環境変数の既定値で補う。"""
    method = (
        resolve_method(params.det_method)
        if params.det_method is not None
        else container.determinant_method()
    )
    return RunContext(
        budget=container.series_budget(),
        method=method,
        N=params.N if params.N is not None else container.config.truncation(),
        quad_M=params.quad_M if params.quad_M is not None else container.config.quad_m(),
    )
