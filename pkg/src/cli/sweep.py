import logging
import math
from functools import reduce
from itertools import product
from pathlib import Path

import typer
from pydantic import ValidationError

from container import container

from .checks import CHECKS
from .cli import DOMAIN_ERRORS, EXIT_CHECK_FAILED, RunConfigError, SweepGridError, UnknownTargetError
from .output import document, emit
from .run_config import MAX_GRID_POINTS, OutputFormat, RunConfig, RunParameters
from .targets import EVAL_TARGETS, branch_record, evaluate_target
from .utils import fail, load_or_exit, run_context

logger = logging.getLogger(__name__)


def sweep_grid(cfg: RunConfig) -> list[tuple[float, ...]]:
    """軸の値の直積。空または MAX_GRID_POINTS を超えるとエラー。"""
    if not cfg.axes:
        raise SweepGridError("スイープの軸が指定されていません")
    size = math.prod(axis.num for axis in cfg.axes)
    if size == 0:
        raise SweepGridError("スイープの格子が空です")
    if size > MAX_GRID_POINTS:
        raise SweepGridError(f"格子点 {size} 個は上限 {MAX_GRID_POINTS} を超えています")
    return [tuple(float(v) for v in point) for point in product(*(a.values() for a in cfg.axes))]


def _sweep_row(cfg: RunConfig, point: tuple[float, ...]) -> dict:
    row: dict = {axis.name: value for axis, value in zip(cfg.axes, point)}
    try:
        params: RunParameters = reduce(
            lambda p, av: p.with_axis(av[0].name, av[1]), zip(cfg.axes, point), cfg.parameters
        )
        ctx = run_context(params)
        row.update(branch_record(params))
        if cfg.target in EVAL_TARGETS:
            value = evaluate_target(cfg.target, params, ctx).value
            row.update(value_re=value.real, value_im=value.imag)
        else:
            report = CHECKS[cfg.target].run(params, ctx)
            row.update(residual=report.residual, passed=report.passed)
        row["error"] = ""
    except (RunConfigError, ValidationError, ValueError, *DOMAIN_ERRORS) as e:
        logger.warning(f"Sweep point {point} failed: {e}")
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def handle_sweep_command(config_path: Path, out: Path | None, fmt: OutputFormat | None) -> None:
    from logging_config import load_logging_config

    load_logging_config(container.config.log_level())

    cfg = load_or_exit(config_path, out, fmt)
    try:
        if cfg.target not in EVAL_TARGETS and cfg.target not in CHECKS:
            raise UnknownTargetError(f"不明な評価対象または検査です: {cfg.target}")
        grid = sweep_grid(cfg)
    except RunConfigError as e:
        fail(f"スイープを実行できません: {e}")

    logger.info(f"Sweeping {cfg.target} over {len(grid)} points")
    with container.sweep_executor() as executor:
        rows = list(executor.map(lambda point: _sweep_row(cfg, point), grid))

    emit(cfg, document(cfg, "sweep", {"rows": rows}), rows)
    failed = [row for row in rows if row["error"] or row.get("passed") is False]
    if failed:
        logger.info(f"{len(failed)} of {len(rows)} sweep points failed")
        raise typer.Exit(EXIT_CHECK_FAILED)
