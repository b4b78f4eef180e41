import logging
from pathlib import Path

import typer
from pydantic import ValidationError

from container import container

from .checks import resolve_check
from .cli import DOMAIN_ERRORS, EXIT_CHECK_FAILED, RunConfigError
from .output import document, emit, parameter_columns
from .run_config import OutputFormat
from .targets import branch_record
from .utils import fail, load_or_exit, run_context

logger = logging.getLogger(__name__)


def handle_check_command(config_path: Path, out: Path | None, fmt: OutputFormat | None) -> None:
    from logging_config import load_logging_config

    load_logging_config(container.config.log_level())

    cfg = load_or_exit(config_path, out, fmt)
    params = cfg.parameters
    try:
        check = resolve_check(cfg.target)
        ctx = run_context(params)
        report = check.run(params, ctx)
    except (RunConfigError, ValidationError, ValueError, *DOMAIN_ERRORS) as e:
        fail(f"検査を実行できません: {type(e).__name__}: {e}")

    result = {
        **report.model_dump(mode="json"),
        "truncation": {"N": ctx.N, "quad_M": ctx.quad_M},
        "branch": branch_record(params),
    }
    row = {
        "check": report.name,
        **parameter_columns(params),
        "N": ctx.N,
        "quad_M": ctx.quad_M,
        "residual": report.residual,
        "tolerance": report.tolerance,
        "passed": report.passed,
        **branch_record(params),
    }
    emit(cfg, document(cfg, "check", result), [row])
    if not report.passed:
        logger.info(f"Check {report.name} failed: {report.residual:.3e} >= {report.tolerance:.3e}")
        raise typer.Exit(EXIT_CHECK_FAILED)
