import logging
import time
from pathlib import Path

from pydantic import ValidationError

from container import container

from .cli import DOMAIN_ERRORS, RunConfigError
from .output import complex_field, document, emit, parameter_columns
from .run_config import OutputFormat
from .targets import evaluate_target
from .utils import fail, load_or_exit, run_context

logger = logging.getLogger(__name__)


def handle_eval_command(config_path: Path, out: Path | None, fmt: OutputFormat | None) -> None:
    from logging_config import load_logging_config

    load_logging_config(container.config.log_level())

    cfg = load_or_exit(config_path, out, fmt)
    params = cfg.parameters
    logger.info(f"Evaluating {cfg.target}")
    started = time.perf_counter()
    try:
        ctx = run_context(params)
        outcome = evaluate_target(cfg.target, params, ctx)
    except (RunConfigError, ValidationError, ValueError, *DOMAIN_ERRORS) as e:
        fail(f"評価に失敗: {type(e).__name__}: {e}")
    elapsed = time.perf_counter() - started

    result = {
        "value": complex_field(outcome.value),
        "truncation": {"N": ctx.N, "quad_M": ctx.quad_M, "det_method": ctx.method.key.value},
        "branch": outcome.branch,
    }
    if cfg.record_timing:
        result["timing"] = {"seconds": elapsed}
    row = {
        "target": cfg.target,
        **parameter_columns(params),
        "N": ctx.N,
        "quad_M": ctx.quad_M,
        "sheet": outcome.branch["sheet"],
        "value_re": outcome.value.real,
        "value_im": outcome.value.imag,
    }
    emit(cfg, document(cfg, "eval", result), [row])
    logger.info(f"Finished {cfg.target} in {elapsed:.2f}s")
