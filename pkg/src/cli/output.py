import csv
import io
import json
import logging

import typer

from .run_config import RunConfig, RunParameters

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def complex_field(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def flatten(values: dict, prefix: str = "") -> dict:
    """入れ子の辞書を CSV の列に展開する。複素数 {re, im} は name_re, name_im の二列。"""
    flat: dict = {}
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, complex):
            value = complex_field(value)
        if isinstance(value, dict):
            flat.update(flatten(value, f"{name}_"))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def parameter_columns(params: RunParameters) -> dict:
    """CSV の行に埋め込む入力パラメータ"""
    return flatten(
        params.model_dump(
            mode="json",
            include={"tau", "w", "rho", "alpha1", "beta1", "beta2", "kappa", "B", "m"},
        )
    )


def document(cfg: RunConfig, command: str, result: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "target": cfg.target,
        "config": cfg.model_dump(mode="json", exclude={"out"}),
        "result": result,
    }


def render(cfg: RunConfig, doc: dict, rows: list[dict]) -> str:
    if cfg.format == "json":
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    buffer = io.StringIO()
    columns = list(dict.fromkeys(key for row in rows for key in row))
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def emit(cfg: RunConfig, doc: dict, rows: list[dict]) -> None:
    """出力先が指定されていればファイルへ、なければ標準出力へ書く。"""
    text = render(cfg, doc, rows)
    if cfg.out is None:
        typer.echo(text, nl=False)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {cfg.format} output to {cfg.out}")
