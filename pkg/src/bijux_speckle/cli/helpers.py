"""Support routines for the bijux-speckle command line."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import functools
import logging
from pathlib import Path
from typing import Any, ParamSpec, TypeVar

import typer

from bijux_speckle.config.env import SpeckleSettings
from bijux_speckle.datasets import LabeledDataset, load_idx, read_pgm_dir
from bijux_speckle.errors import ConfigInvalidError, SpeckleError
from bijux_speckle.measurement import (
    MeasurementTable,
    read_measurements_binary,
    read_measurements_csv,
)
from bijux_speckle.utilities.logger_manager import LoggerConfig, LoggerManager

logger = logging.getLogger(__name__)

UNEXPECTED_EXIT_CODE = 1

_P = ParamSpec("_P")
_R = TypeVar("_R")


@dataclass
class CliState:
    settings: SpeckleSettings
    logger_manager: LoggerManager


def configure_logging(
    settings: SpeckleSettings,
    *,
    log_level: str | None = None,
    structured: bool | None = None,
    log_dir: Path | None = None,
) -> LoggerManager:
    config = LoggerConfig(
        log_level=(log_level or settings.log_level).upper(),
        log_dir=log_dir,
        structured_logging=settings.structured_logging if structured is None else structured,
    )
    return LoggerManager(config)


def handle_errors(command: Callable[_P, _R]) -> Callable[_P, _R]:
    """Map domain errors onto exit codes; anything else exits with 1."""

    @functools.wraps(command)
    def wrapper(*args: _P.args, **kwargs: _P.kwargs) -> _R:
        try:
            return command(*args, **kwargs)
        except typer.Exit:
            raise
        except ConfigInvalidError as exc:
            for line in exc.errors:
                typer.echo(f"config error: {line}", err=True)
            raise typer.Exit(code=exc.exit_code) from exc
        except SpeckleError as exc:
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(code=exc.exit_code) from exc
        except Exception as exc:
            logger.exception("Unexpected failure")
            typer.echo(f"unexpected error: {exc}", err=True)
            raise typer.Exit(code=UNEXPECTED_EXIT_CODE) from exc

    return wrapper


def load_images(
    images: Path | None, labels: Path | None, pgm_dir: Path | None
) -> LabeledDataset:
    """IDX pair, or a PGM directory whose images all get label 0."""
    if pgm_dir is not None:
        frames = read_pgm_dir(pgm_dir)
        return LabeledDataset.from_images(frames, [0] * len(frames))
    if images is None or labels is None:
        raise ConfigInvalidError(["--images and --labels are required without --pgm-dir"])
    return load_idx(images, labels)


def read_measurement_table(path: Path) -> MeasurementTable:
    if path.suffix.lower() == ".csv":
        return read_measurements_csv(path)
    return read_measurements_binary(path)


def echo_mapping(payload: dict[str, Any]) -> None:
    width = max((len(key) for key in payload), default=0)
    for key, value in payload.items():
        typer.echo(f"{key.ljust(width)}  {value}")
