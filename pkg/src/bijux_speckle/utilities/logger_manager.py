"""Logger manager with colored console output, JSON records and stage metrics.

Library modules only call ``logging.getLogger(__name__)`` and attach data with
``extra={"context": {...}}``; the CLI builds one ``LoggerManager`` that wires
handlers onto the package logger.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
import datetime
from enum import Enum
import logging
from logging import Handler, Logger, LogRecord
from logging.handlers import RotatingFileHandler
from pathlib import Path
import sys
import threading
from typing import Any, ClassVar

import colorlog
import orjson

PACKAGE_LOGGER = "bijux_speckle"

_bound_context: ContextVar[dict[str, Any] | None] = ContextVar(
    "bijux_speckle_log_context", default=None
)


class MetricType(Enum):
    """Enum for supported metric types."""

    COUNTER = "counter"
    GAUGE = "gauge"
    HISTOGRAM = "histogram"


@dataclass
class LoggerConfig:
    """Configuration for LoggerManager."""

    log_level: str = "INFO"
    log_dir: Path | None = None
    log_file_name: str = "bijux-speckle.log"
    max_file_size_mb: int = 10
    backup_count: int = 3
    structured_logging: bool = False
    telemetry_enabled: bool = True
    log_colors: dict[str, str] | None = None
    histogram_buckets: list[float] = field(
        default_factory=lambda: [0.1, 0.5, 1.0, 5.0, 30.0, 120.0, float("inf")]
    )

    DEFAULT_LOG_COLORS: ClassVar[dict[str, str]] = {
        "DEBUG": "cyan",
        "INFO": "green",
        "WARNING": "yellow",
        "ERROR": "red",
        "CRITICAL": "red,bg_white",
    }

    def __post_init__(self) -> None:
        self.log_level = self.log_level.upper()
        if self.log_dir is not None:
            self.log_dir = Path(self.log_dir).resolve()
        self.log_colors = self.log_colors or dict(self.DEFAULT_LOG_COLORS)


class ContextFilter(logging.Filter):
    """Merge the context bound by ``LoggerManager.context`` into each record."""

    def filter(self, record: LogRecord) -> bool:
        bound = _bound_context.get()
        if bound:
            explicit = getattr(record, "context", None) or {}
            record.context = {**bound, **explicit}
        return True


class StructuredFormatter(logging.Formatter):
    """One JSON object per line."""

    def format(self, record: LogRecord) -> str:
        payload: dict[str, Any] = {
            "timestamp": datetime.datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "line": record.lineno,
            "context": getattr(record, "context", {}),
        }
        metrics = getattr(record, "metrics", None)
        if metrics:
            payload["metrics"] = metrics
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return orjson.dumps(payload, default=str).decode("utf-8")


class LoggerManager:
    """Configures the package logger once and collects stage telemetry."""

    def __init__(self, config: LoggerConfig | None = None) -> None:
        self.config = config or LoggerConfig()
        self._metrics: dict[str, dict[str, Any]] = defaultdict(
            lambda: {
                "type": MetricType.COUNTER.value,
                "value": 0.0,
                "count": 0,
                "histogram": defaultdict(int),
            }
        )
        self._metrics_lock = threading.Lock()
        self._logger = self._configure_logger()

    def get_logger(self) -> Logger:
        return self._logger

    def _configure_logger(self) -> Logger:
        logger = logging.getLogger(PACKAGE_LOGGER)
        logger.setLevel(logging.getLevelName(self.config.log_level))
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
        logger.addHandler(self._console_handler())
        file_handler = self._file_handler()
        if file_handler is not None:
            logger.addHandler(file_handler)
        logger.propagate = False
        return logger

    def _console_handler(self) -> Handler:
        handler = colorlog.StreamHandler(sys.stderr)
        if self.config.structured_logging:
            handler.setFormatter(StructuredFormatter())
        else:
            handler.setFormatter(
                colorlog.ColoredFormatter(
                    "%(log_color)s%(asctime)s - [%(levelname)s] %(name)s: %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                    log_colors=self.config.log_colors,
                )
            )
        handler.addFilter(ContextFilter())
        return handler

    def _file_handler(self) -> Handler | None:
        if self.config.log_dir is None:
            return None
        try:
            self.config.log_dir.mkdir(parents=True, exist_ok=True)
            handler = RotatingFileHandler(
                self.config.log_dir / self.config.log_file_name,
                maxBytes=self.config.max_file_size_mb * 1024 * 1024,
                backupCount=self.config.backup_count,
                encoding="utf-8",
            )
        except OSError as exc:
            print(f"Failed to create RotatingFileHandler: {exc}", file=sys.stderr)
            return None
        handler.setFormatter(StructuredFormatter())
        handler.addFilter(ContextFilter())
        return handler

    @contextmanager
    def context(self, **context_kwargs: Any) -> Iterator[Logger]:
        """Attach ``context_kwargs`` to every record logged inside the block."""
        current = _bound_context.get() or {}
        token = _bound_context.set({**current, **context_kwargs})
        try:
            yield self._logger
        finally:
            _bound_context.reset(token)

    def log_metric(
        self,
        metric_name: str,
        value: float,
        metric_type: MetricType = MetricType.COUNTER,
        tags: Mapping[str, str] | None = None,
    ) -> None:
        if not self.config.telemetry_enabled:
            return
        tags_dict = dict(tags or {})
        with self._metrics_lock:
            metric = self._metrics[metric_name]
            metric["type"] = metric_type.value
            metric["tags"] = tags_dict
            metric["count"] += 1
            if metric_type is MetricType.GAUGE:
                metric["value"] = value
            else:
                metric["value"] += value
            if metric_type is MetricType.HISTOGRAM:
                for bucket in self.config.histogram_buckets:
                    if value <= bucket:
                        metric["histogram"][f"le_{bucket}"] += 1
                        break
        self._logger.debug(
            f"Metric recorded: {metric_name} = {value}",
            extra={"metrics": {metric_name: {"value": value, "tags": tags_dict}}},
        )

    def get_metrics(self) -> dict[str, dict[str, Any]]:
        with self._metrics_lock:
            return {
                name: {**metric, "histogram": dict(metric["histogram"])}
                for name, metric in self._metrics.items()
            }

    def export_metrics_to_file(self, file_path: str | Path) -> None:
        path = Path(file_path)
        path.write_bytes(
            orjson.dumps(self.get_metrics(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
        )
        self._logger.info(
            "Metrics exported", extra={"context": {"metrics_file": str(path)}}
        )

    def flush(self) -> None:
        for handler in self._logger.handlers:
            handler.flush()
