"""Experiment orchestration: ingest, scatter, measure, then train, entropy or battery.

Every grid cell is independent; cells run on a thread pool and are collected
in grid order, so the CSVs do not depend on ``workers``. Result files are
written atomically and ``manifest.json`` is written last.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
import itertools
import logging
from pathlib import Path
import threading
import time
from typing import Any, TypeVar

import numpy as np
from numpy.typing import NDArray
import orjson

from bijux_speckle.config.env import get_settings
from bijux_speckle.datasets import (
    LabeledDataset,
    load_idx,
    resize_dataset,
    resize_nearest,
    subset,
)
from bijux_speckle.decoder import evaluate, export_pattern_bank, train
from bijux_speckle.entropy import dataset_entropy, write_entropy_csv
from bijux_speckle.enums import ExperimentKind, TrainMode
from bijux_speckle.errors import (
    ConfigInvalidError,
    ConfigParseError,
    ParamOutOfRangeError,
    SpeckleError,
    StageFailureError,
)
from bijux_speckle.measurement import measure, measure_dataset, stack_values
from bijux_speckle.nist import (
    BatteryReport,
    BitStream,
    battery_table_csv,
    image_bits,
    quantize_with,
    run_battery,
    write_battery_text,
)
from bijux_speckle.patterns import (
    FovMask,
    HadamardSampler,
    PatternSet,
    build_hadamard_patterns,
    export_patterns_binary,
    make_mask,
    modulator_patterns,
)
from bijux_speckle.scattering import (
    ScatterOperator,
    build_operator,
    scatter,
    scatter_dataset,
)
from bijux_speckle.utilities.hashing import file_hash, payload_hash
from bijux_speckle.utilities.io import (
    atomic_write_bytes,
    atomic_write_csv,
    atomic_write_text,
)
from bijux_speckle.utilities.logger_manager import LoggerManager, MetricType
from bijux_speckle.utilities.rng import SplitMix64

from .config import ExperimentConfig, config_to_dict, dump_config
from .manifest import (
    MANIFEST_FILE,
    RunManifest,
    config_from_manifest,
    read_manifest,
    write_manifest,
)

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.yaml"
METRICS_FILE = "metrics.json"

_T = TypeVar("_T")
_R = TypeVar("_R")


@dataclass(frozen=True)
class RunResult:
    output_dir: Path
    outputs: dict[str, Path]
    manifest: RunManifest


@dataclass(frozen=True)
class Cell:
    """One grid point of an accuracy sweep."""

    param: int | None
    strength: float
    rate: float
    seed: int

    def key(self) -> dict[str, Any]:
        return {
            "param": self.param,
            "strength": self.strength,
            "rate": self.rate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Splits:
    native_train: LabeledDataset
    train: LabeledDataset
    test: LabeledDataset | None


@dataclass
class _Timings:
    manager: LoggerManager | None = None
    values: dict[str, float] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def record(self, name: str, seconds: float) -> None:
        with self.lock:
            self.values[name] = self.values.get(name, 0.0) + seconds
        if self.manager is not None:
            self.manager.log_metric(
                f"stage.{name}.seconds", seconds, MetricType.HISTOGRAM
            )


@contextmanager
def _stage(name: str, timings: _Timings) -> Iterator[None]:
    """Time a stage and turn domain failures into ``StageFailureError``."""
    start = time.perf_counter()
    try:
        yield
    except (ConfigInvalidError, ConfigParseError, StageFailureError):
        raise
    except (SpeckleError, OSError) as exc:
        logger.error(
            "Stage failed",
            extra={"context": {"stage": name, "error": str(exc)}},
        )
        raise StageFailureError(name, exc) from exc
    finally:
        timings.record(name, time.perf_counter() - start)


def _map_ordered(
    fn: Callable[[_T], _R], items: Sequence[_T], workers: int
) -> list[_R]:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _derived_seed(seed: int, *keys: int | str) -> int:
    return SplitMix64(seed).spawn(*keys).seed


def load_splits(cfg: ExperimentConfig) -> Splits:
    spec = cfg.dataset
    native = load_idx(spec.train_images, spec.train_labels, spec.num_classes)
    train_set = (
        subset(native, spec.train_size, spec.subset_seed) if spec.train_size else native
    )
    test_set = None
    if spec.test_images is not None and spec.test_labels is not None:
        test_set = load_idx(spec.test_images, spec.test_labels, spec.num_classes)
        if spec.test_size:
            test_set = subset(test_set, spec.test_size, spec.subset_seed)
    if spec.width is not None and spec.height is not None:
        train_set = resize_dataset(train_set, spec.width, spec.height)
        if test_set is not None:
            test_set = resize_dataset(test_set, spec.width, spec.height)
    return Splits(native_train=native, train=train_set, test=test_set)


def _dataset_record(cfg: ExperimentConfig, splits: Splits) -> dict[str, Any]:
    spec = cfg.dataset
    files = {
        "train_images": spec.train_images,
        "train_labels": spec.train_labels,
        "test_images": spec.test_images,
        "test_labels": spec.test_labels,
    }
    return {
        "files": {
            name: {"path": str(path), "sha256": file_hash(path)}
            for name, path in files.items()
            if path is not None
        },
        "native": {
            "count": len(splits.native_train),
            "width": splits.native_train.width,
            "height": splits.native_train.height,
        },
        "train_count": len(splits.train),
        "test_count": 0 if splits.test is None else len(splits.test),
        "width": splits.train.width,
        "height": splits.train.height,
    }


def _active_inputs(ds: LabeledDataset, mask: FovMask) -> NDArray[np.float64]:
    flat = ds.pixels.reshape(len(ds), -1)
    return flat[:, mask.active_indices].astype(np.float64)


class _SweepRunner:
    """Shared state of one run: loaded splits, scattered copies, timings."""

    def __init__(
        self, cfg: ExperimentConfig, output_dir: Path, timings: _Timings
    ) -> None:
        self.cfg = cfg
        self.output_dir = output_dir
        self.timings = timings
        self.outputs: dict[str, Path] = {}
        self.cells: list[dict[str, Any]] = []
        with _stage("ingest", timings):
            self.splits = load_splits(cfg)
        self._scattered: dict[float, tuple[LabeledDataset, LabeledDataset | None]] = {}
        self._operators: dict[float, ScatterOperator] = {}

    @property
    def width(self) -> int:
        return self.splits.train.width

    @property
    def height(self) -> int:
        return self.splits.train.height

    def operator(self, strength: float) -> ScatterOperator:
        if strength not in self._operators:
            with _stage("scatter", self.timings):
                self._operators[strength] = build_operator(
                    self.cfg.scatter.config_for(strength), self.width, self.height
                )
        return self._operators[strength]

    def scattered(self, strength: float) -> tuple[LabeledDataset, LabeledDataset | None]:
        if strength not in self._scattered:
            op = self.operator(strength)
            with _stage("scatter", self.timings):
                train_set = scatter_dataset(op, self.splits.train)
                test_set = (
                    None
                    if self.splits.test is None
                    else scatter_dataset(op, self.splits.test)
                )
            self._scattered[strength] = (train_set, test_set)
        return self._scattered[strength]

    def grid(self) -> list[Cell]:
        cfg = self.cfg
        return [
            Cell(param, strength, rate, seed)
            for param, strength, rate, seed in itertools.product(
                cfg.mask.cells(), cfg.scatter.strengths, cfg.rates, cfg.seeds
            )
        ]

    def write_csv(self, name: str, header: list[str], rows: list[list[object]]) -> None:
        self.outputs[name] = atomic_write_csv(self.output_dir / name, header, rows)

    # accuracy sweeps -----------------------------------------------------

    def _patterns(self, cell: Cell) -> tuple[FovMask, PatternSet]:
        mask = make_mask(self.cfg.mask.strategy, self.width, self.height, cell.param)
        return mask, build_hadamard_patterns(
            self.width, self.height, mask, cell.rate, cell.seed
        )

    def _score(
        self,
        acq: PatternSet,
        train_set: LabeledDataset,
        test_set: LabeledDataset,
        seed: int,
    ) -> float:
        """Test accuracy of a fixed-pattern decoder trained on ``acq`` measurements."""
        with _stage("measure", self.timings):
            noise = self.cfg.noise_snr_db
            train_x = stack_values(
                measure_dataset(
                    train_set, acq, noise, _derived_seed(seed, "noise", "train")
                )
            )
            test_x = stack_values(
                measure_dataset(
                    test_set, acq, noise, _derived_seed(seed, "noise", "test")
                )
            )
        with _stage("train", self.timings):
            train_cfg = self.cfg.decoder.model_copy(
                update={"seed": seed, "mode": TrainMode.FIXED_PATTERNS}
            )
            result = train(
                train_x,
                train_set.labels,
                train_cfg,
                num_classes=train_set.num_classes,
            )
        with _stage("eval", self.timings):
            return evaluate(result.model, test_x, test_set.labels)

    def fixed_accuracy(self, cell: Cell) -> tuple[dict[str, Any], float]:
        train_set, test_set = self.scattered(cell.strength)
        assert test_set is not None
        with _stage("measure", self.timings):
            mask, ps = self._patterns(cell)
        accuracy = self._score(ps, train_set, test_set, cell.seed)
        derived = {
            **cell.key(),
            "m": ps.m,
            "n_active": mask.n_active,
            "field_rate": ps.m / (mask.width * mask.height),
        }
        return derived, accuracy

    def learned_accuracy(self, cell: Cell) -> tuple[float, Path]:
        """End-to-end run started from the Hadamard patterns of the same cell."""
        train_set, test_set = self.scattered(cell.strength)
        assert test_set is not None
        mask, ps = self._patterns(cell)
        with _stage("train", self.timings):
            train_cfg = self.cfg.decoder.model_copy(
                update={"seed": cell.seed, "mode": TrainMode.END_TO_END}
            )
            result = train(
                _active_inputs(train_set, mask),
                train_set.labels,
                train_cfg,
                num_classes=train_set.num_classes,
                pattern_bank=ps.matrix,
            )
        with _stage("eval", self.timings):
            accuracy = evaluate(
                result.model, _active_inputs(test_set, mask), test_set.labels
            )
        with _stage("export", self.timings):
            bank = export_pattern_bank(result.model, mask, cell.seed)
            name = (
                f"patterns/learned_p{cell.param or 0}_s{cell.strength:g}"
                f"_r{cell.rate:g}_seed{cell.seed}.bin"
            )
            path = export_patterns_binary(bank, self.output_dir / name)
        return accuracy, path

    def accuracy_sweep(self) -> None:
        cfg = self.cfg
        cells = self.grid()
        for strength in cfg.scatter.strengths:
            self.scattered(strength)
        results = _map_ordered(self.fixed_accuracy, cells, cfg.workers)
        strategy = cfg.mask.strategy.value
        header = [
            "strategy",
            "param",
            "strength",
            "rate",
            "seed",
            "m",
            "n_active",
            "field_rate",
            "accuracy",
        ]
        rows: list[list[object]] = []
        for derived, accuracy in results:
            rows.append(
                [
                    strategy,
                    derived["param"] or "",
                    derived["strength"],
                    derived["rate"],
                    derived["seed"],
                    derived["m"],
                    derived["n_active"],
                    derived["field_rate"],
                    accuracy,
                ]
            )
            self.cells.append({**derived, "accuracy": accuracy})
        self.write_csv(f"{cfg.kind.value}.csv", header, rows)
        self._summary(results, "accuracy")

    def e2e_compare(self) -> None:
        cfg = self.cfg
        cells = self.grid()
        for strength in cfg.scatter.strengths:
            self.scattered(strength)

        def run_cell(cell: Cell) -> tuple[dict[str, Any], float, float, Path]:
            derived, fixed = self.fixed_accuracy(cell)
            learned, path = self.learned_accuracy(cell)
            return derived, fixed, learned, path

        results = _map_ordered(run_cell, cells, cfg.workers)
        header = [
            "strategy",
            "param",
            "strength",
            "rate",
            "seed",
            "m",
            "n_active",
            "field_rate",
            "fixed_accuracy",
            "e2e_accuracy",
        ]
        rows: list[list[object]] = []
        for derived, fixed, learned, path in results:
            rows.append(
                [
                    cfg.mask.strategy.value,
                    derived["param"] or "",
                    derived["strength"],
                    derived["rate"],
                    derived["seed"],
                    derived["m"],
                    derived["n_active"],
                    derived["field_rate"],
                    fixed,
                    learned,
                ]
            )
            relative = path.relative_to(self.output_dir).as_posix()
            self.outputs[relative] = path
            self.cells.append(
                {**derived, "fixed_accuracy": fixed, "e2e_accuracy": learned}
            )
        self.write_csv("e2e_compare.csv", header, rows)
        self._summary(
            [(derived, fixed) for derived, fixed, _, _ in results],
            "fixed_accuracy",
            extra=[(derived, learned) for derived, _, learned, _ in results],
        )

    def modulator_cell(self, cell: Cell) -> list[tuple[dict[str, Any], float]]:
        """Diffuser accuracy, then one modulator accuracy per kept decimal count."""
        derived, diffuser = self.fixed_accuracy(cell)
        results = [({**derived, "condition": "diffuser", "decimals": None}, diffuser)]
        assert self.splits.test is not None
        op = self.operator(cell.strength)
        _, ps = self._patterns(cell)
        for decimals in self.cfg.modulator.decimals:
            with _stage("fold", self.timings):
                gray = modulator_patterns(ps, op, decimals)
            logger.debug(
                "Folded modulator patterns",
                extra={"context": {**gray.describe(), "decimals": decimals}},
            )
            accuracy = self._score(gray, self.splits.train, self.splits.test, cell.seed)
            results.append(
                ({**derived, "condition": "modulator", "decimals": decimals}, accuracy)
            )
        return results

    def modulator_compare(self) -> None:
        cfg = self.cfg
        cells = self.grid()
        for strength in cfg.scatter.strengths:
            self.scattered(strength)
        per_cell = _map_ordered(self.modulator_cell, cells, cfg.workers)
        header = [
            "strategy",
            "param",
            "strength",
            "rate",
            "seed",
            "m",
            "condition",
            "decimals",
            "accuracy",
        ]
        rows: list[list[object]] = []
        groups: dict[tuple[Any, ...], list[float]] = {}
        for derived, accuracy in itertools.chain.from_iterable(per_cell):
            decimals = "" if derived["decimals"] is None else derived["decimals"]
            rows.append(
                [
                    cfg.mask.strategy.value,
                    derived["param"] or "",
                    derived["strength"],
                    derived["rate"],
                    derived["seed"],
                    derived["m"],
                    derived["condition"],
                    decimals,
                    accuracy,
                ]
            )
            group = (
                derived["param"] or "",
                derived["strength"],
                derived["rate"],
                derived["condition"],
                decimals,
            )
            groups.setdefault(group, []).append(accuracy)
            self.cells.append({**derived, "accuracy": accuracy})
        self.write_csv("modulator_compare.csv", header, rows)
        self.write_csv(
            "modulator_compare_summary.csv",
            [
                "strategy",
                "param",
                "strength",
                "rate",
                "condition",
                "decimals",
                "seeds",
                "mean_accuracy",
            ],
            [
                [cfg.mask.strategy.value, *group, len(values), float(np.mean(values))]
                for group, values in groups.items()
            ],
        )

    def _summary(
        self,
        results: Sequence[tuple[dict[str, Any], float]],
        column: str,
        extra: Sequence[tuple[dict[str, Any], float]] | None = None,
    ) -> None:
        """Seed-mean of every (param, strength, rate) group."""
        groups: dict[tuple[Any, ...], list[int]] = {}
        for index, (derived, _) in enumerate(results):
            group = (derived["param"], derived["strength"], derived["rate"])
            groups.setdefault(group, []).append(index)
        header = ["strategy", "param", "strength", "rate", "seeds", f"mean_{column}"]
        if extra is not None:
            header.append("mean_e2e_accuracy")
        rows: list[list[object]] = []
        for (param, strength, rate), indices in groups.items():
            row: list[object] = [
                self.cfg.mask.strategy.value,
                param or "",
                strength,
                rate,
                len(indices),
                float(np.mean([results[i][1] for i in indices])),
            ]
            if extra is not None:
                row.append(float(np.mean([extra[i][1] for i in indices])))
            rows.append(row)
        self.write_csv(f"{self.cfg.kind.value}_summary.csv", header, rows)

    # entropy -------------------------------------------------------------

    def entropy_report(self) -> None:
        header = ["condition", "width", "height", "strength", "count", "mean_entropy"]
        rows: list[list[object]] = []
        with _stage("entropy", self.timings):
            native = dataset_entropy(self.splits.native_train)
        self.outputs["entropy_native.csv"] = write_entropy_csv(
            native, self.output_dir / "entropy_native.csv"
        )
        rows.append(
            [
                "native",
                self.splits.native_train.width,
                self.splits.native_train.height,
                0.0,
                int(native.per_image.size),
                native.mean,
            ]
        )
        self.cells.append({"condition": "native", "mean_entropy": native.mean})
        for strength in self.cfg.scatter.strengths:
            train_set, _ = self.scattered(strength)
            with _stage("entropy", self.timings):
                report = dataset_entropy(train_set)
            condition = f"resized_s{strength:g}"
            name = f"entropy_{condition}.csv"
            self.outputs[name] = write_entropy_csv(report, self.output_dir / name)
            rows.append(
                [
                    condition,
                    train_set.width,
                    train_set.height,
                    strength,
                    int(report.per_image.size),
                    report.mean,
                ]
            )
            self.cells.append(
                {"condition": condition, "strength": strength, "mean_entropy": report.mean}
            )
        self.write_csv("entropy_report.csv", header, rows)

    # randomness battery --------------------------------------------------

    def nist_report(self) -> None:
        cfg = self.cfg
        spec = cfg.nist
        if spec.image_index >= len(self.splits.train):
            raise StageFailureError(
                "nist",
                ParamOutOfRangeError(
                    f"image_index {spec.image_index} outside the "
                    f"{len(self.splits.train)} training images"
                ),
            )
        with _stage("ingest", self.timings):
            plain = resize_nearest(
                self.splits.train[spec.image_index],
                spec.field_width,
                spec.field_height,
            )
        conditions: list[tuple[str, Callable[[], BitStream], dict[str, Any]]] = []
        if spec.plaintext:
            conditions.append(("plaintext", lambda: image_bits(plain), {}))
        mask = make_mask(
            cfg.mask.strategy, spec.field_width, spec.field_height, cfg.mask.cells()[0]
        )
        for strength, rate, seed in itertools.product(
            cfg.scatter.strengths, cfg.rates, cfg.seeds
        ):
            name = f"s{strength:g}_r{rate:g}_seed{seed}"

            def cipher(
                strength: float = strength, rate: float = rate, seed: int = seed
            ) -> BitStream:
                op = build_operator(
                    cfg.scatter.config_for(strength), spec.field_width, spec.field_height
                )
                sampler = HadamardSampler.create(mask, rate, seed)
                measurement = measure(scatter(op, plain), sampler)
                return quantize_with([measurement], spec.quantization)

            conditions.append(
                (name, cipher, {"strength": strength, "rate": rate, "seed": seed})
            )
        reports: dict[str, BatteryReport] = {}
        for name, make_bits, key in conditions:
            with _stage("quantize", self.timings):
                bits = make_bits()
            with _stage("nist", self.timings):
                report = run_battery(
                    bits,
                    include_extended=spec.include_extended,
                    workers=cfg.workers,
                )
            reports[name] = report
            self.cells.append(
                {
                    "condition": name,
                    **key,
                    "n": report.n,
                    "passed": report.passed_count,
                    "applicable": report.applicable_count,
                }
            )
        self.outputs["nist_report.csv"] = battery_table_csv(
            reports, self.output_dir / "nist_report.csv"
        )
        self.outputs["nist_report.txt"] = write_battery_text(
            reports, self.output_dir / "nist_report.txt"
        )
        detail = {name: report.to_dict() for name, report in reports.items()}
        self.outputs["nist_report.json"] = atomic_write_bytes(
            self.output_dir / "nist_report.json",
            orjson.dumps(
                detail,
                option=orjson.OPT_SORT_KEYS
                | orjson.OPT_INDENT_2
                | orjson.OPT_SERIALIZE_NUMPY,
            ),
        )


def resolve_output_dir(cfg: ExperimentConfig, output_dir: str | Path | None = None) -> Path:
    if output_dir is not None:
        return Path(output_dir)
    if cfg.output_dir is not None:
        return cfg.output_dir
    return get_settings().output_root / cfg.name


def run_experiment(
    cfg: ExperimentConfig,
    *,
    output_dir: str | Path | None = None,
    logger_manager: LoggerManager | None = None,
) -> RunResult:
    """Run ``cfg`` into its output directory and return the written files."""
    target = resolve_output_dir(cfg, output_dir)
    target.mkdir(parents=True, exist_ok=True)
    # A stale manifest would mark a half-written directory as complete.
    (target / MANIFEST_FILE).unlink(missing_ok=True)
    timings = _Timings(manager=logger_manager)
    logger.info(
        "Experiment started",
        extra={"context": {"kind": cfg.kind.value, "output_dir": str(target)}},
    )
    config_path = atomic_write_text(target / CONFIG_FILE, dump_config(cfg))
    runner = _SweepRunner(cfg, target, timings)
    if cfg.kind is ExperimentKind.ENTROPY_REPORT:
        runner.entropy_report()
    elif cfg.kind is ExperimentKind.NIST_REPORT:
        runner.nist_report()
    elif cfg.kind is ExperimentKind.E2E_COMPARE:
        runner.e2e_compare()
    elif cfg.kind is ExperimentKind.MODULATOR_COMPARE:
        runner.modulator_compare()
    else:
        runner.accuracy_sweep()
    outputs = {CONFIG_FILE: config_path, **runner.outputs}
    metrics: dict[str, Any] = {"timings_seconds": dict(sorted(timings.values.items()))}
    if logger_manager is not None:
        metrics["metrics"] = logger_manager.get_metrics()
    atomic_write_bytes(
        target / METRICS_FILE,
        orjson.dumps(metrics, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2),
    )
    payload = config_to_dict(cfg)
    manifest = RunManifest(
        experiment=cfg.kind.value,
        config=payload,
        config_hash=payload_hash(payload),
        seeds={
            "scatter": cfg.scatter.seed,
            "subset": cfg.dataset.subset_seed,
            "cells": list(cfg.seeds),
            "per_cell": "patterns, decoder and shuffles use the cell seed; "
            "noise uses spawn(cell seed, 'noise', split)",
        },
        dataset=_dataset_record(cfg, runner.splits),
        cells=runner.cells,
        outputs={name: file_hash(path) for name, path in sorted(outputs.items())},
    )
    write_manifest(manifest, target)
    logger.info(
        "Experiment finished",
        extra={
            "context": {
                "kind": cfg.kind.value,
                "cells": len(runner.cells),
                "outputs": len(outputs),
            }
        },
    )
    return RunResult(output_dir=target, outputs=outputs, manifest=manifest)


def verify_outputs(expected: RunManifest, actual: RunManifest) -> list[str]:
    """Names of outputs whose hashes differ between two runs."""
    names = sorted(set(expected.outputs) | set(actual.outputs))
    return [
        name
        for name in names
        if expected.outputs.get(name) != actual.outputs.get(name)
    ]


def run_from_manifest(
    path: str | Path,
    *,
    output_dir: str | Path | None = None,
    logger_manager: LoggerManager | None = None,
) -> tuple[RunResult, list[str]]:
    """Re-run a recorded experiment; returns the result and any differing outputs."""
    recorded = read_manifest(path)
    cfg = config_from_manifest(recorded)
    result = run_experiment(cfg, output_dir=output_dir, logger_manager=logger_manager)
    mismatches = verify_outputs(recorded, result.manifest)
    if mismatches:
        logger.warning(
            "Re-run outputs differ from the manifest",
            extra={"context": {"files": mismatches}},
        )
    return result, mismatches
