"""Command-line driver: single pipeline stages plus full experiment runs."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Annotated

import numpy as np
import typer

from bijux_speckle.config.env import get_settings, load_environment
from bijux_speckle.datasets import resize_dataset, write_idx, write_pgm_dir
from bijux_speckle.decoder import (
    TrainConfig,
    evaluate,
    grad_check,
    init_model,
    load_model,
    save_model,
    train,
)
from bijux_speckle.decoder.model import feature_scale, features as feature_values
from bijux_speckle.entropy import dataset_entropy, write_entropy_csv
from bijux_speckle.enums import (
    MaskStrategy,
    OptimizerKind,
    QuantizationScheme,
    RandomnessTest,
    ScatterFamily,
    TrainMode,
)
from bijux_speckle.errors import (
    BadParamsError,
    ConfigInvalidError,
    EmptyDatasetError,
    StageFailureError,
)
from bijux_speckle.experiments import (
    run_experiment,
    run_from_manifest,
    validate_config,
)
from bijux_speckle.measurement import (
    measure_dataset,
    write_measurements_binary,
    write_measurements_csv,
)
from bijux_speckle.nist import (
    BitStream,
    battery_table_csv,
    battery_table_text,
    median_quantize_values,
    quantize_values,
    read_bitstream,
    run_battery,
)
from bijux_speckle.patterns import (
    PatternSet,
    build_hadamard_patterns,
    export_patterns_binary,
    export_patterns_pgm,
    learned_pattern_set,
    make_mask,
    modulator_patterns,
    read_patterns_binary,
)
from bijux_speckle.scattering import (
    ScatterConfig,
    build_operator,
    export_operator,
    scatter_dataset,
    write_kernel_pgm,
)
from bijux_speckle.utilities.io import atomic_write_csv
from bijux_speckle.utilities.rng import SplitMix64
from bijux_speckle.utilities.version import get_runtime_version

from .helpers import (
    CliState,
    configure_logging,
    echo_mapping,
    handle_errors,
    load_images,
    read_measurement_table,
)

app = typer.Typer(
    name="bijux-speckle",
    help="Scattering-enhanced single-pixel sensing: patterns, scattering, "
    "measurements, decoding and randomness tests.",
    no_args_is_help=True,
    add_completion=False,
)

GRAD_CHECK_TOLERANCE = 1e-4


class PatternFormat(str, Enum):
    PGM = "pgm"
    BINARY = "bin"
    BOTH = "both"


def _state(ctx: typer.Context) -> CliState:
    state = ctx.obj
    if not isinstance(state, CliState):
        settings = get_settings()
        state = CliState(settings, configure_logging(settings))
        ctx.obj = state
    return state


def _version(value: bool) -> None:
    if value:
        typer.echo(get_runtime_version())
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    log_level: Annotated[
        str | None, typer.Option(help="Log level (default from BIJUX_SPECKLE_LOG_LEVEL).")
    ] = None,
    structured_logs: Annotated[
        bool | None,
        typer.Option("--structured-logs/--plain-logs", help="JSON log records on stderr."),
    ] = None,
    log_dir: Annotated[
        Path | None, typer.Option(help="Also write rotating JSON logs here.")
    ] = None,
    env_file: Annotated[
        Path | None, typer.Option(help="Environment file to load (default .env).")
    ] = None,
    version: Annotated[
        bool,
        typer.Option(
            "--version", "-V", callback=_version, is_eager=True, help="Show version."
        ),
    ] = False,
) -> None:
    load_environment(env_file)
    get_settings.cache_clear()
    settings = get_settings()
    ctx.obj = CliState(
        settings,
        configure_logging(
            settings, log_level=log_level, structured=structured_logs, log_dir=log_dir
        ),
    )


def _pattern_set(
    width: int,
    height: int,
    strategy: MaskStrategy,
    param: int | None,
    rate: float,
    seed: int,
    patterns_file: Path | None,
) -> PatternSet:
    mask = make_mask(strategy, width, height, param)
    if patterns_file is None:
        return build_hadamard_patterns(width, height, mask, rate, seed)
    record = read_patterns_binary(patterns_file)
    return learned_pattern_set(record.frames, mask, seed)


@app.command()
@handle_errors
def patterns(
    width: Annotated[int, typer.Option(min=1, help="Field width in pixels.")],
    height: Annotated[int, typer.Option(min=1, help="Field height in pixels.")],
    out: Annotated[Path, typer.Option(help="Output directory.")],
    rate: Annotated[float, typer.Option(help="Sampling rate in (0, 1].")] = 0.1,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    strategy: Annotated[MaskStrategy, typer.Option()] = MaskStrategy.FULL,
    param: Annotated[int | None, typer.Option(help="Mask side or row/column count.")] = None,
    fmt: Annotated[PatternFormat, typer.Option("--format")] = PatternFormat.BOTH,
) -> None:
    """Generate a permuted Hadamard pattern set."""
    mask = make_mask(strategy, width, height, param)
    ps = build_hadamard_patterns(width, height, mask, rate, seed)
    if fmt in (PatternFormat.PGM, PatternFormat.BOTH):
        export_patterns_pgm(ps, out)
    if fmt in (PatternFormat.BINARY, PatternFormat.BOTH):
        export_patterns_binary(ps, out / "patterns.bin")
    echo_mapping({"m": ps.m, "n_active": ps.n_active, "out": str(out)})


@app.command()
@handle_errors
def modulator(
    width: Annotated[int, typer.Option(min=1, help="Field width in pixels.")],
    height: Annotated[int, typer.Option(min=1, help="Field height in pixels.")],
    out: Annotated[Path, typer.Option(help="Output directory.")],
    decimals: Annotated[int, typer.Option(min=0, help="Decimal places kept.")] = 2,
    rate: Annotated[float, typer.Option(help="Sampling rate in (0, 1].")] = 0.1,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    strategy: Annotated[MaskStrategy, typer.Option()] = MaskStrategy.FULL,
    param: Annotated[int | None, typer.Option(help="Mask side or row/column count.")] = None,
    family: Annotated[ScatterFamily, typer.Option()] = ScatterFamily.TRANSFER_MATRIX,
    strength: Annotated[float, typer.Option(min=0.0, max=1.0)] = 0.75,
    scatter_seed: Annotated[int, typer.Option(min=0)] = 0,
    fmt: Annotated[PatternFormat, typer.Option("--format")] = PatternFormat.BOTH,
) -> None:
    """Fold a scattering medium into Hadamard patterns for a gray-level modulator."""
    mask = make_mask(strategy, width, height, param)
    ps = build_hadamard_patterns(width, height, mask, rate, seed)
    op = build_operator(
        ScatterConfig(family=family, strength=strength, seed=scatter_seed), width, height
    )
    gray = modulator_patterns(ps, op, decimals)
    if fmt in (PatternFormat.PGM, PatternFormat.BOTH):
        export_patterns_pgm(gray, out)
    if fmt in (PatternFormat.BINARY, PatternFormat.BOTH):
        export_patterns_binary(gray, out / "patterns.bin")
    echo_mapping(
        {"m": gray.m, "levels": int(np.unique(gray.matrix).size), "out": str(out)}
    )


@app.command("scatter")
@handle_errors
def scatter_command(
    out_images: Annotated[Path, typer.Option(help="IDX image file to write.")],
    out_labels: Annotated[Path, typer.Option(help="IDX label file to write.")],
    images: Annotated[Path | None, typer.Option(help="IDX image file.")] = None,
    labels: Annotated[Path | None, typer.Option(help="IDX label file.")] = None,
    pgm_dir: Annotated[Path | None, typer.Option(help="Directory of PGM images.")] = None,
    family: Annotated[ScatterFamily, typer.Option()] = ScatterFamily.SCATNET_LIKE,
    strength: Annotated[float, typer.Option(min=0.0, max=1.0)] = 0.5,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    kernel_max_radius: Annotated[int | None, typer.Option(min=1)] = None,
    resize: Annotated[
        tuple[int, int] | None, typer.Option(help="Resize to WIDTH HEIGHT first.")
    ] = None,
    operator_out: Annotated[Path | None, typer.Option(help="Export the operator.")] = None,
    kernel_pgm: Annotated[Path | None, typer.Option(help="Write the kernel as PGM.")] = None,
    pgm_out: Annotated[Path | None, typer.Option(help="Also write PGM images.")] = None,
) -> None:
    """Pass images through a seeded surrogate scattering medium."""
    dataset = load_images(images, labels, pgm_dir)
    if resize is not None:
        dataset = resize_dataset(dataset, *resize)
    cfg = ScatterConfig(
        family=family, strength=strength, seed=seed, kernel_max_radius=kernel_max_radius
    )
    op = build_operator(cfg, dataset.width, dataset.height)
    scattered = scatter_dataset(op, dataset)
    write_idx(scattered, out_images, out_labels)
    if operator_out is not None:
        export_operator(op, operator_out)
    if kernel_pgm is not None:
        write_kernel_pgm(op, kernel_pgm)
    if pgm_out is not None:
        write_pgm_dir(scattered.images, pgm_out)
    echo_mapping(
        {
            "images": len(scattered),
            "support_radius": op.support_radius,
            "out": str(out_images),
        }
    )


@app.command("measure")
@handle_errors
def measure_command(
    out: Annotated[Path, typer.Option(help="Measurement file (.csv or binary).")],
    images: Annotated[Path | None, typer.Option()] = None,
    labels: Annotated[Path | None, typer.Option()] = None,
    pgm_dir: Annotated[Path | None, typer.Option()] = None,
    rate: Annotated[float, typer.Option()] = 0.1,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    strategy: Annotated[MaskStrategy, typer.Option()] = MaskStrategy.FULL,
    param: Annotated[int | None, typer.Option()] = None,
    patterns_file: Annotated[
        Path | None, typer.Option("--patterns", help="Learned pattern binary.")
    ] = None,
    noise_snr_db: Annotated[float | None, typer.Option()] = None,
    noise_seed: Annotated[int, typer.Option(min=0)] = 0,
) -> None:
    """Record single-pixel measurement vectors of every image."""
    dataset = load_images(images, labels, pgm_dir)
    ps = _pattern_set(
        dataset.width, dataset.height, strategy, param, rate, seed, patterns_file
    )
    measurements = measure_dataset(dataset, ps, noise_snr_db, noise_seed)
    if out.suffix.lower() == ".csv":
        write_measurements_csv(measurements, out)
    else:
        write_measurements_binary(measurements, out)
    echo_mapping({"count": len(measurements), "m": ps.m, "out": str(out)})


@app.command("entropy")
@handle_errors
def entropy_command(
    images: Annotated[Path | None, typer.Option()] = None,
    labels: Annotated[Path | None, typer.Option()] = None,
    pgm_dir: Annotated[Path | None, typer.Option()] = None,
    out: Annotated[Path | None, typer.Option(help="Per-image entropy CSV.")] = None,
) -> None:
    """Shannon entropy of every image and the dataset mean."""
    report = dataset_entropy(load_images(images, labels, pgm_dir))
    if out is not None:
        write_entropy_csv(report, out)
    echo_mapping(report.summary())


def _labelled_table(path: Path) -> tuple[np.ndarray, np.ndarray]:
    table = read_measurement_table(path)
    if table.labels is None:
        raise EmptyDatasetError(f"{path} carries no labels")
    return table.values, table.labels


@app.command("train")
@handle_errors
def train_command(
    measurements: Annotated[Path, typer.Option(help="Labelled measurement CSV.")],
    out: Annotated[Path, typer.Option(help="Model file to write.")],
    epochs: Annotated[int, typer.Option(min=1)] = 30,
    batch_size: Annotated[int, typer.Option(min=1)] = 64,
    learning_rate: Annotated[float, typer.Option()] = 1e-3,
    hidden: Annotated[int, typer.Option(min=1)] = 256,
    optimizer: Annotated[OptimizerKind, typer.Option()] = OptimizerKind.ADAM,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    num_classes: Annotated[int, typer.Option(min=2)] = 10,
    loss_csv: Annotated[Path | None, typer.Option(help="Per-epoch loss curve CSV.")] = None,
) -> None:
    """Train a fixed-pattern decoder on measurement vectors."""
    values, targets = _labelled_table(measurements)
    cfg = TrainConfig(
        epochs=epochs,
        batch_size=batch_size,
        learning_rate=learning_rate,
        hidden=hidden,
        optimizer=optimizer,
        seed=seed,
    )
    result = train(values, targets, cfg, num_classes=num_classes)
    save_model(result.model, out)
    if loss_csv is not None:
        rows = [[epoch, loss] for epoch, loss in enumerate(result.losses)]
        atomic_write_csv(loss_csv, ["epoch", "loss"], rows)
    echo_mapping(
        {
            "final_loss": result.final_loss,
            "train_accuracy": evaluate(result.model, values, targets),
            "out": str(out),
        }
    )


@app.command("eval")
@handle_errors
def eval_command(
    model: Annotated[Path, typer.Option(help="Model file.")],
    measurements: Annotated[Path, typer.Option(help="Labelled measurement CSV.")],
) -> None:
    """Accuracy of a saved decoder on labelled measurements."""
    values, targets = _labelled_table(measurements)
    accuracy = evaluate(load_model(model), values, targets)
    echo_mapping({"count": int(targets.size), "accuracy": accuracy})


@app.command()
@handle_errors
def gradcheck(
    mode: Annotated[TrainMode, typer.Option()] = TrainMode.FIXED_PATTERNS,
    features: Annotated[int, typer.Option(min=1, help="Measurements per input.")] = 16,
    n_active: Annotated[int, typer.Option(min=1, help="Pixels (end-to-end).")] = 32,
    hidden: Annotated[int, typer.Option(min=1)] = 12,
    classes: Annotated[int, typer.Option(min=2)] = 10,
    samples: Annotated[int, typer.Option(min=1)] = 8,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    model_file: Annotated[
        Path | None, typer.Option("--model", help="Check a saved model instead.")
    ] = None,
    tolerance: Annotated[float, typer.Option()] = GRAD_CHECK_TOLERANCE,
) -> None:
    """Compare backprop with finite differences on random inputs."""
    stream = SplitMix64(seed).spawn("cli", "gradcheck")
    if model_file is not None:
        model = load_model(model_file)
    else:
        bank = None
        if mode is TrainMode.END_TO_END:
            bank = stream.spawn("bank").uniform(features * n_active).reshape(
                features, n_active
            )
        model = init_model(features, classes, hidden, seed, mode=mode, patterns=bank)
    inputs = stream.spawn("inputs").uniform(samples * model.input_dim) * 255.0
    inputs = inputs.reshape(samples, model.input_dim)
    if model_file is None:
        model.scale = feature_scale(feature_values(model, inputs))
    labels = stream.spawn("labels").integers(samples, model.num_classes)
    result = grad_check(model, inputs, labels, seed=seed)
    echo_mapping(
        {
            "max_relative_error": result.max_relative_error,
            "checked": result.checked,
            **{f"error.{name}": value for name, value in result.per_parameter.items()},
        }
    )
    if result.max_relative_error >= tolerance:
        raise StageFailureError(
            "gradcheck",
            BadParamsError(
                f"max relative error {result.max_relative_error:.3g} >= {tolerance:g}"
            ),
        )


def _stream_from(
    bits: Path | None,
    measurements: Path | None,
    quantization: QuantizationScheme,
) -> BitStream:
    if bits is not None:
        return read_bitstream(bits)
    if measurements is None:
        raise ConfigInvalidError(["one of --bits or --measurements is required"])
    values = read_measurement_table(measurements).values.reshape(-1)
    if quantization is QuantizationScheme.MEDIAN:
        return median_quantize_values(values)
    return quantize_values(values)


@app.command("nist")
@handle_errors
def nist_command(
    bits: Annotated[Path | None, typer.Option(help="Bitstream file.")] = None,
    measurements: Annotated[
        Path | None, typer.Option(help="Measurements to quantize into a stream.")
    ] = None,
    quantization: Annotated[QuantizationScheme, typer.Option()] = QuantizationScheme.AFFINE16,
    extended: Annotated[bool, typer.Option(help="Also run the extended tests.")] = False,
    test: Annotated[
        list[RandomnessTest] | None, typer.Option(help="Run only these tests.")
    ] = None,
    out: Annotated[Path | None, typer.Option(help="Result table CSV.")] = None,
    workers: Annotated[int, typer.Option(min=1)] = 1,
) -> None:
    """Run the randomness battery on a ciphertext bitstream."""
    stream = _stream_from(bits, measurements, quantization)
    report = run_battery(
        stream, include_extended=extended, tests=test or None, workers=workers
    )
    conditions = {"stream": report}
    if out is not None:
        battery_table_csv(conditions, out)
    typer.echo(battery_table_text(conditions), nl=False)


@app.command()
@handle_errors
def run(
    ctx: typer.Context,
    config: Annotated[Path | None, typer.Argument(help="Experiment YAML.")] = None,
    from_manifest: Annotated[
        Path | None, typer.Option(help="Re-run a recorded manifest.")
    ] = None,
    output_dir: Annotated[Path | None, typer.Option(help="Override the output directory.")] = None,
) -> None:
    """Run a full experiment and write its CSVs and manifest."""
    state = _state(ctx)
    if from_manifest is not None:
        result, mismatches = run_from_manifest(
            from_manifest, output_dir=output_dir, logger_manager=state.logger_manager
        )
        if mismatches:
            raise StageFailureError(
                "verify",
                BadParamsError("outputs differ from manifest: " + ", ".join(mismatches)),
            )
    elif config is not None:
        result = run_experiment(
            validate_config(config),
            output_dir=output_dir,
            logger_manager=state.logger_manager,
        )
    else:
        raise ConfigInvalidError(["give a config file or --from-manifest"])
    for name in sorted(result.outputs):
        typer.echo(str(result.outputs[name]))
    typer.echo(str(result.output_dir / "manifest.json"))


@app.command()
@handle_errors
def validate(
    config: Annotated[Path, typer.Argument(help="Experiment YAML.")],
) -> None:
    """Check an experiment config and list every violation."""
    cfg = validate_config(config)
    echo_mapping({"kind": cfg.kind.value, "name": cfg.name, "status": "ok"})
