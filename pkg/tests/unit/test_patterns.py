from __future__ import annotations

from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest
from tests.utils.synthetic import stroke_dataset

from bijux_speckle.datasets import read_pgm
from bijux_speckle.enums import MaskStrategy, PatternKind
from bijux_speckle.errors import (
    MaskEmptyError,
    OrderTooLargeError,
    ParamOutOfRangeError,
    ShapeMismatchError,
)
from bijux_speckle.patterns import (
    FovMask,
    HadamardSampler,
    build_hadamard_patterns,
    export_patterns_binary,
    export_patterns_pgm,
    fwht,
    hadamard_matrix,
    hadamard_rows,
    learned_pattern_set,
    make_mask,
    measure_hadamard_fast,
    pattern_count,
    quantize_patterns,
    read_patterns_binary,
)


def test_hadamard_order_one() -> None:
    assert hadamard_matrix(1).tolist() == [[1, 1], [1, -1]]


def test_hadamard_order_two_row_sums() -> None:
    assert hadamard_matrix(2).sum(axis=1).tolist() == [4, 0, 0, 0]


@pytest.mark.parametrize("order", range(1, 11))
def test_hadamard_rows_are_orthogonal(order: int) -> None:
    matrix = hadamard_matrix(order).astype(np.int64)
    assert np.array_equal(matrix @ matrix.T, (1 << order) * np.eye(1 << order))
    assert np.array_equal(hadamard_rows(order, range(1 << order)), matrix)


def test_hadamard_order_limits() -> None:
    with pytest.raises(ParamOutOfRangeError):
        hadamard_matrix(0)
    with pytest.raises(OrderTooLargeError):
        hadamard_matrix(15)


@settings(database=None, max_examples=30)
@given(
    order=st.integers(min_value=1, max_value=7),
    seed=st.integers(min_value=0, max_value=2**32),
)
def test_fwht_matches_matrix_product(order: int, seed: int) -> None:
    values = np.random.default_rng(seed).normal(size=1 << order)
    expected = hadamard_matrix(order).astype(np.float64) @ values
    assert np.allclose(fwht(values), expected)


def test_central_mask_bounds() -> None:
    mask = make_mask(MaskStrategy.A_CENTRAL, 64, 64, 32)
    rows, cols = np.nonzero(mask.active)
    assert (rows.min(), rows.max(), cols.min(), cols.max()) == (16, 47, 16, 47)
    assert mask.n_active == 1024


def test_interleaved_mask_count() -> None:
    mask = make_mask(MaskStrategy.B_INTERLEAVED, 64, 64, 20)
    assert mask.n_active == 400
    assert make_mask("full", 64, 64, 7).param is None


def test_mask_param_out_of_range() -> None:
    with pytest.raises(ParamOutOfRangeError):
        make_mask(MaskStrategy.A_CENTRAL, 16, 16, 17)
    with pytest.raises(ParamOutOfRangeError):
        make_mask(MaskStrategy.B_INTERLEAVED, 16, 16, 0)


@pytest.mark.parametrize(
    ("rate", "n_active", "expected"),
    [(0.05, 4096, 205), (1.0, 4096, 4096), (0.001, 100, 1), (0.5, 5, 3)],
)
def test_pattern_count(rate: float, n_active: int, expected: int) -> None:
    assert pattern_count(rate, n_active) == expected


def test_pattern_count_rejects_zero_rate() -> None:
    with pytest.raises(ParamOutOfRangeError):
        pattern_count(0.0, 10)


def test_hadamard_patterns_are_binary_and_seeded() -> None:
    mask = make_mask(MaskStrategy.FULL, 64, 64)
    ps = build_hadamard_patterns(64, 64, mask, 0.05, seed=3)
    assert ps.m == 205
    assert ps.kind is PatternKind.HADAMARD_PERMUTED
    assert set(np.unique(ps.matrix)) <= {0.0, 1.0}
    assert np.all(ps.matrix[0] == 1.0)
    again = build_hadamard_patterns(64, 64, mask, 0.05, seed=3)
    assert np.array_equal(ps.matrix, again.matrix)
    other = build_hadamard_patterns(64, 64, mask, 0.05, seed=4)
    assert not np.array_equal(ps.matrix, other.matrix)


def test_pattern_set_description_fingerprints_the_patterns() -> None:
    mask = make_mask("full", 8, 8)
    first = build_hadamard_patterns(8, 8, mask, 0.5, seed=1).describe()
    assert first == build_hadamard_patterns(8, 8, mask, 0.5, seed=1).describe()
    other = build_hadamard_patterns(8, 8, mask, 0.5, seed=2).describe()
    assert other["sha256"] != first["sha256"]
    for key in ("kind", "m", "n_active", "mask"):
        assert other[key] == first[key]


def test_hadamard_patterns_are_zero_outside_mask() -> None:
    mask = make_mask(MaskStrategy.A_CENTRAL, 16, 16, 6)
    frames = build_hadamard_patterns(16, 16, mask, 0.5, seed=1).patterns
    assert np.all(frames[:, ~mask.active] == 0.0)


def test_pattern_sets_need_a_usable_mask() -> None:
    tiny = make_mask(MaskStrategy.A_CENTRAL, 8, 8, 1)
    with pytest.raises(MaskEmptyError):
        build_hadamard_patterns(8, 8, tiny, 0.5, seed=0)
    with pytest.raises(ShapeMismatchError):
        build_hadamard_patterns(16, 8, make_mask("full", 8, 8), 0.5, seed=0)


@settings(database=None, max_examples=15, deadline=None)
@given(
    rate=st.floats(min_value=0.01, max_value=1.0),
    seed=st.integers(min_value=0, max_value=2**64 - 1),
    strategy=st.sampled_from(list(MaskStrategy)),
)
def test_fast_sampler_matches_dense_patterns(
    rate: float, seed: int, strategy: MaskStrategy
) -> None:
    mask = make_mask(strategy, 20, 20, 10)
    dense = build_hadamard_patterns(20, 20, mask, rate, seed)
    sampler = HadamardSampler.create(mask, rate, seed)
    image = stroke_dataset(1, size=20, seed=seed % 1000)[0].pixels.astype(np.float64)
    expected = dense.matrix @ image.reshape(-1)[mask.active_indices] / mask.n_active
    assert sampler.m == dense.m
    assert np.allclose(measure_hadamard_fast(sampler, image), expected)


def test_learned_patterns_from_frames() -> None:
    mask = make_mask(MaskStrategy.A_CENTRAL, 4, 4, 2)
    frames = np.zeros((2, 4, 4))
    frames[:, 1:3, 1:3] = 0.25
    ps = learned_pattern_set(frames, mask, seed=9)
    assert ps.kind is PatternKind.LEARNED
    assert ps.matrix.shape == (2, 4)
    assert ps.sampling_rate == 0.5
    frames[0, 0, 0] = 1.0
    with pytest.raises(ShapeMismatchError):
        learned_pattern_set(frames, mask, seed=9)


def test_quantize_patterns_keeps_decimals() -> None:
    mask = make_mask("full", 2, 2)
    ps = learned_pattern_set(np.array([[0.123456, 0.5, 0.99999, 0.0]]), mask, seed=0)
    assert quantize_patterns(ps, 2).matrix.tolist() == [[0.12, 0.5, 1.0, 0.0]]


def test_pattern_export(tmp_path: Path) -> None:
    mask = make_mask(MaskStrategy.B_INTERLEAVED, 8, 8, 4)
    ps = build_hadamard_patterns(8, 8, mask, 0.5, seed=2)
    record = read_patterns_binary(export_patterns_binary(ps, tmp_path / "p.bin"))
    assert record.kind is PatternKind.HADAMARD_PERMUTED
    assert np.array_equal(record.frames, ps.patterns)
    paths = export_patterns_pgm(ps, tmp_path / "pgm")
    assert len(paths) == ps.m
    first = read_pgm(paths[0]).pixels
    assert set(np.unique(first)) <= {0, 255}


@pytest.mark.parametrize(
    "mask",
    [make_mask("full", 16, 16), make_mask(MaskStrategy.A_CENTRAL, 12, 12, 5)],
    ids=["full", "truncated"],
)
def test_hadamard_patterns_are_distinct(mask: FovMask) -> None:
    ps = build_hadamard_patterns(mask.width, mask.height, mask, 1.0, seed=2)
    assert np.unique(ps.matrix, axis=0).shape[0] == ps.m


def test_untruncated_rows_are_half_ones() -> None:
    mask = make_mask("full", 8, 8)
    ps = build_hadamard_patterns(8, 8, mask, 1.0, seed=9)
    ones = ps.matrix.sum(axis=1)
    assert ones[0] == 64
    assert np.all(ones[1:] == 32)


@pytest.mark.parametrize("size", [1, 7, 16])
def test_masks_at_field_width_cover_the_field(size: int) -> None:
    full = make_mask("full", size, size).active
    assert np.array_equal(make_mask(MaskStrategy.A_CENTRAL, size, size, size).active, full)
    assert np.array_equal(
        make_mask(MaskStrategy.B_INTERLEAVED, size, size, size).active, full
    )
