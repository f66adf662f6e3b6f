from __future__ import annotations

import gzip
from pathlib import Path
import struct

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest
from tests.utils.synthetic import stroke_dataset, write_idx_pair

from bijux_speckle.datasets import (
    Image,
    LabeledDataset,
    encode_pgm,
    load_idx,
    read_pgm,
    read_pgm_dir,
    resize_dataset,
    resize_nearest,
    subset,
    write_idx,
    write_pgm,
    write_pgm_dir,
)
from bijux_speckle.errors import (
    BadMagicError,
    CountMismatchError,
    MalformedHeaderError,
    ParamOutOfRangeError,
    ShapeMismatchError,
    TruncatedFileError,
    UnsupportedMaxvalError,
    ZeroDimensionError,
)


def test_image_rejects_out_of_range_values() -> None:
    with pytest.raises(ParamOutOfRangeError):
        Image(np.array([[0, 256]]))
    with pytest.raises(ZeroDimensionError):
        Image(np.zeros((0, 3), dtype=np.uint8))


def test_image_from_flat_is_row_major() -> None:
    img = Image.from_flat(3, 2, [1, 2, 3, 4, 5, 6])
    assert img.shape == (2, 3)
    assert img.pixels[1, 0] == 4


def test_dataset_rejects_mismatched_labels() -> None:
    with pytest.raises(ShapeMismatchError):
        LabeledDataset(np.zeros((3, 2, 2), dtype=np.uint8), np.array([0, 1]))


@pytest.mark.parametrize(
    "pixels",
    [
        np.full((2, 2, 2), 300, dtype=np.int64),
        np.full((2, 2, 2), -1.0),
        np.full((2, 2, 2), 12.5),
    ],
    ids=["above", "below", "fractional"],
)
def test_dataset_rejects_pixels_an_image_would_reject(pixels: np.ndarray) -> None:
    with pytest.raises(ParamOutOfRangeError):
        Image(pixels[0])
    with pytest.raises(ParamOutOfRangeError):
        LabeledDataset(pixels, np.array([0, 1]))


def test_dataset_accepts_integral_floats() -> None:
    dataset = LabeledDataset(np.full((1, 2, 2), 7.0), np.array([3]))
    assert dataset.pixels.dtype == np.uint8
    assert dataset.pixels.tolist() == [[[7, 7], [7, 7]]]


def test_idx_round_trip(tmp_path: Path) -> None:
    dataset = stroke_dataset(12, size=28, seed=3)
    images, labels = write_idx_pair(dataset, tmp_path, "train")
    loaded = load_idx(images, labels)
    assert loaded == dataset
    assert (loaded.width, loaded.height) == (28, 28)


def test_idx_round_trip_gzip(tmp_path: Path) -> None:
    dataset = stroke_dataset(5, size=8, seed=1)
    images, labels = write_idx_pair(dataset, tmp_path, "train", compress=True)
    assert images.read_bytes()[:2] == b"\x1f\x8b"
    assert load_idx(images, labels) == dataset


def test_write_idx_replaces_files_atomically(tmp_path: Path) -> None:
    target = tmp_path / "nested" / "out"
    first = stroke_dataset(3, size=4, seed=1)
    second = stroke_dataset(2, size=4, seed=2)
    images, labels = write_idx(first, target / "x-images", target / "x-labels")
    assert write_idx(second, images, labels) == (images, labels)
    assert load_idx(images, labels) == second
    assert sorted(path.name for path in target.iterdir()) == ["x-images", "x-labels"]


def test_idx_wrong_magic_names_file(tmp_path: Path) -> None:
    dataset = stroke_dataset(2, size=4)
    images, labels = write_idx_pair(dataset, tmp_path, "bad")
    with pytest.raises(BadMagicError, match="bad-labels"):
        load_idx(labels, labels)


def test_idx_count_mismatch(tmp_path: Path) -> None:
    dataset = stroke_dataset(100, size=4)
    images, _ = write_idx_pair(dataset, tmp_path, "a")
    short = LabeledDataset(dataset.pixels[:99], dataset.labels[:99])
    _, labels = write_idx_pair(short, tmp_path, "b")
    with pytest.raises(CountMismatchError):
        load_idx(images, labels)


def test_idx_truncated(tmp_path: Path) -> None:
    path = tmp_path / "cut-images"
    path.write_bytes(struct.pack(">4I", 0x803, 2, 4, 4) + bytes(10))
    labels = tmp_path / "cut-labels"
    labels.write_bytes(gzip.compress(struct.pack(">2I", 0x801, 2) + bytes(2)))
    with pytest.raises(TruncatedFileError):
        load_idx(path, labels)


def test_resize_two_by_two_to_four_by_four() -> None:
    img = Image(np.array([[0, 255], [255, 0]], dtype=np.uint8))
    out = resize_nearest(img, 4, 4)
    expected = np.array(
        [[0, 0, 255, 255], [0, 0, 255, 255], [255, 255, 0, 0], [255, 255, 0, 0]]
    )
    assert np.array_equal(out.pixels, expected)


def test_resize_same_size_is_identity() -> None:
    img = stroke_dataset(1, size=28)[0]
    assert resize_nearest(img, 28, 28) == img


def test_resize_zero_dimension() -> None:
    with pytest.raises(ZeroDimensionError):
        resize_nearest(Image(np.ones((2, 2), dtype=np.uint8)), 0, 4)


@settings(database=None, max_examples=40)
@given(
    width=st.integers(1, 40),
    height=st.integers(1, 40),
    seed=st.integers(0, 2**32),
)
def test_resize_creates_no_new_values(width: int, height: int, seed: int) -> None:
    source = stroke_dataset(1, size=14, seed=seed)[0]
    out = resize_nearest(source, width, height)
    assert out.shape == (height, width)
    assert set(np.unique(out.pixels)) <= set(np.unique(source.pixels))


def test_resize_dataset_matches_per_image() -> None:
    dataset = stroke_dataset(4, size=28)
    resized = resize_dataset(dataset, 64, 64)
    assert resized[2] == resize_nearest(dataset[2], 64, 64)
    assert np.array_equal(resized.labels, dataset.labels)


def test_subset_is_seeded_and_ordered() -> None:
    dataset = stroke_dataset(50, size=8)
    first = subset(dataset, 10, seed=5)
    assert first == subset(dataset, 10, seed=5)
    assert len(first) == 10
    with pytest.raises(ParamOutOfRangeError):
        subset(dataset, 51, seed=0)


def test_pgm_single_pixel_layout(tmp_path: Path) -> None:
    img = Image(np.zeros((1, 1), dtype=np.uint8))
    assert encode_pgm(img) == b"P5\n1 1\n255\n\x00"
    path = write_pgm(img, tmp_path / "one.pgm")
    assert path.stat().st_size == 12
    assert read_pgm(path) == img


def test_pgm_reads_comments(tmp_path: Path) -> None:
    path = tmp_path / "comment.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n# max\n255\n\x07\x09")
    assert np.array_equal(read_pgm(path).pixels, [[7, 9]])


def test_pgm_rejects_16_bit(tmp_path: Path) -> None:
    path = tmp_path / "wide.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(UnsupportedMaxvalError):
        read_pgm(path)


def test_pgm_rejects_ascii_variant(tmp_path: Path) -> None:
    path = tmp_path / "ascii.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(MalformedHeaderError):
        read_pgm(path)


def test_pgm_dir_round_trip(tmp_path: Path) -> None:
    images = stroke_dataset(3, size=10).images
    write_pgm_dir(images, tmp_path / "frames")
    assert read_pgm_dir(tmp_path / "frames") == images
