"""Grayscale image and labeled dataset containers."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.errors import (
    ParamOutOfRangeError,
    ShapeMismatchError,
    ZeroDimensionError,
)


def _frozen(array: NDArray[np.generic]) -> NDArray[np.generic]:
    array.setflags(write=False)
    return array



def _as_gray(array: NDArray[np.generic]) -> NDArray[np.uint8]:
    """Copy as uint8, refusing values that are not integers in [0, 255]."""
    if array.dtype != np.uint8:
        if np.any(array < 0) or np.any(array > 255):
            raise ParamOutOfRangeError("pixel values must lie in [0, 255]")
        if np.issubdtype(array.dtype, np.floating) and np.any(
            array != np.floor(array)
        ):
            raise ParamOutOfRangeError("pixel values must be integers")
        return array.astype(np.uint8)
    return np.array(array, copy=True)

@dataclass(frozen=True, eq=False)
class Image:
    """8-bit grayscale raster stored row-major as ``(height, width)``."""

    pixels: NDArray[np.uint8]

    def __post_init__(self) -> None:
        array = np.asarray(self.pixels)
        if array.ndim != 2:
            raise ShapeMismatchError(f"image must be 2-D, got shape {array.shape}")
        if array.shape[0] == 0 or array.shape[1] == 0:
            raise ZeroDimensionError(f"image has a zero dimension: {array.shape}")
        object.__setattr__(self, "pixels", _frozen(_as_gray(array)))

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence[int]) -> Image:
        flat = np.asarray(values)
        if flat.size != width * height:
            raise ShapeMismatchError(
                f"{flat.size} pixel values for a {width}x{height} image"
            )
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.shape == other.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Images of one common size with class labels in ``[0, num_classes)``.

    Pixels are held as a single ``(count, height, width)`` uint8 stack;
    ``dataset[k]`` materializes image ``k``.
    """

    pixels: NDArray[np.uint8]
    labels: NDArray[np.int64]
    num_classes: int = 10
    _shape: tuple[int, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        stack = np.asarray(self.pixels)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if stack.ndim != 3:
            raise ShapeMismatchError(
                f"dataset pixels must be (count, height, width), got {stack.shape}"
            )
        if stack.shape[0] != labels.shape[0]:
            raise ShapeMismatchError(
                f"{stack.shape[0]} images but {labels.shape[0]} labels"
            )
        if self.num_classes < 1:
            raise ParamOutOfRangeError("num_classes must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ParamOutOfRangeError(
                f"labels must lie in [0, {self.num_classes - 1}]"
            )
        object.__setattr__(self, "pixels", _frozen(_as_gray(stack)))
        object.__setattr__(self, "labels", _frozen(labels.copy()))
        object.__setattr__(self, "_shape", (int(stack.shape[1]), int(stack.shape[2])))

    @classmethod
    def from_images(
        cls, images: Sequence[Image], labels: Sequence[int], num_classes: int = 10
    ) -> LabeledDataset:
        shapes = {image.shape for image in images}
        if len(shapes) > 1:
            raise ShapeMismatchError(f"images have differing sizes: {sorted(shapes)}")
        if not images:
            return cls(np.zeros((0, 1, 1), dtype=np.uint8), np.asarray(labels), num_classes)
        stack = np.stack([image.pixels for image in images])
        return cls(stack, np.asarray(labels), num_classes)

    @property
    def width(self) -> int:
        return self._shape[1]

    @property
    def height(self) -> int:
        return self._shape[0]

    @property
    def images(self) -> list[Image]:
        return [Image(frame) for frame in self.pixels]

    def __len__(self) -> int:
        return int(self.pixels.shape[0])

    def __getitem__(self, index: int) -> Image:
        return Image(self.pixels[index])

    def __iter__(self) -> Iterator[Image]:
        for frame in self.pixels:
            yield Image(frame)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
            and bool(np.array_equal(self.labels, other.labels))
        )

    __hash__ = None  # type: ignore[assignment]
