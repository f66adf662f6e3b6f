"""Scattering configuration and strength-label conventions."""

from __future__ import annotations

from pydantic import Field

from bijux_speckle.enums import ScatterFamily
from bijux_speckle.errors import ParamOutOfRangeError
from bijux_speckle.schema.base import TypedBaseModel

MAX_SEED = (1 << 64) - 1


class ScatterConfig(TypedBaseModel):
    """Surrogate medium: family, strength in [0, 1] and the kernel seed."""

    family: ScatterFamily = ScatterFamily.SCATNET_LIKE
    strength: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    kernel_max_radius: int | None = Field(default=None, ge=1)

    def max_radius(self, width: int) -> int:
        """Configured radius, or a quarter of the image width."""
        if self.kernel_max_radius is not None:
            return self.kernel_max_radius
        return max(1, width // 4)

    @property
    def is_identity(self) -> bool:
        return self.strength == 0.0


def _unit_interval(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ParamOutOfRangeError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def anisotropy_to_strength(g: float) -> float:
    """Monte-Carlo anisotropy label ``g`` to strength (identity convention)."""
    return _unit_interval("anisotropy", g)


def density_to_strength(density: float) -> float:
    """Particle-density label to strength (identity convention)."""
    return _unit_interval("density", density)
