"""Scattering-enhanced single-pixel sensing and encryption toolkit."""

from __future__ import annotations

from bijux_speckle.utilities.version import get_runtime_version

__version__ = get_runtime_version()

__all__ = ["__version__"]
