"""Configuration helpers for Bijux Speckle."""

from __future__ import annotations

from .env import ENV_PREFIX, SpeckleSettings, get_settings, load_environment

__all__ = ["ENV_PREFIX", "SpeckleSettings", "get_settings", "load_environment"]
