"""Shared Pydantic base class with consistent configuration."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class TypedBaseModel(BaseModel):
    """Centralized base so every config schema shares one contract.

    Schemas are frozen and reject unknown keys; a misspelled key in a config
    file is an error, never a silent default.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=False)
