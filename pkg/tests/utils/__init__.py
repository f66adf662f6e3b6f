from __future__ import annotations

"""Utilities shared across tests."""
