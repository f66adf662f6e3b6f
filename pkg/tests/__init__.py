from __future__ import annotations

"""Top-level test package."""
