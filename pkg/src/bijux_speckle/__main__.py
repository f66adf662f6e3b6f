"""Module entry point: ``python -m bijux_speckle``."""

from __future__ import annotations

from bijux_speckle.cli import app

if __name__ == "__main__":
    app(prog_name="bijux-speckle")
