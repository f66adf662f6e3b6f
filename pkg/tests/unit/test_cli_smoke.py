from __future__ import annotations

import shutil
import subprocess
import sys


def _assert_help(command: list[str]) -> None:
    result = subprocess.run(command, check=False, capture_output=True, text=True)
    assert result.returncode == 0
    combined = (result.stdout or "") + (result.stderr or "")
    assert "Traceback" not in combined
    assert combined.strip()


def test_cli_help_commands() -> None:
    exe = shutil.which("bijux-speckle")
    base_cmd = [sys.executable, "-m", "bijux_speckle"] if exe is None else [exe]
    for command in ("run", "validate", "patterns", "nist"):
        _assert_help([*base_cmd, command, "--help"])
