"""
Tests for the command line runner: config loading, exit statuses and manifests.
"""

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest
from pydantic import ValidationError

from src.main import EXIT_INVALID, EXIT_OK, exit_status, load_config, main
from src.models.errors import NumericError, ResourceError, UsageError
from src.models.experiment import CommandName

WriteConfig = Callable[..., Path]


def _manifest(directory: Path) -> dict[str, Any]:
    return json.loads((directory / "manifest.json").read_text())


# =============================================================================
# Config loading
# =============================================================================

class TestLoadConfig:
    """Tests for load_config."""

    def test_valid(self, write_config: WriteConfig, kernel_config: dict[str, Any]) -> None:
        config = load_config(write_config(kernel_config))
        assert config.command == CommandName.KERNEL
        assert config.radius == 4

    def test_unknown_command(self, write_config: WriteConfig) -> None:
        with pytest.raises(UsageError):
            load_config(write_config({"command": "bogus", "structure": {"family": "constant"}}))

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(UsageError):
            load_config(path)

    def test_schema_violation(self, write_config: WriteConfig) -> None:
        with pytest.raises(ValidationError):
            load_config(write_config({"command": "kernel", "structure": {"family": "stealthy-gap"}}))

    def test_stochastic_command_needs_seed(
        self, write_config: WriteConfig, sample_config: dict[str, Any]
    ) -> None:
        document = {k: v for k, v in sample_config.items() if k != "seed"}
        with pytest.raises(ValidationError):
            load_config(write_config(document))

    def test_seed_override(
        self,
        write_config: WriteConfig,
        sample_config: dict[str, Any],
        monkeypatch: pytest.MonkeyPatch,
    ) -> None:
        monkeypatch.setenv("SPECTRALFIELD_SEED", "99")
        assert load_config(write_config(sample_config)).seed == 99

    def test_tabulated_grid_file(self, write_config: WriteConfig, tmp_path: Path) -> None:
        (tmp_path / "grid.txt").write_text("1 8\n" + " ".join(["2.0"] * 8) + "\n")
        config = load_config(
            write_config(
                {
                    "command": "kernel",
                    "structure": {"family": "tabulated"},
                    "grid_file": "grid.txt",
                    "radius": 2,
                }
            )
        )
        assert config.structure.dimension == 1
        assert config.structure.table_size == 8
        assert config.structure.table == (2.0,) * 8


class TestExitStatus:
    """Tests for exit_status."""

    def test_mapping(self) -> None:
        assert exit_status(UsageError("x")) == 2
        assert exit_status(NumericError("x")) == 3
        assert exit_status(ResourceError("x")) == 4
        assert exit_status(RuntimeError("x")) == 1


# =============================================================================
# Runs
# =============================================================================

class TestMain:
    """End-to-end runs through main."""

    def test_kernel_run(
        self, write_config: WriteConfig, kernel_config: dict[str, Any], tmp_path: Path
    ) -> None:
        out = tmp_path / "out"
        assert main(["--config", str(write_config(kernel_config)), "--out", str(out)]) == EXIT_OK

        manifest = _manifest(out)
        assert manifest["status"] == 0
        assert manifest["outputs"] == ["kernel.csv"]
        assert manifest["config"]["radius"] == 4
        assert len(manifest["config_sha256"]) == 64
        assert (out / "kernel.csv").exists()

    def test_short_scan_is_rejected_with_manifest(
        self, write_config: WriteConfig, tmp_path: Path
    ) -> None:
        document = {
            "command": "variance-scan",
            "structure": {"family": "constant"},
            "geometry": {"shape": "ball"},
            "grids": {"L": [2, 4, 8]},
        }
        out = tmp_path / "out"
        assert main(["--config", str(write_config(document)), "--out", str(out)]) == EXIT_INVALID

        manifest = _manifest(out)
        assert manifest["status"] == EXIT_INVALID
        assert manifest["outputs"] == []
        assert manifest["errors"]["kind"] == "UsageError"

    def test_unknown_command(self, write_config: WriteConfig, tmp_path: Path) -> None:
        path = write_config({"command": "bogus", "structure": {"family": "constant"}})
        assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_INVALID

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("[1, 2")
        assert main(["--config", str(path)]) == EXIT_INVALID

    def test_schema(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--schema", "entropy-scan"]) == EXIT_OK
        spec = json.loads(capsys.readouterr().out)
        assert spec["name"] == "entropy-scan"

    def test_same_seed_same_bytes(
        self, write_config: WriteConfig, sample_config: dict[str, Any], tmp_path: Path
    ) -> None:
        path = write_config(sample_config)
        assert main(["--config", str(path), "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main(["--config", str(path), "--out", str(tmp_path / "b"), "--workers", "2"]) == EXIT_OK
        assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()


EXAMPLE_CONFIGS = sorted((Path(__file__).parents[1] / "docs" / "configs").glob("*.json"))


@pytest.mark.parametrize("path", EXAMPLE_CONFIGS, ids=[p.stem for p in EXAMPLE_CONFIGS])
def test_example_configs_load(path: Path) -> None:
    config = load_config(path)
    assert config.command.value == json.loads(path.read_text())["command"]
