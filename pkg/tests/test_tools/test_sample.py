"""
Tests for the sample command.
"""

import csv
from pathlib import Path
from typing import Any

import pytest

from src.engine.spectral_models import make_structure_function
from src.models.errors import UsageError
from src.models.experiment import ExperimentConfig
from src.storage.field_dump import read_field_dump
from src.tools.sample import run_sample


def _run(document: dict[str, Any], directory: Path):
    config = ExperimentConfig.model_validate(document)
    return run_sample(config, make_structure_function(config.structure), directory, workers=1)


class TestRunSample:
    """Tests for run_sample."""

    def test_one_row_per_field(self, sample_config: dict[str, Any], tmp_path: Path) -> None:
        outcome = _run(sample_config, tmp_path)

        assert outcome.outputs == [tmp_path / "samples.csv"]
        with outcome.outputs[0].open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert [r["stream"] for r in rows] == ["0", "1", "2"]
        assert all(float(r["variance"]) > 0 for r in rows)
        assert "mean_kurtosis" in outcome.summary
        assert "mean_kurtosis" in outcome.errors

    def test_same_seed_same_table(self, sample_config: dict[str, Any], tmp_path: Path) -> None:
        first = _run(sample_config, tmp_path / "a").outputs[0].read_bytes()
        second = _run(sample_config, tmp_path / "b").outputs[0].read_bytes()
        assert first == second

    def test_dumps(self, sample_config: dict[str, Any], tmp_path: Path) -> None:
        document = sample_config | {"samples": 2, "output": {"dump_fields": True, "prefix": "x_"}}
        outcome = _run(document, tmp_path)

        names = [p.name for p in outcome.outputs]
        assert names == ["x_samples.csv", "x_field_000000.spf1", "x_field_000001.spf1"]
        field = read_field_dump(tmp_path / "x_field_000001.spf1")
        assert (field.dimension, field.side, field.seed) == (1, 64, 7)

    def test_sign_transform(self, sample_config: dict[str, Any], tmp_path: Path) -> None:
        outcome = _run(sample_config | {"transform": "sign", "samples": 1}, tmp_path)
        with outcome.outputs[0].open(newline="") as handle:
            row = next(csv.DictReader(handle))
        assert float(row["mean"]) == pytest.approx(0.0, abs=1e-12)
        assert float(row["variance"]) == pytest.approx(1.0)

    def test_needs_torus_side(self, sample_config: dict[str, Any], tmp_path: Path) -> None:
        document = {k: v for k, v in sample_config.items() if k != "torus_side"}
        with pytest.raises(UsageError):
            _run(document, tmp_path)
