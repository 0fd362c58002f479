"""
Tests for tabulated grid files.
"""

from pathlib import Path

import numpy as np
import pytest

from src.models.errors import InputValidationError
from src.storage.grids import load_tabulated_grid, write_tabulated_grid


class TestTabulatedGrid:
    """Tests for load_tabulated_grid."""

    def test_written_grid_loads(self, tmp_path: Path) -> None:
        grid = np.array([[0.0, 1.0, 2.0, 1.0]] * 4)
        path = write_tabulated_grid(tmp_path / "g.txt", 2, grid)
        d, n, values = load_tabulated_grid(path)
        assert (d, n) == (2, 4)
        assert values == tuple(grid.ravel())

    @pytest.mark.parametrize(
        "text",
        [
            "1\n1 2 3\n",
            "1 4\n1 2 3\n",
            "1 2\n1 -2\n",
            "1 2\n1 nan\n",
            "1 2\n1 x\n",
            "0 2\n\n",
        ],
    )
    def test_malformed(self, tmp_path: Path, text: str) -> None:
        path = tmp_path / "g.txt"
        path.write_text(text)
        with pytest.raises(InputValidationError):
            load_tabulated_grid(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(InputValidationError):
            load_tabulated_grid(tmp_path / "absent.txt")
