"""
Command Implementations
One module per command; each exposes run_<command> and a <COMMAND>_SPEC schema.
"""

from collections.abc import Callable
from pathlib import Path
from typing import Any

from src.models.experiment import CommandName, ExperimentConfig, ToolOutcome
from src.models.spectrum import StructureFunction
from src.tools.clt import CLT_SPEC, run_clt
from src.tools.covariance_grid import COVARIANCE_GRID_SPEC, run_covariance_grid
from src.tools.entropy_scan import ENTROPY_SCAN_SPEC, run_entropy_scan
from src.tools.kernel import KERNEL_SPEC, run_kernel
from src.tools.sample import SAMPLE_SPEC, run_sample
from src.tools.theta_scan import THETA_SCAN_SPEC, run_theta_scan
from src.tools.variance_scan import VARIANCE_SCAN_SPEC, run_variance_scan

Tool = Callable[[ExperimentConfig, StructureFunction, Path, int | None], ToolOutcome]

COMMANDS: dict[CommandName, Tool] = {
    CommandName.SAMPLE: run_sample,
    CommandName.KERNEL: run_kernel,
    CommandName.VARIANCE_SCAN: run_variance_scan,
    CommandName.COVARIANCE_GRID: run_covariance_grid,
    CommandName.THETA_SCAN: run_theta_scan,
    CommandName.CLT: run_clt,
    CommandName.ENTROPY_SCAN: run_entropy_scan,
}

TOOL_SPECS: dict[CommandName, dict[str, Any]] = {
    CommandName.SAMPLE: SAMPLE_SPEC,
    CommandName.KERNEL: KERNEL_SPEC,
    CommandName.VARIANCE_SCAN: VARIANCE_SCAN_SPEC,
    CommandName.COVARIANCE_GRID: COVARIANCE_GRID_SPEC,
    CommandName.THETA_SCAN: THETA_SCAN_SPEC,
    CommandName.CLT: CLT_SPEC,
    CommandName.ENTROPY_SCAN: ENTROPY_SCAN_SPEC,
}

__all__ = [
    "COMMANDS",
    "TOOL_SPECS",
    "run_clt",
    "run_covariance_grid",
    "run_entropy_scan",
    "run_kernel",
    "run_sample",
    "run_theta_scan",
    "run_variance_scan",
    "CLT_SPEC",
    "COVARIANCE_GRID_SPEC",
    "ENTROPY_SCAN_SPEC",
    "KERNEL_SPEC",
    "SAMPLE_SPEC",
    "THETA_SCAN_SPEC",
    "VARIANCE_SCAN_SPEC",
]
