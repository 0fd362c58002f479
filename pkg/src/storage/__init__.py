"""
Storage Layer - Result Files

Components:
- results: CSV tables, JSON documents and run manifests
- field_dump: SPF1 binary field dumps
- grids: tabulated structure function grids
"""

from src.storage.field_dump import read_field_dump, write_field_dump
from src.storage.grids import load_tabulated_grid, write_tabulated_grid
from src.storage.results import (
    ResultEncoder,
    config_hash,
    format_real,
    write_entropy_csv,
    write_json,
    write_manifest,
    write_rows_csv,
    write_scan_csv,
)

__all__ = [
    "ResultEncoder",
    "config_hash",
    "format_real",
    "load_tabulated_grid",
    "read_field_dump",
    "write_entropy_csv",
    "write_field_dump",
    "write_json",
    "write_manifest",
    "write_rows_csv",
    "write_scan_csv",
    "write_tabulated_grid",
]
