"""
Shared pieces of the command implementations: JSON-schema fragments
for the config sections and output naming.
"""

from pathlib import Path
from typing import Any

from src.models.experiment import ExperimentConfig

STRUCTURE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {
            "type": "string",
            "enum": [
                "constant",
                "stealthy-gap",
                "radial-power",
                "anisotropic-product",
                "axes-stealthy",
                "tabulated",
                "cosine-series",
            ],
            "description": "Structure function family",
        },
        "dimension": {"type": "integer", "minimum": 1, "maximum": 6, "default": 1},
        "delta": {
            "type": "number",
            "exclusiveMinimum": 0,
            "exclusiveMaximum": 3.141592653589793,
            "description": "Gap radius (stealthy-gap) or slab half-width (axes-stealthy)",
        },
        "gap_norm": {"type": "string", "enum": ["euclidean", "sup"], "default": "euclidean"},
        "alpha": {"type": "number", "minimum": 0, "maximum": 1, "description": "Radial-power exponent"},
        "p": {"type": "number", "minimum": 1, "default": 2, "description": "Norm order of radial-power"},
        "alphas": {
            "type": "array",
            "items": {"type": "number", "minimum": 0, "maximum": 1},
            "description": "Per-axis exponents of anisotropic-product",
        },
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["frequency", "amplitude"],
                "properties": {
                    "frequency": {"type": "array", "items": {"type": "integer"}},
                    "amplitude": {"type": "number"},
                },
            },
            "description": "Cosine-series terms a·cos(m·θ)",
        },
        "envelope": {
            "type": "object",
            "required": ["direction"],
            "properties": {
                "direction": {"type": "string", "enum": ["increasing", "decreasing"]},
                "radius": {"type": "number", "exclusiveMinimum": 0},
            },
            "description": "Declared monotonicity of S near the origin (theta-scan hypothesis)",
        },
        "assume_summable_truncated": {
            "type": "boolean",
            "default": False,
            "description": "Declare summable truncated correlations of transformed fields (clt hypothesis)",
        },
    },
}

GEOMETRY_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "shape": {"type": "string", "enum": ["ball", "cube", "box"], "default": "cube"},
        "L": {"type": "number", "exclusiveMinimum": 0, "description": "Scale of single-scale commands"},
        "offsets": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "description": "Box offsets n",
        },
        "offset_max": {"type": "integer", "minimum": 0, "description": "All offsets in {0..m}^d"},
    },
}

GRIDS_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "L": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "eps": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
}

OUTPUT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "directory": {"type": "string", "description": "Output directory (--out overrides)"},
        "prefix": {"type": "string", "default": ""},
        "dump_fields": {"type": "boolean", "default": False},
    },
}


def command_schema(command: str, description: str, properties: dict[str, Any], required: list[str]) -> dict[str, Any]:
    """Tool spec in the shape {name, description, inputSchema}."""
    return {
        "name": command,
        "description": description,
        "inputSchema": {
            "type": "object",
            "required": ["command", "structure", *required],
            "properties": {
                "command": {"type": "string", "const": command},
                "structure": STRUCTURE_SCHEMA,
                "grid_file": {"type": "string", "description": "Grid file of the tabulated family"},
                "output": OUTPUT_SCHEMA,
                **properties,
            },
        },
    }


def output_file(config: ExperimentConfig, directory: Path, name: str) -> Path:
    return directory / f"{config.output.prefix}{name}"
