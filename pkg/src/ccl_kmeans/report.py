"""JSON report documents (schema version "1") and their published schema."""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone

SCHEMA_VERSION = "1"

_count = {"type": "integer", "minimum": 0}
_real = {"type": "number"}

_RUN_FIELDS = {
    "algorithm": {"enum": ["lloyd", "elkan", "lloyd-ccl", "elkan-ccl"]},
    "k": {"type": "integer", "minimum": 1},
    "k_prime": {"type": ["integer", "null"], "minimum": 1},
    "seeding": {"enum": ["random", "kmeanspp"]},
    "rng_seed": {"type": "integer"},
    "max_iters": {"type": "integer", "minimum": 1},
    "threads": {"type": "integer", "minimum": 1},
    "iterations": _count,
    "converged": {"type": "boolean"},
    "wall_time_ms": {"type": "number", "minimum": 0},
    "point_centroid_distances": _count,
    "post_first_iteration_distances": _count,
    "center_center_distances": _count,
    "lower_bound_updates": _count,
    "final_mse": {"type": "number", "minimum": 0},
    "ccl_recall": {"type": "number", "minimum": 0, "maximum": 1},
}

RUN_RESULT_SCHEMA = {
    "type": "object",
    "properties": _RUN_FIELDS,
    "required": [
        "algorithm", "k", "k_prime", "seeding", "rng_seed", "iterations",
        "wall_time_ms", "point_centroid_distances", "center_center_distances",
        "final_mse",
    ],
    "additionalProperties": False,
}

BENCH_SCHEMA = {
    "type": "object",
    "properties": {
        "base": RUN_RESULT_SCHEMA,
        "augmented": RUN_RESULT_SCHEMA,
        "speedup": {"type": "number", "exclusiveMinimum": 0},
        "pim": _real,
        "ccl_recall": {"type": "number", "minimum": 0, "maximum": 1},
        "distance_ratio": {"type": ["number", "null"]},
        "environment": {"type": "string"},
    },
    "required": ["base", "augmented", "speedup", "pim", "ccl_recall"],
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ccl-kmeans report",
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": ["run", "bench", "sweep"]},
        "arguments": {"type": "object"},
        "created_utc": {"type": "string"},
        "dataset": {
            "type": "object",
            "properties": {"path": {"type": "string"}, "n": _count, "d": _count},
            "required": ["path", "n", "d"],
        },
        "environment": {"type": "string"},
        "result": RUN_RESULT_SCHEMA,
        "bench": BENCH_SCHEMA,
        "rows": {"type": "array", "items": BENCH_SCHEMA},
    },
    "required": ["schema_version", "command", "arguments", "created_utc", "dataset"],
    "oneOf": [
        {"required": ["result"]},
        {"required": ["bench"]},
        {"required": ["rows"]},
    ],
}


def _check_finite(obj, where="report"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite number in {where}")
    if isinstance(obj, dict):
        for key, value in obj.items():
            _check_finite(value, f"{where}.{key}")
    elif isinstance(obj, list):
        for i, value in enumerate(obj):
            _check_finite(value, f"{where}[{i}]")


def make_document(command: str, arguments: dict, dataset: dict, **payload) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "arguments": arguments,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "dataset": dataset,
        **payload,
    }
    _check_finite(doc)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
