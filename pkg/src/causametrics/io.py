"""File formats: JSON schemas for every emitted document, CSV helpers and number formatting."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SIG_DIGITS = 12

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

MATRIX_SCHEMA = {
    "type": "object",
    "required": ["rows", "cols", "entries"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": _COMPLEX},
    },
}

PROCESS_SCHEMA = {
    "type": "object",
    "required": ["systems", "matrix"],
    "properties": {
        "systems": {
            "type": "array", "minItems": 4, "maxItems": 4,
            "items": {"type": "object", "required": ["label", "dim"],
                      "properties": {"label": {"enum": ["a1", "a2", "b1", "b2"]},
                                     "dim": {"type": "integer", "minimum": 1}}},
        },
        "matrix": MATRIX_SCHEMA,
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["alpha", "dim", "psi"],
    "properties": {
        "alpha": {"type": "array", "items": _COMPLEX, "minItems": 3, "maxItems": 3},
        "dim": {"type": "integer", "minimum": 1},
        "psi": {"oneOf": [
            {"type": "object", "required": ["preset"],
             "properties": {"preset": {"enum": ["product", "mixed_b1"]}}},
            {"type": "object", "required": ["vector", "e3_dim"],
             "properties": {"vector": {"type": "array", "items": _COMPLEX},
                            "e3_dim": {"type": "integer", "minimum": 1}}},
        ]},
    },
}

VALIDITY_SCHEMA = {
    "type": "object",
    "required": ["valid", "psd", "trace_ok", "normalized", "residuals"],
    "properties": {
        "valid": {"type": "boolean"},
        "psd": {"type": "boolean"},
        "trace_ok": {"type": "boolean"},
        "normalized": {"type": "boolean"},
        "residuals": {"type": "object", "additionalProperties": {"type": ["number", "null"]}},
    },
}

SIGNAL_SCHEMA = {
    "type": "object",
    "required": ["signals"],
    "properties": {"signals": {"type": "boolean"}, "residual": {"type": "number"},
                   "direction": {"enum": ["fwd", "bwd"]}},
}

ORACLE_SCHEMA = {
    "type": "object",
    "required": ["formula", "canonical", "sampled_max", "n_samples", "seed", "agrees"],
    "properties": {
        "formula": {"type": "number"},
        "canonical": {"type": "number"},
        "sampled_max": {"type": "number"},
        "n_samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "agrees": {"type": "boolean"},
    },
}

RECONSTRUCTION_SCHEMA = {
    "type": "object",
    "required": ["alpha_abs", "dim", "thresholds", "diagnostics"],
    "properties": {
        "alpha_abs": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1},
                      "minItems": 3, "maxItems": 3},
        "dim": {"type": ["integer", "null"], "minimum": 1},
        "thresholds": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "diagnostics": {"type": "object"},
    },
}

MEASURE_SCHEMA = {
    "type": "object",
    "required": ["measure", "value"],
    "properties": {"measure": {"type": "string"}, "value": {"type": "number", "minimum": 0}},
}

AXIOM_SCHEMA = {
    "type": "object",
    "required": ["measure", "n_models", "n_ops", "monotone_violations", "worst_delta", "nonneg_ok",
                 "axiom3_ok", "unitary_ok", "normalized_range_ok", "level", "passed"],
    "properties": {
        "measure": {"type": "string"},
        "n_models": {"type": "integer"},
        "n_ops": {"type": "integer"},
        "monotone_violations": {"type": "integer", "minimum": 0},
        "worst_delta": {"type": ["number", "null"]},
        "nonneg_ok": {"type": "boolean"},
        "axiom3_ok": {"type": "boolean"},
        "unitary_ok": {"type": "boolean"},
        "normalized_range_ok": {"type": ["boolean", "null"]},
        "level": {"enum": ["measure", "fidelity"]},
        "passed": {"type": "boolean"},
    },
}

PROBABILITY_SCHEMA = {
    "type": "object",
    "required": ["probability"],
    "properties": {"probability": {"type": "number", "minimum": 0, "maximum": 1}},
}


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def rounded(obj):
    """Round every float in a JSON-like tree to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(rounded(obj))


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_table(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(round_sig(float(row[c]))) for c in columns])
    return buf.getvalue()


def read_profile_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read ``epsilon,q`` rows of a sampled capacity profile."""
    eps, q = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            eps.append(float(row["epsilon"]))
            q.append(float(row["q"]))
    if not eps:
        raise ValueError(f"{path} has no profile rows")
    return np.array(eps), np.array(q)


__all__ = [
    "MATRIX_SCHEMA", "PROCESS_SCHEMA", "MODEL_SCHEMA", "VALIDITY_SCHEMA", "SIGNAL_SCHEMA",
    "ORACLE_SCHEMA", "RECONSTRUCTION_SCHEMA", "MEASURE_SCHEMA", "AXIOM_SCHEMA", "PROBABILITY_SCHEMA",
    "round_sig", "rounded", "dumps", "load_json", "write_table", "read_profile_csv",
]
