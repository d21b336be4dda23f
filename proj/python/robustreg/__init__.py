"""Robust regression by iterative median/MAD reweighting.

Thin Python layer over the C++ core. Reports come back as plain dicts.
"""

import json as _json

from ._core import (
    REPORT_SCHEMA_VERSION,
    ConfigError,
    Dataset,
    IoError,
    NumericalError,
    RobustFit,
    dataset_ids,
    generate,
    linear_fit,
    mad,
    median,
    r_squared,
    read_table,
    rmse,
    robust_fit,
    split,
    weight,
    weight_matrix,
    write_table,
)
from ._core import run_experiment_json as _run_experiment_json

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "ConfigError",
    "Dataset",
    "IoError",
    "NumericalError",
    "RobustFit",
    "dataset_ids",
    "generate",
    "linear_fit",
    "mad",
    "median",
    "r_squared",
    "read_table",
    "rmse",
    "robust_fit",
    "run_experiment",
    "split",
    "weight",
    "weight_matrix",
    "write_table",
]


def run_experiment(config, write_files=True):
    """Run one experiment described by a config dict; returns the report dict.

    With write_files=False nothing is written and `output_dir` may be omitted.
    """
    return _json.loads(_run_experiment_json(_json.dumps(config), write_files))
