"""Conditional VAE for daily load profiles (C++ core)."""

import json as _json

from ._loadgen import (
    Cvae,
    DataError,
    FormatError,
    NumericError,
    ShapeError,
    ae_recon_errors,
    derive_seed,
    energy_distance,
    energy_distance_full,
    energy_to_power,
    kmeans_fit,
    ks_per_dimension,
    ks_statistic,
    load_checkpoint,
    make_condition,
    month_condition,
    read_dataset,
    save_checkpoint,
    train,
)
from ._loadgen import run_command as _run_command


def run(command, config=None, mode="match-training", noise=True):
    """Run a pipeline command (simulate, prep, train, generate, evaluate) and return its log."""
    text = "" if config is None else _json.dumps(config)
    return _run_command(command, text, mode, noise)


__all__ = [
    "Cvae",
    "DataError",
    "FormatError",
    "NumericError",
    "ShapeError",
    "ae_recon_errors",
    "derive_seed",
    "energy_distance",
    "energy_distance_full",
    "energy_to_power",
    "kmeans_fit",
    "ks_per_dimension",
    "ks_statistic",
    "load_checkpoint",
    "make_condition",
    "month_condition",
    "read_dataset",
    "run",
    "save_checkpoint",
    "train",
]
