# Copyright 2026 The cfsample Authors.
# SPDX-License-Identifier: Apache-2.0
"""Sampling strategies and benchmark tooling for recommender datasets."""

from ._core import (
    Dataset,
    Error,
    Model,
    Split,
    __version__,
    evaluate,
    filter_min_interactions,
    kendall_tau,
    pagerank,
    run_experiment,
    sample,
    sigmoid_propensity,
    split,
    strategies,
    synthetic,
    train,
)

__all__ = [
    "Dataset",
    "Error",
    "Model",
    "Split",
    "__version__",
    "evaluate",
    "filter_min_interactions",
    "kendall_tau",
    "pagerank",
    "run_experiment",
    "sample",
    "sigmoid_propensity",
    "split",
    "strategies",
    "synthetic",
    "train",
]
