# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The streamcc Authors
"""Streaming channel charting with a curated core CSI memory."""

from ._streamcc import (
    ChartModel,
    ConfigError,
    DimensionError,
    NumericError,
    ParameterError,
    ParseError,
    RunConfig,
    StreamccError,
    adp_dissimilarity,
    continuity,
    cosine_similarity,
    delay_domain,
    evaluate,
    evaluate_chart,
    feature,
    import_external,
    kruskal_stress,
    load_model,
    rajski_distance,
    read_records,
    reproduce,
    stream,
    synthesize_channel,
    train,
    trustworthiness,
)

__all__ = [
    "ChartModel",
    "ConfigError",
    "DimensionError",
    "NumericError",
    "ParameterError",
    "ParseError",
    "RunConfig",
    "StreamccError",
    "adp_dissimilarity",
    "continuity",
    "cosine_similarity",
    "delay_domain",
    "evaluate",
    "evaluate_chart",
    "feature",
    "import_external",
    "kruskal_stress",
    "load_model",
    "rajski_distance",
    "read_records",
    "reproduce",
    "stream",
    "synthesize_channel",
    "train",
    "trustworthiness",
]
