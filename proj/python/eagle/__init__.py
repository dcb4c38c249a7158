"""Contrastive graph-autoencoder anomaly detection for heterogeneous graphs."""

from ._eagle import (
    Checkpoint,
    ConfigError,
    DataError,
    HetGraph,
    TrainingError,
    auc,
    detect,
    generate,
    inject,
    load_graph,
    pretrain,
    save_graph,
    split,
)

__all__ = [
    "Checkpoint",
    "ConfigError",
    "DataError",
    "HetGraph",
    "TrainingError",
    "auc",
    "detect",
    "generate",
    "inject",
    "load_graph",
    "pretrain",
    "save_graph",
    "split",
]
