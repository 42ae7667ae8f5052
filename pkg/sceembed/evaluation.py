#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
evaluation.py - random per-class splits, logistic-regression probe on frozen
embeddings, accuracy and Micro-F1

.. Licence MIT
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from sceembed.graph_core import DimensionError, check_matrix
from sceembed.rngs import SeedLike, make_rng

# probe defaults: plain gradient descent from zero weights
PROBE_ITERS = 300
PROBE_LR = 0.1
PROBE_L2 = 1e-4

UNLABELED = -1


class SplitError(ValueError):
    """
    Raised when labels can not be split or probed.

    Attributes:
        message -- explanation of the error
        label -- offending class id, if any
    """

    def __init__(self, message: str, label: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.label = label


@dataclass(frozen=True)
class LabeledSplit:
    """Train/test partition of the labeled nodes."""

    train_idx: np.ndarray
    test_idx: np.ndarray
    labels: np.ndarray
    num_classes: int


@dataclass
class ProbeResult:
    accuracy: float
    micro_f1: float
    weights: np.ndarray
    bias: np.ndarray
    loss_history: List[float]
    predictions: np.ndarray


def make_splits(
    labels: Sequence[int], per_class: int, num_splits: int, seed: SeedLike = None
) -> List[LabeledSplit]:
    """
    Sample `per_class` training nodes per class; all other labeled nodes
    are test nodes. Label -1 marks unlabeled nodes.

    :param labels: per-node class id
    :param int per_class: training nodes per class
    :param int num_splits: number of splits
    :param seed: int seed or Generator
    :rtype: list
    :raises: SplitError naming the class when it has too few members
    """
    labels = np.asarray(labels, dtype=np.int64)
    if per_class < 1:
        raise SplitError("per_class must be >= 1")
    labeled = np.flatnonzero(labels != UNLABELED)
    if labeled.size == 0:
        raise SplitError("no labeled nodes")
    classes = np.unique(labels[labeled])
    if classes.min() < 0:
        raise SplitError("class ids must be >= 0 (or -1 for unlabeled)")
    members = {int(c): np.flatnonzero(labels == c) for c in classes}
    for label, nodes in members.items():
        if nodes.size < per_class:
            raise SplitError(
                "class {} has {} nodes, fewer than {} per class".format(
                    label, nodes.size, per_class
                ),
                label=label,
            )

    rng = make_rng(seed)
    num_classes = int(classes.max()) + 1
    splits = []
    for _ in range(num_splits):
        train = np.sort(
            np.concatenate(
                [
                    rng.choice(members[int(c)], size=per_class, replace=False)
                    for c in classes
                ]
            )
        )
        test = np.setdiff1d(labeled, train, assume_unique=True)
        splits.append(LabeledSplit(train, test, labels, num_classes))
    return splits


def accuracy(pred, truth) -> float:
    pred, truth = _check_pair(pred, truth)
    if pred.size == 0:
        return 0.0
    return float(np.mean(pred == truth))


def micro_f1(pred, truth) -> float:
    """
    Micro-averaged F1 with true/false positives and false negatives pooled
    over all classes.

    :raises: DimensionError on length mismatch
    """
    pred, truth = _check_pair(pred, truth)
    classes = np.union1d(pred, truth)
    tp = fp = fn = 0
    for c in classes:
        tp += int(np.count_nonzero((pred == c) & (truth == c)))
        fp += int(np.count_nonzero((pred == c) & (truth != c)))
        fn += int(np.count_nonzero((pred != c) & (truth == c)))
    denominator = 2 * tp + fp + fn
    return 2.0 * tp / denominator if denominator else 0.0


def _check_pair(pred, truth) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).reshape(-1)
    truth = np.asarray(truth).reshape(-1)
    if pred.shape != truth.shape:
        raise DimensionError(
            "{} predictions for {} labels".format(pred.shape[0], truth.shape[0])
        )
    return pred, truth


def _center(train: np.ndarray, other: np.ndarray):
    # translation only, the embedding scale reaches the probe unchanged
    mean = train.mean(axis=0)
    return train - mean, other - mean


def logistic_probe(
    Z,
    split: LabeledSplit,
    l2: float = PROBE_L2,
    iters: int = PROBE_ITERS,
    lr: float = PROBE_LR,
) -> ProbeResult:
    """
    Multinomial logistic regression on frozen embeddings.

    Weights start at zero and follow full-batch gradient descent on mean
    softmax cross-entropy plus l2 * ||W||^2. Two additions to a plain
    weights-only model: columns are centered with the training mean (no
    rescaling, so the fixed step count acts as early stopping on small
    embeddings), and an unpenalized bias is fitted alongside the weights.

    :param Z: embedding matrix covering all labeled nodes
    :param LabeledSplit split: train/test partition
    :param float l2: weight penalty
    :param int iters: gradient steps, >= 1
    :param float lr: step size
    :rtype: ProbeResult
    :raises: SplitError on single-class training set
    """
    Z = check_matrix(Z, name="embeddings")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if Z.shape[0] < split.labels.shape[0]:
        raise DimensionError("embeddings do not cover all labeled nodes")
    y_train = split.labels[split.train_idx]
    y_test = split.labels[split.test_idx]
    if np.unique(y_train).size < 2:
        raise SplitError("training set holds a single class")

    X_train, X_test = _center(Z[split.train_idx], Z[split.test_idx])
    count, dim = X_train.shape
    targets = np.zeros((count, split.num_classes))
    targets[np.arange(count), y_train] = 1.0

    weights = np.zeros((dim, split.num_classes))
    bias = np.zeros(split.num_classes)
    history = []
    for _ in range(iters):
        logits = X_train @ weights + bias
        log_probs = log_softmax(logits, axis=1)
        history.append(
            float(-np.sum(targets * log_probs) / count + l2 * np.sum(weights * weights))
        )
        residual = (softmax(logits, axis=1) - targets) / count
        weights = weights - lr * (X_train.T @ residual + 2.0 * l2 * weights)
        bias = bias - lr * residual.sum(axis=0)

    predictions = np.argmax(X_test @ weights + bias, axis=1)
    return ProbeResult(
        accuracy=accuracy(predictions, y_test),
        micro_f1=micro_f1(predictions, y_test),
        weights=weights,
        bias=bias,
        loss_history=history,
        predictions=predictions,
    )


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and population standard deviation."""
    values = np.asarray(values, dtype=np.float64)
    return float(values.mean()), float(values.std())
