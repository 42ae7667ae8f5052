#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
model.py - multilayer linear encoder and multi-scale aggregation

No bias terms and no nonlinearities: the encoder of one scale is
F_smoothed W(1) ... W(l).

.. Licence MIT
"""
import math
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from sceembed.config import Aggregator, ConfigError
from sceembed.graph_core import DimensionError, check_matrix
from sceembed.rngs import SeedLike, make_rng, spawn_seeds

WeightStack = List[np.ndarray]


@dataclass
class ModelParams:
    """
    One weight stack per scale; plain SCE has a single scale.

    Mutated only by the trainer.
    """

    scales: List[WeightStack]

    @property
    def num_scales(self) -> int:
        return len(self.scales)

    def weights(self) -> List[np.ndarray]:
        """All weight matrices in scale order, then layer order."""
        return [weight for stack in self.scales for weight in stack]

    def copy(self) -> "ModelParams":
        return ModelParams(
            [[weight.copy() for weight in stack] for stack in self.scales]
        )

    def dims(self) -> List[List[int]]:
        """Chained widths of every stack, input width first."""
        return [
            [stack[0].shape[0]] + [weight.shape[1] for weight in stack]
            for stack in self.scales
        ]


def glorot_limit(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_params(
    dims_per_scale: Sequence[Sequence[int]], seed: SeedLike = None
) -> ModelParams:
    """
    Uniform Glorot initialization of every weight matrix.

    :param dims_per_scale: one chain (f, d_1, ..., d_l) per scale
    :param seed: int seed
    :return: freshly initialized parameters
    :rtype: ModelParams
    :raises: ConfigError on chain shorter than 2 or non-positive width
    """
    if not dims_per_scale:
        raise ConfigError("at least one scale is required")
    if isinstance(seed, np.random.Generator):
        rngs = [seed] * len(dims_per_scale)
    else:
        rngs = [make_rng(child) for child in spawn_seeds(seed, len(dims_per_scale))]

    scales = []
    for rng, dims in zip(rngs, dims_per_scale):
        dims = [int(dim) for dim in dims]
        if len(dims) < 2:
            raise ConfigError("dims {} need input and output width".format(dims))
        if any(dim <= 0 for dim in dims):
            raise ConfigError("dims {} contain a non-positive width".format(dims))
        stack = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = glorot_limit(fan_in, fan_out)
            stack.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        scales.append(stack)
    return ModelParams(scales)


def forward_layers(F_smoothed, stack: WeightStack) -> List[np.ndarray]:
    """
    Activations X(0) = F, X(j) = X(j-1) W(j) for every layer.

    :raises: DimensionError when widths do not chain
    """
    current = check_matrix(F_smoothed, name="smoothed features")
    layers = [current]
    for depth, weight in enumerate(stack, start=1):
        if current.shape[1] != weight.shape[0]:
            raise DimensionError(
                "layer {} expects {} inputs, got {}".format(
                    depth, weight.shape[0], current.shape[1]
                )
            )
        current = current @ weight
        layers.append(current)
    return layers


def forward(F_smoothed, stack: WeightStack) -> np.ndarray:
    """
    Embeddings Z = F_smoothed W(1) ... W(l).

    :param F_smoothed: n x f smoothed features (or a batch of rows)
    :param stack: weight matrices of one scale
    :rtype: numpy.ndarray
    :raises: DimensionError when widths do not chain
    """
    return forward_layers(F_smoothed, stack)[-1]


def aggregate(
    Z_list: Sequence[np.ndarray], mode: Union[Aggregator, str] = Aggregator.CONCAT
) -> np.ndarray:
    """
    Combine per-scale embeddings.

    concat appends columns in scale order; mean and max work element-wise.
    A single element is returned unchanged for every mode.

    :raises: DimensionError on shape violation
    """
    mode = Aggregator(mode)
    if not Z_list:
        raise DimensionError("nothing to aggregate")
    rows = Z_list[0].shape[0]
    if any(Z.shape[0] != rows for Z in Z_list):
        raise DimensionError("embeddings of all scales need the same row count")
    if len(Z_list) == 1:
        return Z_list[0]
    if mode in (Aggregator.CONCAT, Aggregator.NONE):
        return np.concatenate(Z_list, axis=1)
    if any(Z.shape != Z_list[0].shape for Z in Z_list):
        raise DimensionError("mean and max pooling need equally shaped embeddings")
    stacked = np.stack(Z_list)
    if mode is Aggregator.MEAN:
        return stacked.mean(axis=0)
    return stacked.max(axis=0)


def embed(
    levels: Sequence[np.ndarray], params: ModelParams, mode=Aggregator.NONE
) -> np.ndarray:
    """
    Embeddings of all scales aggregated; levels[i] feeds params.scales[i].
    """
    if len(levels) != params.num_scales:
        raise DimensionError(
            "{} smoothing levels for {} weight stacks".format(
                len(levels), params.num_scales
            )
        )
    Z_list = [forward(F, stack) for F, stack in zip(levels, params.scales)]
    return aggregate(Z_list, mode)
