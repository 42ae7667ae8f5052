#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
This file contains pytests for weight initialization, the linear encoder and
multi-scale aggregation

.. Licence MIT
"""
import math

import numpy as np
import pytest

from sceembed import (
    Aggregator,
    ConfigError,
    DimensionError,
    ModelParams,
    aggregate,
    embed,
    forward,
    init_params,
)


def test_init_params_range():
    params = init_params([(4, 3)], seed=7)
    (W,) = params.scales[0]
    limit = math.sqrt(6 / 7)
    assert W.shape == (4, 3)
    assert np.all(np.abs(W) < limit)


def test_init_params_deterministic():
    first = init_params([(8, 6, 4), (8, 6, 4)], seed=3)
    second = init_params([(8, 6, 4), (8, 6, 4)], seed=3)
    for a, b in zip(first.weights(), second.weights()):
        assert np.array_equal(a, b)
    assert first.dims() == [[8, 6, 4], [8, 6, 4]]
    # scales get independent streams
    assert not np.array_equal(first.scales[0][0], first.scales[1][0])


@pytest.mark.parametrize("dims", [(4, 0), (4,), (0, 3)])
def test_init_params_invalid(dims):
    """
    Testing chains without an output or with a zero width are rejected

    :param tuple dims: layer chain
    """
    with pytest.raises(ConfigError):
        init_params([dims], seed=0)


def test_forward_identity():
    F = np.random.default_rng(0).standard_normal((5, 3))
    assert np.array_equal(forward(F, [np.eye(3)]), F)


def test_forward_product():
    rng = np.random.default_rng(1)
    F = rng.standard_normal((20, 8))
    W1, W2, W3 = (rng.standard_normal(shape) for shape in ((8, 4), (4, 3), (3, 2)))
    assert np.allclose(forward(F, [W1, W2, W3]), F @ (W1 @ W2 @ W3), atol=1e-10)
    assert np.allclose(forward(F, [W1, W2]), F @ (W1 @ W2), atol=1e-10)


def test_forward_zero_input():
    params = init_params([(5, 4, 2)], seed=2)
    assert np.array_equal(forward(np.zeros((3, 5)), params.scales[0]), np.zeros((3, 2)))


def test_forward_linear():
    rng = np.random.default_rng(3)
    stack = init_params([(6, 5, 3)], seed=4).scales[0]
    F, G = rng.standard_normal((10, 6)), rng.standard_normal((10, 6))
    combined = forward(2.5 * F - 0.5 * G, stack)
    expected = 2.5 * forward(F, stack) - 0.5 * forward(G, stack)
    assert np.allclose(combined, expected, rtol=1e-9, atol=1e-12)


def test_forward_chain_mismatch():
    with pytest.raises(DimensionError):
        forward(np.ones((2, 3)), [np.ones((4, 2))])


def test_aggregate_concat_shape():
    Z_list = [np.full((4, 3), float(i)) for i in range(3)]
    merged = aggregate(Z_list, "concat")
    assert merged.shape == (4, 9)
    assert np.array_equal(merged[:, 3:6], Z_list[1])


def test_aggregate_mean_identical():
    Z = np.random.default_rng(5).standard_normal((4, 2))
    assert np.allclose(aggregate([Z, Z, Z], Aggregator.MEAN), Z, rtol=0, atol=1e-14)


def test_aggregate_max():
    first = np.array([[1.0, -2.0], [0.0, 5.0]])
    second = np.array([[0.0, 3.0], [2.0, -1.0]])
    assert aggregate([first, second], "max").tolist() == [[1.0, 3.0], [2.0, 5.0]]


@pytest.mark.parametrize("mode", list(Aggregator))
def test_aggregate_single(mode):
    """
    Testing a single scale passes through every mode unchanged

    :param Aggregator mode: aggregation mode
    """
    Z = np.random.default_rng(6).standard_normal((3, 2))
    assert aggregate([Z], mode) is Z


@pytest.mark.parametrize(
    "Z_list, mode",
    [
        ([np.ones((3, 2)), np.ones((4, 2))], "concat"),
        ([np.ones((3, 2)), np.ones((3, 3))], "mean"),
        ([np.ones((3, 2)), np.ones((3, 3))], "max"),
        ([], "concat"),
    ],
)
def test_aggregate_shape_errors(Z_list, mode):
    """
    Testing aggregation rejects mismatching shapes

    :param list Z_list: per-scale embeddings
    :param str mode: aggregation mode
    """
    with pytest.raises(DimensionError):
        aggregate(Z_list, mode)


def test_multiscale_single_scale_reduces_to_forward():
    F = np.random.default_rng(7).standard_normal((6, 4))
    params = init_params([(4, 3)], seed=8)
    assert np.array_equal(
        embed([F], params, Aggregator.CONCAT), forward(F, params.scales[0])
    )


def test_embed_level_count():
    params = ModelParams([[np.eye(2)], [np.eye(2)]])
    with pytest.raises(DimensionError):
        embed([np.ones((3, 2))], params, "mean")
