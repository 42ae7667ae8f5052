#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
This file contains pytests for the Laplacian smoothing operator

.. Licence MIT
"""
import numpy as np
import pytest

from sceembed import DimensionError, Graph, SmoothingOperator, smooth, smooth_all_scales


def dense_filter(graph):
    A_tilde = graph.adjacency().toarray() + np.eye(graph.n)
    return A_tilde / A_tilde.sum(axis=1, keepdims=True)


def test_inv_degrees(p3):
    op = SmoothingOperator(p3, 1)
    assert op.inv_degrees.tolist() == [1 / 2, 1 / 3, 1 / 2]
    assert op.k == 1
    assert op.graph is p3


@pytest.mark.parametrize("k", [0, 1, 3])
def test_smooth_edgeless_is_identity(k):
    """
    Testing the filter of a graph without edges keeps features unchanged

    :param int k: smoothing depth
    """
    F = np.random.default_rng(0).standard_normal((6, 3))
    op = SmoothingOperator(Graph.from_edges(6, []), k)
    assert np.array_equal(smooth(op, F), F)


def test_smooth_p3(p3):
    F = np.array([[1.0], [0.0], [0.0]])
    smoothed = smooth(SmoothingOperator(p3, 1), F)
    assert smoothed[:, 0].tolist() == pytest.approx([1 / 2, 1 / 3, 0.0], abs=1e-15)


def test_smooth_all_scales_p3(p3):
    F = np.array([[1.0], [0.0], [0.0]])
    levels = smooth_all_scales(SmoothingOperator(p3, 2), F)
    assert len(levels) == 2
    assert levels[0][:, 0].tolist() == pytest.approx([1 / 2, 1 / 3, 0.0], abs=1e-15)
    assert levels[1][:, 0].tolist() == pytest.approx(
        [5 / 12, 5 / 18, 1 / 6], abs=1e-15
    )


def test_smooth_zero_depth_returns_copy(p3):
    F = np.arange(6, dtype=float).reshape(3, 2)
    smoothed = SmoothingOperator(p3, 0).smooth(F)
    assert np.array_equal(smoothed, F)
    assert smoothed is not F


def test_smooth_all_scales_last_level(random_graph):
    graph = random_graph(30, 0.2, seed=1)
    F = np.random.default_rng(2).standard_normal((30, 4))
    for k in (1, 2, 4):
        op = SmoothingOperator(graph, k)
        levels = op.smooth_all_scales(F)
        assert len(levels) == k
        assert np.array_equal(levels[-1], op.smooth(F))
        assert np.array_equal(levels[0], SmoothingOperator(graph, 1).smooth(F))


def test_smooth_all_scales_needs_depth(p3):
    with pytest.raises(ValueError):
        SmoothingOperator(p3, 0).smooth_all_scales(np.ones((3, 1)))


def test_negative_depth(p3):
    with pytest.raises(ValueError):
        SmoothingOperator(p3, -1)


def test_smooth_row_mismatch(p3):
    with pytest.raises(DimensionError):
        SmoothingOperator(p3, 1).smooth(np.ones((4, 2)))


def test_row_stochastic(random_graph):
    """Testing the all-ones column is a fixed point, exactly"""
    graph = random_graph(40, 0.1, seed=3)
    ones = np.ones((40, 1))
    assert np.array_equal(SmoothingOperator(graph, 1).smooth(ones), ones)


@pytest.mark.parametrize("seed", range(20))
def test_smooth_dense_oracle(random_graph, seed):
    """
    Testing sparse smoothing against dense matrix powers, plus the fixed point
    of constant rows and per-column bounds

    :param fixture random_graph: fixture holding random graph factory
    :param int seed: seed of graph, features and depth
    """
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(5, 51))
    k = int(rng.integers(1, 5))
    graph = random_graph(n, float(rng.uniform(0.05, 0.4)), seed=seed)
    F = rng.standard_normal((n, 3))
    op = SmoothingOperator(graph, k)

    expected = np.linalg.matrix_power(dense_filter(graph), k) @ F
    smoothed = op.smooth(F)
    assert np.max(np.abs(smoothed - expected)) <= 1e-10

    constant = np.tile([[0.3, -2.0, 5.0]], (n, 1))
    assert np.allclose(op.smooth(constant), constant, rtol=0, atol=1e-12)

    assert np.all(smoothed >= F.min(axis=0) - 1e-12)
    assert np.all(smoothed <= F.max(axis=0) + 1e-12)


def test_smooth_deterministic(random_graph):
    graph = random_graph(50, 0.2, seed=4)
    F = np.random.default_rng(5).standard_normal((50, 6))
    first = SmoothingOperator(graph, 3).smooth(F)
    second = SmoothingOperator(graph, 3).smooth(F.copy())
    assert np.array_equal(first, second)
