#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Shared fixtures: small named graphs, random graph factory and a labeled
SBM dataset.

.. Licence MIT
"""
import numpy as np
import pytest

from sceembed import SCE, Dataset, Graph, TrainConfig, gen_features, gen_sbm


@pytest.fixture
def sce():
    return SCE(TrainConfig(k=2, dims=(8,), epochs=5, alpha=1.0))


@pytest.fixture
def p3():
    """Path 0 - 1 - 2"""
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def k2():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def k4():
    return Graph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def barbell():
    """Triangles {0, 1, 2} and {3, 4, 5} joined by edge (2, 3)"""
    return Graph.from_edges(
        6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
    )


@pytest.fixture
def random_graph():
    """Factory of Erdos-Renyi graphs: random_graph(n, p, seed)"""

    def factory(n, p=0.2, seed=0):
        rng = np.random.default_rng(seed)
        first, second = np.triu_indices(n, k=1)
        keep = rng.random(first.shape[0]) < p
        return Graph.from_edges(n, np.stack([first[keep], second[keep]], axis=1))

    return factory


@pytest.fixture
def sbm_dataset():
    """Two blocks of 200 nodes, 32 pure-noise features"""
    graph, labels = gen_sbm((200, 200), 0.05, 0.005, seed=11)
    features = gen_features(labels, 32, signal=0.0, noise=1.0, seed=12)
    return Dataset(graph, features, labels, name="sbm")


@pytest.fixture
def small_dataset():
    """Four blocks of 15 nodes with weak class signal"""
    graph, labels = gen_sbm((15, 15, 15, 15), 0.4, 0.02, seed=3)
    features = gen_features(labels, 8, signal=0.5, noise=1.0, seed=4)
    return Dataset(graph, features, labels, name="small")
