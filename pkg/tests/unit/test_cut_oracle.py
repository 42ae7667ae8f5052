#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
This file contains pytests for edge expansion, exhaustive sparsest cut and
the sparsified all-pairs estimator

.. Licence MIT
"""
import math

import networkx as nx
import numpy as np
import pytest

from sceembed import (
    CutIndicator,
    CutSizeLimitError,
    CutVariant,
    DegenerateInputError,
    Graph,
    InvalidCutError,
    brute_force_sparsest_cut,
    edge_expansion,
    edge_expansion_prime,
    full_pair_distance_sum,
    sparsification_check,
    sparsified_pair_sum,
)


def all_cuts(n):
    """Every nonempty proper subset with node 0 inside, as bool rows."""
    keys = np.arange((1 << (n - 1)) - 1)
    bits = np.ones((keys.shape[0], n), dtype=bool)
    for i in range(1, n):
        bits[:, i] = (keys >> (n - 1 - i)) & 1
    return bits


def from_networkx(graph):
    mapping = {node: index for index, node in enumerate(graph.nodes())}
    return Graph.from_edges(
        graph.number_of_nodes(), [(mapping[u], mapping[v]) for u, v in graph.edges()]
    )


@pytest.mark.parametrize(
    "graph_name, nodes, phi, phi_prime",
    [
        ("k4", [0], 3.0, 1.0),
        ("barbell", [0, 1, 2], 1 / 3, 1 / 9),
        ("p3", [1], 2.0, 1.0),
        ("p3", [0], 1.0, 0.5),
    ],
)
def test_edge_expansion(request, graph_name, nodes, phi, phi_prime):
    """
    Testing both expansion objectives on named graphs

    :param fixture request: pytest request used to look up graph fixture
    :param str graph_name: name of graph fixture
    :param list nodes: members of S
    :param float phi: expected edge expansion
    :param float phi_prime: expected variant value
    """
    graph = request.getfixturevalue(graph_name)
    cut = CutIndicator.from_nodes(graph.n, nodes)
    assert edge_expansion(graph, cut) == phi
    assert edge_expansion_prime(graph, cut) == phi_prime


@pytest.mark.parametrize("nodes", [[], [0, 1, 2]])
def test_edge_expansion_invalid(p3, nodes):
    """
    Testing empty and full sets are rejected

    :param fixture p3: fixture holding path graph
    :param list nodes: members of S
    """
    cut = CutIndicator.from_nodes(3, nodes)
    with pytest.raises(InvalidCutError):
        edge_expansion(p3, cut)
    with pytest.raises(InvalidCutError):
        edge_expansion_prime(p3, cut)


def test_cut_indicator(barbell):
    cut = CutIndicator.from_nodes(6, [4, 1])
    assert cut.members() == [1, 4]
    assert cut.size == 2
    assert cut.complement().members() == [0, 2, 3, 5]
    assert not cut.bits.flags.writeable
    with pytest.raises(InvalidCutError):
        CutIndicator.from_nodes(6, [6])


def test_complement_symmetry(random_graph):
    graph = random_graph(9, 0.4, seed=3)
    rng = np.random.default_rng(4)
    for _ in range(30):
        bits = rng.random(9) < 0.5
        if 0 < bits.sum() < 9:
            cut = CutIndicator(bits)
            assert edge_expansion(graph, cut) == edge_expansion(graph, cut.complement())
            assert edge_expansion_prime(graph, cut) == edge_expansion_prime(
                graph, cut.complement()
            )


@pytest.mark.parametrize(
    "graph_name, variant, value, members",
    [
        ("barbell", "phi_prime", 1 / 9, [0, 1, 2]),
        ("barbell", "phi", 1 / 3, [0, 1, 2]),
        ("k4", "phi_prime", 1.0, [0]),
        ("k4", "phi", 2.0, [0, 3]),
        ("k2", "phi", 1.0, [0]),
    ],
)
def test_brute_force_sparsest_cut(request, graph_name, variant, value, members):
    """
    Testing exhaustive search with lexicographic tie-break

    :param fixture request: pytest request used to look up graph fixture
    :param str graph_name: name of graph fixture
    :param str variant: objective
    :param float value: expected minimum
    :param list members: expected minimizer
    """
    graph = request.getfixturevalue(graph_name)
    result = brute_force_sparsest_cut(graph, variant)
    assert result.variant is CutVariant(variant)
    assert result.value == value
    assert result.best_set.members() == members


def test_brute_force_value_is_recomputable(barbell):
    result = brute_force_sparsest_cut(barbell, CutVariant.PHI_PRIME)
    assert result.value == edge_expansion_prime(barbell, result.best_set)


def test_brute_force_not_beaten_by_random_sets(random_graph):
    graph = random_graph(12, 0.3, seed=5)
    best = {
        variant: brute_force_sparsest_cut(graph, variant).value
        for variant in CutVariant
    }
    rng = np.random.default_rng(6)
    checked = 0
    while checked < 100:
        bits = rng.random(12) < 0.5
        if not 0 < bits.sum() < 12:
            continue
        assert best[CutVariant.PHI] <= edge_expansion(graph, bits)
        assert best[CutVariant.PHI_PRIME] <= edge_expansion_prime(graph, bits)
        checked += 1


def test_brute_force_tie_break_is_lexicographic(random_graph):
    """Testing the minimizer is the smallest bit-vector among all minimizers"""
    graph = random_graph(7, 0.5, seed=7)
    bits = all_cuts(7)
    values = [edge_expansion_prime(graph, row) for row in bits]
    expected = bits[int(np.argmin(values))]
    result = brute_force_sparsest_cut(graph, CutVariant.PHI_PRIME)
    assert np.array_equal(result.best_set.bits, expected)


def test_brute_force_limits():
    with pytest.raises(CutSizeLimitError):
        brute_force_sparsest_cut(Graph.from_edges(21, [(0, 1)]))
    with pytest.raises(InvalidCutError):
        brute_force_sparsest_cut(Graph.from_edges(1, []))


def assert_sandwich(graph):
    n = graph.n
    bits = all_cuts(n)
    u, v = graph.edges()
    crossing = np.count_nonzero(bits[:, u] != bits[:, v], axis=1)
    inside = bits.sum(axis=1)
    outside = n - inside
    phi = crossing / np.minimum(inside, outside)
    phi_prime = crossing / (inside * outside)
    slack = 1e-12 * np.maximum(phi, 1.0)
    assert np.all(n / 2 * phi_prime <= phi + slack)
    assert np.all(phi <= n * phi_prime + slack)


def test_sandwich_graph_atlas():
    """Testing (n/2) phi' <= phi <= n phi' for every connected graph up to 7 nodes"""
    checked = 0
    for atlas_graph in nx.graph_atlas_g():
        n = atlas_graph.number_of_nodes()
        if n < 2 or not nx.is_connected(atlas_graph):
            continue
        assert_sandwich(from_networkx(atlas_graph))
        checked += 1
    assert checked == 995


def test_sandwich_eight_nodes():
    checked = 0
    seed = 0
    while checked < 200:
        candidate = nx.gnp_random_graph(8, 0.35, seed=seed)
        seed += 1
        if nx.is_connected(candidate):
            assert_sandwich(from_networkx(candidate))
            checked += 1


@pytest.mark.parametrize(
    "Z, expected",
    [
        ([[0.0], [1.0], [2.0]], 6.0),
        ([[1.5, -2.0], [1.5, -2.0], [1.5, -2.0]], 0.0),
        ([[3.0, 4.0]], 0.0),
        ([[0.0, 0.0], [3.0, 4.0]], 25.0),
    ],
)
def test_full_pair_distance_sum(Z, expected):
    """
    Testing the all-pairs identity on hand computed cases

    :param list Z: embedding rows
    :param float expected: sum of squared distances over unordered pairs
    """
    assert full_pair_distance_sum(Z) == expected


def test_full_pair_distance_sum_brute_force():
    Z = np.random.default_rng(8).standard_normal((50, 8))
    brute = sum(
        float(np.sum((Z[i] - Z[j]) ** 2)) for i in range(50) for j in range(i + 1, 50)
    )
    assert full_pair_distance_sum(Z) == pytest.approx(brute, rel=1e-9)


def test_sparsification_exact_at_p_one():
    """Testing p = 1 samples every pair and matches the exact sum"""
    Z = np.random.default_rng(9).standard_normal((20, 3))
    estimate, sampled = sparsified_pair_sum(Z, 1.0, seed=1)
    assert sampled == 20 * 19 // 2
    assert estimate == pytest.approx(full_pair_distance_sum(Z), rel=1e-12)
    report = sparsification_check(Z, 1.0, trials=5, seed=1)
    assert len(report.relative_errors) == 5
    assert report.max_relative_error < 1e-12


def test_sparsification_error_bound():
    """Testing ~5 n ln n sampled pairs reproduce the all-pairs sum"""
    n = 500
    Z = np.random.default_rng(10).standard_normal((n, 16))
    report = sparsification_check(Z, 5 * math.log(n) / n, trials=10, seed=11)
    assert report.mean_relative_error < 0.2
    assert len(report.relative_errors) == 10


def test_sparsification_deterministic():
    Z = np.random.default_rng(12).standard_normal((60, 4))
    first = sparsification_check(Z, 0.3, trials=4, seed=13)
    second = sparsification_check(Z, 0.3, trials=4, seed=13)
    assert first.relative_errors == second.relative_errors


def test_sparsified_estimator_unbiased():
    Z = np.random.default_rng(14).standard_normal((100, 4))
    rng = np.random.default_rng(15)
    estimates = [sparsified_pair_sum(Z, 0.1, rng)[0] for _ in range(200)]
    full = full_pair_distance_sum(Z)
    assert abs(np.mean(estimates) - full) / full < 0.05


def test_sparsified_single_pair():
    """Testing the estimator for one sampled pair is distance / p"""
    Z = np.array([[0.0, 0.0], [1.0, 2.0]])
    rng = np.random.default_rng(16)
    hits = 0
    for _ in range(50):
        estimate, sampled = sparsified_pair_sum(Z, 0.25, rng)
        if sampled:
            assert estimate == 5.0 / 0.25
            hits += 1
        else:
            assert estimate == 0.0
    assert hits > 0


def test_sparsification_errors():
    with pytest.raises(DegenerateInputError):
        sparsification_check(np.ones((5, 2)), 0.5, trials=3, seed=0)
    with pytest.raises(ValueError):
        sparsified_pair_sum(np.eye(3), 0.0)
    with pytest.raises(ValueError):
        sparsified_pair_sum(np.eye(3), 1.5)
