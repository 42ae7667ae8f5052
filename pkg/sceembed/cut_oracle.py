#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cut_oracle.py - exact cut quantities and the sparsification check

Edge expansion phi(S) = |E(S, S')| / min(|S|, |S'|) and its variant
phi'(S) = |E(S, S')| / (|S| * |S'|) are computed exactly; the sparsest cut
is found by exhaustive enumeration for small graphs.

.. Licence MIT
"""
import enum
import math
from dataclasses import dataclass
from typing import Iterable, List, Union

import numpy as np

from sceembed.graph_core import Graph, DimensionError, check_matrix
from sceembed.rngs import SeedLike, make_rng

# largest graph brute_force_sparsest_cut accepts (2^(n-1) subsets)
MAX_BRUTE_FORCE_NODES = 20

# subsets evaluated at once during enumeration
_CHUNK = 1 << 14


class InvalidCutError(ValueError):
    """Raised when cut is empty, covers all nodes or has wrong length."""

    pass


class CutSizeLimitError(ValueError):
    """Raised when graph is too large for exhaustive enumeration."""

    pass


class DegenerateInputError(ValueError):
    """Raised when all embedding rows coincide (all-pairs sum is zero)."""

    pass


class CutVariant(str, enum.Enum):
    """Objective minimized by the sparsest cut search."""

    PHI = "phi"
    PHI_PRIME = "phi_prime"


@dataclass(frozen=True)
class CutIndicator:
    """
    Indicator vector x_S of node subset S (True = member of S).
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool, copy=True).reshape(-1)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[int]) -> "CutIndicator":
        """
        :raises: InvalidCutError when node id is out of range
        """
        bits = np.zeros(n, dtype=bool)
        for node in nodes:
            if not 0 <= node < n:
                raise InvalidCutError("node {} out of range for n={}".format(node, n))
            bits[node] = True
        return cls(bits)

    @property
    def n(self) -> int:
        return int(self.bits.shape[0])

    @property
    def size(self) -> int:
        """Number of members |S|."""
        return int(np.count_nonzero(self.bits))

    def members(self) -> List[int]:
        """Sorted node ids of S."""
        return [int(node) for node in np.flatnonzero(self.bits)]

    def complement(self) -> "CutIndicator":
        return CutIndicator(~self.bits)


@dataclass(frozen=True)
class CutResult:
    """Minimizer found by exhaustive search."""

    best_set: CutIndicator
    value: float
    variant: CutVariant


@dataclass(frozen=True)
class SparsificationReport:
    """Relative errors of the sampled all-pairs estimator, one per trial."""

    mean_relative_error: float
    max_relative_error: float
    relative_errors: List[float]
    full_sum: float


CutLike = Union[CutIndicator, np.ndarray, Iterable[bool]]


def _cut_and_sides(g: Graph, cut: CutLike):
    bits = cut.bits if isinstance(cut, CutIndicator) else np.asarray(cut, dtype=bool)
    if bits.shape != (g.n,):
        raise InvalidCutError(
            "indicator of length {} does not match n={}".format(bits.shape, g.n)
        )
    size = int(np.count_nonzero(bits))
    if size == 0 or size == g.n:
        raise InvalidCutError("cut must be a nonempty proper subset of nodes")
    u, v = g.edges()
    crossing = int(np.count_nonzero(bits[u] != bits[v]))
    return crossing, size, g.n - size


def edge_expansion(g: Graph, cut: CutLike) -> float:
    """
    Edge expansion phi(S) = |E(S, S')| / min(|S|, |S'|).

    :param Graph g: graph
    :param cut: CutIndicator or boolean vector of length n
    :rtype: float
    :raises: InvalidCutError when S is empty or contains all nodes
    """
    crossing, inside, outside = _cut_and_sides(g, cut)
    return crossing / min(inside, outside)


def edge_expansion_prime(g: Graph, cut: CutLike) -> float:
    """
    Variant phi'(S) = |E(S, S')| / (|S| * |S'|).

    :param Graph g: graph
    :param cut: CutIndicator or boolean vector of length n
    :rtype: float
    :raises: InvalidCutError when S is empty or contains all nodes
    """
    crossing, inside, outside = _cut_and_sides(g, cut)
    return crossing / (inside * outside)


def brute_force_sparsest_cut(
    g: Graph, variant: Union[CutVariant, str] = CutVariant.PHI
) -> CutResult:
    """
    Exhaustive search of the sparsest cut.

    Node 0 is always placed in S (both objectives are complement
    symmetric), leaving 2^(n-1) - 1 candidate subsets. Candidates are
    enumerated in lexicographic order of their indicator bit-vector, so the
    first minimum found is the tie-break winner.

    :param Graph g: graph with at most 20 nodes
    :param variant: "phi" or "phi_prime"
    :return: minimizer with its objective value
    :rtype: CutResult
    :raises: CutSizeLimitError when n > 20, InvalidCutError when n < 2
    """
    variant = CutVariant(variant)
    n = g.n
    if n > MAX_BRUTE_FORCE_NODES:
        raise CutSizeLimitError(
            "brute force is limited to {} nodes, graph has {}".format(
                MAX_BRUTE_FORCE_NODES, n
            )
        )
    if n < 2:
        raise InvalidCutError("graph needs at least two nodes to be cut")

    u, v = g.edges()
    # node i >= 1 sits at bit (n - 1 - i), so integer order of the key is the
    # lexicographic order of the bit-vector (b_0 = 1 fixed)
    shifts = np.arange(n - 2, -1, -1, dtype=np.int64)
    total = (1 << (n - 1)) - 1  # the all-ones key would be S = V

    best_value = math.inf
    best_key = -1
    for start in range(0, total, _CHUNK):
        keys = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = np.ones((keys.shape[0], n), dtype=bool)
        bits[:, 1:] = ((keys[:, None] >> shifts[None, :]) & 1).astype(bool)

        crossing = np.count_nonzero(bits[:, u] != bits[:, v], axis=1)
        inside = bits.sum(axis=1)
        outside = n - inside
        if variant is CutVariant.PHI:
            values = crossing / np.minimum(inside, outside)
        else:
            values = crossing / (inside * outside)

        pos = int(np.argmin(values))
        if values[pos] < best_value:
            best_value = float(values[pos])
            best_key = int(keys[pos])

    bits = np.ones(n, dtype=bool)
    bits[1:] = ((best_key >> shifts) & 1).astype(bool)
    return CutResult(best_set=CutIndicator(bits), value=best_value, variant=variant)


def full_pair_distance_sum(Z) -> float:
    """
    All-pairs term Tr(Z^T L_K Z) = sum over i < j of ||z_i - z_j||^2.

    Uses n * sum ||z_i||^2 - ||sum z_i||^2 on mean-centered rows, O(nd).

    :param Z: n x d matrix
    :rtype: float
    """
    Z = check_matrix(Z, name="Z")
    n = Z.shape[0]
    if n <= 1:
        return 0.0
    centered = Z - Z.mean(axis=0)
    column_sum = centered.sum(axis=0)
    return float(n * np.einsum("ij,ij->", centered, centered) - column_sum @ column_sum)


def sparsified_pair_sum(Z, p: float, seed: SeedLike = None):
    """
    One draw of the sparsified estimator.

    Every unordered pair is kept independently with probability p; returns
    the kept squared distances summed and divided by p, and the kept count.

    :param Z: n x d matrix
    :param float p: sampling probability in (0, 1]
    :param seed: int seed or Generator
    :return: (estimate, number of sampled pairs)
    :rtype: tuple
    """
    Z = check_matrix(Z, name="Z")
    if not 0.0 < p <= 1.0:
        raise ValueError("sampling probability must be in (0, 1], got {}".format(p))
    rng = make_rng(seed)
    n = Z.shape[0]
    total = 0.0
    sampled = 0
    for i in range(n - 1):
        keep = np.flatnonzero(rng.random(n - i - 1) < p) + i + 1
        if keep.size:
            diff = Z[keep] - Z[i]
            total += float(np.einsum("ij,ij->", diff, diff))
            sampled += int(keep.size)
    return total / p, sampled


def sparsification_check(
    Z, p: float, trials: int, seed: SeedLike = None
) -> SparsificationReport:
    """
    Compare the sampled all-pairs estimator with the exact sum.

    :param Z: n x d matrix, rows not all equal
    :param float p: pair sampling probability in (0, 1]
    :param int trials: number of independent trials
    :param seed: int seed or Generator
    :rtype: SparsificationReport
    :raises: DegenerateInputError when the exact sum is zero
    """
    Z = check_matrix(Z, name="Z")
    if trials < 1:
        raise DimensionError("at least one trial is required")
    full = full_pair_distance_sum(Z)
    if full <= 0.0:
        raise DegenerateInputError("all rows of Z are equal, all-pairs sum is zero")

    rng = make_rng(seed)
    errors = []
    for _ in range(trials):
        estimate, _sampled = sparsified_pair_sum(Z, p, rng)
        errors.append(abs(estimate - full) / full)

    return SparsificationReport(
        mean_relative_error=float(np.mean(errors)),
        max_relative_error=float(np.max(errors)),
        relative_errors=errors,
        full_sum=full,
    )
