#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
graph_core.py - immutable sparse graph and the Laplacian/cut primitives

The Laplacian L = D - A is never materialized; every quadratic form is
evaluated with a single pass over the edge list.

.. Licence MIT
"""
import logging
import re
from typing import Iterable, Optional, TextIO, Tuple

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger("sceembed")

# optional header overriding node count, e.g. "# nodes=2708"
_NODES_HEADER_RE = re.compile(r"^#\s*nodes\s*=\s*(\S+)\s*$")
_UINT_RE = re.compile(r"^\d+$")


class DimensionError(ValueError):
    """Raised when shapes of vectors or matrices do not match."""

    pass


class EdgeListParseError(ValueError):
    """
    Raised when edge list can not be parsed.

    Attributes:
        message -- explanation of the error
        line_number -- 1-based number of offending line (None for global errors)
    """

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = "line {}: {}".format(line_number, message)
        super().__init__(message)
        self.message = message
        self.line_number = line_number


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class Graph:
    """
    Undirected simple graph in compressed sparse row form.

    Neighbor lists are sorted ascending, symmetric and free of self-loops and
    duplicates. Instances are immutable; all arrays are read-only.

    **Examples:**

    .. code-block:: python

        from sceembed import Graph, laplacian_quadratic

        path = Graph.from_edges(3, [(0, 1), (1, 2)])
        print(path.m)  # prints: 2
        print(laplacian_quadratic(path, [0.0, 1.0, 0.0]))  # prints: 2.0
    """

    __slots__ = (
        "_n",
        "_indptr",
        "_indices",
        "_degrees",
        "_edges",
        "_adjacency",
        "skipped_self_loops",
    )

    def __init__(
        self,
        n: int,
        indptr: np.ndarray,
        indices: np.ndarray,
        skipped_self_loops: int = 0,
    ):
        """
        :param int n: number of nodes
        :param indptr: CSR offsets, length n + 1
        :param indices: concatenated sorted neighbor lists
        :param int skipped_self_loops: self-loops dropped while building
        :raises: DimensionError when CSR arrays are inconsistent
        """
        indptr = np.array(indptr, dtype=np.int64, copy=True)
        indices = np.array(indices, dtype=np.int64, copy=True)
        if n < 0 or indptr.shape != (n + 1,) or indptr[0] != 0:
            raise DimensionError("CSR offsets do not match node count {}".format(n))
        if indptr[-1] != indices.shape[0]:
            raise DimensionError("CSR offsets do not match neighbor array length")
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise DimensionError("neighbor id out of range")

        self._n = int(n)
        self._indptr = _readonly(indptr)
        self._indices = _readonly(indices)
        self._degrees = _readonly(np.diff(indptr))
        self._edges: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self._adjacency: Optional[sp.csr_matrix] = None
        self.skipped_self_loops = int(skipped_self_loops)

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Tuple[int, int]], skipped_self_loops: int = 0
    ) -> "Graph":
        """
        Build graph from (u, v) pairs. Reversed and repeated pairs collapse
        into one edge, self-loops are dropped.

        :param int n: number of nodes
        :param edges: iterable of node id pairs
        :param int skipped_self_loops: count already dropped by the caller
        :return: new graph
        :rtype: Graph
        :raises: DimensionError when node id is out of range
        """
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges)
        pairs = pairs.astype(np.int64, copy=False).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise DimensionError("edge endpoint out of range for n={}".format(n))

        loops = pairs[:, 0] == pairs[:, 1]
        pairs = pairs[~loops]
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        undirected = np.stack([lo, hi], axis=1)
        if undirected.size:
            undirected = np.unique(undirected, axis=0)

        rows = np.concatenate([undirected[:, 0], undirected[:, 1]])
        cols = np.concatenate([undirected[:, 1], undirected[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])

        return cls(
            n, indptr, cols, skipped_self_loops=skipped_self_loops + int(loops.sum())
        )

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self._n

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return int(self._indices.shape[0] // 2)

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def degrees(self) -> np.ndarray:
        """Per-node degree d_i (read-only int64 array)."""
        return self._degrees

    def neighbors(self, node: int) -> np.ndarray:
        """
        Sorted neighbor ids of given node

        :param int node: node id
        :rtype: numpy.ndarray
        """
        if not 0 <= node < self._n:
            raise IndexError("node {} out of range for n={}".format(node, self._n))
        return self._indices[self._indptr[node] : self._indptr[node + 1]]

    def edges(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Endpoints (u, v) of every undirected edge with u < v, sorted.

        :return: tuple of two int64 arrays of length m
        :rtype: tuple
        """
        if self._edges is None:
            rows = np.repeat(np.arange(self._n, dtype=np.int64), self._degrees)
            upper = rows < self._indices
            self._edges = (_readonly(rows[upper]), _readonly(self._indices[upper]))
        return self._edges

    def adjacency(self) -> sp.csr_matrix:
        """
        Adjacency matrix A as scipy CSR matrix of 64-bit floats.

        :rtype: scipy.sparse.csr_matrix
        """
        if self._adjacency is None:
            data = np.ones(self._indices.shape[0], dtype=np.float64)
            self._adjacency = sp.csr_matrix(
                (data, self._indices.copy(), self._indptr.copy()),
                shape=(self._n, self._n),
            )
        return self._adjacency

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
        )

    def __hash__(self):
        return hash((self._n, self._indices.tobytes()))

    def __repr__(self) -> str:
        return "Graph(n={}, m={})".format(self._n, self.m)


def check_matrix(
    matrix, rows: Optional[int] = None, name: str = "matrix"
) -> np.ndarray:
    """
    Validates dense matrix and returns it as C-ordered float64 array.

    :param matrix: array-like with two dimensions
    :param int rows: expected row count, None to skip the check
    :param str name: name used in error messages
    :return: validated matrix
    :rtype: numpy.ndarray
    :raises: DimensionError on wrong shape, ValueError on non-finite entries
    """
    array = np.ascontiguousarray(matrix, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError("{} must be two dimensional".format(name))
    if rows is not None and array.shape[0] != rows:
        raise DimensionError(
            "{} has {} rows, expected {}".format(name, array.shape[0], rows)
        )
    if not np.all(np.isfinite(array)):
        raise ValueError("{} contains NaN or infinite entries".format(name))
    return array


def load_edge_list(stream: TextIO) -> Graph:
    """
    Parse whitespace separated edge list.

    Lines starting with `#` are comments; `# nodes=N` sets the node count,
    otherwise it is the largest id plus one. Self-loop lines are skipped
    and counted in `Graph.skipped_self_loops`.

    :param stream: text stream with one `u v` pair per line
    :return: parsed graph
    :rtype: Graph
    :raises: EdgeListParseError on malformed line or too small header
    """
    header_nodes = None
    pairs = []
    skipped = 0
    for line_number, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        if line[0] == "#":
            header = _NODES_HEADER_RE.match(line)
            if header:
                if not _UINT_RE.match(header.group(1)):
                    raise EdgeListParseError(
                        "invalid node count '{}'".format(header.group(1)), line_number
                    )
                header_nodes = int(header.group(1))
            continue

        tokens = line.split()
        if len(tokens) != 2 or not all(_UINT_RE.match(tok) for tok in tokens):
            raise EdgeListParseError(
                "expected two non-negative integers, got '{}'".format(line),
                line_number,
            )
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            skipped += 1
            continue
        pairs.append((u, v))

    max_id = max((max(u, v) for u, v in pairs), default=-1)
    n = max_id + 1
    if header_nodes is not None:
        if header_nodes <= max_id:
            raise EdgeListParseError(
                "header declares {} nodes but node id {} is used".format(
                    header_nodes, max_id
                )
            )
        n = header_nodes

    if skipped:
        logger.warning("Skipped %d self-loop line(s) in edge list.", skipped)

    return Graph.from_edges(n, pairs, skipped_self_loops=skipped)


def indicator(n: int, nodes: Iterable[int]) -> np.ndarray:
    """
    0/1 indicator vector x_S of node subset S.

    :raises: IndexError when node id is not in range [0, n)
    """
    ids = np.fromiter((int(node) for node in nodes), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise IndexError("node id out of range for n={}".format(n))
    x = np.zeros(n, dtype=np.float64)
    x[ids] = 1.0
    return x


def laplacian_quadratic(g: Graph, x) -> float:
    """
    Smoothness x^T L x = sum over edges (x_i - x_j)^2.

    :param Graph g: graph
    :param x: real vector of length n
    :rtype: float
    :raises: DimensionError on length mismatch
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DimensionError(
            "vector of shape {} does not match n={}".format(x.shape, g.n)
        )
    u, v = g.edges()
    diff = x[u] - x[v]
    return float(np.dot(diff, diff))


def laplacian_quadratic_matrix(g: Graph, X) -> float:
    """
    Tr(X^T L X) = sum over edges of squared row distances.

    :param Graph g: graph
    :param X: n x d matrix
    :rtype: float
    :raises: DimensionError on row count mismatch
    """
    X = check_matrix(X, rows=g.n, name="X")
    u, v = g.edges()
    diff = X[u] - X[v]
    return float(np.einsum("ij,ij->", diff, diff))


def cut_size(g: Graph, nodes: Iterable[int]) -> int:
    """
    Number of edges crossing between S and its complement.

    >>> cut_size(Graph.from_edges(3, [(0, 1), (1, 2)]), [0])
    1

    :param Graph g: graph
    :param nodes: node ids of S
    :rtype: int
    :raises: IndexError when node id >= n
    """
    member = indicator(g.n, nodes).astype(bool)
    u, v = g.edges()
    return int(np.count_nonzero(member[u] != member[v]))
