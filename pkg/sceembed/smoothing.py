#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
smoothing.py - Laplacian smoothing operator (D~^-1 A~)^k

A~ = A + I and D~ = D + I. One application replaces every row by the mean
of the node's own row and its neighbors' rows.

.. Licence MIT
"""
from typing import List

import numpy as np
import scipy.sparse as sp

from sceembed.graph_core import Graph, check_matrix


class SmoothingOperator:
    """
    Fixed low-pass filter applied to node features before training.

    **Examples:**

    .. code-block:: python

        op = SmoothingOperator(graph, k=2)
        smoothed = op.smooth(features)          # F^(2)
        levels = op.smooth_all_scales(features)  # [F^(1), F^(2)]
    """

    def __init__(self, graph: Graph, k: int):
        """
        :param Graph graph: graph whose neighborhoods are averaged
        :param int k: number of smoothing iterations, k >= 0
        :raises: ValueError when k is negative
        """
        if k < 0:
            raise ValueError("smoothing depth k must be >= 0, got {}".format(k))

        self._graph = graph
        self._k = int(k)
        self._tilde_degrees = graph.degrees.astype(np.float64) + 1.0
        self._inv_degrees = 1.0 / self._tilde_degrees
        self._inv_degrees.setflags(write=False)
        # A + I with sorted column indices: each row sums neighbors and
        # itself in ascending id order
        self._a_tilde = sp.csr_matrix(
            graph.adjacency() + sp.identity(graph.n, dtype=np.float64, format="csr")
        )
        self._a_tilde.sort_indices()

    @property
    def graph(self) -> Graph:
        return self._graph

    @property
    def k(self) -> int:
        return self._k

    @property
    def inv_degrees(self) -> np.ndarray:
        """Per node 1 / (d_i + 1)."""
        return self._inv_degrees

    def propagate(self, F) -> np.ndarray:
        """
        One step F -> D~^-1 A~ F.

        The row sum is divided by d_i + 1 instead of multiplied by its
        inverse so that constant rows stay exactly constant.
        """
        summed = self._a_tilde @ F
        return summed / self._tilde_degrees[:, None]

    def smooth(self, F) -> np.ndarray:
        """
        Smoothed features F^(k); k = 0 returns a copy of F.

        :param F: n x f feature matrix
        :rtype: numpy.ndarray
        :raises: DimensionError on row count mismatch
        """
        current = check_matrix(F, rows=self._graph.n, name="features")
        if self._k == 0:
            return current.copy()
        for _ in range(self._k):
            current = self.propagate(current)
        return current

    def smooth_all_scales(self, F) -> List[np.ndarray]:
        """
        Every level [F^(1), ..., F^(k)] computed in one pass.

        :param F: n x f feature matrix
        :rtype: list
        :raises: ValueError when k < 1, DimensionError on row mismatch
        """
        if self._k < 1:
            raise ValueError("multi-scale smoothing needs k >= 1")
        current = check_matrix(F, rows=self._graph.n, name="features")
        levels = []
        for _ in range(self._k):
            current = self.propagate(current)
            levels.append(current)
        return levels


def smooth(op: SmoothingOperator, F) -> np.ndarray:
    """Function form of :meth:`SmoothingOperator.smooth`."""
    return op.smooth(F)


def smooth_all_scales(op: SmoothingOperator, F) -> List[np.ndarray]:
    """Function form of :meth:`SmoothingOperator.smooth_all_scales`."""
    return op.smooth_all_scales(F)
