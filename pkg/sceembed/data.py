#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
data.py - datasets, synthetic benchmarks and bit-exact matrix files

Binary matrix format (SCE1): 4-byte magic b"SCE1", unsigned 64-bit rows,
unsigned 64-bit cols, then rows * cols little-endian float64 values in row
major order.

.. Licence MIT
"""
import logging
import os
import re
import struct
from dataclasses import dataclass
from typing import BinaryIO, List, Optional, Sequence, Tuple, Union

import filelock
import numpy as np

from sceembed.graph_core import Graph, check_matrix, load_edge_list
from sceembed.rngs import SeedLike, make_rng

logger = logging.getLogger("sceembed")

MAGIC = b"SCE1"
_HEADER = struct.Struct("<QQ")
_VALUE_SIZE = 8
_MAX_BYTES = 1 << 62

_FIELD_SPLIT_RE = re.compile(r"[,\s]+")

PathLike = Union[str, "os.PathLike[str]"]


class MatrixFormatError(ValueError):
    """Raised when matrix file is corrupted or truncated."""

    pass


class DatasetError(ValueError):
    """Raised when dataset files disagree or generator arguments are invalid."""

    pass


@dataclass(frozen=True)
class Dataset:
    """Graph with node features and optional labels (-1 = unlabeled)."""

    graph: Graph
    features: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self):
        if self.features.shape[0] != self.graph.n:
            raise DatasetError(
                "{} feature rows for {} nodes".format(
                    self.features.shape[0], self.graph.n
                )
            )
        if self.labels is not None and self.labels.shape[0] != self.graph.n:
            raise DatasetError(
                "{} labels for {} nodes".format(self.labels.shape[0], self.graph.n)
            )

    @property
    def labeled(self) -> bool:
        return self.labels is not None


def gen_sbm(
    block_sizes: Sequence[int], p_in: float, p_out: float, seed: SeedLike = None
) -> Tuple[Graph, np.ndarray]:
    """
    Stochastic block model: every intra-block pair is an edge with
    probability p_in, every inter-block pair with probability p_out.

    :param block_sizes: nodes per block, at least two blocks
    :param float p_in: intra-block edge probability
    :param float p_out: inter-block edge probability
    :param seed: int seed or Generator
    :return: (graph, block id per node)
    :rtype: tuple
    :raises: DatasetError on invalid probability or block list
    """
    for name, p in (("p_in", p_in), ("p_out", p_out)):
        if not 0.0 <= p <= 1.0:
            raise DatasetError("{} must be within [0, 1], got {}".format(name, p))
    if len(block_sizes) < 2 or any(size < 1 for size in block_sizes):
        raise DatasetError(
            "need at least two non-empty blocks, got {}".format(block_sizes)
        )

    labels = np.repeat(np.arange(len(block_sizes), dtype=np.int64), block_sizes)
    n = labels.shape[0]
    rng = make_rng(seed)
    firsts: List[np.ndarray] = []
    seconds: List[np.ndarray] = []
    for node in range(n - 1):
        others = labels[node + 1 :]
        probs = np.where(others == labels[node], p_in, p_out)
        hits = np.flatnonzero(rng.random(others.shape[0]) < probs) + node + 1
        firsts.append(np.full(hits.shape[0], node, dtype=np.int64))
        seconds.append(hits)

    if firsts:
        edges = np.stack([np.concatenate(firsts), np.concatenate(seconds)], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, edges), labels


def gen_features(
    labels: Sequence[int],
    f: int,
    signal: float,
    noise: float,
    seed: SeedLike = None,
) -> np.ndarray:
    """
    Class-correlated features: signal * class pattern + noise * N(0, 1).

    The pattern of class c sets every column j with j % C == c, where C is
    the number of classes; with f < C class c sets column c % f. Rows with
    label -1 get no signal.

    :rtype: numpy.ndarray
    :raises: DatasetError when f < 1 or signal/noise negative
    """
    if f < 1:
        raise DatasetError("feature width must be >= 1")
    if signal < 0 or noise < 0:
        raise DatasetError("signal and noise must be >= 0")
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    num_classes = int(labels.max()) + 1 if n and labels.max() >= 0 else 1

    columns = np.arange(f)
    pattern = np.zeros((num_classes, f))
    for c in range(num_classes):
        if f >= num_classes:
            pattern[c, columns % num_classes == c] = 1.0
        else:
            pattern[c, c % f] = 1.0

    features = np.zeros((n, f))
    labeled = labels >= 0
    features[labeled] = signal * pattern[labels[labeled]]
    if noise:
        features += noise * make_rng(seed).standard_normal((n, f))
    return features


def write_matrix(M, sink: BinaryIO) -> None:
    """
    Write matrix in SCE1 format to binary stream.

    :param M: two dimensional matrix
    :param sink: writable binary stream
    """
    M = check_matrix(M, name="matrix")
    sink.write(MAGIC)
    sink.write(_HEADER.pack(M.shape[0], M.shape[1]))
    sink.write(M.astype("<f8", copy=False).tobytes(order="C"))


def read_matrix(source: BinaryIO) -> np.ndarray:
    """
    Read SCE1 matrix from binary stream.

    :rtype: numpy.ndarray
    :raises: MatrixFormatError on bad magic, truncation or dimension overflow,
        or NaN and infinite values
    """
    magic = source.read(len(MAGIC))
    if magic != MAGIC:
        raise MatrixFormatError("bad magic {!r}, expected {!r}".format(magic, MAGIC))
    header = source.read(_HEADER.size)
    if len(header) != _HEADER.size:
        raise MatrixFormatError("truncated header")
    rows, cols = _HEADER.unpack(header)
    if rows and cols > _MAX_BYTES // (_VALUE_SIZE * rows):
        raise MatrixFormatError("dimensions {} x {} overflow".format(rows, cols))
    expected = rows * cols * _VALUE_SIZE
    payload = source.read(expected)
    if len(payload) != expected:
        raise MatrixFormatError(
            "truncated data: {} of {} bytes".format(len(payload), expected)
        )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise MatrixFormatError("data holds NaN or infinite values")
    return values.reshape(rows, cols)


def save_matrix(M, path: PathLike) -> None:
    """Write SCE1 file under a lock file."""
    with filelock.FileLock(str(path) + ".lock"):
        with open(path, "wb") as sink:
            write_matrix(M, sink)


def load_matrix(path: PathLike) -> np.ndarray:
    """Read SCE1 file under a lock file."""
    with filelock.FileLock(str(path) + ".lock"):
        with open(path, "rb") as source:
            return read_matrix(source)


def read_text_matrix(path: PathLike) -> np.ndarray:
    """
    Plain text matrix: one row per line, comma or whitespace separated.

    :raises: DatasetError on ragged rows or non-numeric values
    """
    rows = []
    with open(path, "r", encoding="utf-8") as source:
        for line_number, line in enumerate(source, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(tok) for tok in _FIELD_SPLIT_RE.split(line) if tok])
            except ValueError:
                raise DatasetError("{}:{}: non-numeric value".format(path, line_number))
            if len(rows[-1]) != len(rows[0]):
                raise DatasetError(
                    "{}:{}: expected {} values, got {}".format(
                        path, line_number, len(rows[0]), len(rows[-1])
                    )
                )
    if not rows:
        return np.zeros((0, 0))
    return check_matrix(rows, name=str(path))


def read_features(path: PathLike) -> np.ndarray:
    """Features in SCE1 binary form or as plain text, detected by magic."""
    with open(path, "rb") as source:
        binary = source.read(len(MAGIC)) == MAGIC
    if binary:
        return load_matrix(path)
    return read_text_matrix(path)


def read_labels(path: PathLike) -> np.ndarray:
    """One integer class id per line, -1 for unlabeled nodes."""
    labels = []
    with open(path, "r", encoding="utf-8") as source:
        for line_number, line in enumerate(source, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise DatasetError(
                    "{}:{}: invalid label '{}'".format(path, line_number, line)
                )
    return np.asarray(labels, dtype=np.int64)


def load_dataset(
    graph_path: PathLike,
    features_path: PathLike,
    labels_path: Optional[PathLike] = None,
    name: Optional[str] = None,
) -> Dataset:
    """
    Assemble dataset from edge list, feature file and optional label file.

    :rtype: Dataset
    :raises: DatasetError naming the files when node counts disagree
    """
    with open(graph_path, "r", encoding="utf-8") as stream:
        graph = load_edge_list(stream)
    features = read_features(features_path)
    if features.shape[0] != graph.n:
        raise DatasetError(
            "{} has {} rows but {} defines {} nodes".format(
                features_path, features.shape[0], graph_path, graph.n
            )
        )
    labels = None
    if labels_path is not None:
        labels = read_labels(labels_path)
        if labels.shape[0] != graph.n:
            raise DatasetError(
                "{} has {} labels but {} defines {} nodes".format(
                    labels_path, labels.shape[0], graph_path, graph.n
                )
            )
    if name is None:
        name = os.path.splitext(os.path.basename(str(graph_path)))[0]
    logger.info("Loaded dataset '%s': n=%d, m=%d.", name, graph.n, graph.m)
    return Dataset(graph, features, labels, name)


def write_edge_list(graph: Graph, path: PathLike) -> None:
    """Write graph as edge list with a `# nodes=N` header."""
    u, v = graph.edges()
    with filelock.FileLock(str(path) + ".lock"):
        with open(path, "w", encoding="utf-8") as sink:
            sink.write("# nodes={}\n".format(graph.n))
            for first, second in zip(u.tolist(), v.tolist()):
                sink.write("{} {}\n".format(first, second))


def write_labels(labels, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        for label in np.asarray(labels).tolist():
            sink.write("{}\n".format(label))
