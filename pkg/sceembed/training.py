#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
training.py - negative sampling, losses, analytic gradients, Adam and the
full-batch / mini-batch training loops

The unsupervised loss is the inverse of the summed squared distances of the
negative pairs; total loss adds beta times the squared norm of all weights.
Smoothing happens once before training, gradients flow through the linear
stacks only.

.. Licence MIT
"""
import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from sceembed.config import Aggregator, ConfigError, TrainConfig
from sceembed.cut_oracle import full_pair_distance_sum
from sceembed.graph_core import DimensionError, Graph, check_matrix
from sceembed.model import ModelParams, aggregate, forward_layers, init_params
from sceembed.rngs import SeedLike, make_rng, spawn_seeds
from sceembed.smoothing import SmoothingOperator

logger = logging.getLogger("sceembed")

# pair-distance sums below this are treated as collapsed embeddings
DEGENERATE_THRESHOLD = 1e-12

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

Gradients = List[List[np.ndarray]]
EpochCallback = Callable[[int, ModelParams, float], None]


class DegenerateEmbeddingError(ArithmeticError):
    """
    Raised when all sampled pairs have (almost) identical embeddings.

    Attributes:
        message -- explanation of the error
        epoch -- training epoch where it happened, None outside training
    """

    def __init__(self, message: str, epoch: Optional[int] = None):
        if epoch is not None:
            message = "epoch {}: {}".format(epoch, message)
        super().__init__(message)
        self.message = message
        self.epoch = epoch


class LossKind(str, enum.Enum):
    """Unsupervised objective: inverse distance sum or its negative."""

    SCE = "sce"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class NegativePairSet:
    """
    Sampled node pairs; they form the graph H = (V, N) whose Laplacian
    replaces the complete graph in the loss.
    """

    pairs: np.ndarray
    n: int

    def __post_init__(self):
        pairs = np.array(self.pairs, dtype=np.int64, copy=True).reshape(-1, 2)
        if pairs.size:
            if np.any(pairs[:, 0] == pairs[:, 1]):
                raise DimensionError("negative pairs must not be self-pairs")
            if pairs.min() < 0 or pairs.max() >= self.n:
                raise DimensionError("negative pair index out of range")
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    @classmethod
    def all_pairs(cls, n: int) -> "NegativePairSet":
        """Every unordered pair i < j once."""
        first, second = np.triu_indices(n, k=1)
        return cls(np.stack([first, second], axis=1), n)


def sample_negatives(n: int, per_node: int, seed: SeedLike = None) -> NegativePairSet:
    """
    Draw `per_node` partners for every node uniformly from the other nodes.

    Draws are with replacement; graph edges are not excluded.

    :param int n: number of nodes, n >= 2
    :param int per_node: partners per node
    :param seed: int seed or Generator
    :rtype: NegativePairSet
    :raises: ValueError when n < 2 or per_node < 1
    """
    if n < 2:
        raise ValueError("negative sampling needs at least two nodes, got {}".format(n))
    if per_node < 1:
        raise ValueError("per_node must be >= 1, got {}".format(per_node))
    rng = make_rng(seed)
    sources = np.repeat(np.arange(n, dtype=np.int64), per_node)
    # uniform over V minus {i}: draw from n - 1 slots and skip i
    partners = rng.integers(0, n - 1, size=sources.shape[0], dtype=np.int64)
    partners += partners >= sources
    return NegativePairSet(np.stack([sources, partners], axis=1), n)


def pair_distance_sum(Z, neg: NegativePairSet) -> float:
    """Sum of ||z_i - z_j||^2 over the negative pairs."""
    Z = np.asarray(Z, dtype=np.float64)
    if neg.n > Z.shape[0]:
        raise DimensionError(
            "pairs index {} nodes, embedding has {} rows".format(neg.n, Z.shape[0])
        )
    diff = Z[neg.pairs[:, 0]] - Z[neg.pairs[:, 1]]
    return float(np.einsum("ij,ij->", diff, diff))


def sce_loss(Z, neg: NegativePairSet) -> float:
    """
    Inverse pair-distance loss 1 / sum ||z_i - z_j||^2.

    :raises: DegenerateEmbeddingError when the sum is below 1e-12
    """
    total = pair_distance_sum(Z, neg)
    if total < DEGENERATE_THRESHOLD:
        raise DegenerateEmbeddingError(
            "negative pairs collapsed (distance sum {:.3e})".format(total)
        )
    return 1.0 / total


def negative_distance_loss(Z, neg: NegativePairSet) -> float:
    """Ablation loss: minus the summed squared pair distances."""
    return -pair_distance_sum(Z, neg)


def full_sce_loss(Z) -> float:
    """
    Exact all-pairs loss 1 / sum over all i < j of ||z_i - z_j||^2.

    :raises: DegenerateEmbeddingError when all rows coincide
    """
    total = full_pair_distance_sum(Z)
    if total < DEGENERATE_THRESHOLD:
        raise DegenerateEmbeddingError("all embeddings coincide")
    return 1.0 / total


def l2_penalty(params: ModelParams) -> float:
    """Squared norm of every weight entry."""
    return float(sum(np.einsum("ij,ij->", W, W) for W in params.weights()))


def unsup_loss(
    Z, neg: NegativePairSet, loss: Union[LossKind, str] = LossKind.SCE
) -> float:
    if LossKind(loss) is LossKind.SCE:
        return sce_loss(Z, neg)
    return negative_distance_loss(Z, neg)


def total_loss(
    Z,
    neg: NegativePairSet,
    params: ModelParams,
    alpha: float,
    beta: float,
    loss: Union[LossKind, str] = LossKind.SCE,
) -> float:
    """
    alpha * unsupervised loss + beta * ||theta||^2.

    :raises: DegenerateEmbeddingError for collapsed embeddings (sce loss)
    """
    return alpha * unsup_loss(Z, neg, loss) + beta * l2_penalty(params)


def _split_gradient(dZ: np.ndarray, Z_list: List[np.ndarray], mode: Aggregator):
    """Route the gradient of the aggregate back to every scale."""
    if len(Z_list) == 1:
        return [dZ]
    if mode in (Aggregator.CONCAT, Aggregator.NONE):
        bounds = np.cumsum([Z.shape[1] for Z in Z_list])[:-1]
        return np.split(dZ, bounds, axis=1)
    if mode is Aggregator.MEAN:
        return [dZ / len(Z_list) for _ in Z_list]
    # max: the first scale holding the maximum wins ties
    winners = np.argmax(np.stack(Z_list), axis=0)
    return [np.where(winners == scale, dZ, 0.0) for scale in range(len(Z_list))]


def loss_and_gradient(
    levels: Sequence[np.ndarray],
    params: ModelParams,
    neg: NegativePairSet,
    alpha: float,
    beta: float,
    aggregator: Union[Aggregator, str] = Aggregator.NONE,
    loss: Union[LossKind, str] = LossKind.SCE,
) -> Tuple[float, Gradients]:
    """
    Total loss and its exact gradient w.r.t. every weight matrix.

    :param levels: smoothed features, one matrix per scale
    :param ModelParams params: weights, one stack per scale
    :param NegativePairSet neg: pairs indexing rows of `levels`
    :return: (total loss, gradients shaped like params.scales)
    :rtype: tuple
    :raises: DegenerateEmbeddingError for collapsed embeddings (sce loss)
    """
    aggregator = Aggregator(aggregator)
    loss = LossKind(loss)
    if len(levels) != params.num_scales:
        raise DimensionError(
            "{} smoothing levels for {} weight stacks".format(
                len(levels), params.num_scales
            )
        )

    activations = [forward_layers(F, stack) for F, stack in zip(levels, params.scales)]
    Z_list = [layers[-1] for layers in activations]
    Z = aggregate(Z_list, aggregator)

    first, second = neg.pairs[:, 0], neg.pairs[:, 1]
    diff = Z[first] - Z[second]
    distance_sum = float(np.einsum("ij,ij->", diff, diff))
    grad_sum = np.zeros_like(Z)
    np.add.at(grad_sum, first, 2.0 * diff)
    np.add.at(grad_sum, second, -2.0 * diff)

    if loss is LossKind.SCE:
        if distance_sum < DEGENERATE_THRESHOLD:
            raise DegenerateEmbeddingError(
                "negative pairs collapsed (distance sum {:.3e})".format(distance_sum)
            )
        unsup = 1.0 / distance_sum
        dZ = (-alpha / distance_sum ** 2) * grad_sum
    else:
        unsup = -distance_sum
        dZ = -alpha * grad_sum

    grads: Gradients = []
    for stack, layers, dX in zip(
        params.scales, activations, _split_gradient(dZ, Z_list, aggregator)
    ):
        stack_grads: List[np.ndarray] = [np.empty(0)] * len(stack)
        for depth in reversed(range(len(stack))):
            stack_grads[depth] = layers[depth].T @ dX + (2.0 * beta) * stack[depth]
            if depth:
                dX = dX @ stack[depth].T
        grads.append(stack_grads)

    return alpha * unsup + beta * l2_penalty(params), grads


def loss_gradient(
    levels: Sequence[np.ndarray],
    params: ModelParams,
    neg: NegativePairSet,
    alpha: float,
    beta: float,
    aggregator: Union[Aggregator, str] = Aggregator.NONE,
    loss: Union[LossKind, str] = LossKind.SCE,
) -> Gradients:
    """Gradient part of :func:`loss_and_gradient`."""
    return loss_and_gradient(levels, params, neg, alpha, beta, aggregator, loss)[1]


@dataclass
class AdamState:
    """First and second moments mirroring ModelParams, plus step counter."""

    m: Gradients
    v: Gradients
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls(
            m=[[np.zeros_like(W) for W in stack] for stack in params.scales],
            v=[[np.zeros_like(W) for W in stack] for stack in params.scales],
        )


def adam_step(
    params: ModelParams, grads: Gradients, state: AdamState, lr: float
) -> Tuple[ModelParams, AdamState]:
    """
    One Adam update; inputs are left untouched.

    :return: (updated params, updated state)
    :rtype: tuple
    :raises: DimensionError when shapes disagree
    """
    if len(grads) != params.num_scales or len(state.m) != params.num_scales:
        raise DimensionError("gradient and parameter scales differ")

    t = state.t + 1
    correction1 = 1.0 - ADAM_BETA1 ** t
    correction2 = 1.0 - ADAM_BETA2 ** t
    new_scales, new_m, new_v = [], [], []
    for stack, g_stack, m_stack, v_stack in zip(params.scales, grads, state.m, state.v):
        if not len(stack) == len(g_stack) == len(m_stack) == len(v_stack):
            raise DimensionError("gradient and parameter depths differ")
        scale_w, scale_m, scale_v = [], [], []
        for W, g, m, v in zip(stack, g_stack, m_stack, v_stack):
            if not W.shape == g.shape == m.shape == v.shape:
                raise DimensionError(
                    "gradient of shape {} for weight of shape {}".format(
                        g.shape, W.shape
                    )
                )
            m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
            v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g
            m_hat = m / correction1
            v_hat = v / correction2
            scale_w.append(W - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS))
            scale_m.append(m)
            scale_v.append(v)
        new_scales.append(scale_w)
        new_m.append(scale_m)
        new_v.append(scale_v)
    return ModelParams(new_scales), AdamState(new_m, new_v, t)


@dataclass
class TrainResult:
    """Outcome of one training run."""

    params: ModelParams
    loss_history: List[float]
    initial_loss: float
    train_seconds: float
    negatives: Optional[NegativePairSet] = None
    config: Optional[TrainConfig] = field(default=None, repr=False)


def smoothed_levels(graph: Graph, F, config: TrainConfig) -> List[np.ndarray]:
    """
    Features every weight stack reads: [F^(1), ..., F^(k)] for MoSCE,
    [F^(k)] otherwise.
    """
    operator = SmoothingOperator(graph, config.k)
    if config.multiscale:
        return operator.smooth_all_scales(F)
    return [operator.smooth(F)]


def initial_params(config: TrainConfig, feature_dim: int) -> ModelParams:
    """Parameters a run with `config` starts from."""
    num_scales = config.k if config.multiscale else 1
    chain = (feature_dim,) + tuple(config.dims)
    return init_params([chain] * num_scales, spawn_seeds(config.seed, 3)[0])


def _check_inputs(graph: Graph, F, config: TrainConfig, levels):
    config.validate(graph.n)
    if graph.n < 2:
        raise ConfigError("training needs at least two nodes")
    F = check_matrix(F, rows=graph.n, name="features")
    if levels is None:
        levels = smoothed_levels(graph, F, config)
    levels = [
        check_matrix(level, rows=graph.n, name="smoothed features") for level in levels
    ]
    return F, levels


def train(
    graph: Graph,
    F,
    config: TrainConfig,
    loss: Union[LossKind, str] = LossKind.SCE,
    callback: Optional[EpochCallback] = None,
    levels: Optional[Sequence[np.ndarray]] = None,
) -> TrainResult:
    """
    Full-batch training: smooth once, sample negatives once, then run
    `config.epochs` Adam steps. A config with batch_size > 0 is handed to
    :func:`train_minibatch`.

    :param Graph graph: graph
    :param F: n x f features
    :param TrainConfig config: hyper-parameters
    :param loss: "sce" or "negative"
    :param callback: called as callback(epoch, params, loss) after every epoch
    :param levels: precomputed smoothing levels (skips smoothing)
    :rtype: TrainResult
    :raises: DegenerateEmbeddingError naming the epoch, ConfigError
    """
    if config.batch_size > 0:
        return train_minibatch(graph, F, config, loss, callback, levels)

    F, levels = _check_inputs(graph, F, config, levels)
    _init_seed, neg_seed, _batch_seed = spawn_seeds(config.seed, 3)
    params = initial_params(config, F.shape[1])
    state = AdamState.zeros_like(params)
    negatives = sample_negatives(graph.n, config.neg_per_node, neg_seed)

    logger.info(
        "Training %d epoch(s) full-batch on n=%d with %d negative pairs.",
        config.epochs,
        graph.n,
        len(negatives),
    )
    started = time.perf_counter()

    def evaluate(epoch):
        try:
            return loss_and_gradient(
                levels,
                params,
                negatives,
                config.alpha,
                config.beta,
                config.aggregator,
                loss,
            )
        except DegenerateEmbeddingError as e:
            raise DegenerateEmbeddingError(e.message, epoch)

    current, grads = evaluate(0)
    initial = current
    history: List[float] = []
    for epoch in range(1, config.epochs + 1):
        params, state = adam_step(params, grads, state, config.lr)
        current, grads = evaluate(epoch)
        history.append(current)
        logger.debug("epoch %d loss %.6e", epoch, current)
        if callback is not None:
            callback(epoch, params, current)

    elapsed = time.perf_counter() - started
    logger.info("Training finished in %.3f s.", elapsed)
    return TrainResult(params, history, initial, elapsed, negatives, config)


def train_minibatch(
    graph: Graph,
    F,
    config: TrainConfig,
    loss: Union[LossKind, str] = LossKind.SCE,
    callback: Optional[EpochCallback] = None,
    levels: Optional[Sequence[np.ndarray]] = None,
) -> TrainResult:
    """
    Mini-batch training.

    An epoch runs ceil(n / b) steps. Every step samples b distinct rows of
    the smoothed features, draws `neg_per_node` partners inside the batch
    for every sampled row, and updates on that batch only. The recorded
    epoch loss is the total loss of the last batch after its update.

    :raises: ConfigError when b < 2, DegenerateEmbeddingError naming the epoch
    """
    F, levels = _check_inputs(graph, F, config, levels)
    batch = config.batch_size
    if batch < 2:
        raise ConfigError(
            "mini-batch training needs batch_size >= 2, got {}".format(batch)
        )

    _init_seed, _neg_seed, batch_seed = spawn_seeds(config.seed, 3)
    rng = make_rng(batch_seed)
    params = initial_params(config, F.shape[1])
    state = AdamState.zeros_like(params)
    steps = math.ceil(graph.n / batch)

    logger.info(
        "Training %d epoch(s) of %d step(s) with batch size %d.",
        config.epochs,
        steps,
        batch,
    )
    started = time.perf_counter()

    initial = math.nan
    history: List[float] = []
    for epoch in range(1, config.epochs + 1):
        try:
            for _ in range(steps):
                rows = np.sort(rng.choice(graph.n, size=batch, replace=False))
                batch_levels = [level[rows] for level in levels]
                negatives = sample_negatives(batch, config.neg_per_node, rng)
                current, grads = loss_and_gradient(
                    batch_levels,
                    params,
                    negatives,
                    config.alpha,
                    config.beta,
                    config.aggregator,
                    loss,
                )
                if math.isnan(initial):
                    initial = current
                params, state = adam_step(params, grads, state, config.lr)
            current, _ = loss_and_gradient(
                batch_levels,
                params,
                negatives,
                config.alpha,
                config.beta,
                config.aggregator,
                loss,
            )
        except DegenerateEmbeddingError as e:
            raise DegenerateEmbeddingError(e.message, epoch)
        history.append(current)
        logger.debug("epoch %d batch loss %.6e", epoch, current)
        if callback is not None:
            callback(epoch, params, current)

    elapsed = time.perf_counter() - started
    logger.info("Training finished in %.3f s.", elapsed)
    return TrainResult(params, history, initial, elapsed, None, config)
