#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
sce_core.py - file with definition of SCE class, the high level estimator

.. Licence MIT
"""
from typing import List, Optional, Union

import numpy as np

from sceembed.cachefile import SmoothedFeatureCache
from sceembed.config import TrainConfig
from sceembed.graph_core import Graph, check_matrix
from sceembed.model import ModelParams, embed
from sceembed.smoothing import SmoothingOperator
from sceembed.training import EpochCallback, LossKind, TrainResult, train

# version of sceembed (do not forget to change it in setup.py as well)
__version__ = "0.3.0"


class SCE(SmoothedFeatureCache):
    """
    Class for learning node embeddings from negative samples only.

    Features are smoothed once by (D~^-1 A~)^k, a linear network is trained
    on the smoothed features, and the embeddings are the network outputs
    (aggregated over levels 1..k for the multi-scale variant).

    **Examples:**

    .. code-block:: python

        from sceembed import SCE, TrainConfig, gen_sbm, gen_features

        graph, labels = gen_sbm((200, 200), 0.05, 0.005, seed=1)
        features = gen_features(labels, 32, signal=0.0, noise=1.0, seed=2)

        sce = SCE(TrainConfig(k=2, dims=(32, 16), epochs=50))
        embeddings = sce.fit_transform(graph, features)

        # the fitted weights can embed any graph with the same feature width
        other = sce.embed(graph, features)
    """

    def __init__(
        self,
        config: Optional[TrainConfig] = None,
        use_cache: bool = False,
        **kwargs,  # noqa E999
    ):
        """
        Initialize function for SCE class.

        :param TrainConfig config: hyper-parameters, defaults to TrainConfig()
        :param bool use_cache: True stores smoothed features on disk and
            reuses them for identical inputs.
            Disabled by default
        :param str cache_dir: base path for the cache (keyword argument)
        """
        super(SCE, self).__init__(use_cache=use_cache, **kwargs)

        self._config = (config or TrainConfig()).validate()
        self._result: Optional[TrainResult] = None

    @property
    def config(self) -> TrainConfig:
        """
        Hyper-parameters used by fit

        :rtype: TrainConfig
        """
        return self._config

    @property
    def result(self) -> Optional[TrainResult]:
        """
        Outcome of the last fit, None before fitting

        :rtype: TrainResult|None
        """
        return self._result

    @property
    def params(self) -> ModelParams:
        """
        Fitted weights

        :raises: RuntimeError when called before fit
        :rtype: ModelParams
        """
        if self._result is None:
            raise RuntimeError("SCE is not fitted yet, call fit() first.")
        return self._result.params

    def smooth_features(self, graph: Graph, features) -> List[np.ndarray]:
        """
        Smoothing levels the weight stacks read, taken from the cache when
        possible.

        :param Graph graph: graph
        :param features: n x f features
        :return: [F^(1), ..., F^(k)] for MoSCE, [F^(k)] otherwise
        :rtype: list
        """
        features = check_matrix(features, rows=graph.n, name="features")
        k = self._config.k
        operator = SmoothingOperator(graph, k)
        if k == 0:
            return [operator.smooth(features)]

        key = self.cache_key(graph, features, k)
        levels = self._load_cached_levels(key, k)
        if levels is None:
            levels = operator.smooth_all_scales(features)
            self._store_levels(key, levels)

        if self._config.multiscale:
            return levels
        return [levels[-1]]

    def fit(
        self,
        graph: Graph,
        features,
        loss: Union[LossKind, str] = LossKind.SCE,
        callback: Optional[EpochCallback] = None,
    ) -> TrainResult:
        """
        Train the encoder; full-batch or mini-batch by config.batch_size.

        :param Graph graph: graph
        :param features: n x f features
        :param loss: "sce" or the "negative" ablation loss
        :param callback: called as callback(epoch, params, loss)
        :rtype: TrainResult
        """
        levels = self.smooth_features(graph, features)
        self._result = train(
            graph, features, self._config, loss=loss, callback=callback, levels=levels
        )
        return self._result

    def embed(self, graph: Graph, features, params: Optional[ModelParams] = None):
        """
        Embeddings of every node of `graph` under fitted (or given) weights.

        :rtype: numpy.ndarray
        """
        params = params if params is not None else self.params
        return embed(
            self.smooth_features(graph, features), params, self._config.aggregator
        )

    def fit_transform(self, graph: Graph, features, loss=LossKind.SCE) -> np.ndarray:
        """Fit and return embeddings of all nodes."""
        self.fit(graph, features, loss=loss)
        return self.embed(graph, features)

    @staticmethod
    def get_version() -> str:
        """
        Returns version number.

        :return: version number
        :rtype: str
        """

        return __version__
