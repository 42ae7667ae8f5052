#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cachefile.py - classes handling cached smoothed feature levels

Smoothed features depend only on the graph, the features and the depth k,
so they are computed once and stored in SCE1 files keyed by a digest of
those inputs.

.. Licence MIT
"""

import hashlib
import logging
import os
import tempfile
from typing import List, Optional

import filelock
import numpy as np
from platformdirs import user_cache_dir

from sceembed.data import MatrixFormatError, read_matrix, write_matrix
from sceembed.graph_core import Graph


class CacheFileError(Exception):
    """Raised when some error occurred regarding cached smoothing levels."""

    pass


class SmoothedFeatureCache:
    """Class for working with smoothing levels cached in files."""

    # name used in appdir
    _SCEEMBED_NAME = "sceembed"
    _CACHE_SUFFIX = ".sce"

    def __init__(self, cache_dir: Optional[str] = None, use_cache: bool = True):
        """
        :param str cache_dir: base path for cached levels, defaults to user
            cache directory
        :param bool use_cache: False disables reading and writing the cache
        :raises: CacheFileError when given cache directory is not writable
        """

        self._logger = logging.getLogger(self._SCEEMBED_NAME)

        self._user_defined_cache_dir = cache_dir
        self._use_cache = use_cache
        self._cache_dir: Optional[str] = None
        if use_cache:
            self._cache_dir = self._get_cache_dir()

    @property
    def cache_dir(self) -> Optional[str]:
        """
        Directory holding cached levels, None when caching is disabled

        :rtype: str|None
        """
        return self._cache_dir

    def _get_writable_cache_dir(self) -> str:
        """
        Get writable cache directory with fallback to global temp directory

        :raises: CacheFileError when no cache directory is writable for user
        :return: path to cache directory
        :rtype: str
        """
        dir_path_user = user_cache_dir(self._SCEEMBED_NAME)
        if not os.path.exists(dir_path_user):
            try:
                os.makedirs(dir_path_user, exist_ok=True)
            except PermissionError:
                # continue with the temp directory fallback
                pass

        if os.access(dir_path_user, os.W_OK):
            return dir_path_user

        dir_path_temp = os.path.join(tempfile.gettempdir(), self._SCEEMBED_NAME)
        os.makedirs(dir_path_temp, exist_ok=True)
        if os.access(dir_path_temp, os.W_OK):
            self._logger.info("Using temp directory for cache: %s", dir_path_temp)
            return dir_path_temp

        raise CacheFileError("Cache directories are not writable.")

    def _get_cache_dir(self) -> str:
        """
        Get cache directory, user defined one has to be writable

        :raises: CacheFileError when cache directory is not writable for user
        :return: path to cache directory
        :rtype: str
        """
        if self._user_defined_cache_dir is None:
            return self._get_writable_cache_dir()

        if not os.access(self._user_defined_cache_dir, os.W_OK):
            raise CacheFileError(
                "Cache directory {} is not writable.".format(
                    self._user_defined_cache_dir
                )
            )
        return self._user_defined_cache_dir

    @staticmethod
    def cache_key(graph: Graph, features: np.ndarray, k: int) -> str:
        """
        Digest identifying smoothing levels of given inputs.

        :rtype: str
        """
        digest = hashlib.sha256()
        digest.update("n={};k={};shape={}".format(graph.n, k, features.shape).encode())
        digest.update(graph.indptr.tobytes())
        digest.update(graph.indices.tobytes())
        digest.update(np.ascontiguousarray(features, dtype="<f8").tobytes())
        return digest.hexdigest()

    def _get_cache_file_path(self, key: str, level: int) -> str:
        assert self._cache_dir is not None
        return os.path.join(
            self._cache_dir, "{}-L{}{}".format(key, level, self._CACHE_SUFFIX)
        )

    def _get_cache_lock_file_path(self, key: str) -> str:
        """
        Get path for lock guarding all levels of one key

        :return: Full path to cache file lock
        :rtype: str
        """
        assert self._cache_dir is not None
        return os.path.join(self._cache_dir, key + ".lock")

    def _load_cached_levels(self, key: str, k: int) -> Optional[List[np.ndarray]]:
        """
        Loads levels 1..k of given key.

        :return: list of matrices or None when some level is missing/corrupt
        :rtype: list|None
        """
        if not self._use_cache:
            return None

        paths = [self._get_cache_file_path(key, level) for level in range(1, k + 1)]
        with filelock.FileLock(self._get_cache_lock_file_path(key)):
            if not all(os.access(path, os.R_OK) for path in paths):
                return None
            levels = []
            for path in paths:
                try:
                    with open(path, "rb") as f_cache:
                        levels.append(read_matrix(f_cache))
                except (OSError, MatrixFormatError) as e:
                    self._logger.warning(
                        "Ignoring corrupted cache file %s (%s).", path, e
                    )
                    return None

        self._logger.info("Loaded %d smoothing level(s) from cache.", k)
        return levels

    def _store_levels(self, key: str, levels: List[np.ndarray]) -> bool:
        """
        Write levels to cache files.

        :return: True if all levels were written, False in case of an error
        :rtype: bool
        """
        if not self._use_cache:
            return False

        try:
            with filelock.FileLock(self._get_cache_lock_file_path(key)):
                for level, matrix in enumerate(levels, start=1):
                    with open(self._get_cache_file_path(key, level), "wb") as f_cache:
                        write_matrix(matrix, f_cache)
        except OSError as e:
            self._logger.warning("Can not write smoothing cache: %s", e)
            return False

        return True

    def clear_cache(self) -> int:
        """
        Remove every cached level file.

        :return: number of removed files
        :rtype: int
        """
        if self._cache_dir is None:
            return 0
        removed = 0
        for name in os.listdir(self._cache_dir):
            if name.endswith(self._CACHE_SUFFIX) or name.endswith(".lock"):
                os.remove(os.path.join(self._cache_dir, name))
                removed += name.endswith(self._CACHE_SUFFIX)
        return removed
