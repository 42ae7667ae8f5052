#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
rngs.py - seeded counter-based random generators shared by all modules

.. Licence MIT
"""
from typing import List, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """
    Returns Philox based generator for given seed.

    An existing generator is returned as it is, so callers can thread one
    stream through several sampling functions.

    :param seed: int seed, SeedSequence or Generator
    :return: random generator
    :rtype: numpy.random.Generator
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_seeds(seed: Union[int, np.random.SeedSequence, None], count: int) -> List[
    np.random.SeedSequence
]:
    """
    Derive `count` independent child seeds from one seed.

    :param seed: root seed
    :param int count: number of children
    :return: list of child seed sequences
    :rtype: list
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return seed.spawn(count)
