#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
config.py - training configuration, key = value config files and presets

.. Licence MIT
"""
import dataclasses
import enum
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Optional, TextIO, Tuple


class ConfigError(ValueError):
    """
    Raised when configuration is invalid.

    Attributes:
        message -- explanation of the error
        line_number -- line of config file where the error occurred, if any
    """

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = "line {}: {}".format(line_number, message)
        super().__init__(message)
        self.message = message
        self.line_number = line_number


class Aggregator(str, enum.Enum):
    """
    How embeddings of several smoothing levels are combined.

    NONE trains plain SCE on level k only; the others train MoSCE on
    levels 1..k.
    """

    NONE = "none"
    CONCAT = "concat"
    MEAN = "mean"
    MAX = "max"


def parse_dims(value) -> Tuple[int, ...]:
    """
    Parse comma separated layer widths ("64,32") or an int sequence.

    >>> parse_dims("64,32")
    (64, 32)
    >>> parse_dims([16])
    (16,)

    :raises: ConfigError on empty list or non-integer item
    """
    if isinstance(value, str):
        items = [item.strip() for item in value.split(",") if item.strip()]
    else:
        items = list(value)
    try:
        dims = tuple(int(item) for item in items)
    except (TypeError, ValueError):
        raise ConfigError("dims must be a comma separated list of integers")
    if not dims:
        raise ConfigError("dims must name at least one layer")
    return dims


@dataclass(frozen=True)
class TrainConfig:
    """
    Hyper-parameters of one training run.

    `dims` holds the output width of each linear layer; the input width is
    the feature dimension. `batch_size` 0 selects full-batch training.
    """

    k: int = 2
    dims: Tuple[int, ...] = (512,)
    lr: float = 0.001
    alpha: float = 15000.0
    beta: float = 5e-4
    epochs: int = 20
    neg_per_node: int = 5
    batch_size: int = 0
    aggregator: Aggregator = Aggregator.NONE
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", parse_dims(self.dims))
        try:
            object.__setattr__(self, "aggregator", Aggregator(self.aggregator))
        except ValueError:
            raise ConfigError("unknown aggregator '{}'".format(self.aggregator))

    @property
    def multiscale(self) -> bool:
        """True when embeddings of levels 1..k are aggregated (MoSCE)."""
        return self.aggregator is not Aggregator.NONE

    def validate(self, n: Optional[int] = None) -> "TrainConfig":
        """
        Check invariants; with `n` also the batch size bound.

        :param int n: node count of the graph to train on
        :return: self
        :raises: ConfigError on first violated invariant
        """
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.multiscale and self.k < 1:
            raise ConfigError(
                "aggregator '{}' needs k >= 1".format(self.aggregator.value)
            )
        if any(dim <= 0 for dim in self.dims):
            raise ConfigError("layer widths must be positive, got {}".format(self.dims))
        if not self.lr > 0:
            raise ConfigError("lr must be > 0")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be >= 0")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.neg_per_node < 1:
            raise ConfigError("neg_per_node must be >= 1")
        if self.batch_size < 0 or (n is not None and self.batch_size > n):
            raise ConfigError(
                "batch_size must be within [0, n], got {}".format(self.batch_size)
            )
        return self

    def replace(self, **changes) -> "TrainConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> Dict[str, Any]:
        values = dataclasses.asdict(self)
        values["aggregator"] = self.aggregator.value
        return values

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "TrainConfig":
        """
        Build config from field name -> value mapping; strings are coerced.

        :raises: ConfigError on unknown key or unparsable value
        """
        fields = {field.name: field for field in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in values.items():
            if key not in fields:
                raise ConfigError("unknown config key '{}'".format(key))
            kwargs[key] = _coerce(key, value)
        return cls(**kwargs)


_INT_FIELDS = {"k", "epochs", "neg_per_node", "batch_size", "seed"}
_FLOAT_FIELDS = {"lr", "alpha", "beta"}


def _coerce(key: str, value):
    try:
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError("invalid value '{}' for {}".format(value, key))
    if key == "dims":
        return parse_dims(value)
    return value


def read_config_lines(lines: Iterable[str]) -> Dict[str, str]:
    """
    Parse `key = value` lines. Blank lines and `#` comments are ignored.

    :return: raw key -> value strings
    :raises: ConfigError on malformed line, unknown or duplicated key
    """
    known = {field.name for field in dataclasses.fields(TrainConfig)}
    values: Dict[str, str] = {}
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(
                "expected 'key = value', got '{}'".format(line), line_number
            )
        if key not in known:
            raise ConfigError("unknown config key '{}'".format(key), line_number)
        if key in values:
            raise ConfigError("duplicate config key '{}'".format(key), line_number)
        try:
            _coerce(key, value)
        except ConfigError as e:
            raise ConfigError(e.message, line_number)
        values[key] = value
    return values


def load_config_file(stream: TextIO) -> Dict[str, str]:
    """Read config file stream into raw key -> value strings."""
    return read_config_lines(stream)


# Hyper-parameters reported for the citation benchmarks. Embedding width is
# 512 except Pubmed (256); MoSCE uses 3 levels on Cora and Pubmed, 2 on
# Citeseer and Cora Full.
PRESETS: Dict[str, Dict[str, Any]] = {
    "cora": dict(lr=0.001, beta=5e-4, epochs=20, alpha=15000.0, dims=(512,)),
    "citeseer": dict(lr=0.0001, beta=1e-3, epochs=200, alpha=15000.0, dims=(512,)),
    "pubmed": dict(lr=0.02, beta=5e-4, epochs=50, alpha=50000.0, dims=(256,)),
    "cora_full": dict(lr=0.01, beta=5e-4, epochs=20, alpha=100000.0, dims=(512,)),
    "mosce-cora": dict(
        lr=0.001,
        beta=5e-4,
        epochs=20,
        alpha=15000.0,
        dims=(512,),
        k=3,
        aggregator="concat",
    ),
    "mosce-citeseer": dict(
        lr=0.0001,
        beta=1e-3,
        epochs=50,
        alpha=15000.0,
        dims=(512,),
        k=2,
        aggregator="concat",
    ),
    "mosce-pubmed": dict(
        lr=0.02,
        beta=0.0,
        epochs=100,
        alpha=50000.0,
        dims=(256,),
        k=3,
        aggregator="concat",
    ),
    "mosce-cora_full": dict(
        lr=0.01,
        beta=0.0,
        epochs=30,
        alpha=100000.0,
        dims=(512,),
        k=2,
        aggregator="concat",
    ),
}


def resolve_config(
    preset: Optional[str] = None,
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> TrainConfig:
    """
    Merge defaults < preset < config file < explicit overrides.

    :raises: ConfigError on unknown preset or invalid values
    """
    values: Dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                "unknown preset '{}', choose from {}".format(
                    preset, ", ".join(sorted(PRESETS))
                )
            )
        values.update(PRESETS[preset])
    values.update(file_values or {})
    explicit = {key: val for key, val in (overrides or {}).items() if val is not None}
    values.update(explicit)
    return TrainConfig.from_mapping(values)
