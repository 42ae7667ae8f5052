#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
This file contains pytests for TrainConfig, config files and presets

.. Licence MIT
"""
import io

import pytest

from sceembed import PRESETS, Aggregator, ConfigError, TrainConfig, resolve_config
from sceembed.config import load_config_file, parse_dims, read_config_lines


def test_defaults():
    config = TrainConfig()
    assert (config.k, config.dims, config.lr) == (2, (512,), 0.001)
    assert (config.alpha, config.beta, config.epochs) == (15000.0, 5e-4, 20)
    assert (config.neg_per_node, config.batch_size, config.seed) == (5, 0, 0)
    assert config.aggregator is Aggregator.NONE
    assert not config.multiscale
    assert config.validate() is config


@pytest.mark.parametrize(
    "value, expected",
    [
        ("64,32", (64, 32)),
        (" 16 ", (16,)),
        ([8, 4], (8, 4)),
    ],
)
def test_parse_dims(value, expected):
    """
    Testing layer widths from strings and sequences

    :param value: raw dims
    :param tuple expected: parsed widths
    """
    assert parse_dims(value) == expected


@pytest.mark.parametrize("value", ["", "a,b", ","])
def test_parse_dims_invalid(value):
    """
    Testing empty and non-integer dims are rejected

    :param str value: raw dims
    """
    with pytest.raises(ConfigError):
        parse_dims(value)


@pytest.mark.parametrize(
    "changes",
    [
        dict(k=-1),
        dict(k=0, aggregator="concat"),
        dict(dims=(4, 0)),
        dict(lr=0.0),
        dict(alpha=-1.0),
        dict(beta=-1e-3),
        dict(epochs=-1),
        dict(neg_per_node=0),
        dict(batch_size=-2),
    ],
)
def test_validate(changes):
    """
    Testing every invariant of the configuration

    :param dict changes: fields breaking one invariant
    """
    with pytest.raises(ConfigError):
        TrainConfig(**changes).validate()


def test_validate_batch_against_nodes():
    config = TrainConfig(batch_size=10)
    assert config.validate(10) is config
    with pytest.raises(ConfigError):
        config.validate(9)


def test_unknown_aggregator():
    with pytest.raises(ConfigError):
        TrainConfig(aggregator="sum")


def test_from_mapping_and_dict():
    config = TrainConfig.from_mapping(
        {"k": "3", "dims": "64,32", "lr": "0.01", "aggregator": "max"}
    )
    assert (config.k, config.dims, config.lr) == (3, (64, 32), 0.01)
    assert config.aggregator is Aggregator.MAX
    assert config.multiscale
    assert TrainConfig.from_mapping(config.as_dict()) == config
    assert config.replace(k=1).k == 1

    with pytest.raises(ConfigError):
        TrainConfig.from_mapping({"depth": 2})
    with pytest.raises(ConfigError):
        TrainConfig.from_mapping({"epochs": "many"})


def test_read_config_lines():
    text = "# run\nepochs = 5\n\ndims=64,32\naggregator = concat\n"
    assert load_config_file(io.StringIO(text)) == {
        "epochs": "5",
        "dims": "64,32",
        "aggregator": "concat",
    }


@pytest.mark.parametrize(
    "text, line_number",
    [
        ("epochs = 5\ndepth = 2\n", 2),
        ("epochs = 5\nepochs = 6\n", 2),
        ("# c\nepochs\n", 2),
        ("lr = fast\n", 1),
        ("k =\n", 1),
    ],
)
def test_read_config_lines_errors(text, line_number):
    """
    Testing unknown, duplicated and malformed keys report their line

    :param str text: config file content
    :param int line_number: line which has to be reported
    """
    with pytest.raises(ConfigError) as excinfo:
        read_config_lines(text.splitlines())
    assert excinfo.value.line_number == line_number


def test_resolve_config_precedence():
    """Testing defaults < preset < config file < explicit values"""
    config = resolve_config(
        "citeseer",
        {"epochs": "5", "alpha": "1000"},
        {"epochs": 9, "lr": None, "seed": 3},
    )
    assert config.epochs == 9
    assert config.alpha == 1000.0
    assert config.lr == PRESETS["citeseer"]["lr"]
    assert config.seed == 3
    assert config.k == 2


def test_resolve_config_defaults():
    assert resolve_config() == TrainConfig()


def test_resolve_config_unknown_preset():
    with pytest.raises(ConfigError) as excinfo:
        resolve_config("reddit")
    assert "cora" in str(excinfo.value)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_are_valid(name):
    """
    Testing every preset resolves to a valid configuration

    :param str name: preset name
    """
    config = resolve_config(name)
    assert config.validate() is config
    assert config.multiscale == name.startswith("mosce-")
