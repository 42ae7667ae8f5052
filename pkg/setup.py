#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
setup for sceembed

.. Licence MIT
"""

from os.path import join, dirname
from setuptools import setup, find_packages

script_dirname = join(dirname(__file__))

# version of sceembed
# (do not forget to change it in sce_core.py as well)
__version__ = "0.3.0"


def read(readme):
    return open(join(script_dirname, readme), "rb").read().decode("utf-8")


setup(
    name="sceembed",
    version=__version__,
    entry_points={"console_scripts": ["sceembed = sceembed:_sce_cli"]},
    packages=find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"]),
    include_package_data=True,
    keywords=["graph", "embedding", "node", "sparsest", "cut", "unsupervised"],
    license="MIT",
    description="Unsupervised node embeddings trained by a sparsest cut surrogate.",
    long_description=read("README.rst"),
    long_description_content_type="text/x-rst",
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Software Development :: Libraries :: Python Modules",
    ],
    install_requires=["numpy", "scipy", "platformdirs", "filelock"],
)
