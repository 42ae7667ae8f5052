#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# sceembed documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
from datetime import datetime

# package is imported from the repository root
sys.path.insert(0, os.path.abspath(".."))

from sceembed import __version__  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "sceembed"
this_year = datetime.now().year
copyright = "{}, sceembed developers".format(this_year)
author = "sceembed developers"

version = __version__
release = __version__

exclude_patterns = ["_build"]
pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "sceembeddoc"

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "sceembed", "sceembed Documentation", [author], 1)]
