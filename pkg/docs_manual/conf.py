# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder of wlpcheck.

import os
import sys

# Make the package importable from the documentation directory.
cwd = os.getcwd()
project_root = os.path.dirname(cwd)
sys.path.insert(0, project_root)

import wlpcheck  # noqa: E402

# -- Project information -----------------------------------------------------

project = "wlpcheck"
copyright = "2020, wlpcheck developers"
author = "wlpcheck developers"

# The short X.Y version and the full version.
version = ".".join(wlpcheck.__version__.split(".")[:2])
release = wlpcheck.__version__

# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc"]
source_suffix = ".rst"
master_doc = "index"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "wlpcheck-doc"
