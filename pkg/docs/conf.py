# Sphinx configuration of the dhymlib documentation

import os
import shutil
import sys

from dhymlib import __version__

project = "dhymlib"
copyright = "2026, Aurélien Costes"
author = "Aurélien Costes"

sys.path.insert(0, os.path.abspath("../src/" + project))


def _copy_top_level_pages():
    # README and CHANGELOG live outside docs/
    for source, target in [("../README.md", "./readme_copy.md"), ("../CHANGELOG.md", "./changelog_copy.md")]:
        shutil.copy(source, target)


_copy_top_level_pages()

release = __version__
version = ".".join(__version__.split(".")[:2])

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "myst_parser",
]
napoleon_numpy_docstring = True
autodoc_member_order = "bysource"

templates_path = ["_templates"]
source_suffix = [".rst", ".md"]
master_doc = "index"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "sphinx_rtd_theme"
html_show_sourcelink = False
html_title = "dhymlib Documentation"
html_short_title = "dhymlib"
htmlhelp_basename = "dhymlibdoc"

latex_documents = [(master_doc, project + ".tex", project, author, "manual")]
man_pages = [(master_doc, project, project + " Documentation", [author], 1)]
