# Sphinx configuration for the voronoicur manual.
# Options: https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

# Import the package from the checkout rather than site-packages.
sys.path.insert(0, os.path.abspath(os.path.join("..", "..")))

import voronoicur

project = "voronoicur"
author = "voronoicur Developers"
copyright = f"2026, {author}"
release = voronoicur.__version__
version = ".".join(release.split(".")[:2])

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.napoleon",      # numpydoc sections
    "sphinx.ext.mathjax",       # bound formulas in docstrings
    "sphinx_design",
    "sphinx_copybutton",
]

templates_path = ["templates"]
exclude_patterns = ["_build"]

autosummary_generate = True
autodoc_member_order = "groupwise"
add_module_names = False
napoleon_use_rtype = False
toc_object_entries_show_parents = "hide"

# Console prompts are not copied with the command.
copybutton_prompt_text = "$ "

html_theme = "pydata_sphinx_theme"
html_title = f"voronoicur {release}"
html_sidebars = {"**": []}
html_context = {"default_mode": "auto"}
html_theme_options = {
    "navbar_end": ["theme-switcher"],
    "secondary_sidebar_items": {"**": ["page-toc"], "index": []},
    "show_toc_level": 3,
}


def skip(app, what, name, obj, would_skip, options):
    """Document constructors, hide every other private or dunder member."""
    if name == "__init__":
        return False
    if name.startswith("_"):
        return True
    return would_skip


def setup(app):
    app.connect("autodoc-skip-member", skip)
