# -- Project information -----------------------------------------------------
project = 'SlyML5'
copyright = '2026, Dunkyl 🔣🔣'
author = 'Dunkyl 🔣🔣'

# -- General configuration ---------------------------------------------------
templates_path = ['_templates']
exclude_patterns = ['build', 'Thumbs.db', '.DS_Store']

extensions = [
    'myst_parser',
    'sphinxcontrib_trio',
    'sphinx_copybutton',
    'sphinxext.opengraph',
    'sphinx.ext.autodoc',
    'sphinx.ext.duration',
    'sphinx.ext.autosummary',
]
myst_enable_extensions = ["colon_fence"]

autodoc_default_options = {
    "members": True,
    "inherited-members": False,
    "private-members": False,
    "show-inheritance": True,
    "undoc-members": True,
    "member-order": "bysource",
}

autodoc_member_order = 'bysource'
autodoc_type_aliases = {
    "Record": "Record",
    "World": "World",
}
python_use_unqualified_type_names = True


# -- Options for HTML output -------------------------------------------------
html_theme = 'furo'
html_static_path = ['_static']
html_title = "SlyML5 for Python"


from sphinx.ext import autodoc

def record_(s: str) -> str:
    return s.replace(
        "int | bool | str | None | ~collections.abc.Sequence[Record] | ~collections.abc.Mapping[str, Record]",
        "Record"
    )

class MockedClassDocumenter(autodoc.ClassDocumenter):
    def add_line(self, line: str, source: str, *lineno: int) -> None:
        if line == "   Bases: :py:class:`object`":
            return
        super().add_line(line, source, *lineno)

class MockedFnDocumenter(autodoc.FunctionDocumenter):
    def format_signature(self, **kwargs) -> str:
        return record_(super().format_signature(**kwargs))

autodoc.ClassDocumenter = MockedClassDocumenter
autodoc.FunctionDocumenter = MockedFnDocumenter
