"""Exact workbench for generalized cluster structures on the double of GL(n).

Subpackages are imported lazily on attribute access so that lightweight uses
(for instance the CLI printing its help text) do not pay for the heavier
modules.
"""

from importlib import import_module

__version__ = "0.1.0"

_MODULES = (
    "exactalg",
    "bd",
    "lmatrix",
    "seed",
    "mutation",
    "sequences",
    "umap",
    "poisson",
    "toric",
    "cli_service",
)

__all__ = list(_MODULES)


def __getattr__(name):
    if name in _MODULES:
        module = import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
