"""Bundled model files.

The shipped zoo makes the full acceptance suite runnable offline: the
3-band corner model, its one-parameter deformation, its suspension, the
constant reference, the degree-one winding reference, and two seeded random
symmetric models for the property suites.
"""

from __future__ import annotations

from importlib import resources

from .modelio import load_model

NAMES = (
    "paper-2d",
    "paper-2d-r",
    "paper-3d",
    "trivial-eps",
    "winding-ref",
    "random-4x4",
    "random-6x6",
)


def zoo_path(name):
    """Filesystem path of a bundled model file."""
    if name.endswith(".json"):
        name = name[:-5]
    if name not in NAMES:
        raise KeyError(f"unknown zoo model {name!r}; have {NAMES}")
    return resources.files("qpindex") / "zoo" / f"{name}.json"


def load(name):
    """Load a bundled model by name."""
    return load_model(str(zoo_path(name)))
