"""Built-in example system definitions shipped with the package."""
from __future__ import annotations

from importlib import resources

EXAMPLES = ("wave3d",)


def example_text(name: str) -> str:
    """Raw definition-file text of a built-in example."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example '{name}' (have: {', '.join(EXAMPLES)})")
    return resources.files("charmarch").joinpath(f"data/{name}.txt").read_text()
