"""Canonical encodings used for equality, hashing, and stable ordering.

Every value that can appear inside a PROP element (colors, permutations,
graphs, nested slice elements) is reduced to a tree of plain tuples, strings,
and integers by ``canon``.  ``enc`` renders that tree as a single string; two
values are considered equal exactly when their encodings coincide, and all
enumeration orders in the package sort by encoding.
"""

from __future__ import annotations

from typing import Any


def canon(value: Any) -> Any:
    """Reduce value to a tree of tuples/strings/ints."""
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if hasattr(value, "canon_tree"):
        return value.canon_tree()
    if isinstance(value, (tuple, list)):
        return tuple(canon(v) for v in value)
    if isinstance(value, dict):
        return tuple(sorted((canon(k), canon(v)) for k, v in value.items()))
    if isinstance(value, (set, frozenset)):
        return tuple(sorted((canon(v) for v in value), key=enc))
    raise TypeError(f"cannot canonicalize {type(value).__name__}")


def enc(value: Any) -> str:
    """Stable string encoding of canon(value)."""
    return _render(canon(value))


def _render(tree: Any) -> str:
    if isinstance(tree, str):
        return "s" + repr(tree)
    if isinstance(tree, bool):
        return f"b{int(tree)}"
    if isinstance(tree, int):
        return f"i{tree}"
    if tree is None:
        return "n"
    # tuple
    return "(" + ",".join(_render(t) for t in tree) + ")"


def sort_key(value: Any) -> str:
    return enc(value)
