"""Structured text form shared by word sources, cocycle tables, and
scenario configs.

Grammar (line oriented, ``#`` starts a comment):

    name {
      key = <python literal>     # numbers, quoted strings, lists, ...
      nested {
        ...
      }
    }

A document is one named top-level block; values round-trip through
``repr``/``ast.literal_eval``. Nested blocks map to nested dicts.
"""

from __future__ import annotations

import ast
from typing import Mapping

from .errors import ConfigError


def _emit(data: Mapping, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    for key, value in data.items():
        if isinstance(value, Mapping):
            lines.append(f"{pad}{key} {{")
            _emit(value, indent + 1, lines)
            lines.append(f"{pad}}}")
        else:
            lines.append(f"{pad}{key} = {value!r}")


def dumps(name: str, data: Mapping) -> str:
    if not name or any(ch in name for ch in " {}=#"):
        raise ConfigError(f"bad block name {name!r}")
    lines = [f"{name} {{"]
    _emit(data, 1, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[str, dict]:
    """Parse one top-level block; returns (name, contents)."""
    stack: list[dict] = []
    names: list[str] = []
    root_name = None
    root: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "}":
            if not stack:
                raise ConfigError(f"line {lineno}: unmatched '}}'")
            stack.pop()
            names.pop()
            continue
        if line.endswith("{"):
            key = line[:-1].strip()
            if not key:
                raise ConfigError(f"line {lineno}: block needs a name")
            block: dict = {}
            if stack:
                stack[-1][key] = block
            else:
                if root is not None:
                    raise ConfigError(f"line {lineno}: multiple top-level blocks")
                root_name, root = key, block
            stack.append(block)
            names.append(key)
            continue
        if "=" in line:
            if not stack:
                raise ConfigError(f"line {lineno}: assignment outside any block")
            key, _, rhs = line.partition("=")
            try:
                value = ast.literal_eval(rhs.strip())
            except (ValueError, SyntaxError) as exc:
                raise ConfigError(f"line {lineno}: bad literal {rhs.strip()!r}") from exc
            stack[-1][key.strip()] = value
            continue
        raise ConfigError(f"line {lineno}: cannot parse {raw!r}")
    if stack:
        raise ConfigError(f"unclosed block {names[-1]!r}")
    if root is None:
        raise ConfigError("empty document")
    return root_name, root
