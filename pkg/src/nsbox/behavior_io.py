"""Plain-text behavior file format.

A behavior file is a small, diffable text document::

    # optional comments anywhere
    name: pr
    alphabets: 2 2 2 2
    table:
    0.5 0 0 0.5
    0.5 0 0 0.5
    0.5 0 0 0.5
    0 0.5 0.5 0

``alphabets`` lists the sizes of the x, y, a, b symbol sets.  The table holds
all probabilities flattened with x varying slowest, then y, then a, then b;
whitespace and line breaks between numbers carry no meaning (the writer emits
one line per input pair for readability).  Parsing ends in a full validation,
so a loaded behavior is always well formed.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from .behavior import Alphabets, Behavior, validate_behavior
from .errors import BehaviorFormatError

FORMAT_HEADER_KEYS = ("name", "alphabets")


def dumps_behavior(b: Behavior) -> str:
    """Render a behavior as file-format text."""
    lines = [
        f"name: {b.name}",
        "alphabets: {} {} {} {}".format(*b.alphabets.shape),
        "table:",
    ]
    flat = b.table.reshape(b.alphabets.x_size * b.alphabets.y_size, -1)
    for row in flat:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def loads_behavior(text: str) -> Behavior:
    """Parse file-format text into a validated behavior."""
    name = ""
    sizes = None
    numbers: list[float] = []
    in_table = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not in_table:
            key, _, value = line.partition(":")
            key = key.strip().lower()
            value = value.strip()
            if key == "name":
                name = value
            elif key == "alphabets":
                parts = value.split()
                if len(parts) != 4:
                    raise BehaviorFormatError(
                        f"line {lineno}: expected 4 alphabet sizes, got {value!r}"
                    )
                try:
                    sizes = tuple(int(p) for p in parts)
                except ValueError:
                    raise BehaviorFormatError(
                        f"line {lineno}: alphabet sizes must be integers"
                    ) from None
            elif key == "table":
                if value:
                    numbers.extend(_parse_numbers(value, lineno))
                in_table = True
            else:
                raise BehaviorFormatError(f"line {lineno}: unknown key {key!r}")
        else:
            numbers.extend(_parse_numbers(line, lineno))

    if sizes is None:
        raise BehaviorFormatError("missing 'alphabets:' line")
    if not in_table:
        raise BehaviorFormatError("missing 'table:' section")
    alphabets = Alphabets(*sizes)
    expected = int(np.prod(alphabets.shape))
    if len(numbers) != expected:
        raise BehaviorFormatError(
            f"table needs {expected} entries for alphabets {sizes}, got {len(numbers)}"
        )
    table = np.array(numbers).reshape(alphabets.shape)
    return validate_behavior(table, alphabets, name=name)


def _parse_numbers(chunk: str, lineno: int) -> list[float]:
    out = []
    for token in chunk.split():
        try:
            out.append(float(token))
        except ValueError:
            raise BehaviorFormatError(
                f"line {lineno}: {token!r} is not a number"
            ) from None
    return out


def save_behavior(b: Behavior, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_behavior(b))


def load_behavior(path: Union[str, os.PathLike]) -> Behavior:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_behavior(fh.read())
