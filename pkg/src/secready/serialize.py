"""Canonical JSON and display rounding shared by reporting, service and CLI.

Canonical JSON is the byte-stable wire contract: declared field order, UTF-8,
compact separators, floats rendered as decimals with up to 9 fraction digits
(enough to round-trip scores on a 0-4 scale to well under 1e-9). Display
rounding (2 decimals, half up) is cosmetic and only ever applied to text
output, never fed back into arithmetic.
"""

from __future__ import annotations

import json
from decimal import ROUND_HALF_UP, Decimal


def canonical_float(x: float) -> str:
    """Decimal text with <=9 fraction digits and no trailing zeros ("4.0", "2.333333333")."""
    s = f"{x:.9f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    return s


def _render(value) -> str:
    if isinstance(value, float):
        return canonical_float(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = ",".join(f"{json.dumps(str(k), ensure_ascii=False)}:{_render(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(v) for v in value) + "]"
    raise TypeError(f"cannot canonically serialize {type(value).__name__}")


def canonical_json(doc) -> str:
    """Serialize a plain document (dicts/lists/scalars) to canonical JSON text.

    Key order is the document's insertion order; identical documents always
    produce identical bytes.
    """
    return _render(doc)


def display_round(x: float, places: int = 2) -> float:
    """Round half up for display; Figure-style tables print 2 decimals."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def fmt_score(x: float) -> str:
    """Fixed two-decimal display form of an achievement/priority."""
    return f"{display_round(x):.2f}"


def fmt_percent(x: float) -> str:
    """Percent with up to two decimals, trailing zeros trimmed ("100%", "66.5%")."""
    s = f"{display_round(x):.2f}".rstrip("0").rstrip(".")
    return f"{s}%"
