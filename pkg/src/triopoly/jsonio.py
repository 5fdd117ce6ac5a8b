"""JSON emission with fixed 17-significant-digit floats.

The stock encoder prints floats through ``repr`` (shortest round-trip).
File outputs of this package promise a fixed 17-significant-digit format
instead, so numbers survive tools that re-parse and re-print them with
their own ideas about precision.  Non-finite floats have no JSON spelling
and are emitted as ``null``.
"""
from __future__ import annotations

import json
import math

__all__ = ["dumps17"]


def _float_text(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    s = format(v, ".17g")
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def _emit(obj, out: list, indent, depth: int) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_text(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        _emit_items(obj.items(), "{", "}", out, indent, depth, keyed=True)
    elif isinstance(obj, (list, tuple)):
        _emit_items(obj, "[", "]", out, indent, depth, keyed=False)
    else:
        raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def _emit_items(items, open_ch, close_ch, out, indent, depth, keyed) -> None:
    items = list(items)
    if not items:
        out.append(open_ch + close_ch)
        return
    if indent is None:
        first, rest, tail = "", ", ", ""
    else:
        pad = "\n" + " " * (indent * (depth + 1))
        first, rest = pad, "," + pad
        tail = "\n" + " " * (indent * depth)
    out.append(open_ch)
    for i, item in enumerate(items):
        out.append(first if i == 0 else rest)
        if keyed:
            k, v = item
            if not isinstance(k, str):
                raise TypeError(f"object keys must be str, got {type(k).__name__}")
            out.append(json.dumps(k) + ": ")
            _emit(v, out, indent, depth + 1)
        else:
            _emit(item, out, indent, depth + 1)
    out.append(tail + close_ch)


def dumps17(obj, indent: int | None = None) -> str:
    """Serialize ``obj`` to JSON with %.17g floats.

    Accepts the usual JSON-compatible tree of dict/list/tuple/str/float/
    int/bool/None.  ``indent`` behaves like ``json.dumps``'s.
    """
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)
