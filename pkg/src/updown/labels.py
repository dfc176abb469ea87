"""Text forms for object keys, used in every output format."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .core import ObjectKey

EMPTY = "0"


def _beads(enc) -> str:
    return "".join(chr(ord("a") + b) for b in enc) or EMPTY


def format_key(key: ObjectKey) -> str:
    tag, enc = key.tag, key.encoding
    if tag in ("young", "kingman"):
        return "+".join(map(str, enc)) or EMPTY
    if tag == "compositions":
        return "|".join(map(str, enc)) or EMPTY
    if tag == "necklaces":
        return _beads(enc)
    if tag == "planar_trees":
        return "".join("U" if s > 0 else "D" for s in enc) or EMPTY
    if tag == "rooted_trees":
        return enc
    if tag == "two_chain":
        return str(enc[0])
    if tag == "symmetric_chain":
        return f"[{enc[0]}]"
    if tag == "subsets":
        return "{" + ",".join(str(i + 1) for i, x in enumerate(enc) if x) + "}"
    if tag == "monomials":
        parts = []
        for i, e in enumerate(enc):
            if e == 1:
                parts.append(f"t{i + 1}")
            elif e > 1:
                parts.append(f"t{i + 1}^{e}")
        return "*".join(parts) or "1"
    if tag == "product":
        a, b = enc
        return f"({format_key(a)},{format_key(b)})"
    if tag == "cover":
        if not enc:
            return "()"
        return "/".join(f"{format_key(t)}#{i}" for t, i in enc)
    return repr(enc)
