"""Graph and table renderings (DOT, CSV, JSON) of structures and cover projections."""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from .core import RankedStructure
from .cover import CoveringMapData, decode_cover, format_decoded

SCHEMA = 1

# Qualitative palette for fiber coloring; cycles when a level has more base objects.
_PALETTE = ("#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
            "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f")


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def structure_to_dot(S: RankedStructure) -> str:
    """Hasse diagram, one rank per level, edges labelled with the record."""
    ids = {p: f"n{i}" for i, p in enumerate(S.all_objects())}
    out = [f"digraph {_q(S.family or 'structure')} {{", "  rankdir=BT;", "  node [shape=box];"]
    for n in range(S.max_level + 1):
        row = " ".join(ids[p] for p in S.objects(n))
        out.append(f"  {{ rank=same; {row} }}" if row else f"  // level {n} is empty")
        for p in S.objects(n):
            out.append(f"  {ids[p]} [label={_q(f'{p} |Aut|={S.aut(p)}')}];")
    for (p, q), rec in sorted(S.coverings.items(), key=lambda kv: (kv[0][0].encoding, kv[0][1].encoding)):
        out.append(f"  {ids[p]} -> {ids[q]} [label={_q(f'u={rec.u},d={rec.d}')}];")
    out.append("}")
    return "\n".join(out) + "\n"


def cover_to_dot(cmap: CoveringMapData) -> str:
    """Cover Hasse diagram with cover objects filled by the color of their fiber."""
    T, B = cmap.total, cmap.base
    color = {}
    for n in range(B.max_level + 1):
        for i, p in enumerate(B.objects(n)):
            color[p] = _PALETTE[i % len(_PALETTE)]
    ids = {p: f"c{i}" for i, p in enumerate(T.all_objects())}
    out = [f"digraph {_q('cover of ' + (B.family or 'structure'))} {{", "  rankdir=BT;",
           "  node [shape=box, style=filled];"]
    for n in range(T.max_level + 1):
        row = " ".join(ids[p] for p in T.objects(n))
        if row:
            out.append(f"  {{ rank=same; {row} }}")
        for p in T.objects(n):
            base = cmap.projection[p]
            out.append(f"  {ids[p]} [label={_q(f'{p} -> {base}')}, fillcolor={_q(color[base])}];")
    for (p, q), rec in sorted(T.coverings.items(), key=lambda kv: (kv[0][0].encoding, kv[0][1].encoding)):
        out.append(f"  {ids[p]} -> {ids[q]} [label={_q(f'u={rec.u},d={rec.d}')}];")
    out.append("}")
    return "\n".join(out) + "\n"


def projection_table(cmap: CoveringMapData, family: Optional[str] = None) -> list:
    """Rows {cover_encoding, base_encoding, decoded_label}; the label is None without a decoder."""
    rows = []
    for p in cmap.total.all_objects():
        label = format_decoded(family, decode_cover(family, p)) if family else None
        rows.append({"cover_encoding": str(p), "base_encoding": str(cmap.projection[p]),
                     "decoded_label": label})
    return rows


def matrix_payload(op: str, at: int, targets, sources, rows) -> dict:
    return {"schema": SCHEMA, "operator": op, "at": at,
            "rows": [str(t) for t in targets], "columns": [str(s) for s in sources],
            "matrix": [list(r) for r in rows]}


def matrix_text(targets, sources, rows) -> str:
    head = [""] + [str(s) for s in sources]
    body = [[str(t)] + [str(x) for x in r] for t, r in zip(targets, rows)]
    widths = [max(len(line[i]) for line in [head] + body) for i in range(len(head))]
    return "".join(" ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip() + "\n"
                   for line in [head] + body)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
