"""Command-line front end: ``updown <command> --example FAMILY [options]``.

Exit status is 0 on success, 1 when a verification check fails and 2 on
usage errors (unknown family, missing parameters, cap exceeded, bad object).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .core import (FormalVector, RankedStructure, VerificationReport, build_truncation,
                   operator_matrix, verify_structure)
from .cover import (DECODABLE, decode_cover, down_quotient, format_decoded, universal_cover,
                    up_quotient, verify_covering)
from .errors import ArgumentError, UpdownError
from .examples import FAMILIES, HOM_ORACLE_LEVELS, hom_oracle, make_generator
from .export import (SCHEMA, cover_to_dot, matrix_payload, matrix_text, projection_table,
                     structure_to_dot, to_csv, to_json)
from .identities import (apply_word, commutator_classify, identity_suite, valid_word_evaluate,
                         is_valid_word)

COMMANDS = ("enumerate", "matrix", "classify", "verify", "cover", "word", "export")
FORMATS = ("text", "json", "csv", "dot")
COVER_CHECK_LEVEL = 5  # covers grow like the chain counts; verify stops here


@dataclass
class RunConfig:
    command: str
    example: str
    params: dict = field(default_factory=dict)
    max_level: Optional[int] = None
    format: str = "text"
    output_path: Optional[str] = None
    force: bool = False
    operator: Optional[str] = None
    at: Optional[int] = None
    word: Optional[str] = None
    target: Optional[str] = None
    quotient: Optional[str] = None
    decode: bool = False


class UsageError(UpdownError):
    pass


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        k, sep, v = item.partition("=")
        if not sep or not k:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[k] = int(v)
        except ValueError:
            raise UsageError(f"--param {k} must be an integer, got {v!r}") from None
    return out


def _max_cells() -> Optional[int]:
    raw = os.environ.get("UPDOWN_MAX_CELLS")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"UPDOWN_MAX_CELLS must be an integer, got {raw!r}") from None


def build(cfg: RunConfig, err=sys.stderr):
    """Generator and truncation for a config, honoring level caps and the cell guard."""
    gen = make_generator(cfg.example, **cfg.params)
    L = gen.level_cap if cfg.max_level is None else cfg.max_level
    if L < 0:
        raise UsageError("--max-level must be nonnegative")
    if L > gen.level_cap:
        if not cfg.force:
            raise UsageError(f"{cfg.example}: --max-level {L} exceeds the cap {gen.level_cap}; "
                             "pass --force to override")
        print(f"warning: {cfg.example} above its cap {gen.level_cap} (level {L}); "
              "this may be slow", file=err)
        gen.level_cap = L
    return gen, build_truncation(gen, L, force=cfg.force, max_cells=_max_cells())


def _lookup(S: RankedStructure, text: str):
    for p in S.all_objects():
        if str(p) == text:
            return p
    raise UsageError(f"no object {text!r} in {S.family} through level {S.max_level}")


def _header(S: RankedStructure) -> dict:
    return {"schema": SCHEMA, "family": S.family, "params": dict(sorted(S.params.items())),
            "max_level": S.max_level}


def _need_format(cfg: RunConfig, allowed) -> None:
    if cfg.format not in allowed:
        raise UsageError(f"{cfg.command} supports --format {', '.join(allowed)}")


# ------------------------------------------------------------------ commands

def cmd_enumerate(cfg, S):
    _need_format(cfg, ("text", "json", "csv"))
    if cfg.format == "json":
        levels = [{"level": n, "objects": [{"key": str(p), "aut": S.aut(p)} for p in S.objects(n)]}
                  for n in range(S.max_level + 1)]
        return to_json({**_header(S), "levels": levels}), 0
    if cfg.format == "csv":
        return to_csv(["level", "object", "aut"],
                      [[p.level, str(p), S.aut(p)] for p in S.all_objects()]), 0
    lines = []
    for n in range(S.max_level + 1):
        objs = S.objects(n)
        lines.append(f"level {n}: {len(objs)} object(s)")
        lines.extend(f"  {p}  |Aut|={S.aut(p)}" for p in objs)
    return "\n".join(lines) + "\n", 0


def cmd_matrix(cfg, S):
    _need_format(cfg, ("text", "json", "csv"))
    if cfg.at is None:
        raise UsageError("matrix needs --at LEVEL")
    tgt, src, rows = operator_matrix(S, cfg.operator, cfg.at)
    if cfg.format == "json":
        return to_json({**_header(S), **matrix_payload(cfg.operator, cfg.at, tgt, src, rows)}), 0
    if cfg.format == "csv":
        return to_csv([""] + [str(s) for s in src],
                      [[str(t)] + list(r) for t, r in zip(tgt, rows)]), 0
    return matrix_text(tgt, src, rows), 0


def cmd_classify(cfg, S):
    _need_format(cfg, ("text", "json"))
    rep = commutator_classify(S)
    if cfg.format == "json":
        return to_json({**_header(S), **rep.to_dict()}), 0
    return rep.summary() + "\n", 0


def _cover_bases(S: RankedStructure, quotient: Optional[str]):
    """(decoder family, unilateral base) pairs to cover."""
    if S.unilateral:
        return [(S.family, S)]
    sides = [quotient] if quotient else ["up", "down"]
    return [(f"{S.family}_{s}", up_quotient(S) if s == "up" else down_quotient(S)) for s in sides]


def full_report(S: RankedStructure, gen) -> VerificationReport:
    """Structural checks, hom oracle, identity suite and cover laws, in a fixed order."""
    rep = verify_structure(S, hom_oracle(gen), HOM_ORACLE_LEVELS.get(gen.tag))
    rep.extend(identity_suite(S))
    for name, base in _cover_bases(S, None):
        cmap = universal_cover(base, min(base.max_level, COVER_CHECK_LEVEL))
        sub = verify_covering(cmap)
        for c in sub.checks:
            c.check = f"cover[{name}].{c.check}"
        rep.extend(sub)
    return rep


def _report_text(S, rep: VerificationReport) -> str:
    lines = [f"{S.family} {dict(sorted(S.params.items()))} through level {S.max_level}"]
    for c in rep.checks:
        lo, hi = c.level_range
        line = f"{c.status.upper():4}  {c.check}  levels {lo}..{hi}"
        if c.note:
            line += f"  ({c.note})"
        lines.append(line)
        if c.status == "fail":
            lines.append("      counterexample: " + to_json(c.counterexample).replace("\n", " ").strip())
    lines.append("ok" if rep.ok else f"{len(rep.failures())} check(s) failed")
    return "\n".join(lines) + "\n"


def cmd_verify(cfg, S, gen):
    _need_format(cfg, ("text", "json"))
    rep = full_report(S, gen)
    status = 0 if rep.ok else 1
    if cfg.format == "json":
        return to_json({**_header(S), **rep.to_dict()}), status
    return _report_text(S, rep), status


def cmd_cover(cfg, S):
    _need_format(cfg, ("text", "json", "csv", "dot"))
    if not S.unilateral and cfg.quotient is None:
        raise UsageError(f"{S.family} is not unilateral; pass --quotient up or --quotient down")
    (name, base), = _cover_bases(S, cfg.quotient)
    if cfg.decode and name not in DECODABLE:
        raise UsageError(f"no decoder for {name}; decodable: {', '.join(DECODABLE)}")
    cmap = universal_cover(base)
    rep = verify_covering(cmap)
    status = 0 if rep.ok else 1
    table = projection_table(cmap, name if cfg.decode else None)
    if cfg.format == "dot":
        return cover_to_dot(cmap), status
    if cfg.format == "csv":
        return to_csv(["cover_encoding", "base_encoding", "decoded_label"],
                      [[r["cover_encoding"], r["base_encoding"], r["decoded_label"] or ""]
                       for r in table]), status
    if cfg.format == "json":
        return to_json({**_header(S), "cover_of": name, "level_sizes": list(cmap.total.level_sizes()),
                        **rep.to_dict(), "projection": table}), status
    lines = [f"universal cover of {name} through level {base.max_level}",
             "level sizes: " + " ".join(map(str, cmap.total.level_sizes()))]
    lines += [f"{c.status.upper():4}  {c.check}" for c in rep.checks]
    if cfg.decode:
        lines += [f"  {r['base_encoding']}  {r['decoded_label']}" for r in table]
    return "\n".join(lines) + "\n", status


def cmd_word(cfg, S):
    _need_format(cfg, ("text", "json"))
    if not cfg.word:
        raise UsageError("word needs a word over U and D")
    if cfg.target is None:
        v = apply_word(S, cfg.word, FormalVector.basis(S.zero))
        terms = {str(k): str(c) for k, c in v.sorted_items()}
        if cfg.format == "json":
            return to_json({**_header(S), "word": cfg.word, "value": terms}), 0
        return (" + ".join(f"{c}*{k}" for k, c in terms.items()) or "0") + "\n", 0
    p = _lookup(S, cfg.target)
    if not is_valid_word(cfg.word.upper(), p.level):
        raise UsageError(f"{cfg.word!r} is not a valid word for {p} (level {p.level})")
    res = valid_word_evaluate(S, cfg.word, p)
    status = 0 if res.match is not False else 1
    if cfg.format == "json":
        return to_json({**_header(S), "word": cfg.word, "target": str(p), "value": str(res.value),
                        "predicted": None if res.predicted is None else str(res.predicted),
                        "match": res.match}), status
    pred = "no closed form (needs SCC)" if res.predicted is None else f"predicted {res.predicted}"
    verdict = "" if res.match is None else ("  match" if res.match else "  MISMATCH")
    return f"<{cfg.word} 0, {p}> = {res.value}; {pred}{verdict}\n", status


def cmd_export(cfg, S):
    _need_format(cfg, ("dot", "json", "csv", "text"))
    edges = sorted(S.coverings.items(), key=lambda kv: (kv[0][0].encoding, kv[0][1].encoding))
    if cfg.format == "json":
        objs = [{"key": str(p), "level": p.level, "aut": S.aut(p)} for p in S.all_objects()]
        es = [{"from": str(p), "to": str(q), "u": r.u, "d": r.d} for (p, q), r in edges]
        return to_json({**_header(S), "objects": objs, "edges": es}), 0
    if cfg.format == "csv":
        return to_csv(["from", "to", "u", "d"], [[str(p), str(q), r.u, r.d] for (p, q), r in edges]), 0
    return structure_to_dot(S), 0


# ---------------------------------------------------------------------- main

def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if cfg.command not in COMMANDS:
            raise UsageError(f"unknown command {cfg.command!r}")
        gen, S = build(cfg, err)
        if cfg.command == "verify":
            text, status = cmd_verify(cfg, S, gen)
        else:
            handler = {"enumerate": cmd_enumerate, "matrix": cmd_matrix, "classify": cmd_classify,
                       "cover": cmd_cover, "word": cmd_word, "export": cmd_export}[cfg.command]
            text, status = handler(cfg, S)
    except (UsageError, ArgumentError) as e:
        print(f"usage error: {e}", file=err)
        return 2
    except UpdownError as e:
        print(f"error: {e}", file=err)
        return 2
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", required=True, choices=sorted(FAMILIES),
                        help="example family")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="integer family parameter (n for subsets/monomials, c for necklaces)")
    common.add_argument("--max-level", type=int, help="truncation level (default: family cap)")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--force", action="store_true", help="allow levels above the family cap")

    ap = argparse.ArgumentParser(prog="updown", description="Exact up/down operator toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="list objects and automorphism orders")
    m = sub.add_parser("matrix", parents=[common], help="matrix of U or D from one level")
    m.add_argument("operator", choices=("U", "D"))
    m.add_argument("--at", type=int, required=True)
    sub.add_parser("classify", parents=[common], help="commutation condition of DU - UD")
    sub.add_parser("verify", parents=[common], help="all structural and identity checks")
    c = sub.add_parser("cover", parents=[common], help="universal cover and covering-law checks")
    c.add_argument("--quotient", choices=("up", "down"),
                   help="unilateral quotient to cover (required for non-unilateral families)")
    c.add_argument("--decode", action="store_true", help="decode cover objects")
    w = sub.add_parser("word", parents=[common], help="evaluate a U/D word at the bottom object")
    w.add_argument("word")
    w.add_argument("--target", help="object to pair the result with")
    sub.add_parser("export", parents=[common], help="Hasse diagram (DOT by default)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fmt = ns.format
    if ns.command == "export" and fmt == "text":
        fmt = "dot"
    return RunConfig(
        command=ns.command, example=ns.example, params=_parse_params(ns.param),
        max_level=ns.max_level, format=fmt, output_path=ns.output, force=ns.force,
        operator=getattr(ns, "operator", None), at=getattr(ns, "at", None),
        word=getattr(ns, "word", None), target=getattr(ns, "target", None),
        quotient=getattr(ns, "quotient", None), decode=getattr(ns, "decode", False))


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as e:
        ap.error(str(e))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
