import sys
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from updown.core import build_truncation  # noqa: E402
from updown.examples import make_generator  # noqa: E402


@lru_cache(maxsize=None)
def _built(tag, level, params):
    g = make_generator(tag, **dict(params))
    return build_truncation(g, g.level_cap if level is None else level)


def structure(tag, level=None, **params):
    """Cached truncation; structures are immutable so sharing is safe."""
    return _built(tag, level, tuple(sorted(params.items())))


# (criterion, part, ok, detail) rows from test_acceptance.py, printed once at the end
ACCEPTANCE = []


def record(criterion, part, ok, detail=""):
    ACCEPTANCE.append((criterion, part, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted({c for c, *_ in ACCEPTANCE}):
        rows = [r for r in ACCEPTANCE if r[0] == crit]
        ok = all(r[2] for r in rows)
        bad = [f"{part}: {detail}" for _, part, good, detail in rows if not good]
        parts = ", ".join(part for _, part, *_ in rows)
        line = f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  [{parts}]"
        if bad:
            line += "  failing -> " + "; ".join(bad)
        tr.write_line(line)
