"""Ranked multiplicity structures and the exact up/down operator algebra.

A :class:`RankedStructure` is a finite truncation of an updown category: the
objects of levels ``0..max_level``, the order of each automorphism group, and
one :class:`CoveringRecord` per covering pair between adjacent levels.  All
arithmetic is exact (``int`` counts, :class:`fractions.Fraction` coefficients).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional

from .errors import ArgumentError, InvariantError, ResourceError, TruncationError
from .labels import format_key


@dataclass(frozen=True, order=True)
class ObjectKey:
    tag: str
    encoding: Any
    level: int

    def __str__(self) -> str:
        return format_key(self)


@dataclass(frozen=True)
class CoveringRecord:
    u: int
    d: int
    hom_count: Optional[int] = None


@dataclass(frozen=True)
class LevelData:
    objects: tuple
    aut_order: Mapping[ObjectKey, int]


def _sort_keys(keys: Iterable[ObjectKey]) -> tuple:
    return tuple(sorted(keys, key=lambda k: k.encoding))


class RankedStructure:
    """Immutable truncation of an updown category.

    ``coverings`` maps ``(p, q)`` with ``q.level == p.level + 1`` to a record.
    The constructor only checks shape (keys exist, levels adjacent); the
    multiplicity laws are the business of :func:`verify_structure`, so faulty
    data can be built on purpose and then diagnosed.
    """

    def __init__(
        self,
        levels: Iterable[LevelData],
        coverings: Mapping[tuple, CoveringRecord],
        family: str = "",
        params: Optional[Mapping[str, int]] = None,
    ):
        self.levels = tuple(levels)
        if not self.levels:
            raise ArgumentError("a structure needs at least level 0")
        self.max_level = len(self.levels) - 1
        self.family = family
        self.params = MappingProxyType(dict(params or {}))
        self._aut: dict = {}
        for n, lv in enumerate(self.levels):
            for p in lv.objects:
                if p.level != n:
                    raise ArgumentError(f"{p} listed at level {n}")
                self._aut[p] = lv.aut_order[p]
        up = defaultdict(list)
        down = defaultdict(list)
        for (p, q), rec in coverings.items():
            if p not in self._aut or q not in self._aut:
                raise ArgumentError(f"covering ({p}, {q}) names an unknown object")
            if q.level != p.level + 1:
                raise ArgumentError(f"covering ({p}, {q}) does not join adjacent levels")
            up[p].append((q, rec))
            down[q].append((p, rec))
        order = {p: i for i, p in enumerate(self.all_objects())}
        self._up = {p: tuple(sorted(v, key=lambda t: order[t[0]])) for p, v in up.items()}
        self._down = {q: tuple(sorted(v, key=lambda t: order[t[0]])) for q, v in down.items()}
        self.coverings = MappingProxyType(dict(coverings))
        self.unilateral = all(a == 1 for a in self._aut.values())

    def __contains__(self, p) -> bool:
        return p in self._aut

    def __repr__(self) -> str:
        return f"RankedStructure({self.family!r}, sizes={self.level_sizes()})"

    @property
    def zero(self) -> ObjectKey:
        return self.levels[0].objects[0]

    def objects(self, n: int) -> tuple:
        if 0 <= n <= self.max_level:
            return self.levels[n].objects
        return ()

    def all_objects(self) -> Iterator[ObjectKey]:
        for lv in self.levels:
            yield from lv.objects

    def level_sizes(self) -> tuple:
        return tuple(len(lv.objects) for lv in self.levels)

    def aut(self, p: ObjectKey) -> int:
        try:
            return self._aut[p]
        except KeyError:
            raise ArgumentError(f"{p} is not an object of this structure") from None

    def covers(self, p: ObjectKey) -> tuple:
        """``(q, record)`` for every q covering p."""
        self.aut(p)
        return self._up.get(p, ())

    def covered(self, q: ObjectKey) -> tuple:
        """``(p, record)`` for every p covered by q."""
        self.aut(q)
        return self._down.get(q, ())

    def record(self, p: ObjectKey, q: ObjectKey) -> Optional[CoveringRecord]:
        return self.coverings.get((p, q))

    def replace_records(self, changes: Mapping[tuple, Optional[CoveringRecord]]) -> "RankedStructure":
        """Copy with some records replaced (``None`` deletes the record)."""
        cov = dict(self.coverings)
        for k, rec in changes.items():
            if rec is None:
                cov.pop(k, None)
            else:
                cov[k] = rec
        return RankedStructure(self.levels, cov, self.family, self.params)

    def without_objects(self, drop: Iterable[ObjectKey]) -> "RankedStructure":
        drop = set(drop)
        levels = [
            LevelData(tuple(p for p in lv.objects if p not in drop),
                      {p: a for p, a in lv.aut_order.items() if p not in drop})
            for lv in self.levels
        ]
        cov = {k: r for k, r in self.coverings.items() if k[0] not in drop and k[1] not in drop}
        return RankedStructure(levels, cov, self.family, self.params)

    def relabel(self, fn: Callable[[ObjectKey], ObjectKey], family: Optional[str] = None,
                params: Optional[Mapping[str, int]] = None) -> "RankedStructure":
        """Rename every object through ``fn`` (must be injective and level preserving)."""
        mapping = {p: fn(p) for p in self.all_objects()}
        if len(set(mapping.values())) != len(mapping):
            raise ArgumentError("relabelling is not injective")
        levels = [
            LevelData(_sort_keys(mapping[p] for p in lv.objects),
                      {mapping[p]: a for p, a in lv.aut_order.items()})
            for lv in self.levels
        ]
        cov = {(mapping[p], mapping[q]): r for (p, q), r in self.coverings.items()}
        return RankedStructure(levels, cov, family or self.family,
                               self.params if params is None else params)


def point_structure(max_level: int = 0) -> RankedStructure:
    """The updown category with only 0̂ (unit for products)."""
    z = ObjectKey("point", (), 0)
    levels = [LevelData((z,), {z: 1})] + [LevelData((), {}) for _ in range(max_level)]
    return RankedStructure(levels, {}, "point")


class FormalVector(Mapping):
    """Finite formal linear combination of objects with exact rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[ObjectKey, Any]] = None):
        t = {}
        for k, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                t[k] = c
        self._terms = t

    @classmethod
    def basis(cls, p: ObjectKey, coeff=1) -> "FormalVector":
        return cls({p: coeff})

    def __getitem__(self, k):
        return self._terms[k]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def coeff(self, k) -> Fraction:
        return self._terms.get(k, Fraction(0))

    def sorted_items(self) -> list:
        return sorted(self._terms.items(), key=lambda kv: (kv[0].level, kv[0].encoding))

    def _combine(self, other, sign):
        acc = dict(self._terms)
        for k, c in other.items():
            acc[k] = acc.get(k, 0) + sign * c
        return FormalVector(acc)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return FormalVector({k: -c for k, c in self._terms.items()})

    def __mul__(self, scalar):
        return FormalVector({k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._terms == FormalVector(other)._terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{c}*{k}" for k, c in self.sorted_items())
        return f"FormalVector({body or '0'})"


def _check_members(S: RankedStructure, v: Mapping) -> None:
    for p in v:
        if p not in S:
            raise ArgumentError(f"{p} is not an object of this structure")


def up_apply(S: RankedStructure, v: Mapping) -> FormalVector:
    """Apply U: each object p goes to the u-weighted sum of its covers."""
    _check_members(S, v)
    acc: dict = defaultdict(int)
    for p, c in v.items():
        if p.level >= S.max_level:
            raise TruncationError(
                f"U is undefined at the truncation level {S.max_level} (object {p})")
        for q, rec in S.covers(p):
            acc[q] += c * rec.u
    return FormalVector(acc)


def down_apply(S: RankedStructure, v: Mapping) -> FormalVector:
    """Apply D: each object goes to the d-weighted sum of what it covers; D(0̂) = 0."""
    _check_members(S, v)
    acc: dict = defaultdict(int)
    for q, c in v.items():
        for p, rec in S.covered(q):
            acc[p] += c * rec.d
    return FormalVector(acc)


def inner_product(S: RankedStructure, v: Mapping, w: Mapping) -> Fraction:
    _check_members(S, v)
    _check_members(S, w)
    if len(w) < len(v):
        v, w = w, v
    return sum((Fraction(c) * w[p] * S.aut(p) for p, c in v.items() if p in w), Fraction(0))


def up_power(S: RankedStructure, v: Mapping, k: int) -> FormalVector:
    v = FormalVector(v)
    for _ in range(k):
        v = up_apply(S, v)
    return v


def down_power(S: RankedStructure, v: Mapping, k: int) -> FormalVector:
    v = FormalVector(v)
    for _ in range(k):
        v = down_apply(S, v)
    return v


def extended_multiplicity(S: RankedStructure, p: ObjectKey, q: ObjectKey) -> tuple:
    """``(u(p;q), d(p;q))`` from the k-th power of U, k = |q| - |p|."""
    k = q.level - p.level
    if k < 0:
        raise ArgumentError(f"|q| = {q.level} is below |p| = {p.level}")
    S.aut(q)
    pairing = up_power(S, FormalVector.basis(p), k).coeff(q) * S.aut(q)
    return pairing / S.aut(q), pairing / S.aut(p)


def multiplicities_from_zero(S: RankedStructure) -> dict:
    """``{p: u(0̂;p)}`` for every object, one U-power sweep."""
    out = {}
    v = FormalVector.basis(S.zero)
    for n in range(S.max_level + 1):
        for p in S.objects(n):
            out[p] = v.coeff(p)
        if n < S.max_level:
            v = up_apply(S, v)
    return out


def down_multiplicity_via_d(S: RankedStructure, p: ObjectKey, q: ObjectKey) -> Fraction:
    """d(p;q) read off D^k(q); uses only d-records, independent of the U route."""
    k = q.level - p.level
    if k < 0:
        raise ArgumentError(f"|q| = {q.level} is below |p| = {p.level}")
    return down_power(S, FormalVector.basis(q), k).coeff(p)


def operator_matrix(S: RankedStructure, op: str, at: int) -> tuple:
    """Exact integer matrix of U (level at -> at+1) or D (at -> at-1).

    Rows are target objects, columns source objects, both in level order.
    """
    src = S.objects(at)
    if op == "U":
        if at >= S.max_level:
            raise TruncationError(f"U is undefined at the truncation level {S.max_level}")
        tgt = S.objects(at + 1)
        apply = up_apply
    elif op == "D":
        if at < 1:
            raise ArgumentError("D maps level 0 to zero; choose --at >= 1")
        tgt = S.objects(at - 1)
        apply = down_apply
    else:
        raise ArgumentError(f"unknown operator {op!r}")
    cols = [apply(S, FormalVector.basis(p)) for p in src]
    rows = [[c.coeff(q) for c in cols] for q in tgt]
    rows = [[int(x) if x.denominator == 1 else x for x in r] for r in rows]
    return tuple(tgt), tuple(src), rows


# ---------------------------------------------------------------- products

def product_structure(A: RankedStructure, B: RankedStructure) -> RankedStructure:
    """Cartesian product truncated at the common max level.

    Objects ``(a, b)`` sit at level ``|a| + |b|``; automorphism orders multiply;
    the covers of ``(a, b)`` are ``(a', b)`` and ``(a, b')`` with the factor's
    multiplicities.
    """
    if A.max_level != B.max_level:
        raise ArgumentError(
            f"factors truncated at different levels ({A.max_level}, {B.max_level})")
    L = A.max_level

    def key(a, b):
        return ObjectKey("product", (a, b), a.level + b.level)

    levels = []
    for n in range(L + 1):
        objs, aut = [], {}
        for i in range(n + 1):
            for a in A.objects(i):
                for b in B.objects(n - i):
                    k = key(a, b)
                    objs.append(k)
                    aut[k] = A.aut(a) * B.aut(b)
        levels.append(LevelData(_sort_keys(objs), aut))
    cov = {}
    for n in range(L):
        for i in range(n + 1):
            for a in A.objects(i):
                for b in B.objects(n - i):
                    src = key(a, b)
                    for a2, rec in A.covers(a):
                        h = None if rec.hom_count is None else rec.hom_count * B.aut(b)
                        cov[src, key(a2, b)] = CoveringRecord(rec.u, rec.d, h)
                    for b2, rec in B.covers(b):
                        h = None if rec.hom_count is None else rec.hom_count * A.aut(a)
                        cov[src, key(a, b2)] = CoveringRecord(rec.u, rec.d, h)
    return RankedStructure(levels, cov, "product")


def product_hom_oracle(A: RankedStructure, hom_a, B: RankedStructure, hom_b):
    """Hom counter on adjacent levels of A x B, built from factor oracles."""

    def count(p: ObjectKey, q: ObjectKey) -> int:
        (a, b), (a2, b2) = p.encoding, q.encoding
        if a2.level == a.level + 1 and b2 == b:
            return hom_a(a, a2) * B.aut(b)
        if b2.level == b.level + 1 and a2 == a:
            return A.aut(a) * hom_b(b, b2)
        return 0

    return count


# ------------------------------------------------------------ verification

@dataclass
class CheckResult:
    check: str
    status: str  # "pass" | "fail" | "skip"
    family: str = ""
    params: dict = field(default_factory=dict)
    level_range: tuple = (0, 0)
    counterexample: Optional[dict] = None
    note: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "family": self.family,
            "params": dict(sorted(self.params.items())),
            "level_range": list(self.level_range),
            "status": self.status,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    def failures(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def to_dict(self) -> dict:
        return {"schema": 1, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def make_check(S: RankedStructure, name: str, failure: Optional[dict], level_range=None,
               note=None, skipped=False) -> CheckResult:
    status = "skip" if skipped else ("fail" if failure else "pass")
    return CheckResult(name, status, S.family, dict(S.params),
                       tuple(level_range or (0, S.max_level)), failure, note)


def _first(gen):
    return next(gen, None)


def verify_structure(S: RankedStructure, hom_oracle: Optional[Callable] = None,
                     hom_max_level: Optional[int] = None) -> VerificationReport:
    """Run the structural checks and return one entry per check.

    Failures are reported with the first counterexample, never raised.
    ``hom_oracle(p, q)`` counts morphisms between adjacent levels; when given,
    every adjacent pair up to ``hom_max_level`` is checked against the stored
    records.
    """
    rep = VerificationReport()
    L = S.max_level
    z = S.zero

    def reach():
        if S.level_sizes()[0] != 1:
            yield {"reason": "level 0 must hold exactly one object"}
        for n in range(1, L + 1):
            for q in S.objects(n):
                if not S.covered(q):
                    yield {"object": str(q), "reason": "no incoming covering"}

    rep.checks.append(make_check(S, "reachability", _first(reach())))

    def udaut():
        for (p, q), r in S.coverings.items():
            if r.u < 1 or r.d < 1 or r.u * S.aut(q) != r.d * S.aut(p):
                yield {"p": str(p), "q": str(q), "u": r.u, "d": r.d,
                       "aut_p": S.aut(p), "aut_q": S.aut(q)}

    rep.checks.append(make_check(S, "udaut", _first(udaut())))

    def composition(which):
        for n in range(L - 1):
            for p in S.objects(n):
                if which == "u":
                    ext = up_power(S, FormalVector.basis(p), 2)
                    via = defaultdict(int)
                    for p1, r1 in S.covers(p):
                        for q, r2 in S.covers(p1):
                            via[q] += r1.u * r2.u
                    for q in S.objects(n + 2):
                        if ext.coeff(q) != via.get(q, 0):
                            yield {"p": str(p), "q": str(q), "extended": _frac(ext.coeff(q)),
                                   "sum": via.get(q, 0)}
                else:
                    via = defaultdict(int)
                    for p1, r1 in S.covers(p):
                        for q, r2 in S.covers(p1):
                            via[q] += r1.d * r2.d
                    ext = up_power(S, FormalVector.basis(p), 2)
                    for q in S.objects(n + 2):
                        e = ext.coeff(q) * S.aut(q) / S.aut(p)
                        if e != via.get(q, 0):
                            yield {"p": str(p), "q": str(q), "extended": _frac(e),
                                   "sum": via.get(q, 0)}

    rng = (0, L)
    rep.checks.append(make_check(S, "composition_u", _first(composition("u")), rng))
    rep.checks.append(make_check(S, "composition_d", _first(composition("d")), rng))

    def adjoint():
        for n in range(L):
            downs = {q: down_apply(S, FormalVector.basis(q)) for q in S.objects(n + 1)}
            for p in S.objects(n):
                bp = FormalVector.basis(p)
                up = up_apply(S, bp)
                for q in S.objects(n + 1):
                    lhs = up.coeff(q) * S.aut(q)
                    rhs = downs[q].coeff(p) * S.aut(p)
                    if lhs != rhs:
                        yield {"p": str(p), "q": str(q), "<Up,q>": _frac(lhs),
                               "<p,Dq>": _frac(rhs)}

    rep.checks.append(make_check(S, "adjointness", _first(adjoint())))

    u0 = multiplicities_from_zero(S)

    def ratio():
        d_vec = {}
        for n in range(L + 1):
            for p in S.objects(n):
                d0 = down_power(S, FormalVector.basis(p), n).coeff(z)
                d_vec[p] = d0
                if u0[p] == 0 or d0 == 0:
                    if u0[p] != d0:
                        yield {"p": str(p), "u(0;p)": _frac(u0[p]), "d(0;p)": _frac(d0),
                               "reason": "order inconsistency"}
                    continue
                if d0 / u0[p] != Fraction(S.aut(p), S.aut(z)):
                    yield {"p": str(p), "u(0;p)": _frac(u0[p]), "d(0;p)": _frac(d0),
                           "aut": S.aut(p)}

    rep.checks.append(make_check(S, "ratio", _first(ratio())))

    def order():
        for n in range(L - 1):
            d2 = {q: down_power(S, FormalVector.basis(q), 2) for q in S.objects(n + 2)}
            for p in S.objects(n):
                ext = up_power(S, FormalVector.basis(p), 2)
                for q in S.objects(n + 2):
                    dq = d2[q].coeff(p)
                    if (ext.coeff(q) != 0) != (dq != 0):
                        yield {"p": str(p), "q": str(q), "u": _frac(ext.coeff(q)), "d": _frac(dq)}

    rep.checks.append(make_check(S, "order_consistency", _first(order()), rng))

    if hom_oracle is None:
        rep.checks.append(make_check(S, "hom_oracle", None, skipped=True,
                                     note="no hom oracle for this family; u, d from closed forms"))
    else:
        top = L if hom_max_level is None else min(L, hom_max_level)

        def homs():
            for n in range(top):
                for p in S.objects(n):
                    for q in S.objects(n + 1):
                        h = hom_oracle(p, q)
                        r = S.record(p, q)
                        if r is None:
                            if h:
                                yield {"p": str(p), "q": str(q), "hom": h, "reason": "missing record"}
                            continue
                        ap, aq = S.aut(p), S.aut(q)
                        if h % aq or h % ap or h // aq != r.u or h // ap != r.d:
                            yield {"p": str(p), "q": str(q), "hom": h, "u": r.u, "d": r.d,
                                   "aut_p": ap, "aut_q": aq}
                        elif r.hom_count is not None and r.hom_count != h:
                            yield {"p": str(p), "q": str(q), "hom": h, "stored": r.hom_count}

        rep.checks.append(make_check(S, "hom_oracle", _first(homs()), (0, top)))
    return rep


# ------------------------------------------------------------ construction

def build_truncation(generator, max_level: int, force: bool = False,
                     max_cells: Optional[int] = None) -> RankedStructure:
    """Realize levels ``0..max_level`` of an example generator.

    ``generator`` provides ``tag``, ``level_cap``, ``params``, ``enumerate_level``,
    ``aut_order``, ``coverings`` and ``canonical``; it may provide its own
    ``build`` (product-backed families do).
    """
    if max_level < 0:
        raise ArgumentError("max_level must be nonnegative")
    if max_level > generator.level_cap and not force:
        raise ResourceError(
            f"{generator.tag}: max_level {max_level} exceeds the level cap {generator.level_cap}")
    custom = getattr(generator, "build", None)
    if custom is not None:
        S = custom(max_level)
        if max_cells is not None and sum(S.level_sizes()) > max_cells:
            raise ResourceError(f"{sum(S.level_sizes())} objects exceed the cell cap {max_cells}")
        return S
    levels = []
    cells = 0
    for n in range(max_level + 1):
        objs = list(generator.enumerate_level(n))
        cells += len(objs)
        if max_cells is not None and cells > max_cells:
            raise ResourceError(f"more than {max_cells} objects by level {n} (cell cap)")
        for p in objs:
            if generator.canonical(p.encoding) != p.encoding or p.level != n:
                raise InvariantError(f"{generator.tag} emitted a non-canonical object {p!r}")
        if len(set(objs)) != len(objs):
            raise InvariantError(f"{generator.tag} emitted duplicates at level {n}")
        levels.append(LevelData(_sort_keys(objs), {p: generator.aut_order(p) for p in objs}))
    known = [set(lv.objects) for lv in levels]
    cov = {}
    for n in range(max_level):
        for p in levels[n].objects:
            for q, rec in generator.coverings(p):
                if q not in known[n + 1]:
                    raise InvariantError(f"{generator.tag}: cover {q!r} of {p} is not enumerated")
                cov[p, q] = rec
    return RankedStructure(levels, cov, generator.tag, generator.params)
