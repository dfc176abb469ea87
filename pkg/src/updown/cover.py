"""Unilateral quotients, universal covers, and decoders of cover objects.

A level-n object of the universal cover is a chain of n arrows out of 0̂.
Arrows between adjacent objects p, q of a unilateral structure are the
indices ``0..u(p;q)-1``; for families that can enumerate their morphisms the
index points into :meth:`ExampleGenerator.arrow_representatives`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .core import (CoveringRecord, LevelData, ObjectKey, RankedStructure, VerificationReport,
                   make_check, multiplicities_from_zero)
from .errors import ArgumentError, InvariantError, PreconditionError, UnsupportedError
from .examples import Compositions, Kingman, PlanarTrees, Young


def _quotient(S: RankedStructure, side: str) -> RankedStructure:
    if S.unilateral:
        return S
    levels = [LevelData(lv.objects, {p: 1 for p in lv.objects}) for lv in S.levels]
    cov = {}
    for k, r in S.coverings.items():
        w = r.u if side == "up" else r.d
        cov[k] = CoveringRecord(w, w)
    return RankedStructure(levels, cov, f"{S.family}_{side}", S.params)


def up_quotient(S: RankedStructure) -> RankedStructure:
    """Trivial automorphisms, with every record replaced by u' = d' = u."""
    return _quotient(S, "up")


def down_quotient(S: RankedStructure) -> RankedStructure:
    """Trivial automorphisms, with every record replaced by u' = d' = d."""
    return _quotient(S, "down")


@dataclass(frozen=True)
class ChainObject:
    arrows: tuple  # ((target ObjectKey, arrow index), ...)

    @property
    def level(self) -> int:
        return len(self.arrows)

    def endpoint(self, zero: ObjectKey) -> ObjectKey:
        return self.arrows[-1][0] if self.arrows else zero

    def key(self) -> ObjectKey:
        return ObjectKey("cover", self.arrows, len(self.arrows))

    @classmethod
    def from_key(cls, key: ObjectKey) -> "ChainObject":
        if key.tag != "cover":
            raise ArgumentError(f"{key!r} is not a cover object")
        return cls(tuple(key.encoding))


@dataclass
class CoveringMapData:
    total: RankedStructure
    base: RankedStructure
    projection: dict


def universal_cover(S: RankedStructure, max_level: Optional[int] = None) -> CoveringMapData:
    """One cover object per chain of arrows out of 0̂; the result is a tree of unit covers."""
    if not S.unilateral:
        raise PreconditionError(
            "universal_cover needs a unilateral structure; apply up_quotient or down_quotient first")
    L = S.max_level if max_level is None else max_level
    if L > S.max_level or L < 0:
        raise ArgumentError(f"max_level must lie in 0..{S.max_level}")
    root = ChainObject(()).key()
    levels = [LevelData((root,), {root: 1})]
    projection = {root: S.zero}
    cov = {}
    frontier = [root]
    for _ in range(L):
        nxt = []
        for c in frontier:
            end = projection[c]
            for q, rec in S.covers(end):
                for i in range(rec.u):
                    child = ChainObject(c.encoding + ((q, i),)).key()
                    projection[child] = q
                    cov[c, child] = CoveringRecord(1, 1)
                    nxt.append(child)
        nxt.sort(key=lambda k: k.encoding)
        levels.append(LevelData(tuple(nxt), {k: 1 for k in nxt}))
        frontier = nxt
    total = RankedStructure(levels, cov, "cover", {})
    return CoveringMapData(total, S, projection)


def verify_covering(cmap: CoveringMapData) -> VerificationReport:
    """Check the covering-map laws on multiplicity data, plus the fiber-size law."""
    T, B, pi = cmap.total, cmap.base, cmap.projection
    rep = VerificationReport()
    L = T.max_level
    rng = (0, L)

    def unilateral():
        if not T.unilateral:
            yield {"structure": "cover"}
        if not B.unilateral:
            yield {"structure": "base"}

    rep.checks.append(make_check(B, "unilateral", next(unilateral(), None), rng))
    if not (T.unilateral and B.unilateral):
        return rep

    def projection():
        if pi.get(T.zero) != B.zero:
            yield {"object": str(T.zero), "reason": "0̂ must project to 0̂"}
        for p in T.all_objects():
            if p not in pi or pi[p] not in B or pi[p].level != p.level:
                yield {"object": str(p), "reason": "projection missing or not level preserving"}

    rep.checks.append(make_check(B, "projection", next(projection(), None), rng))

    def surjective():
        for n in range(L + 1):
            hit = {pi[p] for p in T.objects(n)}
            for q in B.objects(n):
                if q not in hit:
                    yield {"base_object": str(q), "reason": "empty fiber"}

    rep.checks.append(make_check(B, "surjective", next(surjective(), None), rng))

    def fiber_sums():
        for n in range(L):
            for pt in T.objects(n):
                p = pi[pt]
                got = defaultdict(int)
                for qt, rec in T.covers(pt):
                    got[pi[qt]] += rec.u
                want = {q: rec.u for q, rec in B.covers(p)}
                for q in sorted(set(got) | set(want), key=lambda k: k.encoding):
                    if got.get(q, 0) != want.get(q, 0):
                        yield {"cover_object": str(pt), "base_target": str(q),
                               "fiber_sum": got.get(q, 0), "u": want.get(q, 0)}

    rep.checks.append(make_check(B, "fiber_sum", next(fiber_sums(), None), (0, L - 1)))

    def simple():
        for n in range(1, L + 1):
            for qt in T.objects(n):
                ins = T.covered(qt)
                if len(ins) != 1 or ins[0][1].u != 1 or ins[0][1].d != 1:
                    yield {"cover_object": str(qt), "in_degree": len(ins)}

    rep.checks.append(make_check(B, "simple", next(simple(), None), rng))

    def fiber_law():
        u0 = multiplicities_from_zero(B)
        sizes = defaultdict(int)
        for p in T.all_objects():
            sizes[pi[p]] += 1
        for n in range(L + 1):
            for q in B.objects(n):
                if sizes.get(q, 0) != u0[q]:
                    yield {"base_object": str(q), "fiber": sizes.get(q, 0), "u(0;p)": str(u0[q])}

    rep.checks.append(make_check(B, "fiber_law", next(fiber_law(), None), rng))
    return rep


def fibers(cmap: CoveringMapData) -> dict:
    out = defaultdict(list)
    for p in cmap.total.all_objects():
        out[cmap.projection[p]].append(p)
    return dict(out)


# ------------------------------------------------------------------ decoders

DECODABLE = ("young", "kingman_up", "kingman_down", "compositions", "planar_trees")

_GENERATORS = {
    "young": Young,
    "kingman_up": Kingman,
    "kingman_down": Kingman,
    "compositions": Compositions,
    "planar_trees": PlanarTrees,
}


def _steps(gen, chain: ChainObject, side="up"):
    """Yield (step number, source, target, representative morphism)."""
    prev = gen.key(())
    for n, (target, idx) in enumerate(chain.arrows, start=1):
        if target.tag != gen.tag or target.level != n:
            raise ArgumentError(f"chain step {n} lands on {target!r}")
        reps = gen.arrow_representatives(prev, target, side)
        if not 0 <= idx < len(reps):
            raise ArgumentError(f"arrow index {idx} out of range at step {n}")
        yield n, prev, target, reps[idx]
        prev = target


def _decode_young(chain):
    rows: list = []
    for n, lam, mu, _ in _steps(Young(), chain):
        lam, mu = lam.encoding, mu.encoding
        i = next(i for i in range(len(mu)) if i >= len(lam) or mu[i] != lam[i])
        if i == len(rows):
            rows.append([])
        rows[i].append(n)
    return tuple(tuple(r) for r in rows)


def _decode_compositions(chain):
    s: tuple = ()
    for n, I, J, f in _steps(Compositions(), chain):
        I, J = I.encoding, J.encoding
        if len(J) == len(I):
            q = next(a for a in range(len(I)) if I[a] != J[a]) + 1
            s = s + (q,)
        else:
            q = next(j for j in range(1, len(J) + 1) if j not in f)
            s = tuple(f[a - 1] for a in s) + (q,)
    return s


def _decode_planar(chain):
    labels: tuple = ()
    for n, _, g, image in _steps(PlanarTrees(), chain):
        new = [n] * len(g.encoding)
        for i, j in enumerate(image):
            new[j - 1] = labels[i]
        labels = tuple(new)
    return labels


def _decode_kingman_up(chain):
    blocks: list = []
    for n, lam, mu, f in _steps(Kingman(), chain, "up"):
        lam, mu = lam.encoding, mu.encoding
        if len(mu) == len(lam) + 1:
            blocks.append(frozenset({n}))
            continue
        i = next(i for i in range(len(lam)) if lam[i] < mu[f[i] - 1])
        grown = blocks[i] | {n}
        rest = blocks[:i] + blocks[i + 1:]
        m = max((j for j in range(i) if len(rest[j]) >= len(grown)), default=-1)
        blocks = rest[:m + 1] + [grown] + rest[m + 1:]
    return tuple(tuple(sorted(b)) for b in blocks)


def _decode_kingman_down(chain):
    s: tuple = ()
    for n, lam, mu, f in _steps(Kingman(), chain, "down"):
        lam, mu = lam.encoding, mu.encoding
        inv = {j: a + 1 for a, j in enumerate(f)}  # position in mu -> part index of lam

        def src_size(j):
            return lam[inv[j] - 1] if j in inv else None

        i = next(j for j in range(1, len(mu) + 1)
                 if j not in inv or src_size(j) < mu[j - 1])
        S = [j for j in range(i + 1, len(mu) + 1) if src_size(j) == mu[i - 1]]
        if S and S != list(range(i + 1, S[-1] + 1)):
            raise InvariantError(
                f"kingman_down decoding: shift set {S} after position {i} is not contiguous "
                f"({lam} -> {mu}, morphism {f})")
        if S:
            l = S[-1]

            def sigma(a):
                if i <= a <= l - 1:
                    return a + 1
                if a == l:
                    return i
                return a
        else:
            def sigma(a):
                return a
        s = tuple(sigma(a) for a in s) + (i,)
    return s


_DECODERS = {
    "young": _decode_young,
    "kingman_up": _decode_kingman_up,
    "kingman_down": _decode_kingman_down,
    "compositions": _decode_compositions,
    "planar_trees": _decode_planar,
}


def decode_cover(family: str, chain) -> tuple:
    """Named combinatorial object for a chain of the universal cover.

    young -> standard Young tableau (rows); kingman_up -> ordered set partition;
    kingman_down -> sequence with weakly decreasing value multiplicities;
    compositions -> Cayley permutation; planar_trees -> multiset permutation of
    {1,1,...,n,n}.
    """
    if isinstance(chain, ObjectKey):
        chain = ChainObject.from_key(chain)
    if family in ("rooted_trees", "rooted_trees_down", "rooted_trees_up"):
        raise UnsupportedError(
            "no decoder for rooted-tree covers: a simple description of the down cover "
            "is an open problem, and the raw chain objects remain available")
    if family not in _DECODERS:
        raise UnsupportedError(f"no decoder for family {family!r}; choose from {DECODABLE}")
    return _DECODERS[family](chain)


def format_decoded(family: str, obj) -> str:
    if family == "young":
        return "/".join("".join(map(str, r)) if all(x < 10 for x in r) else ",".join(map(str, r))
                        for r in obj) or "()"
    if family == "kingman_up":
        return "".join("{" + ",".join(map(str, b)) + "}" for b in obj) or "()"
    return "(" + ",".join(map(str, obj)) + ")"


def chain_from_morphisms(family: str, targets, morphisms) -> ChainObject:
    """Chain whose i-th arrow is the given morphism into ``targets[i]``."""
    gen = _GENERATORS[family]()
    side = "down" if family == "kingman_down" else "up"
    prev = gen.key(())
    arrows = []
    for t, h in zip(targets, morphisms):
        t = t if isinstance(t, ObjectKey) else gen.key(tuple(t))
        reps = gen.arrow_representatives(prev, t, side)
        if gen.unilateral:
            if tuple(h) not in reps:
                raise ArgumentError(f"{h} is not a morphism {prev} -> {t}")
            idx = reps.index(tuple(h))
        else:
            key = gen.hom_class_key(prev, t, tuple(h), side)
            keys = [gen.hom_class_key(prev, t, r, side) for r in reps]
            if key not in keys:
                raise ArgumentError(f"{h} is not a morphism {prev} -> {t}")
            idx = keys.index(key)
        arrows.append((t, idx))
        prev = t
    return ChainObject(tuple(arrows))
