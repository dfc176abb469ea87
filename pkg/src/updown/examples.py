"""Generators for the ten example categories.

Each generator enumerates the canonical objects of a level, knows the order
of each automorphism group, and emits the covering records of an object.
Where the morphisms are small enough to list, ``homs(p, q)`` enumerates them
by brute force straight from the definition; that is the hom oracle the
verification layer compares against the closed forms.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial, prod

from .core import (CoveringRecord, ObjectKey, RankedStructure, build_truncation,
                   product_structure)
from .errors import ArgumentError, InvariantError, ResourceError, UnsupportedError

DEFAULT_CAPS = {
    "two_chain": 8,
    "subsets": 8,
    "symmetric_chain": 8,
    "monomials": 8,
    "necklaces": 7,
    "young": 8,
    "kingman": 8,
    "compositions": 8,
    "planar_trees": 7,
    "rooted_trees": 7,
}

REQUIRED_PARAMS = {"subsets": ("n",), "monomials": ("n",), "necklaces": ("c",)}

# Highest target level at which brute-force morphism counting stays cheap.
HOM_ORACLE_LEVELS = {
    "two_chain": 8,
    "subsets": 8,
    "symmetric_chain": 7,
    "monomials": 6,
    "necklaces": 6,
    "young": 8,
    "kingman": 6,
    "compositions": 7,
    "planar_trees": 6,
    "rooted_trees": 6,
}


class ExampleGenerator:
    tag = ""
    unilateral = False

    def __init__(self, level_cap=None, **params):
        self.params = params
        default = DEFAULT_CAPS[self.tag]
        if level_cap is not None and level_cap > default:
            raise ArgumentError(f"{self.tag}: level caps may only be lowered (default {default})")
        self.level_cap = default if level_cap is None else level_cap

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{type(self).__name__}({ps})"

    def key(self, encoding) -> ObjectKey:
        return ObjectKey(self.tag, encoding, self.rank(encoding))

    def _own(self, p: ObjectKey) -> ObjectKey:
        if not isinstance(p, ObjectKey) or p.tag != self.tag:
            raise ArgumentError(f"{p!r} is not a {self.tag} object")
        return p

    def canonical(self, encoding):
        return encoding

    def rank(self, encoding) -> int:
        raise NotImplementedError

    def enumerate_level(self, n: int) -> list:
        if n > self.level_cap:
            raise ResourceError(f"{self.tag}: level {n} exceeds the level cap {self.level_cap}")
        return sorted((self.key(e) for e in self._level(n)), key=lambda k: k.encoding)

    def _level(self, n):
        raise NotImplementedError

    def aut_order(self, p: ObjectKey) -> int:
        self._own(p)
        return 1

    def coverings(self, p: ObjectKey) -> list:
        raise NotImplementedError

    def homs(self, p: ObjectKey, q: ObjectKey) -> list:
        raise UnsupportedError(f"{self.tag} has no morphism enumerator")

    def hom_count(self, p: ObjectKey, q: ObjectKey) -> int:
        self._own(p)
        self._own(q)
        if q.level != p.level + 1:
            raise ArgumentError("hom counting is only defined between adjacent levels")
        return len(self.homs(p, q))

    def arrow_representatives(self, p: ObjectKey, q: ObjectKey, side: str = "up") -> list:
        """One morphism per arrow of the unilateral quotient, in canonical order.

        Classes are listed by their lexicographically least member, which is
        also the representative returned.
        """
        hs = self.homs(p, q)
        if self.unilateral:
            return hs
        seen = {}
        for f in hs:
            seen.setdefault(self.hom_class_key(p, q, f, side), f)
        return list(seen.values())

    def hom_class_key(self, p, q, f, side):
        raise UnsupportedError(f"{self.tag} has no morphism class keys")

    def _record(self, p, q, u, d) -> CoveringRecord:
        if u * self.aut_order(q) != d * self.aut_order(p):
            raise InvariantError(f"{self.tag}: u*|Aut q| != d*|Aut p| at ({p}, {q})")
        return CoveringRecord(u, d)


# ------------------------------------------------------------- two chain

class TwoChain(ExampleGenerator):
    """Levels 0 and 1 only, one object each."""

    tag = "two_chain"
    unilateral = True

    def rank(self, e):
        return e[0]

    def _level(self, n):
        return [(n,)] if n <= 1 else []

    def coverings(self, p):
        self._own(p)
        return [(self.key((1,)), CoveringRecord(1, 1))] if p.encoding == (0,) else []

    def homs(self, p, q):
        return [()] if p.encoding == (0,) and q.encoding == (1,) else []


class SymmetricChain(ExampleGenerator):
    """One object ``[n]`` per level; morphisms are injections, Aut[n] is the symmetric group."""

    tag = "symmetric_chain"

    def rank(self, e):
        return e[0]

    def _level(self, n):
        return [(n,)]

    def aut_order(self, p):
        self._own(p)
        return factorial(p.level)

    def coverings(self, p):
        n = self._own(p).level
        return [(self.key((n + 1,)), self._record(p, self.key((n + 1,)), 1, n + 1))]

    def homs(self, p, q):
        return list(permutations(range(1, q.level + 1), p.level))

    def hom_class_key(self, p, q, f, side):
        if side == "up":
            return ()
        return tuple(sorted(set(range(1, q.level + 1)) - set(f)))


# -------------------------------------------------- product-backed powers

def _flatten(key: ObjectKey) -> tuple:
    if key.tag == "product":
        a, b = key.encoding
        return _flatten(a) + _flatten(b)
    return tuple(key.encoding)


def power_structure(base: RankedStructure, n: int) -> RankedStructure:
    """``base`` to the n-th Cartesian power, objects as nested pairs."""
    if n < 1:
        raise ArgumentError("power exponent must be positive")
    S = base
    for _ in range(n - 1):
        S = product_structure(S, base)
    return S


class _PowerFamily(ExampleGenerator):
    base_cls: type = ExampleGenerator

    def __init__(self, level_cap=None, n=None):
        if n is None or n < 1:
            raise ArgumentError(f"{self.tag} needs a positive parameter n")
        super().__init__(level_cap, n=n)
        self.n = n
        self.base = self.base_cls()

    def rank(self, e):
        return sum(e)

    def build(self, max_level: int) -> RankedStructure:
        base = build_truncation(self.base, max_level, force=True)
        P = power_structure(base, self.n)
        return P.relabel(lambda k: self.key(_flatten(k)), family=self.tag, params=self.params)

    def enumerate_level(self, n):
        if n > self.level_cap:
            raise ResourceError(f"{self.tag}: level {n} exceeds the level cap {self.level_cap}")
        return list(self.build(n).objects(n))

    def aut_order(self, p):
        return self.build(self._own(p).level).aut(p)

    def coverings(self, p):
        S = self.build(self._own(p).level + 1)
        return list(S.covers(p))


class Subsets(_PowerFamily):
    """Subsets of {1..n} as the n-th power of the two-element chain."""

    tag = "subsets"
    unilateral = True
    base_cls = TwoChain

    def hom_count(self, p, q):
        self._own(p)
        self._own(q)
        if q.level != p.level + 1:
            raise ArgumentError("hom counting is only defined between adjacent levels")
        return int(all(a <= b for a, b in zip(p.encoding, q.encoding)))


class Monomials(_PowerFamily):
    """Monomials in n commuting variables as the n-th power of the symmetric chain."""

    tag = "monomials"
    base_cls = SymmetricChain

    def hom_count(self, p, q):
        self._own(p)
        self._own(q)
        if q.level != p.level + 1:
            raise ArgumentError("hom counting is only defined between adjacent levels")
        total = 1
        for a, b in zip(p.encoding, q.encoding):
            if b < a:
                return 0
            # injections [a] -> [b], enumerated
            total *= sum(1 for _ in permutations(range(b), a))
        return total


class SubsetsDirect(ExampleGenerator):
    """Direct subset lattice; cross-check for the product-backed family."""

    tag = "subsets"
    unilateral = True

    def __init__(self, level_cap=None, n=None):
        super().__init__(level_cap, n=n)
        self.n = n

    def rank(self, e):
        return sum(e)

    def _level(self, m):
        return [tuple(1 if i in s else 0 for i in range(self.n))
                for s in combinations(range(self.n), m)]

    def coverings(self, p):
        out = []
        for i, x in enumerate(p.encoding):
            if not x:
                q = self.key(p.encoding[:i] + (1,) + p.encoding[i + 1:])
                out.append((q, CoveringRecord(1, 1)))
        return out


class MonomialsDirect(ExampleGenerator):
    """Direct monomial poset; cross-check for the product-backed family."""

    tag = "monomials"

    def __init__(self, level_cap=None, n=None):
        super().__init__(level_cap, n=n)
        self.n = n

    def rank(self, e):
        return sum(e)

    def _level(self, m):
        def comps(total, slots):
            if slots == 1:
                yield (total,)
                return
            for first in range(total + 1):
                for rest in comps(total - first, slots - 1):
                    yield (first,) + rest
        return list(comps(m, self.n))

    def aut_order(self, p):
        return prod(factorial(i) for i in self._own(p).encoding)

    def coverings(self, p):
        out = []
        for i, x in enumerate(p.encoding):
            q = self.key(p.encoding[:i] + (x + 1,) + p.encoding[i + 1:])
            out.append((q, self._record(p, q, 1, x + 1)))
        return out


# ---------------------------------------------------------------- necklaces

def _rotations(seq):
    return [tuple(seq[i:]) + tuple(seq[:i]) for i in range(len(seq))] or [tuple(seq)]


def necklace_canonical(seq) -> tuple:
    return min(_rotations(tuple(seq)))


def _cyclically_increasing(h) -> bool:
    return any(all(r[i] < r[i + 1] for i in range(len(r) - 1)) for r in _rotations(h))


class Necklaces(ExampleGenerator):
    """Necklaces of m beads in c colors (beads 0..c-1), stored as the lex-least rotation."""

    tag = "necklaces"

    def __init__(self, level_cap=None, c=None):
        if c is None or c < 1:
            raise ArgumentError("necklaces need a positive parameter c")
        super().__init__(level_cap, c=c)
        self.c = c

    def canonical(self, e):
        return necklace_canonical(e)

    def rank(self, e):
        return len(e)

    def _level(self, m):
        return sorted({necklace_canonical(w) for w in _words(self.c, m)})

    def aut_order(self, p):
        e = self._own(p).encoding
        if not e:
            return 1
        return sum(1 for r in _rotations(e) if r == e)

    @staticmethod
    def _deletions(e, target) -> int:
        return sum(1 for x in range(len(e))
                   if necklace_canonical(e[x + 1:] + e[:x]) == target)

    def coverings(self, p):
        e = self._own(p).encoding
        covers = sorted({necklace_canonical(e[:i] + (col,) + e[i:])
                         for i in range(max(len(e), 1)) for col in range(self.c)})
        out = []
        for g in covers:
            q = self.key(g)
            d = self._deletions(g, e)
            num = self.aut_order(p) * d
            if num % self.aut_order(q):
                raise InvariantError(f"necklaces: non-integral u at ({p}, {q})")
            out.append((q, self._record(p, q, num // self.aut_order(q), d)))
        return out

    def homs(self, p, q, rep_p=None, rep_q=None):
        """Cyclic-order-preserving injections h with f = g∘h, for chosen representatives."""
        f = tuple(p.encoding if rep_p is None else rep_p)
        g = tuple(q.encoding if rep_q is None else rep_q)
        if necklace_canonical(f) != p.encoding or necklace_canonical(g) != q.encoding:
            raise ArgumentError("representative does not belong to the necklace class")
        m, n = len(f), len(g)
        out = []
        for h in permutations(range(n), m):
            if all(f[a] == g[h[a]] for a in range(m)) and _cyclically_increasing(h):
                out.append(h)
        return out

    def hom_class_key(self, p, q, h, side):
        # up: orbit under rotations of the target; down: under rotations of the source
        m, n = p.level, q.level
        if side == "up":
            return min(tuple((x + s) % n for x in h) for s in range(n)
                       if all(q.encoding[(x + s) % n] == q.encoding[x] for x in range(n)))
        return min(h[s:] + h[:s] for s in range(max(m, 1))
                   if tuple(p.encoding[(a + s) % m] for a in range(m)) == p.encoding)


def _words(c, m):
    if m == 0:
        yield ()
        return
    for w in _words(c, m - 1):
        for col in range(c):
            yield w + (col,)


# ------------------------------------------------------------- partitions

def partitions_of(n: int, largest=None):
    """Partitions of n as weakly decreasing tuples, reverse lexicographic."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions_of(n - first, first):
            yield (first,) + rest


def multiplicity(parts, k) -> int:
    return sum(1 for x in parts if x == k)


class Young(ExampleGenerator):
    """Young's lattice: one morphism lambda -> mu exactly when the diagrams nest."""

    tag = "young"
    unilateral = True

    def canonical(self, e):
        return tuple(sorted(e, reverse=True))

    def rank(self, e):
        return sum(e)

    def _level(self, n):
        return list(partitions_of(n))

    @staticmethod
    def box_additions(lam):
        out = []
        for i in range(len(lam) + 1):
            prev = lam[i - 1] if i else None
            cur = lam[i] if i < len(lam) else 0
            if prev is None or prev > cur:
                out.append(lam[:i] + (cur + 1,) + lam[i + 1:])
        return out

    def coverings(self, p):
        self._own(p)
        return [(self.key(m), CoveringRecord(1, 1)) for m in self.box_additions(p.encoding)]

    def homs(self, p, q):
        lam, mu = p.encoding, q.encoding
        if len(lam) > len(mu):
            return []
        return [()] if all(a <= b for a, b in zip(lam, mu)) else []


class Kingman(ExampleGenerator):
    """Partitions with part-size-respecting injections; d is Kingman's branching."""

    tag = "kingman"

    canonical = Young.canonical
    rank = Young.rank
    _level = Young._level

    def aut_order(self, p):
        lam = self._own(p).encoding
        return prod(factorial(v) for v in Counter(lam).values())

    def coverings(self, p):
        lam = self._own(p).encoding
        out = []
        new = self.canonical(lam + (1,))
        out.append((self.key(new), self._record(p, self.key(new), 1, multiplicity(new, 1))))
        for k in sorted(set(lam), reverse=True):
            i = lam.index(k)
            mu = self.canonical(lam[:i] + (k + 1,) + lam[i + 1:])
            q = self.key(mu)
            out.append((q, self._record(p, q, multiplicity(lam, k), multiplicity(mu, k + 1))))
        return out

    def homs(self, p, q):
        lam, mu = p.encoding, q.encoding
        return [f for f in permutations(range(1, len(mu) + 1), len(lam))
                if all(lam[i] <= mu[f[i] - 1] for i in range(len(lam)))]

    def hom_class_key(self, p, q, f, side):
        lam, mu = p.encoding, q.encoding
        if side == "up":
            return tuple(mu[j - 1] for j in f)
        inv = {j: i for i, j in enumerate(f)}
        return tuple(lam[inv[j]] if j in inv else 0 for j in range(1, len(mu) + 1))


# ------------------------------------------------------------ compositions

def compositions_of(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions_of(n - first):
            yield (first,) + rest


class Compositions(ExampleGenerator):
    """Integer compositions with order-preserving dominated injections."""

    tag = "compositions"
    unilateral = True

    def rank(self, e):
        return sum(e)

    def _level(self, n):
        return list(compositions_of(n))

    def coverings(self, p):
        I = self._own(p).encoding
        counts = Counter()
        for i in range(len(I)):
            counts[I[:i] + (I[i] + 1,) + I[i + 1:]] += 1
        for i in range(len(I) + 1):
            counts[I[:i] + (1,) + I[i:]] += 1
        return [(self.key(J), CoveringRecord(c, c)) for J, c in sorted(counts.items())]

    def homs(self, p, q):
        I, J = p.encoding, q.encoding
        return [f for f in combinations(range(1, len(J) + 1), len(I))
                if all(I[a] <= J[f[a] - 1] for a in range(len(I)))]


# ----------------------------------------------------------- planar trees

def dyck_words(n: int):
    """Dyck words of semilength n over {+1, -1}."""
    def rec(prefix, ups, height):
        if len(prefix) == 2 * n:
            yield tuple(prefix)
            return
        if ups < n:
            yield from rec(prefix + [1], ups + 1, height + 1)
        if height > 0:
            yield from rec(prefix + [-1], ups, height - 1)
    return rec([], 0, 0)


def terminal_count(word) -> int:
    """Non-root leaves of the planar tree: adjacent (+1, -1) pairs."""
    return sum(1 for a, b in zip(word, word[1:]) if a == 1 and b == -1)


class PlanarTrees(ExampleGenerator):
    """Planar rooted trees as Dyck words; a cover inserts a (+1, -1) pair."""

    tag = "planar_trees"
    unilateral = True

    def canonical(self, e):
        s = 0
        for x in e:
            s += x
            if s < 0:
                raise InvariantError(f"not a Dyck word: {e}")
        if s:
            raise InvariantError(f"not a Dyck word: {e}")
        return tuple(e)

    def rank(self, e):
        return len(e) // 2

    def _level(self, n):
        return list(dyck_words(n))

    def coverings(self, p):
        w = self._own(p).encoding
        counts = Counter(w[:i] + (1, -1) + w[i:] for i in range(len(w) + 1))
        return [(self.key(g), CoveringRecord(c, c)) for g, c in sorted(counts.items())]

    def homs(self, p, q):
        """Order-preserving h: [2n] -> [2n+2] (images 1-based) whose two missing
        values k, k+1 are consecutive and carry (+1, -1) in q, with f = g∘h."""
        f, g = p.encoding, q.encoding
        out = []
        for k in range(1, len(g)):
            if g[k - 1] != 1 or g[k] != -1:
                continue
            image = tuple(j for j in range(1, len(g) + 1) if j not in (k, k + 1))
            if all(f[i] == g[image[i] - 1] for i in range(len(f))):
                out.append(image)
        return sorted(out)


# ------------------------------------------------------------ rooted trees

def _ser(node) -> str:
    return "(" + "".join(sorted(_ser(c) for c in node)) + ")"


def canonicalize_rooted_tree(raw) -> str:
    """Canonical parenthesis string of a rooted tree given as nested child lists.

    A node serializes as ``(`` + sorted child serializations + ``)``.  Two raw
    trees get the same string exactly when they are isomorphic.
    A string argument is parsed first, so the function is idempotent.
    """
    if isinstance(raw, str):
        raw = parse_rooted_tree(raw)
    return _ser(raw)


@lru_cache(maxsize=None)
def parse_rooted_tree(s: str) -> tuple:
    """Nested tuple of children for a parenthesis string."""
    stack = [[]]
    for ch in s:
        if ch == "(":
            stack.append([])
        elif ch == ")":
            node = tuple(stack.pop())
            stack[-1].append(node)
        else:
            raise ArgumentError(f"bad character {ch!r} in rooted tree {s!r}")
    if len(stack) != 1 or len(stack[0]) != 1:
        raise ArgumentError(f"unbalanced rooted tree {s!r}")
    return stack[0][0]


@lru_cache(maxsize=None)
def rooted_tree_aut(s: str) -> int:
    node = parse_rooted_tree(s)
    kids = [_ser(c) for c in node]
    total = prod(factorial(m) for m in Counter(kids).values())
    for k in kids:
        total *= rooted_tree_aut(k)
    return total


def _attach_everywhere(node):
    yield node + ((),)
    for i, c in enumerate(node):
        for c2 in _attach_everywhere(c):
            yield node[:i] + (c2,) + node[i + 1:]


def _delete_leaves(node):
    for i, c in enumerate(node):
        if not c:
            yield node[:i] + node[i + 1:]
        else:
            for c2 in _delete_leaves(c):
                yield node[:i] + (c2,) + node[i + 1:]


def _parents(node) -> list:
    """Parent array, vertex 0 the root."""
    par = [None]

    def walk(n, me):
        for c in n:
            par.append(me)
            walk(c, len(par) - 1)

    walk(node, 0)
    return par


class RootedTrees(ExampleGenerator):
    """Rooted trees ranked by non-root vertex count."""

    tag = "rooted_trees"
    oracle_max_vertices = 7

    def canonical(self, e):
        return canonicalize_rooted_tree(e)

    def rank(self, e):
        return len(e) // 2 - 1

    def _level(self, n):
        trees = {"()"}
        for _ in range(n):
            trees = {_ser(t2) for t in trees for t2 in _attach_everywhere(parse_rooted_tree(t))}
        return sorted(trees)

    def aut_order(self, p):
        return rooted_tree_aut(self._own(p).encoding)

    def coverings(self, p):
        s = self._own(p).encoding
        ups = Counter(_ser(t) for t in _attach_everywhere(parse_rooted_tree(s)))
        out = []
        for t, u in sorted(ups.items()):
            d = sum(1 for r in _delete_leaves(parse_rooted_tree(t)) if _ser(r) == s)
            out.append((self.key(t), self._record(p, self.key(t), u, d)))
        return out

    def hom_count(self, p, q):
        """Brute force: injective vertex maps fixing the root and preserving parents."""
        self._own(p)
        self._own(q)
        if q.level != p.level + 1:
            raise ArgumentError("hom counting is only defined between adjacent levels")
        P = _parents(parse_rooted_tree(p.encoding))
        Q = _parents(parse_rooted_tree(q.encoding))
        if len(Q) > self.oracle_max_vertices + 1:
            raise UnsupportedError("rooted-tree hom oracle is limited to small trees")
        count = 0
        for img in permutations(range(1, len(Q)), len(P) - 1):
            f = (0,) + img
            if all(Q[f[v]] == f[P[v]] for v in range(1, len(P))):
                count += 1
        return count


# ---------------------------------------------------------------- registry

FAMILIES = {
    "two_chain": TwoChain,
    "subsets": Subsets,
    "symmetric_chain": SymmetricChain,
    "monomials": Monomials,
    "necklaces": Necklaces,
    "young": Young,
    "kingman": Kingman,
    "compositions": Compositions,
    "planar_trees": PlanarTrees,
    "rooted_trees": RootedTrees,
}


def make_generator(tag: str, level_cap=None, **params) -> ExampleGenerator:
    try:
        cls = FAMILIES[tag]
    except KeyError:
        raise ArgumentError(f"unknown example family {tag!r}; choose from {sorted(FAMILIES)}") from None
    need = REQUIRED_PARAMS.get(tag, ())
    missing = [k for k in need if k not in params]
    extra = [k for k in params if k not in need]
    if missing:
        raise ArgumentError(f"{tag} needs parameter(s) {', '.join(missing)}")
    if extra:
        raise ArgumentError(f"{tag} takes no parameter(s) {', '.join(extra)}")
    return cls(level_cap, **params)


def enumerate_level(g: ExampleGenerator, n: int) -> list:
    return g.enumerate_level(n)


def aut_order(g: ExampleGenerator, p: ObjectKey) -> int:
    return g.aut_order(p)


def coverings(g: ExampleGenerator, p: ObjectKey) -> list:
    return g.coverings(p)


def hom_count(g: ExampleGenerator, p: ObjectKey, q: ObjectKey) -> int:
    return g.hom_count(p, q)


def hom_oracle(g: ExampleGenerator):
    """Adjacent-level hom counter for ``verify_structure``, or None."""
    if isinstance(g, (TwoChain, SymmetricChain, Necklaces, Young, Kingman, Compositions,
                      PlanarTrees, RootedTrees, Subsets, Monomials)):
        return g.hom_count
    return None
