"""Commutation conditions on [D, U] and the enumeration identities they imply."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Optional

from .core import (CheckResult, FormalVector, ObjectKey, RankedStructure, VerificationReport,
                   down_apply, extended_multiplicity, inner_product, make_check,
                   multiplicities_from_zero, up_apply, up_power)
from .errors import ArgumentError, PreconditionError
from .examples import multiplicity, terminal_count

ACC, LCC, SCC, WCC, NONE = "ACC", "LCC", "SCC", "WCC", "NONE"
_STRENGTH = {ACC: 4, LCC: 3, SCC: 2, WCC: 1, NONE: 0}


def commutator(S: RankedStructure, p: ObjectKey) -> FormalVector:
    """(DU - UD) p, exact."""
    b = FormalVector.basis(p)
    return down_apply(S, up_apply(S, b)) - up_apply(S, down_apply(S, b))


@dataclass
class CommutatorReport:
    """Eigenvalue data of [D, U] on levels ``0..verified_through_level``.

    ``epsilon[p]`` is None when p is not an eigenvector; ``classification`` is
    the strongest condition consistent with the realized levels, never a proof.
    """

    epsilon: dict
    classification: str
    verified_through_level: int
    r: Optional[Fraction] = None
    slope: Optional[Fraction] = None
    intercept: Optional[Fraction] = None
    level_values: dict = field(default_factory=dict)
    counterexample: Optional[tuple] = None  # (p, (DU-UD)p)

    def satisfies(self, condition: str) -> bool:
        return _STRENGTH[self.classification] >= _STRENGTH[condition]

    def sequence(self) -> dict:
        """Per-level eigenvalue r_i for SCC-or-better structures."""
        if not self.satisfies(SCC):
            raise PreconditionError(f"no level sequence: classification is {self.classification}")
        return dict(self.level_values)

    def summary(self) -> str:
        through = f"(consistent through level {self.verified_through_level})"
        c = self.classification
        if c == ACC:
            head = f"ACC r={_fmt(self.r)}"
        elif c == LCC:
            head = f"LCC a={_fmt(self.slope)} b={_fmt(self.intercept)}"
        elif c == SCC:
            seq = ",".join(_fmt(self.level_values[i]) for i in sorted(self.level_values))
            head = f"SCC r=({seq})"
        elif c == WCC:
            head = "WCC"
        else:
            p, v = self.counterexample
            terms = " + ".join(f"{_fmt(cf)}*{k}" for k, cf in v.sorted_items())
            head = f"NONE: (DU-UD)({p}) = {terms}"
        return f"{head} {through}"

    def to_dict(self) -> dict:
        d = {
            "classification": self.classification,
            "verified_through_level": self.verified_through_level,
            "excluded": f"objects at the truncation level {self.verified_through_level + 1} "
                        "are excluded because U is cut off there",
            "epsilon": [{"object": str(p), "level": p.level,
                         "epsilon": None if e is None else _fmt(e)}
                        for p, e in sorted(self.epsilon.items(),
                                           key=lambda kv: (kv[0].level, kv[0].encoding))],
        }
        if self.r is not None:
            d["r"] = _fmt(self.r)
        if self.slope is not None:
            d["a"], d["b"] = _fmt(self.slope), _fmt(self.intercept)
        if self.level_values:
            d["r_sequence"] = [_fmt(self.level_values[i]) for i in sorted(self.level_values)]
        if self.counterexample is not None:
            p, v = self.counterexample
            d["counterexample"] = {"object": str(p),
                                   "commutator": {str(k): _fmt(c) for k, c in v.sorted_items()}}
        return d


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def commutator_classify(S: RankedStructure) -> CommutatorReport:
    """Strongest of ACC / LCC / SCC / WCC consistent with levels below the truncation."""
    if S.max_level < 2:
        raise ArgumentError("classification needs max_level >= 2")
    top = S.max_level - 1
    eps = {}
    first_bad = None
    for n in range(top + 1):
        for p in S.objects(n):
            v = commutator(S, p)
            if set(v) <= {p}:
                eps[p] = v.coeff(p)
            else:
                eps[p] = None
                if first_bad is None:
                    first_bad = (p, v)
    rep = CommutatorReport(eps, NONE, top, counterexample=first_bad)
    if first_bad is not None:
        return rep
    per_level = {}
    scc = True
    for p, e in eps.items():
        if per_level.setdefault(p.level, e) != e:
            scc = False
    if not scc:
        rep.classification = WCC
        return rep
    rep.level_values = per_level
    values = set(per_level.values())
    if len(values) == 1:
        rep.classification = ACC
        rep.r = values.pop()
        rep.slope, rep.intercept = Fraction(0), rep.r
        return rep
    pts = sorted(per_level.items())
    (i0, r0), (i1, r1) = pts[0], pts[1]
    a = Fraction(r1 - r0, i1 - i0)
    b = r0 - a * i0
    if all(a * i + b == r for i, r in pts):
        rep.classification = LCC
        rep.slope, rep.intercept = a, b
    else:
        rep.classification = SCC
    return rep


def esum_check(S: RankedStructure, c: ObjectKey) -> Fraction:
    """sum_{c' > c} u d - sum_{c'' < c} u d over the covering records at c."""
    if c.level >= S.max_level:
        raise ArgumentError("esum needs |c| below the truncation level")
    up = sum(r.u * r.d for _, r in S.covers(c))
    down = sum(r.u * r.d for _, r in S.covered(c))
    return Fraction(up - down)


# ------------------------------------------------------------ closed forms

def _eps_young(p, params):
    return 1


def _eps_symmetric(p, params):
    return 1


def _eps_monomials(p, params):
    return params["n"]


def _eps_subsets(p, params):
    return params["n"] - 2 * p.level


def _eps_two_chain(p, params):
    return 1 - 2 * p.level


def _eps_necklace_one(p, params):
    if params.get("c") != 1:
        raise ArgumentError("necklaces have a closed-form eigenvalue only for c = 1")
    return p.level


def _eps_kingman(p, params):
    return 1 + multiplicity(p.encoding, 1)


def _eps_compositions(p, params):
    return len(p.encoding) + 2 * multiplicity(p.encoding, 1) + 1


def _eps_planar(p, params):
    return 2 * p.level + terminal_count(p.encoding) + 1


def _eps_rooted(p, params):
    return p.level + 1


EPSILON_FORMULAS = {
    "young": _eps_young,
    "symmetric_chain": _eps_symmetric,
    "monomials": _eps_monomials,
    "subsets": _eps_subsets,
    "two_chain": _eps_two_chain,
    "necklaces": _eps_necklace_one,
    "kingman": _eps_kingman,
    "compositions": _eps_compositions,
    "planar_trees": _eps_planar,
    "rooted_trees": _eps_rooted,
}


def epsilon_formula_check(S: RankedStructure, family: Optional[str] = None) -> CheckResult:
    """Compare the measured eigenvalue of [D, U] with the family's closed form."""
    family = family or S.family
    if family not in EPSILON_FORMULAS:
        raise ArgumentError(f"no closed-form eigenvalue for family {family!r}")
    formula = EPSILON_FORMULAS[family]
    formula(S.zero, S.params)
    failure = None
    for n in range(S.max_level):
        for p in S.objects(n):
            v = commutator(S, p)
            want = formula(p, S.params)
            if v != FormalVector.basis(p, want):
                failure = {"object": str(p), "expected": _fmt(want),
                           "commutator": {str(k): _fmt(c) for k, c in v.sorted_items()}}
                break
        if failure:
            break
    return make_check(S, "epsilon_formula", failure, (0, S.max_level - 1))


# ------------------------------------------------------------------ words

def _parse_word(w) -> str:
    w = "".join(w).upper()
    if set(w) - {"U", "D"}:
        raise ArgumentError(f"words are over U and D, got {w!r}")
    return w


def word_suffix_constants(w) -> dict:
    """``{i: c_i}`` for every D position i (1-based), counted from the suffix."""
    w = _parse_word(w)
    s = len(w)
    out = {}
    for i in range(1, s + 1):
        if w[i - 1] == "D":
            ups = sum(1 for j in range(i + 1, s + 1) if w[j - 1] == "U")
            downs = sum(1 for j in range(i, s + 1) if w[j - 1] == "D")
            out[i] = ups - downs
    return out


def is_valid_word(w, level: int) -> bool:
    w = _parse_word(w)
    if w.count("U") - w.count("D") != level:
        return False
    for i in range(len(w)):
        suf = w[i:]
        if suf.count("D") > suf.count("U"):
            return False
    return True


@dataclass
class WordResult:
    value: Fraction
    predicted: Optional[Fraction] = None

    @property
    def match(self) -> Optional[bool]:
        return None if self.predicted is None else self.predicted == self.value


def apply_word(S: RankedStructure, w, v) -> FormalVector:
    """w_1 w_2 ... w_s applied to v (rightmost letter first)."""
    v = FormalVector(v)
    for letter in reversed(_parse_word(w)):
        v = up_apply(S, v) if letter == "U" else down_apply(S, v)
    return v


def valid_word_evaluate(S: RankedStructure, w, p: ObjectKey,
                        report: Optional[CommutatorReport] = None) -> WordResult:
    """<w 0̂, p> by operator application, with the product-formula prediction under SCC."""
    w = _parse_word(w)
    if not is_valid_word(w, p.level):
        raise ArgumentError(f"{w!r} is not a valid word for an object of level {p.level}")
    value = inner_product(S, apply_word(S, w, FormalVector.basis(S.zero)), FormalVector.basis(p))
    report = report or commutator_classify(S)
    if not report.satisfies(SCC):
        return WordResult(value)
    r = report.level_values
    cs = word_suffix_constants(w)
    if any(c > report.verified_through_level for c in cs.values()):
        return WordResult(value)
    d0p = extended_multiplicity(S, S.zero, p)[1]
    pred = d0p * prod((sum(r[j] for j in range(c + 1)) for c in cs.values()), start=Fraction(1))
    return WordResult(value, pred)


# ---------------------------------------------------------- SCC identities

@dataclass
class IdentityResult:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def _require(report: CommutatorReport, cond: str, needed_level: int) -> None:
    if not report.satisfies(cond):
        raise PreconditionError(f"structure is {report.classification}, not {cond}")
    if report.verified_through_level < needed_level:
        raise PreconditionError(
            f"{cond} is only certified through level {report.verified_through_level}")


def prop44_check(S: RankedStructure, p: ObjectKey, a: int,
                 report: Optional[CommutatorReport] = None) -> IdentityResult:
    """sum_{|q| = |p|+a} d(p;q) u(0̂;q) against u(0̂;p) prod_i (r_0 + ... + r_{|p|+i})."""
    k = p.level
    if a < 0 or k + a > S.max_level:
        raise ArgumentError(f"need 0 <= a and |p| + a <= {S.max_level}")
    report = report or commutator_classify(S)
    _require(report, SCC, k + a - 1)
    missing = [j for j in range(k + a) if j not in report.level_values]
    if missing:
        raise PreconditionError(f"no eigenvalue at empty level(s) {missing}")
    u0 = multiplicities_from_zero(S)
    pushed = up_power(S, FormalVector.basis(p), a)
    lhs = sum((c * S.aut(q) / S.aut(p) * u0[q] for q, c in pushed.items()), Fraction(0))
    r = report.level_values
    rhs = u0[p] * prod(
        (sum(r[j] for j in range(k + i + 1)) for i in range(a)), start=Fraction(1))
    return IdentityResult(f"prop44(p={p}, a={a})", lhs, rhs)


def wtsum_check(S: RankedStructure, a: int,
                report: Optional[CommutatorReport] = None) -> IdentityResult:
    """sum_{|q|=a} d(0̂;q) u(0̂;q) = prod_{i<a} (r_0 + ... + r_i)."""
    res = prop44_check(S, S.zero, a, report)
    return IdentityResult(f"wtsum(a={a})", res.lhs, res.rhs)


def wcc_level23_check(S: RankedStructure,
                      report: Optional[CommutatorReport] = None) -> list:
    """The level-1, level-2 and level-3 weighted-sum identities under the WCC."""
    if S.max_level < 3:
        raise ArgumentError("level-3 identity needs max_level >= 3")
    report = report or commutator_classify(S)
    _require(report, WCC, 2)
    z = S.zero
    eps = report.epsilon
    u0 = multiplicities_from_zero(S)

    def w(p):  # u(0̂;p) d(0̂;p)
        return u0[p] * u0[p] * S.aut(p) / S.aut(z)

    e0 = eps[z]
    one = IdentityResult("ezero", sum((w(q) for q in S.objects(1)), Fraction(0)), e0)
    two = IdentityResult(
        "wcc_level2",
        sum((w(q) for q in S.objects(2)), Fraction(0)),
        e0 ** 2 + sum((w(p) * eps[p] for p in S.objects(1)), Fraction(0)))
    three = IdentityResult(
        "wcc_level3",
        sum((w(t) for t in S.objects(3)), Fraction(0)),
        sum((w(p) * (eps[p] + e0) ** 2 for p in S.objects(1)), Fraction(0))
        + sum((w(q) * eps[q] for q in S.objects(2)), Fraction(0)))
    return [one, two, three]


# ------------------------------------------------------------- chain count

def chain_count(S: RankedStructure, p: ObjectKey, q: ObjectKey) -> int:
    """Number of saturated arrow chains p -> ... -> q, arrows counted individually."""
    if not S.unilateral:
        raise PreconditionError("chain counting needs a unilateral structure")
    if q.level <= p.level:
        raise ArgumentError("need |q| > |p|")

    count = 0
    stack = [p]
    while stack:
        x = stack.pop()
        if x == q:
            count += 1
            continue
        if x.level >= q.level:
            continue
        for y, rec in S.covers(x):
            for _ in range(rec.u):
                stack.append(y)
    return count


# ----------------------------------------------------------- identity suite

CHAIN_COUNT_LEVEL = 5  # explicit chain enumeration grows like (2n-1)!! on planar trees

def identity_suite(S: RankedStructure) -> VerificationReport:
    """Commutator-based checks for ``verify``: eigenvectors, esum, closed form, identities."""
    rep = VerificationReport()
    top = (0, S.max_level - 1)
    report = commutator_classify(S)

    bad = None
    if report.counterexample is not None:
        p, v = report.counterexample
        bad = {"object": str(p), "commutator": {str(k): _fmt(c) for k, c in v.sorted_items()}}
    rep.checks.append(make_check(S, "wcc", bad, top, note=report.summary()))

    def esum():
        for n in range(S.max_level):
            for p in S.objects(n):
                lhs = esum_check(S, p)
                diag = commutator(S, p).coeff(p)
                if lhs != diag:
                    return {"object": str(p), "esum": _fmt(lhs), "diagonal": _fmt(diag)}
        return None

    rep.checks.append(make_check(S, "esum", esum(), top))

    if S.family in EPSILON_FORMULAS and (S.family != "necklaces" or S.params.get("c") == 1):
        rep.checks.append(epsilon_formula_check(S))

    if report.satisfies(SCC):
        fails = None
        defined = report.level_values

        def usable(k, a):
            return all(j in defined for j in range(k + a))

        for a in range(S.max_level + 1):
            if not usable(0, a):
                continue
            res = wtsum_check(S, a, report)
            if not res.holds:
                fails = {"a": a, "lhs": _fmt(res.lhs), "rhs": _fmt(res.rhs)}
                break
        if fails is None:
            for p in S.all_objects():
                for a in range(S.max_level - p.level + 1):
                    if not usable(p.level, a):
                        continue
                    res = prop44_check(S, p, a, report)
                    if not res.holds:
                        fails = {"p": str(p), "a": a, "lhs": _fmt(res.lhs), "rhs": _fmt(res.rhs)}
                        break
                if fails:
                    break
        rep.checks.append(make_check(S, "prop44", fails))
    else:
        rep.checks.append(make_check(S, "prop44", None, skipped=True,
                                     note=f"needs SCC; structure is {report.classification}"))

    if report.satisfies(WCC) and S.max_level >= 3:
        res = wcc_level23_check(S, report)
        bad = next(({"identity": r.name, "lhs": _fmt(r.lhs), "rhs": _fmt(r.rhs)}
                    for r in res if not r.holds), None)
        rep.checks.append(make_check(S, "wcc_level23", bad, (0, 3)))
    else:
        rep.checks.append(make_check(S, "wcc_level23", None, (0, 3), skipped=True,
                                     note="needs WCC and max_level >= 3"))

    if S.unilateral:
        bad = None
        top_chain = min(S.max_level, CHAIN_COUNT_LEVEL)
        for p in S.all_objects():
            for n in range(p.level + 1, top_chain + 1):
                for q in S.objects(n):
                    u = extended_multiplicity(S, p, q)[0]
                    if u != chain_count(S, p, q):
                        bad = {"p": str(p), "q": str(q), "u": _fmt(u)}
                        break
                if bad:
                    break
            if bad:
                break
        rep.checks.append(make_check(S, "chain_count", bad, (0, top_chain)))
    return rep
