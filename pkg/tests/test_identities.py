from fractions import Fraction
from itertools import product as iproduct
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import structure
from updown.core import extended_multiplicity, multiplicities_from_zero
from updown.cover import up_quotient
from updown.errors import ArgumentError, PreconditionError, ResourceError
from updown.examples import make_generator, terminal_count
from updown.identities import (ACC, LCC, NONE, SCC, WCC, apply_word, chain_count, commutator,
                               commutator_classify, epsilon_formula_check, esum_check,
                               identity_suite, is_valid_word, prop44_check, valid_word_evaluate,
                               wcc_level23_check, word_suffix_constants, wtsum_check)


def k(tag, enc, **ps):
    return make_generator(tag, **ps).key(enc)


# -------------------------------------------------------- classification

def test_young_is_acc_one():
    rep = commutator_classify(structure("young", 7))
    assert rep.classification == ACC and rep.r == 1
    assert rep.summary() == "ACC r=1 (consistent through level 6)"


def test_rooted_trees_lcc_level_plus_one():
    rep = commutator_classify(structure("rooted_trees", 7))
    assert rep.classification == LCC and (rep.slope, rep.intercept) == (1, 1)
    assert all(e == p.level + 1 for p, e in rep.epsilon.items())


def test_necklaces_two_colors_counterexample():
    S = structure("necklaces", 5, c=2)
    rep = commutator_classify(S)
    assert rep.classification == NONE
    p, v = rep.counterexample
    aa, ab = k("necklaces", (0, 0), c=2), k("necklaces", (0, 1), c=2)
    assert p == aa and dict(v) == {aa: 6, ab: 2}


def test_wcc_families():
    for tag in ("kingman", "compositions", "planar_trees"):
        rep = commutator_classify(structure(tag, 6))
        assert rep.classification == WCC
        assert rep.satisfies(WCC) and not rep.satisfies(SCC)
        with pytest.raises(PreconditionError):
            rep.sequence()


def test_strength_ordering():
    rep = commutator_classify(structure("young", 5))
    assert all(rep.satisfies(c) for c in (ACC, LCC, SCC, WCC, NONE))


def test_classify_needs_two_levels():
    with pytest.raises(ArgumentError):
        commutator_classify(structure("young", 1))


def test_report_json_carries_both_lcc_forms():
    d = commutator_classify(structure("subsets", 4, n=4)).to_dict()
    assert d["classification"] == LCC and d["a"] == "-2" and d["b"] == "4"
    assert "excluded" in d and d["verified_through_level"] == 3
    assert {e["object"]: e["epsilon"] for e in d["epsilon"]}["{1,2}"] == "0"


# -------------------------------------------------------------- esum

def test_esum_examples():
    Y = structure("young", 3)
    assert esum_check(Y, Y.zero) == 1
    R = structure("rooted_trees", 3)
    assert esum_check(R, k("rooted_trees", "(())")) == 2
    K = structure("kingman", 3)
    assert esum_check(K, k("kingman", (1, 1))) == 3


def test_esum_equals_diagonal_everywhere():
    for tag, ps in [("kingman", {}), ("necklaces", {"c": 3}), ("rooted_trees", {}),
                    ("monomials", {"n": 2})]:
        S = structure(tag, 5, **ps)
        for n in range(5):
            for p in S.objects(n):
                assert esum_check(S, p) == commutator(S, p).coeff(p)


def test_esum_rejects_top_level():
    S = structure("young", 3)
    with pytest.raises(ArgumentError):
        esum_check(S, k("young", (3,)))


# ------------------------------------------------------ closed forms

def test_epsilon_examples():
    K, C, P = structure("kingman", 4), structure("compositions", 4), structure("planar_trees", 4)
    assert commutator(K, k("kingman", (1, 1))) == {k("kingman", (1, 1)): 3}
    assert commutator(C, k("compositions", (1,))) == {k("compositions", (1,)): 4}
    assert commutator(P, k("planar_trees", (1, -1))) == {k("planar_trees", (1, -1)): 4}


@pytest.mark.parametrize("tag,ps,level", [
    ("young", {}, 7), ("kingman", {}, 8), ("compositions", {}, 8), ("planar_trees", {}, 7),
    ("rooted_trees", {}, 7), ("symmetric_chain", {}, 8), ("monomials", {"n": 2}, 6),
    ("monomials", {"n": 3}, 5), ("subsets", {"n": 5}, 5), ("two_chain", {}, 4),
])
def test_epsilon_formulas_hold(tag, ps, level):
    assert epsilon_formula_check(structure(tag, level, **ps)).status == "pass"


def test_planar_formula_uses_terminal_pairs():
    S = structure("planar_trees", 5)
    for p in S.objects(3):
        assert commutator(S, p).coeff(p) == 2 * 3 + terminal_count(p.encoding) + 1


def test_epsilon_formula_unknown_family():
    with pytest.raises(ArgumentError):
        epsilon_formula_check(structure("young", 3), "nope")


def test_injected_fault_breaks_epsilon_formula():
    S = structure("kingman", 4)
    p, q = k("kingman", (2,)), k("kingman", (3,))
    r = S.record(p, q)
    from updown.core import CoveringRecord
    bad = S.replace_records({(p, q): CoveringRecord(r.u * 2, r.d * 2)})
    assert epsilon_formula_check(bad).status == "fail"


# ------------------------------------------------------------- words

def test_suffix_constants_verbatim():
    # c_i = #U strictly after i minus #D from i on
    assert word_suffix_constants("DDUU") == {1: 0, 2: 1}
    assert word_suffix_constants("UDU") == {2: 0}
    assert word_suffix_constants("DUDUU") == {1: 1, 3: 1}


def test_word_validity():
    assert is_valid_word("DU", 0) and is_valid_word("DUU", 1)
    assert not is_valid_word("UUD", 1)
    assert not is_valid_word("UD", 0)  # suffix "D" has more D than U
    assert not is_valid_word("UU", 1)
    with pytest.raises(ArgumentError):
        is_valid_word("UXD", 1)


def test_word_examples():
    Y = structure("young", 4)
    r = valid_word_evaluate(Y, "DU", Y.zero)
    assert r.value == 1 and r.match
    r = valid_word_evaluate(Y, "DDUU", Y.zero)
    assert r.value == 2 == r.predicted
    S = structure("symmetric_chain", 3)
    assert valid_word_evaluate(S, "DU", S.zero).value == 1


def test_word_errors():
    Y = structure("young", 3)
    with pytest.raises(ArgumentError):
        valid_word_evaluate(Y, "UD", Y.zero)
    with pytest.raises(ResourceError):
        apply_word(Y, "UUUU", {Y.zero: 1})


def test_word_without_scc_has_no_prediction():
    K = structure("kingman", 4)
    r = valid_word_evaluate(K, "DUU", k("kingman", (1,)))
    assert r.predicted is None and r.match is None
    assert r.value == 3  # DUU 0 = D((2) + (1,1)) = (1 + 2)(1)


@st.composite
def valid_words(draw, level, max_len):
    """Random valid words for objects at ``level``."""
    while True:
        n_d = draw(st.integers(0, (max_len - level) // 2))
        letters = draw(st.permutations("U" * (level + n_d) + "D" * n_d))
        w = "".join(letters)
        if is_valid_word(w, level):
            return w


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_valid_words_match_product_formula(data):
    tag, ps = data.draw(st.sampled_from([("young", {}), ("symmetric_chain", {}),
                                         ("rooted_trees", {}), ("monomials", {"n": 2}),
                                         ("subsets", {"n": 4})]))
    S = structure(tag, 5, **ps)
    level = data.draw(st.integers(0, 3))
    objs = S.objects(level)
    if not objs:
        return
    p = data.draw(st.sampled_from(objs))
    w = data.draw(valid_words(level, 7))
    if w and max(w[i:].count("U") - w[i:].count("D") for i in range(len(w))) > S.max_level:
        return
    res = valid_word_evaluate(S, w, p)
    assert res.predicted is not None and res.value == res.predicted


# ------------------------------------------- weighted sums under the SCC

def test_wtsum_young():
    Y = structure("young", 7)
    rep = commutator_classify(Y)
    for a in range(8):
        res = wtsum_check(Y, a, rep)
        assert res.lhs == res.rhs == [1, 1, 2, 6, 24, 120, 720, 5040][a]
    u0 = multiplicities_from_zero(Y)
    assert sorted(u0[p] for p in Y.objects(4)) == [1, 1, 2, 3, 3]


def test_prop44_examples():
    Y = structure("young", 5)
    res = prop44_check(Y, k("young", (1,)), 1)
    assert res.lhs == res.rhs == 2
    for p in Y.all_objects():
        res = prop44_check(Y, p, 0)
        assert res.lhs == res.rhs == multiplicities_from_zero(Y)[p]


def test_prop44_needs_scc():
    with pytest.raises(PreconditionError):
        prop44_check(structure("kingman", 4), structure("kingman", 4).zero, 2)


def test_prop44_random_pairs():
    rng = random.Random(7)
    for tag in ("young", "symmetric_chain"):
        S = structure(tag, 7)
        rep = commutator_classify(S)
        for _ in range(10):
            p = rng.choice(list(S.all_objects())[: -len(S.objects(7))])
            a = rng.randint(0, S.max_level - p.level)
            res = prop44_check(S, p, a, rep)
            assert res.holds, res


# ------------------------------------------------------- WCC identities

@pytest.mark.parametrize("tag", ["kingman", "compositions", "planar_trees", "young"])
def test_wcc_level23(tag):
    for r in wcc_level23_check(structure(tag, 4)):
        assert r.holds, r


def test_young_level_two_reading():
    res = {r.name: r for r in wcc_level23_check(structure("young", 4))}
    assert res["wcc_level2"].lhs == 2 and res["wcc_level2"].rhs == 2


def test_wcc_identities_need_wcc():
    with pytest.raises(PreconditionError):
        wcc_level23_check(structure("necklaces", 4, c=2))


# ------------------------------------------------------------ chains

def test_chain_count_examples():
    Y = structure("young", 4)
    assert chain_count(Y, Y.zero, k("young", (2, 1))) == 2
    S = structure("subsets", 3, n=3)
    assert chain_count(S, S.zero, k("subsets", (1, 1, 1), n=3)) == 6
    P = structure("planar_trees", 4)
    for (p, q), r in P.coverings.items():
        assert chain_count(P, p, q) == r.u


def test_chain_count_needs_unilateral():
    K = structure("kingman", 3)
    with pytest.raises(PreconditionError):
        chain_count(K, K.zero, k("kingman", (2,)))
    Q = up_quotient(K)
    assert chain_count(Q, Q.zero, k("kingman", (2, 1))) == extended_multiplicity(Q, Q.zero, k("kingman", (2, 1)))[0]


def test_chain_count_matches_extended_u_random():
    rng = random.Random(3)
    for tag, ps in [("compositions", {}), ("planar_trees", {}), ("young", {})]:
        S = structure(tag, 5, **ps)
        objs = list(S.all_objects())
        for _ in range(20):
            p = rng.choice(objs[:-1])
            higher = [q for q in objs if q.level > p.level]
            if not higher:
                continue
            q = rng.choice(higher)
            assert chain_count(S, p, q) == extended_multiplicity(S, p, q)[0]


# -------------------------------------------------------------- suite

def test_suite_passes_on_young():
    assert identity_suite(structure("young", 6)).ok


def test_suite_flags_necklace_counterexample():
    rep = identity_suite(structure("necklaces", 5, c=2))
    assert rep["wcc"].status == "fail"
    assert rep["wcc"].counterexample == {"object": "aa", "commutator": {"aa": "6", "ab": "2"}}
    assert rep["prop44"].status == "skip"
