from collections import Counter

import pytest

from conftest import structure
from oracles import (cayley_bf, decreasing_multiplicity_seqs_bf, first_occurrence_increasing_bf,
                     involutions_bf, multiset_perms_bf, multiset_projection,
                     ordered_set_partitions_bf, syt_bf)
from updown.core import extended_multiplicity, multiplicities_from_zero
from updown.cover import (ChainObject, CoveringMapData, chain_from_morphisms, decode_cover,
                          down_quotient, fibers, format_decoded, universal_cover, up_quotient,
                          verify_covering)
from updown.errors import ArgumentError, PreconditionError, UnsupportedError
from updown.examples import make_generator
from updown.export import cover_to_dot, projection_table, structure_to_dot
from updown.identities import chain_count


def k(tag, enc, **ps):
    return make_generator(tag, **ps).key(enc)


# --------------------------------------------------------------- quotients

def test_up_quotient_of_symmetric_chain_is_plain_chain():
    Q = up_quotient(structure("symmetric_chain", 6))
    assert Q.unilateral
    assert all((r.u, r.d) == (1, 1) for r in Q.coverings.values())


def test_down_quotient_of_symmetric_chain():
    Q = down_quotient(structure("symmetric_chain", 6))
    for n in range(6):
        r = Q.record(k("symmetric_chain", (n,)), k("symmetric_chain", (n + 1,)))
        assert r.u == r.d == n + 1


def test_quotients_leave_young_alone():
    Y = structure("young", 5)
    assert up_quotient(Y) is Y and down_quotient(Y) is Y


def test_kingman_quotient_records():
    K = structure("kingman", 4)
    a, b, c = k("kingman", (1, 1)), k("kingman", (2, 1)), k("kingman", (1, 1, 1))
    assert (up_quotient(K).record(a, b).u, up_quotient(K).record(a, b).d) == (2, 2)
    assert (down_quotient(K).record(a, c).u, down_quotient(K).record(a, c).d) == (3, 3)


@pytest.mark.parametrize("tag,ps", [("kingman", {}), ("necklaces", {"c": 2}), ("rooted_trees", {}),
                                    ("monomials", {"n": 2})])
def test_quotients_preserve_cover_relation(tag, ps):
    S = structure(tag, 5, **ps)
    for Q in (up_quotient(S), down_quotient(S)):
        assert set(Q.coverings) == set(S.coverings)
        assert all(Q.aut(p) == 1 for p in Q.all_objects())


# --------------------------------------------------------- universal cover

def test_cover_needs_unilateral_input():
    with pytest.raises(PreconditionError, match="up_quotient"):
        universal_cover(structure("kingman", 3))


def test_cover_level_bounds():
    with pytest.raises(ArgumentError):
        universal_cover(structure("young", 3), 4)


def test_young_fibers_at_level_three():
    cm = universal_cover(structure("young", 3))
    f = fibers(cm)
    assert [len(f[k("young", e)]) for e in [(3,), (2, 1), (1, 1, 1)]] == [1, 2, 1]


def test_subsets_fibers():
    cm = universal_cover(structure("subsets", 3, n=3), 2)
    for p in cm.base.objects(2):
        assert len(fibers(cm)[p]) == 2


@pytest.mark.parametrize("tag,ps,level", [
    ("young", {}, 6), ("subsets", {"n": 3}, 3), ("compositions", {}, 5), ("planar_trees", {}, 5),
    ("two_chain", {}, 3),
])
def test_cover_laws(tag, ps, level):
    cm = universal_cover(structure(tag, level, **ps))
    rep = verify_covering(cm)
    assert rep.ok, rep.failures()
    u0 = multiplicities_from_zero(cm.base)
    for n in range(level + 1):
        assert len(cm.total.objects(n)) == sum(u0[p] for p in cm.base.objects(n))


@pytest.mark.parametrize("tag,side", [("kingman", "up"), ("kingman", "down"),
                                      ("rooted_trees", "up"), ("rooted_trees", "down"),
                                      ("necklaces", "up"), ("symmetric_chain", "down")])
def test_cover_laws_on_quotients(tag, side):
    S = structure(tag, 5, **({"c": 2} if tag == "necklaces" else {}))
    Q = up_quotient(S) if side == "up" else down_quotient(S)
    assert verify_covering(universal_cover(Q)).ok


def test_young_cover_counts_are_involution_numbers():
    cm = universal_cover(structure("young", 6))
    assert cm.total.level_sizes() == (1, 1, 2, 4, 10, 26, 76)
    assert list(cm.total.level_sizes()) == [involutions_bf(n) for n in range(7)]


def test_fiber_size_equals_chain_count():
    B = structure("planar_trees", 4)
    cm = universal_cover(B)
    f = fibers(cm)
    for p in B.all_objects():
        if p.level:
            assert len(f[p]) == chain_count(B, B.zero, p) == extended_multiplicity(B, B.zero, p)[0]


def test_deleting_a_fiber_object_breaks_the_sum_at_its_parent():
    cm = universal_cover(structure("young", 4))
    victim = cm.total.objects(3)[1]
    parent = cm.total.covered(victim)[0][0]
    T = cm.total.without_objects([victim] + [q for q, _ in cm.total.covers(victim)])
    rep = verify_covering(CoveringMapData(T, cm.base, cm.projection))
    assert rep["fiber_sum"].status == "fail"
    assert rep["fiber_sum"].counterexample["cover_object"] == str(parent)


def test_wrong_projection_is_caught():
    cm = universal_cover(structure("young", 3))
    proj = dict(cm.projection)
    c = cm.total.objects(2)[0]
    proj[c] = k("young", (1,))
    rep = verify_covering(CoveringMapData(cm.total, cm.base, proj))
    assert rep["projection"].status == "fail"


def test_non_unilateral_base_reported():
    cm = universal_cover(up_quotient(structure("kingman", 3)))
    rep = verify_covering(CoveringMapData(cm.total, structure("kingman", 3), cm.projection))
    assert rep["unilateral"].status == "fail"


def test_chain_object_roundtrip():
    cm = universal_cover(structure("young", 3))
    for key in cm.total.all_objects():
        ch = ChainObject.from_key(key)
        assert ch.key() == key and ch.level == key.level
        assert ch.endpoint(cm.base.zero) == cm.projection[key]
    with pytest.raises(ArgumentError):
        ChainObject.from_key(k("young", (1,)))


# ----------------------------------------------------------------- decoders

def _decoded(family, base, level):
    cm = universal_cover(base, level)
    return cm, {c: decode_cover(family, c) for c in cm.total.objects(level)}


@pytest.mark.parametrize("n", range(6))
def test_young_decoder_is_bijective_onto_syt(n):
    cm, dec = _decoded("young", structure("young", 5), n)
    assert len(set(dec.values())) == len(dec)
    assert set(dec.values()) == syt_bf(n)
    for c, t in dec.items():
        assert tuple(len(r) for r in t) == cm.projection[c].encoding


def test_young_decoder_example():
    ch = ChainObject(((k("young", (1,)), 0), (k("young", (2,)), 0), (k("young", (2, 1)), 0)))
    assert decode_cover("young", ch) == ((1, 2), (3,))
    assert format_decoded("young", decode_cover("young", ch)) == "12/3"


@pytest.mark.parametrize("n", range(6))
def test_compositions_decoder_is_bijective_onto_cayley(n):
    cm, dec = _decoded("compositions", structure("compositions", 5), n)
    oracle = cayley_bf(n)
    assert set(dec.values()) == oracle and len(dec) == len(oracle)
    for c, s in dec.items():
        m = Counter(s)
        assert tuple(m[i] for i in range(1, len(m) + 1)) == cm.projection[c].encoding


def test_cayley_count_comes_from_the_oracle():
    assert len(cayley_bf(3)) == 13
    assert universal_cover(structure("compositions", 3)).total.level_sizes()[3] == len(cayley_bf(3))


@pytest.mark.parametrize("n", range(5))
def test_planar_decoder_is_bijective_onto_multiset_permutations(n):
    cm, dec = _decoded("planar_trees", structure("planar_trees", 4), n)
    oracle = multiset_perms_bf(n)
    assert set(dec.values()) == oracle and len(dec) == len(oracle)
    for c, s in dec.items():
        assert multiset_projection(s) == cm.projection[c].encoding


def test_multiset_condition_versus_first_occurrence_reading():
    # same counts, different sets from n = 2 on (see the ledger)
    for n in range(5):
        assert len(multiset_perms_bf(n)) == len(first_occurrence_increasing_bf(n))
    assert (2, 2, 1, 1) in multiset_perms_bf(2)
    assert (2, 2, 1, 1) not in first_occurrence_increasing_bf(2)


def test_planar_worked_example():
    ch = chain_from_morphisms(
        "planar_trees",
        [(1, -1), (1, 1, -1, -1), (1, 1, -1, 1, -1, -1)],
        [(), (1, 4), (1, 2, 3, 6)])
    assert decode_cover("planar_trees", ch) == (1, 2, 2, 3, 3, 1)


def test_chain_from_morphisms_rejects_non_morphism():
    with pytest.raises(ArgumentError):
        chain_from_morphisms("planar_trees", [(1, -1), (1, 1, -1, -1)], [(), (1, 2)])


@pytest.mark.parametrize("n", range(6))
def test_kingman_up_decoder_is_bijective_onto_ordered_set_partitions(n):
    cm, dec = _decoded("kingman_up", up_quotient(structure("kingman", 5)), n)
    oracle = ordered_set_partitions_bf(n)
    assert set(dec.values()) == oracle and len(dec) == len(oracle)
    for c, blocks in dec.items():
        assert tuple(len(b) for b in blocks) == cm.projection[c].encoding


def test_kingman_up_base_case():
    ch = ChainObject(((k("kingman", (1,)), 0),))
    assert decode_cover("kingman_up", ch) == ((1,),)
    assert format_decoded("kingman_up", ((1, 3), (2,))) == "{1,3}{2}"


@pytest.mark.parametrize("n", range(6))
def test_kingman_down_decoder_is_bijective(n):
    cm, dec = _decoded("kingman_down", down_quotient(structure("kingman", 5)), n)
    oracle = decreasing_multiplicity_seqs_bf(n)
    assert set(dec.values()) == oracle and len(dec) == len(oracle)
    for c, s in dec.items():
        m = Counter(s)
        assert tuple(m[i] for i in range(1, len(m) + 1)) == cm.projection[c].encoding


def test_rooted_tree_decoding_is_unsupported():
    cm = universal_cover(down_quotient(structure("rooted_trees", 2)))
    with pytest.raises(UnsupportedError, match="open problem"):
        decode_cover("rooted_trees", cm.total.objects(1)[0])
    with pytest.raises(UnsupportedError):
        decode_cover("necklaces", cm.total.objects(1)[0])


def test_decoder_rejects_foreign_chain():
    cm = universal_cover(structure("compositions", 2))
    with pytest.raises(ArgumentError):
        decode_cover("young", cm.total.objects(1)[0])


# ------------------------------------------------------------------ export

def test_structure_dot_labels():
    dot = structure_to_dot(structure("kingman", 2))
    assert dot.startswith('digraph "kingman"')
    assert 'n1 -> n2 [label="u=1,d=2"]' in dot  # (1) -> (1,1)
    assert dot.count("->") == len(structure("kingman", 2).coverings)


def test_cover_dot_colors_fibers():
    cm = universal_cover(structure("young", 3))
    dot = cover_to_dot(cm)
    fill = {}
    for line in dot.splitlines():
        if "fillcolor" in line:
            label = line.split('label="')[1].split('"')[0]
            base = label.split(" -> ")[1]
            fill.setdefault(base, set()).add(line.split('fillcolor="')[1].split('"')[0])
    assert all(len(v) == 1 for v in fill.values())
    assert len(fill) == sum(structure("young", 3).level_sizes())


def test_projection_table():
    cm = universal_cover(structure("young", 3))
    rows = projection_table(cm, "young")
    assert {"cover_encoding", "base_encoding", "decoded_label"} == set(rows[0])
    assert len(rows) == sum(cm.total.level_sizes())
    assert {r["decoded_label"] for r in rows if r["base_encoding"] == "2+1"} == {"12/3", "13/2"}
    assert all(r["decoded_label"] is None for r in projection_table(cm))
