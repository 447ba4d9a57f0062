"""Core group machinery: table validation, named families, subgroups."""
import json

import pytest

import hnnkit as hk
from hnnkit import (BadParams, NoIdentity, NoInverse, NotASubgroup,
                    NotAssociative, ParseError, UnknownName)


def D8():
    return hk.named_group("dihedral", {"order": 8})


def Q8():
    return hk.named_group("dicyclic", {"order": 8})


# -- table validation ---------------------------------------------------------

def test_rejects_non_associative_table():
    # a quasigroup table (Latin square) that is not associative
    t = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociative) as exc:
        hk.make_group_from_table(t)
    a, b, c = exc.value.triple
    row = t
    assert row[row[a][b]][c] != row[a][row[b][c]]


def test_rejects_no_identity():
    with pytest.raises(NoIdentity):
        hk.make_group_from_table([[0, 0], [0, 0]])


def test_rejects_missing_inverse():
    # the AND monoid on {0, 1}: identity is 1, but 0 has no inverse
    with pytest.raises(NoInverse) as exc:
        hk.make_group_from_table([[0, 0], [0, 1]])
    assert exc.value.element == 0


def test_rejects_malformed_rows():
    with pytest.raises(ParseError):
        hk.make_group_from_table([[0, 1], [1]])
    with pytest.raises(ParseError):
        hk.make_group_from_table([[0, 5], [5, 0]])


def test_accepts_valid_table_and_finds_structure():
    G = hk.make_group_from_table([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert G.n == 3 and G.identity == 0
    assert G.inv[1] == 2
    assert G.order_of(1) == 3
    assert G.is_abelian()


# -- named families -----------------------------------------------------------

def test_dihedral_8_names_and_relations():
    G = D8()
    assert G.names == ("1", "r", "r2", "r3", "c", "rc", "r2c", "r3c")
    r, c = G.element_index("r"), G.element_index("c")
    assert G.order_of(r) == 4 and G.order_of(c) == 2
    # c r c^-1 = r^-1
    assert G.conj(c, r) == G.element_index("r3")
    assert not G.is_abelian()


def test_quaternion_names_aliases_and_relations():
    G = Q8()
    i, j, k = (G.element_index(x) for x in ("i", "j", "k"))
    assert G.mul(i, j) == k
    assert G.mul(j, i) == G.element_index("-k")
    assert G.mul(i, i) == G.element_index("-1")
    # power-word aliases resolve to the quaternion names
    assert G.element_index("a") == i
    assert G.element_index("b") == j
    assert G.element_index("ab") == k == G.mul(i, j)
    assert G.order_of(i) == 4
    # every subgroup of Q8 is normal: all classes are singletons
    assert all(len(c.members) == 1
               for c in hk.conjugacy_classes_of_subgroups(G))


def test_family_orders():
    assert hk.named_group("symmetric", {"degree": 4}).n == 24
    assert hk.named_group("alternating", {"degree": 5}).n == 60
    assert hk.named_group("elementary_abelian", {"p": 3, "k": 2}).n == 9
    assert hk.named_group("semidirect_cyclic",
                          {"n": 11, "m": 5, "action": 3}).n == 55


def test_semidirect_rejects_bad_action():
    with pytest.raises(BadParams):
        hk.named_group("semidirect_cyclic", {"n": 11, "m": 5, "action": 2})


def test_unknown_family():
    with pytest.raises(UnknownName):
        hk.named_group("sporadic", {"order": 1})


def test_direct_product_structure():
    spec = {"kind": "named", "name": "cyclic", "params": {"order": 3}}
    G = hk.named_group("direct_product", {"a": spec, "b": spec})
    assert G.n == 9 and G.is_abelian()
    assert all("|" in name for name in G.names)


# -- element resolution -------------------------------------------------------

def test_element_index_forms():
    G = D8()
    assert G.element_index("r2") == 2
    assert G.element_index(3) == 3
    assert G.element_index("3") == 3
    with pytest.raises(ParseError):
        G.element_index("nothere")
    with pytest.raises(ParseError):
        G.element_index(99)


# -- subgroups ----------------------------------------------------------------

def test_subgroup_closure_klein():
    G = D8()
    V = hk.subgroup_closure(G, ["r2", "c"])
    assert [G.names[x] for x in V.elements] == ["1", "r2", "c", "r2c"]


def test_subgroup_strictness():
    G = D8()
    with pytest.raises(NotASubgroup):
        hk.subgroup(G, ["r2", "c"])          # set not closed
    S = hk.subgroup(G, ["1", "r2", "c", "r2c"])
    assert len(S.elements) == 4


def test_all_subgroups_counts():
    assert len(hk.all_subgroups(D8())) == 10
    assert len(hk.all_subgroups(Q8())) == 6
    assert len(hk.all_subgroups(hk.named_group("symmetric", {"degree": 4}))) == 30
    E16 = hk.named_group("elementary_abelian", {"p": 2, "k": 4})
    assert len(hk.all_subgroups(E16)) == 67


def test_conjugacy_classes_of_subgroups_d8():
    G = D8()
    classes = hk.conjugacy_classes_of_subgroups(G)
    assert len(classes) == 8
    sizes = sorted(len(c.members) for c in classes)
    assert sizes == [1, 1, 1, 1, 1, 1, 2, 2]
    for c in classes:
        for m in c.members:
            g = c.conjugator_for(m)
            assert tuple(sorted(G.conj_by_exponent(x, g)
                                for x in c.representative.elements)) \
                == m.elements


def test_normalizer_centralizer_center():
    G = D8()
    C = hk.subgroup_closure(G, ["c"])
    N = hk.normalizer(G, C)
    assert [G.names[x] for x in N.elements] == ["1", "r2", "c", "r2c"]
    Z = hk.center(G)
    assert [G.names[x] for x in Z.elements] == ["1", "r2"]
    assert hk.centralizer(G, C).elements == N.elements  # abelian normalizer


def test_is_conjugate_subgroups():
    G = D8()
    A = hk.subgroup_closure(G, ["c"])
    B = hk.subgroup_closure(G, ["r2c"])
    g = hk.is_conjugate_subgroups(G, A, B)
    assert g is not None
    assert tuple(sorted(G.conj(g, x) for x in A.elements)) == B.elements
    # reflections in different classes are not conjugate
    RC = hk.subgroup_closure(G, ["rc"])
    assert hk.is_conjugate_subgroups(G, A, RC) is None


# -- serialization ------------------------------------------------------------

def test_group_json_round_trip_named():
    G = hk.named_group("dihedral", {"order": 8})
    data = hk.group_to_json(G)
    G2 = hk.group_from_json(json.loads(json.dumps(data)))
    assert hk.same_table(G, G2) and G2.names == G.names


def test_group_json_round_trip_table():
    G = hk.make_group_from_table([[0, 1], [1, 0]])
    G2 = hk.group_from_json(hk.group_to_json(G))
    assert hk.same_table(G, G2)


def test_group_json_perm_kind():
    # S3 as a permutation group on 3 points
    G = hk.group_from_json({"kind": "perm", "degree": 3,
                            "generators": [[1, 0, 2], [1, 2, 0]]})
    assert G.n == 6 and not G.is_abelian()


def test_group_json_errors():
    with pytest.raises(ParseError):
        hk.group_from_json({"table": [[0]]})
    with pytest.raises(ParseError):
        hk.group_from_json("not json at all {")


# -- catalog sanity (the shared fixture is itself an oracle) -------------------

def test_catalog_counts_by_order(catalog16):
    from collections import Counter
    counts = Counter(g.n for g in catalog16)
    # classification counts for orders 1..15, and the 12 constructor-reachable
    # types at order 16
    assert dict(counts) == {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5,
                            9: 2, 10: 2, 11: 1, 12: 5, 13: 1, 14: 2, 15: 1,
                            16: 12}


def test_catalog_pairwise_non_isomorphic(catalog16):
    same_order = {}
    for g in catalog16:
        same_order.setdefault(g.n, []).append(g)
    for groups in same_order.values():
        for i, a in enumerate(groups):
            for b in groups[i + 1:]:
                assert not hk.isomorphic_groups(a, b)
