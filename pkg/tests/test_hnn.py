"""Classification machinery: data validation, orbits, witnesses, closed
forms, catalogs."""
import json

import pytest

import hnnkit as hk
from hnnkit import GroupMap
from hnnkit.errors import (BadParams, BaseMismatch, EmptyIsoSet,
                           HypothesisNotVerified, NotConjugate, ParseError)
from hnnkit.hnn import (build_gamma_bar, closed_form_central_cyclic,
                        closed_form_g1, compose_witness, double_coset_count,
                        gamma_action, hnn_data, hnn_from_json,
                        hnn_isomorphic, hnn_to_json, identity_witness,
                        invert_witness, iso_class_count, iso_parent_tuples,
                        k_invariant, kappa_partition, normalize_hnn,
                        pair_orbit_catalog, pairwise_iso_partition,
                        total_iso_count, verify_witness)
from hnnkit.morphisms import aut_group, restriction_images


def D8():
    return hk.named_group("dihedral", {"order": 8})


def klein_pair():
    G = D8()
    V = hk.subgroup_closure(G, ["r2", "c"])
    return G, V


def c22_with_c11():
    G = hk.named_group("direct_product", {
        "a": {"kind": "named", "name": "cyclic", "params": {"order": 11}},
        "b": {"kind": "named", "name": "cyclic", "params": {"order": 2}}})
    H = hk.subgroup(G, [i for i in range(G.n) if G.names[i].endswith("|1")])
    return G, H


def power_map_on(G, H, k):
    """The abstract map h -> h^k on a cyclic subgroup H."""
    Habs, emb = H.as_group()
    pos = {x: i for i, x in enumerate(emb)}
    imgs = []
    for i in range(Habs.n):
        y, x = G.identity, emb[i]
        for _ in range(k):
            y = G.mul(y, x)
        imgs.append(pos[y])
    return GroupMap(Habs, Habs, tuple(imgs))


# -- data validation -----------------------------------------------------------

def test_hnn_data_accepts_pairs_and_validates():
    G, V = klein_pair()
    d = hnn_data(G, V, V, {"r2": "c", "c": "r2", "r2c": "r2c", "1": "1"})
    assert d.f_parent() == (0, G.element_index("c"), G.element_index("r2"),
                            G.element_index("r2c"))
    assert d.is_normal_letter


def test_hnn_data_rejects_non_isomorphism():
    G, V = klein_pair()
    with pytest.raises(BadParams):
        hnn_data(G, V, V, {"1": "1", "r2": "c", "c": "c", "r2c": "r2c"})


def test_hnn_data_rejects_partial_map():
    G, V = klein_pair()
    with pytest.raises(BadParams):
        hnn_data(G, V, V, {"r2": "c"})


def test_hnn_data_rejects_image_outside_k():
    G, V = klein_pair()
    R = hk.subgroup_closure(G, ["r"])
    with pytest.raises(BadParams):
        hnn_data(G, V, R, {"1": "1", "r2": "r", "c": "r2", "r2c": "r3"})


def test_hnn_json_round_trip():
    G, V = klein_pair()
    d = hnn_data(G, V, V, {"1": "1", "r2": "c", "c": "r2", "r2c": "r2c"})
    d2 = hnn_from_json(json.dumps(hnn_to_json(d)))
    assert d2.base.rows == d.base.rows
    assert d2.key()[1:] == d.key()[1:]


# -- the Klein-subgroup family (the running example) ----------------------------

def test_klein_family_has_two_classes_with_expected_orbit_split():
    G, V = klein_pair()
    count, reps = iso_class_count(G, V, V)
    assert count == 2
    gb = build_gamma_bar(G, V, V)
    sizes = sorted(len(o) for o in gb.orbits())
    assert sizes == [2, 4]
    # identity and the generator swap r2 <-> c land in different classes
    ident = V.elements
    swap = (0, G.element_index("c"), G.element_index("r2"),
            G.element_index("r2c"))
    assert gb.orbit_index_of(ident) != gb.orbit_index_of(swap)


def test_klein_family_double_coset_count_matches():
    G, V = klein_pair()
    assert double_coset_count(G, V) == 2


def test_klein_classes_not_isomorphic_but_same_class_members_are():
    G, V = klein_pair()
    gb = build_gamma_bar(G, V, V)
    orbits = gb.orbits()
    a0 = hnn_data(G, V, V, gb.iso_set[orbits[0][0]])
    a1 = hnn_data(G, V, V, gb.iso_set[orbits[0][-1]])
    b0 = hnn_data(G, V, V, gb.iso_set[orbits[1][0]])
    assert hnn_isomorphic(a0, b0) is None
    w = hnn_isomorphic(a0, a1)
    assert w is not None
    ok, lines = verify_witness(w)
    assert ok, lines


def test_pairwise_partition_agrees_with_orbits():
    G, V = klein_pair()
    gb = build_gamma_bar(G, V, V)
    data = [hnn_data(G, V, V, t) for t in gb.iso_set]
    parts = pairwise_iso_partition(G, V, V)
    orbit_sets = {frozenset(o) for o in gb.orbits()}
    part_sets = {frozenset(p) for p in parts}
    assert orbit_sets == part_sets


# -- witnesses -----------------------------------------------------------------

def test_identity_compose_invert_witnesses_verify():
    G, V = klein_pair()
    gb = build_gamma_bar(G, V, V)
    big = max(gb.orbits(), key=len)
    d0 = hnn_data(G, V, V, gb.iso_set[big[0]])
    d1 = hnn_data(G, V, V, gb.iso_set[big[1]])
    d2 = hnn_data(G, V, V, gb.iso_set[big[2]])
    w01 = hnn_isomorphic(d0, d1)
    w12 = hnn_isomorphic(d1, d2)
    comp = compose_witness(w12, w01)
    ok, lines = verify_witness(comp)
    assert ok, lines
    inv = invert_witness(w01)
    ok, lines = verify_witness(inv)
    assert ok, lines
    ok, _ = verify_witness(identity_witness(d0))
    assert ok


def test_base_mismatch_rejected():
    G, V = klein_pair()
    Q8 = hk.named_group("dicyclic", {"order": 8})
    m1 = hk.subgroup_closure(Q8, ["-1"])
    r2 = hk.subgroup_closure(G, ["r2"])
    da = hnn_data(G, r2, r2, {0: 0, 2: 2})
    db = hnn_data(Q8, m1, m1, {0: 0, 2: 2})
    with pytest.raises(BaseMismatch):
        hnn_isomorphic(da, db)


# -- normalization -------------------------------------------------------------

def test_normalize_conjugate_pair():
    G = D8()
    A = hk.subgroup_closure(G, ["c"])
    B = hk.subgroup_closure(G, ["r2c"])
    d = hnn_data(G, A, B, {0: 0, G.element_index("c"):
                           G.element_index("r2c")})
    nd, w = normalize_hnn(d)
    assert nd.is_normal_letter
    assert nd.sub_h.elements == A.elements
    ok, lines = verify_witness(w)
    assert ok, lines


def test_normalize_rejects_non_conjugate():
    G = D8()
    A = hk.subgroup_closure(G, ["c"])
    B = hk.subgroup_closure(G, ["rc"])
    d = hnn_data(G, A, B, {0: 0, G.element_index("c"):
                           G.element_index("rc")})
    with pytest.raises(NotConjugate):
        normalize_hnn(d)
    # but the pair still classifies (two-subgroup form)
    assert iso_class_count(G, A, B)[0] == 1


def test_normalize_idempotent_on_normal_data():
    G, V = klein_pair()
    d = hnn_data(G, V, V, tuple(V.elements))
    nd, w = normalize_hnn(d)
    assert nd.key() == d.key()
    assert w.t_left == G.identity and w.t_exp == 1


# -- gamma action --------------------------------------------------------------

def _parent_tuple(Y, f):
    _, yemb = Y.as_group()
    return (Y.elements, tuple(yemb[v] for v in f.images))


def test_gamma_action_composition_law():
    import itertools
    G, V = klein_pair()
    movers = hk.auts_preserving(G, V.elements, V.elements)
    Vabs, _ = V.as_group()
    f0 = GroupMap(Vabs, Vabs, tuple(range(Vabs.n)))
    for g1, g2 in itertools.product([0, 1, 4], repeat=2):
        for a1, a2 in itertools.product(movers[:3], repeat=2):
            y1, f1 = gamma_action(G, V, V, g1, a1, f0)
            y2, f2 = gamma_action(G, V, y1, g2, a2, f1)
            # (g2,a2) after (g1,a1) equals (g2 * a2(g1), a2 . a1)
            g12 = G.mul(g2, a2.images[g1])
            y12, f12 = gamma_action(G, V, V, g12, a2 * a1, f0)
            assert _parent_tuple(y2, f2) == _parent_tuple(y12, f12)


# -- kappa partition and double cosets ------------------------------------------

def test_kappa_partition_full_aut_family_q8():
    Q8 = hk.named_group("dicyclic", {"order": 8})
    S = hk.subgroup(Q8, list(range(8)))
    count, _ = iso_class_count(Q8, S, S)
    assert count == 3          # Out(Q8) = S3: id / transpositions / 3-cycles
    assert double_coset_count(Q8, S) == 3


def test_double_coset_count_matches_on_mixed_orders(catalog12):
    for G in catalog12:
        if G.n > 8:
            continue
        for c in hk.conjugacy_classes_of_subgroups(G):
            H = c.representative
            assert double_coset_count(G, H) == iso_class_count(G, H, H)[0]


# -- closed forms ---------------------------------------------------------------

CENTRAL_CYCLIC_VALUES = {2: 1, 3: 2, 4: 2, 5: 3, 6: 2, 8: 4, 12: 4, 15: 6,
                         24: 8}


def test_closed_form_central_cyclic_frozen_values():
    for n, want in CENTRAL_CYCLIC_VALUES.items():
        assert closed_form_central_cyclic(n) == want, n


def test_closed_form_central_cyclic_pair_mode():
    G, H = c22_with_c11()
    assert closed_form_central_cyclic(G, H) == 6
    assert closed_form_central_cyclic(11) == 6


def test_closed_form_central_cyclic_rejects_non_central():
    G = D8()
    R = hk.subgroup_closure(G, ["r"])
    with pytest.raises(HypothesisNotVerified):
        closed_form_central_cyclic(G, R)


def test_closed_form_g1_on_central_case():
    G, H = c22_with_c11()
    assert closed_form_g1(G, H) == 6 == iso_class_count(G, H, H)[0]


def test_closed_form_g1_dihedral_rotation():
    D16 = hk.named_group("dihedral", {"order": 16})
    R = hk.subgroup_closure(D16, ["r"])
    got = closed_form_g1(D16, R)
    assert got == iso_class_count(D16, R, R)[0] == 2


def test_closed_form_g1_rejects_noncentral_aut_tilde():
    G, V = klein_pair()
    with pytest.raises(HypothesisNotVerified):
        closed_form_g1(G, V)      # Aut-tilde is not central in Out(V4) = S3


# -- catalogs -------------------------------------------------------------------

def test_pair_orbit_catalog_totals():
    assert total_iso_count(D8()) == 12
    assert total_iso_count(hk.named_group("dicyclic", {"order": 8})) == 7
    assert total_iso_count(hk.named_group("symmetric", {"degree": 3})) == 4
    assert total_iso_count(hk.named_group("cyclic", {"order": 6})) == 6


def test_pair_orbit_catalog_shape_d8():
    G = D8()
    cat = pair_orbit_catalog(G)
    assert cat.total == 12
    assert len(cat.entries) == 24
    # class-pair orbits cover all unordered class pairs: 8 classes -> 36
    assert sum(e.orbit_size for e in cat.entries) == 36
    # the Klein-diagonal entry classifies to 2; the two Klein classes are
    # fused by the outer automorphism, so there is exactly one such entry
    kleins = [e for e in cat.entries
              if len(e.rep_h.elements) == 4
              and e.rep_h.elements == e.rep_k.elements
              and all(G.mul(x, x) == G.identity for x in e.rep_h.elements)]
    assert len(kleins) == 1 and kleins[0].iso_classes == 2


def test_pair_orbit_catalog_iso_type_filter():
    C4 = hk.named_group("cyclic", {"order": 4})
    cat = pair_orbit_catalog(D8(), iso_type=C4)
    assert len(cat.entries) == 1
    assert cat.entries[0].iso_classes == 1


def test_empty_iso_set_raises():
    G = D8()
    A = hk.subgroup_closure(G, ["r2"])
    R = hk.subgroup_closure(G, ["r"])
    with pytest.raises(EmptyIsoSet):
        build_gamma_bar(G, A, R)


# -- k invariant ----------------------------------------------------------------

def test_k_invariant_is_one_for_finite_bases():
    G, V = klein_pair()
    rep = k_invariant(G, V, V)
    assert rep.value == 1 and rep.product_bound == 1
    G2, H = c22_with_c11()
    assert k_invariant(G2, H, H).value == 1
