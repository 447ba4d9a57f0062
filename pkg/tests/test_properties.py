"""Property-based invariants over randomly drawn small groups and data."""
import json

from hypothesis import HealthCheck, given, settings, strategies as st

import hnnkit as hk
from hnnkit.fingerprint import hom_count_hnn
from hnnkit.hnn import (build_gamma_bar, double_coset_count, hnn_data,
                        hnn_from_json, hnn_isomorphic, hnn_to_json,
                        invert_witness, iso_class_count, iso_parent_tuples,
                        normalize_hnn, verify_witness)

from conftest import small_group_catalog

BASES = [G for G in small_group_catalog(10)]
PROBES = [hk.named_group("cyclic", {"order": 2}),
          hk.named_group("cyclic", {"order": 3}),
          hk.named_group("symmetric", {"degree": 3})]

common = settings(max_examples=40, deadline=None,
                  suppress_health_check=[HealthCheck.too_slow,
                                         HealthCheck.filter_too_much])


def draw_family(data, diagonal_only=False):
    """A base group with a pair of abstractly isomorphic class reps."""
    G = data.draw(st.sampled_from(BASES), label="base")
    classes = hk.conjugacy_classes_of_subgroups(G)
    pairs = []
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            if j < i or (diagonal_only and j != i):
                continue
            H, K = ci.representative, cj.representative
            if len(H) != len(K):
                continue
            tuples, _ = iso_parent_tuples(G, H, K)
            if tuples:
                pairs.append((H, K, tuples))
    H, K, tuples = data.draw(st.sampled_from(pairs), label="pair")
    return G, H, K, tuples


@common
@given(data=st.data())
def test_same_orbit_members_are_isomorphic_with_verified_witness(data):
    G, H, K, _ = draw_family(data)
    gb = build_gamma_bar(G, H, K)
    orbit = data.draw(st.sampled_from(gb.orbits()), label="orbit")
    i = data.draw(st.sampled_from(orbit), label="i")
    j = data.draw(st.sampled_from(orbit), label="j")
    da = hnn_data(G, H, K, gb.iso_set[i])
    db = hnn_data(G, H, K, gb.iso_set[j])
    w = hnn_isomorphic(da, db)
    assert w is not None
    ok, lines = verify_witness(w)
    assert ok, lines
    wi = invert_witness(w)
    ok, lines = verify_witness(wi)
    assert ok, lines


@common
@given(data=st.data())
def test_distinct_orbits_are_never_isomorphic(data):
    G, H, K, _ = draw_family(data)
    gb = build_gamma_bar(G, H, K)
    orbits = gb.orbits()
    if len(orbits) < 2:
        return
    oa = data.draw(st.sampled_from(range(len(orbits))), label="oa")
    ob = data.draw(st.sampled_from(
        [x for x in range(len(orbits)) if x != oa]), label="ob")
    da = hnn_data(G, H, K, gb.iso_set[orbits[oa][0]])
    db = hnn_data(G, H, K, gb.iso_set[orbits[ob][0]])
    assert hnn_isomorphic(da, db) is None


@common
@given(data=st.data())
def test_double_cosets_count_the_classes_on_diagonal_pairs(data):
    G, H, _, _ = draw_family(data, diagonal_only=True)
    assert double_coset_count(G, H) == iso_class_count(G, H, H)[0]


@common
@given(data=st.data())
def test_class_count_symmetric_in_the_associated_pair(data):
    G, H, K, _ = draw_family(data)
    assert iso_class_count(G, H, K)[0] == iso_class_count(G, K, H)[0]


@common
@given(data=st.data())
def test_normalization_is_idempotent_and_witnessed(data):
    G, H, K, tuples = draw_family(data)
    t = data.draw(st.sampled_from(tuples), label="f")
    d = hnn_data(G, H, K, dict(zip(H.elements, t)))
    if hk.is_conjugate_subgroups(G, H, K) is None:
        return
    nd, w = normalize_hnn(d)
    assert nd.is_normal_letter
    ok, lines = verify_witness(w)
    assert ok, lines
    nd2, w2 = normalize_hnn(nd)
    assert nd2.key() == nd.key()
    assert w2.phi.images == tuple(range(G.n))


@common
@given(data=st.data())
def test_same_orbit_members_have_equal_hom_counts(data):
    G, H, K, _ = draw_family(data)
    gb = build_gamma_bar(G, H, K)
    orbit = data.draw(st.sampled_from(gb.orbits()), label="orbit")
    i = data.draw(st.sampled_from(orbit), label="i")
    j = data.draw(st.sampled_from(orbit), label="j")
    da = hnn_data(G, H, K, gb.iso_set[i])
    db = hnn_data(G, H, K, gb.iso_set[j])
    for Q in PROBES:
        assert hom_count_hnn(da, Q) == hom_count_hnn(db, Q)


@common
@given(data=st.data())
def test_hnn_json_round_trip_preserves_structure(data):
    G, H, K, tuples = draw_family(data)
    t = data.draw(st.sampled_from(tuples), label="f")
    d = hnn_data(G, H, K, dict(zip(H.elements, t)))
    d2 = hnn_from_json(json.dumps(hnn_to_json(d)))
    assert d2.base.rows == d.base.rows
    assert d2.key()[1:] == d.key()[1:]


@common
@given(data=st.data())
def test_witness_transplanted_across_orbits_fails_verification(data):
    """No witness can verify against a target from a different class, so
    re-pointing a valid one there must be caught."""
    from hnnkit.hnn import HnnIsoWitness
    G, H, K, _ = draw_family(data)
    gb = build_gamma_bar(G, H, K)
    orbits = gb.orbits()
    if len(orbits) < 2:
        return
    oa = data.draw(st.sampled_from(range(len(orbits))), label="oa")
    ob = data.draw(st.sampled_from(
        [x for x in range(len(orbits)) if x != oa]), label="ob")
    da = hnn_data(G, H, K, gb.iso_set[orbits[oa][0]])
    db = hnn_data(G, H, K, gb.iso_set[orbits[oa][-1]])
    dc = hnn_data(G, H, K, gb.iso_set[orbits[ob][0]])
    w = hnn_isomorphic(da, db)
    assert w is not None
    bad = HnnIsoWitness(source=da, target=dc, phi=w.phi,
                        t_left=w.t_left, t_exp=w.t_exp, t_right=w.t_right)
    ok, _ = verify_witness(bad)
    assert not ok
