"""Shared fixtures: a deduplicated catalog of small groups.

The catalog is every isomorphism type reachable from the library's
constructors (named families plus one level of direct products) up to a
given order, deduplicated by cheap invariants followed by an explicit
isomorphism search.  At order 16 this reaches 12 of the 14 types; the two
central-product-flavoured types have no constructor here and are out of
scope throughout the suite.
"""
from __future__ import annotations

import itertools

import pytest

from hnnkit import (FiniteGroup, isomorphic_groups, named_group)


def _candidates(max_order: int) -> list[FiniteGroup]:
    cands: list[FiniteGroup] = []
    for n in range(1, max_order + 1):
        cands.append(named_group("cyclic", {"order": n}))
    for n in range(4, max_order + 1, 2):
        cands.append(named_group("dihedral", {"order": n}))
    for n in range(8, max_order + 1, 4):
        cands.append(named_group("dicyclic", {"order": n}))
    for d, order in ((3, 6), (4, 24)):
        if order <= max_order:
            cands.append(named_group("symmetric", {"degree": d}))
    for d, order in ((4, 12), (5, 60)):
        if order <= max_order:
            cands.append(named_group("alternating", {"degree": d}))
    for p in (2, 3, 5, 7, 11, 13):
        k = 2
        while p ** k <= max_order:
            cands.append(named_group("elementary_abelian", {"p": p, "k": k}))
            k += 1
    for n in range(3, max_order + 1):
        for m in range(2, max_order + 1):
            if n * m > max_order:
                break
            for u in range(2, n):
                if _gcd(u, n) != 1:
                    continue
                if pow(u, m, n) == 1:
                    cands.append(named_group(
                        "semidirect_cyclic", {"n": n, "m": m, "action": u}))
    # one level of direct products over the non-product constructions
    base = list(cands)
    for a, b in itertools.combinations_with_replacement(base, 2):
        if 1 < a.n and 1 < b.n and a.n * b.n <= max_order:
            cands.append(named_group("direct_product",
                                     {"a": a.spec, "b": b.spec}))
    return cands


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _dedupe(cands: list[FiniteGroup]) -> list[FiniteGroup]:
    kept: list[FiniteGroup] = []
    for g in sorted(cands, key=lambda x: (x.n, x.label)):
        if not any(k.n == g.n and isomorphic_groups(k, g) for k in kept):
            kept.append(g)
    return kept


_CATALOG_CACHE: dict[int, list[FiniteGroup]] = {}


def small_group_catalog(max_order: int = 16) -> list[FiniteGroup]:
    got = _CATALOG_CACHE.get(max_order)
    if got is None:
        got = _dedupe(_candidates(max_order))
        _CATALOG_CACHE[max_order] = got
    return got


@pytest.fixture(scope="session")
def catalog16() -> list[FiniteGroup]:
    return small_group_catalog(16)


@pytest.fixture(scope="session")
def catalog12() -> list[FiniteGroup]:
    return [g for g in small_group_catalog(16) if g.n <= 12]
