"""Homomorphism / isomorphism / automorphism enumeration and Out(H).

Maps are stored as full image tuples over the domain's element order.
Composition is ``(f * g)(x) = f(g(x))`` — g applies first — matching the
convention that conjugation twists as tau_g(x) = g x g^-1 and exponent
action as f^s = s^-1 f s.

Enumeration is a backtracker over a greedy generating sequence (highest
element order first, least index on ties), extending partial maps by
subgroup closure with consistency checks.  Results are returned in the
canonical order: lexicographic on the full image tuple.  The identity map
is always first in Aut listings (its image tuple 0,1,..,n-1 is lexico-
graphically least among bijections).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import BadParams, CapExceeded, HnnkitError
from .groups import FiniteGroup, Subgroup, same_table

AUT_CAP = 128


@dataclass(frozen=True)
class GroupMap:
    """A map between finite groups given by its full image tuple."""

    domain: FiniteGroup
    codomain: FiniteGroup
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    @property
    def kind(self) -> str:
        if len(set(self.images)) == len(self.images) and \
                self.domain.n == self.codomain.n:
            return "aut" if self.domain is self.codomain else "iso"
        return "hom"

    def is_bijective(self) -> bool:
        return (self.domain.n == self.codomain.n
                and len(set(self.images)) == self.domain.n)

    def is_identity(self) -> bool:
        return (self.domain is self.codomain
                and all(i == v for i, v in enumerate(self.images)))

    def __mul__(self, other: "GroupMap") -> "GroupMap":
        """self after other."""
        if not (other.codomain is self.domain
                or same_table(other.codomain, self.domain)):
            raise BadParams("composition needs matching middle group")
        return GroupMap(other.domain, self.codomain,
                        tuple(self.images[y] for y in other.images))

    def inverse(self) -> "GroupMap":
        if not self.is_bijective():
            raise BadParams("only bijective maps invert")
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return GroupMap(self.codomain, self.domain, tuple(inv))

    def power(self, k: int) -> "GroupMap":
        if self.domain is not self.codomain:
            raise BadParams("powers need an endomorphism")
        if k < 0:
            return self.inverse().power(-k)
        acc = identity_map(self.domain)
        base = self
        for _ in range(k):
            acc = base * acc
        return acc

    def order(self) -> int:
        if self.domain is not self.codomain or not self.is_bijective():
            raise BadParams("order is defined for automorphisms")
        k, acc = 1, self
        while not acc.is_identity():
            acc = self * acc
            k += 1
        return k

    def is_homomorphism(self) -> bool:
        """Full n^2 verification; used by tests and witness checking."""
        d, c, im = self.domain, self.codomain, self.images
        return all(c.rows[im[x]][im[y]] == im[d.rows[x][y]]
                   for x in range(d.n) for y in range(d.n))

    def __repr__(self) -> str:
        return (f"<GroupMap {self.domain.label}->{self.codomain.label} "
                f"{self.images}>")


def identity_map(G: FiniteGroup) -> GroupMap:
    return GroupMap(G, G, tuple(range(G.n)))


def conj_map(G: FiniteGroup, g: int) -> GroupMap:
    """tau_g: x -> g x g^-1 as an automorphism of G."""
    return GroupMap(G, G, tuple(G.conj(g, x) for x in range(G.n)))


def generating_sequence(G: FiniteGroup) -> tuple[int, ...]:
    """Greedy generating sequence: highest order first, least index on ties."""
    memo = G._memo.get("gen_seq")
    if memo is not None:
        return memo
    from .groups import _closure
    chosen: list[int] = []
    closed = {G.identity}
    while len(closed) < G.n:
        best = min((x for x in range(G.n) if x not in closed),
                   key=lambda x: (-G.order_of(x), x))
        chosen.append(best)
        closed = set(_closure(G, chosen))
    seq = tuple(chosen) or (G.identity,)
    G._memo["gen_seq"] = seq
    return seq


def _extend_partial(G: FiniteGroup, Q: FiniteGroup, dom: list[int],
                    img: dict[int, int], gen: int, gen_img: int):
    """Extend a partial hom (defined and verified on the subgroup `dom`)
    by gen -> gen_img.  Returns (dom, img) on the enlarged subgroup or
    None on contradiction."""
    rows_g, rows_q = G.rows, Q.rows
    img = dict(img)
    dom = list(dom)
    img[gen] = gen_img
    dom.append(gen)
    work = [gen]
    while work:
        x = work.pop()
        fx = img[x]
        for y in list(dom):
            fy = img[y]
            for z, fz in ((rows_g[x][y], rows_q[fx][fy]),
                          (rows_g[y][x], rows_q[fy][fx])):
                got = img.get(z)
                if got is None:
                    img[z] = fz
                    dom.append(z)
                    work.append(z)
                elif got != fz:
                    return None
    return dom, img


def enumerate_homs(G: FiniteGroup, Q: FiniteGroup) -> list[GroupMap]:
    """All homomorphisms G -> Q in canonical (image tuple) order."""
    memo = G._memo.setdefault("homs", {})
    got = memo.get(Q.token)
    if got is None:
        got = tuple(_enumerate_maps(G, Q, injective=False))
        memo[Q.token] = got
    return list(got)


def hom_count(G: FiniteGroup, Q: FiniteGroup) -> int:
    return len(enumerate_homs(G, Q))


def enumerate_isomorphisms(H: FiniteGroup, K: FiniteGroup) -> list[GroupMap]:
    """All isomorphisms H -> K in canonical order ([] if none exist)."""
    if H.n != K.n or H.iso_signature() != K.iso_signature():
        return []
    memo = H._memo.setdefault("isos", {})
    got = memo.get(K.token)
    if got is None:
        got = tuple(_enumerate_maps(H, K, injective=True))
        memo[K.token] = got
    return list(got)


def isomorphic_groups(H: FiniteGroup, K: FiniteGroup) -> bool:
    """Existence-only isomorphism test (stops at the first hit)."""
    if H.n != K.n or H.iso_signature() != K.iso_signature():
        return False
    memo = H._memo.setdefault("isos", {})
    got = memo.get(K.token)
    if got is not None:
        return bool(got)
    return bool(_enumerate_maps(H, K, injective=True, limit=1))


def _enumerate_maps(G: FiniteGroup, Q: FiniteGroup, injective: bool,
                    limit: Optional[int] = None):
    gens = generating_sequence(G)
    out: list[GroupMap] = []
    # precompute candidate images per generator order
    cand: dict[int, list[int]] = {}
    for g in gens:
        og = G.order_of(g)
        if injective:
            cand.setdefault(og, [q for q in range(Q.n)
                                 if Q.order_of(q) == og])
        else:
            cand.setdefault(og, [q for q in range(Q.n)
                                 if og % Q.order_of(q) == 0])

    def rec(i: int, dom: list[int], img: dict[int, int]):
        if limit is not None and len(out) >= limit:
            return
        if i == len(gens):
            out.append(GroupMap(G, Q, tuple(img[x] for x in range(G.n))))
            return
        g = gens[i]
        if g in img:
            rec(i + 1, dom, img)
            return
        for q in cand[G.order_of(g)]:
            ext = _extend_partial(G, Q, dom, img, g, q)
            if ext is None:
                continue
            ndom, nimg = ext
            if injective and len(set(nimg.values())) != len(nimg):
                continue
            rec(i + 1, ndom, nimg)

    rec(0, [G.identity], {G.identity: Q.identity})
    out.sort(key=lambda m: m.images)
    return out


# ---------------------------------------------------------------------------
# Aut(H) with inner/outer structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OutGroup:
    """Aut(H), its inner subgroup, and the coset space Out(H).

    ``auts`` is canonically sorted (identity first).  ``cosets`` partitions
    aut indices; coset 0 is Inn(H).  The coset composition table is built
    lazily (``law()``) because Out can be large; the partition itself and
    on-demand composition stay cheap.
    """

    base: FiniteGroup
    auts: tuple[GroupMap, ...]
    index: dict
    inner: tuple[int, ...]
    cosets: tuple[tuple[int, ...], ...]
    coset_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cosets)

    @property
    def aut_order(self) -> int:
        return len(self.auts)

    def aut_index(self, m: GroupMap) -> int:
        return self.index[m.images]

    def compose(self, i: int, j: int) -> int:
        """Index of auts[i] after auts[j]."""
        a, b = self.auts[i].images, self.auts[j].images
        return self.index[tuple(a[y] for y in b)]

    def inv_aut(self, i: int) -> int:
        return self.index[self.auts[i].inverse().images]

    def coset_rep(self, c: int) -> int:
        return self.cosets[c][0]

    def coset_mul(self, c1: int, c2: int) -> int:
        return self.coset_of[self.compose(self.cosets[c1][0],
                                          self.cosets[c2][0])]

    def coset_inv(self, c: int) -> int:
        return self.coset_of[self.inv_aut(self.cosets[c][0])]

    def coset_order(self, c: int) -> int:
        k, acc = 1, c
        e = self.coset_of[self.index[tuple(range(self.base.n))]]
        while acc != e:
            acc = self.coset_mul(c, acc)
            k += 1
        return k

    def law(self, cap: int = 512):
        """Full coset composition table; CapExceeded past `cap` cosets."""
        memo = self.base._memo.get("out_law")
        if memo is None:
            if len(self.cosets) > cap:
                raise CapExceeded(
                    f"Out has {len(self.cosets)} cosets; law table capped at {cap}")
            memo = tuple(tuple(self.coset_mul(c1, c2)
                               for c2 in range(len(self.cosets)))
                         for c1 in range(len(self.cosets)))
            self.base._memo["out_law"] = memo
        return memo


def aut_group(H: FiniteGroup, cap: int = AUT_CAP) -> OutGroup:
    if H.n > cap:
        raise CapExceeded(f"|H| = {H.n} exceeds automorphism cap {cap}")
    memo = H._memo.get("out_group")
    if memo is not None:
        return memo
    auts = tuple(enumerate_isomorphisms(H, H))
    index = {m.images: i for i, m in enumerate(auts)}
    inner = tuple(sorted({index[conj_map(H, g).images] for g in range(H.n)}))
    inner_set = set(inner)
    assigned = {}
    cosets = []
    for i, a in enumerate(auts):
        if i in assigned:
            continue
        cs = tuple(sorted(index[(a * auts[j]).images] for j in inner_set))
        cid = len(cosets)
        cosets.append(cs)
        for k in cs:
            assigned[k] = cid
    # renumber so Inn(H) is coset 0, rest by least member
    order = sorted(range(len(cosets)),
                   key=lambda c: (0 if cosets[c] == tuple(sorted(inner_set)) else 1,
                                  cosets[c]))
    relabel = {old: new for new, old in enumerate(order)}
    cosets = tuple(cosets[old] for old in order)
    coset_of = [0] * len(auts)
    for cid, cs in enumerate(cosets):
        for k in cs:
            coset_of[k] = cid
    out = OutGroup(base=H, auts=auts, index=index, inner=inner,
                   cosets=cosets, coset_of=tuple(coset_of))
    H._memo["out_group"] = out
    return out


# ---------------------------------------------------------------------------
# restriction images in Out(H)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RestrictionImages:
    """Images of Aut_{G1}(H) and N_{G1}(H) in Aut(H) and Out(H).

    aut_g1: automorphisms of G1 preserving H (canonical order);
    aut_bar / n_bar: sorted aut indices (into out.auts) of the restrictions
    and of x -> tau_{x^-1}|_H for x in N_{G1}(H);
    aut_tilde / n_tilde: their sorted coset-id images in Out(H).
    """

    group: FiniteGroup
    subgroup: Subgroup
    out: OutGroup
    aut_g1: tuple[GroupMap, ...]
    aut_bar: tuple[int, ...]
    aut_tilde: tuple[int, ...]
    n_bar: tuple[int, ...]
    n_tilde: tuple[int, ...]


def auts_preserving(G: FiniteGroup, elements: tuple[int, ...],
                    target: tuple[int, ...]) -> list[GroupMap]:
    """Automorphisms of G mapping the set `elements` onto `target`."""
    memo = G._memo.setdefault("auts_preserving", {})
    key = (elements, target)
    got = memo.get(key)
    if got is None:
        tgt = frozenset(target)
        got = tuple(a for a in aut_group(G, cap=max(AUT_CAP, G.n)).auts
                    if len(target) == len(elements)
                    and all(a.images[x] in tgt for x in elements))
        memo[key] = got
    return list(got)


def restrict_to_subgroup(alpha: GroupMap, H: Subgroup) -> GroupMap:
    """Restriction of alpha (preserving H setwise) to H's abstract copy."""
    Habs, embed = H.as_group()
    pos = {x: i for i, x in enumerate(embed)}
    return GroupMap(Habs, Habs, tuple(pos[alpha.images[x]] for x in embed))


def restriction_images(G1: FiniteGroup, H: Subgroup,
                       cap: int = AUT_CAP) -> RestrictionImages:
    if G1.n > cap:
        raise CapExceeded(f"|G1| = {G1.n} exceeds restriction cap {cap}")
    memo = G1._memo.setdefault("restriction_images", {})
    got = memo.get(H.elements)
    if got is not None:
        return got
    Habs, embed = H.as_group()
    out = aut_group(Habs)
    pos = {x: i for i, x in enumerate(embed)}
    aut_g1 = tuple(auts_preserving(G1, H.elements, H.elements))
    aut_bar = tuple(sorted({out.index[restrict_to_subgroup(a, H).images]
                            for a in aut_g1}))
    from .groups import normalizer
    n_sub = normalizer(G1, H)
    n_bar = set()
    for x in n_sub.elements:
        xi = G1.inv[x]
        n_bar.add(out.index[tuple(pos[G1.conj(xi, embed[i])]
                                  for i in range(Habs.n))])
    n_bar = tuple(sorted(n_bar))
    res = RestrictionImages(
        group=G1, subgroup=H, out=out, aut_g1=aut_g1, aut_bar=aut_bar,
        aut_tilde=tuple(sorted({out.coset_of[i] for i in aut_bar})),
        n_bar=n_bar,
        n_tilde=tuple(sorted({out.coset_of[i] for i in n_bar})))
    memo[H.elements] = res
    return res


def subgroup_generated_auts(out: OutGroup, aut_indices: Iterable[int]) -> tuple[int, ...]:
    """Closure of a set of aut indices under composition (a subgroup of
    Aut); identity always included."""
    idx = out.index
    auts = out.auts
    ident = idx[tuple(range(out.base.n))]
    seen = {ident, *aut_indices}
    members = list(seen)
    work = list(seen)
    while work:
        i = work.pop()
        for j in list(members):
            for k in (out.compose(i, j), out.compose(j, i)):
                if k not in seen:
                    seen.add(k)
                    members.append(k)
                    work.append(k)
    return tuple(sorted(seen))


def generating_subset_auts(out: OutGroup, aut_indices: Sequence[int]) -> tuple[int, ...]:
    """Small generating subset of a subgroup of Aut given by its index set."""
    target = set(aut_indices)
    gens: list[int] = []
    closed = {out.index[tuple(range(out.base.n))]}
    for i in sorted(target):
        if i not in closed:
            gens.append(i)
            closed = set(subgroup_generated_auts(out, gens))
            if closed == target:
                break
    return tuple(gens)
