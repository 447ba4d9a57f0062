"""HNN-extension data and its classification machinery.

An HNN-extension here is HNN(G1, H, K, f, t): a finite base group G1, two
subgroups H, K and an isomorphism f: H -> K realized by the stable letter,
t h t^-1 = f(h).  Two such extensions over the same base are compared by
orbit machinery on the finite set Iso(H, K):

* Gamma = G1 x| Aut_{G1}(H) acts on subgroups by (g, a).X = tau_g(a(X));
  the stabilizer Gamma_HK of K acts on Iso(H, K) by f -> tau_g . a . f . a^-1.
* When some automorphism of G1 swaps the conjugacy classes of H and K,
  the involution iota(f) = tau_{psi^-1(g1^-1)} . (f^psi)^-1 extends the
  acting group; in the normal case (K = H) iota is plain inversion
  f -> f^-1 up to the conjugator choice.
* Isomorphism classes of extensions over the pair (H, K) are exactly the
  orbits of the extended group GammaBar on Iso(H, K).

Every isomorphism witness this module emits has the shape
(phi in Aut(G1), t_a -> l * t_b^eps * r) and is re-verified numerically
before being returned, so convention slips cannot produce false positives.

Orbit generators come from Schreier's lemma on the subgroup action, then
deduplicate by their induced (left, right) restriction pair; the full
closure of GammaBar is only materialized on request (``closure``), since
iso sets can be large while orbits stay cheap.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (AlphaDoesNotPreserveH, BadParams, BaseMismatch,
                     CapExceeded, EmptyIsoSet, HypothesisNotVerified,
                     InfiniteBaseUnsupported, NotConjugate, ParseError)
from .groups import (FiniteGroup, Subgroup, conj_subgroup_exp,
                     conjugacy_classes_of_subgroups, group_from_json,
                     group_to_json, is_conjugate_subgroups, same_table,
                     subgroup)
from .morphisms import (GroupMap, aut_group, auts_preserving,
                        enumerate_isomorphisms, generating_sequence,
                        generating_subset_auts, identity_map,
                        restriction_images)


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HnnData:
    """HNN(base, H, K, f, t) with f stored as an abstract map H_abs -> K_abs."""

    base: FiniteGroup
    sub_h: Subgroup
    sub_k: Subgroup
    f: GroupMap
    label: str = ""

    @property
    def is_normal_letter(self) -> bool:
        return self.sub_h.elements == self.sub_k.elements

    def f_parent(self) -> tuple[int, ...]:
        """Images of sub_h.elements under f, as parent indices."""
        K = self.sub_k.elements
        return tuple(K[v] for v in self.f.images)

    def key(self) -> tuple:
        return (self.base.token, self.sub_h.elements, self.sub_k.elements,
                self.f_parent())

    def describe(self) -> str:
        G = self.base
        pairs = ", ".join(f"{G.names[h]}->{G.names[v]}"
                          for h, v in zip(self.sub_h.elements, self.f_parent()))
        return (f"HNN({G.label}; H={{{','.join(self.sub_h.names())}}}, "
                f"K={{{','.join(self.sub_k.names())}}}, f: {pairs})")


def hnn_data(base: FiniteGroup, H, K, f, label: str = "") -> HnnData:
    """Build validated HnnData.

    H, K: Subgroups or element/generator iterables (closed sets required
    when given as iterables -- use subgroup_closure first for generators).
    f: GroupMap (abstract), dict/list of parent-index pairs, tuple of
    parent images aligned with sorted H, or a callable on parent indices.
    """
    if not isinstance(H, Subgroup):
        H = subgroup(base, H)
    if not isinstance(K, Subgroup):
        K = subgroup(base, K)
    Habs, hemb = H.as_group()
    Kabs, kemb = K.as_group()
    kpos = {x: i for i, x in enumerate(kemb)}

    if isinstance(f, GroupMap):
        fmap = f
    else:
        if callable(f):
            pairs = {h: f(h) for h in H.elements}
        elif isinstance(f, dict):
            pairs = {base.element_index(a): base.element_index(b)
                     for a, b in f.items()}
        else:
            seq = list(f)
            if seq and isinstance(seq[0], (list, tuple)):
                pairs = {base.element_index(a): base.element_index(b)
                         for a, b in seq}
            else:
                imgs = [base.element_index(v) for v in seq]
                if len(imgs) != len(H.elements):
                    raise BadParams("f image list must match |H|")
                pairs = dict(zip(H.elements, imgs))
        missing = set(H.elements) - set(pairs)
        if missing:
            raise BadParams(f"f undefined on H elements {sorted(missing)}")
        try:
            fmap = GroupMap(Habs, Kabs,
                            tuple(kpos[pairs[h]] for h in hemb))
        except KeyError as exc:
            raise BadParams(f"f maps outside K: {exc}") from None
    if fmap.domain is not Habs or fmap.codomain is not Kabs:
        # remap an externally built GroupMap onto the canonical abstract copies
        if fmap.domain.n != Habs.n or fmap.codomain.n != Kabs.n:
            raise BadParams("f endpoints do not match H and K")
        fmap = GroupMap(Habs, Kabs, fmap.images)
    if not fmap.is_bijective() or not fmap.is_homomorphism():
        raise BadParams("f is not an isomorphism H -> K")
    return HnnData(base=base, sub_h=H, sub_k=K, f=fmap,
                   label=label or f"HNN({base.label})")


def hnn_from_json(data) -> HnnData:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON hnn spec: {exc}") from None
    try:
        base = group_from_json(data["base"])
        H = subgroup(base, data["H"])
        K = subgroup(base, data["K"])
        return hnn_data(base, H, K, data["f"], label=data.get("label", ""))
    except KeyError as exc:
        raise ParseError(f"hnn spec missing field {exc}") from None


def hnn_to_json(d: HnnData) -> dict:
    return {"base": group_to_json(d.base),
            "H": list(d.sub_h.elements),
            "K": list(d.sub_k.elements),
            "f": [[h, v] for h, v in zip(d.sub_h.elements, d.f_parent())]}


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HnnIsoWitness:
    """Isomorphism source -> target: base by phi, t_a -> l * t_b^eps * r."""

    source: HnnData
    target: HnnData
    phi: GroupMap
    t_left: int
    t_exp: int
    t_right: int

    def describe(self) -> str:
        G = self.target.base
        t = "t'" if self.t_exp == 1 else "t'^-1"
        lhs = G.names[self.t_left]
        rhs = G.names[self.t_right]
        word = "*".join(p for p in (lhs if self.t_left != G.identity else "",
                                    t,
                                    rhs if self.t_right != G.identity else "")
                        if p)
        return f"base aut {self.phi.images}; t -> {word}"


def verify_witness(w: HnnIsoWitness) -> tuple[bool, list[str]]:
    """Check phi is a base automorphism and the stable-letter relation
    maps correctly for every element of H (not just generators).
    Returns (ok, human-readable check lines)."""
    checks: list[str] = []
    a, b = w.source, w.target
    G = a.base
    ok = True
    if not same_table(G, b.base):
        return False, ["bases differ"]
    phi_ok = w.phi.is_bijective() and w.phi.is_homomorphism()
    checks.append(f"phi in Aut(base): {'ok' if phi_ok else 'FAIL'}")
    ok &= phi_ok
    fb = dict(zip(b.sub_h.elements, b.f_parent()))
    fb_inv = {v: h for h, v in fb.items()}
    l, r, e = w.t_left, w.t_right, w.t_exp
    li, ri = G.inv[l], G.inv[r]
    rel_ok = True
    for h, v in zip(a.sub_h.elements, a.f_parent()):
        x = G.mul(G.mul(r, w.phi.images[h]), ri)
        if e == 1:
            if x not in b.sub_h:
                rel_ok = False
                break
            y = G.mul(G.mul(l, fb[x]), li)
        else:
            if x not in b.sub_k:
                rel_ok = False
                break
            y = G.mul(G.mul(l, fb_inv[x]), li)
        if y != w.phi.images[v]:
            rel_ok = False
            break
    checks.append("stable-letter relation on all of H: "
                  + ("ok" if rel_ok else "FAIL"))
    ok &= rel_ok
    return bool(ok), checks


def identity_witness(d: HnnData) -> HnnIsoWitness:
    return HnnIsoWitness(source=d, target=d, phi=identity_map(d.base),
                         t_left=d.base.identity, t_exp=1,
                         t_right=d.base.identity)


def compose_witness(w2: HnnIsoWitness, w1: HnnIsoWitness) -> HnnIsoWitness:
    """w2 after w1 (w1: a -> b, w2: b -> c)."""
    if w1.target.key() != w2.source.key():
        raise BadParams("witness endpoints do not match")
    G = w1.source.base
    phi = w2.phi * w1.phi
    p2 = w2.phi.images
    if w1.t_exp == 1:
        left = G.mul(p2[w1.t_left], w2.t_left)
        exp = w2.t_exp
        right = G.mul(w2.t_right, p2[w1.t_right])
    else:
        left = G.mul(p2[w1.t_left], G.inv[w2.t_right])
        exp = -w2.t_exp
        right = G.mul(G.inv[w2.t_left], p2[w1.t_right])
    return HnnIsoWitness(source=w1.source, target=w2.target, phi=phi,
                         t_left=left, t_exp=exp, t_right=right)


def invert_witness(w: HnnIsoWitness) -> HnnIsoWitness:
    G = w.source.base
    phi_inv = w.phi.inverse()
    pi = phi_inv.images
    if w.t_exp == 1:
        left, right = pi[G.inv[w.t_left]], pi[G.inv[w.t_right]]
        exp = 1
    else:
        left, right = pi[w.t_right], pi[w.t_left]
        exp = -1
    return HnnIsoWitness(source=w.target, target=w.source, phi=phi_inv,
                         t_left=left, t_exp=exp, t_right=right)


# ---------------------------------------------------------------------------
# normalization (conjugate associated subgroups -> normal letter)
# ---------------------------------------------------------------------------

def normalize_hnn(d: HnnData) -> tuple[HnnData, HnnIsoWitness]:
    """Rewrite HNN(G1,H,K,f) with K = H^g1 into the normal form
    HNN(G1,H,H,tau_g1 . f), witness t -> g1^-1 t'.  Raises NotConjugate
    when H and K are not conjugate; identity witness when already normal."""
    if d.is_normal_letter:
        return d, identity_witness(d)
    G = d.base
    g1 = is_conjugate_subgroups(G, d.sub_h, d.sub_k)
    if g1 is None:
        raise NotConjugate(
            f"H and K are not conjugate in {G.label}; pair stays two-subgroup")
    fp = d.f_parent()
    nd = hnn_data(G, d.sub_h, d.sub_h,
                  tuple(G.conj(g1, v) for v in fp),
                  label=d.label + "~normal" if d.label else "")
    w = HnnIsoWitness(source=d, target=nd, phi=identity_map(G),
                      t_left=G.inv[g1], t_exp=1, t_right=G.identity)
    ok, _ = verify_witness(w)
    if not ok:  # pragma: no cover - construction is proven; guard regressions
        raise AssertionError("normalization witness failed verification")
    return nd, w


# ---------------------------------------------------------------------------
# Iso(H, K) and the GammaBar action
# ---------------------------------------------------------------------------

def iso_parent_tuples(G: FiniteGroup, H: Subgroup, K: Subgroup):
    """All isomorphisms H -> K as parent-image tuples aligned with
    H.elements, canonically sorted, plus the index dict."""
    memo = G._memo.setdefault("iso_tuples", {})
    key = (H.elements, K.elements)
    got = memo.get(key)
    if got is None:
        Habs, _ = H.as_group()
        Kabs, kemb = K.as_group()
        isos = enumerate_isomorphisms(Habs, Kabs)
        tuples = sorted(tuple(kemb[v] for v in m.images) for m in isos)
        got = (tuple(tuples), {t: i for i, t in enumerate(tuples)})
        memo[key] = got
    return got


def abstract_iso(G: FiniteGroup, H: Subgroup, K: Subgroup,
                 parent_tuple: Sequence[int]) -> GroupMap:
    Habs, _ = H.as_group()
    Kabs, kemb = K.as_group()
    kpos = {x: i for i, x in enumerate(kemb)}
    return GroupMap(Habs, Kabs, tuple(kpos[v] for v in parent_tuple))


def gamma_action(G1: FiniteGroup, H: Subgroup, X: Subgroup, g1: int,
                 alpha: GroupMap, f: GroupMap):
    """One Gamma-step on an iso f: H -> X: returns (Y, f') where
    Y = tau_g1(alpha(X)) and f' = tau_g1 . alpha . f . (alpha^-1|_H).

    alpha must preserve H setwise (AlphaDoesNotPreserveH otherwise).
    """
    Hset = H.element_set()
    if any(alpha.images[x] not in Hset for x in H.elements):
        raise AlphaDoesNotPreserveH(
            "alpha does not preserve the first associated subgroup")
    Habs, hemb = H.as_group()
    Xabs, xemb = X.as_group()
    ainv = alpha.inverse().images
    hpos = {x: i for i, x in enumerate(hemb)}
    y_elems = tuple(sorted(G1.conj(g1, alpha.images[x]) for x in X.elements))
    Y = Subgroup(G1, y_elems)
    Yabs, yemb = Y.as_group()
    ypos = {x: i for i, x in enumerate(yemb)}
    images = []
    for h in hemb:
        v = xemb[f.images[hpos[ainv[h]]]]
        images.append(ypos[G1.conj(g1, alpha.images[v])])
    return Y, GroupMap(Habs, Yabs, tuple(images))


def _transporter(G: FiniteGroup, S: tuple[int, ...], target: tuple[int, ...]):
    """Ascending list of l with l S l^-1 = target."""
    memo = G._memo.setdefault("transporters", {})
    key = (S, target)
    got = memo.get(key)
    if got is None:
        got = tuple(l for l in range(G.n)
                    if conj_subgroup_exp(G, S, G.inv[l]) == target)
        memo[key] = got
    return got


@dataclass(frozen=True, eq=False)
class GammaBarGroup:
    """The acting group on Iso(H, K), given by induced permutations.

    generators: permutations of iso_set indices induced by Schreier
    generators of the stabilizer Gamma_HK (deduplicated);
    iota: the swap involution's permutation when a swapping automorphism
    exists, else None; swap_source = (psi, g1) for narrative/witnesses.
    """

    base: FiniteGroup
    sub_h: Subgroup
    sub_k: Subgroup
    iso_set: tuple[tuple[int, ...], ...]
    iso_index: dict
    generators: tuple[tuple[int, ...], ...]
    gen_sources: tuple[tuple[int, tuple[int, ...]], ...]  # (g1, alpha images)
    iota: Optional[tuple[int, ...]]
    swap_source: Optional[tuple[GroupMap, int]]

    def orbits(self) -> list[list[int]]:
        memo = self.base._memo.setdefault("gamma_orbits", {})
        key = (self.sub_h.elements, self.sub_k.elements)
        got = memo.get(key)
        if got is None:
            parent = list(range(len(self.iso_set)))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            def union(x, y):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)

            perms = list(self.generators)
            if self.iota is not None:
                perms.append(self.iota)
            for p in perms:
                for i, j in enumerate(p):
                    union(i, j)
            classes: dict[int, list[int]] = {}
            for i in range(len(self.iso_set)):
                classes.setdefault(find(i), []).append(i)
            got = tuple(tuple(sorted(v)) for _, v in
                        sorted(classes.items()))
            memo[key] = got
        return [list(o) for o in got]

    def orbit_reps(self) -> list[tuple[int, ...]]:
        return [self.iso_set[o[0]] for o in self.orbits()]

    def orbit_index_of(self, f_tuple: tuple[int, ...]) -> int:
        i = self.iso_index[tuple(f_tuple)]
        for k, o in enumerate(self.orbits()):
            if i in o:
                return k
        raise KeyError(f_tuple)

    def closure(self, cap: int = 20000) -> set[tuple[int, ...]]:
        """All permutations in GammaBar (generators + iota closure)."""
        ident = tuple(range(len(self.iso_set)))
        gens = [p for p in self.generators if p != ident]
        if self.iota is not None and self.iota != ident:
            gens.append(self.iota)
        seen = {ident}
        members = [ident]
        work = [ident]
        # closure under right multiplication by generators
        while work:
            p = work.pop()
            for g in gens:
                q = tuple(p[i] for i in g)
                if q not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"GammaBar closure exceeds {cap}")
                    seen.add(q)
                    members.append(q)
                    work.append(q)
        return seen


def _gamma_stab_generators(G1: FiniteGroup, H: Subgroup, K: Subgroup):
    """Schreier generators of Gamma_HK = Stab_Gamma(K) where
    Gamma = G1 x| Aut_{G1}(H) acts on subgroups by (g, a).X = tau_g(a(X)).
    Returned as (g1, alpha_index) pairs; alpha indices refer to outG1.auts."""
    outG1 = aut_group(G1, cap=max(128, G1.n))
    auts = outG1.auts
    a_indices = [outG1.index[m.images] for m in
                 auts_preserving(G1, H.elements, H.elements)]
    a_gens = generating_subset_auts(outG1, a_indices)
    ident_a = outG1.index[tuple(range(G1.n))]
    gens = [(g, ident_a) for g in generating_sequence(G1)]
    gens += [(G1.identity, ai) for ai in a_gens]

    def act(pair, X):
        g, ai = pair
        im = auts[ai].images
        return tuple(sorted(G1.conj(g, im[x]) for x in X))

    def mul(p1, p2):  # (g1,a1)*(g2,a2) = (g1*a1(g2), a1 a2)
        g1, a1 = p1
        g2, a2 = p2
        return (G1.rows[g1][auts[a1].images[g2]], outG1.compose(a1, a2))

    def inv(p):
        g, ai = p
        aj = outG1.inv_aut(ai)
        return (auts[aj].images[G1.inv[g]], aj)

    base_pt = K.elements
    transversal = {base_pt: (G1.identity, ident_a)}
    queue = deque([base_pt])
    stab = {}
    while queue:
        X = queue.popleft()
        uX = transversal[X]
        for s in gens:
            Y = act(s, X)
            if Y not in transversal:
                transversal[Y] = mul(s, uX)
                queue.append(Y)
            else:
                h = mul(inv(transversal[Y]), mul(s, uX))
                if act(h, base_pt) != base_pt:  # pragma: no cover
                    raise AssertionError("Schreier generator fails to stabilize")
                stab[h] = True
    return list(stab), outG1


def _find_swap(G1: FiniteGroup, H: Subgroup, K: Subgroup):
    """Least swapping pair (psi, g1): psi(H) = K and psi(K) = H^g1."""
    outG1 = aut_group(G1, cap=max(128, G1.n))
    for psi in outG1.auts:
        im = psi.images
        if tuple(sorted(im[x] for x in H.elements)) != K.elements:
            continue
        pk = tuple(sorted(im[x] for x in K.elements))
        for g1 in range(G1.n):
            if conj_subgroup_exp(G1, H.elements, g1) == pk:
                return psi, g1
    return None


def build_gamma_bar(G1: FiniteGroup, H: Subgroup, K: Subgroup) -> GammaBarGroup:
    """Assemble the full acting group on Iso(H, K).

    Raises EmptyIsoSet when H and K are not abstractly isomorphic.
    """
    memo = G1._memo.setdefault("gamma_bar", {})
    key = (H.elements, K.elements)
    got = memo.get(key)
    if got is not None:
        return got
    iso_set, iso_index = iso_parent_tuples(G1, H, K)
    if not iso_set:
        raise EmptyIsoSet(
            f"no isomorphism H -> K for orders {len(H)} vs {len(K)}")
    stab_pairs, outG1 = _gamma_stab_generators(G1, H, K)
    Hl = H.elements
    hpos = {x: i for i, x in enumerate(Hl)}
    n_h = len(Hl)
    perms = {}
    sources = {}
    for g, ai in stab_pairs:
        alpha = outG1.auts[ai]
        ainv = outG1.auts[outG1.inv_aut(ai)].images
        R = tuple(hpos[ainv[x]] for x in Hl)
        L = {v: G1.conj(g, alpha.images[v]) for v in K.elements}
        sig = (R, tuple(sorted(L.items())))
        if sig in perms:
            continue
        perm = tuple(iso_index[tuple(L[f[R[i]]] for i in range(n_h))]
                     for f in iso_set)
        perms[sig] = perm
        sources[sig] = (g, alpha.images)
    ident = tuple(range(len(iso_set)))
    gen_list, src_list = [], []
    for sig in sorted(perms):
        if perms[sig] != ident:
            gen_list.append(perms[sig])
            src_list.append(sources[sig])
    swap = _find_swap(G1, H, K)
    iota_perm = None
    if swap is not None:
        psi, g1 = swap
        pim = psi.images
        pinv = psi.inverse().images
        g1i = G1.inv[g1]
        iota_imgs = []
        for f in iso_set:
            finv = {f[i]: Hl[i] for i in range(n_h)}
            img = tuple(pinv[G1.mul(G1.mul(g1i, finv[pim[h]]), g1)]
                        for h in Hl)
            iota_imgs.append(iso_index[img])
        iota_perm = tuple(iota_imgs)
    gb = GammaBarGroup(base=G1, sub_h=H, sub_k=K, iso_set=iso_set,
                       iso_index=iso_index, generators=tuple(gen_list),
                       gen_sources=tuple(src_list), iota=iota_perm,
                       swap_source=swap)
    memo[key] = gb
    return gb


def iso_class_count(G1: FiniteGroup, H: Subgroup, K: Subgroup):
    """Number of isomorphism classes of HNN(G1, H, K, f) over all f,
    plus canonical orbit representatives as abstract maps H_abs -> K_abs."""
    gb = build_gamma_bar(G1, H, K)
    reps = [abstract_iso(G1, H, K, t) for t in gb.orbit_reps()]
    return len(reps), reps


# ---------------------------------------------------------------------------
# isomorphism decision with verified witnesses
# ---------------------------------------------------------------------------

def _search_witness_same_base(a: HnnData, b: HnnData) -> Optional[HnnIsoWitness]:
    """Single-step (psi, l) search: psi ranges over base automorphisms in
    canonical order; the direct shape needs psi(Ha) = Hb, the swapped shape
    psi(Ha) = Kb; l ranges over the relevant transporter.  Every candidate
    is verified before acceptance."""
    G = a.base
    fa = dict(zip(a.sub_h.elements, a.f_parent()))
    fb = dict(zip(b.sub_h.elements, b.f_parent()))
    fb_inv = {v: h for h, v in fb.items()}
    direct = {m.images for m in
              auts_preserving(G, a.sub_h.elements, b.sub_h.elements)}
    swapped = {m.images for m in
               auts_preserving(G, a.sub_h.elements, b.sub_k.elements)}
    candidates = sorted(direct | swapped)
    for im in candidates:
        pk = tuple(sorted(im[x] for x in a.sub_k.elements))
        if im in direct:
            for l in _transporter(G, b.sub_k.elements, pk):
                li = G.inv[l]
                if all(G.mul(G.mul(l, fb[im[h]]), li) == im[v]
                       for h, v in fa.items()):
                    w = HnnIsoWitness(source=a, target=b,
                                      phi=GroupMap(G, G, im),
                                      t_left=l, t_exp=1, t_right=G.identity)
                    ok, _ = verify_witness(w)
                    if ok:
                        return w
        if im in swapped:
            for l in _transporter(G, b.sub_h.elements, pk):
                li = G.inv[l]
                if all(G.mul(G.mul(l, fb_inv[im[h]]), li) == im[v]
                       for h, v in fa.items()):
                    w = HnnIsoWitness(source=a, target=b,
                                      phi=GroupMap(G, G, im),
                                      t_left=l, t_exp=-1, t_right=G.identity)
                    ok, _ = verify_witness(w)
                    if ok:
                        return w
    return None


def hnn_isomorphic(a: HnnData, b: HnnData) -> Optional[HnnIsoWitness]:
    """Decide HNN(a) ~= HNN(b) over one shared base; verified witness or
    None.  Bases must have equal multiplication tables (BaseMismatch)."""
    if not same_table(a.base, b.base):
        raise BaseMismatch("inputs live over different base groups")
    if a.key() == b.key():
        return identity_witness(a)
    if {len(a.sub_h), len(a.sub_k)} != {len(b.sub_h), len(b.sub_k)}:
        return None
    try:
        na, wa = normalize_hnn(a)
    except NotConjugate:
        na, wa = a, identity_witness(a)
    try:
        nb, wb = normalize_hnn(b)
    except NotConjugate:
        nb, wb = b, identity_witness(b)
    if na.is_normal_letter != nb.is_normal_letter:
        return None
    ws = _search_witness_same_base(na, nb)
    if ws is None:
        return None
    total = compose_witness(invert_witness(wb), compose_witness(ws, wa))
    ok, _ = verify_witness(total)
    if not ok:  # pragma: no cover - composition algebra is unit-tested
        raise AssertionError("composed witness failed verification")
    return total


def pairwise_iso_partition(G1: FiniteGroup, H: Subgroup, K: Subgroup,
                           iso_cap: int = 512) -> list[list[int]]:
    """Partition of Iso(H, K) indices induced by the direct pairwise
    decision hnn_isomorphic (independent of the orbit machinery).  Each
    iso is compared against one representative per known class, relying
    only on the relation being an equivalence."""
    iso_set, _ = iso_parent_tuples(G1, H, K)
    if len(iso_set) > iso_cap:
        raise CapExceeded(f"|Iso| = {len(iso_set)} beyond pairwise cap {iso_cap}")
    data = [hnn_data(G1, H, K, t) for t in iso_set]
    classes: list[list[int]] = []
    for i, d in enumerate(data):
        for cls in classes:
            if hnn_isomorphic(data[cls[0]], d) is not None:
                cls.append(i)
                break
        else:
            classes.append([i])
    return [sorted(c) for c in classes]


# ---------------------------------------------------------------------------
# Out(H)-level double cosets and closed forms
# ---------------------------------------------------------------------------

def kappa_partition(out, n_tilde: Sequence[int], aut_tilde: Sequence[int]):
    """Partition of Out(H) coset ids under the equivalence generated by
    x ~ n.x (n in N-tilde), x ~ s^-1 x s (s in Aut-tilde), x ~ x^-1."""
    n_cosets = len(out.cosets)
    parent = list(range(n_cosets))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    n_gens = _coset_generating_subset(out, n_tilde)
    a_gens = _coset_generating_subset(out, aut_tilde)
    for x in range(n_cosets):
        union(x, out.coset_inv(x))
        for g in n_gens:
            union(x, out.coset_mul(g, x))
        for s in a_gens:
            union(x, out.coset_mul(out.coset_inv(s), out.coset_mul(x, s)))
    classes: dict[int, list[int]] = {}
    for x in range(n_cosets):
        classes.setdefault(find(x), []).append(x)
    return [sorted(v) for _, v in sorted(classes.items())]


def _coset_closure(out, seed: Iterable[int]) -> tuple[int, ...]:
    e = out.coset_of[out.index[tuple(range(out.base.n))]]
    seen = {e, *seed}
    members = list(seen)
    work = list(seen)
    while work:
        x = work.pop()
        for y in list(members):
            for z in (out.coset_mul(x, y), out.coset_mul(y, x)):
                if z not in seen:
                    seen.add(z)
                    members.append(z)
                    work.append(z)
    return tuple(sorted(seen))


def _coset_generating_subset(out, cosets: Sequence[int]) -> tuple[int, ...]:
    target = set(cosets)
    gens: list[int] = []
    closed = set(_coset_closure(out, []))
    if closed == target or not target:
        return tuple()
    for c in sorted(target):
        if c not in closed:
            gens.append(c)
            closed = set(_coset_closure(out, gens))
            if closed == target:
                break
    return tuple(gens)


def double_coset_count(G1: FiniteGroup, H: Subgroup) -> int:
    """Independent count of iso classes in the normal case via the
    Out(H)-level partition (no Iso enumeration)."""
    ri = restriction_images(G1, H, cap=max(128, G1.n))
    return len(kappa_partition(ri.out, ri.n_tilde, ri.aut_tilde))


def totient(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            pk = 1
            while m % p == 0:
                m //= p
                pk *= p
            result *= pk - pk // p
        p += 1
    if m > 1:
        result *= m - 1
    return result


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m, p = n, 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def closed_form_g1(G1: FiniteGroup, H: Subgroup) -> int:
    """(n + d)/2 count for the normal case when Aut-tilde_{G1}(H) is
    central in Out(H): n = |Out(H) / N-tilde|, d = #order<=2 elements of
    that quotient.  HypothesisNotVerified if centrality fails."""
    ri = restriction_images(G1, H, cap=max(128, G1.n))
    out = ri.out
    if len(out.cosets) > 4096:
        raise CapExceeded("Out(H) too large for the closed-form check")
    # centrality needs only generators on both sides
    a_gens = _coset_generating_subset(out, ri.aut_tilde)
    out_gens = _coset_generating_subset(out, range(len(out.cosets)))
    for s in a_gens:
        for x in out_gens:
            if out.coset_mul(s, x) != out.coset_mul(x, s):
                raise HypothesisNotVerified(
                    "Aut-tilde_{G1}(H) is not central in Out(H)")
    n_sub = set(_coset_closure(out, ri.n_tilde))
    # N-tilde sits in the central Aut-tilde, hence is normal
    e = out.coset_of[out.index[tuple(range(out.base.n))]]
    seen: dict[int, int] = {}
    blocks: list[list[int]] = []
    for x in range(len(out.cosets)):
        if x in seen:
            continue
        blk = sorted(out.coset_mul(x, nn) for nn in n_sub)
        cid = len(blocks)
        blocks.append(blk)
        for y in blk:
            seen[y] = cid
    n = len(blocks)
    e_blk = seen[e]
    d = sum(1 for blk in blocks
            if seen[out.coset_mul(blk[0], blk[0])] == e_blk)
    if (n + d) % 2:  # pragma: no cover - parity is a theorem
        raise AssertionError("(n+d) must be even")
    return (n + d) // 2


def closed_form_central_cyclic(arg, H: Optional[Subgroup] = None) -> int:
    """Count for H central cyclic in G1, by the Sylow-wise closed form.

    Call as closed_form_central_cyclic(G1, H) to have centrality and
    cyclicity verified (HypothesisNotVerified otherwise), or with a bare
    order / {prime: exponent} dict for the pure formula.
    """
    if isinstance(arg, FiniteGroup):
        if H is None:
            raise BadParams("need the central cyclic subgroup H")
        G1 = arg
        from .groups import center
        zc = center(G1).element_set()
        if not all(x in zc for x in H.elements):
            raise HypothesisNotVerified("H is not central in G1")
        if not any(len(_cyclic_span(G1, x)) == len(H) for x in H.elements):
            raise HypothesisNotVerified("H is not cyclic")
        sylow = factorize(len(H)) if len(H) > 1 else {}
    elif isinstance(arg, dict):
        sylow = {int(p): int(m) for p, m in arg.items()}
    else:
        n = int(arg)
        if n < 1:
            raise BadParams("order must be >= 1")
        sylow = factorize(n) if n > 1 else {}
    m2 = sylow.get(2, 0)
    odd = [(p, m) for p, m in sylow.items() if p != 2]
    r = len(odd)
    T = 1
    for p, m in odd:
        T *= (p - 1) * p ** (m - 1)
    if m2 <= 1:
        return (T - 2 ** r) // 2 + 2 ** r
    if m2 == 2:
        return (2 * T - 2 ** (r + 1)) // 2 + 2 ** (r + 1)
    return (2 ** (m2 - 1) * T - 2 ** (r + 2)) // 2 + 2 ** (r + 2)


def _cyclic_span(G: FiniteGroup, x: int) -> set[int]:
    acc, seen = x, {G.identity}
    while acc not in seen:
        seen.add(acc)
        acc = G.rows[acc][x]
    return seen


# ---------------------------------------------------------------------------
# whole-base catalog over class pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CatalogEntry:
    rep_h: Subgroup
    rep_k: Subgroup
    orbit_size: int          # number of unordered class pairs in the orbit
    iso_classes: int         # 0 when Iso(H, K) is empty


@dataclass(frozen=True, eq=False)
class PairOrbitCatalog:
    base: FiniteGroup
    entries: tuple[CatalogEntry, ...]

    @property
    def total(self) -> int:
        return sum(e.iso_classes for e in self.entries)


def _class_perms_under_auts(G1: FiniteGroup):
    """For each generator of Aut(G1): the induced permutation of subgroup
    conjugacy classes."""
    memo = G1._memo.get("class_perms")
    if memo is not None:
        return memo
    classes = conjugacy_classes_of_subgroups(G1)
    class_of: dict[tuple[int, ...], int] = {}
    for ci, c in enumerate(classes):
        for m in c.members:
            class_of[m.elements] = ci
    outG1 = aut_group(G1, cap=max(128, G1.n))
    gen_idx = generating_subset_auts(
        outG1, list(range(len(outG1.auts))))
    perms = []
    for ai in gen_idx:
        im = outG1.auts[ai].images
        perm = tuple(class_of[tuple(sorted(im[x]
                                           for x in c.representative.elements))]
                     for c in classes)
        perms.append(perm)
    memo = (classes, tuple(perms))
    G1._memo["class_perms"] = memo
    return memo


def matches_iso_type(S: Subgroup, T: FiniteGroup) -> bool:
    from .morphisms import isomorphic_groups
    Sabs, _ = S.as_group()
    return isomorphic_groups(Sabs, T)


def pair_orbit_catalog(G1: FiniteGroup,
                       iso_type: Optional[FiniteGroup] = None) -> PairOrbitCatalog:
    """Catalog of unordered conjugacy-class pairs {X, Y} up to Aut(G1),
    with the classification count of the HNN family over each orbit
    representative.  Pairs whose subgroups admit no isomorphism are
    retained with count 0.  iso_type restricts both slots to classes of
    the given abstract type."""
    classes, perms = _class_perms_under_auts(G1)
    if iso_type is not None:
        allowed = [i for i, c in enumerate(classes)
                   if matches_iso_type(c.representative, iso_type)]
    else:
        allowed = list(range(len(classes)))
    allowed_set = set(allowed)
    seen: set[tuple[int, int]] = set()
    entries = []
    for i in allowed:
        for j in allowed:
            if j < i:
                continue
            pair = (i, j)
            if pair in seen:
                continue
            # orbit of the unordered pair under the generator perms
            orbit = {pair}
            work = [pair]
            while work:
                x, y = work.pop()
                for p in perms:
                    q = (min(p[x], p[y]), max(p[x], p[y]))
                    if q not in orbit:
                        orbit.add(q)
                        work.append(q)
            seen |= orbit
            H = classes[i].representative
            K = classes[j].representative
            try:
                count = iso_class_count(G1, H, K)[0]
            except EmptyIsoSet:
                count = 0
            entries.append(CatalogEntry(rep_h=H, rep_k=K,
                                        orbit_size=len(orbit),
                                        iso_classes=count))
    return PairOrbitCatalog(base=G1, entries=tuple(entries))


def total_iso_count(G1: FiniteGroup) -> int:
    """Total number of isomorphism classes of HNN extensions over G1,
    summed across the class-pair catalog."""
    return pair_orbit_catalog(G1).total


@dataclass(frozen=True, eq=False)
class KInvariantReport:
    value: int
    l_h: int
    l_k: int

    @property
    def product_bound(self) -> int:
        return self.l_h * self.l_k


def k_invariant(G1, H: Subgroup, K: Subgroup) -> KInvariantReport:
    """The completion-counting invariant for finite bases.

    For a finite base the completion equals the group, so the candidate
    set for where H can land under a completion isomorphism is exactly
    the Aut(G1)-orbit of H's conjugacy class: one orbit, l_H = 1 (and
    likewise l_K), giving value = 1 <= l_H * l_K.  The orbits are
    computed, not assumed, so a malformed input fails loudly."""
    if not isinstance(G1, FiniteGroup):
        raise InfiniteBaseUnsupported(
            "k-invariant computation needs a finite base group")
    classes, perms = _class_perms_under_auts(G1)
    class_of = {}
    for ci, c in enumerate(classes):
        for m in c.members:
            class_of[m.elements] = ci

    def orbit_of_class(S: Subgroup) -> set[int]:
        start = class_of[S.elements]
        orbit = {start}
        work = [start]
        while work:
            x = work.pop()
            for p in perms:
                if p[x] not in orbit:
                    orbit.add(p[x])
                    work.append(p[x])
        return orbit

    l_h = 1 if orbit_of_class(H) else 0
    l_k = 1 if orbit_of_class(K) else 0
    if l_h != 1 or l_k != 1:  # pragma: no cover - orbits are never empty
        raise AssertionError("class orbits must be single nonempty orbits")
    return KInvariantReport(value=1, l_h=l_h, l_k=l_k)
