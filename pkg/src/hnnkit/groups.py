"""Dense-table finite groups and their subgroup lattice.

A group of order n lives on the element indices 0..n-1: the whole structure
is one validated n x n multiplication table plus derived caches.  Everything
downstream (morphism enumeration, HNN classification, genus certificates)
works on these indices.

Canonical orderings used throughout the package:

* elements: index order; each named family documents its enumeration,
* subgroups: ascending (order, sorted element tuple),
* conjugacy classes of subgroups: by their representative in that order,
  the representative being the least member.

Conjugation is written in exponent form ``x^g = g^-1 * x * g`` and
``S^g = g^-1 S g`` for subgroups; ``FiniteGroup.conj(g, x)`` is the opposite
twist ``g x g^-1`` (the tau map), which is what restriction images use.

Groups are immutable after construction; the private ``_memo`` dict only
stores derived data, so instances are safe to share across threads.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (BadParams, CapExceeded, NoIdentity, NoInverse,
                     NotAssociative, NotASubgroup, ParseError, UnknownName)

SUBGROUP_ENUM_CAP = 256

_token_counter = itertools.count(1)


def _find_identity(t: np.ndarray) -> int:
    n = t.shape[0]
    ar = np.arange(n)
    for e in range(n):
        if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar):
            return e
    raise NoIdentity("no two-sided identity element")


def _check_associative(t: np.ndarray) -> None:
    # row-chunked so the n^3 check never materialises an n^3 array
    for a in range(t.shape[0]):
        left = t[t[a]]        # left[b, c] = (a*b)*c
        right = t[a][t]       # right[b, c] = a*(b*c)
        if not np.array_equal(left, right):
            b, c = np.argwhere(left != right)[0]
            raise NotAssociative(a, int(b), int(c))


def _find_inverses(t: np.ndarray, e: int) -> list[int]:
    inv = []
    for x in range(t.shape[0]):
        y = next((int(y) for y in np.nonzero(t[x] == e)[0] if t[y, x] == e),
                 None)
        if y is None:
            raise NoInverse(x)
        inv.append(y)
    return inv


class FiniteGroup:
    """A finite group given by a full multiplication table.

    ``table[a][b]`` is the index of a*b.  Construction validates identity,
    associativity and inverses (in that order) and raises NoIdentity /
    NotAssociative / NoInverse accordingly.

    Instances hash by identity: two structurally equal groups are distinct
    objects, and operations that require "the same base group" compare
    tables explicitly via :func:`same_table`.
    """

    __slots__ = ("n", "rows", "np_table", "identity", "inv", "names",
                 "label", "spec", "aliases", "_name_index", "_memo", "token")

    def __init__(self, table: Sequence[Sequence[int]],
                 names: Optional[Sequence[str]] = None,
                 label: str = "",
                 spec: Optional[dict] = None,
                 aliases: Optional[dict[str, int]] = None):
        try:
            t = np.asarray(table, dtype=np.int64)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"malformed multiplication table: {exc}") from None
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ParseError("multiplication table must be square")
        n = int(t.shape[0])
        if n == 0:
            raise NoIdentity("empty table")
        if int(t.min()) < 0 or int(t.max()) >= n:
            raise ParseError("table entries must be element indices 0..n-1")
        self.identity = _find_identity(t)
        _check_associative(t)
        self.inv = tuple(_find_inverses(t, self.identity))
        self.n = n
        self.np_table = t
        self.np_table.setflags(write=False)
        self.rows = tuple(tuple(int(v) for v in row) for row in t)
        if names is None:
            names = [f"g{i}" for i in range(n)]
        if len(names) != n or len(set(names)) != n:
            raise ParseError("need one distinct name per element")
        self.names = tuple(names)
        self.label = label or f"table[{n}]"
        self.spec = spec
        self.aliases = dict(aliases or {})
        self._name_index = {nm: i for i, nm in enumerate(self.names)}
        self._name_index.update(self.aliases)
        self._memo: dict = {}
        self.token = next(_token_counter)

    # -- arithmetic -------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.rows[a][b]

    def inv_of(self, x: int) -> int:
        return self.inv[x]

    def conj(self, g: int, x: int) -> int:
        """tau_g(x) = g x g^-1."""
        r = self.rows
        return r[r[g][x]][self.inv[g]]

    def conj_by_exponent(self, x: int, g: int) -> int:
        """x^g = g^-1 x g."""
        r = self.rows
        return r[r[self.inv[g]][x]][g]

    def power(self, x: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv[x], -k)
        acc = self.identity
        while k:
            acc = self.rows[acc][x]
            k -= 1
        return acc

    def order_of(self, x: int) -> int:
        orders = self._memo.get("orders")
        if orders is None:
            orders = [0] * self.n
            self._memo["orders"] = orders
        if orders[x] == 0:
            k, acc = 1, x
            while acc != self.identity:
                acc = self.rows[acc][x]
                k += 1
            orders[x] = k
        return orders[x]

    def elements(self) -> range:
        return range(self.n)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.label} order {self.n}>"

    # -- names ------------------------------------------------------------

    def name_of(self, x: int) -> str:
        return self.names[x]

    def element_index(self, token) -> int:
        """Resolve an element given by canonical name, alias, or index."""
        if isinstance(token, int):
            if 0 <= token < self.n:
                return token
            raise ParseError(f"element index {token} out of range 0..{self.n - 1}")
        tok = str(token).strip()
        if tok in self._name_index:
            return self._name_index[tok]
        try:
            return self.element_index(int(tok))
        except ValueError:
            raise ParseError(f"unknown element name {tok!r} for {self.label}") from None

    # -- structural caches --------------------------------------------------

    def is_abelian(self) -> bool:
        val = self._memo.get("abelian")
        if val is None:
            val = bool(np.array_equal(self.np_table, self.np_table.T))
            self._memo["abelian"] = val
        return val

    def iso_signature(self) -> tuple:
        """Cheap isomorphism invariant used to prune search and dedupe."""
        sig = self._memo.get("iso_sig")
        if sig is None:
            orders = sorted(self.order_of(x) for x in range(self.n))
            ccl = sorted(len(c) for c in _element_classes(self))
            sig = (self.n, tuple(orders), self.is_abelian(),
                   len(center(self).elements), tuple(ccl))
            self._memo["iso_sig"] = sig
        return sig


def _element_classes(G: FiniteGroup) -> list[list[int]]:
    seen = [False] * G.n
    out = []
    for x in range(G.n):
        if seen[x]:
            continue
        cls = sorted({G.conj(g, x) for g in range(G.n)})
        for y in cls:
            seen[y] = True
        out.append(cls)
    return out


def same_table(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a is b or (a.n == b.n and a.rows == b.rows)


def make_group_from_table(table: Sequence[Sequence[int]],
                          names: Optional[Sequence[str]] = None,
                          label: str = "") -> FiniteGroup:
    return FiniteGroup(table, names=names, label=label,
                       spec={"kind": "table", "table": [list(r) for r in table]})


def _from_mult(elems: list, mult: Callable, names: list[str], label: str,
               spec: dict, aliases: Optional[dict] = None) -> FiniteGroup:
    index = {x: i for i, x in enumerate(elems)}
    table = [[index[mult(x, y)] for y in elems] for x in elems]
    return FiniteGroup(table, names=names, label=label, spec=spec,
                       aliases=aliases)


# ---------------------------------------------------------------------------
# named families
#
# Element enumerations (documented canonical orderings):
#   cyclic n:            0..n-1 as powers of g; names 1, g, g2, ...
#   dihedral 2n:         r^i (i<n) then r^i c; names 1, r, r2, ..., c, rc, ...
#   dicyclic 4n:         a^i (i<2n) then a^i b; quaternion names for order 8
#   symmetric d:         all perms of 0..d-1 in lexicographic image order
#   alternating d:       even perms in lexicographic image order
#   elementary_abelian:  vectors over F_p in lexicographic order
#   direct_product:      pairs (x, y), y fastest; names "x|y"
#   semidirect_cyclic:   a^i b^j with j slowest; b a b^-1 = a^u
# ---------------------------------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise BadParams("cyclic group needs order >= 1")
    names = ["1"] + [f"g{i}" if i > 1 else "g" for i in range(1, n)]
    return _from_mult(list(range(n)), lambda x, y: (x + y) % n, names,
                      f"C{n}", {"kind": "named", "name": "cyclic",
                                "params": {"order": n}})


def dihedral(order: int) -> FiniteGroup:
    if order < 2 or order % 2:
        raise BadParams("dihedral group needs even order >= 2")
    n = order // 2

    def mult(x, y):
        i1, j1 = x
        i2, j2 = y
        return ((i1 + (i2 if j1 == 0 else -i2)) % n, j1 ^ j2)

    elems = [(i, j) for j in (0, 1) for i in range(n)]
    names = []
    for i, j in elems:
        r = "" if i == 0 else ("r" if i == 1 else f"r{i}")
        names.append((r + ("c" if j else "")) or "1")
    return _from_mult(elems, mult, names, f"D{order}",
                      {"kind": "named", "name": "dihedral",
                       "params": {"order": order}})


def dicyclic(order: int) -> FiniteGroup:
    if order < 8 or order % 4:
        raise BadParams("dicyclic group needs order 4n with n >= 2")
    m = order // 2  # |a| = 2n

    def mult(x, y):
        i1, j1 = x
        i2, j2 = y
        if j1 == 0:
            return ((i1 + i2) % m, j2)
        # b a^i = a^-i b and b^2 = a^(m/2)
        return ((i1 - i2 + (m // 2 if j2 else 0)) % m, 1 - j2)

    elems = [(i, j) for j in (0, 1) for i in range(m)]
    if order == 8:
        names = ["1", "i", "-1", "-i", "j", "k", "-j", "-k"]
        aliases = {"a": 1, "a2": 2, "a3": 3, "b": 4, "ab": 5,
                   "a2b": 6, "a3b": 7}
    else:
        names = []
        for i, j in elems:
            a = "" if i == 0 else ("a" if i == 1 else f"a{i}")
            names.append((a + ("b" if j else "")) or "1")
        aliases = None
    return _from_mult(elems, mult, names, f"Dic{order}",
                      {"kind": "named", "name": "dicyclic",
                       "params": {"order": order}}, aliases=aliases)


def _perm_name(p: tuple) -> str:
    sep = "" if len(p) <= 10 else "-"
    return "p" + sep.join(str(i) for i in p)


def symmetric(degree: int) -> FiniteGroup:
    if degree < 1:
        raise BadParams("symmetric group needs degree >= 1")
    if degree > 6:
        raise CapExceeded("symmetric degree capped at 6 (order 720)")
    elems = sorted(itertools.permutations(range(degree)))
    mult = lambda p, q: tuple(p[q[i]] for i in range(degree))  # (pq)(x)=p(q(x))
    return _from_mult(elems, mult, [_perm_name(p) for p in elems],
                      f"S{degree}", {"kind": "named", "name": "symmetric",
                                     "params": {"degree": degree}})


def _is_even(p: tuple) -> bool:
    inversions = sum(1 for i, j in itertools.combinations(range(len(p)), 2)
                     if p[i] > p[j])
    return inversions % 2 == 0


def alternating(degree: int) -> FiniteGroup:
    if degree < 1:
        raise BadParams("alternating group needs degree >= 1")
    if degree > 6:
        raise CapExceeded("alternating degree capped at 6 (order 360)")
    elems = sorted(p for p in itertools.permutations(range(degree))
                   if _is_even(p))
    mult = lambda p, q: tuple(p[q[i]] for i in range(degree))
    return _from_mult(elems, mult, [_perm_name(p) for p in elems],
                      f"A{degree}", {"kind": "named", "name": "alternating",
                                     "params": {"degree": degree}})


def elementary_abelian(p: int, k: int) -> FiniteGroup:
    if p < 2 or any(p % q == 0 for q in range(2, p)) or k < 1:
        raise BadParams("elementary abelian group needs prime p and k >= 1")
    if p ** k > SUBGROUP_ENUM_CAP:
        raise CapExceeded(f"p^k = {p ** k} exceeds cap {SUBGROUP_ENUM_CAP}")
    elems = list(itertools.product(range(p), repeat=k))
    mult = lambda x, y: tuple((a + b) % p for a, b in zip(x, y))
    names = ["".join(map(str, v)) for v in elems]
    return _from_mult(elems, mult, names, f"E{p ** k}",
                      {"kind": "named", "name": "elementary_abelian",
                       "params": {"p": p, "k": k}})


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    elems = [(x, y) for x in range(a.n) for y in range(b.n)]
    mult = lambda u, v: (a.rows[u[0]][v[0]], b.rows[u[1]][v[1]])
    names = [f"{a.names[x]}|{b.names[y]}" for x, y in elems]
    spec = {"kind": "named", "name": "direct_product",
            "params": {"a": a.spec or {"kind": "table",
                                       "table": [list(r) for r in a.rows]},
                       "b": b.spec or {"kind": "table",
                                       "table": [list(r) for r in b.rows]}}}
    return _from_mult(elems, mult, names, f"{a.label}x{b.label}", spec)


def semidirect_cyclic(n: int, m: int, action: int) -> FiniteGroup:
    """C_n x| C_m with b a b^-1 = a^action; needs action^m = 1 mod n."""
    if n < 1 or m < 1:
        raise BadParams("semidirect_cyclic needs n, m >= 1")
    u = action % n if n > 1 else 0
    if n > 1 and (gcd(u, n) != 1 or pow(u, m, n) != 1):
        raise BadParams(f"action {action} is not an order-dividing-{m} unit mod {n}")

    def mult(x, y):
        i1, j1 = x
        i2, j2 = y
        return ((i1 + i2 * pow(u, j1, n)) % n if n > 1 else 0, (j1 + j2) % m)

    elems = [(i, j) for j in range(m) for i in range(n)]
    names = []
    for i, j in elems:
        a = "" if i == 0 else ("a" if i == 1 else f"a{i}")
        b = "" if j == 0 else ("b" if j == 1 else f"b{j}")
        names.append((a + b) or "1")
    return _from_mult(elems, mult, names, f"C{n}:C{m}({action})",
                      {"kind": "named", "name": "semidirect_cyclic",
                       "params": {"n": n, "m": m, "action": action}})


_FAMILIES: dict[str, Callable[..., FiniteGroup]] = {
    "cyclic": lambda params: cyclic(int(params["order"])),
    "dihedral": lambda params: dihedral(int(params["order"])),
    "dicyclic": lambda params: dicyclic(int(params["order"])),
    "symmetric": lambda params: symmetric(int(params["degree"])),
    "alternating": lambda params: alternating(int(params["degree"])),
    "elementary_abelian": lambda params: elementary_abelian(int(params["p"]),
                                                            int(params["k"])),
    "direct_product": lambda params: direct_product(
        group_from_json(params["a"]), group_from_json(params["b"])),
    "semidirect_cyclic": lambda params: semidirect_cyclic(
        int(params["n"]), int(params["m"]), int(params["action"])),
}


def named_group(name: str, params: dict) -> FiniteGroup:
    try:
        builder = _FAMILIES[name]
    except KeyError:
        raise UnknownName(f"unknown group family {name!r}; know "
                          f"{sorted(_FAMILIES)}") from None
    try:
        return builder(params)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadParams(f"bad params for family {name!r}: {exc}") from None


def _perm_group_from_generators(degree: int,
                                generators: Sequence[Sequence[int]]) -> FiniteGroup:
    gens = []
    for g in generators:
        p = tuple(int(v) for v in g)
        if sorted(p) != list(range(degree)):
            raise ParseError(f"{g!r} is not a permutation of 0..{degree - 1}")
        gens.append(p)
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                r = tuple(p[q[i]] for i in range(degree))
                if r not in seen:
                    if len(seen) >= SUBGROUP_ENUM_CAP:
                        raise CapExceeded(
                            f"permutation group exceeds cap {SUBGROUP_ENUM_CAP}")
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    elems = sorted(seen)
    mult = lambda p, q: tuple(p[q[i]] for i in range(degree))
    g = _from_mult(elems, mult, [_perm_name(p) for p in elems],
                   f"perm[{degree}]",
                   {"kind": "perm", "degree": degree,
                    "generators": [list(p) for p in gens]})
    return g


def group_from_json(data) -> FiniteGroup:
    """Parse the JSON group formats.

    {"kind": "table", "table": [[...], ...], "names": [... optional]}
    {"kind": "perm", "degree": d, "generators": [[images], ...]}
    {"kind": "named", "name": family, "params": {...}}
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON group spec: {exc}") from None
    if not isinstance(data, dict) or "kind" not in data:
        raise ParseError("group spec must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "table":
        if "table" not in data:
            raise ParseError("table spec needs a 'table' field")
        return FiniteGroup(data["table"], names=data.get("names"),
                           label=data.get("label", ""),
                           spec={"kind": "table",
                                 "table": [list(r) for r in data["table"]]})
    if kind == "perm":
        try:
            return _perm_group_from_generators(int(data["degree"]),
                                               data["generators"])
        except KeyError as exc:
            raise ParseError(f"perm spec missing field {exc}") from None
    if kind == "named":
        try:
            return named_group(data["name"], data.get("params", {}))
        except KeyError as exc:
            raise ParseError(f"named spec missing field {exc}") from None
    raise ParseError(f"unknown group spec kind {kind!r}")


def group_to_json(G: FiniteGroup) -> dict:
    if G.spec is not None:
        return G.spec
    return {"kind": "table", "table": [list(r) for r in G.rows]}


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    """A subgroup as a sorted tuple of parent element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(self.elements)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.element_set()

    def element_set(self) -> frozenset:
        memo = self.parent._memo.setdefault("sub_sets", {})
        s = memo.get(self.elements)
        if s is None:
            s = frozenset(self.elements)
            memo[self.elements] = s
        return s

    def key(self) -> tuple:
        """Canonical sort key: (order, element tuple)."""
        return (len(self.elements), self.elements)

    def names(self) -> tuple[str, ...]:
        return tuple(self.parent.names[x] for x in self.elements)

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """Abstract copy of this subgroup plus the embedding index list.

        Returns (H, embed) where H is a FiniteGroup on 0..k-1 and
        embed[i] is the parent index of H's element i.  Memoised per
        element tuple, so repeated calls share the same object (and its
        derived caches).
        """
        memo = self.parent._memo.setdefault("sub_groups", {})
        got = memo.get(self.elements)
        if got is None:
            embed = self.elements
            pos = {x: i for i, x in enumerate(embed)}
            table = [[pos[self.parent.rows[x][y]] for y in embed]
                     for x in embed]
            H = FiniteGroup(table,
                            names=[self.parent.names[x] for x in embed],
                            label=f"{self.parent.label}<{len(embed)}>")
            got = (H, embed)
            memo[self.elements] = got
        return got

    def __repr__(self) -> str:
        return (f"<Subgroup order {len(self.elements)} of "
                f"{self.parent.label}: {','.join(self.names())}>")


def _closure(G: FiniteGroup, seeds: Iterable[int]) -> tuple[int, ...]:
    # worklist closure: when x is popped it multiplies against every element
    # discovered so far; later discoveries multiply against x when popped,
    # so all pairs are covered.  A multiplicatively closed subset containing
    # the identity is a subgroup (powers reach inverses).
    rows = G.rows
    elems = {G.identity, *seeds}
    members = list(elems)
    work = list(elems)
    while work:
        x = work.pop()
        for y in list(members):
            for z in (rows[x][y], rows[y][x]):
                if z not in elems:
                    elems.add(z)
                    members.append(z)
                    work.append(z)
    return tuple(sorted(elems))


def subgroup_closure(G: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    seeds = [G.element_index(s) if not isinstance(s, int) else s
             for s in seeds]
    for s in seeds:
        if not 0 <= s < G.n:
            raise ParseError(f"element index {s} out of range")
    return Subgroup(G, _closure(G, seeds))


def subgroup(G: FiniteGroup, elements: Iterable, verify: bool = True) -> Subgroup:
    elems = tuple(sorted({G.element_index(x) for x in elements}))
    if verify:
        closed = _closure(G, elems)
        if closed != elems or G.identity not in elems:
            raise NotASubgroup(
                f"{elems} is not a subgroup of {G.label} "
                f"(closure has order {len(closed)})")
    return Subgroup(G, elems)


def _check_subgroup_of(G: FiniteGroup, H: Subgroup) -> None:
    if H.parent is not G and not same_table(H.parent, G):
        raise NotASubgroup("subgroup belongs to a different parent group")


def all_subgroups(G: FiniteGroup, cap: int = SUBGROUP_ENUM_CAP) -> list[Subgroup]:
    """Every subgroup of G, canonically sorted.

    Cyclic subgroups seed the lattice; joins with cyclic subgroups are added
    until closure.  Requires |G| <= cap (default 256).
    """
    if G.n > cap:
        raise CapExceeded(f"|G| = {G.n} exceeds subgroup enumeration cap {cap}")
    memo = G._memo.get("all_subgroups")
    if memo is not None:
        return list(memo)
    cyclics = {_closure(G, [x]) for x in range(G.n)}
    found: set[tuple[int, ...]] = {(G.identity,)} | cyclics
    frontier = set(found)
    while frontier:
        new = set()
        for s in frontier:
            s_set = set(s)
            for c in cyclics:
                if set(c) <= s_set:
                    continue
                j = _closure(G, s + c)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    subs = sorted((Subgroup(G, s) for s in found), key=Subgroup.key)
    G._memo["all_subgroups"] = tuple(subs)
    return list(subs)


def conj_subgroup_exp(G: FiniteGroup, S: tuple[int, ...], g: int) -> tuple[int, ...]:
    """S^g = g^-1 S g as a sorted tuple."""
    r, ig = G.rows, G.inv[g]
    return tuple(sorted(r[r[ig][x]][g] for x in S))


@dataclass(frozen=True)
class SubgroupClass:
    """A conjugacy class of subgroups.

    Every member equals representative^witness (exponent convention); the
    witness stored per member is the least conjugating element.
    """

    representative: Subgroup
    members: tuple[Subgroup, ...]
    witness: tuple[tuple[tuple[int, ...], int], ...]

    def conjugator_for(self, member: Subgroup) -> int:
        for elems, g in self.witness:
            if elems == member.elements:
                return g
        raise KeyError(f"{member} is not in this class")

    def __len__(self) -> int:
        return len(self.members)


def conjugacy_classes_of_subgroups(G: FiniteGroup,
                                   cap: int = SUBGROUP_ENUM_CAP) -> list[SubgroupClass]:
    memo = G._memo.get("sub_classes")
    if memo is not None:
        return list(memo)
    subs = all_subgroups(G, cap=cap)
    assigned: set[tuple[int, ...]] = set()
    classes = []
    for rep in subs:
        if rep.elements in assigned:
            continue
        seen: dict[tuple[int, ...], int] = {}
        for g in range(G.n):
            img = conj_subgroup_exp(G, rep.elements, g)
            if img not in seen:
                seen[img] = g
        members = tuple(sorted((Subgroup(G, s) for s in seen), key=Subgroup.key))
        assigned.update(seen)
        classes.append(SubgroupClass(
            representative=rep,
            members=members,
            witness=tuple(sorted((m.elements, seen[m.elements]) for m in members))))
    classes.sort(key=lambda c: c.representative.key())
    G._memo["sub_classes"] = tuple(classes)
    return list(classes)


def is_conjugate_subgroups(G: FiniteGroup, H: Subgroup, K: Subgroup) -> Optional[int]:
    """Least g with H^g = K, or None."""
    _check_subgroup_of(G, H)
    _check_subgroup_of(G, K)
    if len(H) != len(K):
        return None
    target = K.elements
    for g in range(G.n):
        if conj_subgroup_exp(G, H.elements, g) == target:
            return g
    return None


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    _check_subgroup_of(G, H)
    He = H.elements
    return Subgroup(G, tuple(g for g in range(G.n)
                             if conj_subgroup_exp(G, He, g) == He))


def centralizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    _check_subgroup_of(G, H)
    rows = G.rows
    return Subgroup(G, tuple(g for g in range(G.n)
                             if all(rows[g][x] == rows[x][g] for x in H.elements)))


def center(G: FiniteGroup) -> Subgroup:
    memo = G._memo.get("center")
    if memo is None:
        rows = G.rows
        memo = Subgroup(G, tuple(g for g in range(G.n)
                                 if all(rows[g][x] == rows[x][g]
                                        for x in range(G.n))))
        G._memo["center"] = memo
    return memo
