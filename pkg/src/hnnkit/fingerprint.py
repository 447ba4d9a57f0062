"""Finite-quotient fingerprints: an independent oracle for completions.

For G = HNN(G1, H, K, f) = <G1, t | t h t^-1 = f(h), h in H> with finite
G1 and a finite probe group Q, counting homomorphisms splits over the
stable letter:

    |Hom(G, Q)| = sum over phi in Hom(G1, Q) of
                  #{ q in Q : q phi(h) q^-1 = phi(f(h)) for h generating H }

Two residually finite groups with isomorphic profinite completions have
equal hom counts into every finite group, so agreement across a probe set
is a *necessary* condition for profinite (hence abstract) isomorphism.
The oracle therefore refutes isomorphism when counts differ and stays
silent otherwise -- an Equal outcome never claims the completions agree,
only that no probe in the set separates them.

The counting is independent of the orbit machinery used for
classification: it sees only the presentation, which is what makes it a
useful cross-check.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BadParams, CapExceeded, ParseError
from .groups import FiniteGroup, named_group
from .hnn import HnnData
from .morphisms import _extend_partial, generating_sequence

HOM_CAP = 2_000_000
PROBE_ORDER_CAP = 120


# ---------------------------------------------------------------------------
# probe catalog
# ---------------------------------------------------------------------------

# nonabelian semidirect products C_n x| C_m with faithful-enough actions;
# chosen to cover orders the standard families miss (21, 39, 55, ...)
_SEMIDIRECT_PROBES = (
    (5, 4, 2),    # order 20
    (7, 3, 2),    # order 21
    (9, 3, 4),    # order 27, exponent 9
    (13, 3, 3),   # order 39
    (7, 6, 3),    # order 42, the holomorph of C7
    (13, 4, 5),   # order 52
    (11, 5, 3),   # order 55
)


@dataclass(frozen=True, eq=False)
class ProbeSet:
    """An ordered catalog of finite probe groups (deduplicated by
    construction, sorted by (order, label))."""

    groups: tuple[FiniteGroup, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.groups)

    def __len__(self) -> int:
        return len(self.groups)


def default_probes(order_bound: int = 60) -> ProbeSet:
    """Probes of order <= order_bound: cyclic, dihedral, dicyclic,
    elementary abelian, S4, A4, A5, and selected metacyclic groups.

    The families are curated to avoid isomorphic repeats (D4 is the Klein
    group, S3 is D6, so those spellings are skipped).
    """
    if order_bound < 2:
        raise BadParams("probe order bound must be at least 2")
    if order_bound > PROBE_ORDER_CAP:
        raise CapExceeded(f"probe order bound {order_bound} exceeds "
                          f"{PROBE_ORDER_CAP}")
    probes: list[FiniteGroup] = []
    for n in range(2, order_bound + 1):
        probes.append(named_group("cyclic", {"order": n}))
    for n in range(6, order_bound + 1, 2):
        probes.append(named_group("dihedral", {"order": n}))
    for n in range(8, order_bound + 1, 4):
        probes.append(named_group("dicyclic", {"order": n}))
    for p in (2, 3, 5, 7):
        k = 2
        while p ** k <= order_bound:
            probes.append(named_group("elementary_abelian", {"p": p, "k": k}))
            k += 1
    if order_bound >= 12:
        probes.append(named_group("alternating", {"degree": 4}))
    if order_bound >= 24:
        probes.append(named_group("symmetric", {"degree": 4}))
    if order_bound >= 60:
        probes.append(named_group("alternating", {"degree": 5}))
    for n, m, action in _SEMIDIRECT_PROBES:
        if n * m <= order_bound:
            probes.append(named_group("semidirect_cyclic",
                                      {"n": n, "m": m, "action": action}))
    probes.sort(key=lambda g: (g.n, g.label))
    return ProbeSet(groups=tuple(probes))


# ---------------------------------------------------------------------------
# hom counting
# ---------------------------------------------------------------------------

def _hom_images_array(G: FiniteGroup, Q: FiniteGroup,
                      cap: int = HOM_CAP) -> np.ndarray:
    """All homomorphisms G -> Q as an (n_homs, |G|) index array, rows in
    lexicographic order.  Cached per probe; rows are kept as a flat array
    precisely so large hom sets stay cheap."""
    memo = G._memo.setdefault("hom_arrays", {})
    got = memo.get(Q.token)
    if got is not None:
        return got
    gens = generating_sequence(G)
    cand: dict[int, list[int]] = {}
    for g in gens:
        og = G.order_of(g)
        cand.setdefault(og, [q for q in range(Q.n)
                             if og % Q.order_of(q) == 0])
    rows: list[tuple[int, ...]] = []

    def rec(i: int, dom: list[int], img: dict[int, int]):
        if i == len(gens):
            if len(rows) >= cap:
                raise CapExceeded(
                    f"|Hom({G.label}, {Q.label})| exceeds cap {cap}")
            rows.append(tuple(img[x] for x in range(G.n)))
            return
        g = gens[i]
        if g in img:
            rec(i + 1, dom, img)
            return
        for q in cand[G.order_of(g)]:
            ext = _extend_partial(G, Q, dom, img, g, q)
            if ext is not None:
                rec(i + 1, *ext)

    rec(0, [G.identity], {G.identity: Q.identity})
    rows.sort()
    arr = np.array(rows, dtype=np.int32).reshape(len(rows), G.n)
    memo[Q.token] = arr
    return arr


def _conj_table(Q: FiniteGroup) -> np.ndarray:
    """CT[q, x] = q^-1 x q."""
    got = Q._memo.get("conj_table")
    if got is None:
        T = Q.np_table
        A = T[np.asarray(Q.inv)]                     # A[q, x] = q^-1 x
        got = T[A, np.arange(Q.n)[:, None]]          # (q^-1 x) q
        Q._memo["conj_table"] = got
    return got


def hom_count_hnn(d: HnnData, Q: FiniteGroup, cap: int = HOM_CAP) -> int:
    """|Hom(HNN(G1,H,K,f), Q)|, summing the conjugator-fiber sizes over
    all homomorphisms of the base."""
    Habs, emb = d.sub_h.as_group()
    hg = [emb[g] for g in generating_sequence(Habs)]
    fp = dict(zip(d.sub_h.elements, d.f_parent()))
    phi = _hom_images_array(d.base, Q, cap=cap)
    ct = _conj_table(Q)
    A = phi[:, hg]                      # images of the H-generators
    B = phi[:, [fp[h] for h in hg]]     # images of their f-values
    total = 0
    # q phi(h) q^-1 = phi(f(h))  <=>  phi(h) = q^-1 phi(f(h)) q
    for q in range(Q.n):
        total += int((ct[q][B] == A).all(axis=1).sum())
    return total


# ---------------------------------------------------------------------------
# fingerprint vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FingerprintVector:
    """Hom counts of one HNN datum against a probe set, as sorted
    (order, label, count) triples."""

    entries: tuple[tuple[int, str, int], ...]

    def to_json_dict(self) -> dict:
        return {"entries": [list(e) for e in self.entries]}

    def count_for(self, label: str) -> int:
        for _, lab, c in self.entries:
            if lab == label:
                return c
        raise BadParams(f"no probe labelled {label!r} in this fingerprint")


def fingerprint_from_json(data) -> FingerprintVector:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON fingerprint: {exc}") from None
    try:
        return FingerprintVector(entries=tuple(
            (int(o), str(l), int(c)) for o, l, c in data["entries"]))
    except KeyError as exc:
        raise ParseError(f"fingerprint spec missing field {exc}") from None


def fingerprint(d: HnnData, probes: Optional[ProbeSet] = None,
                order_bound: int = 60, cap: int = HOM_CAP) -> FingerprintVector:
    if probes is None:
        probes = default_probes(order_bound)
    entries = sorted((Q.n, Q.label, hom_count_hnn(d, Q, cap=cap))
                     for Q in probes.groups)
    return FingerprintVector(entries=tuple(entries))


@dataclass(frozen=True)
class FingerprintComparison:
    """Outcome of comparing two fingerprints over the same probe set.

    kind "equal" means no probe in the set separates the data; it is not
    a claim that the profinite completions agree.  kind "first-difference"
    reports the least (order, label) probe with distinct counts, which
    certifies the two groups are not profinitely (hence not abstractly)
    isomorphic.
    """

    kind: str                     # "equal" | "first-difference"
    probe_order: Optional[int] = None
    probe_label: Optional[str] = None
    left: Optional[int] = None
    right: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "probe_order": self.probe_order,
                "probe_label": self.probe_label,
                "left": self.left, "right": self.right}


def compare_fingerprints(a: FingerprintVector,
                         b: FingerprintVector) -> FingerprintComparison:
    keys_a = [(o, l) for o, l, _ in a.entries]
    keys_b = [(o, l) for o, l, _ in b.entries]
    if keys_a != keys_b:
        raise BadParams("fingerprints were taken over different probe sets")
    for (o, l, ca), (_, _, cb) in zip(a.entries, b.entries):
        if ca != cb:
            return FingerprintComparison(kind="first-difference",
                                         probe_order=o, probe_label=l,
                                         left=ca, right=cb)
    return FingerprintComparison(kind="equal")


def separating_probe(da: HnnData, db: HnnData,
                     probes: Optional[ProbeSet] = None,
                     order_bound: int = 60) -> FingerprintComparison:
    """Compare two data probe by probe, in (order, label) order, stopping
    at the first separation; cheaper than two full fingerprints when a
    small probe already separates."""
    if probes is None:
        probes = default_probes(order_bound)
    for Q in sorted(probes.groups, key=lambda g: (g.n, g.label)):
        ca = hom_count_hnn(da, Q)
        cb = hom_count_hnn(db, Q)
        if ca != cb:
            return FingerprintComparison(kind="first-difference",
                                         probe_order=Q.n, probe_label=Q.label,
                                         left=ca, right=cb)
    return FingerprintComparison(kind="equal")
