"""Command-line surface for hnnkit.

Every command takes group inputs in three interchangeable forms:

* inline named specs     ``named:dihedral:8``, ``named:elementary_abelian:2:3``,
                         ``named:direct_product:(named:cyclic:11):(named:cyclic:2)``
* a path to a JSON file  (group formats of the core library)
* a raw JSON object string

Subgroups are given as comma-separated *generator* lists using the family's
documented element names (``--H "r2,c"``) or raw indices; the subgroup
generated by the list is used.  Isomorphisms are given as assignment lists
``--f "r2->c,c->r2"`` covering a generating set of H (images of products
are filled in, contradictions are rejected).

Output is deterministic: identical requests produce byte-identical output,
and ``--format json`` emits sorted-key JSON suitable for round-tripping.

Exit codes: 0 success; 2 parse/validation failure; 3 enumeration cap
exceeded; 4 certificate/closed-form hypothesis not verified; 5 any other
domain failure.
"""
from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click

from .errors import (BadParams, BaseMismatch, CapExceeded, HnnkitError,
                     HypothesisNotVerified, NotASubgroup, ParseError,
                     UnknownName)
from .fingerprint import (compare_fingerprints, default_probes, fingerprint,
                          hom_count_hnn)
from .genus import genus_report
from .groups import (FiniteGroup, Subgroup, group_from_json, group_to_json,
                     subgroup_closure)
from .hnn import (HnnData, build_gamma_bar, hnn_data, hnn_from_json,
                  hnn_to_json, hnn_isomorphic, iso_class_count,
                  pair_orbit_catalog, total_iso_count, verify_witness)
from .morphisms import GroupMap, _extend_partial

_PARSE_ERRORS = (ParseError, BadParams, UnknownName, NotASubgroup,
                 BaseMismatch)

_INLINE_ARITIES = {
    "cyclic": ("order",),
    "dihedral": ("order",),
    "dicyclic": ("order",),
    "symmetric": ("degree",),
    "alternating": ("degree",),
    "elementary_abelian": ("p", "k"),
    "semidirect_cyclic": ("n", "m", "action"),
    "direct_product": ("a", "b"),
}


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

def _split_args(body: str) -> list[str]:
    """Split a colon-separated argument list, respecting parentheses."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced ')' in group spec {body!r}")
        if ch == ":" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError(f"unbalanced '(' in group spec {body!r}")
    parts.append("".join(cur))
    return parts


def _inline_spec_to_json(text: str) -> dict:
    body = text[len("named:"):]
    parts = _split_args(body)
    family, args = parts[0], parts[1:]
    if family not in _INLINE_ARITIES:
        raise UnknownName(f"unknown group family {family!r} in {text!r}")
    fields = _INLINE_ARITIES[family]
    if len(args) != len(fields):
        raise ParseError(f"family {family!r} takes {len(fields)} argument(s) "
                         f"{fields}, got {len(args)} in {text!r}")
    params = {}
    for name, arg in zip(fields, args):
        arg = arg.strip()
        if family == "direct_product":
            if not (arg.startswith("(") and arg.endswith(")")):
                raise ParseError(f"direct_product factors must be "
                                 f"parenthesized specs, got {arg!r}")
            inner = arg[1:-1]
            if not inner.startswith("named:"):
                raise ParseError(f"factor spec must start with 'named:', "
                                 f"got {inner!r}")
            params[name] = _inline_spec_to_json(inner)
        else:
            try:
                params[name] = int(arg)
            except ValueError:
                raise ParseError(f"argument {name!r} of family {family!r} "
                                 f"must be an integer, got {arg!r}") from None
    return {"kind": "named", "name": family, "params": params}


def parse_group_spec(text: str) -> FiniteGroup:
    """Inline named spec, JSON file path, or raw JSON object string."""
    text = text.strip()
    if text.startswith("named:"):
        return group_from_json(_inline_spec_to_json(text))
    if text.startswith("{"):
        try:
            return group_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON group spec: {exc}") from None
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            try:
                return group_from_json(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{text}: bad JSON: {exc}") from None
    raise ParseError(f"group spec {text!r} is neither a named: spec, "
                     "a JSON object, nor an existing file")


def parse_subgroup(G: FiniteGroup, text: str) -> Subgroup:
    """Comma-separated generator names/indices, or a JSON list; the
    generated subgroup is returned."""
    text = text.strip()
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON element list: {exc}") from None
    else:
        items = [t for t in (s.strip() for s in text.split(",")) if t]
    if not items:
        raise ParseError("empty subgroup generator list")
    return subgroup_closure(G, [G.element_index(t) for t in items])


def parse_iso(G: FiniteGroup, H: Subgroup, K: Subgroup, text: str) -> HnnData:
    """``a->b,c->d`` assignments (or a JSON pair list) covering a
    generating set of H; products are extended automatically."""
    text = text.strip()
    if text.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON map: {exc}") from None
        pairs = [(G.element_index(a), G.element_index(b)) for a, b in raw]
    else:
        pairs = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "->" not in chunk:
                raise ParseError(f"map entry {chunk!r} is not of the form "
                                 "'element->image'")
            a, b = chunk.split("->", 1)
            pairs.append((G.element_index(a.strip()),
                          G.element_index(b.strip())))
    Habs, hemb = H.as_group()
    Kabs, kemb = K.as_group()
    hpos = {x: i for i, x in enumerate(hemb)}
    kpos = {x: i for i, x in enumerate(kemb)}
    dom = [Habs.identity]
    img = {Habs.identity: Kabs.identity}
    for a, b in pairs:
        if a not in hpos:
            raise ParseError(f"map source {G.names[a]!r} is not in H")
        if b not in kpos:
            raise ParseError(f"map image {G.names[b]!r} is not in K")
        ha, kb = hpos[a], kpos[b]
        if ha in img:
            if img[ha] != kb:
                raise ParseError(f"map assigns {G.names[a]!r} twice with "
                                 "conflicting images")
            continue
        ext = _extend_partial(Habs, Kabs, dom, img, ha, kb)
        if ext is None:
            raise ParseError(f"assignment {G.names[a]!r}->{G.names[b]!r} "
                             "contradicts the multiplicative extension of "
                             "the earlier assignments")
        dom, img = ext
    missing = [hemb[i] for i in range(Habs.n) if i not in img]
    if missing:
        raise ParseError("map does not determine images for "
                         f"{[G.names[x] for x in missing]}; add assignments "
                         "for a full generating set of H")
    f = GroupMap(Habs, Kabs, tuple(img[i] for i in range(Habs.n)))
    return hnn_data(G, H, K, f)


def _load_hnn_file(path: str) -> HnnData:
    text = path.strip()
    if text.startswith("{"):
        return hnn_from_json(text)
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            return hnn_from_json(fh.read())
    raise ParseError(f"HNN datum {path!r} is neither a JSON object nor an "
                     "existing file")


def _resolve_datum(base: Optional[str], h: Optional[str], k: Optional[str],
                   f: Optional[str], file_arg: Optional[str]) -> HnnData:
    """A datum comes either from --base/--H/--K/--f or from a JSON file."""
    if file_arg:
        return _load_hnn_file(file_arg)
    if not base or not h:
        raise ParseError("need either a JSON datum (--a/--b) or "
                         "--base with --H")
    G = parse_group_spec(base)
    H = parse_subgroup(G, h)
    K = parse_subgroup(G, k) if k else H
    if f:
        return parse_iso(G, H, K, f)
    if H.elements == K.elements:
        ident = tuple(range(len(H.elements)))
        return hnn_data(G, H, K, GroupMap(H.as_group()[0],
                                          H.as_group()[0], ident))
    raise ParseError("--f is required when H and K differ")


def _check_cap(G: FiniteGroup, cap_aut: int) -> None:
    if cap_aut > 4096:
        raise CapExceeded(f"--cap-aut {cap_aut} exceeds the sanity limit 4096")
    if G.n > cap_aut:
        raise CapExceeded(f"|{G.label}| = {G.n} exceeds --cap-aut {cap_aut}")


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _emit(fmt: str, text_lines: list[str], obj: dict) -> None:
    if fmt == "json":
        click.echo(json.dumps(obj, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


def _f_pairs(d: HnnData) -> list[list[int]]:
    return [[h, v] for h, v in zip(d.sub_h.elements, d.f_parent())]


def _f_text(d: HnnData) -> str:
    G = d.base
    return ", ".join(f"{G.names[h]}->{G.names[v]}"
                     for h, v in zip(d.sub_h.elements, d.f_parent()))


def _run(fn):
    """Map domain errors to diagnostics + exit codes."""
    try:
        fn()
    except _PARSE_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except CapExceeded as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except HypothesisNotVerified as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)
    except HnnkitError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(5)


_common = [
    click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                 default="text", show_default=True),
    click.option("--cap-aut", type=int, default=128, show_default=True,
                 help="bound on |base| for automorphism enumeration"),
    click.option("--threads", type=int, default=1, show_default=True,
                 help="advisory worker bound (results are identical "
                      "regardless of the value)"),
]


def _with_common(cmd):
    for opt in reversed(_common):
        cmd = opt(cmd)
    return cmd


@click.group()
def main() -> None:
    """Classify HNN-extensions of finite groups, certify their profinite
    genus, and fingerprint them through finite quotients."""


@main.command()
@click.option("--base", required=True, help="base group spec")
@click.option("--h", "--H", "h", required=True, help="generators of H")
@click.option("--k", "--K", "k", default=None, help="generators of K "
              "(defaults to H)")
@_with_common
def classify(base, h, k, fmt, cap_aut, threads):
    """Count isomorphism classes of HNN(base, H, K, f) over all f."""
    def go():
        G = parse_group_spec(base)
        _check_cap(G, cap_aut)
        H = parse_subgroup(G, h)
        K = parse_subgroup(G, k) if k else H
        count, reps = iso_class_count(G, H, K)
        datas = [hnn_data(G, H, K, f) for f in reps]
        lines = [f"{count} isomorphism classes"]
        lines += [f"  representative: f: {_f_text(d)}" for d in datas]
        _emit(fmt, lines, {
            "command": "classify", "count": count,
            "H": list(H.elements), "K": list(K.elements),
            "representatives": [_f_pairs(d) for d in datas]})
    _run(go)


@main.command()
@click.option("--base", required=True)
@click.option("--h", "--H", "h", required=True)
@click.option("--k", "--K", "k", default=None)
@_with_common
def orbits(base, h, k, fmt, cap_aut, threads):
    """Orbit partition of Iso(H, K) under the twisting action, with the
    induced generator permutations."""
    def go():
        G = parse_group_spec(base)
        _check_cap(G, cap_aut)
        H = parse_subgroup(G, h)
        K = parse_subgroup(G, k) if k else H
        gb = build_gamma_bar(G, H, K)
        orbs = gb.orbits()
        lines = [f"{len(gb.iso_set)} isomorphisms H -> K, "
                 f"{len(orbs)} orbits, {len(gb.generators)} generator "
                 "permutations"]
        for o in orbs:
            rep = hnn_data(G, H, K, gb.iso_set[o[0]])
            lines.append(f"  orbit size {len(o)}  rep f: {_f_text(rep)}")
        _emit(fmt, lines, {
            "command": "orbits",
            "iso_count": len(gb.iso_set),
            "orbits": [[list(gb.iso_set[i]) for i in o] for o in orbs],
            "generators": [list(p) for p in gb.generators]})
    _run(go)


@main.command()
@click.option("--base", required=True)
@click.option("--h", "--H", "h", required=True)
@click.option("--k", "--K", "k", default=None)
@click.option("--f", "fmap", default=None, help="assignments h->k "
              "(defaults to the identity when K = H)")
@_with_common
def genus(base, h, k, fmap, fmt, cap_aut, threads):
    """Certified profinite genus of HNN(base, H, K, f)."""
    def go():
        d = _resolve_datum(base, h, k, fmap, None)
        _check_cap(d.base, cap_aut)
        rep = genus_report(d)
        _emit(fmt, rep.render_text().splitlines(),
              {"command": "genus", **rep.to_json_dict()})
    _run(go)


@main.command()
@click.option("--base", default=None, help="base group spec (when giving "
              "--a/--b as assignment lists)")
@click.option("--h", "--H", "h", default=None)
@click.option("--k", "--K", "k", default=None)
@click.option("--a", "a_arg", required=True, help="first datum: assignment "
              "list (with --base/--H) or JSON file")
@click.option("--b", "b_arg", required=True, help="second datum")
@_with_common
def isomorphic(base, h, k, a_arg, b_arg, fmt, cap_aut, threads):
    """Decide HNN-isomorphism of two data over one base; print a verified
    witness when one exists."""
    def go():
        if base:
            da = _resolve_datum(base, h, k, a_arg, None)
            db = _resolve_datum(base, h, k, b_arg, None)
        else:
            da = _load_hnn_file(a_arg)
            db = _load_hnn_file(b_arg)
        _check_cap(da.base, cap_aut)
        w = hnn_isomorphic(da, db)
        if w is None:
            _emit(fmt, ["not isomorphic"],
                  {"command": "isomorphic", "isomorphic": False,
                   "witness": None})
            return
        ok, _ = verify_witness(w)
        assert ok
        _emit(fmt, ["isomorphic", f"  witness: {w.describe()}"],
              {"command": "isomorphic", "isomorphic": True,
               "witness": {"phi": list(w.phi.images),
                           "t_left": w.t_left, "t_exp": w.t_exp,
                           "t_right": w.t_right}})
    _run(go)


@main.command(name="fingerprint")
@click.option("--base", default=None)
@click.option("--h", "--H", "h", default=None)
@click.option("--k", "--K", "k", default=None)
@click.option("--f", "fmap", default=None)
@click.option("--a", "a_arg", default=None, help="first datum as JSON "
              "file (compare mode)")
@click.option("--b", "b_arg", default=None, help="second datum as JSON "
              "file (compare mode)")
@click.option("--max-order", type=int, default=60, show_default=True,
              help="probe order bound")
@_with_common
def fingerprint_cmd(base, h, k, fmap, a_arg, b_arg, max_order, fmt, cap_aut,
                    threads):
    """Hom-count fingerprint of one datum, or the first separating probe
    of two."""
    def go():
        probes = default_probes(max_order)
        if a_arg or b_arg:
            if not (a_arg and b_arg):
                raise ParseError("compare mode needs both --a and --b")
            da = _load_hnn_file(a_arg)
            db = _load_hnn_file(b_arg)
            _check_cap(da.base, cap_aut)
            _check_cap(db.base, cap_aut)
            cmp = compare_fingerprints(fingerprint(da, probes),
                                       fingerprint(db, probes))
            if cmp.kind == "equal":
                lines = [f"Equal (all {len(probes)} probes of order <= "
                         f"{max_order} agree)"]
            else:
                lines = [f"FirstDifference({cmp.probe_label}): "
                         f"{cmp.left} vs {cmp.right} homomorphisms"]
            _emit(fmt, lines,
                  {"command": "fingerprint", **cmp.to_json_dict()})
            return
        d = _resolve_datum(base, h, k, fmap, None)
        _check_cap(d.base, cap_aut)
        vec = fingerprint(d, probes)
        lines = [f"{len(vec.entries)} probes of order <= {max_order}"]
        lines += [f"  {label} (order {order}): {count}"
                  for order, label, count in vec.entries]
        _emit(fmt, lines, {"command": "fingerprint", **vec.to_json_dict()})
    _run(go)


@main.command()
@click.option("--base", required=True)
@_with_common
def catalog(base, fmt, cap_aut, threads):
    """Classification counts over every subgroup-class pair of the base,
    up to base automorphisms."""
    def go():
        G = parse_group_spec(base)
        _check_cap(G, cap_aut)
        cat = pair_orbit_catalog(G)
        lines = [f"{len(cat.entries)} class-pair orbits over {G.label}"]
        for e in cat.entries:
            hn = ",".join(e.rep_h.names())
            kn = ",".join(e.rep_k.names())
            lines.append(f"  H={{{hn}}} K={{{kn}}} pairs-in-orbit="
                         f"{e.orbit_size} classes={e.iso_classes}")
        lines.append(f"total: {cat.total}")
        _emit(fmt, lines, {
            "command": "catalog", "total": cat.total,
            "entries": [{"H": list(e.rep_h.elements),
                         "K": list(e.rep_k.elements),
                         "orbit_size": e.orbit_size,
                         "iso_classes": e.iso_classes}
                        for e in cat.entries]})
    _run(go)


@main.command()
@click.option("--base", required=True)
@_with_common
def total(base, fmt, cap_aut, threads):
    """Total isomorphism-class count over all associated pairs of the base."""
    def go():
        G = parse_group_spec(base)
        _check_cap(G, cap_aut)
        t = total_iso_count(G)
        _emit(fmt, [f"{t} isomorphism classes in total over {G.label}"],
              {"command": "total", "total": t})
    _run(go)


if __name__ == "__main__":
    main()
