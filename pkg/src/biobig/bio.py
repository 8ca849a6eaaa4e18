"""Biological reactive systems: commitment rules, introduction rules and
located protein rules, all checked against the biological sorting."""
from __future__ import annotations

from .controls import MOBILITY_PAIRS
from .graph import Bigraph, Control, Interface, Signature, is_connected, support_equiv
from .rewrite import NotMonotone, ReactiveSystem, Rule, RuleError, grows_link
from .sorting import check_bio
from .term import parse_term

PINCH_LHS = ("/x:h /y:h p^c_{x}[$0] | m^ext[ p^m_{x,y}[$1] | $3 | m^cys[ p^d_{y} | $2 ] ]")
PINCH_RHS = "m^ext[ $3 | m^cys[ $2 | m^ext[ $1 | m^cys[ $0 ] ] ] ]"
FUSE_LHS = ("/x:h /y:h f^d_{y} | m^ext[ f^m_{x,y} | $2 | m^cys[ f^c_{x}[ m^ext[ $1 | m^cys[ $0 ] ] ] | $3 ] ]")
FUSE_RHS = "$0 | m^ext[ $1 | $2 | m^cys[ $3 ] ]"


def commitment_rules(sig: Signature) -> tuple[Rule, Rule]:
    """The pinch and fuse rules. Both are guarded: a match whose result would
    break the sorting (e.g. impermeability) is not an occurrence."""
    pinch = Rule("pinch", parse_term(PINCH_LHS, sig), parse_term(PINCH_RHS, sig), "commitment", True)
    fuse = Rule("fuse", parse_term(FUSE_LHS, sig), parse_term(FUSE_RHS, sig), "commitment", True)
    return pinch, fuse


# -- shape helpers ---------------------------------------------------------------


def strip_links(g: Bigraph) -> Bigraph:
    """The place graph of g (nodes keep control names, lose their ports)."""
    ctrl = {v: Control(c.name, 0, c.activity, c.polarity, c.kind) for v, c in g.ctrl.items()}
    return Bigraph(ctrl, {}, dict(g.prnt), {}, Interface(g.inner.width), Interface(g.outer.width))


def remove_nodes(g: Bigraph, drop: set, keep_places: bool = True) -> Bigraph:
    """Delete nodes, promoting their children to the nearest surviving ancestor
    and dropping edges that lose all their points."""
    def up(p):
        while isinstance(p, int) and p in drop:
            p = g.prnt[p]
        return p
    prnt = {c: up(p) for c, p in g.prnt.items() if c not in drop} if keep_places else {}
    link = {p: l for p, l in g.link.items() if not (isinstance(p, tuple) and p[0] in drop)}
    used = {l for l in link.values() if isinstance(l, int)}
    return Bigraph({v: c for v, c in g.ctrl.items() if v not in drop},
                   {e: t for e, t in g.edges.items() if e in used}, prnt, link, g.inner, g.outer)


# -- introduction rules --------------------------------------------------------------


def _triple(r: Bigraph):
    mob = {v for v, c in r.ctrl.items() if c.kind == "mobility"}
    fams = {r.ctrl[v].name[0] for v in mob}
    if len(mob) != 3 or len(fams) != 1:
        return None
    fam = fams.pop()
    by = {r.ctrl[v].name: v for v in mob}
    if set(by) != {f"{fam}^c", f"{fam}^m", f"{fam}^d"}:
        return None
    return fam, by[f"{fam}^c"], by[f"{fam}^m"], by[f"{fam}^d"]


def introduction_failure(lhs: Bigraph, rhs: Bigraph) -> str | None:
    if any(c.kind == "mobility" for c in lhs.ctrl.values()):
        return "redex contains mobility nodes"
    if not any(c.kind == "protein" for c in lhs.ctrl.values()):
        return "redex contains no protein"
    if lhs.inner != rhs.inner or lhs.outer != rhs.outer:
        return "redex and reactum interfaces differ"
    t = _triple(rhs)
    if t is None:
        return "reactum does not add exactly one mobility triple"
    fam, c, m, d = t
    peers = rhs.peers()
    for a, b in (((c, 0), (m, 0)), ((m, 1), (d, 0))):
        l = rhs.link[a]
        if not isinstance(l, int) or rhs.edges[l] != "h" or set(peers[l]) != {a, b}:
            return f"triple ports {a}-{b} are not joined by a closed h edge"
        pair = frozenset((rhs.ctrl[v].name, i) for v, i in (a, b))
        if pair not in MOBILITY_PAIRS:
            return "illegal triple linkage"
    if not support_equiv(remove_nodes(rhs, {c, m, d}), lhs):
        return "reactum differs from redex beyond the mobility triple"
    if fam == "p":
        enclosed = set()
        for top in (c, m):
            todo = [top]
            while todo:
                v = todo.pop()
                for ch in rhs.children(v):
                    if isinstance(ch, int):
                        enclosed.add(ch)
                        todo.append(ch)
        home = rhs.prnt.get(d)
        for v in enclosed:
            for i in range(rhs.ctrl[v].arity):
                l = rhs.link[(v, i)]
                pts = peers[l]
                ports = [p for p in pts if isinstance(p, tuple)]
                if isinstance(l, int) and len(ports) == 2 and len(pts) == 2:
                    continue
                if any(rhs.prnt.get(p[0]) == home for p in ports):
                    continue
                return f"link of enclosed node {rhs.ctrl[v].name} escapes the pinched region"
    return None


def validate_introduction(lhs: Bigraph, rhs: Bigraph) -> bool:
    return introduction_failure(lhs, rhs) is None


def introduction_rule(name: str, lhs: Bigraph, rhs: Bigraph) -> Rule:
    why = introduction_failure(lhs, rhs)
    if why:
        raise RuleError(f"rule {name}: not an introduction rule: {why}")
    return Rule(name, lhs, rhs, "introduction")


# -- located protein rules -----------------------------------------------------------


def protein_view(g: Bigraph) -> Bigraph:
    from .project import project_protein
    return project_protein(g)


def located_failure(lhs: Bigraph, rhs: Bigraph, kind: str) -> str | None:
    if any(c.kind != "protein" for c in list(lhs.ctrl.values()) + list(rhs.ctrl.values())):
        return "protein rules may only mention proteins"
    if not support_equiv(strip_links(lhs), strip_links(rhs)):
        return "proteins cannot change position"
    pl, pr = protein_view(lhs), protein_view(rhs)
    small, big = (pl, pr) if kind == "monotone" else (pr, pl)
    if not grows_link(small, big):
        return "the smaller side does not grow into the larger one"
    if not is_connected(big):
        return "the larger side is not connected"
    return None


def located_rule(name: str, lhs: Bigraph, rhs: Bigraph, kind: str) -> Rule:
    why = located_failure(lhs, rhs, kind)
    if why:
        raise NotMonotone(f"rule {name}: {why}")
    return Rule(name, lhs, rhs, kind)


def bio_system(sig: Signature, rules: list, commitment_first: bool = True) -> ReactiveSystem:
    """A BioRS: the given rules plus pinch and fuse (placed first by default)."""
    pinch, fuse = commitment_rules(sig)
    rules = [r for r in rules if r.name not in ("pinch", "fuse")]
    allr = [pinch, fuse] + rules if commitment_first else rules + [pinch, fuse]
    return ReactiveSystem(sig, allr, "bio")


def rule_side_violations(rule: Rule, sig: Signature) -> list:
    out = []
    for side in (rule.lhs, rule.rhs):
        out.extend(check_bio(side, sig, open_roots=True))
    return out
