"""Well-formedness predicates for protein link graphs and biological bigraphs.

Violations are data: each check returns every witness it finds, sorted by
predicate then witness ids. Witness ids are strings ``n<id>`` (node),
``e<id>`` (edge) and ``y:<name>`` (outer name).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .controls import FREEZING, MOBILITY_PAIRS
from .graph import Bigraph, BigraphError, Root, Signature, Site

PREDICATES = ("ProtSol", "Imp", "Polar", "Apolar", "2Layer", "Mobil", "Dir", "NoNesting", "Fuse")


class UnknownControl(BigraphError):
    pass


@dataclass(frozen=True, order=True)
class SortingViolation:
    predicate: str
    witness: tuple
    message: str

    def line(self) -> str:
        return f"{self.predicate}\t{','.join(self.witness)}\t{self.message}"


def _lid(l) -> str:
    return f"e{l}" if isinstance(l, int) else f"y:{l}"


def _wit(*ids) -> tuple:
    return tuple(sorted(set(ids), key=lambda s: (s[0], int(s[1:]) if s[1:].isdigit() else -1, s)))


def _sorted(vs):
    order = {p: i for i, p in enumerate(PREDICATES)}
    return sorted(vs, key=lambda v: (order[v.predicate], v.witness, v.message))


def check_protsol(g: Bigraph) -> list[SortingViolation]:
    """At most two points per link; h/v links exactly one (idle edges ignored).

    Links touched by a mobility port are left to the Mobil predicate.
    """
    out = []
    peers = g.peers()
    for l, pts in peers.items():
        if any(isinstance(p, tuple) and g.ctrl[p[0]].kind == "mobility" for p in pts):
            continue
        t = g.link_type(l)
        n = len(pts)
        if t in ("h", "v") and n != 1:
            out.append(SortingViolation("ProtSol", _wit(_lid(l)),
                                        f"{t}-typed link {_lid(l)} has {n} points, expected exactly 1"))
        elif n > 2:
            out.append(SortingViolation("ProtSol", _wit(_lid(l)),
                                        f"link {_lid(l)} has {n} points, at most 2 allowed"))
    return _sorted(out)


def _membrane_crossings(g: Bigraph, v: int, w: int) -> int | None:
    """Membrane-control places strictly between each of v, w and their least common ancestor."""
    av, aw = g.ancestors(v), g.ancestors(w)
    common = set(av) & set(aw)
    if not common:
        return None  # different roots: unrelated regions
    def count(chain):
        n = 0
        for a in chain:
            if a in common:
                break
            if isinstance(a, int) and g.ctrl[a].kind == "membrane":
                n += 1
        return n
    return count(av) + count(aw)


def check_bio(g: Bigraph, sig: Signature, open_roots: bool = False) -> list[SortingViolation]:
    """All biological sortings. ``open_roots`` relaxes root polarity (rule redexes)."""
    for v, c in g.ctrl.items():
        if sig.controls.get(c.name) != c:
            raise UnknownControl(f"node {v} has control {c.name!r} not in the signature")
    out = list(check_protsol(g))
    peers = g.peers()
    kids: dict = {}
    for c, p in g.prnt.items():
        kids.setdefault(p, []).append(c)

    # Imp
    if not g.is_link_graph:
        for l, pts in peers.items():
            vs = sorted({p[0] for p in pts if isinstance(p, tuple)})
            for v, w in combinations(vs, 2):
                n = _membrane_crossings(g, v, w)
                if n is not None and n > 2:
                    out.append(SortingViolation(
                        "Imp", _wit(f"n{v}", f"n{w}", _lid(l)),
                        f"n{v} and n{w} linked through {n} membrane layers"))

    # Polar / Apolar
    for v, c in g.ctrl.items():
        if c.polarity not in ("polar", "apolar") or v not in g.prnt:
            continue
        p = g.prnt[v]
        if isinstance(p, Root):
            if open_roots or c.polarity == "polar":
                continue
            out.append(SortingViolation("Apolar", _wit(f"n{v}"),
                                        f"apolar {c.name} n{v} sits in water at root {p.index}"))
            continue
        pc = g.ctrl[p]
        if c.polarity == "polar" and not (pc.polarity == "apolar" or pc.name in ("p^c", "f^c")):
            out.append(SortingViolation("Polar", _wit(f"n{v}", f"n{p}"),
                                        f"polar {c.name} n{v} inside {pc.name} n{p}"))
        if c.polarity == "apolar" and not (pc.polarity == "polar" or pc.name == "p^m"):
            out.append(SortingViolation("Apolar", _wit(f"n{v}", f"n{p}"),
                                        f"apolar {c.name} n{v} inside {pc.name} n{p}"))

    # 2Layer
    for v, c in g.ctrl.items():
        if c.name != "m^ext":
            continue
        ch = kids.get(v, [])
        cys = [u for u in ch if isinstance(u, int) and g.ctrl[u].name == "m^cys"]
        has_site = any(isinstance(u, Site) for u in ch)
        if len(cys) > 1 or (len(cys) == 0 and not has_site):
            out.append(SortingViolation("2Layer", _wit(f"n{v}", *(f"n{u}" for u in cys)),
                                        f"m^ext n{v} has {len(cys)} m^cys children, expected 1"))

    # Mobil
    for l, pts in peers.items():
        ports = [p for p in pts if isinstance(p, tuple)]
        mob = [p for p in ports if g.ctrl[p[0]].kind == "mobility"]
        if not mob:
            continue
        prot = [p for p in ports if g.ctrl[p[0]].kind == "protein"]
        ids = [_lid(l)] + [f"n{p[0]}" for p in ports]
        if prot:
            out.append(SortingViolation("Mobil", _wit(*ids), f"mobility and protein ports share {_lid(l)}"))
        elif len(pts) == 1 and isinstance(l, int):
            out.append(SortingViolation("Mobil", _wit(*ids), f"mobility port dangles on {_lid(l)}"))
        elif len(ports) > 2:
            out.append(SortingViolation("Mobil", _wit(*ids), f"{_lid(l)} joins {len(ports)} mobility ports"))
        elif len(ports) == 2:
            pair = frozenset((g.ctrl[v].name, i) for v, i in ports)
            if pair not in MOBILITY_PAIRS:
                out.append(SortingViolation("Mobil", _wit(*ids), f"illegal mobility linkage on {_lid(l)}"))

    # Dir
    for u, c in g.ctrl.items():
        if c.name not in ("p^m", "f^m"):
            continue
        fam = c.name[0]
        a = [p[0] for p in peers.get(g.link[(u, 0)], []) if isinstance(p, tuple)
             and g.ctrl[p[0]].name == f"{fam}^c"]
        b = [p[0] for p in peers.get(g.link[(u, 1)], []) if isinstance(p, tuple)
             and g.ctrl[p[0]].name == f"{fam}^d"]
        for v in a:
            for w in b:
                if v in g.prnt and g.prnt.get(v) == g.prnt.get(w):
                    out.append(SortingViolation("Dir", _wit(f"n{u}", f"n{v}", f"n{w}"),
                                                f"{fam}^c n{v} and {fam}^d n{w} share a location"))

    # NoNesting
    for v, c in g.ctrl.items():
        if c.kind != "mobility":
            continue
        for a in g.ancestors(v):
            if isinstance(a, int) and g.ctrl[a].name in FREEZING:
                out.append(SortingViolation("NoNesting", _wit(f"n{v}", f"n{a}"),
                                            f"{c.name} n{v} nested under {g.ctrl[a].name} n{a}"))

    # Fuse
    for v, c in g.ctrl.items():
        if c.name != "f^c":
            continue
        ch = kids.get(v, [])
        nodes = [u for u in ch if isinstance(u, int)]
        has_site = any(isinstance(u, Site) for u in ch)
        ok = (len(nodes) == 1 or (has_site and not nodes)) and all(g.ctrl[u].name == "m^ext" for u in nodes)
        if not ok:
            out.append(SortingViolation("Fuse", _wit(f"n{v}", *(f"n{u}" for u in nodes)),
                                        f"f^c n{v} must hold exactly one m^ext"))
    return _sorted(out)


def is_bio(g: Bigraph, sig: Signature, open_roots: bool = False) -> bool:
    return not check_bio(g, sig, open_roots)
