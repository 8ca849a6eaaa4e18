"""Typed bigraphs: place graph + link graph between interfaces.

Nodes and edges carry opaque integer ids. Places are node ids, ``Site(i)``
or ``Root(j)``; points are ports ``(v, i)`` or inner-name strings; links are
edge ids (int) or outer-name strings.

All values are treated as immutable once built. Semantic equality is
:func:`support_equiv`, never ``==``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

NAME_TYPES = ("h", "v", "b", "f")
EDGE_TYPES = frozenset({"h", "v", "b"})


def type_leq(t: str, u: str) -> bool:
    """The name-type order: reflexive, plus ``f`` below everything."""
    return t == u or t == "f"


class BigraphError(ValueError):
    pass


class InterfaceMismatch(BigraphError):
    pass


class NameClash(BigraphError):
    pass


class TypeClash(BigraphError):
    pass


class Site(NamedTuple):
    index: int


class Root(NamedTuple):
    index: int


Place = Union[int, Site, Root]
Point = Union[tuple, str]
Link = Union[int, str]


@dataclass(frozen=True)
class Interface:
    width: int
    names: frozenset = frozenset()  # of (name, type)

    @classmethod
    def of(cls, width: int = 0, names: Mapping[str, str] | Iterable[str] = ()) -> "Interface":
        if isinstance(names, Mapping):
            pairs = frozenset(names.items())
        else:
            pairs = frozenset((n, "b") for n in names)
        seen = [n for n, _ in pairs]
        if len(seen) != len(set(seen)):
            raise BigraphError(f"duplicate name in interface: {sorted(seen)}")
        return cls(width, pairs)

    @property
    def types(self) -> dict[str, str]:
        return dict(self.names)

    @property
    def name_set(self) -> frozenset:
        return frozenset(n for n, _ in self.names)

    def __str__(self) -> str:
        ns = ",".join(f"{n}:{t}" for n, t in sorted(self.names))
        return f"<{self.width},{{{ns}}}>"


@dataclass(frozen=True)
class Control:
    name: str
    arity: int
    activity: str = "active"  # active | passive | atomic
    polarity: str = "neutral"  # polar | apolar | neutral
    kind: str = "protein"  # protein | membrane | mobility

    def __post_init__(self):
        if self.activity not in ("active", "passive", "atomic"):
            raise ValueError(f"bad activity {self.activity!r}")
        if self.polarity not in ("polar", "apolar", "neutral"):
            raise ValueError(f"bad polarity {self.polarity!r}")
        if self.kind not in ("protein", "membrane", "mobility"):
            raise ValueError(f"bad kind {self.kind!r}")


@dataclass
class Signature:
    controls: dict[str, Control] = field(default_factory=dict)
    name_types: tuple = NAME_TYPES
    edge_types: frozenset = EDGE_TYPES

    def __getitem__(self, name: str) -> Control:
        return self.controls[name]

    def __contains__(self, name: str) -> bool:
        return name in self.controls

    def add(self, control: Control) -> Control:
        self.controls[control.name] = control
        return control


@dataclass(frozen=True, eq=False)
class Bigraph:
    ctrl: Mapping[int, Control]
    edges: Mapping[int, str]
    prnt: Mapping[Place, Place]
    link: Mapping[Point, Link]
    inner: Interface
    outer: Interface

    def __post_init__(self):
        self._check()

    # -- structure queries -------------------------------------------------

    @property
    def nodes(self) -> frozenset:
        return frozenset(self.ctrl)

    @property
    def is_link_graph(self) -> bool:
        return self.inner.width == 0 and self.outer.width == 0

    @property
    def is_ground(self) -> bool:
        return self.inner.width == 0 and not self.inner.names

    def ports(self):
        for v in sorted(self.ctrl):
            for i in range(self.ctrl[v].arity):
                yield (v, i)

    def points_of(self, lnk: Link) -> list:
        return sorted((p for p, l in self.link.items() if l == lnk), key=_point_key)

    def peers(self) -> dict:
        """Map each link to the sorted list of points targeting it (non-idle only)."""
        out: dict = {}
        for p, l in self.link.items():
            out.setdefault(l, []).append(p)
        for l in out:
            out[l].sort(key=_point_key)
        return out

    def children(self, place: Place) -> list:
        return sorted((c for c, p in self.prnt.items() if p == place), key=_place_key)

    def ancestors(self, place: Place) -> list:
        """Strict ancestors, nearest first, ending with a root."""
        out = []
        cur = self.prnt.get(place)
        while cur is not None:
            out.append(cur)
            cur = self.prnt.get(cur) if isinstance(cur, int) else None
        return out

    def link_type(self, lnk: Link) -> str:
        if isinstance(lnk, int):
            return self.edges[lnk]
        return self.outer.types[lnk]

    def replace(self, **kw) -> "Bigraph":
        fields = dict(ctrl=self.ctrl, edges=self.edges, prnt=self.prnt, link=self.link,
                      inner=self.inner, outer=self.outer)
        fields.update(kw)
        return Bigraph(**fields)

    def __repr__(self) -> str:
        return (f"Bigraph({self.inner} -> {self.outer}, nodes="
                f"{sorted((v, c.name) for v, c in self.ctrl.items())}, edges={dict(self.edges)})")

    # -- validation --------------------------------------------------------

    def _check(self) -> None:
        ctrl, prnt, link = self.ctrl, self.prnt, self.link
        for e, t in self.edges.items():
            if t not in EDGE_TYPES:
                raise BigraphError(f"edge {e} has non-edge type {t!r}")
        # place graph
        placed = not self.is_link_graph
        for v in ctrl:
            if placed and v not in prnt:
                raise BigraphError(f"node {v} has no parent")
        for i in range(self.inner.width):
            if placed and Site(i) not in prnt:
                raise BigraphError(f"site {i} has no parent")
        for child, par in prnt.items():
            if isinstance(child, Site):
                if not 0 <= child.index < self.inner.width:
                    raise BigraphError(f"site {child.index} out of range")
            elif child not in ctrl:
                raise BigraphError(f"unknown child {child!r}")
            if isinstance(par, Root):
                if not 0 <= par.index < self.outer.width:
                    raise BigraphError(f"root {par.index} out of range")
            elif isinstance(par, int):
                if par not in ctrl:
                    raise BigraphError(f"unknown parent {par!r}")
                if ctrl[par].activity == "atomic":
                    raise BigraphError(f"atomic node {par} ({ctrl[par].name}) has children")
            else:
                raise BigraphError(f"bad parent {par!r}")
        for v in ctrl:
            seen = {v}
            cur = prnt.get(v)
            while isinstance(cur, int):
                if cur in seen:
                    raise BigraphError(f"parent map has a cycle through {v}")
                seen.add(cur)
                cur = prnt.get(cur)
        # link graph
        outer_types = self.outer.types
        inner_types = self.inner.types
        expected = {(v, i) for v, c in ctrl.items() for i in range(c.arity)} | set(inner_types)
        if set(link) != expected:
            missing = expected - set(link)
            extra = set(link) - expected
            raise BigraphError(f"link map not total on points (missing={missing}, extra={extra})")
        for p, l in link.items():
            if isinstance(l, int):
                if l not in self.edges:
                    raise BigraphError(f"point {p} links to unknown edge {l}")
            elif l not in outer_types:
                raise BigraphError(f"point {p} links to unknown name {l!r}")
            if isinstance(p, str) and not type_leq(inner_types[p], self.link_type(l)):
                raise BigraphError(
                    f"inner name {p}:{inner_types[p]} links to {l!r}:{self.link_type(l)}")


def _point_key(p):
    return (0, p, "") if isinstance(p, tuple) else (1, (0, 0), p)


def _place_key(p):
    if isinstance(p, int):
        return (0, p)
    if isinstance(p, Site):
        return (1, p.index)
    return (2, p.index)


def _link_key(l):
    return (0, l, "") if isinstance(l, int) else (1, 0, l)


# -- elementary bigraphs ---------------------------------------------------


def _names(names, default="b") -> dict:
    if isinstance(names, Mapping):
        return dict(names)
    return {n: default for n in names}


def empty() -> Bigraph:
    """id_epsilon : <0,{}> -> <0,{}>."""
    return Bigraph({}, {}, {}, {}, Interface(0), Interface(0))


def identity(width: int = 0, names=()) -> Bigraph:
    ns = _names(names)
    prnt = {Site(i): Root(i) for i in range(width)}
    link = {x: x for x in ns}
    return Bigraph({}, {}, prnt, link, Interface.of(width, ns), Interface.of(width, ns))


def merge(n: int) -> Bigraph:
    """n sites under a single root; merge(0) is the barren root ``1``."""
    return Bigraph({}, {}, {Site(i): Root(0) for i in range(n)}, {},
                   Interface(n), Interface(1))


def one() -> Bigraph:
    return merge(0)


def name_intro(names) -> Bigraph:
    """The ground link graph with only idle outer names."""
    ns = _names(names)
    return Bigraph({}, {}, {}, {}, Interface(0), Interface.of(0, ns))


def closure(name: str, etype: str, itype: str | None = None) -> Bigraph:
    """/name:etype  :  <0,{name}> -> <0,{}>."""
    itype = itype or etype
    return Bigraph({}, {0: etype}, {}, {name: 0}, Interface.of(0, {name: itype}), Interface(0))


def substitution(target: str, sources: Iterable[str], ttype: str = "b",
                 stype: str | Mapping[str, str] = "f") -> Bigraph:
    """target/{sources}  :  sources -> {target}."""
    sources = list(sources)
    st = stype if isinstance(stype, Mapping) else {s: stype for s in sources}
    return Bigraph({}, {}, {}, {s: target for s in sources},
                   Interface.of(0, {s: st[s] for s in sources}),
                   Interface.of(0, {target: ttype}))


def _node_graph(control: Control, names: list, types, with_site: bool, placed: bool) -> Bigraph:
    if len(names) != control.arity:
        raise BigraphError(f"{control.name} has arity {control.arity}, got {len(names)} names")
    ty = types if isinstance(types, Mapping) else {n: types for n in names}
    outer = {n: ty.get(n, "b") for n in names}
    prnt = {0: Root(0)} if placed else {}
    if with_site:
        prnt[Site(0)] = 0
    link = {(0, i): n for i, n in enumerate(names)}
    return Bigraph({0: control}, {}, prnt, link,
                   Interface(1 if with_site else 0), Interface.of(1 if placed else 0, outer))


def atom(control: Control, names=(), types="b") -> Bigraph:
    """Ground prime with a single childless node: K_names : <0,{}> -> <1,names>."""
    return _node_graph(control, list(names), types, with_site=False, placed=True)


def ion(control: Control, names=(), types="b") -> Bigraph:
    """K_names : <1,{}> -> <1,names>, the node holding one site."""
    return _node_graph(control, list(names), types, with_site=True, placed=True)


def lg_node(control: Control, names=(), types="f") -> Bigraph:
    """A placeless node as a link graph: {} -> names."""
    return _node_graph(control, list(names), types, with_site=False, placed=False)


# -- support renaming --------------------------------------------------------


def _shift(g: Bigraph, dv: int, de: int) -> Bigraph:
    if dv == 0 and de == 0:
        return g

    def pl(p):
        return p + dv if isinstance(p, int) else p

    def pt(p):
        return (p[0] + dv, p[1]) if isinstance(p, tuple) else p

    def ln(l):
        return l + de if isinstance(l, int) else l

    return Bigraph({v + dv: c for v, c in g.ctrl.items()},
                   {e + de: t for e, t in g.edges.items()},
                   {pl(c): pl(p) for c, p in g.prnt.items()},
                   {pt(p): ln(l) for p, l in g.link.items()},
                   g.inner, g.outer)


def _disjoint(a: Bigraph, b: Bigraph) -> Bigraph:
    """Rename b's support away from a's when they clash."""
    dv = de = 0
    if set(a.ctrl) & set(b.ctrl):
        dv = max(a.ctrl) + 1 - min(b.ctrl)
    if set(a.edges) & set(b.edges):
        de = max(a.edges) + 1 - min(b.edges)
    return _shift(b, dv, de)


def normalize_ids(g: Bigraph) -> Bigraph:
    """Renumber nodes 0..n-1 and edges 0..k-1 preserving order."""
    vmap = {v: i for i, v in enumerate(sorted(g.ctrl))}
    emap = {e: i for i, e in enumerate(sorted(g.edges))}

    def pl(p):
        return vmap[p] if isinstance(p, int) else p

    def pt(p):
        return (vmap[p[0]], p[1]) if isinstance(p, tuple) else p

    def ln(l):
        return emap[l] if isinstance(l, int) else l

    return Bigraph({vmap[v]: c for v, c in g.ctrl.items()},
                   {emap[e]: t for e, t in g.edges.items()},
                   {pl(c): pl(p) for c, p in g.prnt.items()},
                   {pt(p): ln(l) for p, l in g.link.items()},
                   g.inner, g.outer)


# -- composition and products ----------------------------------------------


def compose(outer_g: Bigraph, inner_g: Bigraph) -> Bigraph:
    """outer_g ∘ inner_g; requires inner_g.outer == outer_g.inner."""
    if inner_g.outer != outer_g.inner:
        raise InterfaceMismatch(f"cannot compose: {inner_g.outer} vs {outer_g.inner}")
    g = inner_g
    h = _disjoint(g, outer_g)
    prnt = {}
    for c, p in g.prnt.items():
        prnt[c] = h.prnt[Site(p.index)] if isinstance(p, Root) else p
    for c, p in h.prnt.items():
        if not isinstance(c, Site):
            prnt[c] = p
    link = {}
    for p, l in g.link.items():
        link[p] = h.link[l] if isinstance(l, str) else l
    for p, l in h.link.items():
        if isinstance(p, tuple):
            link[p] = l
    return Bigraph({**g.ctrl, **h.ctrl}, {**g.edges, **h.edges}, prnt, link,
                   g.inner, h.outer)


def tensor(g: Bigraph, h: Bigraph) -> Bigraph:
    """Juxtaposition; names on each interface must be disjoint."""
    if g.inner.name_set & h.inner.name_set or g.outer.name_set & h.outer.name_set:
        raise NameClash(f"tensor of non-disjoint interfaces: {g.outer} / {h.outer}")
    h = _disjoint(g, h)
    mi, mo = g.inner.width, g.outer.width

    def pl(p):
        if isinstance(p, Site):
            return Site(p.index + mi)
        if isinstance(p, Root):
            return Root(p.index + mo)
        return p

    prnt = dict(g.prnt)
    prnt.update({pl(c): pl(p) for c, p in h.prnt.items()})
    return Bigraph({**g.ctrl, **h.ctrl}, {**g.edges, **h.edges}, prnt,
                   {**g.link, **h.link},
                   Interface(g.inner.width + h.inner.width, g.inner.names | h.inner.names),
                   Interface(g.outer.width + h.outer.width, g.outer.names | h.outer.names))


def tensor_all(gs: Iterable[Bigraph]) -> Bigraph:
    out = empty()
    for g in gs:
        out = tensor(out, g)
    return out


def parallel(g: Bigraph, h: Bigraph) -> Bigraph:
    """Tensor that merges shared outer names (which must agree on type)."""
    gt, ht = g.outer.types, h.outer.types
    shared = set(gt) & set(ht)
    for n in shared:
        if gt[n] != ht[n]:
            raise TypeClash(f"name {n} has types {gt[n]} and {ht[n]}")
    if g.inner.name_set & h.inner.name_set:
        raise NameClash("parallel product needs disjoint inner names")
    h = _disjoint(g, h)
    mi, mo = g.inner.width, g.outer.width

    def pl(p):
        if isinstance(p, Site):
            return Site(p.index + mi)
        if isinstance(p, Root):
            return Root(p.index + mo)
        return p

    prnt = dict(g.prnt)
    prnt.update({pl(c): pl(p) for c, p in h.prnt.items()})
    return Bigraph({**g.ctrl, **h.ctrl}, {**g.edges, **h.edges}, prnt,
                   {**g.link, **h.link},
                   Interface(g.inner.width + h.inner.width, g.inner.names | h.inner.names),
                   Interface(g.outer.width + h.outer.width, frozenset({**gt, **ht}.items())))


def parallel_all(gs: Iterable[Bigraph]) -> Bigraph:
    out = empty()
    for g in gs:
        out = parallel(out, g)
    return out


def merge_roots(g: Bigraph) -> Bigraph:
    """Place every root of g under a single root."""
    prnt = {c: (Root(0) if isinstance(p, Root) else p) for c, p in g.prnt.items()}
    return g.replace(prnt=prnt, outer=Interface(1, g.outer.names))


def prime(g: Bigraph, h: Bigraph) -> Bigraph:
    """Parallel product followed by merging all roots into one."""
    return merge_roots(parallel(g, h))


def prime_all(gs: Iterable[Bigraph]) -> Bigraph:
    out = one()
    for g in gs:
        out = prime(out, g)
    return out


# -- lean support equivalence ------------------------------------------------


def lean(g: Bigraph) -> Bigraph:
    used = set(l for l in g.link.values() if isinstance(l, int))
    if len(used) == len(g.edges):
        return g
    return g.replace(edges={e: t for e, t in g.edges.items() if e in used})


def _as_digraph(g: Bigraph) -> nx.DiGraph:
    d = nx.DiGraph()
    for v, c in g.ctrl.items():
        d.add_node(("n", v), label=("N", c.name, c.arity))
    used = set(l for l in g.link.values() if isinstance(l, int))
    for e, t in g.edges.items():
        if e in used:
            d.add_node(("e", e), label=("E", t))
    for j in range(g.outer.width):
        d.add_node(("r", j), label=("R", j))
    for i in range(g.inner.width):
        d.add_node(("s", i), label=("S", i))
    for n, t in g.inner.names:
        d.add_node(("x", n), label=("X", n, t))
    for n, t in g.outer.names:
        d.add_node(("y", n), label=("Y", n, t))

    def pv(p):
        if isinstance(p, int):
            return ("n", p)
        if isinstance(p, Site):
            return ("s", p.index)
        return ("r", p.index)

    for c, p in g.prnt.items():
        d.add_edge(pv(c), pv(p))
    for p, l in g.link.items():
        target = ("e", l) if isinstance(l, int) else ("y", l)
        if isinstance(p, tuple):
            pn = ("p",) + p
            d.add_node(pn, label=("P", p[1]))
            d.add_edge(("n", p[0]), pn)
            d.add_edge(pn, target)
        else:
            d.add_edge(("x", p), target)
    return d


def _label_match(a, b):
    return a["label"] == b["label"]


def _quick_invariant(g: Bigraph):
    lg = lean(g)
    return (g.inner, g.outer,
            tuple(sorted((c.name for c in g.ctrl.values()))),
            tuple(sorted(lg.edges.values())))


def support_equiv(g: Bigraph, h: Bigraph) -> bool:
    """Lean support equivalence: isomorphic up to node/edge ids and idle edges."""
    if _quick_invariant(g) != _quick_invariant(h):
        return False
    return DiGraphMatcher(_as_digraph(g), _as_digraph(h), node_match=_label_match).is_isomorphic()


def support_hash(g: Bigraph) -> str:
    """A support-invariant hash (equal for support-equivalent graphs)."""
    d = _as_digraph(g)
    for n in d.nodes:
        d.nodes[n]["h"] = repr(d.nodes[n]["label"])
    return repr((g.inner, g.outer)) + nx.weisfeiler_lehman_graph_hash(d, node_attr="h")


def dedup(graphs: Iterable, key=lambda x: x) -> list:
    """Keep the first representative of each support-equivalence class."""
    buckets: dict = {}
    out = []
    for item in graphs:
        g = key(item)
        hk = support_hash(g)
        bucket = buckets.setdefault(hk, [])
        if any(support_equiv(g, key(o)) for o in bucket):
            continue
        bucket.append(item)
        out.append(item)
    return out


# -- discrete decomposition ---------------------------------------------------


def discrete_decompose(s: Bigraph) -> tuple[Bigraph, Bigraph]:
    """Split a link graph into (wiring, discrete part) with wiring ∘ discrete ≅ s.

    Fresh names z0, z1, ... go to ports in (node id, port index) order, then to
    inner names in sorted order.
    """
    if not s.is_link_graph:
        raise BigraphError("discrete_decompose expects a link graph")
    fresh = _fresh_names(s, sum(c.arity for c in s.ctrl.values()) + len(s.inner.names))
    d_link, z_types, w_link = {}, {}, {}
    k = 0
    for p in s.ports():
        z = fresh[k]
        k += 1
        d_link[p] = z
        z_types[z] = "f"
        w_link[z] = s.link[p]
    for x, t in sorted(s.inner.names):
        z = fresh[k]
        k += 1
        d_link[x] = z
        z_types[z] = t
        w_link[z] = s.link[x]
    d = Bigraph(dict(s.ctrl), {}, {}, d_link, s.inner, Interface.of(0, z_types))
    used = set(l for l in w_link.values() if isinstance(l, int))
    w = Bigraph({}, {e: t for e, t in s.edges.items() if e in used}, {}, w_link,
                Interface.of(0, z_types), s.outer)
    return w, d


def _fresh_names(g: Bigraph, n: int) -> list:
    taken = g.inner.name_set | g.outer.name_set
    out = []
    for i in itertools.count():
        if len(out) == n:
            break
        z = f"z{i}"
        if z not in taken:
            out.append(z)
    return out


def is_discrete(g: Bigraph) -> bool:
    targets = list(g.link.values())
    return not g.edges and all(isinstance(t, str) for t in targets) and len(set(targets)) == len(targets)


def node_components(g: Bigraph) -> list[set]:
    """Connected components of nodes under peering (shared links)."""
    adj = nx.Graph()
    adj.add_nodes_from(g.ctrl)
    for _, pts in g.peers().items():
        vs = [p[0] for p in pts if isinstance(p, tuple)]
        for a, b in zip(vs, vs[1:]):
            adj.add_edge(a, b)
    return [set(c) for c in nx.connected_components(adj)]


def is_connected(g: Bigraph) -> bool:
    """Non-empty and connected under peering."""
    return len(g.ctrl) > 0 and len(node_components(g)) == 1
