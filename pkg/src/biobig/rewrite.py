"""Reaction rules, matching, application and the link-graph growing relation.

A match of a redex L in an agent G is an embedding: an injective
control-preserving node map, an injective map from L's closed edges to G
edges carrying exactly the image ports, an injective map from L's outer names
to G links, and a place for every redex root. Recomposition
``G ≅ C ∘ (L ⊗ id_Z) ∘ d`` is available through :meth:`Match.context` and
:meth:`Match.parameters`.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import kappa as K
from .graph import (Bigraph, BigraphError, Interface, Root, Signature, Site, dedup, identity,
                    is_connected, support_equiv, tensor, compose, type_leq)
from .sorting import check_bio, check_protsol

KINDS = ("monotone", "antimonotone", "introduction", "commitment", "plain")


class RuleError(BigraphError):
    pass


class NotMonotone(RuleError):
    pass


class SortingBroken(RuleError):
    pass


# -- rules and systems -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Rule:
    name: str
    lhs: Bigraph
    rhs: Bigraph
    kind: str = "plain"
    # refuse matches whose result would break the sorting (commitment rules)
    guarded: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RuleError(f"unknown rule kind {self.kind!r}")
        l, r = self.lhs, self.rhs
        if l.inner != r.inner or l.outer != r.outer:
            raise RuleError(f"rule {self.name}: redex {l.inner}->{l.outer} and reactum "
                            f"{r.inner}->{r.outer} differ in interface")
        if l.inner.names:
            raise RuleError(f"rule {self.name}: redexes have no inner names")
        used = set(l.link.values())
        for y in r.outer.name_set:
            if y not in used and y in r.link.values():
                raise RuleError(f"rule {self.name}: reactum uses {y!r}, idle in the redex")
        if not l.is_link_graph:
            for j in range(l.outer.width):
                if not any(p == Root(j) for c, p in l.prnt.items() if isinstance(c, int)):
                    raise RuleError(f"rule {self.name}: redex root {j} holds no node")
        seen = {}
        for c, p in l.prnt.items():
            if isinstance(c, Site):
                if p in seen:
                    raise RuleError(f"rule {self.name}: two redex sites share place {p!r}")
                seen[p] = c

    def reversed(self, name: str | None = None) -> "Rule":
        kind = {"monotone": "antimonotone", "antimonotone": "monotone"}.get(self.kind, self.kind)
        return Rule(name or self.name + "~", self.rhs, self.lhs, kind, self.guarded)


@dataclass
class ReactiveSystem:
    signature: Signature
    rules: list
    profile: str = "bio"  # bio | protein | none

    def check(self, g: Bigraph) -> list:
        if self.profile == "bio":
            return check_bio(g, self.signature)
        if self.profile == "protein":
            return check_protsol(g)
        return []

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


# -- activity ----------------------------------------------------------------------


def is_active_location(g: Bigraph, place) -> bool:
    """True when ``place`` and all of its ancestors are active (roots are)."""
    chain = [place] + g.ancestors(place) if isinstance(place, int) else []
    return all(g.ctrl[a].activity == "active" for a in chain if isinstance(a, int))


def is_active_context(c: Bigraph) -> bool:
    return all(is_active_location(c, c.prnt[Site(i)]) if isinstance(c.prnt.get(Site(i)), int) else True
               for i in range(c.inner.width))


# -- matching ------------------------------------------------------------------------


@dataclass(frozen=True)
class Match:
    rule: str
    nodes: tuple  # ((L node, G node), ...) in L node order
    edges: tuple  # ((L edge, G edge), ...)
    names: tuple  # ((L name, G link), ...)
    roots: tuple  # agent place for each redex root
    params: tuple  # per site: frozenset of agent children forming the parameter

    @property
    def node_map(self) -> dict:
        return dict(self.nodes)

    @property
    def witness(self) -> tuple:
        return tuple(sorted(v for _, v in self.nodes))

    def witness_text(self) -> str:
        return ",".join(f"n{v}" for v in self.witness)

    def key(self) -> tuple:
        """Occurrence identity: equal keys give equal contexts and parameters."""
        return (frozenset(v for _, v in self.nodes), frozenset(e for _, e in self.edges),
                tuple(sorted(self.names, key=repr)), tuple(repr(p) for p in self.roots), self.params)

    # recomposition --------------------------------------------------------

    def _split(self, g: Bigraph):
        image = {v for _, v in self.nodes}
        pnodes = set()
        for ps in self.params:
            todo = list(ps)
            while todo:
                v = todo.pop()
                pnodes.add(v)
                todo.extend(c for c in g.children(v) if isinstance(c, int))
        cnodes = set(g.ctrl) - image - pnodes
        return image, pnodes, cnodes

    def _param_links(self, g: Bigraph, pnodes: set) -> tuple[dict, dict]:
        """Links of the parameter: internal edges, and external ones named _p0, _p1, ..."""
        internal, external = {}, {}
        peers = g.peers()
        for v in sorted(pnodes):
            for i in range(g.ctrl[v].arity):
                l = g.link[(v, i)]
                if l in internal or l in external:
                    continue
                inside = isinstance(l, int) and all(isinstance(p, tuple) and p[0] in pnodes for p in peers[l])
                if inside:
                    internal[l] = l
                else:
                    external[l] = f"_p{len(external)}"
        return internal, external

    def parameters(self, g: Bigraph) -> Bigraph:
        _, pnodes, _ = self._split(g)
        internal, external = self._param_links(g, pnodes)
        prnt = {}
        for i, ps in enumerate(self.params):
            for v in ps:
                prnt[v] = Root(i)
        for v in pnodes:
            if v not in prnt:
                prnt[v] = g.prnt[v]
        link = {}
        for v in pnodes:
            for i in range(g.ctrl[v].arity):
                l = g.link[(v, i)]
                link[(v, i)] = internal[l] if l in internal else external[l]
        return Bigraph({v: g.ctrl[v] for v in pnodes}, {e: g.edges[e] for e in internal}, prnt, link,
                       Interface(0), Interface.of(len(self.params), {z: "f" for z in external.values()}))

    def context(self, g: Bigraph, rule: Rule) -> Bigraph:
        image, pnodes, cnodes = self._split(g)
        _, external = self._param_links(g, pnodes)
        l_edge_imgs = {e for _, e in self.edges}
        prnt = {v: g.prnt[v] for v in cnodes if v in g.prnt}
        for j, p in enumerate(self.roots):
            prnt[Site(j)] = p
        link = {}
        for v in cnodes:
            for i in range(g.ctrl[v].arity):
                link[(v, i)] = g.link[(v, i)]
        lam = dict(self.names)
        for y, _ in rule.lhs.outer.names:
            if y in lam:
                link[y] = lam[y]
            else:
                link[y] = None
        for l, z in external.items():
            link[z] = l
        used = {l for l in link.values() if isinstance(l, int)}
        edges = {e: t for e, t in g.edges.items() if e not in l_edge_imgs and
                 (e in used or not any(isinstance(p, tuple) and p[0] in image | pnodes
                                       for p in g.points_of(e)))}
        # idle redex names are closed in the context
        extra = {}
        for y in [y for y, l in link.items() if l is None]:
            e = max(list(g.edges) + list(extra) + [-1]) + 1
            extra[e] = "b" if rule.lhs.outer.types[y] == "f" else rule.lhs.outer.types[y]
            link[y] = e
        edges.update(extra)
        inner_names = dict(rule.lhs.outer.names)
        inner_names.update({z: "f" for z in external.values()})
        return Bigraph({v: g.ctrl[v] for v in cnodes}, edges, prnt, link,
                       Interface.of(rule.lhs.outer.width, inner_names), g.outer)

    def recompose(self, g: Bigraph, rule: Rule, redex: Bigraph | None = None) -> Bigraph:
        d = self.parameters(g)
        ids = identity(0, d.outer.types)
        lz = tensor(redex or rule.lhs, ids)
        return compose(self.context(g, rule), compose(lz, d))


def _l_order(l: Bigraph) -> list:
    def depth(v):
        return len([a for a in l.ancestors(v) if isinstance(a, int)])
    return sorted(l.ctrl, key=lambda v: (depth(v), v))


def find_matches(agent: Bigraph, rule: Rule, check_guard: "Callable | None" = None) -> list[Match]:
    """Every occurrence of the rule's redex in the agent, in deterministic order."""
    L = rule.lhs
    G = agent
    if not G.is_ground:
        raise RuleError("agents must be ground")
    placed = not L.is_link_graph
    if placed and G.is_link_graph and L.ctrl:
        return []
    order = _l_order(L)
    by_ctrl: dict = {}
    for v in sorted(G.ctrl):
        by_ctrl.setdefault(G.ctrl[v], []).append(v)
    l_sites = {p: c for c, p in L.prnt.items() if isinstance(c, Site)}
    l_kids: dict = {}
    for c, p in L.prnt.items():
        if isinstance(c, int):
            l_kids.setdefault(p, []).append(c)
    g_kids: dict = {}
    for c, p in G.prnt.items():
        g_kids.setdefault(p, []).append(c)
    out: list = []
    seen: set = set()
    nmap: dict = {}
    used: set = set()
    emap: dict = {}
    lam: dict = {}
    rho: dict = {}
    ltypes = L.outer.types

    def link_ok(u, v) -> list | None:
        """Assign link constraints for L node u ↦ G node v; returns undo list or None."""
        undo = []
        for i in range(L.ctrl[u].arity):
            ll, gl = L.link[(u, i)], G.link[(v, i)]
            if isinstance(ll, int):
                if not isinstance(gl, int) or L.edges[ll] != G.edges[gl]:
                    break
                if ll in emap:
                    if emap[ll] != gl:
                        break
                    continue
                if gl in emap.values() or gl in lam.values():
                    break
                emap[ll] = gl
                undo.append(("e", ll))
            else:
                if ll in lam:
                    if lam[ll] != gl:
                        break
                    continue
                if gl in lam.values() or gl in emap.values():
                    break
                if not type_leq(ltypes[ll], G.link_type(gl)):
                    break
                lam[ll] = gl
                undo.append(("n", ll))
        else:
            return undo
        for kind, k in undo:
            (emap if kind == "e" else lam).pop(k)
        return None

    def finish():
        peers = G.peers()
        for ll, gl in emap.items():
            want = {(nmap[p[0]], p[1]) for p in L.points_of(ll)}
            if set(peers.get(gl, [])) != want:
                return
        params = []
        if placed:
            image = set(nmap.values())
            for j in range(L.outer.width):
                p = rho[j]
                if isinstance(p, int):
                    if p in image or any(a in image for a in G.ancestors(p)):
                        return
                    if not is_active_location(G, p):
                        return
            for u in L.ctrl:
                kids_img = {nmap[c] for c in l_kids.get(u, [])}
                extra = [c for c in g_kids.get(nmap[u], []) if c not in kids_img]
                if extra and u not in l_sites:
                    return
            for i in range(L.inner.width):
                p = L.prnt[Site(i)]
                if isinstance(p, int):
                    kids_img = {nmap[c] for c in l_kids.get(p, [])}
                    params.append(frozenset(c for c in g_kids.get(nmap[p], []) if c not in kids_img))
                else:
                    params.append(frozenset())
        m = Match(rule.name, tuple((u, nmap[u]) for u in sorted(nmap)),
                  tuple(sorted(emap.items())), tuple(sorted(lam.items(), key=repr)),
                  tuple(rho.get(j) for j in range(L.outer.width)), tuple(params))
        k = m.key()
        if k in seen:
            return
        if check_guard is not None and not check_guard(m):
            return
        seen.add(k)
        out.append(m)

    def rec(k):
        if k == len(order):
            finish()
            return
        u = order[k]
        cands = by_ctrl.get(L.ctrl[u], [])
        if placed:
            lp = L.prnt[u]
            if isinstance(lp, int):
                cands = [c for c in g_kids.get(nmap[lp], []) if isinstance(c, int) and G.ctrl[c] == L.ctrl[u]]
            elif lp.index in rho:
                cands = [c for c in g_kids.get(rho[lp.index], []) if isinstance(c, int) and G.ctrl[c] == L.ctrl[u]]
        for v in cands:
            if v in used:
                continue
            set_root = None
            if placed and isinstance(L.prnt[u], Root) and L.prnt[u].index not in rho:
                set_root = L.prnt[u].index
                rho[set_root] = G.prnt[v]
            undo = link_ok(u, v)
            if undo is not None:
                nmap[u] = v
                used.add(v)
                rec(k + 1)
                used.discard(v)
                del nmap[u]
                for kind, kk in undo:
                    (emap if kind == "e" else lam).pop(kk)
            if set_root is not None:
                del rho[set_root]

    rec(0)
    return out


# -- application ----------------------------------------------------------------------


def _tracking(L: Bigraph, R: Bigraph) -> dict:
    """Pair reactum nodes with redex nodes of the same control, in id order,
    so that nodes surviving a reaction keep their identity."""
    free: dict = {}
    for w in sorted(L.ctrl):
        free.setdefault(L.ctrl[w], []).append(w)
    out = {}
    for u in sorted(R.ctrl):
        pool = free.get(R.ctrl[u])
        if pool:
            out[u] = pool.pop(0)
    return out


def apply_match(agent: Bigraph, rule: Rule, match: Match) -> Bigraph:
    """Replace the matched redex by the reactum; nodes kept by the rule keep their ids."""
    G, L, R = agent, rule.lhs, rule.rhs
    nmap = match.node_map
    image = set(nmap.values())
    l_edge_imgs = {e for _, e in match.edges}
    lam = dict(match.names)
    ctrl = {v: c for v, c in G.ctrl.items() if v not in image}
    next_v = max(list(G.ctrl) + [-1]) + 1
    rmap = {}
    for u, w in _tracking(L, R).items():
        rmap[u] = nmap[w]
    for u in sorted(R.ctrl):
        if u not in rmap:
            rmap[u] = next_v
            next_v += 1
        ctrl[rmap[u]] = R.ctrl[u]
    prnt = {c: p for c, p in G.prnt.items() if c not in image and not isinstance(c, Site)}
    if not R.is_link_graph:
        def rplace(p):
            if isinstance(p, int):
                return rmap[p]
            return match.roots[p.index]
        for c, p in R.prnt.items():
            if isinstance(c, int):
                prnt[rmap[c]] = rplace(p)
        for i, ps in enumerate(match.params):
            target = rplace(R.prnt[Site(i)])
            for v in ps:
                prnt[v] = target
    edges = {e: t for e, t in G.edges.items() if e not in l_edge_imgs}
    next_e = max(list(G.edges) + [-1]) + 1
    remap = {}
    for e in sorted(R.edges):
        remap[e] = next_e
        edges[next_e] = R.edges[e]
        next_e += 1
    link = {p: l for p, l in G.link.items() if not (isinstance(p, tuple) and p[0] in image)}
    for (u, i), l in R.link.items():
        link[(rmap[u], i)] = remap[l] if isinstance(l, int) else lam[l]
    used = {l for l in link.values() if isinstance(l, int)}
    edges = {e: t for e, t in edges.items() if e in used}
    return Bigraph(ctrl, edges, prnt, link, G.inner, G.outer)


def _guard(system: ReactiveSystem, agent: Bigraph, rule: Rule):
    if not rule.guarded:
        return None
    return lambda m: not system.check(apply_match(agent, rule, m))


def matches(agent: Bigraph, system: ReactiveSystem) -> list[tuple[Rule, Match]]:
    out = []
    for rule in system.rules:
        for m in find_matches(agent, rule, _guard(system, agent, rule)):
            out.append((rule, m))
    return out


def react(agent: Bigraph, system: ReactiveSystem, rule: Rule, match: Match) -> Bigraph:
    h = apply_match(agent, rule, match)
    bad = system.check(h)
    if bad:
        raise SortingBroken(f"rule {rule.name} produced an unsorted state: "
                            + "; ".join(v.line() for v in bad))
    return h


def step(agent: Bigraph, system: ReactiveSystem) -> list[tuple[Bigraph, Rule, Match]]:
    """One-step successors, one per support-equivalence class."""
    succ = [(react(agent, system, r, m), r, m) for r, m in matches(agent, system)]
    return dedup(succ, key=lambda t: t[0])


@dataclass
class Trace:
    states: list = field(default_factory=list)
    steps: list = field(default_factory=list)  # (rule name, Match)

    def tsv(self) -> str:
        lines = ["step\trule\twitness"]
        for k, (name, m) in enumerate(self.steps, 1):
            lines.append(f"{k}\t{name}\t{m.witness_text()}")
        return "\n".join(lines) + "\n"


def parse_strategy(text: str) -> tuple[str, int | None]:
    if text == "first":
        return "first", None
    kind, _, arg = text.partition(":")
    if kind in ("random", "bfs") and arg.isdigit():
        return kind, int(arg)
    raise ValueError(f"bad strategy {text!r}: use first, random:SEED or bfs:DEPTH")


def run(agent: Bigraph, system: ReactiveSystem, strategy: str = "first", max_steps: int = 100) -> Trace:
    kind, arg = parse_strategy(strategy)
    if kind == "bfs":
        return _bfs(agent, system, min(arg, max_steps))
    rng = random.Random(arg)
    trace = Trace([agent], [])
    cur = agent
    for _ in range(max_steps):
        if kind == "first":
            choice = None
            for rule in system.rules:
                ms = find_matches(cur, rule, _guard(system, cur, rule))
                if ms:
                    choice = (rule, min(ms, key=lambda m: (m.witness, repr(m.key()))))
                    break
            if choice is None:
                break
        else:
            opts = matches(cur, system)
            if not opts:
                break
            choice = opts[rng.randrange(len(opts))]
        rule, m = choice
        cur = react(cur, system, rule, m)
        trace.states.append(cur)
        trace.steps.append((rule.name, m))
    return trace


def _bfs(agent: Bigraph, system: ReactiveSystem, depth: int) -> Trace:
    """Breadth-first exploration up to ``depth``; returns the path to the first
    stuck state found, otherwise to the first of the deepest states reached."""
    frontier = deque([Trace([agent], [])])
    visited = [agent]
    deepest = frontier[0]
    while frontier:
        tr = frontier.popleft()
        if len(tr.steps) > len(deepest.steps):
            deepest = tr
        if len(tr.steps) == depth:
            continue
        succ = step(tr.states[-1], system)
        if not succ:
            return tr
        for h, r, m in succ:
            if any(support_equiv(h, o) for o in visited):
                continue
            visited.append(h)
            frontier.append(Trace(tr.states + [h], tr.steps + [(r.name, m)]))
    return deepest


# -- the link-graph growing relation -------------------------------------------------------


def grows_link(g: Bigraph, h: Bigraph) -> bool:
    """Decide g ▷ h for ground protein link graphs with the same outer names.

    Frame links of g (bonds and outer names) persist exactly; a single
    visible/hidden closure may toggle; visible ports may be tied by fresh
    bonds; nodes of h outside the image of g are synthesised and may only
    link among themselves and to formerly visible ports.
    """
    if not (g.is_link_graph and h.is_link_graph and g.is_ground and h.is_ground):
        return False
    if g.outer != h.outer:
        return False
    gc = sorted(c.name for c in g.ctrl.values())
    hc = sorted(c.name for c in h.ctrl.values())
    for name in set(gc):
        if gc.count(name) > hc.count(name):
            return False
    gp, hp = g.peers(), h.peers()

    def closure_state(G, peers, port):
        l = G.link[port]
        if isinstance(l, int) and G.edges[l] in ("v", "h") and len(peers[l]) == 1:
            return G.edges[l]
        return None

    g_state = {p: closure_state(g, gp, p) for p in g.ports()}
    frame_edges = [e for e in gp if isinstance(e, int) and not (g.edges[e] in ("v", "h") and len(gp[e]) == 1)]
    g_nodes = sorted(g.ctrl)
    h_by_ctrl: dict = {}
    for v in sorted(h.ctrl):
        h_by_ctrl.setdefault(h.ctrl[v], []).append(v)

    def check(iota: dict) -> bool:
        img = {(iota[v], i): g_state[(v, i)] for (v, i) in g_state}
        covered = set()
        for e in frame_edges:
            pts = [(iota[p[0]], p[1]) for p in gp[e]]
            le = h.link[pts[0]]
            if not isinstance(le, int) or h.edges[le] != g.edges[e] or set(hp[le]) != set(pts):
                return False
            covered.add(le)
        for y in g.outer.name_set:
            pts = {(iota[p[0]], p[1]) for p in gp.get(y, [])}
            if set(hp.get(y, [])) != pts:
                return False
        for l, pts in hp.items():
            if l in covered or isinstance(l, str):
                continue
            t = h.edges[l]
            if t in ("v", "h") and len(pts) == 1:
                p = pts[0]
                if p in img and img[p] is None:
                    return False
                continue
            if t != "b":
                return False
            for p in pts:
                if p in img and img[p] != "v":
                    return False
        return True

    def rec(k, iota, used):
        if k == len(g_nodes):
            return check(iota)
        v = g_nodes[k]
        for w in h_by_ctrl.get(g.ctrl[v], []):
            if w in used:
                continue
            iota[v] = w
            used.add(w)
            if rec(k + 1, iota, used):
                return True
            used.discard(w)
            del iota[v]
        return False

    return rec(0, {}, set())


def make_monotone_rule(name: str, lhs: Bigraph, rhs: Bigraph) -> Rule:
    bad = check_protsol(lhs) + check_protsol(rhs)
    if bad:
        raise NotMonotone(f"rule {name}: sides are not protein solutions ({bad[0].message})")
    if not grows_link(lhs, rhs):
        raise NotMonotone(f"rule {name}: redex does not grow into the reactum")
    if not is_connected(rhs):
        raise NotMonotone(f"rule {name}: reactum is not connected")
    return Rule(name, lhs, rhs, "monotone")


def make_antimonotone_rule(name: str, lhs: Bigraph, rhs: Bigraph) -> Rule:
    make_monotone_rule(name, rhs, lhs)  # validates the reverse direction
    return Rule(name, lhs, rhs, "antimonotone")


def encode_rule(rule: K.KappaRule, sig: Signature | None = None) -> Rule:
    l, r = rule.pair()
    lg = K.encode(l, K.fn(l), sig)
    rg = K.encode(r, K.fn(r), sig)
    if rule.kind == "monotone":
        return make_monotone_rule(rule.name, lg, rg)
    return make_antimonotone_rule(rule.name, lg, rg)


def from_kappa(rules: Iterable[K.KappaRule], sig: Signature) -> ReactiveSystem:
    return ReactiveSystem(sig, [encode_rule(r, sig) for r in rules], "protein")
