"""Independent reference implementations and generators used by the tests."""
from __future__ import annotations

import itertools
import random

from biobig import kappa as K
from biobig.controls import protein
from biobig.graph import (Bigraph, BigraphError, Control, Interface, Root, Signature, Site,
                          support_equiv, type_leq)
from biobig.rewrite import Match, Rule, is_active_context

# -- kappa ----------------------------------------------------------------------


def flatten(s):
    """(binders, atoms) by naive recursion; binders renamed apart with a counter."""
    counter = itertools.count()
    atoms, binders = [], []

    def go(t, env):
        if isinstance(t, K.Zero):
            return
        if isinstance(t, K.Protein):
            atoms.append((t.name, tuple(K.Tie(env.get(x.name, x.name)) if isinstance(x, K.Tie) else x
                                        for x in t.sites)))
        elif isinstance(t, K.Group):
            go(t.left, env)
            go(t.right, env)
        else:
            new = f"#{next(counter)}"
            binders.append(new)
            go(t.body, {**env, t.name: new})

    go(s, {})
    used = {x.name for _, st in atoms for x in st if isinstance(x, K.Tie)}
    return [b for b in binders if b in used], atoms


def brute_equiv(s, t) -> bool:
    """Structural congruence by trying every atom bijection."""
    bs, sa = flatten(s)
    bt, ta = flatten(t)
    if len(sa) != len(ta) or len(bs) != len(bt):
        return False
    if sorted(a[0] for a in sa) != sorted(a[0] for a in ta):
        return False
    bset_s, bset_t = set(bs), set(bt)
    for perm in itertools.permutations(range(len(ta))):
        ren: dict = {}
        ok = True
        for (n1, st1), j in zip(sa, perm):
            n2, st2 = ta[j]
            if n1 != n2:
                ok = False
                break
            for a, b in zip(st1, st2):
                if isinstance(a, K.Tie) != isinstance(b, K.Tie):
                    ok = False
                elif isinstance(a, K.Tie):
                    if (a.name in bset_s) != (b.name in bset_t):
                        ok = False
                    elif a.name in bset_s:
                        if ren.setdefault(a.name, b.name) != b.name:
                            ok = False
                    elif a.name != b.name:
                        ok = False
                elif a != b:
                    ok = False
                if not ok:
                    break
            if not ok:
                break
        if ok and len(set(ren.values())) == len(ren):
            return True
    return False


def random_solution(rng: random.Random, arities: dict, max_atoms: int, free=("u",), p_restrict=0.7):
    """A random graph-like solution; bonds are restricted with probability p_restrict."""
    names = list(arities)
    n = rng.randint(0, max_atoms)
    atoms = [[rng.choice(names)] for _ in range(n)]
    sites = [[rng.choice("vh") for _ in range(arities[a[0]])] for a in atoms]
    ports = [(i, j) for i in range(n) for j in range(len(sites[i]))]
    rng.shuffle(ports)
    k = 0
    bound = []
    while len(ports) >= 2 and rng.random() < 0.6:
        p, q = ports.pop(), ports.pop()
        x = f"x{k}"
        k += 1
        sites[p[0]][p[1]] = K.Tie(x)
        sites[q[0]][q[1]] = K.Tie(x)
        if rng.random() < p_restrict:
            bound.append(x)
    for f in free:
        if ports and rng.random() < 0.3:
            p = ports.pop()
            sites[p[0]][p[1]] = K.Tie(f)
    body = [K.Protein(a[0], tuple(s)) for a, s in zip(atoms, sites)]
    # scatter binders at random depths to exercise scope extrusion
    rng.shuffle(body)
    term = K.group(*body) if body else K.Zero()
    for x in bound:
        term = K.Restrict(x, term)
    if rng.random() < 0.3:
        term = K.Group(term, K.Zero())
    return term


def shuffle_solution(rng: random.Random, s):
    """A structurally congruent variant: permute atoms, rename binders, re-nest scopes."""
    bs, atoms = flatten(s)
    ren = {b: f"r{rng.randint(0, 999)}_{i}" for i, b in enumerate(bs)}
    atoms = [K.Protein(n, tuple(K.Tie(ren.get(x.name, x.name)) if isinstance(x, K.Tie) else x for x in st))
             for n, st in atoms]
    rng.shuffle(atoms)
    term = K.group(*atoms)
    binders = list(ren.values())
    rng.shuffle(binders)
    for b in binders:
        term = K.Restrict(b, term)
    if rng.random() < 0.5:
        term = K.Group(K.Zero(), term)
    return term


def mutate_solution(rng: random.Random, s, arities):
    """A small perturbation that usually breaks congruence."""
    bs, atoms = flatten(s)
    if not atoms:
        return K.Protein(next(iter(arities)), ("v",) * arities[next(iter(arities))])
    i = rng.randrange(len(atoms))
    name, st = atoms[i]
    st = list(st)
    choices = [j for j, x in enumerate(st) if not isinstance(x, K.Tie)]
    if choices:
        j = rng.choice(choices)
        st[j] = "h" if st[j] == "v" else "v"
        atoms[i] = (name, tuple(st))
    else:
        atoms.pop(i)
    term = K.group(*(K.Protein(n, tuple(x)) for n, x in atoms))
    for b in bs:
        term = K.Restrict(b, term)
    return term


# -- protein link graphs ------------------------------------------------------------------


def matchings(ports: list):
    """All partial matchings of ports: yields (pairs, unmatched)."""
    if not ports:
        yield [], []
        return
    first, rest = ports[0], ports[1:]
    for pairs, un in matchings(rest):
        yield pairs, [first] + un
    for k, other in enumerate(rest):
        for pairs, un in matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + pairs, un


def _class_perms(combo):
    """Node relabellings that preserve the control sequence."""
    groups: dict = {}
    for i, c in enumerate(combo):
        groups.setdefault(c.name, []).append(i)
    blocks = list(groups.values())
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = {}
        for b, image in zip(blocks, choice):
            perm.update(zip(b, image))
        yield perm


def enumerate_link_graphs(controls: list, max_nodes: int, names=()):
    """Every ground protein link graph (ProtSol) with at most max_nodes nodes
    on the given outer names, one per isomorphism class."""
    controls = sorted(controls, key=lambda c: c.name)
    out = []
    for n in range(max_nodes + 1):
        for combo in itertools.combinations_with_replacement(controls, n):
            ctrl = dict(enumerate(combo))
            perms = list(_class_perms(combo))
            ports = [(v, i) for v in ctrl for i in range(ctrl[v].arity)]
            seen = set()
            for pairs, un in matchings(ports):
                targets = ["v", "h"] + [("name", x) for x in names]
                for assign in itertools.product(targets, repeat=len(un)):
                    counts = {}
                    for a in assign:
                        if isinstance(a, tuple):
                            counts[a[1]] = counts.get(a[1], 0) + 1
                    if any(c > 2 for c in counts.values()):
                        continue
                    groups = [("b", (p, q)) for p, q in pairs]
                    groups += [(a if isinstance(a, str) else a[1], (p,)) for p, a in zip(un, assign)]
                    key = min(tuple(sorted((t, tuple(sorted((perm[v], i) for v, i in pts)))
                                           for t, pts in groups)) for perm in perms)
                    if key in seen:
                        continue
                    seen.add(key)
                    edges, link = {}, {}
                    for p, q in pairs:
                        e = len(edges)
                        edges[e] = "b"
                        link[p] = link[q] = e
                    for p, a in zip(un, assign):
                        if isinstance(a, tuple):
                            link[p] = a[1]
                        else:
                            e = len(edges)
                            edges[e] = a
                            link[p] = e
                    out.append(Bigraph(ctrl, edges, {}, link, Interface(0),
                                       Interface.of(0, {x: "b" for x in names})))
    return out


# -- matching ------------------------------------------------------------------------


def brute_matches(agent: Bigraph, rule: Rule) -> set:
    """Occurrence keys of every valid match, found by trying all node injections
    and validating the recomposition law and activity of the context."""
    L, G = rule.lhs, agent
    lnodes = sorted(L.ctrl)
    placed = not L.is_link_graph
    found = set()
    for combo in itertools.permutations(sorted(G.ctrl), len(lnodes)):
        nmap = dict(zip(lnodes, combo))
        if any(G.ctrl[nmap[u]] != L.ctrl[u] for u in lnodes):
            continue
        emap, lam, ok = {}, {}, True
        for (u, i), ll in L.link.items():
            gl = G.link[(nmap[u], i)]
            table = emap if isinstance(ll, int) else lam
            if table.setdefault(ll, gl) != gl:
                ok = False
        if not ok:
            continue
        targets = list(emap.values()) + list(lam.values())
        if len(set(targets)) != len(targets):
            continue
        if any(not isinstance(e, int) or G.edges[e] != L.edges[l] for l, e in emap.items()):
            continue
        if any(not type_leq(L.outer.types[y], G.link_type(l)) for y, l in lam.items()):
            continue
        rho, params = {}, []
        if placed:
            for u in lnodes:
                p = L.prnt[u]
                if isinstance(p, Root):
                    if rho.setdefault(p.index, G.prnt[nmap[u]]) != G.prnt[nmap[u]]:
                        ok = False
            if not ok:
                continue
            for i in range(L.inner.width):
                p = L.prnt[Site(i)]
                if isinstance(p, int):
                    inside = {nmap[c] for c, q in L.prnt.items() if q == p and isinstance(c, int)}
                    params.append(frozenset(c for c, q in G.prnt.items() if q == nmap[p] and c not in inside))
                else:
                    params.append(frozenset())
        m = Match(rule.name, tuple(sorted(nmap.items())), tuple(sorted(emap.items())),
                  tuple(sorted(lam.items(), key=repr)), tuple(rho.get(j) for j in range(L.outer.width)),
                  tuple(params))
        try:
            ctx = m.context(G, rule)
            again = m.recompose(G, rule)
        except BigraphError:
            continue
        if placed and not is_active_context(ctx):
            continue
        if support_equiv(again, G):
            found.add(m.key())
    return found


TOY = {
    "M": Control("M", 1, "active", "neutral", "membrane"),
    "P": Control("P", 1, "passive", "neutral", "mobility"),
    "A": protein("A", 1, "neutral"),
    "B": protein("B", 2, "neutral"),
}


def toy_signature() -> Signature:
    sig = Signature()
    for c in TOY.values():
        sig.add(c)
    return sig


def random_agent(rng: random.Random, max_nodes: int = 8, width: int = 1, link_graph: bool = False,
                 names=("y",)) -> Bigraph:
    n = rng.randint(1, max_nodes)
    ctrl, prnt = {}, {}
    for v in range(n):
        c = TOY[rng.choice("MMPAABB")] if not link_graph else TOY[rng.choice("AABB")]
        ctrl[v] = c
        if not link_graph:
            holders = [w for w in range(v) if ctrl[w].activity != "atomic"]
            if holders and rng.random() < 0.6:
                prnt[v] = rng.choice(holders)
            else:
                prnt[v] = Root(rng.randrange(width))
    ports = [(v, i) for v in ctrl for i in range(ctrl[v].arity)]
    rng.shuffle(ports)
    edges, link = {}, {}
    outer = {x: "b" for x in names}
    while ports:
        k = min(len(ports), rng.choice((1, 1, 2, 2, 3)))
        grp, ports = ports[:k], ports[k:]
        if rng.random() < 0.15 and names:
            target = rng.choice(names)
        else:
            target = len(edges)
            edges[target] = "b" if k > 1 else rng.choice("vhb")
        for p in grp:
            link[p] = target
    return Bigraph(ctrl, edges, prnt, link, Interface(0),
                   Interface.of(0 if link_graph else width, outer))


def random_rule(rng: random.Random, agent: Bigraph, max_nodes: int = 3) -> Rule:
    """An identity rule whose redex is cut out of the agent around a random node."""
    placed = not agent.is_link_graph
    start = rng.choice(sorted(agent.ctrl))
    chosen = [start]
    frontier = set()
    for _ in range(rng.randint(0, max_nodes - 1)):
        for v in chosen:
            for c in agent.children(v):
                if isinstance(c, int):
                    frontier.add(c)
            for i in range(agent.ctrl[v].arity):
                for p in agent.points_of(agent.link[(v, i)]):
                    if isinstance(p, tuple):
                        frontier.add(p[0])
        frontier -= set(chosen)
        if not frontier:
            break
        chosen.append(rng.choice(sorted(frontier)))
    chosen = sorted(chosen)
    S = set(chosen)
    ctrl = {v: agent.ctrl[v] for v in chosen}
    prnt, roots, sites = {}, {}, 0
    if placed:
        for v in chosen:
            p = agent.prnt[v]
            if isinstance(p, int) and p in S:
                prnt[v] = p
            else:
                prnt[v] = Root(roots.setdefault(p, len(roots)))
        for v in chosen:
            extra = [c for c in agent.children(v) if c not in S]
            if ctrl[v].activity != "atomic" and (extra or rng.random() < 0.3):
                prnt[Site(sites)] = v
                sites += 1
    edges, link, outer = {}, {}, {}
    peers = agent.peers()
    for v in chosen:
        for i in range(ctrl[v].arity):
            l = agent.link[(v, i)]
            inside = isinstance(l, int) and all(isinstance(p, tuple) and p[0] in S for p in peers[l])
            if inside and rng.random() < 0.7:
                edges.setdefault(l, agent.edges[l])
                link[(v, i)] = l
            else:
                y = f"n{l}"
                outer[y] = "f" if rng.random() < 0.3 else (agent.edges[l] if isinstance(l, int) else "b")
                link[(v, i)] = y
    lhs = Bigraph(ctrl, edges, prnt, link, Interface(sites), Interface.of(len(roots) if placed else 0, outer))
    return Rule("probe", lhs, lhs)


# -- arbitrary bigraphs between interfaces --------------------------------------------


def random_bigraph(rng: random.Random, inner: Interface, outer: Interface, max_nodes: int = 4,
                   controls=("M", "P", "A", "B")) -> Bigraph:
    """A random placed bigraph inner -> outer over the toy signature; outer.width >= 1."""
    n = rng.randint(0, max_nodes)
    ctrl = {v: TOY[rng.choice(controls)] for v in range(n)}
    holders = [v for v in ctrl if ctrl[v].activity != "atomic"]
    prnt = {}
    for v in range(n):
        above = [w for w in holders if w < v]
        prnt[v] = rng.choice(above) if above and rng.random() < 0.5 else Root(rng.randrange(outer.width))
    for i in range(inner.width):
        opts = [Root(j) for j in range(outer.width)] + holders
        prnt[Site(i)] = rng.choice(opts)
    points = [(v, i) for v in ctrl for i in range(ctrl[v].arity)] + sorted(inner.name_set)
    outs = sorted(outer.types)
    edges, link = {}, {}
    itypes = inner.types
    for p in points:
        need = itypes.get(p, "f") if isinstance(p, str) else "f"
        ok_names = [y for y in outs if type_leq(need, outer.types[y]) or need == "f"]
        if ok_names and rng.random() < 0.5:
            link[p] = rng.choice(ok_names)
        elif edges and rng.random() < 0.4 and need in ("f", "b"):
            link[p] = rng.choice([e for e in edges if edges[e] == "b"] or [None])
            if link[p] is None:
                edges[len(edges)] = "b"
                link[p] = len(edges) - 1
        else:
            e = len(edges)
            edges[e] = need if need in ("h", "v", "b") else rng.choice("hvb")
            link[p] = e
    return Bigraph(ctrl, edges, prnt, link, inner, outer)


def random_interface(rng: random.Random, pool=("x", "y", "z"), max_width: int = 2) -> Interface:
    names = {x: "b" for x in pool if rng.random() < 0.5}
    return Interface.of(rng.randint(1, max_width), names)
