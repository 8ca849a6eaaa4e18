"""κ-calculus front end: syntax, structural congruence, growth, encoding.

Concrete syntax::

    protein A:3;                      # declarations (model files / preambles)
    0                                 # empty solution
    A(1, 2~, 3^x)                     # visible, hidden, tied to x
    S, T                              # grouping
    (x)(S)   (x,y) A(1^x)             # restriction

Sites omitted from an atom are hidden.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Union

from .controls import protein_signature
from .graph import Bigraph, BigraphError, Interface, Signature


class Tie(NamedTuple):
    name: str


State = Union[str, Tie]  # "v" | "h" | Tie(name)


class KappaError(ValueError):
    pass


class ParseError(KappaError):
    def __init__(self, msg, line=0, col=0, expected=()):
        self.line, self.col, self.expected = line, col, tuple(expected)
        where = f"{line}:{col}: " if line else ""
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{where}{msg}{exp}")


class ArityError(KappaError):
    pass


class UndeclaredProtein(KappaError):
    pass


class FreeNameNotInX(KappaError):
    pass


class NotMonotone(KappaError):
    pass


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Protein:
    name: str
    sites: tuple  # of State, index i-1 holds site i
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Group:
    left: "Solution"
    right: "Solution"
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Restrict:
    name: str
    body: "Solution"
    pos: tuple = field(default=(0, 0), compare=False)


Solution = Union[Zero, Protein, Group, Restrict]


def group(*parts: Solution) -> Solution:
    parts = [p for p in parts]
    if not parts:
        return Zero()
    out = parts[0]
    for p in parts[1:]:
        out = Group(out, p)
    return out


def restrict(names: Iterable[str], body: Solution) -> Solution:
    for n in reversed(list(names)):
        body = Restrict(n, body)
    return body


def fn(s: Solution) -> frozenset:
    if isinstance(s, Zero):
        return frozenset()
    if isinstance(s, Protein):
        return frozenset(t.name for t in s.sites if isinstance(t, Tie))
    if isinstance(s, Group):
        return fn(s.left) | fn(s.right)
    return fn(s.body) - {s.name}


def fn_interface(sites: Iterable[State]) -> frozenset:
    return frozenset(t.name for t in sites if isinstance(t, Tie))


# -- printing ----------------------------------------------------------------


def _site_text(i: int, st: State) -> str:
    if st == "v":
        return str(i)
    if st == "h":
        return f"{i}~"
    return f"{i}^{st.name}"


def to_text(s: Solution) -> str:
    if isinstance(s, Zero):
        return "0"
    if isinstance(s, Protein):
        return f"{s.name}({','.join(_site_text(i + 1, st) for i, st in enumerate(s.sites))})"
    if isinstance(s, Group):
        return f"{to_text(s.left)},{to_text(s.right)}"
    return f"({s.name})({to_text(s.body)})"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\^[A-Za-z0-9_]+)*)
  | (?P<int>\d+)
  | (?P<sym>[(),;:~^])
""", re.VERBOSE)


class _Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind if kind != "sym" else m.group(), m.group(), line, pos - lstart + 1))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                lstart = pos + k + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - lstart + 1))
    return out


class _Parser:
    def __init__(self, text: str, arities: Mapping[str, int] | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.arities = dict(arities or {})

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def expect(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col, [kind])
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def is_binder(self) -> bool:
        """At '(' name {',' name} ')'."""
        if self.tok.kind != "(":
            return False
        k = 1
        while True:
            if self.peek(k).kind != "ident":
                return False
            nxt = self.peek(k + 1).kind
            if nxt == ")":
                return True
            if nxt != ",":
                return False
            k += 2

    def binder(self) -> list[str]:
        self.expect("(")
        names = [self.expect("ident").text]
        while self.accept(","):
            names.append(self.expect("ident").text)
        self.expect(")")
        return names

    def solution(self) -> Solution:
        parts = [self.term()]
        while self.tok.kind == ",":
            self.i += 1
            parts.append(self.term())
        return group(*parts)

    def term(self) -> Solution:
        t = self.tok
        if t.kind == "int" and t.text == "0":
            self.i += 1
            return Zero((t.line, t.col))
        if t.kind == "(":
            if self.is_binder():
                names = self.binder()
                return restrict(names, self.term())
            self.i += 1
            s = self.solution()
            self.expect(")")
            return s
        if t.kind == "ident":
            return self.atom()
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col,
                         ["0", "protein", "(", "(name)"])

    def atom(self) -> Protein:
        t = self.expect("ident")
        if t.text not in self.arities:
            raise UndeclaredProtein(f"{t.line}:{t.col}: protein {t.text!r} is not declared")
        ar = self.arities[t.text]
        sites: dict[int, State] = {}
        self.expect("(")
        if self.tok.kind != ")":
            while True:
                it = self.expect("int")
                idx = int(it.text)
                if not 1 <= idx <= ar:
                    raise ArityError(f"{it.line}:{it.col}: site {idx} out of range for {t.text}:{ar}")
                if idx in sites:
                    raise ParseError(f"site {idx} given twice", it.line, it.col)
                if self.accept("~"):
                    sites[idx] = "h"
                elif self.accept("^"):
                    sites[idx] = Tie(self.expect("ident").text)
                else:
                    sites[idx] = "v"
                if not self.accept(","):
                    break
        self.expect(")")
        return Protein(t.text, tuple(sites.get(i, "h") for i in range(1, ar + 1)), (t.line, t.col))

    def declarations(self):
        while self.tok.kind == "ident" and self.tok.text == "protein":
            self.i += 1
            name = self.expect("ident").text
            self.expect(":")
            self.arities[name] = int(self.expect("int").text)
            self.expect(";")


def parse(text: str, arities: Mapping[str, int] | None = None) -> Solution:
    """Parse a solution, optionally preceded by ``protein A:n;`` declarations."""
    p = _Parser(text, arities)
    p.declarations()
    s = p.solution()
    p.accept(";")
    p.expect("eof")
    return s


def parse_with_arities(text: str, arities=None) -> tuple[Solution, dict]:
    p = _Parser(text, arities)
    p.declarations()
    s = p.solution()
    p.accept(";")
    p.expect("eof")
    return s, p.arities


# -- prenex form and structural congruence ------------------------------------


def _fresh(base: str, taken: set) -> str:
    if base not in taken:
        return base
    for k in itertools.count(1):
        n = f"{base}{k}"
        if n not in taken:
            return n


def prenex(s: Solution) -> tuple[list[str], list[tuple[str, tuple]]]:
    """Extrude every restriction: returns (binders, atoms) with unique binders
    disjoint from the free names. Idle binders are kept."""
    free = set(fn(s))
    taken = set(free)
    binders: list[str] = []
    atoms: list = []

    def go(t, env):
        if isinstance(t, Zero):
            return
        if isinstance(t, Protein):
            sites = tuple(Tie(env.get(st.name, st.name)) if isinstance(st, Tie) else st for st in t.sites)
            atoms.append((t.name, sites))
        elif isinstance(t, Group):
            go(t.left, env)
            go(t.right, env)
        else:
            new = _fresh(t.name, taken)
            taken.add(new)
            binders.append(new)
            go(t.body, {**env, t.name: new})

    go(s, {})
    return binders, atoms


def _occurrences(atoms) -> dict:
    occ: dict = {}
    for k, (_, sites) in enumerate(atoms):
        for i, st in enumerate(sites):
            if isinstance(st, Tie):
                occ.setdefault(st.name, []).append((k, i))
    return occ


def _canonical_atoms(bound: set, atoms: list) -> tuple:
    """Canonical labelling of bound names; atoms ordered canonically."""
    occ = _occurrences(atoms)

    def base(k):
        name, sites = atoms[k]
        out = []
        for st in sites:
            if isinstance(st, Tie):
                out.append(("b",) if st.name in bound else ("f", st.name))
            else:
                out.append((st,))
        return (name, tuple(out))

    colour = {k: repr(base(k)) for k in range(len(atoms))}
    for _ in range(3):
        new = {}
        for k, (_, sites) in enumerate(atoms):
            nb = []
            for i, st in enumerate(sites):
                if isinstance(st, Tie) and st.name in bound:
                    nb.append((i, tuple(sorted((colour[a], j) for a, j in occ[st.name] if (a, j) != (k, i)))))
            new[k] = repr((colour[k], tuple(nb)))
        colour = new
    groups: dict = {}
    for k in range(len(atoms)):
        groups.setdefault(colour[k], []).append(k)
    keys = sorted(groups)
    best = None
    for perm in itertools.product(*(itertools.permutations(groups[c]) for c in keys)):
        order = [k for p in perm for k in p]
        names: dict = {}
        out = []
        for k in order:
            name, sites = atoms[k]
            row = []
            for st in sites:
                if isinstance(st, Tie):
                    if st.name in bound:
                        row.append(("b", names.setdefault(st.name, len(names))))
                    else:
                        row.append(("f", st.name))
                else:
                    row.append((st,))
            out.append((name, tuple(row)))
        cand = tuple(out)
        if best is None or cand < best:
            best = cand
    return best if best is not None else ()


def canonical(s: Solution) -> tuple:
    """A normal form: S ≡ T iff canonical(S) == canonical(T)."""
    binders, atoms = prenex(s)
    used = set(_occurrences(atoms))
    return _canonical_atoms({b for b in binders if b in used}, atoms)


def struct_equiv(s: Solution, t: Solution) -> bool:
    return canonical(s) == canonical(t)


def from_canonical(c: tuple) -> Solution:
    names = sorted({st[1] for _, row in c for st in row if st[0] == "b"})
    label = {k: f"b{k}" for k in names}
    atoms = []
    for name, row in c:
        sites = []
        for st in row:
            if st[0] == "b":
                sites.append(Tie(label[st[1]]))
            elif st[0] == "f":
                sites.append(Tie(st[1]))
            else:
                sites.append(st[0])
        atoms.append(Protein(name, tuple(sites)))
    return restrict([label[k] for k in names], group(*atoms))


# -- shape predicates ----------------------------------------------------------


def is_graph_like(s: Solution, strong: bool = False) -> bool:
    binders, atoms = prenex(s)
    occ = _occurrences(atoms)
    for b in binders:
        if len(occ.get(b, [])) not in (0, 2):
            return False
    for name in fn(s):
        n = len(occ.get(name, []))
        if n > 2 or (strong and n != 2):
            return False
    return True


def _atoms_connected(atoms) -> bool:
    if not atoms:
        return False
    occ = _occurrences(atoms)
    seen, todo = {0}, [0]
    while todo:
        k = todo.pop()
        for st in atoms[k][1]:
            if isinstance(st, Tie):
                for a, _ in occ[st.name]:
                    if a not in seen:
                        seen.add(a)
                        todo.append(a)
    return len(seen) == len(atoms)


def is_connected(s: Solution) -> bool:
    return _atoms_connected(prenex(s)[1])


def is_complex(s: Solution) -> bool:
    return not fn(s) and is_graph_like(s) and is_connected(s)


# -- growing relation ------------------------------------------------------------


def _site_grows(xs: frozenset, a: State, b: State, bmap: dict | None = None,
                bound_s: set = frozenset(), bound_t: set = frozenset()) -> bool:
    if a == "h":
        return b in ("h", "v")
    if a == "v":
        return b in ("v", "h") or (isinstance(b, Tie) and b.name in xs and b.name not in bound_t)
    # tied: untouched, names outside xs
    if not isinstance(b, Tie) or a.name in xs or b.name in xs:
        return False
    if a.name in bound_s:
        if b.name not in bound_t:
            return False
        return bmap is None or bmap.get(a.name, b.name) == b.name
    return b.name == a.name and b.name not in bound_t


def grows_interface(xs: Iterable[str], rho: Iterable[State], sigma: Iterable[State]) -> bool:
    xs = frozenset(xs)
    rho, sigma = tuple(rho), tuple(sigma)
    return len(rho) == len(sigma) and all(_site_grows(xs, a, b) for a, b in zip(rho, sigma))


def grows_solution(xs: Iterable[str], s: Solution, t: Solution) -> bool:
    """Decide xs ⊢ S ▷ T (up to structural congruence)."""
    xs = frozenset(xs)
    if xs & fn(s):
        return False
    bs, sa = prenex(s)
    bt, ta = prenex(t)
    clash = set(bs) & (xs | set(bt) | fn(t))
    if clash:
        # alpha-rename S's binders apart from every name of T
        taken = set(bs) | set(bt) | xs | fn(t) | fn(s)
        ren = {}
        for b in clash:
            ren[b] = _fresh(b, taken)
            taken.add(ren[b])
        bs = [ren.get(b, b) for b in bs]
        sa = [(n, tuple(Tie(ren.get(x.name, x.name)) if isinstance(x, Tie) else x for x in st))
              for n, st in sa]
    occ_s, occ_t = _occurrences(sa), _occurrences(ta)
    bound_s = {b for b in bs if b in occ_s}
    bound_t = {b for b in bt if b in occ_t}
    if xs & bound_t:
        # a fresh name re-bound inside T shadows nothing we can track
        return False
    used = [False] * len(ta)

    def assign(k: int, bmap: dict) -> bool:
        if k == len(sa):
            if set(bmap.values()) != bound_t or set(bmap) != bound_s:
                return False
            for j, (name, sites) in enumerate(ta):
                if not used[j] and not all(isinstance(st, Tie) and st.name in xs or not isinstance(st, Tie)
                                           for st in sites):
                    return False
            return True
        name, sites = sa[k]
        for j, (tname, tsites) in enumerate(ta):
            if used[j] or tname != name or len(tsites) != len(sites):
                continue
            nm = dict(bmap)
            ok = True
            for a, b in zip(sites, tsites):
                if not _site_grows(xs, a, b, nm, bound_s, bound_t):
                    ok = False
                    break
                if isinstance(a, Tie) and a.name in bound_s:
                    if nm.get(a.name, b.name) != b.name or (a.name not in nm and b.name in nm.values()):
                        ok = False
                        break
                    nm[a.name] = b.name
            if not ok:
                continue
            used[j] = True
            if assign(k + 1, nm):
                return True
            used[j] = False
        return False

    return assign(0, {})


def is_monotone(lhs: Solution, xs: Iterable[str], rhs: Solution) -> bool:
    """L → (xs)R is monotone."""
    xs = list(xs)
    return (grows_solution(xs, lhs, rhs) and is_graph_like(lhs)
            and is_graph_like(restrict(xs, rhs)) and is_connected(rhs))


def monotone_failure(lhs: Solution, xs: Iterable[str], rhs: Solution) -> str | None:
    xs = list(xs)
    if not grows_solution(xs, lhs, rhs):
        return "growing relation fails"
    if not is_graph_like(lhs):
        return "L is not graph-like"
    if not is_graph_like(restrict(xs, rhs)):
        return "(x)R is not graph-like"
    if not is_connected(rhs):
        return "R is not connected"
    return None


@dataclass(frozen=True)
class KappaRule:
    """lhs → (fresh)rhs (monotone) or (fresh)lhs → rhs (antimonotone)."""
    name: str
    lhs: Solution
    fresh: tuple
    rhs: Solution
    kind: str  # monotone | antimonotone

    def pair(self) -> tuple[Solution, Solution]:
        if self.kind == "monotone":
            return self.lhs, restrict(self.fresh, self.rhs)
        return restrict(self.fresh, self.lhs), self.rhs

    def reversed(self) -> "KappaRule":
        kind = "antimonotone" if self.kind == "monotone" else "monotone"
        return KappaRule(self.name + "~", self.rhs, self.fresh, self.lhs, kind)

    def is_valid(self) -> bool:
        if self.kind == "monotone":
            return is_monotone(self.lhs, self.fresh, self.rhs)
        return is_monotone(self.rhs, self.fresh, self.lhs)


def _split_binders(s: Solution, k_max: int = 8):
    bs, atoms = prenex(s)
    occ = _occurrences(atoms)
    bs = [b for b in bs if b in occ]
    for r in range(len(bs) + 1):
        for xs in itertools.combinations(bs, r):
            rest = [b for b in bs if b not in xs]
            yield tuple(xs), restrict(rest, group(*(Protein(n, st) for n, st in atoms)))


def kappa_rule(name: str, lhs: Solution, rhs: Solution, fresh: Iterable[str] | None = None) -> KappaRule:
    """Classify ``lhs -> rhs`` as monotone or antimonotone, finding the fresh names
    among the top-level binders when not given."""
    if fresh is not None:
        fresh = tuple(fresh)
        why = monotone_failure(lhs, fresh, rhs)
        if why:
            raise NotMonotone(f"rule {name}: {why}")
        return KappaRule(name, lhs, fresh, rhs, "monotone")
    for xs, body in _split_binders(rhs):
        if is_monotone(lhs, xs, body):
            return KappaRule(name, lhs, xs, body, "monotone")
    for xs, body in _split_binders(lhs):
        if is_monotone(rhs, xs, body):
            return KappaRule(name, body, xs, rhs, "antimonotone")
    raise NotMonotone(f"rule {name} is neither monotone nor antimonotone "
                      f"({monotone_failure(lhs, (), rhs)})")


def grows(s: Solution, t: Solution) -> bool:
    """Does t grow from s for some choice of fresh names among t's binders?"""
    return any(grows_solution(xs, s, body) for xs, body in _split_binders(t))


# -- one-step protein transition system ---------------------------------------------


def successors(s: Solution, rules: Iterable[KappaRule]) -> list[Solution]:
    """All one-step reducts of s, one representative per ≡-class."""
    out: dict = {}
    bs, atoms = prenex(s)
    free_s = fn(s)
    for rule in rules:
        l, r = rule.pair()
        lb, la = prenex(l)
        lfree = fn(l)
        if not la:
            continue
        taken = set(bs) | set(free_s)
        for match in _kappa_matches(set(bs), atoms, set(lb), la, lfree, free_s):
            idx, nmap = match
            rest = [a for k, a in enumerate(atoms) if k not in idx]
            rb, ra = prenex(r)
            ren = {}
            for b in rb:
                nb = _fresh(b, taken | set(ren.values()))
                ren[b] = nb
            new_atoms = []
            for name, sites in ra:
                row = []
                for st in sites:
                    if isinstance(st, Tie):
                        row.append(Tie(ren[st.name] if st.name in ren else nmap.get(st.name, st.name)))
                    else:
                        row.append(st)
                new_atoms.append((name, tuple(row)))
            binders = list(bs) + list(ren.values())
            res = restrict(binders, group(*(Protein(n, st) for n, st in rest + new_atoms)))
            out.setdefault(canonical(res), res)
    return list(out.values())


def _kappa_matches(bound_s, atoms, bound_l, latoms, lfree, free_s):
    """Injective atom alignments of the rule's left side into the solution."""
    occ_s = _occurrences(atoms)
    seen = set()

    def rec(k, used, nmap):
        if k == len(latoms):
            # every bound name of l must have all its solution occurrences inside the match
            for ln, sn in nmap.items():
                if ln in bound_l:
                    if any(a not in used for a, _ in occ_s[sn]):
                        return
            key = (frozenset(used.items()) if isinstance(used, dict) else frozenset(used))
            if key not in seen:
                seen.add(key)
                yield set(used), dict(nmap)
            return
        name, sites = latoms[k]
        for j, (sname, ssites) in enumerate(atoms):
            if j in used or sname != name:
                continue
            nm = dict(nmap)
            ok = True
            for a, b in zip(sites, ssites):
                if isinstance(a, Tie):
                    if not isinstance(b, Tie):
                        ok = False
                        break
                    if a.name in bound_l:
                        if b.name not in bound_s:
                            ok = False
                            break
                    elif a.name in lfree:
                        if not (b.name == a.name or (b.name in bound_s and a.name not in free_s)):
                            ok = False
                            break
                    if nm.get(a.name, b.name) != b.name or (a.name not in nm and b.name in nm.values()):
                        ok = False
                        break
                    nm[a.name] = b.name
                elif a != b:
                    ok = False
                    break
            if ok:
                yield from rec(k + 1, used | {j}, nm)

    yield from rec(0, frozenset(), {})


# -- encoding into protein link graphs ------------------------------------------


def _typed(X) -> dict:
    if isinstance(X, Mapping):
        return dict(X)
    return {x: "b" for x in X}


def encode(s: Solution, X=None, sig: Signature | None = None,
           arities: Mapping[str, int] | None = None) -> Bigraph:
    """The ground protein link graph of s over the names X (default fn(s))."""
    X = _typed(fn(s) if X is None else X)
    missing = fn(s) - set(X)
    if missing:
        raise FreeNameNotInX(f"free names {sorted(missing)} not in X")
    binders, atoms = prenex(s)
    if sig is None:
        ar = dict(arities or {})
        for name, sites in atoms:
            ar.setdefault(name, len(sites))
        sig = protein_signature(ar)
    ctrl, edges, link = {}, {}, {}
    bond_edge = {}
    for b in binders:
        bond_edge[b] = len(edges)
        edges[bond_edge[b]] = "b"
    for v, (name, sites) in enumerate(atoms):
        if name not in sig:
            raise UndeclaredProtein(f"protein {name!r} not in signature")
        ctrl[v] = sig[name]
        if ctrl[v].arity != len(sites):
            raise ArityError(f"{name} has arity {ctrl[v].arity}, atom gives {len(sites)} sites")
        for i, st in enumerate(sites):
            if st in ("v", "h"):
                e = len(edges)
                edges[e] = st
                link[(v, i)] = e
            elif st.name in bond_edge:
                link[(v, i)] = bond_edge[st.name]
            else:
                link[(v, i)] = st.name
    used = set(l for l in link.values() if isinstance(l, int))
    edges = {e: t for e, t in edges.items() if e in used}
    return Bigraph(ctrl, edges, {}, link, Interface(0), Interface.of(0, X))


def decode(g: Bigraph) -> Solution:
    """A κ preimage of a ground protein link graph."""
    if not g.is_link_graph or not g.is_ground:
        raise BigraphError("decode expects a ground link graph")
    peers = g.peers()
    atoms = []
    binders = []
    for v in sorted(g.ctrl):
        sites = []
        for i in range(g.ctrl[v].arity):
            l = g.link[(v, i)]
            if isinstance(l, str):
                sites.append(Tie(l))
            else:
                t = g.edges[l]
                if t in ("v", "h") and len(peers[l]) == 1:
                    sites.append(t)
                else:
                    name = f"e{l}"
                    if name not in binders:
                        binders.append(name)
                    sites.append(Tie(name))
        atoms.append(Protein(g.ctrl[v].name, tuple(sites)))
    return restrict(binders, group(*atoms))


# -- model files ------------------------------------------------------------------


@dataclass
class KappaModel:
    arities: dict
    rules: list
    init: Solution | None = None

    @property
    def signature(self) -> Signature:
        return protein_signature(self.arities)


def parse_model(text: str) -> KappaModel:
    """``protein`` declarations, ``rule NAME : LHS -> [(x,y)] RHS;`` and ``init : S;``."""
    p = _Parser(text, {})
    rules = []
    init = None
    while p.tok.kind != "eof":
        t = p.tok
        if t.kind == "ident" and t.text == "protein":
            p.declarations()
        elif t.kind == "ident" and t.text == "rule":
            p.i += 1
            name = p.expect("ident").text
            p.expect(":")
            lhs = p.solution()
            p.expect("arrow")
            fresh = None
            if p.is_binder():
                save = p.i
                names = p.binder()
                if p.tok.kind == "(":
                    p.i = save
                else:
                    fresh = names
            rhs = p.solution()
            p.expect(";")
            rules.append(kappa_rule(name, lhs, rhs, fresh))
        elif t.kind == "ident" and t.text == "init":
            p.i += 1
            p.expect(":")
            init = p.solution()
            p.expect(";")
        else:
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col, ["protein", "rule", "init"])
    return KappaModel(p.arities, rules, init)
