"""Textual bigraph terms.

Grammar (loosest binding first)::

    term    := prefix* regions
    prefix  := '/' NAME [':' TYPE]        closure over the rest of the group
             | NAME '/' NAME                rename: the right name becomes the left
    regions := par (';' par)*             regions, side by side
    par     := prime ('||' prime)*        parallel product (roots side by side)
    prime   := factor ('|' factor)*       prime product (one root)
    factor  := CONTROL ['_{' names '}'] ['[' term ']']
             | '$' INT | '1' | '(' term ')'

``names`` is a comma list of ``x`` or ``x:t``; the default type is ``b``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .graph import Bigraph, BigraphError, Interface, Root, Signature, Site, TypeClash, normalize_ids

KEYWORDS = frozenset({"control", "rule", "init", "protein", "model"})


class TermError(BigraphError):
    def __init__(self, msg, line=0, col=0, expected=()):
        self.line, self.col, self.expected = line, col, tuple(expected)
        where = f"{line}:{col}: " if line else ""
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{where}{msg}{exp}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<sub>_\{)
  | (?P<arrow>->)
  | (?P<par>\|\|)
  | (?P<site>\$\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9^']*(?:(?:_(?!\{)|-)[A-Za-z0-9^']+)*)
  | (?P<int>\d+)
  | (?P<sym>[|;\[\](){},:/=])
""", re.VERBOSE)


class Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermError(f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Tok(m.group() if kind == "sym" else kind, m.group(), line, pos - lstart + 1))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                lstart = pos + k + 1
        pos = m.end()
    out.append(Tok("eof", "", line, pos - lstart + 1))
    return out


# -- AST -------------------------------------------------------------------------


@dataclass(frozen=True)
class TNode:
    control: str
    names: tuple  # of (name, type or None)
    body: object  # term or None
    pos: tuple


@dataclass(frozen=True)
class TSite:
    index: int


@dataclass(frozen=True)
class TOne:
    pass


@dataclass(frozen=True)
class TPrime:
    parts: tuple


@dataclass(frozen=True)
class TPar:
    parts: tuple


@dataclass(frozen=True)
class TClose:
    name: str
    etype: str
    body: object


@dataclass(frozen=True)
class TRename:
    target: str
    source: str
    body: object


class TermParser:
    def __init__(self, toks: list[Tok], i: int = 0):
        self.toks, self.i = toks, i

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def expect(self, kind: str) -> Tok:
        t = self.tok
        if t.kind != kind:
            raise TermError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col, [repr(kind)])
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def _factor_start(self, t: Tok) -> bool:
        return (t.kind in ("site", "(", "/") or (t.kind == "int" and t.text == "1")
                or (t.kind == "ident" and t.text not in KEYWORDS))

    def term(self):
        t = self.tok
        if t.kind == "/":
            self.i += 1
            name = self.expect("ident").text
            etype = "b"
            if self.accept(":"):
                etype = self.expect("ident").text
            return TClose(name, etype, self.term())
        if t.kind == "ident" and self.peek().kind == "/":
            target = t.text
            self.i += 2
            source = self.expect("ident").text
            return TRename(target, source, self.term())
        parts = [self.par()]
        while self.tok.kind == ";" and self._factor_start(self.peek()):
            self.i += 1
            parts.append(self.par())
        return parts[0] if len(parts) == 1 else TPar(tuple(parts))

    def par(self):
        parts = [self.prime()]
        while self.accept("par"):
            parts.append(self.prime())
        return parts[0] if len(parts) == 1 else TPar(tuple(parts))

    def prime(self):
        parts = [self.factor()]
        while self.accept("|"):
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else TPrime(tuple(parts))

    def factor(self):
        t = self.tok
        if t.kind == "site":
            self.i += 1
            return TSite(int(t.text[1:]))
        if t.kind == "int" and t.text == "1":
            self.i += 1
            return TOne()
        if t.kind == "(":
            self.i += 1
            body = self.term()
            self.expect(")")
            return body
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            names = []
            if self.accept("sub"):
                if self.tok.kind != "}":
                    while True:
                        n = self.expect("ident").text
                        ty = None
                        if self.accept(":"):
                            ty = self.expect("ident").text
                        names.append((n, ty))
                        if not self.accept(","):
                            break
                self.expect("}")
            body = None
            if self.accept("["):
                body = self.term()
                self.expect("]")
            return TNode(t.text, tuple(names), body, (t.line, t.col))
        raise TermError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col,
                        ["control", "$i", "1", "(", "/x"])


# -- evaluation --------------------------------------------------------------------


def build(ast, sig: Signature) -> Bigraph:
    ctrl, edges, prnt, link = {}, {}, {}, {}
    outer: dict = {}
    sites: set = set()

    def resolve(name, ty, env, pos):
        if name in env:
            return env[name]
        t = ty or "b"
        if outer.setdefault(name, t) != t:
            raise TypeClash(f"{pos[0]}:{pos[1]}: name {name} used with types {outer[name]} and {t}")
        return name

    def ev(t, env) -> list:
        """Returns a list of roots; each root is a list of places."""
        if isinstance(t, TSite):
            if t.index in sites:
                raise TermError(f"site ${t.index} occurs twice")
            sites.add(t.index)
            return [[Site(t.index)]]
        if isinstance(t, TOne):
            return [[]]
        if isinstance(t, TPrime):
            return [[p for part in t.parts for r in ev(part, env) for p in r]]
        if isinstance(t, TPar):
            return [r for part in t.parts for r in ev(part, env)]
        if isinstance(t, TClose):
            e = len(edges)
            if t.etype not in ("h", "v", "b"):
                raise TermError(f"closure /{t.name} has non-edge type {t.etype!r}")
            edges[e] = t.etype
            return ev(t.body, {**env, t.name: e})
        if isinstance(t, TRename):
            tgt = env[t.target] if t.target in env else t.target
            return ev(t.body, {**env, t.source: tgt})
        if t.control not in sig:
            raise TermError(f"unknown control {t.control!r}", *t.pos)
        c = sig[t.control]
        if len(t.names) != c.arity:
            raise TermError(f"{c.name} has arity {c.arity}, got {len(t.names)} names", *t.pos)
        v = len(ctrl)
        ctrl[v] = c
        for i, (n, ty) in enumerate(t.names):
            link[(v, i)] = resolve(n, ty, env, t.pos)
        if t.body is not None:
            for r in ev(t.body, env):
                for p in r:
                    prnt[p] = v
        return [[v]]

    roots = ev(ast, {})
    for j, r in enumerate(roots):
        for p in r:
            prnt[p] = Root(j)
    width = len(sites)
    if sites != set(range(width)):
        raise TermError(f"sites must be $0..${width - 1}, got {sorted(sites)}")
    for l in link.values():
        if isinstance(l, str) and l in outer:
            pass
    used = {l for l in link.values() if isinstance(l, int)}
    edges = {e: t for e, t in edges.items() if e in used}
    try:
        return normalize_ids(Bigraph(ctrl, edges, prnt, link, Interface(width), Interface.of(len(roots), outer)))
    except TermError:
        raise
    except BigraphError as exc:
        raise TermError(str(exc)) from None


def parse_term(text: str, sig: Signature) -> Bigraph:
    p = TermParser(tokenize(text))
    ast = p.term()
    p.expect("eof")
    return build(ast, sig)


# -- printing -------------------------------------------------------------------------


def to_term(g: Bigraph) -> str:
    """Print a placed bigraph with every edge closed at top level.

    Idle outer names have no syntax and are dropped; model files restore
    them on rule sides from the other side of the rule.
    """
    if g.is_link_graph and g.ctrl:
        raise BigraphError("term syntax needs placed bigraphs")
    used = sorted({l for l in g.link.values() if isinstance(l, int)})
    taken = set(g.outer.name_set)
    ename = {}
    k = 0
    for e in used:
        while f"e{k}" in taken:
            k += 1
        ename[e] = f"e{k}"
        k += 1
    otypes = g.outer.types
    kids: dict = {}
    for c, p in g.prnt.items():
        kids.setdefault(p, []).append(c)

    def key(p):
        return (0, p) if isinstance(p, int) else (1, p.index)

    def place(p) -> str:
        if isinstance(p, Site):
            return f"${p.index}"
        c = g.ctrl[p]
        s = c.name
        if c.arity:
            names = []
            for i in range(c.arity):
                l = g.link[(p, i)]
                names.append(ename[l] if isinstance(l, int) else f"{l}:{otypes[l]}")
            s += "_{" + ",".join(names) + "}"
        ch = sorted(kids.get(p, []), key=key)
        if ch:
            s += "[" + " | ".join(place(x) for x in ch) + "]"
        return s

    def root(j) -> str:
        ch = sorted(kids.get(Root(j), []), key=key)
        return " | ".join(place(x) for x in ch) if ch else "1"

    body = " || ".join(root(j) for j in range(g.outer.width))
    if g.outer.width > 1 and used:
        body = f"({body})"
    prefix = "".join(f"/{ename[e]}:{g.edges[e]} " for e in used)
    return prefix + body
