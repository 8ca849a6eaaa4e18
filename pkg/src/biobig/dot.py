"""Graphviz DOT rendering of bigraphs.

Nesting becomes clusters, links become small point-shaped hub vertices.
Output depends only on the graph after id normalisation, so equal inputs
give byte-identical text.
"""
from __future__ import annotations

from .graph import Bigraph, Root, Site, normalize_ids


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: Bigraph, name: str = "bigraph") -> str:
    g = normalize_ids(g)
    lines = [f"digraph {_q(name)} {{", "  compound=true;", "  node [fontsize=10];"]
    kids: dict = {}
    for c, p in g.prnt.items():
        kids.setdefault(p, []).append(c)

    def key(p):
        return (0, p) if isinstance(p, int) else (1, p.index)

    def emit(place, indent):
        pad = "  " * indent
        for c in sorted(kids.get(place, []), key=key):
            if isinstance(c, Site):
                lines.append(f"{pad}{_q(f's{c.index}')} [label={_q(f'${c.index}')}, shape=box, style=dashed];")
            elif kids.get(c):
                lines.append(f"{pad}subgraph {_q(f'cluster_n{c}')} {{")
                lines.append(f"{pad}  label={_q(g.ctrl[c].name)};")
                lines.append(f"{pad}  {_q(f'n{c}')} [label={_q(g.ctrl[c].name)}, shape=ellipse];")
                emit(c, indent + 1)
                lines.append(f"{pad}}}")
            else:
                lines.append(f"{pad}{_q(f'n{c}')} [label={_q(g.ctrl[c].name)}, shape=ellipse];")

    for j in range(g.outer.width):
        lines.append(f"  subgraph {_q(f'cluster_r{j}')} {{")
        lines.append(f"    label={_q(f'root {j}')}; style=dashed;")
        lines.append(f"    {_q(f'r{j}')} [label=\"\", shape=point, style=invis];")
        emit(Root(j), 2)
        lines.append("  }")
    if g.is_link_graph:
        for v in sorted(g.ctrl):
            lines.append(f"  {_q(f'n{v}')} [label={_q(g.ctrl[v].name)}, shape=ellipse];")
    for e in sorted(g.edges):
        lines.append(f"  {_q(f'e{e}')} [label={_q(g.edges[e])}, shape=point, xlabel={_q(g.edges[e])}];")
    for n, t in sorted(g.outer.names):
        lines.append(f"  {_q(f'y_{n}')} [label={_q(f'{n}:{t}')}, shape=plaintext];")
    for n, t in sorted(g.inner.names):
        lines.append(f"  {_q(f'x_{n}')} [label={_q(f'{n}:{t}')}, shape=plaintext];")
    for p, l in sorted(g.link.items(), key=lambda kv: (isinstance(kv[0], str), str(kv[0]))):
        target = f"e{l}" if isinstance(l, int) else f"y_{l}"
        if isinstance(p, tuple):
            lines.append(f"  {_q(f'n{p[0]}')} -> {_q(target)} [dir=none, taillabel={_q(str(p[1]))}];")
        else:
            lines.append(f"  {_q(f'x_{p}')} -> {_q(target)} [dir=none, style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"
