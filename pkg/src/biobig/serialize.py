"""JSON serialisation of bigraphs (the graph file format used by the CLI)."""
from __future__ import annotations

import json

from .graph import Bigraph, Control, Interface, Root, Site, normalize_ids


def _place_out(p):
    if isinstance(p, int):
        return {"node": p}
    if isinstance(p, Site):
        return {"site": p.index}
    return {"root": p.index}


def _place_in(d):
    if "node" in d:
        return d["node"]
    if "site" in d:
        return Site(d["site"])
    return Root(d["root"])


def to_dict(g: Bigraph) -> dict:
    g = normalize_ids(g)
    controls = {}
    for c in g.ctrl.values():
        controls[c.name] = {"arity": c.arity, "activity": c.activity,
                            "polarity": c.polarity, "kind": c.kind}
    return {
        "inner": {"width": g.inner.width, "names": dict(sorted(g.inner.names))},
        "outer": {"width": g.outer.width, "names": dict(sorted(g.outer.names))},
        "controls": dict(sorted(controls.items())),
        "nodes": [{"id": v, "control": g.ctrl[v].name} for v in sorted(g.ctrl)],
        "edges": [{"id": e, "type": g.edges[e]} for e in sorted(g.edges)],
        "prnt": [{"child": _place_out(c), "parent": _place_out(p)}
                 for c, p in sorted(g.prnt.items(), key=lambda kv: (isinstance(kv[0], Site), kv[0] if isinstance(kv[0], int) else kv[0].index))],
        "link": [{"point": ({"port": list(p)} if isinstance(p, tuple) else {"name": p}),
                  "link": ({"edge": l} if isinstance(l, int) else {"name": l})}
                 for p, l in sorted(g.link.items(), key=lambda kv: (isinstance(kv[0], str), str(kv[0])))],
    }


def from_dict(d: dict, signature=None) -> Bigraph:
    controls = {}
    for name, spec in d.get("controls", {}).items():
        controls[name] = Control(name, spec["arity"], spec.get("activity", "active"),
                                 spec.get("polarity", "neutral"), spec.get("kind", "protein"))
    if signature is not None:
        controls.update(signature.controls)
    ctrl = {n["id"]: controls[n["control"]] for n in d["nodes"]}
    edges = {e["id"]: e["type"] for e in d["edges"]}
    prnt = {_place_in(x["child"]): _place_in(x["parent"]) for x in d["prnt"]}
    link = {}
    for x in d["link"]:
        pt = tuple(x["point"]["port"]) if "port" in x["point"] else x["point"]["name"]
        ln = x["link"]["edge"] if "edge" in x["link"] else x["link"]["name"]
        link[pt] = ln
    return Bigraph(ctrl, edges, prnt, link,
                   Interface.of(d["inner"]["width"], d["inner"]["names"]),
                   Interface.of(d["outer"]["width"], d["outer"]["names"]))


def dumps(g: Bigraph) -> str:
    return json.dumps(to_dict(g), indent=1, sort_keys=True) + "\n"


def loads(text: str, signature=None) -> Bigraph:
    return from_dict(json.loads(text), signature)
