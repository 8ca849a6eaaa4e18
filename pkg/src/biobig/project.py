"""Protein and mobility views of biological bigraphs, and the per-step check
that every reaction is justified in at least one view."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Bigraph, Interface, support_equiv
from .rewrite import (ReactiveSystem, Rule, RuleError, Trace, apply_match, find_matches)


class TheoremViolation(AssertionError):
    def __init__(self, step: int, reason: str):
        self.step = step
        super().__init__(f"step {step}: {reason}")


def project_protein(g: Bigraph) -> Bigraph:
    """Forget places, membranes and mobility nodes: a protein link graph on
    the names of g. Surviving ports on an edge that also touched a deleted
    node stay together on that edge (a fresh edge of the same type)."""
    keep = {v for v, c in g.ctrl.items() if c.kind == "protein"}
    link = {p: l for p, l in g.link.items() if not (isinstance(p, tuple) and p[0] not in keep)}
    used = {l for l in link.values() if isinstance(l, int)}
    return Bigraph({v: g.ctrl[v] for v in keep}, {e: t for e, t in g.edges.items() if e in used},
                   {}, link, Interface.of(0, g.inner.types), Interface.of(0, g.outer.types))


def project_mobility(g: Bigraph) -> Bigraph:
    """Forget proteins; keep places, membranes, mobility nodes and interfaces."""
    drop = {v for v, c in g.ctrl.items() if c.kind == "protein"}
    link = {p: l for p, l in g.link.items() if not (isinstance(p, tuple) and p[0] in drop)}
    used = {l for l in link.values() if isinstance(l, int)}
    return Bigraph({v: c for v, c in g.ctrl.items() if v not in drop},
                   {e: t for e, t in g.edges.items() if e in used},
                   {c: p for c, p in g.prnt.items() if c not in drop}, link, g.inner, g.outer)


def _project_rules(rules, view, exclude=()) -> list:
    out = []
    for r in rules:
        if r.name in exclude:
            continue
        l, rr = view(r.lhs), view(r.rhs)
        if support_equiv(l, rr):
            continue
        try:
            out.append(Rule(f"{r.name}", l, rr, "plain", r.guarded))
        except RuleError:
            continue
    return out


_CACHE: dict = {}


def projected_systems(system: ReactiveSystem) -> tuple[ReactiveSystem, ReactiveSystem]:
    """(protein view of the non-commitment rules, mobility view of all rules), cached."""
    key = id(system)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is system:
        return hit[1], hit[2]
    prot = ReactiveSystem(system.signature,
                          _project_rules(system.rules, project_protein, ("pinch", "fuse")), "none")
    mob = ReactiveSystem(system.signature, _project_rules(system.rules, project_mobility), "bio")
    _CACHE[key] = (system, prot, mob)
    return prot, mob


def reaches_in_one_step(g: Bigraph, h: Bigraph, system: ReactiveSystem) -> str | None:
    """Name of a rule taking g to (something support-equivalent to) h, if any."""
    for rule in system.rules:
        guard = None
        if rule.guarded:
            guard = lambda m, rule=rule: not system.check(apply_match(g, rule, m))
        for m in find_matches(g, rule, guard):
            if support_equiv(apply_match(g, rule, m), h):
                return rule.name
    return None


@dataclass
class StepReport:
    step: int
    rule: str
    protein_changed: bool
    mobility_changed: bool
    protein_step_valid: bool
    mobility_step_valid: bool

    @property
    def ok(self) -> bool:
        return ((self.protein_changed or self.mobility_changed)
                and self.protein_step_valid and self.mobility_step_valid)


@dataclass
class ProjectionReport:
    per_step: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.per_step)

    def tsv(self) -> str:
        lines = ["step\trule\tprotein_changed\tmobility_changed\tprotein_step_valid\tmobility_step_valid"]
        for s in self.per_step:
            lines.append("\t".join([str(s.step), s.rule] + [str(x).lower() for x in (
                s.protein_changed, s.mobility_changed, s.protein_step_valid, s.mobility_step_valid)]))
        return "\n".join(lines) + "\n"


def project_trace(trace: Trace, system: ReactiveSystem, strict: bool = True) -> ProjectionReport:
    prot, mob = projected_systems(system)
    report = ProjectionReport()
    for k, (name, _) in enumerate(trace.steps, 1):
        g, h = trace.states[k - 1], trace.states[k]
        pg, ph = project_protein(g), project_protein(h)
        mg, mh = project_mobility(g), project_mobility(h)
        pc = not support_equiv(pg, ph)
        mc = not support_equiv(mg, mh)
        pv = reaches_in_one_step(pg, ph, prot) is not None if pc else True
        mv = reaches_in_one_step(mg, mh, mob) is not None if mc else True
        rep = StepReport(k, name, pc, mc, pv, mv)
        report.per_step.append(rep)
        if strict and not rep.ok:
            if not (pc or mc):
                raise TheoremViolation(k, f"{name} changes neither view")
            raise TheoremViolation(k, f"{name}: changed view is not a projected reaction")
    return report
