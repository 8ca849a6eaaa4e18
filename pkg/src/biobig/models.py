"""Case-study models and the ``.biobig`` model file format.

Model files are sequences of statements::

    model NAME;
    control NAME arity=K activity=atomic polarity=polar kind=protein;
    rule NAME kind={mono|anti|intro} : GRAPH -> GRAPH;
    init : GRAPH;

Membrane and mobility controls are always declared. The pinch and fuse rules
are always present and are never written to files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .bio import bio_system, introduction_rule, located_rule, rule_side_violations
from .controls import MEMBRANE, MOBILITY, bio_signature
from .graph import Bigraph, Control, Interface, Signature, TypeClash, compose
from .rewrite import ReactiveSystem, Rule, RuleError
from .sorting import check_bio
from .term import TermError, TermParser, build, parse_term, to_term, tokenize

KIND_WORDS = {"mono": "monotone", "anti": "antimonotone", "intro": "introduction"}
WORD_KINDS = {v: k for k, v in KIND_WORDS.items()}


class ValidationError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class Model:
    name: str
    signature: Signature
    rules: list  # user rules, without pinch/fuse
    initial: Bigraph
    description: str = ""
    _system: ReactiveSystem | None = field(default=None, repr=False)

    @property
    def system(self) -> ReactiveSystem:
        if self._system is None:
            self._system = bio_system(self.signature, self.rules)
        return self._system


# -- loading --------------------------------------------------------------------


def _pad(g: Bigraph, names: dict) -> Bigraph:
    merged = dict(g.outer.types)
    for n, t in names.items():
        if merged.setdefault(n, t) != t:
            raise TypeClash(f"name {n} has types {merged[n]} and {t} on the two rule sides")
    return g.replace(outer=Interface.of(g.outer.width, merged))


def make_rule(name: str, kind: str, lhs: Bigraph, rhs: Bigraph) -> Rule:
    lhs, rhs = _pad(lhs, rhs.outer.types), _pad(rhs, lhs.outer.types)
    if kind == "introduction":
        return introduction_rule(name, lhs, rhs)
    return located_rule(name, lhs, rhs, kind)


def loads_model(text: str, validate: bool = True) -> Model:
    toks = tokenize(text)
    p = TermParser(toks)
    sig = bio_signature()
    name, desc = "model", ""
    rules: list = []
    init = None
    problems: list = []

    def graph():
        ast = p.term()
        return build(ast, sig)

    while p.tok.kind != "eof":
        t = p.tok
        if t.kind != "ident":
            raise TermError(f"unexpected {t.text!r}", t.line, t.col, ["model", "control", "rule", "init"])
        word = t.text
        p.i += 1
        if word == "model":
            name = p.expect("ident").text
            p.expect(";")
        elif word == "control":
            cname = p.expect("ident").text
            attrs = {}
            while p.tok.kind == "ident":
                key = p.expect("ident").text
                p.expect("=")
                val = p.tok
                p.i += 1
                attrs[key] = val.text
            p.expect(";")
            try:
                c = Control(cname, int(attrs.get("arity", 0)), attrs.get("activity", "atomic"),
                            attrs.get("polarity", "polar"), attrs.get("kind", "protein"))
            except ValueError as exc:
                raise TermError(str(exc), t.line, t.col) from None
            if any(c.name == b.name for b in MEMBRANE + MOBILITY):
                if sig[c.name] != c:
                    raise TermError(f"control {c.name} is predeclared differently", t.line, t.col)
            sig.add(c)
        elif word == "rule":
            rname = p.expect("ident").text
            kind = "monotone"
            if p.tok.kind == "ident" and p.tok.text == "kind":
                p.i += 1
                p.expect("=")
                kw = p.expect("ident")
                if kw.text not in KIND_WORDS:
                    raise TermError(f"unknown rule kind {kw.text!r}", kw.line, kw.col, list(KIND_WORDS))
                kind = KIND_WORDS[kw.text]
            p.expect(":")
            lhs = graph()
            p.expect("arrow")
            rhs = graph()
            p.expect(";")
            try:
                rules.append(make_rule(rname, kind, lhs, rhs))
            except (RuleError, TypeClash) as exc:
                problems.append(f"rule {rname}: {exc}")
        elif word == "init":
            p.expect(":")
            init = graph()
            p.expect(";")
        else:
            raise TermError(f"unexpected {word!r}", t.line, t.col, ["model", "control", "rule", "init"])
    if init is None:
        problems.append("missing init statement")
    if validate:
        for c in sig.controls.values():
            if c.kind == "protein" and c.activity != "atomic":
                problems.append(f"protein control {c.name} must be atomic")
        for r in rules:
            problems.extend(f"rule {r.name}: {v.line()}" for v in rule_side_violations(r, sig))
        if init is not None:
            problems.extend(v.line() for v in check_bio(init, sig))
            if not init.is_ground:
                problems.append("initial state must be ground")
        if problems:
            raise ValidationError(problems)
    return Model(name, sig, rules, init, desc)


def load_model(path, validate: bool = True) -> Model:
    return loads_model(Path(path).read_text(), validate)


def dumps_model(model: Model) -> str:
    lines = [f"model {model.name};"]
    for c in model.signature.controls.values():
        if c in MEMBRANE + MOBILITY:
            continue
        lines.append(f"control {c.name} arity={c.arity} activity={c.activity} "
                     f"polarity={c.polarity} kind={c.kind};")
    for r in model.rules:
        lines.append(f"rule {r.name} kind={WORD_KINDS[r.kind]} :\n  {to_term(r.lhs)}\n  -> {to_term(r.rhs)};")
    lines.append(f"init : {to_term(model.initial)};")
    return "\n".join(lines) + "\n"


def save_model(model: Model, path) -> None:
    Path(path).write_text(dumps_model(model))


def bundled(name: str) -> str:
    return resources.files("biobig").joinpath("data", name).read_text()


# -- the vesicle model -------------------------------------------------------------

VESICLE_CONTROLS = """\
control cargo arity=1 activity=atomic polarity=polar kind=protein;
control rec^ext arity=2 activity=atomic polarity=polar kind=protein;
control rec^m arity=2 activity=atomic polarity=apolar kind=protein;
control rec^cys arity=2 activity=atomic polarity=polar kind=protein;
control adpt arity=2 activity=atomic polarity=polar kind=protein;
control clath arity=1 activity=atomic polarity=polar kind=protein;
"""

VESICLE_PROTEIN_RULES = """\
rule rec kind=mono :
  /x:v /y:v /z:b /w:b /k:h (cargo_{x} | rec^ext_{y,z} || rec^m_{z,w} || rec^cys_{w,k})
  -> /b:b /z:b /w:b /k:v (cargo_{b} | rec^ext_{b,z} || rec^m_{z,w} || rec^cys_{w,k});
rule adpt kind=mono :
  /k:v /x:v /y:h rec^cys_{w,k} | adpt_{x,y}
  -> /b:b /y:v rec^cys_{w,b} | adpt_{b,y};
rule coat kind=mono :
  /y:v /z:v adpt_{x,y} | clath_{z}
  -> /b:b adpt_{x,b} | clath_{b};
"""

VESICLE_UNCOAT = """\
rule uncoat kind=anti :
  /b:b /c:b rec^cys_{w,b} | adpt_{b,c} | clath_{c}
  -> /k:v /x:v /c:b rec^cys_{w,k} | adpt_{x,c} | clath_{c};
"""


def _complexes(n: int, bound: bool):
    """Per-region term parts for n receptor complexes (bonded or initial)."""
    outside, membrane, cytosol, closures = [], [], [], []
    for i in range(n):
        a, b, c, d, e = (f"{s}{i}" for s in "abcde")
        if bound:
            closures += [f"/{a}:b", f"/{b}:b", f"/{c}:b", f"/{d}:b", f"/{e}:b"]
            outside += [f"cargo_{{{a}}}", f"rec^ext_{{{a},{b}}}"]
            membrane.append(f"rec^m_{{{b},{c}}}")
            cytosol += [f"rec^cys_{{{c},{d}}}", f"adpt_{{{d},{e}}}", f"clath_{{{e}}}"]
        else:
            v, u, k, x, y, z = (f"{s}{i}" for s in "vukxyz")
            closures += [f"/{v}:v", f"/{u}:v", f"/{b}:b", f"/{c}:b", f"/{k}:h",
                         f"/{x}:v", f"/{y}:h", f"/{z}:v"]
            outside += [f"cargo_{{{v}}}", f"rec^ext_{{{u},{b}}}"]
            membrane.append(f"rec^m_{{{b},{c}}}")
            cytosol += [f"rec^cys_{{{c},{k}}}", f"adpt_{{{x},{y}}}", f"clath_{{{z}}}"]
    return outside, membrane, cytosol, closures


def p_intro_rule_text(n: int = 1) -> str:
    out, mem, cys, cl = _complexes(n, True)
    pre = " ".join(cl)
    lhs = (f"{pre} {' | '.join(out)} | m^ext[ {' | '.join(mem)} | $0 | "
           f"m^cys[ {' | '.join(cys)} | $1 ] ]")
    rhs = (f"{pre} /px:h /py:h p^c_{{px}}[ {' | '.join(out)} ] | "
           f"m^ext[ p^m_{{px,py}}[ {' | '.join(mem)} ] | $0 | "
           f"m^cys[ {' | '.join(cys)} | p^d_{{py}} | $1 ] ]")
    return f"rule P-intro kind=intro :\n  {lhs}\n  -> {rhs};\n"


def vesicle_initial_text(n: int = 1) -> str:
    out, mem, cys, cl = _complexes(n, False)
    return (f"init : {' '.join(cl)} {' | '.join(out)} | "
            f"m^ext[ {' | '.join(mem)} | m^cys[ {' | '.join(cys)} ] ];\n")


def vesicle_source(n: int = 1) -> str:
    return ("# Receptor-mediated endocytosis: clathrin-coated vesicle formation.\n"
            "model vesicle;\n" + VESICLE_CONTROLS + VESICLE_PROTEIN_RULES
            + p_intro_rule_text(n) + VESICLE_UNCOAT + vesicle_initial_text(n))


def vesicle_model(n: int = 1) -> Model:
    """Rules rec, adpt, coat, P-intro (for n complexes), uncoat; commitment
    rules come first in the system's rule order."""
    if n == 1:
        return loads_model(bundled("vesicle.biobig"))
    return loads_model(vesicle_source(n))


P_CMPLX = ("/x:b /y:b /z:b /w:b /k:b "
           "cargo_{x} | rec^ext_{x,y} | $0 || rec^m_{y,z} | $1 || "
           "rec^cys_{z,w} | adpt_{w,k} | clath_{k} | $2")


def vesicle_signature() -> Signature:
    return bio_signature({"cargo": 1, "rec^ext": 2, "rec^cys": 2, "adpt": 2, "clath": 1}, {"rec^m": 2})


def build_pcmplx(n: int) -> Bigraph:
    """(P-cmplx)^n: n receptor complexes spread over three regions."""
    sig = vesicle_signature()
    g = parse_term("1 || 1 || 1", sig)
    step = parse_term(P_CMPLX, sig)
    for _ in range(n):
        g = compose(step, g)
    return g


# -- the phagocytosis model ----------------------------------------------------------


def phago_model() -> Model:
    return loads_model(bundled("phago.biobig"))
