"""Command-line front end: ``biobig {parse,validate,encode,run,project,export-dot}``.

Exit codes: 0 success, 1 invalid input or failed checks, 2 usage errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import kappa as K
from .controls import bio_signature, protein_signature
from .dot import to_dot
from .graph import BigraphError
from .models import ValidationError, bundled, dumps_model, loads_model
from .project import TheoremViolation, project_mobility, project_protein, project_trace
from .rewrite import run as run_system
from .serialize import dumps, loads
from .sorting import check_bio, check_protsol
from .term import TermError, to_term


class InputError(Exception):
    pass


def _read(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    try:
        return bundled(p.name)
    except (FileNotFoundError, OSError):
        raise InputError(f"no such file: {path}") from None


def _model(path: str, validate: bool = True):
    return loads_model(_read(path), validate)


def _graph_signature(g):
    sig = bio_signature()
    for c in g.ctrl.values():
        sig.controls.setdefault(c.name, c)
    return sig


def cmd_parse(a) -> int:
    text = _read(a.file)
    if a.kappa or a.file.endswith(".kappa"):
        m = K.parse_model(text)
        for name, ar in m.arities.items():
            print(f"protein {name}:{ar};")
        for r in m.rules:
            l, rr = r.pair()
            print(f"rule {r.name} : {K.to_text(l)} -> {K.to_text(rr)};  # {r.kind}")
        if m.init is not None:
            print(f"init : {K.to_text(m.init)};")
        return 0
    sys.stdout.write(dumps_model(loads_model(text, validate=False)))
    return 0


def cmd_validate(a) -> int:
    if a.file.endswith(".json"):
        g = loads(_read(a.file))
        if all(c.kind == "protein" for c in g.ctrl.values()) and g.is_link_graph:
            bad = check_protsol(g)
        else:
            bad = check_bio(g, _graph_signature(g))
        for v in bad:
            print(v.line(), file=sys.stderr)
        return 1 if bad else 0
    try:
        _model(a.file)
    except ValidationError as exc:
        for p in exc.problems:
            print(p, file=sys.stderr)
        return 1
    return 0


def cmd_encode(a) -> int:
    if a.kappa is not None:
        text = a.kappa
    elif a.file is not None:
        text = _read(a.file)
    else:
        raise InputError("encode needs --kappa TEXT or --file FILE")
    s, ar = K.parse_with_arities(text)
    names = {n: "b" for n in a.names.split(",") if n} if a.names is not None else None
    g = K.encode(s, names, protein_signature(ar))
    sys.stdout.write(to_dot(g, "solution") if a.format == "dot" else dumps(g))
    return 0


def _trace(a, model):
    return run_system(model.initial, model.system, a.strategy, a.steps)


def cmd_run(a) -> int:
    path = a.model or a.file
    if path is None:
        raise InputError("run needs a model file")
    model = _model(path)
    trace = _trace(a, model)
    if a.dot_dir:
        out = Path(a.dot_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, g in enumerate(trace.states):
            (out / f"state_{k:03d}.dot").write_text(to_dot(g, f"state {k}"))
        (out / "trace.tsv").write_text(trace.tsv())
    sys.stdout.write(trace.tsv())
    if a.final:
        print(to_term(trace.states[-1]))
    return 0


def cmd_project(a) -> int:
    model = _model(a.model or a.file)
    trace = _trace(a, model)
    if a.check_theorem:
        try:
            report = project_trace(trace, model.system, strict=False)
        except TheoremViolation as exc:  # pragma: no cover - strict=False never raises
            print(str(exc), file=sys.stderr)
            return 1
        sys.stdout.write(report.tsv())
        return 0 if report.ok else 1
    g = trace.states[-1]
    view = project_protein(g) if a.view == "protein" else project_mobility(g)
    sys.stdout.write(to_dot(view, a.view) if a.format == "dot" else dumps(view))
    return 0


def cmd_export_dot(a) -> int:
    if a.file.endswith(".json"):
        g = loads(_read(a.file))
    else:
        model = _model(a.file)
        if a.rule:
            try:
                rule = model.system.rule(a.rule)
            except KeyError:
                raise InputError(f"no rule named {a.rule!r}") from None
            g = rule.lhs if a.side == "lhs" else rule.rhs
        else:
            g = model.initial
    sys.stdout.write(to_dot(g, a.rule or "initial"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biobig", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse", help="parse a model (.biobig) or kappa (.kappa) file and print it")
    p.add_argument("file")
    p.add_argument("--kappa", action="store_true", help="treat the file as a kappa model")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("validate", help="check a model or a JSON graph against the sortings")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("encode", help="encode a kappa solution as a protein link graph")
    p.add_argument("--kappa", help="solution text, optionally preceded by 'protein A:n;' lines")
    p.add_argument("--file", help="file holding the solution text")
    p.add_argument("--names", help="comma-separated outer names (default: the free names)")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_encode)

    for name, func, hlp in (("run", cmd_run, "simulate a model"),
                            ("project", cmd_project, "protein or mobility view of a run")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("file", nargs="?")
        p.add_argument("--model")
        p.add_argument("--steps", type=int, default=0 if name == "project" else 100)
        p.add_argument("--strategy", default="first", help="first | random:SEED | bfs:DEPTH")
        if name == "run":
            p.add_argument("--dot-dir")
            p.add_argument("--final", action="store_true", help="print the final state as a term")
        else:
            p.add_argument("--view", choices=("protein", "mobility"), default="protein")
            p.add_argument("--check-theorem", action="store_true")
            p.add_argument("--format", choices=("json", "dot"), default="json")
        p.set_defaults(func=func)

    p = sub.add_parser("export-dot", help="DOT rendering of a model's initial state, a rule or a graph")
    p.add_argument("file")
    p.add_argument("--rule")
    p.add_argument("--side", choices=("lhs", "rhs"), default="lhs")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if getattr(a, "strategy", None):
        from .rewrite import parse_strategy
        try:
            parse_strategy(a.strategy)
        except ValueError as exc:
            ap.print_usage(sys.stderr)
            print(f"biobig: error: {exc}", file=sys.stderr)
            return 2
    try:
        return a.func(a)
    except ValidationError as exc:
        for p in exc.problems:
            print(p, file=sys.stderr)
        return 1
    except (InputError, K.KappaError, TermError, BigraphError, ValueError) as exc:
        print(f"biobig: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
