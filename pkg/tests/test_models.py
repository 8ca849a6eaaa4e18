import pytest

from biobig.graph import support_equiv
from biobig.models import (ValidationError, build_pcmplx, bundled, dumps_model, load_model, loads_model,
                           phago_model, save_model, vesicle_model, vesicle_source)
from biobig.project import project_mobility
from biobig.rewrite import run
from biobig.term import TermError, parse_term

HEADER = "model t;\ncontrol A arity=1 activity=atomic polarity=polar kind=protein;\n"


@pytest.mark.parametrize("make", [lambda: vesicle_model(1), phago_model, lambda: vesicle_model(2),
                                  lambda: loads_model(bundled("shuttle.biobig"))])
def test_save_load_roundtrip(make, tmp_path):
    m = make()
    path = tmp_path / "m.biobig"
    save_model(m, path)
    back = load_model(path)
    assert [r.name for r in back.rules] == [r.name for r in m.rules]
    assert [r.kind for r in back.rules] == [r.kind for r in m.rules]
    assert support_equiv(back.initial, m.initial)
    for a, b in zip(m.rules, back.rules):
        assert support_equiv(a.lhs, b.lhs) and support_equiv(a.rhs, b.rhs)


def test_bundled_vesicle_matches_generator():
    assert bundled("vesicle.biobig") == vesicle_source(1)


def test_vesicle_variants_scale():
    for n in (1, 2, 3):
        m = vesicle_model(n)
        assert sum(1 for c in m.initial.ctrl.values() if c.kind == "protein") == 6 * n
        intro = m.system.rule("P-intro")
        assert sum(1 for c in intro.lhs.ctrl.values() if c.kind == "protein") == 6 * n


def test_pcmplx_power():
    g = build_pcmplx(2)
    assert len(g.ctrl) == 12 and g.outer.width == 3 and g.is_ground


def test_phago_engulfs_the_particle():
    m = phago_model()
    trace = run(m.initial, m.system, "first", 50)
    names = [s for s, _ in trace.steps]
    assert names[-1] == "pinch" and "phago-intro" in names
    final = trace.states[-1]
    (particle,) = [v for v, c in final.ctrl.items() if c.name == "particle"]
    layers = [final.ctrl[a].name for a in final.ancestors(particle) if isinstance(a, int)]
    assert layers == ["m^cys", "m^ext", "m^cys", "m^ext"]
    assert support_equiv(project_mobility(final), parse_term("m^ext[ m^cys[ m^ext[ m^cys ] ] ]", m.signature))


def test_validation_collects_problems():
    text = (HEADER + "control B arity=0 activity=active polarity=polar kind=protein;\n"
            "rule bad kind=mono : /x:v A_{x} || 1 -> /x:v 1 || A_{x};\n"
            "init : m^ext[ $0 ];\n")
    with pytest.raises(ValidationError) as exc:
        loads_model(text)
    problems = "\n".join(exc.value.problems)
    assert "protein control B must be atomic" in problems
    assert "initial state must be ground" in problems
    assert "rule bad" in problems


def test_missing_init():
    with pytest.raises(ValidationError, match="missing init"):
        loads_model(HEADER)


def test_unsorted_initial_state():
    with pytest.raises(ValidationError) as exc:
        loads_model(HEADER + "init : /x:v m^ext[ A_{x} | m^cys ];\n")
    assert exc.value.problems[0].startswith("Polar\t")


def test_unvalidated_load_keeps_going():
    m = loads_model(HEADER + "init : /x:v m^ext[ A_{x} | m^cys ];\n", validate=False)
    assert len(m.initial.ctrl) == 3


def test_syntax_errors_report_positions():
    with pytest.raises(TermError) as exc:
        loads_model(HEADER + "init : A_{x ;\n")
    assert exc.value.line == 3
    with pytest.raises(TermError, match="unknown rule kind"):
        loads_model(HEADER + "rule r kind=sideways : A_{x} -> A_{x};\n")


def test_predeclared_controls_cannot_change():
    with pytest.raises(TermError, match="predeclared"):
        loads_model("control m^ext arity=1 activity=active polarity=polar kind=membrane;\n")


def test_dump_is_stable():
    m = vesicle_model(1)
    once = dumps_model(m)
    assert dumps_model(loads_model(once)) == once
