import random

import pytest
from hypothesis import given, settings, strategies as st

from biobig import kappa as K
from biobig.controls import protein_signature
from biobig.graph import support_equiv
import oracles as O

AR = {"A": 2, "B": 1, "C": 3}
SIG = protein_signature(AR)


def P(text):
    return K.parse(text, AR)


# -- parsing --------------------------------------------------------------------


@pytest.mark.parametrize("text", [
    "A(1,2^x),B(1^x)",
    "(x)(A(1^x,2~),B(1^x))",
    "(x)(y)(A(1^x,2^y),C(1^x,2^y,3))",
    "0",
])
def test_print_parse_roundtrip(text):
    s = P(text)
    assert K.struct_equiv(K.parse(K.to_text(s), AR), s)


def test_unmentioned_sites_are_hidden():
    assert P("A(1)") == P("A(1,2~)")


def test_preamble_declares_arities():
    s, ar = K.parse_with_arities("protein D:2; D(1^x,2)")
    assert ar == {"D": 2} and K.fn(s) == {"x"}


@pytest.mark.parametrize("text,err", [
    ("Z(1)", K.UndeclaredProtein),
    ("A(3)", K.ArityError),
    ("(x)(A(1^x", K.ParseError),
    ("A(1,,2)", K.ParseError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        P(text)


def test_parse_error_position():
    with pytest.raises(K.ParseError) as exc:
        K.parse("A(1),\n  B(1^", AR)
    assert exc.value.line == 2


# -- congruence -----------------------------------------------------------------


def test_scope_extrusion_and_alpha():
    assert K.struct_equiv(P("(x)(A(1^x,2),B(1^x)),B(1)"), P("B(1),(y)(B(1^y),A(1^y,2))"))
    assert K.struct_equiv(P("(x)A(1,2)"), P("A(1,2)"))
    assert not K.struct_equiv(P("(x)(A(1^x,2),B(1^x))"), P("A(1^x,2),B(1^x)"))


def test_canonical_form_is_stable():
    s = P("(x)(y)(A(1^x,2^y),A(1^y,2^x))")
    assert K.struct_equiv(K.from_canonical(K.canonical(s)), s)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_congruence_matches_brute_force(seed):
    rng = random.Random(seed)
    s = O.random_solution(rng, AR, 4)
    t = O.shuffle_solution(rng, s) if rng.random() < 0.5 else O.random_solution(rng, AR, 4)
    assert K.struct_equiv(s, t) == O.brute_equiv(s, t)
    if rng.random() < 0.5:
        u = O.mutate_solution(rng, s, AR)
        assert K.struct_equiv(s, u) == O.brute_equiv(s, u)


# -- shapes ---------------------------------------------------------------------


def test_graph_like_and_complexes():
    assert K.is_graph_like(P("(x)(A(1^x,2),B(1^x))"))
    assert not K.is_graph_like(P("A(1^x,2^x),B(1^x)"))
    assert K.is_complex(P("(x)(A(1^x,2),B(1^x))"))
    assert not K.is_connected(P("A(1,2),B(1)"))


# -- growth ---------------------------------------------------------------------


def test_interface_growth():
    assert K.grows_interface([], ["h"], ["v"])
    assert K.grows_interface(["x"], ["v"], [K.Tie("x")])
    assert not K.grows_interface([], ["v"], [K.Tie("x")])
    assert not K.grows_interface(["x"], [K.Tie("x")], [K.Tie("x")])
    assert K.grows_interface([], [K.Tie("y")], [K.Tie("y")])


def test_solution_growth():
    assert K.grows_solution(["x"], P("A(1,2),B(1)"), P("A(1^x,2),B(1^x)"))
    assert K.grows_solution(["x"], P("A(1,2)"), P("A(1^x,2),B(1^x)"))  # new atom on fresh names
    assert not K.grows_solution([], P("A(1,2),B(1)"), P("A(1,2)"))  # atoms cannot vanish
    assert K.grows(P("A(1,2),B(1)"), P("(x)(A(1^x,2),B(1^x))"))
    assert not K.grows(P("(x)(A(1^x,2),B(1^x))"), P("A(1,2),B(1)"))


def test_growth_survives_name_clashes():
    s = P("(e)(A(1,2^e),A(1,2^e))")
    t = P("(e)((f)(A(1^e,2^f),A(1^e,2^f)))")
    assert K.grows(s, t)


# -- rules and reduction -------------------------------------------------------


def test_rule_classification():
    r = K.kappa_rule("bind", P("A(1,2),B(1)"), P("(x)(A(1^x,2),B(1^x))"))
    assert r.kind == "monotone" and r.fresh == ("x",) and r.is_valid()
    back = K.kappa_rule("unbind", P("(x)(A(1^x,2),B(1^x))"), P("A(1,2),B(1)"))
    assert back.kind == "antimonotone" and back.is_valid()
    with pytest.raises(K.NotMonotone):
        K.kappa_rule("swap", P("A(1,2)"), P("B(1)"))
    with pytest.raises(K.NotMonotone):
        K.kappa_rule("split", P("A(1,2)"), P("A(1,2),B(1)"))  # new atom with no fresh link


def test_successors_count_distinct_outcomes():
    rules = [K.kappa_rule("bind", P("A(1,2),B(1)"), P("(x)(A(1^x,2),B(1^x))"))]
    s = P("A(1,2),B(1),B(1)")
    out = K.successors(s, rules)
    assert len(out) == 1  # the two B's are interchangeable
    assert K.struct_equiv(out[0], P("B(1),(x)(A(1^x,2),B(1^x))"))
    assert K.successors(out[0], rules) == []


def test_free_names_in_rules_match_bonds():
    rules = [K.kappa_rule("reveal", P("A(1^y,2~)"), P("A(1^y,2)"), fresh=())]
    s = P("(x)(A(1^x,2~),B(1^x)),A(1,2~)")
    (t,) = K.successors(s, rules)
    assert K.struct_equiv(t, P("(x)(A(1^x,2),B(1^x)),A(1,2~)"))


# -- encoding ------------------------------------------------------------------


def test_encoding_shape():
    g = K.encode(P("(x)(A(1^x,2~),B(1^x)),C(1^y,2,3~)"), sig=SIG)
    assert g.is_link_graph and g.outer.types == {"y": "b"}
    kinds = sorted(g.link_type(g.link[p]) for p in g.ports())
    assert kinds == ["b", "b", "b", "h", "h", "v"]
    assert K.struct_equiv(K.decode(g), P("(x)(A(1^x,2~),B(1^x)),C(1^y,2,3~)"))


def test_encoding_with_extra_names():
    g = K.encode(P("A(1,2)"), {"z": "b"}, SIG)
    assert g.outer.types == {"z": "b"} and not g.points_of("z")
    with pytest.raises(K.FreeNameNotInX):
        K.encode(P("B(1^y)"), {"z": "b"}, SIG)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_encoding_preserves_and_reflects(seed):
    rng = random.Random(seed)
    s = O.random_solution(rng, AR, 4)
    t = O.shuffle_solution(rng, s) if rng.random() < 0.5 else O.random_solution(rng, AR, 4)
    X = {x: "b" for x in K.fn(s) | K.fn(t)}
    assert K.struct_equiv(s, t) == support_equiv(K.encode(s, X, SIG), K.encode(t, X, SIG))


# -- model files ----------------------------------------------------------------


def test_kappa_model_file():
    m = K.parse_model("protein A:1; protein B:1;\n"
                      "rule bind : A(1),B(1) -> (x) A(1^x),B(1^x);\n"
                      "rule unbind : (x)(A(1^x),B(1^x)) -> A(1),B(1);\n"
                      "init : A(1),B(1);\n")
    assert [r.kind for r in m.rules] == ["monotone", "antimonotone"]
    assert m.rules[0].fresh == ("x",)
    assert set(m.signature.controls) == {"A", "B"}
    assert len(K.successors(m.init, m.rules)) == 1
