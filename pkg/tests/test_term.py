import random

import pytest
from hypothesis import given, settings, strategies as st

from biobig.dot import to_dot
from biobig.graph import Interface, Root, TypeClash, normalize_ids, support_equiv
from biobig.serialize import dumps, loads
from biobig.term import TermError, parse_term, to_term
import oracles as O

SIG = O.toy_signature()


def T(text):
    return parse_term(text, SIG)


def test_nesting_and_products():
    g = T("M_{x}[ A_{y} | $0 ] || P_{z}; 1")
    assert g.outer.width == 3 and g.inner.width == 1
    assert g.outer.types == {"x": "b", "y": "b", "z": "b"}
    assert len(g.children(Root(2))) == 0


def test_closures_and_renaming():
    g = T("/e:h A_{e} | (y/x B_{x,y})")
    assert g.outer.types == {"y": "b"}
    assert len(g.points_of("y")) == 2 and list(g.edges.values()) == ["h"]


def test_typed_names():
    g = T("A_{x:v}")
    assert g.outer.types == {"x": "v"}
    with pytest.raises(TypeClash, match="types"):
        T("A_{x:v} | A_{x:b}")


@pytest.mark.parametrize("text,msg", [
    ("Q_{x}", "unknown control"),
    ("A_{x,y}", "arity"),
    ("M_{x}[ $1 ]", "sites must be"),
    ("M_{x}[ $0 | $0 ]", "twice"),
    ("M_{x}[ A_{y} ", "unexpected"),
    ("/e:q A_{e}", "non-edge type"),
])
def test_errors(text, msg):
    with pytest.raises(TermError, match=msg):
        T(text)


def test_error_position():
    with pytest.raises(TermError) as exc:
        T("M_{x}[\n  A_{y} | ]")
    assert (exc.value.line, exc.value.col) == (2, 11)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_print_parse_roundtrip(seed):
    rng = random.Random(seed)
    g = O.random_bigraph(rng, Interface(rng.randint(0, 2)), O.random_interface(rng))
    back = T(to_term(g))
    # idle outer names have no syntax; everything else survives
    assert back.outer.name_set <= g.outer.name_set
    assert support_equiv(back.replace(outer=g.outer), g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_json_roundtrip(seed):
    rng = random.Random(seed)
    faces = [O.random_interface(rng) for _ in range(2)]
    g = O.random_bigraph(rng, faces[0], faces[1])
    assert support_equiv(loads(dumps(g)), g)
    assert dumps(loads(dumps(g))) == dumps(g)


def test_dot_is_deterministic():
    g = T("/e:b M_{x}[ A_{e} | P_{y}[ A_{e} ] ] || $0")
    text = to_dot(g, "demo")
    assert text == to_dot(normalize_ids(g), "demo")
    assert text.startswith('digraph "demo" {') and "cluster_n0" in text
    assert text.count("->") == sum(1 for _ in g.link)
