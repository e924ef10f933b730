"""Expression grammar, TBox files, and parser robustness."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitsim import dl

names = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True).filter(
    lambda s: s not in {"top", "bot", "not", "and", "or", "all", "some", "runion", "rinter"}
)

roles = st.recursive(
    names.map(dl.AtomicRole),
    lambda inner: st.builds(dl.RoleUnion, inner, inner)
    | st.builds(dl.RoleIntersection, inner, inner),
    max_leaves=4,
)

concepts = st.recursive(
    names.map(dl.Atomic) | st.just(dl.Top()) | st.just(dl.Bottom()),
    lambda inner: st.builds(dl.Not, inner)
    | st.builds(dl.And, inner, inner)
    | st.builds(dl.Or, inner, inner)
    | st.builds(dl.All, roles, inner)
    | st.builds(dl.Some, roles, inner),
    max_leaves=12,
)


def test_parse_and_with_existential():
    expr = dl.parse_expr("and(A, some(r, B))")
    assert expr == dl.And(dl.Atomic("A"), dl.Some(dl.AtomicRole("r"), dl.Atomic("B")))


def test_parse_not_top():
    assert dl.parse_expr("not(top)") == dl.Not(dl.Top())


def test_parse_role_union_filler():
    expr = dl.parse_expr("all(runion(r,s), or(A,not(B)))")
    assert expr == dl.All(
        dl.RoleUnion(dl.AtomicRole("r"), dl.AtomicRole("s")),
        dl.Or(dl.Atomic("A"), dl.Not(dl.Atomic("B"))),
    )


def test_whitespace_insignificant():
    assert dl.parse_expr(" and ( A ,\n some( r , B ) ) ") == dl.parse_expr(
        "and(A,some(r,B))"
    )


def test_parse_error_has_position():
    with pytest.raises(dl.DlSyntaxError) as err:
        dl.parse_expr("and(A")
    assert err.value.line == 1
    assert "expected" in str(err.value)


def test_trailing_input_rejected():
    with pytest.raises(dl.DlSyntaxError):
        dl.parse_expr("A B")


def test_unbalanced_parens_rejected():
    with pytest.raises(dl.DlSyntaxError):
        dl.parse_expr("and(A, B))")


@given(concepts)
@settings(max_examples=200)
def test_round_trip(expr):
    assert dl.parse_expr(dl.to_text(expr)) == expr


@given(st.text(max_size=40))
@settings(max_examples=300)
def test_parser_never_panics(text):
    try:
        dl.parse_expr(text)
    except dl.DlError:
        pass


def test_tbox_single_inclusion():
    tbox = dl.parse_tbox("concept A\nconcept B\nB sub A")
    assert tbox.atomic_concepts == ("A", "B")
    assert tbox.concept_inclusions == (("B", "A"),)


def test_tbox_two_cycle_rejected():
    with pytest.raises(dl.TboxError, match="cycle in concept hierarchy"):
        dl.parse_tbox("concept A\nconcept B\nA sub B\nB sub A")


def test_tbox_diamond(diamond_tbox):
    assert len(diamond_tbox.atomic_concepts) == 4
    assert len(diamond_tbox.concept_inclusions) == 4
    assert diamond_tbox.concept_ancestors("D") == frozenset({"A", "B", "C"})


def test_tbox_undeclared_name():
    with pytest.raises(dl.TboxError, match="undeclared"):
        dl.parse_tbox("concept A\nB sub A")


def test_tbox_duplicate_concept():
    with pytest.raises(dl.TboxError, match="duplicate"):
        dl.parse_tbox("concept A\nconcept A")


def test_tbox_comments_and_blanks():
    tbox = dl.parse_tbox("# heading\n\nconcept A  # trailing\n")
    assert tbox.atomic_concepts == ("A",)


def test_definitions_parse_and_validate():
    tbox = dl.parse_tbox(
        "concept A\nconcept B\nB sub A\nrole r\ndefine Both = and(A, some(r, B))"
    )
    assert "Both" in tbox.definitions
    expanded = dl.expand_definitions(dl.Atomic("Both"), tbox)
    assert expanded == dl.And(dl.Atomic("A"), dl.Some(dl.AtomicRole("r"), dl.Atomic("B")))


def test_definition_name_collision():
    with pytest.raises(dl.TboxError, match="collides"):
        dl.parse_tbox("concept A\ndefine A = top")


def test_definition_duplicate():
    with pytest.raises(dl.TboxError, match="duplicate definition"):
        dl.parse_tbox("concept A\ndefine X = A\ndefine X = A")


def test_definition_undeclared_reference():
    with pytest.raises(dl.TboxError, match="undeclared"):
        dl.parse_tbox("concept A\ndefine X = and(A, Missing)")


def test_definition_cycle():
    with pytest.raises(dl.TboxError, match="cycle in definitions"):
        dl.parse_tbox("concept A\ndefine X = Y\ndefine Y = X")


def test_role_hierarchy():
    tbox = dl.parse_tbox("role r\nrole s\nrole s sub r")
    assert tbox.role_inclusions == (("s", "r"),)
    assert tbox.role_ancestors("s") == frozenset({"r"})


def test_role_cycle_rejected():
    with pytest.raises(dl.TboxError, match="cycle in role hierarchy"):
        dl.parse_tbox("role r\nrole s\nrole s sub r\nrole r sub s")


@given(st.text(max_size=60))
@settings(max_examples=200)
def test_tbox_parser_never_panics(text):
    try:
        dl.parse_tbox(text)
    except dl.DlError:
        pass
