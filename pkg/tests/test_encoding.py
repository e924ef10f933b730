"""Encoding: contexts, base codes, combination, normalization, round trips."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitsim import dl
from bitsim.algebra import BIT_TO_CHAR, Bit
from bitsim.encoding import (
    BitCode,
    EncodingError,
    build_context,
    combine,
    deserialize,
    encode,
    encode_atomic,
    encode_role,
    is_bot_code,
    is_top_code,
    neg_code,
    normalize,
    pad_to,
    serialize,
)
from bitsim.generators import random_expr, random_tbox


def enc(text, ctx):
    return encode(dl.parse_expr(text), ctx)


def test_context_positions_diamond(diamond_ctx):
    assert diamond_ctx.concept_position == {"A": 1, "B": 2, "C": 3, "D": 4}


def test_context_single_concept():
    ctx = build_context(dl.parse_tbox("concept A"))
    assert ctx.concept_position == {"A": 1}
    assert ctx.concept_width == 1


def test_context_unrelated_pair_declaration_order():
    ctx = build_context(dl.parse_tbox("concept A\nconcept B"))
    assert ctx.concept_position == {"A": 1, "B": 2}


def test_context_parent_declared_late():
    # topological order comes first, declaration order only breaks ties
    ctx = build_context(dl.parse_tbox("concept B\nconcept A\nB sub A"))
    assert ctx.concept_position == {"A": 1, "B": 2}


def test_child_position_above_every_parent():
    rng = random.Random(11)
    for _ in range(20):
        tbox = random_tbox(rng, rng.randrange(2, 12), edge_prob=0.4)
        ctx = build_context(tbox)
        for child, parent in tbox.concept_inclusions:
            assert ctx.concept_position[child] > ctx.concept_position[parent]


def test_atomic_codes_diamond(diamond_ctx):
    assert serialize(encode_atomic("A", diamond_ctx)) == "0001"
    assert serialize(encode_atomic("B", diamond_ctx)) == "0011"
    assert serialize(encode_atomic("D", diamond_ctx)) == "1111"


def test_atomic_code_unknown_name(diamond_ctx):
    with pytest.raises(EncodingError, match="undeclared"):
        encode_atomic("Nope", diamond_ctx)


def test_atomic_codes_unique_on_random_tboxes():
    rng = random.Random(7)
    for _ in range(25):
        tbox = random_tbox(rng, rng.randrange(2, 12), edge_prob=0.35)
        ctx = build_context(tbox)
        codes = [serialize(encode_atomic(n, ctx)) for n in tbox.atomic_concepts]
        assert len(set(codes)) == len(codes)


def test_encode_negation(diamond_ctx):
    assert serialize(enc("not(B)", diamond_ctx)) == "00NN"


def test_encode_conjunction(diamond_ctx):
    assert serialize(enc("and(B,C)", diamond_ctx)) == "0yy1"


def test_encode_disjunction_compound(diamond_ctx):
    assert serialize(enc("or(B,C)", diamond_ctx)) == "(U:0011|0101)"


def test_encode_disjunction_single_difference_stays_plain(diamond_ctx):
    assert serialize(enc("or(A,B)", diamond_ctx)) == "00X1"


def test_encode_existential_segment(diamond_ctx):
    assert serialize(enc("some(r,A)", diamond_ctx)) == "0000[E|01|0001]"


def test_encode_value_restriction_segment(diamond_ctx):
    assert serialize(enc("all(s,B)", diamond_ctx)) == "0000[A|10|0011]"


def test_encode_top_bottom(diamond_ctx):
    assert is_top_code(enc("top", diamond_ctx))
    assert is_bot_code(enc("bot", diamond_ctx))


def test_role_codes(diamond_ctx):
    def role_str(text):
        role = dl.parse_expr(f"all({text},top)").role
        return "".join(BIT_TO_CHAR[b] for b in reversed(encode_role(role, diamond_ctx)))

    assert role_str("r") == "01"
    assert role_str("s") == "10"
    assert role_str("runion(r,s)") == "XX"
    assert role_str("rinter(r,s)") == "yy"


def test_role_inheritance():
    tbox = dl.parse_tbox("role r\nrole s\nrole s sub r")
    ctx = build_context(tbox)
    role = dl.AtomicRole("s")
    assert "".join(BIT_TO_CHAR[b] for b in reversed(encode_role(role, ctx))) == "11"


def test_combine_meet_example(diamond_ctx):
    code = combine("I", enc("B", diamond_ctx), enc("C", diamond_ctx))
    assert serialize(code) == "0yy1"


def test_combine_join_idempotent(diamond_ctx):
    a = enc("A", diamond_ctx)
    assert combine("U", a, a) == a


def test_combine_join_compound_projection(diamond_ctx):
    from bitsim.encoding import project

    code = combine("U", enc("B", diamond_ctx), enc("C", diamond_ctx))
    assert serialize(project(code)) == "0XX1"


def test_normalize_collapse_rules(diamond_ctx):
    assert serialize(deserialize("0T01", diamond_ctx)) == "TTTT"
    assert serialize(deserialize("0F01", diamond_ctx)) == "FFFF"
    assert serialize(deserialize("tttt", diamond_ctx)) == "TTTT"
    assert serialize(deserialize("ffff", diamond_ctx)) == "FFFF"
    assert serialize(deserialize("0101", diamond_ctx)) == "0101"


def test_partial_near_extremes_do_not_collapse(diamond_ctx):
    assert serialize(deserialize("00ff", diamond_ctx)) == "00ff"
    assert serialize(deserialize("00tt", diamond_ctx)) == "00tt"


def test_normalize_idempotent_on_random_codes(diamond_ctx):
    rng = random.Random(13)
    tbox = diamond_ctx.tbox
    for _ in range(150):
        code = encode(random_expr(rng, tbox, depth=3, roles=True), diamond_ctx)
        assert normalize(code) == code


def test_meet_with_top_and_bottom(diamond_ctx):
    b = enc("B", diamond_ctx)
    assert serialize(enc("and(top,B)", diamond_ctx)) == serialize(b)
    assert is_bot_code(enc("and(bot,B)", diamond_ctx))
    assert serialize(enc("or(bot,B)", diamond_ctx)) == serialize(b)
    assert is_top_code(enc("or(top,B)", diamond_ctx))


def test_single_atom_contradiction_and_tautology():
    ctx = build_context(dl.parse_tbox("concept A"))
    assert is_bot_code(enc("and(A,not(A))", ctx))
    assert is_top_code(enc("or(A,not(A))", ctx))


def test_serialize_examples_round_trip(diamond_ctx):
    for text in (
        "0011",
        "0000[E|01|0001]",
        "(U:0011|0101)",
        "0yy1",
        "00NN",
        "0000[A|XX|0001][E|01|0011]",
    ):
        assert serialize(deserialize(text, diamond_ctx)) == text


def test_deserialize_distributes_segments_over_compounds(diamond_ctx):
    # a trailing segment conjoins into each union operand
    code = deserialize("(U:0011|0101)[E|01|0001]", diamond_ctx)
    assert serialize(code) == "(U:00yy[E|01|0001]|0y0y[E|01|0001])"


def test_deserialize_rejects_bad_bytes(diamond_ctx):
    with pytest.raises(EncodingError, match="byte"):
        deserialize("00Z1", diamond_ctx)
    with pytest.raises(EncodingError, match="width"):
        deserialize("001", diamond_ctx)
    with pytest.raises(EncodingError):
        deserialize("0000[Q|01|0001]", diamond_ctx)
    with pytest.raises(EncodingError):
        deserialize("(U:0011)", diamond_ctx)


def test_encode_round_trips_through_serialization(diamond_ctx):
    rng = random.Random(5)
    for _ in range(200):
        code = encode(random_expr(rng, diamond_ctx.tbox, depth=3, roles=True), diamond_ctx)
        text = serialize(code)
        assert serialize(deserialize(text, diamond_ctx)) == text


def test_padding_adds_leading_potential_bits(diamond_ctx):
    small = BitCode((Bit.ONE,))
    padded = pad_to(small, 4)
    assert serialize(padded) == "0001"
    with pytest.raises(EncodingError):
        pad_to(padded, 2)


def test_combine_width_equality_after_padding(diamond_ctx):
    small = BitCode((Bit.ONE,))
    out = combine("I", small, enc("B", diamond_ctx))
    assert out.width == 4


def _has_compounds(code):
    if any(not isinstance(pv, Bit) for pv in code.bits):
        return True
    return any(_has_compounds(seg.filler) for seg in code.segments)


def test_neg_code_involution_on_noncompound_codes(diamond_ctx):
    # union compounds deliberately fold to the positionwise meet under
    # negation (matching what encoding a negated disjunction produces), so
    # involution is a plain-and-segment-code property
    rng = random.Random(23)
    checked = 0
    for _ in range(300):
        code = encode(random_expr(rng, diamond_ctx.tbox, depth=3, roles=True), diamond_ctx)
        if _has_compounds(code):
            continue
        checked += 1
        assert neg_code(neg_code(code)) == code
    assert checked > 50


def test_neg_code_flips_quantifier(diamond_ctx):
    some = enc("some(r,A)", diamond_ctx)
    flipped = neg_code(some)
    assert serialize(flipped) == "0000[A|01|000N]"


def test_compound_operand_growth_bound(diamond_ctx):
    # nested joins of depth k grow at most 3^k operands
    expr = "A"
    for depth, name in enumerate(("B", "C", "D", "A", "B"), start=1):
        expr = f"or({expr},and({name},not({name})))" if depth % 2 else f"or({expr},{name})"
        code = enc(expr, diamond_ctx)
        comp = code.single_compound()
        count = len(comp.operands) if comp else 1
        assert count <= 3**depth


def test_rewrite_identities_random(diamond_ctx):
    rng = random.Random(99)
    tbox = diamond_ctx.tbox
    for _ in range(60):
        e1 = random_expr(rng, tbox, depth=2, roles=True)
        e2 = random_expr(rng, tbox, depth=2, roles=True)
        assert serialize(encode(dl.And(e1, e2), diamond_ctx)) == serialize(
            encode(dl.And(e2, e1), diamond_ctx)
        )
        assert serialize(encode(dl.Or(e1, e2), diamond_ctx)) == serialize(
            encode(dl.Or(e2, e1), diamond_ctx)
        )
        assert serialize(encode(dl.Not(dl.Not(e1)), diamond_ctx)) == serialize(
            encode(e1, diamond_ctx)
        )
        assert serialize(encode(dl.And(e1, e1), diamond_ctx)) == serialize(
            encode(e1, diamond_ctx)
        )
        assert serialize(encode(dl.Not(dl.And(e1, e2)), diamond_ctx)) == serialize(
            encode(dl.Or(dl.Not(e1), dl.Not(e2)), diamond_ctx)
        )
        assert serialize(encode(dl.Not(dl.Or(e1, e2)), diamond_ctx)) == serialize(
            encode(dl.And(dl.Not(e1), dl.Not(e2)), diamond_ctx)
        )


def test_exactness_flags(diamond_ctx):
    assert enc("B", diamond_ctx).exact
    assert enc("and(B,C)", diamond_ctx).exact
    assert enc("or(A,B)", diamond_ctx).exact
    # a meet over a free/forced clash loses the product reading
    assert not enc("and(or(A,B),C)", diamond_ctx).exact
    assert not enc("or(and(or(A,B),A),B)", diamond_ctx).exact
    # negation of a multi-constraint code is not a product
    assert not enc("not(B)", diamond_ctx).exact
    assert enc("not(A)", diamond_ctx).exact


def test_definitions_encode_like_their_bodies(diamond_ctx):
    tbox = dl.parse_tbox(
        "concept A\nconcept B\nB sub A\nrole r\ndefine X = and(A, some(r, B))"
    )
    ctx = build_context(tbox)
    assert serialize(encode(dl.Atomic("X"), ctx)) == serialize(
        encode(dl.parse_expr("and(A, some(r, B))"), ctx)
    )


names = st.sampled_from(["A", "B", "C", "D"])
exprs = st.recursive(
    names.map(dl.Atomic),
    lambda inner: st.builds(dl.Not, inner)
    | st.builds(dl.And, inner, inner)
    | st.builds(dl.Or, inner, inner),
    max_leaves=8,
)


@given(exprs, exprs)
@settings(max_examples=120, deadline=None)
def test_commutativity_property(diamond_ctx, e1, e2):
    assert serialize(encode(dl.And(e1, e2), diamond_ctx)) == serialize(
        encode(dl.And(e2, e1), diamond_ctx)
    )
    assert serialize(encode(dl.Or(e1, e2), diamond_ctx)) == serialize(
        encode(dl.Or(e2, e1), diamond_ctx)
    )


@given(exprs)
@settings(max_examples=120, deadline=None)
def test_double_negation_property(diamond_ctx, e1):
    assert serialize(encode(dl.Not(dl.Not(e1)), diamond_ctx)) == serialize(
        encode(e1, diamond_ctx)
    )
