"""Interpretation of ALCH+ expressions as bit-codes.

Atomic concepts get one significant property bit at their own position plus a
1-bit at every ancestor position (positions are a topological order of the
hierarchy, position 1 rightmost).  Conjunction is positionwise meet;
disjunction is positionwise join only when lossless (the operand codes differ
at no more than one plain position and their restriction segments pair up),
otherwise the join is kept as a nested compound code.  Value/existential
restrictions append a segment [quantifier | role bits | filler code].

Encoding pushes negation to atomic leaves first (not-of-and becomes
or-of-nots, quantifiers flip), so the classical rewrite identities map to
identical codes; code-level negation (``neg_code``) is still total.

Codes carry an ``exact`` provenance flag marking codes whose structural
reading (positionwise sign product, conjoined with the segment restrictions)
provably equals the source concept's semantics.  Operations that lose
information clear it: meets over a free/forced sign clash, lossy joins,
negation of multi-constraint codes, merging existential fillers under meet or
value fillers under join.  The flag is metadata (ignored by equality and
serialization); the subsumption checker relies on it for definite verdicts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Union

from . import dl
from .algebra import (
    ALL_BITS,
    BIT_TO_CHAR,
    CHAR_TO_BIT,
    QUANT_NEG,
    ROLE_BITS,
    Bit,
    QuantifierBit,
    join,
    meet,
    neg,
)


class EncodingError(ValueError):
    pass


class ContextMismatch(EncodingError):
    """Operands come from different contexts (width disagreement)."""


class UnsupportedCode(EncodingError):
    """Operation not defined for this code shape (e.g. mixed compound bits)."""


# --- sign classes ----------------------------------------------------------

# Extensional reading of a single bit over sign assignments: the set of signs
# the position may take.  Drives the exactness flag and code generativity.
SIGN_FREE = frozenset("+-")
SIGN_POS = frozenset("+")
SIGN_NEG = frozenset("-")
SIGN_EMPTY = frozenset()

SIGN_CLASS = {
    Bit.ZERO: SIGN_FREE,
    Bit.X: SIGN_FREE,
    Bit.X_PRIME: SIGN_FREE,
    Bit.TOP_PRIME: SIGN_FREE,
    Bit.TOP: SIGN_FREE,
    Bit.ONE: SIGN_POS,
    Bit.Y_PRIME: SIGN_POS,
    Bit.X_DPRIME: SIGN_NEG,
    Bit.Y: SIGN_NEG,
    Bit.BOT_PRIME: SIGN_EMPTY,
    Bit.BOT: SIGN_EMPTY,
}

# Pairs whose table result matches set intersection/union of sign classes.
MEET_SIGN_EXACT = {
    (a, b): SIGN_CLASS[meet(a, b)] == (SIGN_CLASS[a] & SIGN_CLASS[b])
    for a in ALL_BITS
    for b in ALL_BITS
}
JOIN_SIGN_EXACT = {
    (a, b): SIGN_CLASS[join(a, b)] == (SIGN_CLASS[a] | SIGN_CLASS[b])
    for a in ALL_BITS
    for b in ALL_BITS
}


# --- data model ------------------------------------------------------------


@dataclass(frozen=True)
class CompoundCode:
    """Nested sub-code occupying one position: 'U' joins, 'I' meets operands."""

    op: str  # 'U' | 'I'
    operands: tuple["BitCode", ...]

    def __post_init__(self):
        if self.op not in ("U", "I"):
            raise EncodingError(f"bad compound op {self.op!r}")
        if len(self.operands) < 2:
            raise EncodingError("compound needs at least two operands")


PositionValue = Union[Bit, CompoundCode]


@dataclass(frozen=True)
class Segment:
    quantifier: QuantifierBit
    role_bits: tuple[Bit, ...]
    filler: "BitCode"

    def sort_key(self) -> tuple:
        return (
            self.quantifier.value,
            "".join(BIT_TO_CHAR[b] for b in reversed(self.role_bits)),
            serialize(self.filler),
        )

    def merge_key(self) -> tuple:
        return (self.quantifier.value, tuple(b.value for b in self.role_bits))


@dataclass(frozen=True)
class BitCode:
    """Code: position values (index 0 = position 1, rightmost) plus segments."""

    bits: tuple[PositionValue, ...]
    segments: tuple[Segment, ...] = ()
    exact: bool = field(default=False, compare=False)

    @property
    def width(self) -> int:
        total = 0
        for pv in self.bits:
            total += 1 if isinstance(pv, Bit) else pv.operands[0].width
        return total

    def plain_bits(self) -> tuple[Bit, ...] | None:
        """The positionwise bits, or None if any position is compound."""
        if all(isinstance(pv, Bit) for pv in self.bits):
            return self.bits  # type: ignore[return-value]
        return None

    def single_compound(self) -> CompoundCode | None:
        if len(self.bits) == 1 and isinstance(self.bits[0], CompoundCode):
            return self.bits[0]
        return None


def make_top_code(width: int) -> BitCode:
    return BitCode((Bit.TOP,) * width, (), exact=True)


def make_bot_code(width: int) -> BitCode:
    return BitCode((Bit.BOT,) * width, (), exact=True)


def is_top_code(code: BitCode) -> bool:
    bits = code.plain_bits()
    return (
        bits is not None
        and len(bits) > 0
        and all(b is Bit.TOP for b in bits)
        and not code.segments
    )


def is_bot_code(code: BitCode) -> bool:
    bits = code.plain_bits()
    return (
        bits is not None
        and len(bits) > 0
        and all(b is Bit.BOT for b in bits)
        and not code.segments
    )


# --- contexts --------------------------------------------------------------


@dataclass(frozen=True)
class EncodingContext:
    """Position assignment derived from a TBox (1-based, rightmost = 1)."""

    tbox: dl.TBox
    concept_position: dict[str, int]
    role_position: dict[str, int]
    concept_width: int
    role_width: int
    # position -> strict ancestor positions, for both spaces
    concept_ancestors: dict[int, frozenset[int]]
    role_ancestors: dict[int, frozenset[int]]


def _assign_positions(
    names: tuple[str, ...], inclusions: tuple[tuple[str, str], ...]
) -> dict[str, int]:
    decl_index = {n: i for i, n in enumerate(names)}
    children: dict[str, list[str]] = {n: [] for n in names}
    indegree = {n: 0 for n in names}
    for child, parent in set(inclusions):
        children[parent].append(child)
        indegree[child] += 1
    ready = [decl_index[n] for n in names if indegree[n] == 0]
    heapq.heapify(ready)
    position: dict[str, int] = {}
    next_pos = 1
    while ready:
        name = names[heapq.heappop(ready)]
        position[name] = next_pos
        next_pos += 1
        for child in children[name]:
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, decl_index[child])
    if len(position) != len(names):
        raise EncodingError("cycle in hierarchy")  # parser already rejects this
    return position


def build_context(tbox: dl.TBox) -> EncodingContext:
    """Assign positions topologically, parents first, declaration order ties."""
    cpos = _assign_positions(tbox.atomic_concepts, tbox.concept_inclusions)
    rpos = _assign_positions(tbox.atomic_roles, tbox.role_inclusions)
    c_anc = {
        cpos[n]: frozenset(cpos[a] for a in tbox.concept_ancestors(n))
        for n in tbox.atomic_concepts
    }
    r_anc = {
        rpos[n]: frozenset(rpos[a] for a in tbox.role_ancestors(n))
        for n in tbox.atomic_roles
    }
    return EncodingContext(
        tbox=tbox,
        concept_position=cpos,
        role_position=rpos,
        concept_width=len(tbox.atomic_concepts),
        role_width=len(tbox.atomic_roles),
        concept_ancestors=c_anc,
        role_ancestors=r_anc,
    )


# --- serialization ---------------------------------------------------------


def serialize(code: BitCode) -> str:
    parts: list[str] = []
    for pv in reversed(code.bits):
        if isinstance(pv, Bit):
            parts.append(BIT_TO_CHAR[pv])
        else:
            inner = "|".join(serialize(op) for op in pv.operands)
            parts.append(f"({pv.op}:{inner})")
    for seg in code.segments:
        role = "".join(BIT_TO_CHAR[b] for b in reversed(seg.role_bits))
        parts.append(f"[{seg.quantifier.value}|{role}|{serialize(seg.filler)}]")
    return "".join(parts)


_QUANT_CHARS = {q.value: q for q in QuantifierBit}
_ROLE_CHARS = {BIT_TO_CHAR[b]: b for b in ROLE_BITS}


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> EncodingError:
        return EncodingError(f"{message} at byte {self.pos}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, found {self.peek()!r}")
        self.pos += 1


def _read_code(r: _Reader, ctx: EncodingContext) -> BitCode:
    rev_bits: list[PositionValue] = []
    while True:
        ch = r.peek()
        if ch in CHAR_TO_BIT:
            rev_bits.append(CHAR_TO_BIT[r.take()])
        elif ch == "(":
            r.take()
            op = r.take()
            if op not in ("U", "I"):
                raise r.error(f"bad compound operator {op!r}")
            r.expect(":")
            operands = [_read_code(r, ctx)]
            while r.peek() == "|":
                r.take()
                operands.append(_read_code(r, ctx))
            r.expect(")")
            if len(operands) < 2:
                raise r.error("compound needs at least two operands")
            rev_bits.append(CompoundCode(op, tuple(operands)))
        else:
            break
    if not rev_bits:
        raise r.error("empty code")
    segments: list[Segment] = []
    while r.peek() == "[":
        r.take()
        qch = r.take()
        if qch not in _QUANT_CHARS:
            raise r.error(f"bad quantifier {qch!r}")
        r.expect("|")
        rev_role: list[Bit] = []
        while r.peek() in _ROLE_CHARS:
            rev_role.append(_ROLE_CHARS[r.take()])
        if len(rev_role) != ctx.role_width:
            raise r.error(
                f"role code width {len(rev_role)} != context width {ctx.role_width}"
            )
        r.expect("|")
        filler = _read_code(r, ctx)
        r.expect("]")
        segments.append(
            Segment(_QUANT_CHARS[qch], tuple(reversed(rev_role)), filler)
        )
    code = BitCode(tuple(reversed(rev_bits)), tuple(segments), exact=False)
    if code.width != ctx.concept_width:
        raise r.error(
            f"code width {code.width} != context width {ctx.concept_width}"
        )
    return code


def deserialize(text: str, ctx: EncodingContext) -> BitCode:
    """Inverse of serialize; validates widths against the context."""
    r = _Reader(text)
    code = _read_code(r, ctx)
    if r.pos != len(text):
        raise r.error("trailing characters")
    return normalize(code)


# --- normalization ---------------------------------------------------------


def _canonical_segments(segments: list[Segment]) -> tuple[Segment, ...]:
    return tuple(sorted(segments, key=Segment.sort_key))


def _with_exact(code: BitCode, exact: bool) -> BitCode:
    if code.exact == exact:
        return code
    return BitCode(code.bits, code.segments, exact=exact)


def _make_join_code(operands: list[BitCode]) -> BitCode:
    """Canonical union compound: flattened, deduplicated, sorted, simplified.

    Absorbing a T-code or dropping an F-code keeps the exact flag only when
    the absorbed/dropped operand's own reading was faithful.
    """
    flat: list[BitCode] = []
    for op in operands:
        comp = op.single_compound()
        if comp is not None and comp.op == "U":
            flat.extend(comp.operands)
        else:
            flat.append(op)
    width = flat[0].width
    kept: dict[str, BitCode] = {}
    dropped_exact = True
    for op in flat:
        if is_top_code(op):
            return _with_exact(make_top_code(width), op.exact)
        if is_bot_code(op):
            dropped_exact = dropped_exact and op.exact
            continue
        key = serialize(op)
        prev = kept.get(key)
        if prev is None:
            kept[key] = op
        else:
            # equal claims from different subexpressions: faithful only if
            # both readings were
            kept[key] = _with_exact(prev, prev.exact and op.exact)
    if not kept:
        return _with_exact(make_bot_code(width), dropped_exact)
    ordered = [kept[key] for key in sorted(kept)]
    if len(ordered) == 1:
        return _with_exact(ordered[0], ordered[0].exact and dropped_exact)
    exact = all(op.exact for op in ordered) and dropped_exact
    return BitCode((CompoundCode("U", tuple(ordered)),), (), exact=exact)


def _conjoin_segments(code: BitCode, segments: tuple[Segment, ...]) -> BitCode:
    """Attach extra segments to a code (meet-merging same-key ones).

    Against a compound the segments distribute like any conjunction: the
    code is met with a potential-bits carrier holding the segments.
    """
    if not segments:
        return code
    if code.single_compound() is not None:
        carrier = BitCode((Bit.ZERO,) * code.width, segments, exact=False)
        return _meet_codes(code, carrier)
    merged, _ = _merge_segments_meet(code.segments, segments)
    return BitCode(code.bits, merged, exact=False)


def normalize(code: BitCode) -> BitCode:
    """Collapse rewrites to fixpoint; idempotent.

    A plain T bit (or all-t bits) collapses a segment-free code to the
    canonical T-code, dually F / all-f to the F-code.  Compound operands are
    normalized recursively: intersection compounds fold away positionwise,
    union compounds are flattened, deduplicated, sorted and simplified.
    """
    segments = _canonical_segments(
        [Segment(s.quantifier, s.role_bits, normalize(s.filler)) for s in code.segments]
    )

    comp = code.single_compound()
    if comp is not None:
        operands = [normalize(op) for op in comp.operands]
        if comp.op == "I":
            folded = operands[0]
            for other in operands[1:]:
                folded = _meet_codes(folded, other)
        else:
            folded = _make_join_code(operands)
        return _conjoin_segments(folded, segments)

    if code.plain_bits() is None:
        # mixed plain/compound positions: normalize operands in place only
        new_bits: list[PositionValue] = []
        for pv in code.bits:
            if isinstance(pv, Bit):
                new_bits.append(pv)
            else:
                new_bits.append(
                    CompoundCode(pv.op, tuple(normalize(o) for o in pv.operands))
                )
        return BitCode(tuple(new_bits), segments, exact=False)

    bits: tuple[Bit, ...] = code.bits  # type: ignore[assignment]
    if bits and not segments:
        width = len(bits)
        # the collapses inherit provenance: an inexact code that collapses
        # stays inexact, so nothing downstream trusts the canonical reading
        if any(b is Bit.TOP for b in bits):
            return _with_exact(make_top_code(width), code.exact)
        if any(b is Bit.BOT for b in bits):
            return _with_exact(make_bot_code(width), code.exact)
        if all(b is Bit.TOP_PRIME for b in bits):
            return _with_exact(make_top_code(width), code.exact)
        if all(b is Bit.BOT_PRIME for b in bits):
            return _with_exact(make_bot_code(width), code.exact)
    return BitCode(bits, segments, exact=code.exact)


# --- padding / width -------------------------------------------------------


def pad_to(code: BitCode, width: int) -> BitCode:
    """Extend with leading (most significant) potential bits."""
    if code.width == width:
        return code
    if code.width > width:
        raise ContextMismatch(f"cannot pad width {code.width} down to {width}")
    comp = code.single_compound()
    if comp is not None:
        return BitCode(
            (CompoundCode(comp.op, tuple(pad_to(o, width) for o in comp.operands)),),
            code.segments,
            exact=code.exact,
        )
    if code.plain_bits() is None:
        raise UnsupportedCode("cannot pad a mixed compound code")
    extra = (Bit.ZERO,) * (width - code.width)
    return BitCode(code.bits + extra, code.segments, exact=code.exact)


# --- binary combination ----------------------------------------------------


def _merge_segments_meet(
    a: tuple[Segment, ...], b: tuple[Segment, ...]
) -> tuple[tuple[Segment, ...], bool]:
    """Concatenate segment lists, merging same (quantifier, role) pairs by
    meet of fillers.  The flag reports whether the merge was lossless:
    merging value-restriction fillers is, merging distinct existential
    fillers is not."""
    groups: dict[tuple, list[Segment]] = {}
    for seg in list(a) + list(b):
        groups.setdefault(seg.merge_key(), []).append(seg)
    merged: list[Segment] = []
    lossless = True
    for segs in groups.values():
        quant, role_bits = segs[0].quantifier, segs[0].role_bits
        filler = segs[0].filler
        for other in segs[1:]:
            if serialize(other.filler) == serialize(filler):
                filler = _with_exact(filler, filler.exact and other.filler.exact)
                continue
            if quant is not QuantifierBit.FORALL:
                lossless = False
            filler = _meet_codes(filler, other.filler)
        if not filler.exact:
            lossless = False
        merged.append(Segment(quant, role_bits, filler))
    return _canonical_segments(merged), lossless


def _segments_pairable(a: tuple[Segment, ...], b: tuple[Segment, ...]) -> bool:
    return sorted(s.merge_key() for s in a) == sorted(s.merge_key() for s in b)


def _join_segments(
    a: tuple[Segment, ...], b: tuple[Segment, ...]
) -> tuple[tuple[Segment, ...], bool]:
    """Pair same-key segments and join their fillers.  Lossless for
    existential pairs and for identical segments; joining distinct value
    fillers is an upper approximation."""
    by_key_a: dict[tuple, list[Segment]] = {}
    by_key_b: dict[tuple, list[Segment]] = {}
    for seg in a:
        by_key_a.setdefault(seg.merge_key(), []).append(seg)
    for seg in b:
        by_key_b.setdefault(seg.merge_key(), []).append(seg)
    out: list[Segment] = []
    lossless = True
    for key, segs_a in by_key_a.items():
        segs_b = sorted(by_key_b[key], key=Segment.sort_key)
        segs_a = sorted(segs_a, key=Segment.sort_key)
        for sa, sb in zip(segs_a, segs_b):
            if serialize(sa.filler) == serialize(sb.filler):
                shared = _with_exact(
                    sa.filler, sa.filler.exact and sb.filler.exact
                )
                out.append(Segment(sa.quantifier, sa.role_bits, shared))
                if not shared.exact:
                    lossless = False
                continue
            if sa.quantifier is not QuantifierBit.EXISTS:
                lossless = False
            filler = _join_codes(sa.filler, sb.filler)
            if not filler.exact:
                lossless = False
            out.append(Segment(sa.quantifier, sa.role_bits, filler))
    return _canonical_segments(out), lossless


def _meet_codes(a: BitCode, b: BitCode) -> BitCode:
    if serialize(a) == serialize(b):
        return _with_exact(a, a.exact and b.exact)
    if is_bot_code(a):
        return _with_exact(make_bot_code(a.width), a.exact)
    if is_bot_code(b):
        return _with_exact(make_bot_code(a.width), b.exact)
    if is_top_code(a):
        return _with_exact(b, a.exact and b.exact)
    if is_top_code(b):
        return _with_exact(a, a.exact and b.exact)
    ca, cb = a.single_compound(), b.single_compound()
    if ca is not None and ca.op == "U":
        return _make_join_code([_meet_codes(x, b) for x in ca.operands])
    if cb is not None and cb.op == "U":
        return _make_join_code([_meet_codes(a, y) for y in cb.operands])
    bits_a, bits_b = a.plain_bits(), b.plain_bits()
    if bits_a is None or bits_b is None:
        raise UnsupportedCode("meet over mixed compound positions")
    bits = tuple(meet(x, y) for x, y in zip(bits_a, bits_b))
    segments, seg_lossless = _merge_segments_meet(a.segments, b.segments)
    exact = (
        a.exact
        and b.exact
        and seg_lossless
        and all(MEET_SIGN_EXACT[(x, y)] for x, y in zip(bits_a, bits_b))
    )
    return normalize(BitCode(bits, segments, exact=exact))


def _join_codes(a: BitCode, b: BitCode) -> BitCode:
    if serialize(a) == serialize(b):
        return _with_exact(a, a.exact and b.exact)
    if is_top_code(a):
        return _with_exact(make_top_code(a.width), a.exact)
    if is_top_code(b):
        return _with_exact(make_top_code(a.width), b.exact)
    if is_bot_code(a):
        return _with_exact(b, a.exact and b.exact)
    if is_bot_code(b):
        return _with_exact(a, a.exact and b.exact)
    ca, cb = a.single_compound(), b.single_compound()
    if ca is not None or cb is not None:
        return _make_join_code([a, b])
    bits_a, bits_b = a.plain_bits(), b.plain_bits()
    if bits_a is None or bits_b is None:
        raise UnsupportedCode("join over mixed compound positions")
    differing = sum(1 for x, y in zip(bits_a, bits_b) if x is not y)
    if differing <= 1 and _segments_pairable(a.segments, b.segments):
        bits = tuple(join(x, y) for x, y in zip(bits_a, bits_b))
        segments, seg_lossless = _join_segments(a.segments, b.segments)
        exact = (
            a.exact
            and b.exact
            and seg_lossless
            and all(JOIN_SIGN_EXACT[(x, y)] for x, y in zip(bits_a, bits_b))
        )
        return normalize(BitCode(bits, segments, exact=exact))
    return _make_join_code([a, b])


JOIN, MEET = "U", "I"


def combine(op: str, a: BitCode, b: BitCode) -> BitCode:
    """Binary concept operation on codes; 'U' joins, 'I' meets.

    Operands are padded with leading potential bits to a common width first;
    a width mismatch after padding means the codes come from different
    contexts and is reported as an internal error.
    """
    if op not in (JOIN, MEET):
        raise EncodingError(f"unknown op {op!r}")
    width = max(a.width, b.width)
    a, b = pad_to(a, width), pad_to(b, width)
    if a.width != b.width:
        raise ContextMismatch("operand widths differ after padding")
    return _join_codes(a, b) if op == JOIN else _meet_codes(a, b)


# --- negation --------------------------------------------------------------


def _neg_exact(code: BitCode) -> bool:
    """Negation keeps exactness only where the positionwise complement is the
    true set complement: the extreme codes and single-constraint base codes."""
    if not code.exact or code.segments:
        return False
    bits = code.plain_bits()
    if bits is None:
        return False
    if all(b is Bit.TOP for b in bits) or all(b is Bit.BOT for b in bits):
        return True
    if any(b not in (Bit.ZERO, Bit.ONE, Bit.X_DPRIME) for b in bits):
        return False
    constrained = sum(1 for b in bits if b is not Bit.ZERO)
    return constrained <= 1


def neg_code(code: BitCode) -> BitCode:
    """Positionwise negation; flips quantifiers and pushes through compounds."""
    exact = _neg_exact(code)
    new_bits: list[PositionValue] = []
    for pv in code.bits:
        if isinstance(pv, Bit):
            new_bits.append(neg(pv))
        else:
            flipped = "I" if pv.op == "U" else "U"
            new_bits.append(
                CompoundCode(flipped, tuple(neg_code(o) for o in pv.operands))
            )
    segments = tuple(
        Segment(QUANT_NEG[s.quantifier], s.role_bits, neg_code(s.filler))
        for s in code.segments
    )
    return normalize(BitCode(tuple(new_bits), segments, exact=exact))


# --- encoding --------------------------------------------------------------


def _nnf(expr: dl.ConceptExpr) -> dl.ConceptExpr:
    """Negation-normal form: negation only on atomic concepts."""
    if isinstance(expr, (dl.Atomic, dl.Top, dl.Bottom)):
        return expr
    if isinstance(expr, dl.And):
        return dl.And(_nnf(expr.left), _nnf(expr.right))
    if isinstance(expr, dl.Or):
        return dl.Or(_nnf(expr.left), _nnf(expr.right))
    if isinstance(expr, dl.All):
        return dl.All(expr.role, _nnf(expr.filler))
    if isinstance(expr, dl.Some):
        return dl.Some(expr.role, _nnf(expr.filler))
    if isinstance(expr, dl.Not):
        inner = expr.arg
        if isinstance(inner, dl.Atomic):
            return expr
        if isinstance(inner, dl.Top):
            return dl.Bottom()
        if isinstance(inner, dl.Bottom):
            return dl.Top()
        if isinstance(inner, dl.Not):
            return _nnf(inner.arg)
        if isinstance(inner, dl.And):
            return dl.Or(_nnf(dl.Not(inner.left)), _nnf(dl.Not(inner.right)))
        if isinstance(inner, dl.Or):
            return dl.And(_nnf(dl.Not(inner.left)), _nnf(dl.Not(inner.right)))
        if isinstance(inner, dl.All):
            return dl.Some(inner.role, _nnf(dl.Not(inner.filler)))
        if isinstance(inner, dl.Some):
            return dl.All(inner.role, _nnf(dl.Not(inner.filler)))
    raise TypeError(expr)


def encode_atomic(name: str, ctx: EncodingContext) -> BitCode:
    """Base code: 1 at own and every ancestor position, 0 elsewhere."""
    pos = ctx.concept_position.get(name)
    if pos is None:
        raise EncodingError(f"undeclared name {name!r}")
    ones = {pos} | {
        ctx.concept_position[a] for a in ctx.tbox.concept_ancestors(name)
    }
    bits = tuple(
        Bit.ONE if k in ones else Bit.ZERO
        for k in range(1, ctx.concept_width + 1)
    )
    return BitCode(bits, (), exact=True)


def encode_role(role: dl.RoleExpr, ctx: EncodingContext) -> tuple[Bit, ...]:
    """Role codes: atomic roles with hierarchy inheritance, then positionwise
    join/meet in the role alphabet for unions/intersections."""
    if isinstance(role, dl.AtomicRole):
        pos = ctx.role_position.get(role.name)
        if pos is None:
            raise EncodingError(f"undeclared role {role.name!r}")
        ones = {pos} | {
            ctx.role_position[a] for a in ctx.tbox.role_ancestors(role.name)
        }
        return tuple(
            Bit.ONE if k in ones else Bit.ZERO
            for k in range(1, ctx.role_width + 1)
        )
    if isinstance(role, dl.RoleUnion):
        left = encode_role(role.left, ctx)
        right = encode_role(role.right, ctx)
        return tuple(join(x, y) for x, y in zip(left, right))
    if isinstance(role, dl.RoleIntersection):
        left = encode_role(role.left, ctx)
        right = encode_role(role.right, ctx)
        return tuple(meet(x, y) for x, y in zip(left, right))
    raise TypeError(role)


def _encode_core(expr: dl.ConceptExpr, ctx: EncodingContext) -> BitCode:
    if isinstance(expr, dl.Atomic):
        return encode_atomic(expr.name, ctx)
    if isinstance(expr, dl.Top):
        return make_top_code(ctx.concept_width)
    if isinstance(expr, dl.Bottom):
        return make_bot_code(ctx.concept_width)
    if isinstance(expr, dl.Not):
        # NNF guarantees the argument is atomic
        return neg_code(_encode_core(expr.arg, ctx))
    if isinstance(expr, dl.And):
        return combine(MEET, _encode_core(expr.left, ctx), _encode_core(expr.right, ctx))
    if isinstance(expr, dl.Or):
        return combine(JOIN, _encode_core(expr.left, ctx), _encode_core(expr.right, ctx))
    if isinstance(expr, (dl.All, dl.Some)):
        quant = QuantifierBit.FORALL if isinstance(expr, dl.All) else QuantifierBit.EXISTS
        filler = _encode_core(expr.filler, ctx)
        segment = Segment(quant, encode_role(expr.role, ctx), filler)
        bits = (Bit.ZERO,) * ctx.concept_width
        code = BitCode(bits, (segment,), exact=filler.exact)
        return normalize(code)
    raise TypeError(expr)


def encode(expr: dl.ConceptExpr, ctx: EncodingContext) -> BitCode:
    """Interpretation of an expression as a normalized bit-code."""
    expanded = dl.expand_definitions(expr, ctx.tbox)
    return _encode_core(_nnf(expanded), ctx)


# --- projection ------------------------------------------------------------


def project(code: BitCode) -> BitCode:
    """Positionwise upper-approximation: folds compounds into plain bits.

    Union compounds fold their operands with join and keep only segments
    present in every operand (fillers joined); intersection compounds fold
    with meet and keep all segments (same-key fillers met).
    """
    comp = code.single_compound()
    if comp is None:
        if code.plain_bits() is None:
            raise UnsupportedCode("cannot project a mixed compound code")
        return code
    projected = [project(op) for op in comp.operands]
    fold = join if comp.op == "U" else meet
    bits = projected[0].plain_bits()
    assert bits is not None
    for other in projected[1:]:
        other_bits = other.plain_bits()
        assert other_bits is not None
        bits = tuple(fold(x, y) for x, y in zip(bits, other_bits))
    if comp.op == "I":
        segments = projected[0].segments
        for other in projected[1:]:
            segments, _ = _merge_segments_meet(segments, other.segments)
    else:
        keys = set(s.merge_key() for s in projected[0].segments)
        for other in projected[1:]:
            keys &= set(s.merge_key() for s in other.segments)
        merged: list[Segment] = []
        for key in keys:
            matching = [
                s for p in projected for s in p.segments if s.merge_key() == key
            ]
            acc = project(matching[0].filler)
            for seg in matching[1:]:
                acc_bits = acc.plain_bits()
                f_bits = project(seg.filler).plain_bits()
                assert acc_bits is not None and f_bits is not None
                acc = BitCode(
                    tuple(join(x, y) for x, y in zip(acc_bits, f_bits)),
                    (),
                    exact=False,
                )
            merged.append(Segment(matching[0].quantifier, matching[0].role_bits, acc))
        segments = _canonical_segments(merged)
    return BitCode(bits, segments, exact=False)
