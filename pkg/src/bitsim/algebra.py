"""Eleven-valued bit algebra: symbols, join/meet/negation tables, specificity order.

The alphabet has two generator bits (0, 1), six derived symbols produced by
join/meet against 0 (X, X', X'', Y, Y'), a near-top/near-bottom pair (t, f)
and the extremes (T, F).  All operators are total and materialized eagerly as
lookup tables; ``verify_tables`` re-checks every law the tables must satisfy.

Construction rules (join):
  * the nine non-extreme symbols split into a positive family Y' < 1 < X and a
    negative family Y < X'' < X', with 0 neutral;
  * same family -> higher level; a join 0 -> level-3 member of a's family;
  * opposite families -> t; t absorbs; f is identity among non-extremes;
  * T absorbs and F is identity, except T join F = t (the extremes count as
    opposite families, which keeps b meet not(b) != F for every b).
Meet is the De Morgan dual of join; negation swaps families and reverses
levels.  The specificity order (smaller = more specific) is the
reflexive-transitive closure of the Hasse edges listed in HASSE_EDGES.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum


class Bit(Enum):
    """One of the 11 algebra symbols."""

    ZERO = 0
    ONE = 1
    X = 2
    X_PRIME = 3
    X_DPRIME = 4
    Y = 5
    Y_PRIME = 6
    TOP_PRIME = 7
    BOT_PRIME = 8
    TOP = 9
    BOT = 10

    def __repr__(self) -> str:
        return f"Bit.{self.name}"


ALL_BITS = tuple(Bit)

BIT_TO_CHAR = {
    Bit.ZERO: "0",
    Bit.ONE: "1",
    Bit.X: "X",
    Bit.X_PRIME: "x",
    Bit.X_DPRIME: "N",
    Bit.Y: "Y",
    Bit.Y_PRIME: "y",
    Bit.TOP: "T",
    Bit.TOP_PRIME: "t",
    Bit.BOT: "F",
    Bit.BOT_PRIME: "f",
}
CHAR_TO_BIT = {c: b for b, c in BIT_TO_CHAR.items()}

# family levels 1..3, positive carries the property, negative its complement
_POSITIVE = (Bit.Y_PRIME, Bit.ONE, Bit.X)
_NEGATIVE = (Bit.Y, Bit.X_DPRIME, Bit.X_PRIME)
_FAMILY = {b: ("P", i + 1) for i, b in enumerate(_POSITIVE)}
_FAMILY.update({b: ("N", i + 1) for i, b in enumerate(_NEGATIVE)})

NEG_TABLE = {
    Bit.ZERO: Bit.ZERO,
    Bit.ONE: Bit.X_DPRIME,
    Bit.X_DPRIME: Bit.ONE,
    Bit.X: Bit.Y,
    Bit.Y: Bit.X,
    Bit.X_PRIME: Bit.Y_PRIME,
    Bit.Y_PRIME: Bit.X_PRIME,
    Bit.TOP_PRIME: Bit.BOT_PRIME,
    Bit.BOT_PRIME: Bit.TOP_PRIME,
    Bit.TOP: Bit.BOT,
    Bit.BOT: Bit.TOP,
}


def neg(b: Bit) -> Bit:
    return NEG_TABLE[b]


def _level3(family: str) -> Bit:
    return Bit.X if family == "P" else Bit.X_PRIME


def _join_rule(a: Bit, b: Bit) -> Bit:
    if a is Bit.TOP and b is Bit.BOT or a is Bit.BOT and b is Bit.TOP:
        return Bit.TOP_PRIME
    if a is Bit.TOP or b is Bit.TOP:
        return Bit.TOP
    if a is Bit.BOT:
        return b
    if b is Bit.BOT:
        return a
    if a is Bit.TOP_PRIME or b is Bit.TOP_PRIME:
        return Bit.TOP_PRIME
    if a is Bit.BOT_PRIME:
        return b
    if b is Bit.BOT_PRIME:
        return a
    if a is Bit.ZERO and b is Bit.ZERO:
        return Bit.ZERO
    if a is Bit.ZERO:
        return _level3(_FAMILY[b][0])
    if b is Bit.ZERO:
        return _level3(_FAMILY[a][0])
    fam_a, lvl_a = _FAMILY[a]
    fam_b, lvl_b = _FAMILY[b]
    if fam_a == fam_b:
        return a if lvl_a >= lvl_b else b
    return Bit.TOP_PRIME


JOIN_TABLE = {(a, b): _join_rule(a, b) for a in ALL_BITS for b in ALL_BITS}
MEET_TABLE = {
    (a, b): NEG_TABLE[JOIN_TABLE[(NEG_TABLE[a], NEG_TABLE[b])]]
    for a in ALL_BITS
    for b in ALL_BITS
}


def join(a: Bit, b: Bit) -> Bit:
    return JOIN_TABLE[(a, b)]


def meet(a: Bit, b: Bit) -> Bit:
    return MEET_TABLE[(a, b)]


# Hasse diagram of the specificity order, as (more specific, less specific).
HASSE_EDGES = (
    (Bit.BOT, Bit.BOT_PRIME),
    (Bit.BOT_PRIME, Bit.Y_PRIME),
    (Bit.BOT_PRIME, Bit.Y),
    (Bit.Y_PRIME, Bit.ONE),
    (Bit.Y, Bit.X_DPRIME),
    (Bit.Y, Bit.ZERO),
    (Bit.ONE, Bit.ZERO),
    (Bit.ZERO, Bit.X),
    (Bit.ZERO, Bit.X_PRIME),
    (Bit.X_DPRIME, Bit.X_PRIME),
    (Bit.X, Bit.TOP_PRIME),
    (Bit.X_PRIME, Bit.TOP_PRIME),
    (Bit.TOP_PRIME, Bit.TOP),
)


def _transitive_closure() -> dict[tuple[Bit, Bit], bool]:
    table = {(a, b): a is b for a in ALL_BITS for b in ALL_BITS}
    for a, b in HASSE_EDGES:
        table[(a, b)] = True
    changed = True
    while changed:
        changed = False
        for a in ALL_BITS:
            for b in ALL_BITS:
                if table[(a, b)]:
                    continue
                if any(table[(a, c)] and table[(c, b)] for c in ALL_BITS):
                    table[(a, b)] = True
                    changed = True
    return table


LEQ_TABLE = _transitive_closure()


def leq(a: Bit, b: Bit) -> bool:
    """Specificity order: a is at least as specific as b."""
    return LEQ_TABLE[(a, b)]


def _all_pairs_distances() -> dict[tuple[Bit, Bit], int]:
    adjacency: dict[Bit, list[Bit]] = {b: [] for b in ALL_BITS}
    for a, b in HASSE_EDGES:
        adjacency[a].append(b)
        adjacency[b].append(a)
    dist: dict[tuple[Bit, Bit], int] = {}
    for start in ALL_BITS:
        seen = {start: 0}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for nxt in adjacency[cur]:
                if nxt not in seen:
                    seen[nxt] = seen[cur] + 1
                    queue.append(nxt)
        for target, d in seen.items():
            dist[(start, target)] = d
    return dist


HASSE_DIST = _all_pairs_distances()


def hasse_distance(a: Bit, b: Bit) -> int:
    """Undirected shortest-path distance in the Hasse diagram (connected)."""
    return HASSE_DIST[(a, b)]


class QuantifierBit(Enum):
    """Quantifier alphabet: FORALL encodes as 1, EXISTS as 0.

    Negation within this alphabet flips FORALL<->EXISTS and Y_PRIME<->X; it is
    a separate table from the 11-symbol negation.
    """

    FORALL = "A"
    EXISTS = "E"
    X = "X"
    Y_PRIME = "y"


QUANT_NEG = {
    QuantifierBit.FORALL: QuantifierBit.EXISTS,
    QuantifierBit.EXISTS: QuantifierBit.FORALL,
    QuantifierBit.X: QuantifierBit.Y_PRIME,
    QuantifierBit.Y_PRIME: QuantifierBit.X,
}

# Role alphabet: {1, 0, X, Y'} with the main join/meet restricted to it.
ROLE_BITS = frozenset({Bit.ONE, Bit.ZERO, Bit.X, Bit.Y_PRIME})


@dataclass(frozen=True)
class Constraint:
    name: str
    ok: bool
    detail: str = ""


class AlgebraError(ValueError):
    """Raised when the shipped tables fail verification."""


def verify_tables() -> list[Constraint]:
    """Check every law the canonical tables must satisfy.

    Returns one entry per constraint; all must pass for the shipped tables.
    """
    checks: list[Constraint] = []

    def add(name: str, ok: bool, detail: str = "") -> None:
        checks.append(Constraint(name, ok, detail))

    generator_identities = (
        ("J1: X = 1 join 0", join(Bit.ONE, Bit.ZERO), Bit.X),
        ("J2: X' = X'' join 0", join(Bit.X_DPRIME, Bit.ZERO), Bit.X_PRIME),
        ("J3: t = Y join Y'", join(Bit.Y, Bit.Y_PRIME), Bit.TOP_PRIME),
        ("M1: Y' = 1 meet 0", meet(Bit.ONE, Bit.ZERO), Bit.Y_PRIME),
        ("M2: Y = X'' meet 0", meet(Bit.X_DPRIME, Bit.ZERO), Bit.Y),
        ("M3: f = X meet X'", meet(Bit.X, Bit.X_PRIME), Bit.BOT_PRIME),
    )
    for name, got, want in generator_identities:
        add(name, got is want, f"got {got.name}")

    add("neg 0 = 0", neg(Bit.ZERO) is Bit.ZERO)
    add("neg 1 = X''", neg(Bit.ONE) is Bit.X_DPRIME)
    observations = (
        ("X = neg Y", Bit.X, Bit.Y),
        ("X' = neg Y'", Bit.X_PRIME, Bit.Y_PRIME),
        ("t = neg f", Bit.TOP_PRIME, Bit.BOT_PRIME),
        ("T = neg F", Bit.TOP, Bit.BOT),
    )
    for name, want, arg in observations:
        add(name, neg(arg) is want)

    add(
        "join commutative",
        all(join(a, b) is join(b, a) for a in ALL_BITS for b in ALL_BITS),
    )
    add(
        "meet commutative",
        all(meet(a, b) is meet(b, a) for a in ALL_BITS for b in ALL_BITS),
    )
    add("join idempotent", all(join(a, a) is a for a in ALL_BITS))
    add("meet idempotent", all(meet(a, a) is a for a in ALL_BITS))
    add("double negation", all(neg(neg(a)) is a for a in ALL_BITS))
    add(
        "De Morgan meet",
        all(
            meet(a, b) is neg(join(neg(a), neg(b)))
            for a in ALL_BITS
            for b in ALL_BITS
        ),
    )
    add(
        "De Morgan join",
        all(
            join(a, b) is neg(meet(neg(a), neg(b)))
            for a in ALL_BITS
            for b in ALL_BITS
        ),
    )
    bad = [b for b in ALL_BITS if meet(b, neg(b)) is Bit.BOT]
    add(
        "b meet neg(b) != F for all 11 bits",
        not bad,
        ",".join(x.name for x in bad),
    )

    add("leq reflexive", all(leq(a, a) for a in ALL_BITS))
    add(
        "leq antisymmetric",
        all(
            not (leq(a, b) and leq(b, a))
            for a in ALL_BITS
            for b in ALL_BITS
            if a is not b
        ),
    )
    add(
        "leq transitive",
        all(
            leq(a, c)
            for a in ALL_BITS
            for b in ALL_BITS
            for c in ALL_BITS
            if leq(a, b) and leq(b, c)
        ),
    )

    # Bound soundness everywhere except the extreme clash pair (T, F), where
    # the non-F complement law takes precedence over absorption.
    clash = {(Bit.TOP, Bit.BOT), (Bit.BOT, Bit.TOP)}
    add(
        "join upper bound (non-clash pairs)",
        all(
            leq(a, join(a, b)) and leq(b, join(a, b))
            for a in ALL_BITS
            for b in ALL_BITS
            if (a, b) not in clash
        ),
    )
    add(
        "meet lower bound (non-clash pairs)",
        all(
            leq(meet(a, b), a) and leq(meet(a, b), b)
            for a in ALL_BITS
            for b in ALL_BITS
            if (a, b) not in clash
        ),
    )
    add(
        "T absorbs join / identity for meet (vs non-F)",
        all(
            join(Bit.TOP, a) is Bit.TOP and meet(Bit.TOP, a) is a
            for a in ALL_BITS
            if a is not Bit.BOT
        ),
    )
    add(
        "F identity for join / absorbs meet (vs non-T)",
        all(
            join(Bit.BOT, a) is a and meet(Bit.BOT, a) is Bit.BOT
            for a in ALL_BITS
            if a is not Bit.TOP
        ),
    )
    add(
        "extreme clash: T join F = t, T meet F = f",
        join(Bit.TOP, Bit.BOT) is Bit.TOP_PRIME
        and meet(Bit.TOP, Bit.BOT) is Bit.BOT_PRIME,
    )

    add(
        "char bijection",
        len(BIT_TO_CHAR) == 11 and len(CHAR_TO_BIT) == 11,
    )
    add(
        "role alphabet closed under join/meet",
        all(
            join(a, b) in ROLE_BITS and meet(a, b) in ROLE_BITS
            for a in ROLE_BITS
            for b in ROLE_BITS
        ),
    )
    add(
        "quantifier negation involutive",
        all(QUANT_NEG[QUANT_NEG[q]] is q for q in QuantifierBit),
    )
    add("hasse graph connected", all(d >= 0 for d in HASSE_DIST.values())
        and len(HASSE_DIST) == 121)
    return checks


def assert_tables_valid() -> None:
    failures = [c for c in verify_tables() if not c.ok]
    if failures:
        raise AlgebraError(
            "algebra table verification failed: "
            + "; ".join(f"{c.name} ({c.detail})" for c in failures)
        )
