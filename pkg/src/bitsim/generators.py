"""Seeded random TBoxes and expressions for property suites and cross-checks."""

from __future__ import annotations

import random

from . import dl


def random_tbox(
    rng: random.Random,
    n_atoms: int,
    edge_prob: float = 0.3,
    n_roles: int = 0,
    role_edge_prob: float = 0.2,
) -> dl.TBox:
    """Random DAG terminology.

    Edges respect a hidden topological order while declaration order is
    shuffled, so position assignment has real tie-breaking work to do.
    """
    order = [f"C{i}" for i in range(1, n_atoms + 1)]
    rank = {name: i for i, name in enumerate(order)}
    edges = [
        (child, parent)
        for i, parent in enumerate(order)
        for child in order[i + 1 :]
        if rng.random() < edge_prob
    ]
    declared = order[:]
    rng.shuffle(declared)
    lines = [f"concept {name}" for name in declared]
    lines += [f"{c} sub {p}" for c, p in edges if rank[c] > rank[p]]
    roles = [f"r{i}" for i in range(1, n_roles + 1)]
    lines += [f"role {name}" for name in roles]
    for i, parent in enumerate(roles):
        for child in roles[i + 1 :]:
            if rng.random() < role_edge_prob:
                lines.append(f"role {child} sub {parent}")
    return dl.parse_tbox("\n".join(lines))


def random_role(rng: random.Random, tbox: dl.TBox, depth: int = 1) -> dl.RoleExpr:
    if depth <= 0 or rng.random() < 0.7:
        return dl.AtomicRole(rng.choice(tbox.atomic_roles))
    ctor = rng.choice((dl.RoleUnion, dl.RoleIntersection))
    return ctor(random_role(rng, tbox, depth - 1), random_role(rng, tbox, depth - 1))


def random_expr(
    rng: random.Random,
    tbox: dl.TBox,
    depth: int = 3,
    roles: bool = False,
    extremes: bool = False,
) -> dl.ConceptExpr:
    """Random concept expression; propositional unless roles is set."""
    atoms = tbox.atomic_concepts
    if depth <= 0:
        if extremes and rng.random() < 0.05:
            return dl.Top() if rng.random() < 0.5 else dl.Bottom()
        return dl.Atomic(rng.choice(atoms))
    choices = ["atom", "not", "and", "or"]
    if roles and tbox.atomic_roles:
        choices += ["all", "some"]
    kind = rng.choice(choices)
    if kind == "atom":
        return random_expr(rng, tbox, 0, roles, extremes)
    if kind == "not":
        return dl.Not(random_expr(rng, tbox, depth - 1, roles, extremes))
    if kind in ("and", "or"):
        left = random_expr(rng, tbox, depth - 1, roles, extremes)
        right = random_expr(rng, tbox, depth - 1, roles, extremes)
        return dl.And(left, right) if kind == "and" else dl.Or(left, right)
    role = random_role(rng, tbox)
    filler = random_expr(rng, tbox, depth - 1, roles, extremes)
    return dl.All(role, filler) if kind == "all" else dl.Some(role, filler)


def chain_tbox(n: int) -> dl.TBox:
    """Flat terminology for shared-conjunct chains: Ci, Cj plus n conjuncts."""
    names = ["Ci", "Cj"] + [f"S{k}" for k in range(1, n + 1)]
    return dl.parse_tbox("\n".join(f"concept {name}" for name in names))


def chain_pair(n: int) -> tuple[dl.ConceptExpr, dl.ConceptExpr]:
    """The shared-conjunct chain of length n for Ci and Cj."""

    def build(target: str) -> dl.ConceptExpr:
        expr: dl.ConceptExpr | None = None
        for k in range(1, n + 1):
            conjunct = dl.And(dl.Atomic(f"S{k}"), dl.Atomic(target))
            expr = conjunct if expr is None else dl.And(expr, conjunct)
        assert expr is not None
        return expr

    return build("Ci"), build("Cj")


def monotonicity_scenario(
    rng: random.Random, extra_common: int = 0, extra_shared: int = 0, padding: int = 0
) -> tuple[dl.TBox, str, str, str]:
    """Terminology where Ci and Cj share strictly more subsumers than Ci, Ck.

    All three leaves inherit the common roots; only Ci and Cj inherit the
    extra shared ones.  Unrelated padding atoms exercise the ignored-pair
    rule without affecting the comparison.
    """
    commons = ["X1"] + [f"XC{k}" for k in range(1, extra_common + 1)]
    shared = ["X2"] + [f"XS{k}" for k in range(1, extra_shared + 1)]
    pads = [f"P{k}" for k in range(1, padding + 1)]
    lines = [f"concept {name}" for name in commons + shared + pads + ["Ci", "Cj", "Ck"]]
    for c in commons:
        lines += [f"Ci sub {c}", f"Cj sub {c}", f"Ck sub {c}"]
    for s in shared:
        lines += [f"Ci sub {s}", f"Cj sub {s}"]
    tbox = dl.parse_tbox("\n".join(lines))
    return tbox, "Ci", "Cj", "Ck"
