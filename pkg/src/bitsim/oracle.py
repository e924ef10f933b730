"""Brute-force extensional checker for the algebraic pipeline.

Propositional mode models each atomic concept as a sign on one prototypical
element, constrained by the hierarchy (a positive child forces positive
parents); enumeration over all consistent sign assignments is exact for the
role-free fragment.  Role mode enumerates finite interpretations over domain
sizes 1..3 and is refutation-complete at that scale only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from . import dl, generators, similarity
from .encoding import (
    SIGN_CLASS,
    BitCode,
    EncodingContext,
    build_context,
    encode,
    serialize,
)

PROPOSITIONAL_ATOM_CAP = 12
ROLE_ATOM_CAP = 4
ROLE_COUNT_CAP = 2
ROLE_BUDGET = 1 << 19


class OracleCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Refuted:
    """A counterexample: the witness reproduces the violation on re-evaluation."""

    witness: object

    def __repr__(self) -> str:
        return f"REFUTED({self.witness!r})"


# --- propositional mode ----------------------------------------------------


class PropSpace:
    """All hierarchy-consistent sign assignments of a terminology.

    Assignments are bitmasks over atoms in declaration order; expression
    coverage is computed as a bitmask over the assignment list, so set
    operations are single integer operations.
    """

    def __init__(self, tbox: dl.TBox):
        if len(tbox.atomic_concepts) > PROPOSITIONAL_ATOM_CAP:
            raise OracleCapExceeded(
                f"{len(tbox.atomic_concepts)} atoms exceed the propositional cap "
                f"of {PROPOSITIONAL_ATOM_CAP}"
            )
        self.tbox = tbox
        self.atoms = tbox.atomic_concepts
        self.index = {name: i for i, name in enumerate(self.atoms)}
        parent_mask = [0] * len(self.atoms)
        for child, parent in tbox.concept_inclusions:
            parent_mask[self.index[child]] |= 1 << self.index[parent]
        self.assignments: list[int] = []
        n = len(self.atoms)
        for mask in range(1 << n):
            ok = True
            for i in range(n):
                if mask & (1 << i) and (mask & parent_mask[i]) != parent_mask[i]:
                    ok = False
                    break
            if ok:
                self.assignments.append(mask)
        self.full = (1 << len(self.assignments)) - 1
        self._atom_cov = {
            name: self._mask_for(lambda m, i=self.index[name]: bool(m & (1 << i)))
            for name in self.atoms
        }

    def _mask_for(self, predicate) -> int:
        out = 0
        for pos, mask in enumerate(self.assignments):
            if predicate(mask):
                out |= 1 << pos
        return out

    def coverage(self, expr: dl.ConceptExpr) -> int:
        expr = dl.expand_definitions(expr, self.tbox)
        return self._coverage(expr)

    def _coverage(self, expr: dl.ConceptExpr) -> int:
        if isinstance(expr, dl.Atomic):
            return self._atom_cov[expr.name]
        if isinstance(expr, dl.Top):
            return self.full
        if isinstance(expr, dl.Bottom):
            return 0
        if isinstance(expr, dl.Not):
            return self.full ^ self._coverage(expr.arg)
        if isinstance(expr, dl.And):
            return self._coverage(expr.left) & self._coverage(expr.right)
        if isinstance(expr, dl.Or):
            return self._coverage(expr.left) | self._coverage(expr.right)
        raise OracleCapExceeded("role restriction in propositional mode")

    def assignment_names(self, position: int) -> frozenset[str]:
        mask = self.assignments[position]
        return frozenset(
            name for name, i in self.index.items() if mask & (1 << i)
        )


def oracle_subsumes(ci: dl.ConceptExpr, cj: dl.ConceptExpr, tbox: dl.TBox,
                    space: PropSpace | None = None):
    """Exact propositional subsumption: True or Refuted(witness assignment)."""
    space = space or PropSpace(tbox)
    cov_i, cov_j = space.coverage(ci), space.coverage(cj)
    leftover = cov_i & ~cov_j
    if leftover == 0:
        return True
    position = (leftover & -leftover).bit_length() - 1
    return Refuted(space.assignment_names(position))


def oracle_jaccard(ci: dl.ConceptExpr, cj: dl.ConceptExpr, tbox: dl.TBox,
                   space: PropSpace | None = None) -> Fraction:
    """|cov(ci and cj)| / |cov(ci or cj)|; 1 when both covers are empty."""
    space = space or PropSpace(tbox)
    cov_i, cov_j = space.coverage(ci), space.coverage(cj)
    num = (cov_i & cov_j).bit_count()
    den = (cov_i | cov_j).bit_count()
    if den == 0:
        return Fraction(1)
    return Fraction(num, den)


# --- independent generativity oracle ---------------------------------------


def _covers(code: BitCode, mask: int) -> bool:
    comp = code.single_compound()
    if comp is not None:
        if comp.op == "U":
            return any(_covers(op, mask) for op in comp.operands)
        return all(_covers(op, mask) for op in comp.operands)
    bits = code.plain_bits()
    if bits is None:
        raise OracleCapExceeded("mixed compound positions")
    for k, b in enumerate(bits):
        sign = "+" if mask & (1 << k) else "-"
        if sign not in SIGN_CLASS[b]:
            return False
    return True


def fcg_oracle(code: BitCode, cap: int = PROPOSITIONAL_ATOM_CAP) -> int:
    """Generativity by looping over all 2^n sign assignments."""
    width = code.width
    if width > cap:
        raise OracleCapExceeded(f"width {width} over oracle cap {cap}")
    return sum(1 for mask in range(1 << width) if _covers(code, mask))


# --- role mode --------------------------------------------------------------


@dataclass(frozen=True)
class Interpretation:
    domain: tuple[int, ...]
    concept_ext: dict[str, frozenset[int]]
    role_ext: dict[str, frozenset[tuple[int, int]]]


def extension(expr: dl.ConceptExpr, interp: Interpretation,
              tbox: dl.TBox | None = None) -> frozenset[int]:
    """Model-theoretic extension of an expression in a finite interpretation."""
    if tbox is not None:
        expr = dl.expand_definitions(expr, tbox)
    domain = frozenset(interp.domain)
    return _extension(expr, interp, domain)


def _role_pairs(role: dl.RoleExpr, interp: Interpretation) -> frozenset[tuple[int, int]]:
    if isinstance(role, dl.AtomicRole):
        try:
            return interp.role_ext[role.name]
        except KeyError:
            raise ValueError(f"unknown role {role.name!r}") from None
    if isinstance(role, dl.RoleUnion):
        return _role_pairs(role.left, interp) | _role_pairs(role.right, interp)
    if isinstance(role, dl.RoleIntersection):
        return _role_pairs(role.left, interp) & _role_pairs(role.right, interp)
    raise TypeError(role)


def _extension(expr: dl.ConceptExpr, interp: Interpretation,
               domain: frozenset[int]) -> frozenset[int]:
    if isinstance(expr, dl.Atomic):
        try:
            return interp.concept_ext[expr.name]
        except KeyError:
            raise ValueError(f"unknown name {expr.name!r}") from None
    if isinstance(expr, dl.Top):
        return domain
    if isinstance(expr, dl.Bottom):
        return frozenset()
    if isinstance(expr, dl.Not):
        return domain - _extension(expr.arg, interp, domain)
    if isinstance(expr, dl.And):
        return _extension(expr.left, interp, domain) & _extension(expr.right, interp, domain)
    if isinstance(expr, dl.Or):
        return _extension(expr.left, interp, domain) | _extension(expr.right, interp, domain)
    if isinstance(expr, dl.All):
        pairs = _role_pairs(expr.role, interp)
        filler = _extension(expr.filler, interp, domain)
        return frozenset(
            a for a in domain
            if all(b in filler for x, b in pairs if x == a)
        )
    if isinstance(expr, dl.Some):
        pairs = _role_pairs(expr.role, interp)
        filler = _extension(expr.filler, interp, domain)
        return frozenset(a for a in domain if any(x == a and b in filler for x, b in pairs))
    raise TypeError(expr)


def _subsets(items: tuple) -> list[frozenset]:
    out = []
    for r in range(len(items) + 1):
        out.extend(frozenset(c) for c in combinations(items, r))
    return out


def enumerate_interpretations(tbox: dl.TBox, domain_size: int,
                              budget: int = ROLE_BUDGET):
    """All interpretations over a fixed domain honoring both hierarchies."""
    atoms, roles = tbox.atomic_concepts, tbox.atomic_roles
    if len(atoms) > ROLE_ATOM_CAP:
        raise OracleCapExceeded(f"{len(atoms)} atoms exceed role-mode cap {ROLE_ATOM_CAP}")
    if len(roles) > ROLE_COUNT_CAP:
        raise OracleCapExceeded(f"{len(roles)} roles exceed role-mode cap {ROLE_COUNT_CAP}")
    domain = tuple(range(domain_size))
    total = 2 ** (domain_size * len(atoms)) * 2 ** (domain_size * domain_size * len(roles))
    if total > budget:
        raise OracleCapExceeded(
            f"{total} interpretations at domain size {domain_size} exceed budget {budget}"
        )
    concept_subsets = _subsets(domain)
    pair_subsets = _subsets(tuple(product(domain, domain)))

    concept_choices = []
    for ext_combo in product(concept_subsets, repeat=len(atoms)):
        assignment = dict(zip(atoms, ext_combo))
        if all(assignment[c] <= assignment[p] for c, p in tbox.concept_inclusions):
            concept_choices.append(assignment)
    role_choices = []
    for ext_combo in product(pair_subsets, repeat=len(roles)):
        assignment = dict(zip(roles, ext_combo))
        if all(assignment[c] <= assignment[p] for c, p in tbox.role_inclusions):
            role_choices.append(assignment)
    for concepts in concept_choices:
        for roles_ext in role_choices:
            yield Interpretation(domain, concepts, roles_ext)


def oracle_subsumes_roles(ci: dl.ConceptExpr, cj: dl.ConceptExpr, tbox: dl.TBox,
                          max_domain: int = 3, budget: int = ROLE_BUDGET):
    """Refutation-only subsumption over domain sizes 1..max_domain."""
    ci = dl.expand_definitions(ci, tbox)
    cj = dl.expand_definitions(cj, tbox)
    for size in range(1, max_domain + 1):
        for interp in enumerate_interpretations(tbox, size, budget):
            domain = frozenset(interp.domain)
            ext_i = _extension(ci, interp, domain)
            ext_j = _extension(cj, interp, domain)
            if not ext_i <= ext_j:
                return Refuted(interp)
    return True


# --- cross-check ------------------------------------------------------------


@dataclass(frozen=True)
class CrosscheckRow:
    kind: str
    left: str
    right: str
    encoder: str
    oracle: str
    witness: str = ""


@dataclass
class CrosscheckReport:
    rows: list[CrosscheckRow] = field(default_factory=list)
    comparisons: int = 0
    agreements: int = 0
    unknowns: int = 0
    disagreements: int = 0
    documented: int = 0

    def add(self, row: CrosscheckRow) -> None:
        self.rows.append(row)

    def to_tsv(self) -> str:
        lines = ["kind\tleft\tright\tencoder\toracle\twitness"]
        for r in self.rows:
            lines.append(
                f"{r.kind}\t{r.left}\t{r.right}\t{r.encoder}\t{r.oracle}\t{r.witness}"
            )
        lines.append(
            f"summary\tcomparisons={self.comparisons}\tagreements={self.agreements}"
            f"\tunknowns={self.unknowns}\tdisagreements={self.disagreements}"
            f"\tdocumented={self.documented}"
        )
        return "\n".join(lines) + "\n"


def _mentions_existential(*exprs: dl.ConceptExpr) -> bool:
    def walk(e: dl.ConceptExpr) -> bool:
        if isinstance(e, dl.Some):
            return True
        if isinstance(e, dl.Not):
            return walk(e.arg)
        if isinstance(e, (dl.And, dl.Or)):
            return walk(e.left) or walk(e.right)
        if isinstance(e, dl.All):
            # under negation an inner value restriction flips to existential;
            # classify conservatively by presence of any restriction
            return True
        return False

    return any(walk(e) for e in exprs)


def _common_ancestor_code(a: str, b: str, tbox: dl.TBox, ctx: EncodingContext) -> str:
    """Independent lcs path: intersect self-plus-ancestor sets, set those bits."""
    set_a = {a} | set(tbox.concept_ancestors(a))
    set_b = {b} | set(tbox.concept_ancestors(b))
    positions = {ctx.concept_position[n] for n in set_a & set_b}
    chars = [
        "1" if k in positions else "0"
        for k in range(ctx.concept_width, 0, -1)
    ]
    return "".join(chars)


def cross_check(
    tbox: dl.TBox,
    trials: int = 500,
    seed: int = 42,
    roles: bool = False,
    cfg: similarity.SimilarityConfig = similarity.DEFAULT_CONFIG,
) -> CrosscheckReport:
    """Compare the algebraic path against brute-force enumeration.

    Propositional trials are exact: any subsumption disagreement is a real
    one.  Role trials are refutation-only and disagreements touching
    restrictions land in the documented-incompleteness bucket (existential
    fillers are not collapsed or split apart by the encoder).
    """
    rng = random.Random(seed)
    ctx = build_context(tbox)
    report = CrosscheckReport()
    space = PropSpace(tbox)

    for _ in range(trials):
        e1 = generators.random_expr(rng, tbox, depth=3, extremes=True)
        e2 = generators.random_expr(rng, tbox, depth=3, extremes=True)
        c1, c2 = encode(e1, ctx), encode(e2, ctx)
        verdict = similarity.subsumes(c1, c2, ctx)
        answer = oracle_subsumes(e1, e2, tbox, space)
        report.comparisons += 1
        if verdict is similarity.UNKNOWN:
            report.unknowns += 1
            continue
        oracle_true = answer is True
        if verdict == oracle_true:
            report.agreements += 1
            continue
        report.disagreements += 1
        report.add(
            CrosscheckRow(
                "subsumes",
                dl.to_text(e1),
                dl.to_text(e2),
                str(verdict),
                "true" if oracle_true else repr(answer),
                serialize(c1) + " vs " + serialize(c2),
            )
        )

    for a in tbox.atomic_concepts:
        for b in tbox.atomic_concepts:
            got = serialize(similarity.lcs_atomic(a, b, ctx))
            want = _common_ancestor_code(a, b, tbox, ctx)
            report.comparisons += 1
            if got == want:
                report.agreements += 1
            else:
                report.disagreements += 1
                report.add(CrosscheckRow("lcs", a, b, got, want))

    for _ in range(max(1, trials // 5)):
        expr = generators.random_expr(rng, tbox, depth=3)
        code = encode(expr, ctx)
        try:
            got = similarity.fcg(code, cfg)
        except similarity.FcgError:
            continue
        want = fcg_oracle(code)
        report.comparisons += 1
        if got == want:
            report.agreements += 1
        else:
            report.disagreements += 1
            report.add(
                CrosscheckRow("fcg", dl.to_text(expr), "", str(got), str(want))
            )

    if roles:
        if not tbox.atomic_roles:
            raise ValueError("role-mode cross-check needs at least one role")
        for _ in range(max(1, trials // 10)):
            e1 = generators.random_expr(rng, tbox, depth=2, roles=True, extremes=True)
            e2 = generators.random_expr(rng, tbox, depth=2, roles=True, extremes=True)
            c1, c2 = encode(e1, ctx), encode(e2, ctx)
            verdict = similarity.subsumes(c1, c2, ctx)
            report.comparisons += 1
            if verdict is similarity.UNKNOWN:
                report.unknowns += 1
                continue
            answer = oracle_subsumes_roles(e1, e2, tbox, max_domain=2)
            if verdict == (answer is True):
                report.agreements += 1
                continue
            if _mentions_existential(e1, e2):
                report.documented += 1
                kind = "documented_incompleteness"
            else:
                report.disagreements += 1
                kind = "subsumes_roles"
            report.add(
                CrosscheckRow(
                    kind,
                    dl.to_text(e1),
                    dl.to_text(e2),
                    str(verdict),
                    "true" if answer is True else repr(answer),
                )
            )

    return report
