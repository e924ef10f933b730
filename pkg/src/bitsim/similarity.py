"""BitSim similarity: bit-pair scores, code aggregation, generativity,
subsumption and least common subsumers over codes.

The bit-pair score is 1 on equal symbols and 2^-d otherwise, with d the
undirected distance in the specificity diagram; (0,0) pairs are ignored and
the extreme symbols compare only to themselves (anything else is undefined,
reported by raising :class:`UndefinedSimilarity`).  The code-level aggregate
is the uniform mean over non-ignored positions; matched restriction segments
contribute their fillers' aggregate as one position, unmatched segments
contribute zero.  All arithmetic is exact (fractions), so equal inputs give
bit-identical scores no matter how the work is chunked.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import dl, generators
from .algebra import BIT_TO_CHAR, Bit, QuantifierBit, hasse_distance
from .encoding import (
    SIGN_CLASS,
    SIGN_EMPTY,
    SIGN_FREE,
    SIGN_NEG,
    SIGN_POS,
    BitCode,
    ContextMismatch,
    EncodingContext,
    Segment,
    encode,
    encode_atomic,
    is_bot_code,
    is_top_code,
    project,
    serialize,
)


class UndefinedSimilarity(ValueError):
    """An extreme bit was compared against a non-matching symbol."""


class FcgError(ValueError):
    pass


class _Ignored:
    def __repr__(self) -> str:
        return "IGNORED"


class _Undefined:
    def __repr__(self) -> str:
        return "UNDEFINED"


class _Unknown:
    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        raise TypeError("UNKNOWN verdict is neither true nor false")


IGNORED = _Ignored()
UNDEFINED = _Undefined()
UNKNOWN = _Unknown()


@dataclass(frozen=True)
class SimilarityConfig:
    generativity_penalty: bool = False
    chunk_size: int = 64
    fcg_cap: int = 20

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    @property
    def ignore_zero_pairs(self) -> bool:
        """Fixed: (0,0) pairs never contribute."""
        return True


DEFAULT_CONFIG = SimilarityConfig()


def sigma_bit(a: Bit, b: Bit):
    """Bit-pair similarity: Fraction in [0,1], IGNORED, or UNDEFINED."""
    if a is Bit.ZERO and b is Bit.ZERO:
        return IGNORED
    if a is Bit.TOP or b is Bit.TOP or a is Bit.BOT or b is Bit.BOT:
        return Fraction(1) if a is b else UNDEFINED
    if a is b:
        return Fraction(1)
    return Fraction(1, 2 ** hasse_distance(a, b))


@dataclass(frozen=True)
class PositionEntry:
    label: str
    pair: str
    weight: int
    value: object  # Fraction | IGNORED


@dataclass(frozen=True)
class SimilarityReport:
    fraction: Fraction
    base_fraction: Fraction
    penalty_ratio: Fraction | None
    entries: tuple[PositionEntry, ...]
    ignored_count: int
    fcg_pair: tuple[int, int] | None = None
    cache_hits: int = 0

    @property
    def score(self) -> float:
        return float(self.fraction)


def _pair_segments(
    a: tuple[Segment, ...], b: tuple[Segment, ...]
) -> tuple[list[tuple[Segment, Segment]], list[Segment]]:
    """Symmetric deterministic pairing by (quantifier, role) key."""
    by_key_a: dict[tuple, list[Segment]] = {}
    by_key_b: dict[tuple, list[Segment]] = {}
    for seg in a:
        by_key_a.setdefault(seg.merge_key(), []).append(seg)
    for seg in b:
        by_key_b.setdefault(seg.merge_key(), []).append(seg)
    matched: list[tuple[Segment, Segment]] = []
    unmatched: list[Segment] = []
    for key in sorted(set(by_key_a) | set(by_key_b)):
        sa = sorted(by_key_a.get(key, []), key=Segment.sort_key)
        sb = sorted(by_key_b.get(key, []), key=Segment.sort_key)
        for x, y in zip(sa, sb):
            matched.append((x, y))
        longer = sa if len(sa) > len(sb) else sb
        unmatched.extend(longer[min(len(sa), len(sb)):])
    return matched, unmatched


def _segment_label(seg: Segment) -> str:
    role = "".join(BIT_TO_CHAR[b] for b in reversed(seg.role_bits))
    return f"seg:{seg.quantifier.value}|{role}"


def _extreme_report(a: BitCode, b: BitCode, cfg: SimilarityConfig) -> SimilarityReport:
    if serialize(a) == serialize(b):
        entry = PositionEntry("code", serialize(a)[:1] * 2, 1, Fraction(1))
        return SimilarityReport(
            Fraction(1), Fraction(1), None, (entry,), 0, _fcg_pair(a, b, cfg)
        )
    raise UndefinedSimilarity(
        f"extreme code compared to a different code: {serialize(a)} vs {serialize(b)}"
    )


def _plain_entries(bits_a: tuple[Bit, ...], bits_b: tuple[Bit, ...]):
    """Per-position scores; returns (entries, total, weight, ignored)."""
    entries: list[PositionEntry] = []
    total = Fraction(0)
    weight = 0
    ignored = 0
    for k, (x, y) in enumerate(zip(bits_a, bits_b), start=1):
        pair = BIT_TO_CHAR[x] + BIT_TO_CHAR[y]
        s = sigma_bit(x, y)
        if s is IGNORED:
            ignored += 1
            entries.append(PositionEntry(str(k), pair, 0, IGNORED))
            continue
        if s is UNDEFINED:
            raise UndefinedSimilarity(f"undefined bit pair {pair} at position {k}")
        total += s
        weight += 1
        entries.append(PositionEntry(str(k), pair, 1, s))
    return entries, total, weight, ignored


def _segment_entries(
    segs_a: tuple[Segment, ...], segs_b: tuple[Segment, ...], cfg: SimilarityConfig
):
    """Matched/unmatched segment scores; returns (entries, total, weight)."""
    entries: list[PositionEntry] = []
    total = Fraction(0)
    weight = 0
    sub_cfg = SimilarityConfig(chunk_size=cfg.chunk_size)
    matched, unmatched = _pair_segments(segs_a, segs_b)
    for sa, sb in matched:
        sub = sigma_hat(sa.filler, sb.filler, sub_cfg)
        total += sub.fraction
        weight += 1
        entries.append(PositionEntry(_segment_label(sa), "matched", 1, sub.fraction))
    for seg in unmatched:
        weight += 1
        entries.append(PositionEntry(_segment_label(seg), "unmatched", 1, Fraction(0)))
    return entries, total, weight


def _apply_penalty(
    base: Fraction, a: BitCode, b: BitCode, cfg: SimilarityConfig
) -> tuple[Fraction, Fraction | None, tuple[int, int] | None]:
    fcg_pair = _fcg_pair(a, b, cfg)
    if not cfg.generativity_penalty:
        return base, None, fcg_pair
    fa, fb = fcg_pair  # type: ignore[misc]
    ratio = Fraction(1) if fa == fb else Fraction(min(fa, fb), max(fa, fb))
    return base * ratio, ratio, fcg_pair


def sigma_hat(
    a: BitCode, b: BitCode, cfg: SimilarityConfig = DEFAULT_CONFIG
) -> SimilarityReport:
    """Aggregate similarity of two codes from the same context."""
    if a.width != b.width:
        raise ContextMismatch(f"code widths differ: {a.width} != {b.width}")
    if is_top_code(a) or is_top_code(b) or is_bot_code(a) or is_bot_code(b):
        return _extreme_report(a, b, cfg)
    pa, pb = project(a), project(b)
    bits_a, bits_b = pa.plain_bits(), pb.plain_bits()
    assert bits_a is not None and bits_b is not None
    entries, total, weight, ignored = _plain_entries(bits_a, bits_b)
    seg_entries, seg_total, seg_weight = _segment_entries(pa.segments, pb.segments, cfg)
    entries += seg_entries
    total += seg_total
    weight += seg_weight
    base = Fraction(1) if weight == 0 else total / weight
    final, ratio, fcg_pair = _apply_penalty(base, a, b, cfg)
    return SimilarityReport(final, base, ratio, tuple(entries), ignored, fcg_pair)


def _fcg_pair(a: BitCode, b: BitCode, cfg: SimilarityConfig):
    if not cfg.generativity_penalty:
        return None
    return (fcg(a, cfg), fcg(b, cfg))


# --- code generativity -----------------------------------------------------


def _has_segments(code: BitCode) -> bool:
    if code.segments:
        return True
    for pv in code.bits:
        if not isinstance(pv, Bit):
            if any(_has_segments(op) for op in pv.operands):
                return True
    return False


def _has_compounds(code: BitCode) -> bool:
    if any(not isinstance(pv, Bit) for pv in code.bits):
        return True
    return any(_has_compounds(seg.filler) for seg in code.segments)


def _coverage(code: BitCode) -> frozenset[int]:
    """Sign assignments covered by a propositional code, as bitmasks
    (bit k-1 set = position k carries the property)."""
    comp = code.single_compound()
    if comp is not None:
        sets = [_coverage(op) for op in comp.operands]
        out = set(sets[0])
        for s in sets[1:]:
            out = out | s if comp.op == "U" else out & s
        return frozenset(out)
    bits = code.plain_bits()
    if bits is None:
        raise FcgError("unsupported fragment: mixed compound positions")
    forced = 0
    free: list[int] = []
    for k, b in enumerate(bits):
        cls = SIGN_CLASS[b]
        if cls == SIGN_EMPTY:
            return frozenset()
        if cls == SIGN_POS:
            forced |= 1 << k
        elif cls == SIGN_FREE:
            free.append(k)
    out = set()
    for sub in range(1 << len(free)):
        mask = forced
        for i, k in enumerate(free):
            if (sub >> i) & 1:
                mask |= 1 << k
        out.add(mask)
    return frozenset(out)


def fcg(code: BitCode, cfg: SimilarityConfig = DEFAULT_CONFIG) -> int:
    """Code generativity: distinct fully-signed concepts the code covers.

    Counts full sign assignments by materializing operand coverage sets and
    deduplicating, reproducing inclusion-exclusion over compound operands.
    """
    if _has_segments(code):
        raise FcgError("unsupported fragment: restriction segments present")
    if code.width > cfg.fcg_cap:
        raise FcgError(
            f"enumeration cap exceeded: width {code.width} > {cfg.fcg_cap}"
        )
    return len(_coverage(code))


# --- adapters and reasoning ------------------------------------------------


def bitsim_jaccard(
    ci: dl.ConceptExpr,
    cj: dl.ConceptExpr,
    ctx: EncodingContext,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
) -> SimilarityReport:
    """Jaccard adapter: aggregate similarity of the meet code vs the join code."""
    meet_code = encode(dl.And(ci, cj), ctx)
    join_code = encode(dl.Or(ci, cj), ctx)
    return sigma_hat(meet_code, join_code, cfg)


def _sign_sets(bits: tuple[Bit, ...]):
    pos, neg_, empty = set(), set(), set()
    for k, b in enumerate(bits, start=1):
        cls = SIGN_CLASS[b]
        if cls == SIGN_POS:
            pos.add(k)
        elif cls == SIGN_NEG:
            neg_.add(k)
        elif cls == SIGN_EMPTY:
            empty.add(k)
    return pos, neg_, empty


def _upclose(positions: set[int], ctx: EncodingContext) -> set[int]:
    out = set(positions)
    for k in positions:
        out |= ctx.concept_ancestors[k]
    return out


def _plain_cov_subsumes(
    bits_a: tuple[Bit, ...], bits_b: tuple[Bit, ...], ctx: EncodingContext
) -> bool:
    """Exact coverage inclusion for sign-faithful plain codes."""
    pos_a, neg_a, empty_a = _sign_sets(bits_a)
    pos_b, neg_b, empty_b = _sign_sets(bits_b)
    s_min = _upclose(pos_a, ctx)
    if empty_a or (s_min & neg_a):
        return True  # cov(a) is empty
    if empty_b:
        return False
    if not pos_b <= s_min:
        return False
    for x in neg_b:
        if not (_upclose({x}, ctx) & neg_a):
            return False  # witness: s_min plus the up-closure of x
    return True


def _plain_cov_empty(bits: tuple[Bit, ...], ctx: EncodingContext) -> bool:
    pos, neg_, empty = _sign_sets(bits)
    return bool(empty) or bool(_upclose(pos, ctx) & neg_)


def subsumes(a: BitCode, b: BitCode, ctx: EncodingContext):
    """Code-level subsumption: True, False, or UNKNOWN.

    Definite verdicts are only produced where the codes' structural reading
    provably matches concept semantics (exact provenance, extreme codes, or
    compound operand reasoning); everything else is UNKNOWN rather than a
    guess.
    """
    if a.width != b.width:
        raise ContextMismatch("codes from different contexts")
    # an extreme code only proves anything if its reading is faithful: an
    # inexact code may have collapsed from a claim that under- or
    # over-approximates the concept
    if is_top_code(b) and b.exact:
        return True
    if is_bot_code(a) and a.exact:
        return True
    if (is_top_code(a) or is_bot_code(a)) and not a.exact:
        return UNKNOWN
    if (is_top_code(b) or is_bot_code(b)) and not b.exact:
        return UNKNOWN
    ca, cb = a.single_compound(), b.single_compound()
    if ca is not None:
        verdicts = [subsumes(op, b, ctx) for op in ca.operands]
        if all(v is True for v in verdicts):
            return True
        if any(v is False for v in verdicts):
            return False
        return UNKNOWN
    if cb is not None:
        if any(subsumes(a, op, ctx) is True for op in cb.operands):
            return True
        return UNKNOWN
    bits_a, bits_b = a.plain_bits(), b.plain_bits()
    if bits_a is None or bits_b is None:
        return UNKNOWN
    if is_top_code(a):
        if b.exact and not b.segments:
            pos_b, neg_b, empty_b = _sign_sets(bits_b)
            return not (pos_b or neg_b or empty_b)
        return UNKNOWN
    if a.exact and _plain_cov_empty(bits_a, ctx):
        return True  # an unsatisfiable left side is below everything
    if is_bot_code(b):
        if a.exact:
            return _plain_cov_empty(bits_a, ctx)
        return UNKNOWN
    if not (a.exact and b.exact):
        return UNKNOWN
    plain_true = _plain_cov_subsumes(bits_a, bits_b, ctx)
    if a.segments or b.segments:
        if plain_true:
            matched_all = True
            for seg_b in b.segments:
                candidates = [
                    s for s in a.segments if s.merge_key() == seg_b.merge_key()
                ]
                if not any(
                    subsumes(s.filler, seg_b.filler, ctx) is True
                    for s in candidates
                ):
                    matched_all = False
                    break
            if matched_all:
                return True
        a_all_value = all(
            s.quantifier is QuantifierBit.FORALL for s in a.segments
        )
        if a_all_value and not _plain_cov_empty(bits_a, ctx):
            if not plain_true:
                return False
            if any(s.quantifier is QuantifierBit.EXISTS for s in b.segments):
                return False
        return UNKNOWN
    return plain_true


def lcs_atomic(a: str, b: str, ctx: EncodingContext) -> BitCode:
    """Least common subsumer of two atomics: boolean AND of their base codes."""
    code_a, code_b = encode_atomic(a, ctx), encode_atomic(b, ctx)
    bits = tuple(
        Bit.ONE if x is Bit.ONE and y is Bit.ONE else Bit.ZERO
        for x, y in zip(code_a.bits, code_b.bits)
    )
    return BitCode(bits, (), exact=True)


# --- property suite --------------------------------------------------------


@dataclass(frozen=True)
class PropertyRow:
    name: str
    trials: int
    violations: int
    first_witness: str = ""


@dataclass(frozen=True)
class PropertyReport:
    rows: tuple[PropertyRow, ...]

    @property
    def total_violations(self) -> int:
        return sum(r.violations for r in self.rows)

    def to_tsv(self) -> str:
        lines = ["property\ttrials\tviolations\tfirst_witness"]
        for r in self.rows:
            lines.append(f"{r.name}\t{r.trials}\t{r.violations}\t{r.first_witness}")
        return "\n".join(lines) + "\n"


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.trials = 0
        self.violations = 0
        self.first_witness = ""

    def check(self, ok: bool, witness: str) -> None:
        self.trials += 1
        if not ok:
            self.violations += 1
            if not self.first_witness:
                self.first_witness = witness

    def row(self) -> PropertyRow:
        return PropertyRow(self.name, self.trials, self.violations, self.first_witness)


def check_properties(
    tbox: dl.TBox,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    seed: int = 42,
    trials: int = 1000,
) -> PropertyReport:
    """Randomized trials of the similarity-measure properties.

    Positiveness, reflexivity, maximality, symmetry, closure/invariance (at
    code-identity level), and the two subsumption-preservation laws run
    against the given terminology; the structural-dependency trend and strict
    monotonicity run on synthesized scenario terminologies, since they
    constrain the hierarchy's shape.
    """
    from .encoding import build_context

    rng = random.Random(seed)
    ctx = build_context(tbox)

    positiveness = _Tally("positiveness")
    reflexivity = _Tally("reflexivity")
    maximality = _Tally("maximality")
    symmetry = _Tally("symmetry")
    closure = _Tally("equivalence_closure")
    invariance = _Tally("equivalence_invariance")
    structural = _Tally("structural_dependency")
    subsumption = _Tally("subsumption_preservation")
    reverse = _Tally("reverse_subsumption_preservation")
    monotonicity = _Tally("strict_monotonicity")

    def witness(*codes: BitCode) -> str:
        return " / ".join(serialize(c) for c in codes)

    for _ in range(trials):
        e1 = generators.random_expr(rng, tbox, depth=3)
        e2 = generators.random_expr(rng, tbox, depth=3)
        c1, c2 = encode(e1, ctx), encode(e2, ctx)
        try:
            fwd = sigma_hat(c1, c2, cfg)
        except UndefinedSimilarity:
            continue
        rev = sigma_hat(c2, c1, cfg)
        positiveness.check(fwd.fraction >= 0, witness(c1, c2))
        maximality.check(fwd.fraction <= 1, witness(c1, c2))
        symmetry.check(fwd.fraction == rev.fraction, witness(c1, c2))
        refl = sigma_hat(c1, c1, cfg)
        reflexivity.check(refl.fraction == 1, witness(c1))
        if not _has_compounds(c1) and not _has_compounds(c2):
            same = serialize(c1) == serialize(c2)
            closure.check((fwd.fraction == 1) == same, witness(c1, c2))

    # equivalent rewrites give identical codes, hence invariant scores
    for _ in range(max(1, trials // 4)):
        e1 = generators.random_expr(rng, tbox, depth=2)
        e2 = generators.random_expr(rng, tbox, depth=2)
        probe = generators.random_expr(rng, tbox, depth=2)
        pairs = (
            (dl.And(e1, e2), dl.And(e2, e1)),
            (dl.Not(dl.Not(e1)), e1),
            (dl.Or(e1, e1), e1),
            (dl.Not(dl.And(e1, e2)), dl.Or(dl.Not(e1), dl.Not(e2))),
        )
        cp = encode(probe, ctx)
        for left, right in pairs:
            cl, cr = encode(left, ctx), encode(right, ctx)
            closure_ok = serialize(cl) == serialize(cr)
            closure.check(closure_ok, witness(cl, cr))
            try:
                si = sigma_hat(cl, cp, cfg)
                sj = sigma_hat(cr, cp, cfg)
            except UndefinedSimilarity:
                continue
            invariance.check(si.fraction == sj.fraction, witness(cl, cr, cp))

    # subsumption preservation over every hierarchy chain i <= j <= k
    names = tbox.atomic_concepts
    ancestors = {n: tbox.concept_ancestors(n) for n in names}
    for ci in names:
        for cj in ancestors[ci]:
            for ck in ancestors[cj]:
                a, bj, bk = (
                    encode_atomic(ci, ctx),
                    encode_atomic(cj, ctx),
                    encode_atomic(ck, ctx),
                )
                s_ij = sigma_hat(a, bj, cfg).fraction
                s_ik = sigma_hat(a, bk, cfg).fraction
                s_jk = sigma_hat(bj, bk, cfg).fraction
                subsumption.check(s_ij >= s_ik, f"{ci}<={cj}<={ck}")
                reverse.check(s_jk >= s_ik, f"{ci}<={cj}<={ck}")

    # structural dependency: shared-conjunct chains on a synthesized flat TBox
    chain_n = 16
    chain_tb = generators.chain_tbox(chain_n)
    chain_ctx = build_context(chain_tb)
    prev = None
    final = None
    for n in range(1, chain_n + 1):
        ei, ej = generators.chain_pair(n)
        s = sigma_hat(encode(ei, chain_ctx), encode(ej, chain_ctx), cfg).fraction
        if prev is not None:
            structural.check(s >= prev, f"n={n}")
        prev = s
        final = s
    structural.check(final is not None and final >= Fraction(9, 10), f"final={final}")

    # strict monotonicity on constructed two-vs-one shared-subsumer scenarios
    for _ in range(max(1, trials // 20)):
        tb, ci, cj, ck = generators.monotonicity_scenario(
            rng,
            extra_common=rng.randrange(0, 3),
            extra_shared=rng.randrange(0, 3),
            padding=rng.randrange(0, 4),
        )
        sctx = build_context(tb)
        s_ij = sigma_hat(encode_atomic(ci, sctx), encode_atomic(cj, sctx), cfg).fraction
        s_ik = sigma_hat(encode_atomic(ci, sctx), encode_atomic(ck, sctx), cfg).fraction
        monotonicity.check(s_ij > s_ik, f"{s_ij} !> {s_ik}")

    return PropertyReport(
        (
            positiveness.row(),
            reflexivity.row(),
            maximality.row(),
            symmetry.row(),
            closure.row(),
            invariance.row(),
            structural.row(),
            subsumption.row(),
            reverse.row(),
            monotonicity.row(),
        )
    )
