"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
pass.  Tolerances are exact comparisons throughout: scores are rationals and
codes are strings, so no numeric slack is needed anywhere.
"""

import random
import time
from fractions import Fraction

import numpy as np

from bitsim import dl
from bitsim.algebra import verify_tables
from bitsim.encoding import build_context, encode, encode_atomic, serialize
from bitsim.engine import ChunkCache, all_pairs, sim_chunked
from bitsim.generators import (
    chain_pair,
    chain_tbox,
    monotonicity_scenario,
    random_expr,
    random_tbox,
)
from bitsim.oracle import cross_check, fcg_oracle
from bitsim.similarity import (
    SimilarityConfig,
    UndefinedSimilarity,
    fcg,
    sigma_hat,
)


def _report(name: str) -> None:
    print(f"PASS {name}")


def test_criterion_1_algebra_constraints():
    started = time.perf_counter()
    checks = verify_tables()
    elapsed = time.perf_counter() - started
    failures = [c for c in checks if not c.ok]
    assert failures == [], f"algebra constraints failed: {failures}"
    expected = {
        "J1: X = 1 join 0",
        "J2: X' = X'' join 0",
        "J3: t = Y join Y'",
        "M1: Y' = 1 meet 0",
        "M2: Y = X'' meet 0",
        "M3: f = X meet X'",
        "neg 0 = 0",
        "neg 1 = X''",
        "X = neg Y",
        "X' = neg Y'",
        "t = neg f",
        "T = neg F",
        "join commutative",
        "meet commutative",
        "join idempotent",
        "meet idempotent",
        "double negation",
        "De Morgan meet",
        "De Morgan join",
        "b meet neg(b) != F for all 11 bits",
    }
    assert expected <= {c.name for c in checks}
    assert elapsed < 1.0, f"verification took {elapsed:.3f}s"
    _report(f"criterion 1: algebra constraints ({len(checks)} checks, {elapsed:.3f}s)")


def test_criterion_2_code_generativity():
    started = time.perf_counter()
    tbox = dl.parse_tbox("concept P1\nconcept P2\nconcept P3\nP2 sub P1\nP3 sub P1")
    ctx = build_context(tbox)
    compound = encode(dl.parse_expr("or(P2,P3)"), ctx)
    assert serialize(compound) == "(U:011|101)"
    assert fcg(compound) == 3

    rng = random.Random(20260809)
    checked = 0
    while checked < 200:
        width = rng.randrange(1, 13)
        tb = random_tbox(rng, width, edge_prob=rng.uniform(0.1, 0.5))
        cx = build_context(tb)
        code = encode(random_expr(rng, tb, depth=rng.randrange(1, 4)), cx)
        got = fcg(code)
        want = fcg_oracle(code)
        assert got == want, f"fcg mismatch on {serialize(code)}: {got} != {want}"
        checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 30, f"generativity check took {elapsed:.1f}s"
    _report(f"criterion 2: code generativity (worked example + {checked} codes, {elapsed:.1f}s)")


def test_criterion_3_correspondence():
    started = time.perf_counter()
    rng = random.Random(31415)
    disagreements = 0
    unknowns = 0
    agreements = 0
    for _ in range(50):
        n = rng.randrange(2, 13)
        tbox = random_tbox(rng, n, edge_prob=rng.uniform(0.1, 0.5))
        report = cross_check(tbox, trials=500, seed=rng.randrange(10**9))
        disagreements += report.disagreements
        unknowns += report.unknowns
        agreements += report.agreements
        assert report.disagreements == 0, report.to_tsv()
    elapsed = time.perf_counter() - started
    assert elapsed < 300, f"correspondence took {elapsed:.1f}s"
    _report(
        "criterion 3: correspondence "
        f"(50 TBoxes, {agreements} agreements, {unknowns} unknowns, "
        f"0 disagreements, {elapsed:.1f}s)"
    )


def test_criterion_4_similarity_properties():
    started = time.perf_counter()
    rng = random.Random(27182)
    for _ in range(20):
        tbox = random_tbox(rng, rng.randrange(2, 10), edge_prob=rng.uniform(0.1, 0.5))
        ctx = build_context(tbox)
        best = Fraction(0)
        for _ in range(1000):
            e1 = random_expr(rng, tbox, depth=3)
            e2 = random_expr(rng, tbox, depth=3)
            c1, c2 = encode(e1, ctx), encode(e2, ctx)
            try:
                fwd = sigma_hat(c1, c2)
            except UndefinedSimilarity:
                continue
            rev = sigma_hat(c2, c1)
            assert fwd.fraction >= 0, "positiveness violated"
            assert fwd.fraction == rev.fraction, "symmetry violated"
            assert sigma_hat(c1, c1).fraction == 1, "reflexivity violated"
            best = max(best, fwd.fraction)
        assert best <= 1, "maximality violated"
        # subsumption preservation over every hierarchy chain i <= j <= k
        for ci in tbox.atomic_concepts:
            for cj in tbox.concept_ancestors(ci):
                for ck in tbox.concept_ancestors(cj):
                    a = encode_atomic(ci, ctx)
                    bj = encode_atomic(cj, ctx)
                    bk = encode_atomic(ck, ctx)
                    assert (
                        sigma_hat(a, bj).fraction >= sigma_hat(a, bk).fraction
                    ), f"subsumption preservation violated on {ci}<={cj}<={ck}"
                    assert (
                        sigma_hat(bj, bk).fraction >= sigma_hat(a, bk).fraction
                    ), f"reverse preservation violated on {ci}<={cj}<={ck}"
    elapsed = time.perf_counter() - started
    _report(
        "criterion 4: similarity properties "
        f"(20 TBoxes x 1000 trials, all chains, 0 violations, {elapsed:.1f}s)"
    )


def test_criterion_5_structural_dependency():
    tbox = chain_tbox(16)
    ctx = build_context(tbox)
    values = []
    for n in range(1, 17):
        ei, ej = chain_pair(n)
        values.append(sigma_hat(encode(ei, ctx), encode(ej, ctx)).fraction)
    for prev, cur in zip(values, values[1:]):
        assert cur >= prev, f"sequence decreased: {values}"
    assert values[-1] >= Fraction(9, 10), f"final value {values[-1]} < 0.9"
    _report(
        "criterion 5: structural dependency "
        f"(n=1..16 non-decreasing, final {float(values[-1]):.4f} >= 0.9)"
    )


def test_criterion_6_strict_monotonicity():
    rng = random.Random(16180)
    instances = 0
    for _ in range(100):
        tbox, ci, cj, ck = monotonicity_scenario(
            rng,
            extra_common=rng.randrange(0, 4),
            extra_shared=rng.randrange(0, 4),
            padding=rng.randrange(0, 5),
        )
        ctx = build_context(tbox)
        s_ij = sigma_hat(encode_atomic(ci, ctx), encode_atomic(cj, ctx)).fraction
        s_ik = sigma_hat(encode_atomic(ci, ctx), encode_atomic(ck, ctx)).fraction
        assert s_ij > s_ik, f"not strict: {s_ij} vs {s_ik}"
        instances += 1
    _report(f"criterion 6: strict monotonicity ({instances} scenario instances)")


def test_criterion_7_rewrite_identities():
    rng = random.Random(14142)
    tboxes = [random_tbox(rng, rng.randrange(2, 8), edge_prob=0.3, n_roles=1)
              for _ in range(5)]
    contexts = [build_context(tb) for tb in tboxes]
    counts = {"commutativity": 0, "double_negation": 0, "idempotence": 0, "de_morgan": 0}
    while min(counts.values()) < 200:
        idx = rng.randrange(len(tboxes))
        tbox, ctx = tboxes[idx], contexts[idx]
        e1 = random_expr(rng, tbox, depth=rng.randrange(1, 4), roles=True)
        e2 = random_expr(rng, tbox, depth=rng.randrange(1, 4), roles=True)

        def same(x, y):
            return serialize(encode(x, ctx)) == serialize(encode(y, ctx))

        assert same(dl.And(e1, e2), dl.And(e2, e1)), "and not commutative"
        assert same(dl.Or(e1, e2), dl.Or(e2, e1)), "or not commutative"
        counts["commutativity"] += 1
        assert same(dl.Not(dl.Not(e1)), e1), "double negation failed"
        counts["double_negation"] += 1
        assert same(dl.And(e1, e1), e1), "and idempotence failed"
        assert same(dl.Or(e1, e1), e1), "or idempotence failed"
        counts["idempotence"] += 1
        assert same(
            dl.Not(dl.And(e1, e2)), dl.Or(dl.Not(e1), dl.Not(e2))
        ), "De Morgan (not-and) failed"
        assert same(
            dl.Not(dl.Or(e1, e2)), dl.And(dl.Not(e1), dl.Not(e2))
        ), "De Morgan (not-or) failed"
        counts["de_morgan"] += 1
    _report(f"criterion 7: rewrite identities (200 instances per family: {counts})")


def test_criterion_8_engine_exactness():
    rng = random.Random(60221)
    tbox = random_tbox(rng, 9, edge_prob=0.35, n_roles=2)
    ctx = build_context(tbox)
    cache = ChunkCache()
    pairs_checked = 0
    while pairs_checked < 500:
        e1 = random_expr(rng, tbox, depth=3, roles=True)
        e2 = random_expr(rng, tbox, depth=3, roles=True)
        c1, c2 = encode(e1, ctx), encode(e2, ctx)
        for size in (1, 2, 3, 8, 64):
            cfg = SimilarityConfig(chunk_size=size)
            try:
                chunked = sim_chunked(c1, c2, cfg, cache)
                chunked_nocache = sim_chunked(c1, c2, cfg, None)
            except UndefinedSimilarity:
                continue
            reference = sigma_hat(c1, c2, cfg)
            assert chunked.fraction == reference.fraction, "chunked != unchunked"
            assert chunked.score == reference.score, "float drift"
            assert chunked_nocache.fraction == chunked.fraction, "cache changed result"
        pairs_checked += 1

    codes = [encode_atomic(n, ctx) for n in tbox.atomic_concepts]
    matrix = all_pairs(codes, SimilarityConfig(chunk_size=3), ChunkCache())
    assert np.array_equal(matrix, matrix.T), "matrix not exactly symmetric"
    assert np.all(np.diag(matrix) == 1.0), "diagonal not exactly 1"
    matrix_nocache = all_pairs(codes, SimilarityConfig(chunk_size=3), None)
    assert np.array_equal(matrix, matrix_nocache), "cache changed all_pairs"
    _report("criterion 8: engine exactness (500 pairs x 5 chunk sizes, matrix checks)")


def test_criterion_9_throughput():
    from bitsim.algebra import Bit
    from bitsim.encoding import BitCode

    rng = random.Random(299792)
    distinct = []
    for _ in range(900):
        bits = tuple(
            Bit.ONE if rng.random() < 0.3 else Bit.ZERO for _ in range(256)
        )
        distinct.append(BitCode(bits))
    codes = distinct + distinct[:100]  # repeated codes exercise the cache
    cache = ChunkCache()
    started = time.perf_counter()
    matrix = all_pairs(codes, SimilarityConfig(chunk_size=64), cache)
    elapsed = time.perf_counter() - started
    entries, hits, misses = cache.stats()
    assert elapsed < 60, f"all_pairs took {elapsed:.1f}s"
    assert hits > 0, "no cache hits despite repeated codes"
    assert np.array_equal(matrix, matrix.T)
    assert np.all(np.diag(matrix) == 1.0)
    _report(
        "criterion 9: throughput "
        f"(1000 codes width 256 in {elapsed:.1f}s < 60s, {hits} cache hits)"
    )
