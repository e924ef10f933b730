"""Chunked execution: exact equality with the plain aggregate, cache
transparency, matrix shape, partial-sum algebra."""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitsim import dl
from bitsim.algebra import ALL_BITS, Bit
from bitsim.encoding import BitCode, build_context, encode
from bitsim.engine import (
    PACKED,
    SCALE,
    ChunkCache,
    PartialSum,
    all_pairs,
    sim_chunked,
)
from bitsim.generators import random_expr
from bitsim.similarity import (
    IGNORED,
    UNDEFINED,
    SimilarityConfig,
    UndefinedSimilarity,
    sigma_bit,
    sigma_hat,
)


def enc(text, ctx):
    return encode(dl.parse_expr(text), ctx)


def test_packed_table_matches_sigma_bit():
    for a in ALL_BITS:
        for b in ALL_BITS:
            packed = int(PACKED[a.value, b.value])
            s = sigma_bit(a, b)
            if s is IGNORED:
                assert packed == 1 << 20
            elif s is UNDEFINED:
                assert packed == 1 << 40
            else:
                assert Fraction(packed, SCALE) == s


def test_chunked_equals_unchunked_diamond(diamond_ctx):
    b, c = enc("B", diamond_ctx), enc("C", diamond_ctx)
    cache = ChunkCache()
    for size in (1, 2, 3, 8, 64):
        cfg = SimilarityConfig(chunk_size=size)
        assert sim_chunked(b, c, cfg, cache).fraction == sigma_hat(b, c, cfg).fraction
    assert sim_chunked(b, c, SimilarityConfig(chunk_size=2), cache).fraction == Fraction(2, 3)


def test_chunked_equals_unchunked_random(diamond_ctx):
    rng = random.Random(8)
    cache = ChunkCache()
    for _ in range(100):
        c1 = encode(random_expr(rng, diamond_ctx.tbox, 3, roles=True), diamond_ctx)
        c2 = encode(random_expr(rng, diamond_ctx.tbox, 3, roles=True), diamond_ctx)
        for size in (1, 2, 3, 8, 64):
            cfg = SimilarityConfig(chunk_size=size)
            try:
                chunked = sim_chunked(c1, c2, cfg, cache)
            except UndefinedSimilarity:
                with pytest.raises(UndefinedSimilarity):
                    sigma_hat(c1, c2, cfg)
                continue
            reference = sigma_hat(c1, c2, cfg)
            assert chunked.fraction == reference.fraction
            assert chunked.score == reference.score


def test_cache_determinism_and_hits(diamond_ctx):
    b, c = enc("B", diamond_ctx), enc("C", diamond_ctx)
    cache = ChunkCache()
    cfg = SimilarityConfig(chunk_size=2)
    first = sim_chunked(b, c, cfg, cache)
    second = sim_chunked(b, c, cfg, cache)
    assert first.fraction == second.fraction
    assert second.cache_hits > 0


def test_cache_transparency(diamond_ctx):
    rng = random.Random(19)
    cfg = SimilarityConfig(chunk_size=2)
    cache = ChunkCache()
    for _ in range(40):
        c1 = encode(random_expr(rng, diamond_ctx.tbox, 3), diamond_ctx)
        c2 = encode(random_expr(rng, diamond_ctx.tbox, 3), diamond_ctx)
        try:
            with_cache = sim_chunked(c1, c2, cfg, cache)
        except UndefinedSimilarity:
            with pytest.raises(UndefinedSimilarity):
                sim_chunked(c1, c2, cfg, None)
            continue
        without = sim_chunked(c1, c2, cfg, None)
        assert with_cache.fraction == without.fraction


def test_cache_stats_lifecycle():
    cache = ChunkCache()
    assert cache.stats() == (0, 0, 0)
    key = ChunkCache.key(b"ab", b"ba")
    assert cache.get(key) is None
    cache.put(key, 42)
    assert cache.get(key) == 42
    entries, hits, misses = cache.stats()
    assert (entries, hits, misses) == (1, 1, 1)
    assert hits + misses == 2  # lookups
    cache.clear()
    assert cache.stats() == (0, 0, 0)


def test_cache_key_symmetric():
    assert ChunkCache.key(b"zz", b"aa") == ChunkCache.key(b"aa", b"zz")


def test_cache_respects_bound():
    cache = ChunkCache(maxsize=4)
    for i in range(10):
        cache.put((bytes([i]), bytes([i])), i)
    assert cache.stats()[0] <= 4


def test_partial_sum_merge_example():
    a = PartialSum(3, 2, 1, False)
    b = PartialSum(5, 4, 0, True)
    merged = a.merge(b)
    assert merged == PartialSum(8, 6, 1, True)


partials = st.builds(
    PartialSum,
    st.integers(min_value=0, max_value=1 << 20),
    st.integers(min_value=0, max_value=1 << 10),
    st.integers(min_value=0, max_value=1 << 10),
    st.booleans(),
)


@given(partials, partials, partials)
@settings(max_examples=100)
def test_partial_sum_merge_associative_commutative(x, y, z):
    assert x.merge(y) == y.merge(x)
    assert x.merge(y).merge(z) == x.merge(y.merge(z))


def test_all_pairs_diamond(diamond_ctx):
    codes = [enc(n, diamond_ctx) for n in "ABCD"]
    matrix = all_pairs(codes, SimilarityConfig(chunk_size=2), ChunkCache())
    assert matrix.shape == (4, 4)
    assert np.array_equal(matrix, matrix.T)
    assert np.all(np.diag(matrix) == 1.0)
    assert matrix[3][1] == 0.75  # D vs B


def test_all_pairs_single_code(diamond_ctx):
    matrix = all_pairs([enc("A", diamond_ctx)])
    assert matrix.shape == (1, 1)
    assert matrix[0][0] == 1.0


def test_all_pairs_matches_sigma_hat(diamond_ctx):
    rng = random.Random(4)
    codes = [
        encode(random_expr(rng, diamond_ctx.tbox, 2, roles=True), diamond_ctx)
        for _ in range(12)
    ]
    codes = [c for c in codes if not _undefined_against_everything(c, diamond_ctx)]
    cfg = SimilarityConfig(chunk_size=3)
    matrix = all_pairs(codes, cfg, ChunkCache())
    for i in range(len(codes)):
        for j in range(i + 1, len(codes)):
            assert matrix[i][j] == sigma_hat(codes[i], codes[j], cfg).score


def _undefined_against_everything(code, ctx):
    from bitsim.encoding import is_bot_code, is_top_code

    return is_top_code(code) or is_bot_code(code)


def test_all_pairs_deterministic_across_workers(diamond_ctx):
    rng = random.Random(14)
    codes = [
        encode(random_expr(rng, diamond_ctx.tbox, 2), diamond_ctx) for _ in range(10)
    ]
    cfg = SimilarityConfig(chunk_size=2)
    m1 = all_pairs(codes, cfg, ChunkCache(), workers=1)
    m2 = all_pairs(codes, cfg, ChunkCache(), workers=3)
    m3 = all_pairs(codes, cfg, None)
    assert np.array_equal(m1, m2)
    assert np.array_equal(m1, m3)


def test_all_pairs_cache_hits_on_duplicates():
    ctx = build_context(dl.parse_tbox("\n".join(f"concept Z{i}" for i in range(8))))
    base = [encode(dl.Atomic(f"Z{i}"), ctx) for i in range(8)]
    codes = base + base  # duplicates guarantee repeated chunk keys
    cache = ChunkCache()
    all_pairs(codes, SimilarityConfig(chunk_size=4), cache)
    assert cache.stats()[1] > 0


def test_all_pairs_mixed_widths_rejected(diamond_ctx):
    other = build_context(dl.parse_tbox("concept A"))
    with pytest.raises(Exception, match="mixed"):
        all_pairs([enc("A", diamond_ctx), encode(dl.Atomic("A"), other)])
