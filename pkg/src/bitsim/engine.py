"""Chunked, cached, parallel similarity execution.

Plain bit vectors are split into aligned fixed-size chunks; each chunk pair
reduces to an integer partial sum (per-position scores are dyadic rationals,
so they scale to exact integers), evaluated through a packed lookup table and
memoized in a bounded LRU cache keyed by the chunk contents.  Partial sums
merge in chunk-index order and the single division happens at the end over
exact rationals, so chunked results equal the unchunked aggregate bit for bit
under any chunk size, cache state, or parallel schedule.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ALL_BITS, Bit, hasse_distance
from .encoding import BitCode, ContextMismatch, is_bot_code, is_top_code, project
from .similarity import (
    DEFAULT_CONFIG,
    IGNORED,
    PositionEntry,
    SimilarityConfig,
    SimilarityReport,
    UndefinedSimilarity,
    _apply_penalty,
    _extreme_report,
    _plain_entries,
    _segment_entries,
    sigma_bit,
)

# Largest distance the bit score ever uses (extreme pairs never score by distance).
SCALE_LOG = max(
    hasse_distance(a, b)
    for a in ALL_BITS
    for b in ALL_BITS
    if a is not b and Bit.TOP not in (a, b) and Bit.BOT not in (a, b)
)
SCALE = 1 << SCALE_LOG

_IGNORED_UNIT = 1 << 20
_UNDEF_UNIT = 1 << 40


def _packed_table() -> np.ndarray:
    table = np.zeros((11, 11), dtype=np.int64)
    for a in ALL_BITS:
        for b in ALL_BITS:
            s = sigma_bit(a, b)
            if s is IGNORED:
                table[a.value, b.value] = _IGNORED_UNIT
            elif isinstance(s, Fraction):
                scaled = s * SCALE
                assert scaled.denominator == 1
                table[a.value, b.value] = int(scaled)
            else:  # UNDEFINED
                table[a.value, b.value] = _UNDEF_UNIT
    return table


PACKED = _packed_table()


def code_to_array(code: BitCode) -> np.ndarray:
    bits = code.plain_bits()
    if bits is None:
        raise ContextMismatch("only plain codes convert to arrays")
    return np.frombuffer(bytes(b.value for b in bits), dtype=np.uint8)


@dataclass(frozen=True)
class PartialSum:
    """Chunk contribution; merging is associative and commutative."""

    score_num: int
    weight: int
    ignored: int
    undefined: bool

    def merge(self, other: "PartialSum") -> "PartialSum":
        return PartialSum(
            self.score_num + other.score_num,
            self.weight + other.weight,
            self.ignored + other.ignored,
            self.undefined or other.undefined,
        )


EMPTY_PARTIAL = PartialSum(0, 0, 0, False)


class ChunkCache:
    """Bounded LRU over symmetric chunk-content keys; thread-safe.

    Values are packed chunk sums (score, ignored count, undefined count in
    disjoint bit ranges), so hits and misses carry identical arithmetic and
    eviction can only affect timing.
    """

    def __init__(self, maxsize: int = 1 << 16):
        self.maxsize = maxsize
        self._data: OrderedDict[tuple[bytes, bytes], int] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(slice_a: bytes, slice_b: bytes) -> tuple[bytes, bytes]:
        return (slice_a, slice_b) if slice_a <= slice_b else (slice_b, slice_a)

    def get(self, key: tuple[bytes, bytes]) -> int | None:
        with self._lock:
            value = self._data.get(key)
            if value is None:
                self.misses += 1
                return None
            self._data.move_to_end(key)
            self.hits += 1
            return value

    def put(self, key: tuple[bytes, bytes], value: int) -> None:
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def stats(self) -> tuple[int, int, int]:
        """(entries, hits, misses); hits + misses = lookups."""
        with self._lock:
            return (len(self._data), self.hits, self.misses)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self.hits = 0
            self.misses = 0


def _unpack(packed: int, chunk_len: int) -> PartialSum:
    score = packed & (_IGNORED_UNIT - 1)
    ignored = (packed >> 20) & ((1 << 20) - 1)
    undefined = packed >= _UNDEF_UNIT
    return PartialSum(score, chunk_len - ignored, ignored, undefined)


def _eval_chunk_packed(arr_a: np.ndarray, arr_b: np.ndarray) -> int:
    return int(PACKED[arr_a, arr_b].sum())


def _plain_partial(
    arr_a: np.ndarray,
    arr_b: np.ndarray,
    chunk_size: int,
    cache: ChunkCache | None,
) -> tuple[PartialSum, int]:
    """Chunk, evaluate (cache first), merge in chunk-index order."""
    total = EMPTY_PARTIAL
    hits_before = cache.hits if cache is not None else 0
    for start in range(0, len(arr_a), chunk_size):
        slice_a = arr_a[start : start + chunk_size]
        slice_b = arr_b[start : start + chunk_size]
        if cache is not None:
            key = ChunkCache.key(slice_a.tobytes(), slice_b.tobytes())
            packed = cache.get(key)
            if packed is None:
                packed = _eval_chunk_packed(slice_a, slice_b)
                cache.put(key, packed)
        else:
            packed = _eval_chunk_packed(slice_a, slice_b)
        total = total.merge(_unpack(packed, len(slice_a)))
    hits = (cache.hits - hits_before) if cache is not None else 0
    return total, hits


def sim_chunked(
    a: BitCode,
    b: BitCode,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    cache: ChunkCache | None = None,
    detail: bool = True,
) -> SimilarityReport:
    """Chunked evaluation; equals ``sigma_hat`` on the same inputs exactly.

    Segments and compound positions are evaluated unchunked and merged as one
    extra partial.  With ``detail`` off the per-position entries are skipped
    (the score is unaffected), which is what the all-pairs driver uses.
    """
    if a.width != b.width:
        raise ContextMismatch(f"code widths differ: {a.width} != {b.width}")
    if is_top_code(a) or is_top_code(b) or is_bot_code(a) or is_bot_code(b):
        return _extreme_report(a, b, cfg)
    pa, pb = project(a), project(b)
    bits_a, bits_b = pa.plain_bits(), pb.plain_bits()
    assert bits_a is not None and bits_b is not None
    arr_a, arr_b = code_to_array(pa), code_to_array(pb)
    partial, hits = _plain_partial(arr_a, arr_b, cfg.chunk_size, cache)
    if partial.undefined:
        raise UndefinedSimilarity("undefined bit pair inside a chunk")
    total = Fraction(partial.score_num, SCALE)
    weight = partial.weight
    ignored = partial.ignored
    seg_entries, seg_total, seg_weight = _segment_entries(pa.segments, pb.segments, cfg)
    total += seg_total
    weight += seg_weight
    entries: tuple[PositionEntry, ...] = ()
    if detail:
        plain_entries, _, _, _ = _plain_entries(bits_a, bits_b)
        entries = tuple(plain_entries + seg_entries)
    base = Fraction(1) if weight == 0 else total / weight
    final, ratio, fcg_pair = _apply_penalty(base, a, b, cfg)
    return SimilarityReport(final, base, ratio, entries, ignored, fcg_pair, hits)


class _Prepared:
    """Per-code precomputation for the all-pairs fast path."""

    __slots__ = ("code", "fast", "array", "chunk_bytes")

    def __init__(self, code: BitCode, chunk_size: int, penalty: bool):
        self.code = code
        bits = code.plain_bits()
        self.fast = (
            bits is not None
            and not code.segments
            and not penalty
            and not is_top_code(code)
            and not is_bot_code(code)
        )
        if self.fast:
            self.array = code_to_array(code)
            self.chunk_bytes = [
                self.array[start : start + chunk_size].tobytes()
                for start in range(0, len(self.array), chunk_size)
            ]
        else:
            self.array = None
            self.chunk_bytes = []


def _row_scores(
    pi: "_Prepared",
    others: list["_Prepared"],
    stacked: np.ndarray,
    chunk_sizes: list[int],
    cache: ChunkCache | None,
) -> list[float]:
    """Fast-path scores of one code against a stacked block of codes.

    The whole block is evaluated in one table gather; the per-chunk packed
    sums then go through the cache (hits override the computed value, misses
    are stored), preserving lookup accounting and exact results.
    """
    n_chunks = len(chunk_sizes)
    gathered = PACKED[np.repeat(pi.array[None, :], len(others), axis=0), stacked]
    # sum per aligned chunk, in chunk-index order
    splits = np.split(gathered, np.cumsum(chunk_sizes)[:-1], axis=1)
    chunk_sums = np.stack([part.sum(axis=1) for part in splits], axis=1)
    scores: list[float] = []
    for row, pj in enumerate(others):
        score = 0
        weight = 0
        undefined = False
        for c in range(n_chunks):
            packed = int(chunk_sums[row, c])
            if cache is not None:
                key = ChunkCache.key(pi.chunk_bytes[c], pj.chunk_bytes[c])
                cached = cache.get(key)
                if cached is None:
                    cache.put(key, packed)
                else:
                    packed = cached
            part = _unpack(packed, chunk_sizes[c])
            score += part.score_num
            weight += part.weight
            undefined = undefined or part.undefined
        if undefined:
            raise UndefinedSimilarity("undefined bit pair inside a chunk")
        scores.append(1.0 if weight == 0 else float(Fraction(score, SCALE * weight)))
    return scores


def all_pairs(
    codes: list[BitCode],
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    cache: ChunkCache | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Symmetric similarity matrix with a unit diagonal.

    Rows of the upper triangle are evaluated in parallel; every cell is an
    exact rational converted once, so the output is deterministic under any
    schedule.  Plain segment-free codes take a batched chunk path that
    produces the same exact rationals as ``sim_chunked``.
    """
    if len({c.width for c in codes}) > 1:
        raise ContextMismatch("mixed contexts in all_pairs")
    n = len(codes)
    matrix = np.ones((n, n), dtype=np.float64)
    prepared = [_Prepared(c, cfg.chunk_size, cfg.generativity_penalty) for c in codes]
    if n > 1:
        width = codes[0].width
        chunk_sizes = [
            min(cfg.chunk_size, width - start)
            for start in range(0, width, cfg.chunk_size)
        ]
        stacked_all = (
            np.stack([p.array for p in prepared if p.fast])
            if any(p.fast for p in prepared)
            else None
        )
        fast_index = {}
        k = 0
        for idx, p in enumerate(prepared):
            if p.fast:
                fast_index[idx] = k
                k += 1

    def fill_row(i: int) -> list[tuple[int, float]]:
        row: list[tuple[int, float]] = []
        pi = prepared[i]
        fast_js = [j for j in range(i + 1, n) if pi.fast and prepared[j].fast]
        slow_js = [j for j in range(i + 1, n) if j not in set(fast_js)]
        if fast_js:
            block = stacked_all[[fast_index[j] for j in fast_js]]
            scores = _row_scores(
                pi, [prepared[j] for j in fast_js], block, chunk_sizes, cache
            )
            row.extend(zip(fast_js, scores))
        for j in slow_js:
            report = sim_chunked(codes[i], codes[j], cfg, cache, detail=False)
            row.append((j, report.score))
        return row

    if n > 1:
        # two workers: more CPU-bound python threads convoy on the GIL
        with ThreadPoolExecutor(max_workers=workers or 2) as pool:
            for i, row in zip(range(n), pool.map(fill_row, range(n))):
                for j, value in row:
                    matrix[i, j] = value
                    matrix[j, i] = value
    return matrix
