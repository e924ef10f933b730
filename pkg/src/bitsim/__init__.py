"""Algebraic bit-codes and BitSim similarity for ALCH+ concept definitions."""

from .algebra import (
    Bit,
    QuantifierBit,
    hasse_distance,
    join,
    leq,
    meet,
    neg,
    verify_tables,
)
from .dl import TBox, parse_expr, parse_tbox, to_text
from .encoding import (
    BitCode,
    CompoundCode,
    EncodingContext,
    Segment,
    build_context,
    combine,
    deserialize,
    encode,
    encode_atomic,
    encode_role,
    neg_code,
    normalize,
    serialize,
)
from .engine import ChunkCache, PartialSum, all_pairs, sim_chunked
from .oracle import (
    Interpretation,
    Refuted,
    cross_check,
    extension,
    fcg_oracle,
    oracle_jaccard,
    oracle_subsumes,
)
from .similarity import (
    IGNORED,
    UNDEFINED,
    UNKNOWN,
    SimilarityConfig,
    SimilarityReport,
    UndefinedSimilarity,
    bitsim_jaccard,
    check_properties,
    fcg,
    lcs_atomic,
    sigma_bit,
    sigma_hat,
    subsumes,
)

__all__ = [
    "Bit",
    "QuantifierBit",
    "hasse_distance",
    "join",
    "leq",
    "meet",
    "neg",
    "verify_tables",
    "TBox",
    "parse_expr",
    "parse_tbox",
    "to_text",
    "BitCode",
    "CompoundCode",
    "EncodingContext",
    "Segment",
    "build_context",
    "combine",
    "deserialize",
    "encode",
    "encode_atomic",
    "encode_role",
    "neg_code",
    "normalize",
    "serialize",
    "ChunkCache",
    "PartialSum",
    "all_pairs",
    "sim_chunked",
    "Interpretation",
    "Refuted",
    "cross_check",
    "extension",
    "fcg_oracle",
    "oracle_jaccard",
    "oracle_subsumes",
    "IGNORED",
    "UNDEFINED",
    "UNKNOWN",
    "SimilarityConfig",
    "SimilarityReport",
    "UndefinedSimilarity",
    "bitsim_jaccard",
    "check_properties",
    "fcg",
    "lcs_atomic",
    "sigma_bit",
    "sigma_hat",
    "subsumes",
]

__version__ = "0.1.0"
