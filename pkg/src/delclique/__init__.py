"""Deletion-correcting binary codes from maximum cliques of LCS-compatibility graphs."""

from .channel import ChannelModel, SimReport, exhaustive_check, simulate, transmit
from .clique import (
    PenaltyState,
    PgcsParams,
    SolveReport,
    bron_kerbosch_max,
    is_clique,
    pgcs,
    pgcs_multi,
)
from .codebook import (
    Codebook,
    encode,
    from_clique,
    load,
    save,
    verify_balls,
    verify_lcs,
    vt_codebook,
)
from .decoder import DecodeOutcome, decode, decode_unfiltered, filter_candidates
from .graph import (
    CompatGraph,
    build_graph,
    common_neighbors,
    degree_histogram,
    export_dimacs,
    has_edge,
    import_dimacs,
)
from .seqcore import (
    BitSeq,
    SymbolCounts,
    deletion_ball,
    delete_at,
    indel_distance,
    is_subsequence,
    lcs_distance_equal,
    lcs_len,
    symbol_counts,
)

__version__ = "0.1.0"
