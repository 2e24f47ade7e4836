"""Heterogeneous packet-type D2D coded caching.

Construction engine, bit-exact simulator, and verification toolkit for
device-to-device coded caching schemes with type-dependent packet sizes.
"""

from .combinatorics import binom, hypergeo_pmf, subsets_by_type, vector_lcm
from .scheme import (
    CountVectors,
    DerivedScheme,
    FsVectors,
    PacketSizing,
    SchemeSpec,
    SystemParams,
    TransmitterSelection,
    TypeLayout,
    UserGrouping,
    aggregate_fs,
    count_vectors,
    derive,
    derive_types,
    integer_packet_sizes,
    intermediate_fs,
    local_fs,
    memory_residuals,
    preset,
    solve_packet_ratio,
)
from .exchange import (
    Cache,
    CodedMessage,
    FileOracle,
    PacketStore,
    build_caches,
    decode,
    generate_delivery,
    split_files,
    total_transmitted_units,
)
from .analysis import RatioRecord, asymptotic_ratio, f_jcm, f_pt, ratio, sweep
from .baseline import compare, jcm_construct, jcm_packet_count
from .verify import (
    VerificationReport,
    verify_claims,
    verify_end_to_end,
    verify_lemma1,
    verify_lemma3,
    verify_odd_t_obstruction,
    verify_remark3,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
