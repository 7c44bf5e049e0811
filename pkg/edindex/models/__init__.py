"""
Models for the edit-distance index

All of the index structures are kept in this package
"""

from .persistent_base import (
    BinaryReader,
    BinaryWriter,
    CapacityError,
    CorruptIndexError,
    DataValidationError,
    HashSeedError,
    PatternTooLongError,
)
from .probes import ProbeCounter
from .text_core import TextCorpus, IndexCore, RangePair, SuffixTree, build_index_core, build_suffix_tree
from .poly_hash import EditDescriptor, EditKind, HashParams, find_injective_seed
from .weak_prefix import FactorSet, PrefixSum, WeakPrefixIndex, build_factor_set
from .engine_small import Occurrence, QueryContext, SmallEngine, check_occurrence, query_one_error_small
from .colors import ColorReporter, RangeMinQuery, report_distinct_colors
from .centroid_engine import (
    CentroidDecomposition,
    CentroidEngine,
    CorrectionKind,
    CorrectionTree,
    PathTraversal,
    build_correction_trees,
    decompose_centroid,
    query_one_error_large,
    traverse_pattern,
)
from .oracle import edit_distance, edit_distance_at_most_one, oracle_query
from .container import EngineFlags, IndexContainer
