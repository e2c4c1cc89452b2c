"""Elder-rule staircodes of augmented metric spaces.

Compute the decorated staircode of a finite metric space with a real filter,
query fibered barcodes and treegrams along positive-slope lines, and read off
graded Betti numbers and the dimension function of the degree-zero Rips
bifiltration persistence module.
"""

from .betti import (
    FeatureFunction,
    GradedBetti,
    check_constant_conqueror,
    check_ultrametric,
    decomposability_necessary_test,
    dimension_function,
    feature_functions,
    graded_betti,
)
from .core import (
    INF,
    AugmentedMetricSpace,
    Bar,
    DecoratedStaircase,
    GenericOrdering,
    Grade,
    LineQuery,
    Staircase,
    Staircode,
    staircase_corners,
)
from .mst import Mst, mst_insert, mst_insert_euclidean
from .oracle import (
    GradeGrid,
    grid_components,
    oracle_betti,
    oracle_line_barcode,
    oracle_staircode,
)
from .query import (
    FiberedQueryIndex,
    QueryIndexConfig,
    build_index,
    query_barcode,
    query_treegram,
)
from .staircode import compute_staircode, compute_staircode_ordered, prefix_treegram
from .treegram import (
    DecoratedTreegram,
    MergeEvent,
    Treegram,
    build_treegram,
    decorate,
    elder_rule_barcode,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AugmentedMetricSpace",
    "Bar",
    "DecoratedStaircase",
    "DecoratedTreegram",
    "FeatureFunction",
    "FiberedQueryIndex",
    "GenericOrdering",
    "Grade",
    "GradeGrid",
    "GradedBetti",
    "LineQuery",
    "MergeEvent",
    "Mst",
    "QueryIndexConfig",
    "Staircase",
    "Staircode",
    "Treegram",
    "build_index",
    "build_treegram",
    "check_constant_conqueror",
    "check_ultrametric",
    "compute_staircode",
    "compute_staircode_ordered",
    "decomposability_necessary_test",
    "decorate",
    "dimension_function",
    "elder_rule_barcode",
    "feature_functions",
    "graded_betti",
    "grid_components",
    "mst_insert",
    "mst_insert_euclidean",
    "oracle_betti",
    "oracle_line_barcode",
    "oracle_staircode",
    "prefix_treegram",
    "query_barcode",
    "query_treegram",
    "staircase_corners",
]
