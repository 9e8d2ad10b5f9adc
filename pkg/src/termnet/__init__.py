"""Glossary-based similarity networks for document corpora.

Pipeline: glossary + corpus -> document-term matrix -> permutation-filtered
cosine network -> clustering / assortativity / communities / rich-club ->
figure-ready reports.
"""

from .corpus import Corpus, Document, ingest, normalize
from .errors import ValidationError
from .glossary import (
    Glossary,
    Locution,
    RawEntry,
    build_glossary,
    generate_variants,
    load_source,
    merge_glossaries,
)
from .graph import WeightedGraph, density, largest_component
from .netmetrics import (
    CcdfCurve,
    NullEnsemble,
    assortativity_categorical,
    assortativity_scalar,
    clustering_null,
    global_clustering,
    local_weighted_clustering,
    node_stats,
)
from .community import (
    Partition,
    adjusted_rand_index,
    ari_matrix,
    greedy_modularity,
    label_propagation,
    louvain,
    modularity,
)
from .richclub import (
    CoreMembership,
    RichClubCurve,
    core_periphery_split,
    detect_regime,
    normalized_curve,
    phi,
)
from .report import content_timeseries, group_terms, period_label
from .simnet import (
    PValueMatrix,
    SimilarityMatrix,
    bonferroni_threshold,
    cosine,
    filter_network,
    permutation_pvalues,
    similarity_matrix,
)
from .termmatrix import DocTermMatrix, build_matrix, count_occurrences, economic_content

__version__ = "0.1.0"
