"""Node embeddings for attributed networks from layer-switching random walks
over a structure layer and one or more content layers."""

import os

# the bundled TBB is too old for numba; the workqueue layer avoids the probe warning
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from sac2vec.graph import AliasTable, LayerGraph, build_alias, build_layer, sample_neighbor
from sac2vec.rng import RandomStream
from sac2vec.content import (
    ContentMatrix,
    KnnParams,
    build_content_layer,
    compute_avg_s,
    cosine_similarity,
    knn_index_query,
)
from sac2vec.multiplex import (
    MultiplexGraph,
    assemble,
    gamma_size,
    inter_weight,
    switch_distribution,
)
from sac2vec.walker import WalkCorpus, WalkParams, generate_corpus, node2vec_step
from sac2vec.embedder import (
    EmbeddingMatrix,
    SgnsParams,
    combine_append,
    combine_convex,
    train_sgns,
)

__version__ = "0.1.0"

__all__ = [
    "AliasTable", "LayerGraph", "build_alias", "build_layer", "sample_neighbor", "RandomStream",
    "ContentMatrix", "KnnParams", "build_content_layer", "compute_avg_s", "cosine_similarity", "knn_index_query",
    "MultiplexGraph", "assemble", "gamma_size", "inter_weight", "switch_distribution",
    "WalkCorpus", "WalkParams", "generate_corpus", "node2vec_step",
    "EmbeddingMatrix", "SgnsParams", "combine_append", "combine_convex", "train_sgns",
]
