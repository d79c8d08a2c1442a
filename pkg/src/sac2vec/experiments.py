"""Reusable experiment drivers shared by the acceptance suite and scripts/."""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from sac2vec.embedder import SgnsParams
from sac2vec.evaluate import clustering_accuracy, kmeans_pp
from sac2vec.graph import layer_from_csr
from sac2vec.multiplex import assemble
from sac2vec.pipeline import embed_layers, synthetic_layers
from sac2vec.synth import SyntheticSpec, planted_partition
from sac2vec.walker import WalkParams, generate_corpus


@dataclass(frozen=True)
class TrendConfig:
    """Clustering-accuracy comparison of modes on planted-partition data.

    Training is deliberately light so five seeds fit in a couple of minutes.
    """

    n: int = 1000
    communities: int = 4
    mixing_ratio: float = 0.8
    informativeness: float = 0.8
    avg_degree: float = 10.0
    vocab: int = 400
    seeds: tuple = (0, 1, 2, 3, 4)
    modes: tuple = ("sac2vec", "structure-only", "content-only")
    walk: WalkParams = field(default_factory=lambda: WalkParams(walks_per_node=10, walk_length=40))
    sgns: SgnsParams = field(default_factory=lambda: SgnsParams(dim=64, window=5, epochs=1))
    kmeans_restarts: int = 10


def run_trend(cfg):
    """Returns {mode: [accuracy per seed]} plus the mean structure-layer switch probability."""
    acc = {m: [] for m in cfg.modes}
    p_structure = []
    for seed in cfg.seeds:
        data = planted_partition(SyntheticSpec(cfg.n, cfg.communities, cfg.mixing_ratio, cfg.avg_degree, cfg.vocab,
                                               cfg.informativeness, seed=seed))
        layers, _ = synthetic_layers(data)
        p_structure.append(float(assemble(layers).switch_probs[:, 0].mean()))
        for mode in cfg.modes:
            emb = embed_layers(layers, mode, replace(cfg.walk, seed=seed), replace(cfg.sgns, seed=seed))
            km = kmeans_pp(emb.input_vectors, cfg.communities, seed=seed, n_init=cfg.kmeans_restarts)
            acc[mode].append(clustering_accuracy(km.labels, data.labels))
    return acc, float(np.mean(p_structure))


def random_layer(n, out_degree, seed, directed=True):
    """Layer with ``out_degree`` distinct random targets per node and U(0.1, 1) weights."""
    rng = np.random.default_rng(seed)
    targets = np.empty((n, out_degree), dtype=np.int64)
    for i in range(n):
        t = rng.choice(n - 1, size=out_degree, replace=False)
        targets[i] = np.sort(t + (t >= i))
    indptr = np.arange(0, n * out_degree + 1, out_degree, dtype=np.int64)
    weights = rng.uniform(0.1, 1.0, n * out_degree)
    return layer_from_csr(n, indptr, targets.ravel(), weights, directed, n * out_degree)


def time_walks(n, out_degree, params, repeats=3, seed=0):
    """Mean wall time of corpus generation on a random two-layer graph, after one warm-up run."""
    mpx = assemble([random_layer(n, out_degree, seed), random_layer(n, out_degree, seed + 1)])
    generate_corpus(mpx, params)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        generate_corpus(mpx, params)
        times.append(time.perf_counter() - t0)
    return float(np.mean(times))
