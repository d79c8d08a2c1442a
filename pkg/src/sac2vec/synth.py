"""Planted-partition networks with community-correlated bag-of-words content."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator settings.

    mixing_ratio: expected inter-community / intra-community edge count.
    informativeness: fraction of each node's tokens drawn from its community's
    own vocabulary block; the rest are uniform over the whole vocabulary.
    """

    n: int = 1000
    communities: int = 4
    mixing_ratio: float = 0.2
    avg_degree: float = 10.0
    dim: int = 400
    informativeness: float = 0.8
    tokens_per_node: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.communities < 2:
            raise ValueError("need at least two communities")
        if self.n < self.communities:
            raise ValueError("need at least one node per community")
        if not 0.0 <= self.informativeness <= 1.0:
            raise ValueError("informativeness must lie in [0, 1]")
        if self.mixing_ratio < 0 or self.avg_degree <= 0:
            raise ValueError("mixing_ratio must be >= 0 and avg_degree > 0")
        if self.dim < self.communities:
            raise ValueError("dim must be at least the number of communities")


@dataclass(frozen=True)
class SyntheticDataset:
    edges: np.ndarray       # (m, 2) undirected, u < v
    counts: sp.csr_matrix   # raw term counts
    labels: np.ndarray

    def write(self, edges_path, content_path, labels_path):
        with open(edges_path, "w", encoding="utf-8") as fh:
            fh.writelines(f"{u} {v}\n" for u, v in self.edges.tolist())
        coo = self.counts.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(content_path, "w", encoding="utf-8") as fh:
            fh.writelines(f"{i} {t} {int(c)}\n" for i, t, c in
                          zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()))
        with open(labels_path, "w", encoding="utf-8") as fh:
            fh.writelines(f"{i} c{c}\n" for i, c in enumerate(self.labels.tolist()))


def _sample_pairs(rng, count, draw):
    """Draw ``count`` distinct pair keys from ``draw(size)``, topping up after dedupe."""
    keys = np.empty(0, dtype=np.int64)
    while keys.size < count:
        keys = np.unique(np.concatenate([keys, draw(2 * (count - keys.size) + 16)]))
    return rng.permutation(keys)[:count]


def planted_partition(spec):
    rng = np.random.default_rng(spec.seed)
    n, L = spec.n, spec.communities
    labels = np.arange(n) % L
    labels = rng.permutation(labels)
    members = [np.flatnonzero(labels == c) for c in range(L)]

    m_total = spec.avg_degree * n / 2.0
    m_intra = m_total / (1.0 + spec.mixing_ratio)
    m_inter = m_total - m_intra
    intra_pairs = sum(len(g) * (len(g) - 1) // 2 for g in members)
    inter_pairs = n * (n - 1) // 2 - intra_pairs
    n_intra = min(rng.binomial(intra_pairs, min(1.0, m_intra / intra_pairs)), intra_pairs)
    n_inter = min(rng.binomial(inter_pairs, min(1.0, m_inter / inter_pairs)), inter_pairs) if spec.mixing_ratio > 0 else 0

    sizes = np.array([len(g) for g in members])
    flat = np.concatenate(members).astype(np.int64)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])

    def draw_intra(size):
        c = rng.choice(L, size=size, p=sizes * (sizes - 1) / (sizes * (sizes - 1)).sum())
        a = rng.integers(0, sizes[c])
        b = rng.integers(0, sizes[c] - 1)
        b = b + (b >= a)
        u = flat[starts[c] + a]
        v = flat[starts[c] + b]
        return np.minimum(u, v) * n + np.maximum(u, v)

    def draw_inter(size):
        u = rng.integers(0, n, size=size)
        v = rng.integers(0, n, size=size)
        ok = labels[u] != labels[v]
        u, v = u[ok], v[ok]
        return np.minimum(u, v) * n + np.maximum(u, v)

    keys = np.concatenate([_sample_pairs(rng, n_intra, draw_intra), _sample_pairs(rng, n_inter, draw_inter)])
    keys.sort()
    edges = np.stack([keys // n, keys % n], axis=1)

    block = spec.dim // L
    rows, cols = [], []
    for i in range(n):
        own = rng.random(spec.tokens_per_node) < spec.informativeness
        c = labels[i]
        t_own = c * block + rng.integers(0, block, size=own.sum())
        t_rand = rng.integers(0, spec.dim, size=(~own).sum())
        toks = np.concatenate([t_own, t_rand])
        rows.append(np.full(toks.size, i))
        cols.append(toks)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    counts = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, spec.dim))
    counts.sum_duplicates()
    return SyntheticDataset(edges, counts, labels)
