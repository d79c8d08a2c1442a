"""Content layer: top-k cosine neighbours of per-node feature vectors."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from sac2vec.graph import GraphInputError, layer_from_csr

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContentMatrix:
    """Sparse n x d feature matrix; ``unit`` holds the L2-normalised rows."""

    rows: sp.csr_matrix
    row_norms: np.ndarray
    unit: sp.csr_matrix

    @property
    def node_count(self):
        return self.rows.shape[0]

    @property
    def dim(self):
        return self.rows.shape[1]

    @classmethod
    def from_matrix(cls, matrix):
        rows = sp.csr_matrix(matrix, dtype=np.float64)
        rows.sum_duplicates()
        rows.sort_indices()
        if not np.all(np.isfinite(rows.data)):
            raise GraphInputError("content values must be finite")
        norms = np.sqrt(np.asarray(rows.multiply(rows).sum(axis=1)).ravel())
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        unit = sp.csr_matrix(sp.diags(scale) @ rows)
        unit.eliminate_zeros()
        unit.sort_indices()
        return cls(rows, norms, unit)

    def similarity(self, i, j):
        return float((self.unit[i] @ self.unit[j].T)[0, 0])


def tfidf(counts):
    """tf(i,t) * ln(n / df(t)) on a raw count matrix."""
    counts = sp.csr_matrix(counts, dtype=np.float64)
    n = counts.shape[0]
    df = np.bincount(counts.indices[counts.data != 0], minlength=counts.shape[1])
    idf = np.log(n / np.maximum(df, 1))
    return counts @ sp.diags(idf)


def cosine_similarity(a, b):
    """dot(a, b) / (|a| |b|), or 0 when either vector is zero."""
    a = sp.csr_matrix(a, dtype=np.float64) if sp.issparse(a) else sp.csr_matrix(np.atleast_2d(np.asarray(a, dtype=np.float64)))
    b = sp.csr_matrix(b, dtype=np.float64) if sp.issparse(b) else sp.csr_matrix(np.atleast_2d(np.asarray(b, dtype=np.float64)))
    if a.shape != b.shape or a.shape[0] != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = math.sqrt(float(a.multiply(a).sum()))
    nb = math.sqrt(float(b.multiply(b).sum()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a.multiply(b).sum()) / (na * nb)


@dataclass(frozen=True)
class KnnParams:
    theta: int
    avg_out_degree: float

    def __post_init__(self):
        if int(self.theta) != self.theta or self.theta < 1:
            raise ValueError("theta must be a positive integer")

    @property
    def k(self):
        return max(1, int(self.theta) * math.ceil(self.avg_out_degree))


def compute_avg_s(structure, directed_input=None):
    """Average out-degree of the structure layer: |E|/n, or 2|E|/n if undirected."""
    if structure.node_count <= 0:
        raise ValueError("structure layer has no nodes")
    directed = structure.directed if directed_input is None else directed_input
    e = structure.input_edge_count
    return (e if directed else 2 * e) / structure.node_count


def _rank(candidates, sims, k):
    keep = sims > 0
    candidates, sims = candidates[keep], sims[keep]
    order = np.lexsort((candidates, -sims))[:k]
    return candidates[order], sims[order]


def _brute_rows(content, rows, k):
    unit = content.unit
    block = (unit[rows] @ unit.T).toarray()
    out = []
    for r, node in enumerate(rows):
        s = block[r]
        s[node] = 0.0
        cand = np.flatnonzero(s > 0)
        out.append(_rank(cand, s[cand], k))
    return out


class _TreeIndex:
    """Exact kNN through Euclidean distances of unit rows (|x-y|^2 = 2 - 2cos).

    The tree only proposes candidates; final scores are recomputed with the
    same sparse dot products the brute-force path uses.
    """

    def __init__(self, content):
        self.content = content
        self.live = np.flatnonzero(content.row_norms > 0)
        self.tree = cKDTree(content.unit[self.live].toarray()) if self.live.size else None

    def query(self, node, k):
        c = self.content
        if self.tree is None or c.row_norms[node] == 0:
            return np.empty(0, dtype=np.int64), np.empty(0)
        x = c.unit[node].toarray().ravel()
        kk = min(k + 1, self.live.size)
        dist, _ = self.tree.query(x, k=kk)
        dist = np.atleast_1d(dist)
        radius = min(float(dist[-1]), math.sqrt(2.0)) + 1e-7
        cand = self.live[np.asarray(self.tree.query_ball_point(x, r=radius), dtype=np.int64)]
        cand = cand[cand != node]
        # row-times-matrix accumulates in the same order as the brute-force block product
        sims = (c.unit[node] @ c.unit[cand].T).toarray().ravel()
        return _rank(cand, sims, k)


def knn_index_query(content, node, k, backend="brute"):
    """Top-k (node, similarity) pairs for ``node``, similarity descending, ties by id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if backend == "brute":
        ids, sims = _brute_rows(content, [node], k)[0]
    elif backend == "tree":
        ids, sims = _TreeIndex(content).query(node, k)
    else:
        raise ValueError(f"unknown kNN backend {backend!r}")
    return list(zip(ids.tolist(), sims.tolist()))


def build_content_layer(content, params, backend="brute", block_size=512):
    """Directed layer keeping each node's top-k positive cosine neighbours."""
    n = content.node_count
    k = params.k if isinstance(params, KnnParams) else int(params)
    if np.all(content.row_norms == 0):
        log.warning("content matrix is all zeros; content layer has no arcs")
    per_node = []
    if backend == "brute":
        for lo in range(0, n, block_size):
            per_node.extend(_brute_rows(content, list(range(lo, min(n, lo + block_size))), k))
    elif backend == "tree":
        index = _TreeIndex(content)
        per_node = [index.query(i, k) for i in range(n)]
    else:
        raise ValueError(f"unknown kNN backend {backend!r}")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([ids.size for ids, _ in per_node], out=indptr[1:])
    indices = np.concatenate([np.sort(ids) for ids, _ in per_node]) if n else np.empty(0, np.int64)
    weights = np.concatenate([s[np.argsort(ids)] for ids, s in per_node]) if n else np.empty(0)
    return layer_from_csr(n, indptr, indices.astype(np.int64), weights, True, indices.size)


def read_content_triplets(path, node_count=None, dim=None):
    """``node term value`` lines; ``#`` lines are skipped."""
    nodes, terms, vals = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 3:
                raise GraphInputError(f"{path}:{lineno}: expected 'node term value'")
            try:
                a, t, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise GraphInputError(f"{path}:{lineno}: cannot parse {s!r}") from None
            if a < 0 or t < 0 or not math.isfinite(v):
                raise GraphInputError(f"{path}:{lineno}: negative id or non-finite value")
            if node_count is not None and a >= node_count:
                raise GraphInputError(f"{path}:{lineno}: node {a} out of range [0, {node_count})")
            nodes.append(a)
            terms.append(t)
            vals.append(v)
    n = node_count if node_count is not None else max(nodes, default=-1) + 1
    d = dim if dim is not None else max(terms, default=-1) + 1
    return sp.csr_matrix((vals, (nodes, terms)), shape=(n, d))


def read_content_csv(path, node_count=None):
    """Dense CSV with header ``node,f0,...,f{d-1}``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "node":
            raise GraphInputError(f"{path}:1: header must start with 'node'")
        d = len(header) - 1
        ids, rows = [], []
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != d + 1:
                raise GraphInputError(f"{path}:{lineno}: expected {d + 1} columns, got {len(parts)}")
            try:
                ids.append(int(parts[0]))
                rows.append([float(x) for x in parts[1:]])
            except ValueError:
                raise GraphInputError(f"{path}:{lineno}: cannot parse row") from None
    n = node_count if node_count is not None else max(ids, default=-1) + 1
    dense = np.zeros((n, d))
    for i, r in zip(ids, rows):
        if not 0 <= i < n:
            raise GraphInputError(f"{path}: node {i} out of range [0, {n})")
        dense[i] = r
    return sp.csr_matrix(dense)


def write_content_triplets(matrix, path):
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for i, t, v in zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()):
            fh.write(f"{i} {t} {v!r}\n")


def load_content(path, node_count, fmt="triplet", raw_counts=False):
    if fmt == "triplet":
        m = read_content_triplets(path, node_count)
    elif fmt == "csv":
        m = read_content_csv(path, node_count)
    else:
        raise ValueError(f"unknown content format {fmt!r}")
    return ContentMatrix.from_matrix(tfidf(m) if raw_counts else m)
