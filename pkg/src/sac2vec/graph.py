"""Immutable weighted layer graphs in CSR form with per-node alias tables."""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from sac2vec.rng import next_below, next_double


class GraphInputError(ValueError):
    """Malformed edge list or content input."""


@njit(cache=True)
def _alias_segment(weights, lo, hi, prob, alias, small, large):
    # Vose's method on weights[lo:hi]; alias holds slot indices local to the segment.
    m = hi - lo
    total = 0.0
    for i in range(lo, hi):
        total += weights[i]
    ns = 0
    nl = 0
    for i in range(m):
        prob[lo + i] = weights[lo + i] * m / total
        alias[lo + i] = i
        if prob[lo + i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        alias[lo + s] = g
        prob[lo + g] = (prob[lo + g] + prob[lo + s]) - 1.0
        if prob[lo + g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    # leftovers are numerically 1
    while nl > 0:
        nl -= 1
        prob[lo + large[nl]] = 1.0
    while ns > 0:
        ns -= 1
        prob[lo + small[ns]] = 1.0


@njit(cache=True)
def build_alias_csr(indptr, weights):
    """Alias tables for every CSR row at once."""
    m = weights.shape[0]
    prob = np.empty(m, dtype=np.float64)
    alias = np.empty(m, dtype=np.int64)
    maxdeg = 0
    for i in range(indptr.shape[0] - 1):
        maxdeg = max(maxdeg, indptr[i + 1] - indptr[i])
    small = np.empty(maxdeg, dtype=np.int64)
    large = np.empty(maxdeg, dtype=np.int64)
    for i in range(indptr.shape[0] - 1):
        if indptr[i + 1] > indptr[i]:
            _alias_segment(weights, indptr[i], indptr[i + 1], prob, alias, small, large)
    return prob, alias


@njit(cache=True)
def alias_draw(prob, alias, lo, m, state):
    """Draw a local slot in [0, m) from the table stored at prob[lo:lo+m]."""
    slot = next_below(state, m)
    if next_double(state) < prob[lo + slot]:
        return slot
    return alias[lo + slot]


@dataclass(frozen=True)
class AliasTable:
    probabilities: np.ndarray
    aliases: np.ndarray

    def __len__(self):
        return len(self.probabilities)

    def sample(self, rng):
        """Draw one slot index using a :class:`~sac2vec.rng.RandomStream`."""
        return int(alias_draw(self.probabilities, self.aliases, 0, len(self), rng.state))

    def induced_distribution(self):
        """The exact distribution the table samples from."""
        m = len(self)
        dist = self.probabilities.astype(np.float64).copy()
        np.add.at(dist, self.aliases, 1.0 - self.probabilities)
        return dist / m


def build_alias(weights):
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("alias table needs a non-empty 1-d weight list")
    if not np.all(w > 0) or not np.all(np.isfinite(w)):
        raise ValueError("alias weights must be finite and positive")
    prob, alias = build_alias_csr(np.array([0, w.size], dtype=np.int64), w)
    return AliasTable(prob, alias)


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """One layer: sorted CSR adjacency plus alias tables aligned with it.

    ``input_edge_count`` is the number of edges as given (an undirected edge
    counts once even though it is stored as two arcs).
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    directed: bool
    input_edge_count: int
    mean_edge_weight: float
    alias_prob: np.ndarray
    alias_idx: np.ndarray

    @property
    def total_edge_count(self):
        return int(self.indices.shape[0])

    def out_degree(self, node=None):
        deg = np.diff(self.indptr)
        return deg if node is None else int(deg[node])

    def out_edges(self, node):
        lo, hi = self.indptr[node], self.indptr[node + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def has_arc(self, src, dst):
        targets, _ = self.out_edges(src)
        k = np.searchsorted(targets, dst)
        return bool(k < targets.size and targets[k] == dst)

    def arcs(self):
        """All arcs as (src, dst, weight) arrays."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degree())
        return src, self.indices, self.weights

    def same_as(self, other):
        return (
            self.node_count == other.node_count
            and self.directed == other.directed
            and self.input_edge_count == other.input_edge_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )


def layer_from_csr(node_count, indptr, indices, weights, directed, input_edge_count):
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    m = indices.shape[0]
    mean = math.fsum(weights.tolist()) / m if m else 0.0
    prob, alias = build_alias_csr(indptr, weights)
    for arr in (indptr, indices, weights, prob, alias):
        arr.setflags(write=False)
    return LayerGraph(int(node_count), indptr, indices, weights, bool(directed), int(input_edge_count),
                      mean, prob, alias)


def build_layer(edges, node_count, directed=False):
    """Build a layer from (src, dst[, weight]) triples.

    Undirected edges are stored as two arcs of equal weight. An exact repeat of
    a (src, dst) pair is an error; in undirected mode the reverse pair (v, u)
    after (u, v) names the same edge and is accepted only if the weights agree.
    """
    edges = list(edges)
    n = int(node_count)
    if n < 0:
        raise GraphInputError("node_count must be non-negative")
    if edges:
        arr = np.array([(e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in edges], dtype=np.float64)
        src = arr[:, 0]
        dst = arr[:, 1]
        w = arr[:, 2]
        if np.any(src != np.floor(src)) or np.any(dst != np.floor(dst)):
            raise GraphInputError("node ids must be integers")
        src = src.astype(np.int64)
        dst = dst.astype(np.int64)
    else:
        src = dst = np.empty(0, dtype=np.int64)
        w = np.empty(0, dtype=np.float64)
    return _build_from_arrays(src, dst, w, n, directed)


def _build_from_arrays(src, dst, w, n, directed, line_numbers=None):
    def where(i):
        return line_numbers[i] if line_numbers is not None else f"edge {i}"

    bad = np.flatnonzero((src < 0) | (src >= n) | (dst < 0) | (dst >= n))
    if bad.size:
        i = bad[0]
        raise GraphInputError(f"{where(i)}: node id out of range [0, {n}): ({src[i]}, {dst[i]})")
    bad = np.flatnonzero(~(w > 0) | ~np.isfinite(w))
    if bad.size:
        raise GraphInputError(f"{where(bad[0])}: weight must be positive and finite, got {w[bad[0]]}")

    key = src * n + dst
    order = np.argsort(key, kind="stable")
    dup = np.flatnonzero(key[order][1:] == key[order][:-1])
    if dup.size:
        i = order[dup[0] + 1]
        raise GraphInputError(f"{where(i)}: duplicate edge ({src[i]}, {dst[i]})")

    input_edges = src.size
    if not directed:
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        ukey = lo * n + hi
        order = np.argsort(ukey, kind="stable")
        sk = ukey[order]
        same = np.flatnonzero(sk[1:] == sk[:-1])
        if same.size:
            first, second = order[same], order[same + 1]
            clash = np.flatnonzero(w[first] != w[second])
            if clash.size:
                i = second[clash[0]]
                raise GraphInputError(f"{where(i)}: reverse edge ({src[i]}, {dst[i]}) has a different weight")
            keep = np.ones(src.size, dtype=bool)
            keep[second] = False
            src, dst, w = src[keep], dst[keep], w[keep]
        input_edges = src.size
        loops = src == dst
        src, dst, w = (np.concatenate([src, dst[~loops]]), np.concatenate([dst, src[~loops]]),
                       np.concatenate([w, w[~loops]]))

    order = np.lexsort((dst, src))
    src, dst, w = src[order], dst[order], w[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return layer_from_csr(n, indptr, dst, w, directed, input_edges)


def read_edge_list(path, node_count=None, directed=False):
    """Parse ``src dst [weight]`` lines; ``#`` lines and blank lines are skipped."""
    src, dst, w, lines = [], [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                raise GraphInputError(f"{path}:{lineno}: expected 'src dst [weight]'")
            try:
                a, b = int(parts[0]), int(parts[1])
                wt = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphInputError(f"{path}:{lineno}: cannot parse {s!r}") from None
            src.append(a)
            dst.append(b)
            w.append(wt)
            lines.append(lineno)
    src = np.array(src, dtype=np.int64)
    dst = np.array(dst, dtype=np.int64)
    if node_count is None:
        node_count = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
    return _build_from_arrays(src, dst, np.array(w, dtype=np.float64), int(node_count), directed,
                              line_numbers=[f"{path}:{ln}" for ln in lines])


def write_edge_list(layer, path):
    src, dst, w = layer.arcs()
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, x in zip(src.tolist(), dst.tolist(), w.tolist()):
            if layer.directed or a <= b:
                fh.write(f"{a} {b} {x!r}\n")


def sample_neighbor(layer, node, rng):
    """Weighted draw of a successor of ``node``; None for a node with no out-arcs."""
    if not 0 <= node < layer.node_count:
        raise IndexError(f"node {node} out of range")
    lo, hi = int(layer.indptr[node]), int(layer.indptr[node + 1])
    if hi == lo:
        return None
    slot = alias_draw(layer.alias_prob, layer.alias_idx, lo, hi - lo, rng.state)
    return int(layer.indices[lo + slot])
