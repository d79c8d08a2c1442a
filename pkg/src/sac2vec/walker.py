"""Layer-switching node2vec walks over a multiplex graph."""

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from sac2vec.graph import alias_draw
from sac2vec.multiplex import assemble
from sac2vec.rng import derive_seed, next_double

MODES = ("sac2vec", "single-layer")


@dataclass(frozen=True)
class WalkParams:
    walks_per_node: int = 10
    walk_length: int = 80
    return_param: float = 1.0
    inout_param: float = 1.0
    mode: str = "sac2vec"
    start_layer_rule: str = "structure-first"
    seed: int = 42
    threads: int = 1

    def __post_init__(self):
        if self.walks_per_node < 1 or self.walk_length < 1:
            raise ValueError("walks_per_node and walk_length must be >= 1")
        if not (self.return_param > 0 and self.inout_param > 0):
            raise ValueError("p and q must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.start_layer_rule != "structure-first":
            raise ValueError("only the structure-first start rule is supported")


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Walks stored flat: walk j is ``tokens[offsets[j]:offsets[j+1]]``.

    ``layers`` (optional) records, per step, the layer the step was taken in;
    ``layers[offsets[j] - j + s]`` belongs to step s of walk j.
    """

    tokens: np.ndarray
    offsets: np.ndarray
    node_count: int
    layers: np.ndarray = None

    def __len__(self):
        return self.offsets.shape[0] - 1

    def walk(self, j):
        return self.tokens[self.offsets[j]:self.offsets[j + 1]]

    @property
    def walks(self):
        return [self.walk(j).tolist() for j in range(len(self))]

    def to_text(self):
        return "".join(" ".join(map(str, self.walk(j).tolist())) + "\n" for j in range(len(self)))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_walks(cls, walks, node_count):
        lens = [len(w) for w in walks]
        offsets = np.zeros(len(walks) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        tokens = np.array([x for w in walks for x in w], dtype=np.int32)
        if tokens.size and (tokens.min() < 0 or tokens.max() >= node_count):
            raise ValueError("walk contains a node id out of range")
        return cls(tokens, offsets, int(node_count))

    @classmethod
    def load(cls, path, node_count=None):
        with open(path, encoding="utf-8") as fh:
            walks = [[int(x) for x in line.split()] for line in fh if line.strip()]
        if node_count is None:
            node_count = max((max(w) for w in walks), default=-1) + 1
        return cls.from_walks(walks, node_count)


@njit(cache=True)
def _has_arc(indptr, indices, src, dst):
    lo = indptr[src]
    hi = indptr[src + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        v = indices[mid]
        if v == dst:
            return True
        if v < dst:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def _step(indptr, indices, weights, aprob, aidx, cur, prev, inv_p, inv_q, biased, state):
    # indptr is one layer's row of global offsets
    lo = indptr[cur]
    deg = indptr[cur + 1] - lo
    if deg == 0:
        return -1
    if biased and prev >= 0 and _has_arc(indptr, indices, prev, cur):
        total = 0.0
        for e in range(lo, lo + deg):
            x = indices[e]
            if x == prev:
                total += weights[e] * inv_p
            elif _has_arc(indptr, indices, prev, x):
                total += weights[e]
            else:
                total += weights[e] * inv_q
        u = next_double(state) * total
        acc = 0.0
        for e in range(lo, lo + deg):
            x = indices[e]
            if x == prev:
                acc += weights[e] * inv_p
            elif _has_arc(indptr, indices, prev, x):
                acc += weights[e]
            else:
                acc += weights[e] * inv_q
            if u < acc:
                return x
        return indices[lo + deg - 1]
    return indices[lo + alias_draw(aprob, aidx, lo, deg, state)]


@njit(cache=True)
def _walk(indptr, indices, weights, aprob, aidx, probs, start, length, inv_p, inv_q, biased,
          state, out, layer_out, tried):
    T = indptr.shape[0]
    out[0] = start
    cur = start
    prev = -1
    n_out = 1
    for s in range(length):
        t = T - 1
        if T > 1:
            u = next_double(state)
            acc = 0.0
            for c in range(T):
                acc += probs[cur, c]
                if u < acc:
                    t = c
                    break
        nxt = _step(indptr[t], indices, weights, aprob, aidx, cur, prev, inv_p, inv_q, biased, state)
        if nxt < 0 and T > 1:
            # dead end: try remaining layers by descending switch probability, ties by index
            for c in range(T):
                tried[c] = False
            tried[t] = True
            for _ in range(T - 1):
                best = -1
                for c in range(T):
                    if not tried[c] and (best < 0 or probs[cur, c] > probs[cur, best]):
                        best = c
                tried[best] = True
                nxt = _step(indptr[best], indices, weights, aprob, aidx, cur, prev, inv_p, inv_q, biased, state)
                if nxt >= 0:
                    t = best
                    break
        if nxt < 0:
            break
        out[n_out] = nxt
        layer_out[s] = t
        n_out += 1
        prev = cur
        cur = nxt
    return n_out


@njit(cache=True, parallel=True)
def _corpus_kernel(indptr, indices, weights, aprob, aidx, probs, rounds, length, inv_p, inv_q,
                   biased, seed, record):
    T = indptr.shape[0]
    n = probs.shape[0]
    total = rounds * n
    buf = np.full((total, length + 1), -1, dtype=np.int32)
    lbuf = np.full((total if record else 1, length), -1, dtype=np.int8)
    lens = np.zeros(total, dtype=np.int64)
    for j in prange(total):
        r = j // n
        v = j - r * n
        state = np.empty(1, dtype=np.uint64)
        state[0] = derive_seed(seed, r, v)
        tried = np.zeros(T, dtype=np.bool_)
        if record:
            lens[j] = _walk(indptr, indices, weights, aprob, aidx, probs, v, length, inv_p, inv_q, biased,
                            state, buf[j], lbuf[j], tried)
        else:
            lens[j] = _walk(indptr, indices, weights, aprob, aidx, probs, v, length, inv_p, inv_q, biased,
                            state, buf[j], np.empty(length, dtype=np.int8), tried)
    return buf, lbuf, lens


def _flatten(buf, lens):
    offsets = np.zeros(lens.size + 1, dtype=np.int64)
    np.cumsum(lens, out=offsets[1:])
    mask = np.arange(buf.shape[1])[None, :] < lens[:, None]
    return buf[mask], offsets


def generate_corpus(multiplex, params, record_layers=False):
    """``walks_per_node`` rounds over all start nodes; corpus ordered by (round, node).

    In single-layer mode only the first layer of ``multiplex`` is walked.
    """
    if params.mode == "single-layer" and multiplex.layer_count > 1:
        multiplex = assemble(multiplex.layers[:1])
    pk = multiplex.packed
    biased = not (params.return_param == 1.0 and params.inout_param == 1.0)
    if params.threads and params.threads > 0:
        numba.set_num_threads(min(params.threads, numba.config.NUMBA_NUM_THREADS))
    buf, lbuf, lens = _corpus_kernel(
        pk["indptr"], pk["indices"], pk["weights"], pk["alias_prob"], pk["alias_idx"],
        np.ascontiguousarray(multiplex.switch_probs), int(params.walks_per_node), int(params.walk_length),
        1.0 / params.return_param, 1.0 / params.inout_param, biased, np.uint64(params.seed), record_layers)
    tokens, offsets = _flatten(buf, lens)
    layers = None
    if record_layers:
        steps = np.maximum(lens - 1, 0)
        mask = np.arange(lbuf.shape[1])[None, :] < steps[:, None]
        layers = lbuf[mask]
    return WalkCorpus(tokens, offsets, multiplex.node_count, layers)


def node2vec_step(layer, current, previous, params, rng):
    """One second-order step inside ``layer``; None when ``current`` has no out-arcs.

    Without a previous node, or when previous -> current is not an arc of this
    layer, the p/q bias is dropped and the step is plain weighted sampling.
    """
    if not 0 <= current < layer.node_count:
        raise IndexError(f"node {current} out of range")
    biased = not (params.return_param == 1.0 and params.inout_param == 1.0)
    prev = -1 if previous is None else int(previous)
    nxt = _step(layer.indptr, layer.indices, layer.weights, layer.alias_prob, layer.alias_idx, int(current),
                prev, 1.0 / params.return_param, 1.0 / params.inout_param, biased, rng.state)
    return None if nxt < 0 else int(nxt)
