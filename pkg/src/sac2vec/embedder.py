"""Skip-gram with negative sampling over walk corpora, plus the two post-hoc combiners."""

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from sac2vec.graph import alias_draw, build_alias_csr
from sac2vec.rng import derive_seed, next_below

MIN_LR = 1e-4


class EmbeddingInputError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    input_vectors: np.ndarray
    output_vectors: np.ndarray = None

    def __post_init__(self):
        if self.input_vectors.ndim != 2:
            raise EmbeddingInputError("embedding matrix must be 2-d")
        if not np.all(np.isfinite(self.input_vectors)):
            raise EmbeddingInputError("embedding contains non-finite entries")

    @property
    def node_count(self):
        return self.input_vectors.shape[0]

    @property
    def dim(self):
        return self.input_vectors.shape[1]

    def to_text(self):
        lines = [f"{self.node_count} {self.dim}\n"]
        for i, row in enumerate(self.input_vectors.tolist()):
            lines.append(" ".join([str(i)] + [f"{x:.6g}" for x in row]) + "\n")
        return "".join(lines)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise EmbeddingInputError(f"{path}:1: expected 'n K' header")
            n, k = int(header[0]), int(header[1])
            out = np.zeros((n, k))
            seen = np.zeros(n, dtype=bool)
            for lineno, line in enumerate(fh, 2):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != k + 1:
                    raise EmbeddingInputError(f"{path}:{lineno}: expected {k + 1} fields")
                i = int(parts[0])
                if not 0 <= i < n:
                    raise EmbeddingInputError(f"{path}:{lineno}: node {i} out of range")
                out[i] = [float(x) for x in parts[1:]]
                seen[i] = True
        if not seen.all():
            raise EmbeddingInputError(f"{path}: {int((~seen).sum())} nodes missing")
        return cls(out)


@dataclass(frozen=True)
class SgnsParams:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    initial_step_size: float = 0.025
    seed: int = 42
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dim, window, negatives and epochs must be >= 1")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sgns_pair_loss(center, context, negatives):
    """Negative log-likelihood of one (center, context) pair with its negatives.

    ``center`` is the input vector of the center node, ``context`` and the rows
    of ``negatives`` are output vectors.
    """
    pos = np.logaddexp(0.0, -context @ center)
    neg = np.logaddexp(0.0, negatives @ center).sum()
    return pos + neg


def sgns_pair_grad(center, context, negatives):
    """Gradient of :func:`sgns_pair_loss` w.r.t. (center, context, negatives)."""
    gp = _sigmoid(context @ center) - 1.0
    gn = _sigmoid(negatives @ center)
    d_center = gp * context + gn @ negatives
    return d_center, gp * center, gn[:, None] * center[None, :]


@njit(cache=True)
def _sigm(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)


@njit(cache=True, fastmath=True)
def _pair_update(syn0, syn1, c, o, negs, nneg, lr, neu1e):
    dim = syn0.shape[1]
    for d in range(dim):
        neu1e[d] = 0.0
    for k in range(nneg + 1):
        if k == 0:
            target = o
            label = 1.0
        else:
            target = negs[k - 1]
            if target == o:
                continue
            label = 0.0
        f = 0.0
        for d in range(dim):
            f += syn0[c, d] * syn1[target, d]
        g = (label - _sigm(f)) * lr
        for d in range(dim):
            neu1e[d] += g * syn1[target, d]
        for d in range(dim):
            syn1[target, d] += g * syn0[c, d]
    for d in range(dim):
        syn0[c, d] += neu1e[d]


@njit(cache=True)
def _train_range(tokens, offsets, w_lo, w_hi, syn0, syn1, window, nneg, neg_prob, neg_alias, neg_ids,
                 lr0, done0, total_work, state):
    dim = syn0.shape[1]
    neu1e = np.empty(dim)
    negs = np.empty(nneg, dtype=np.int64)
    m = neg_prob.shape[0]
    done = done0
    for wi in range(w_lo, w_hi):
        a = offsets[wi]
        b = offsets[wi + 1]
        for pos in range(a, b):
            lr = lr0 - (lr0 - 1e-4) * (done / total_work)
            if lr < 1e-4:
                lr = 1e-4
            done += 1
            c = tokens[pos]
            span = 1 + next_below(state, window)
            lo = max(a, pos - span)
            hi = min(b, pos + span + 1)
            for j in range(lo, hi):
                if j == pos:
                    continue
                for k in range(nneg):
                    negs[k] = neg_ids[alias_draw(neg_prob, neg_alias, 0, m, state)]
                _pair_update(syn0, syn1, c, tokens[j], negs, nneg, lr, neu1e)
    return done


@njit(cache=True)
def _train_serial(tokens, offsets, syn0, syn1, window, nneg, neg_prob, neg_alias, neg_ids, lr0, epochs, seed):
    nw = offsets.shape[0] - 1
    total_work = float(tokens.shape[0]) * epochs
    done = 0.0
    state = np.empty(1, dtype=np.uint64)
    for ep in range(epochs):
        state[0] = derive_seed(seed, ep, 0)
        done = _train_range(tokens, offsets, 0, nw, syn0, syn1, window, nneg, neg_prob, neg_alias, neg_ids,
                            lr0, done, total_work, state)


@njit(cache=True, parallel=True)
def _train_hogwild(tokens, offsets, syn0, syn1, window, nneg, neg_prob, neg_alias, neg_ids, lr0, epochs, seed,
                   chunks):
    # lock-free concurrent updates; results depend on thread scheduling
    nw = offsets.shape[0] - 1
    total_work = float(tokens.shape[0]) * epochs
    for ep in range(epochs):
        for ch in prange(chunks):
            lo = nw * ch // chunks
            hi = nw * (ch + 1) // chunks
            state = np.empty(1, dtype=np.uint64)
            state[0] = derive_seed(seed, ep, ch + 1)
            done0 = float(tokens.shape[0]) * ep + float(offsets[lo] - offsets[0])
            _train_range(tokens, offsets, lo, hi, syn0, syn1, window, nneg, neg_prob, neg_alias, neg_ids,
                         lr0, done0, total_work, state)


def negative_table(tokens, node_count, power=0.75):
    counts = np.bincount(tokens, minlength=node_count).astype(np.float64)
    ids = np.flatnonzero(counts > 0).astype(np.int64)
    w = counts[ids] ** power
    prob, alias = build_alias_csr(np.array([0, ids.size], dtype=np.int64), w)
    return prob, alias, ids


def init_vectors(node_count, dim, seed):
    rng = np.random.default_rng(seed)
    syn0 = (rng.random((node_count, dim)) - 0.5) / dim
    syn1 = np.zeros((node_count, dim))
    return syn0, syn1


def train_sgns(corpus, params):
    """Train input/output vectors on every (center, context) pair in a dynamic window."""
    tokens = np.ascontiguousarray(corpus.tokens, dtype=np.int64)
    if tokens.size == 0:
        raise EmbeddingInputError("empty corpus")
    n = corpus.node_count
    if tokens.min() < 0 or tokens.max() >= n:
        raise EmbeddingInputError("corpus contains node ids out of range")
    syn0, syn1 = init_vectors(n, params.dim, params.seed)
    prob, alias, ids = negative_table(tokens, n)
    offsets = np.ascontiguousarray(corpus.offsets, dtype=np.int64)
    args = (tokens, offsets, syn0, syn1, int(params.window), int(params.negatives), prob, alias, ids,
            float(params.initial_step_size), int(params.epochs), np.uint64(params.seed))
    if params.threads <= 1:
        _train_serial(*args)
    else:
        numba.set_num_threads(min(params.threads, numba.config.NUMBA_NUM_THREADS))
        _train_hogwild(*args, int(params.threads) * 4)
    return EmbeddingMatrix(syn0, syn1)


def sgns_step(syn0, syn1, center, context, negatives, lr):
    """Apply one in-place SGD update for a single pair (the kernel's inner step)."""
    negs = np.asarray(negatives, dtype=np.int64)
    _pair_update(syn0, syn1, int(center), int(context), negs, negs.size, float(lr), np.empty(syn0.shape[1]))


def combine_convex(e_s, e_c, alpha=0.5):
    """Row-wise alpha * e_s + (1 - alpha) * e_c."""
    if not 0.0 <= alpha <= 1.0:
        raise EmbeddingInputError("alpha must lie in [0, 1]")
    if e_s.input_vectors.shape != e_c.input_vectors.shape:
        raise EmbeddingInputError(f"shape mismatch {e_s.input_vectors.shape} vs {e_c.input_vectors.shape}")
    if alpha == 1.0:
        return EmbeddingMatrix(e_s.input_vectors.copy())
    if alpha == 0.0:
        return EmbeddingMatrix(e_c.input_vectors.copy())
    return EmbeddingMatrix(alpha * e_s.input_vectors + (1.0 - alpha) * e_c.input_vectors)


def combine_append(e_s, e_c):
    """Row-wise concatenation [e_s || e_c]."""
    if e_s.node_count != e_c.node_count:
        raise EmbeddingInputError(f"node count mismatch {e_s.node_count} vs {e_c.node_count}")
    return EmbeddingMatrix(np.hstack([e_s.input_vectors, e_c.input_vectors]))
