"""Multi-layer graph over a shared node set with per-node layer-switch tables."""

import io
import math
import struct
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from sac2vec.graph import GraphInputError, layer_from_csr

MAGIC = b"SAC2VEC-MPX\x00"
VERSION = 1


def gamma_size(layer, node):
    """Number of out-arcs of ``node`` whose weight is at least the layer mean."""
    _, w = layer.out_edges(node)
    return int(np.count_nonzero(w >= layer.mean_edge_weight))


def gamma_sizes(layer):
    src = np.repeat(np.arange(layer.node_count), layer.out_degree())
    heavy = layer.weights >= layer.mean_edge_weight
    return np.bincount(src[heavy], minlength=layer.node_count).astype(np.int64)


def inter_weight(gamma):
    """Weight ln(e + |Gamma|) of every arc leaving a node copy toward another layer."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    return math.log(math.e + gamma)


def switch_probabilities(weights):
    """Layer choice probabilities from the outgoing inter-layer weights of one node.

    ``weights[t]`` is the weight shared by all arcs leaving the node's copy in
    layer t. Layer t receives the mass of the arcs pointing into it, normalised
    by the total over all ordered layer pairs. The sums run in exact rational
    arithmetic and each probability is rounded once, so symmetric inputs give
    exactly 1/T and the two-layer case is the correctly rounded w_c/(w_s+w_c).
    """
    T = len(weights)
    if T < 2:
        raise ValueError("switching needs at least two layers")
    exact = [Fraction(float(w)) for w in weights]
    total = sum(exact[a] for a in range(T) for b in range(T) if a != b)
    return np.array([float(sum(exact[a] for a in range(T) if a != t) / total) for t in range(T)])


@dataclass(frozen=True, eq=False)
class MultiplexGraph:
    layers: tuple
    gamma_sizes: np.ndarray      # (T, n)
    inter_weights: np.ndarray    # (T, n): weight of arcs leaving layer t at node i
    switch_probs: np.ndarray     # (n, T)
    packed: dict = field(repr=False)

    @property
    def node_count(self):
        return self.layers[0].node_count

    @property
    def layer_count(self):
        return len(self.layers)

    def to_bytes(self):
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<IIQ", VERSION, self.layer_count, self.node_count))
        for layer in self.layers:
            buf.write(struct.pack("<BQQ", int(layer.directed), layer.input_edge_count, layer.total_edge_count))
            buf.write(layer.indptr.astype("<i8").tobytes())
            buf.write(layer.indices.astype("<i8").tobytes())
            buf.write(layer.weights.astype("<f8").tobytes())
        buf.write(np.ascontiguousarray(self.switch_probs, dtype="<f8").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data):
        view = memoryview(data)
        if bytes(view[:len(MAGIC)]) != MAGIC:
            raise GraphInputError("not a multiplex file")
        pos = len(MAGIC)
        version, T, n = struct.unpack_from("<IIQ", view, pos)
        pos += struct.calcsize("<IIQ")
        if version != VERSION:
            raise GraphInputError(f"unsupported multiplex version {version}")

        def take(dtype, count):
            nonlocal pos
            arr = np.frombuffer(view, dtype=dtype, count=count, offset=pos).copy()
            pos += arr.nbytes
            return arr

        layers = []
        for _ in range(T):
            directed, input_edges, m = struct.unpack_from("<BQQ", view, pos)
            pos += struct.calcsize("<BQQ")
            indptr = take("<i8", n + 1)
            indices = take("<i8", m)
            weights = take("<f8", m)
            layers.append(layer_from_csr(n, indptr, indices, weights, bool(directed), input_edges))
        stored = take("<f8", n * T).reshape(n, T)
        mpx = assemble(layers)
        if not np.array_equal(stored, mpx.switch_probs):
            raise GraphInputError("stored switch probabilities disagree with the layers")
        return mpx

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def _switch_table(gam):
    # probabilities depend only on the gamma tuple; evaluate each distinct tuple once
    uniq, inv = np.unique(gam.T, axis=0, return_inverse=True)
    rows = np.array([switch_probabilities([inter_weight(int(g)) for g in row]) for row in uniq])
    return np.ascontiguousarray(rows[np.asarray(inv).ravel()])


def switch_distribution(node, multiplex):
    if multiplex.layer_count < 2:
        raise ValueError("switch distribution needs at least two layers")
    return switch_probabilities(multiplex.inter_weights[:, node].tolist())


def _pack(layers):
    T = len(layers)
    n = layers[0].node_count
    offsets = np.cumsum([0] + [layer.total_edge_count for layer in layers])
    indptr = np.stack([layer.indptr + offsets[t] for t, layer in enumerate(layers)])
    cat = lambda name, dt: np.ascontiguousarray(
        np.concatenate([getattr(layer, name) for layer in layers]) if offsets[-1] else np.empty(0, dt), dtype=dt)
    return {
        "indptr": np.ascontiguousarray(indptr, dtype=np.int64).reshape(T, n + 1),
        "indices": cat("indices", np.int64),
        "weights": cat("weights", np.float64),
        "alias_prob": cat("alias_prob", np.float64),
        "alias_idx": cat("alias_idx", np.int64),
    }


def assemble(layers):
    """Stack layers (structure first) and precompute the switch tables."""
    layers = tuple(layers)
    if not layers:
        raise GraphInputError("multiplex needs at least one layer")
    n = layers[0].node_count
    if any(layer.node_count != n for layer in layers):
        raise GraphInputError(f"layer node counts differ: {[layer.node_count for layer in layers]}")
    T = len(layers)
    gam = np.stack([gamma_sizes(layer) for layer in layers]) if n else np.zeros((T, 0), dtype=np.int64)
    uniq, inv = np.unique(gam, return_inverse=True)
    inter = np.array([inter_weight(int(g)) for g in uniq])[inv].reshape(gam.shape)
    probs = _switch_table(gam) if T > 1 and n else np.ones((n, 1))
    for arr in (gam, inter, probs):
        arr.setflags(write=False)
    return MultiplexGraph(layers, gam, inter, probs, _pack(layers))
