"""End-to-end orchestration: load -> build layers -> walk -> train -> combine."""

import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from sac2vec.content import ContentMatrix, KnnParams, build_content_layer, compute_avg_s, load_content, tfidf
from sac2vec.embedder import SgnsParams, combine_append, combine_convex, train_sgns
from sac2vec.graph import build_layer, read_edge_list
from sac2vec.multiplex import MultiplexGraph, assemble
from sac2vec.walker import WalkParams, generate_corpus

log = logging.getLogger(__name__)

MODES = ("sac2vec", "structure-only", "content-only", "csoe", "ae")


class ConfigError(ValueError):
    """Invalid or inconsistent pipeline configuration (exit code 2)."""


@dataclass
class PipelineConfig:
    edges: str = None
    contents: list = field(default_factory=list)
    labels: str = None
    output: str = None
    multiplex: str = None
    directed: bool = False
    node_count: int = None
    content_format: str = "triplet"
    raw_counts: bool = False
    theta: int = 1
    knn_backend: str = "brute"
    walk: WalkParams = field(default_factory=WalkParams)
    sgns: SgnsParams = field(default_factory=SgnsParams)
    alpha: float = 0.5
    mode: str = "sac2vec"
    seed: int = 42
    threads: int = 1
    fractions: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    repeats: int = 10

    def validate(self, need_content=None):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.multiplex is None:
            if not self.edges:
                raise ConfigError("an edge list is required")
            paths = [self.edges, *self.contents]
        else:
            paths = [self.multiplex]
        for p in paths + ([self.labels] if self.labels else []):
            if not os.path.exists(p):
                raise ConfigError(f"no such file: {p}")
        if need_content is None:
            need_content = self.mode != "structure-only"
        if need_content and self.multiplex is None and not self.contents:
            raise ConfigError(f"mode {self.mode!r} needs at least one --content file")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        if self.theta < 1:
            raise ConfigError("theta must be a positive integer")


@dataclass
class BuildSummary:
    node_count: int
    arcs_per_layer: list
    avg_s: float
    k: int

    def to_text(self):
        lines = [f"nodes\t{self.node_count}", f"layers\t{len(self.arcs_per_layer)}"]
        lines += [f"arcs[{t}]\t{m}" for t, m in enumerate(self.arcs_per_layer)]
        lines += [f"avg_s\t{self.avg_s:.6f}", f"content_out_degree_cap\t{self.k}"]
        return "\n".join(lines)


def build_layers(structure, contents, theta=1, backend="brute"):
    """Structure layer plus one kNN content layer per content matrix, sharing one cap."""
    avg_s = compute_avg_s(structure)
    params = KnnParams(theta, avg_s)
    content_layers = []
    for c in contents:
        if c.node_count != structure.node_count:
            raise ConfigError(f"content has {c.node_count} rows but the graph has {structure.node_count} nodes")
        content_layers.append(build_content_layer(c, params, backend=backend))
    summary = BuildSummary(structure.node_count, [structure.total_edge_count] +
                           [layer.total_edge_count for layer in content_layers], avg_s, params.k)
    return [structure, *content_layers], summary


def load_layers(config):
    structure = read_edge_list(config.edges, config.node_count, directed=config.directed)
    contents = [load_content(p, structure.node_count, config.content_format, config.raw_counts)
                for p in config.contents]
    return build_layers(structure, contents, config.theta, config.knn_backend)


def embed_layers(layers, mode, walk, sgns, alpha=0.5):
    """Embeddings for one mode given [structure, content...] layers."""
    single = replace(walk, mode="single-layer")
    if mode == "sac2vec":
        mpx = assemble(layers)
        return train_sgns(generate_corpus(mpx, replace(walk, mode="sac2vec")), sgns)
    if mode == "structure-only":
        return train_sgns(generate_corpus(assemble(layers[:1]), single), sgns)
    if len(layers) < 2:
        raise ConfigError(f"mode {mode!r} needs a content layer")
    if mode == "content-only":
        return train_sgns(generate_corpus(assemble(layers[1:2]), single), sgns)
    e_s = train_sgns(generate_corpus(assemble(layers[:1]), single), sgns)
    e_c = train_sgns(generate_corpus(assemble(layers[1:2]), single), sgns)
    if mode == "csoe":
        return combine_convex(e_s, e_c, alpha)
    if mode == "ae":
        return combine_append(e_s, e_c)
    raise ConfigError(f"unknown mode {mode!r}")


def read_labels(path, node_count):
    """``node label`` lines; label strings get dense ids in first-seen order."""
    labels = np.full(node_count, -1, dtype=np.int64)
    names = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'node label'")
            try:
                i = int(parts[0])
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad node id {parts[0]!r}") from None
            if not 0 <= i < node_count:
                raise ConfigError(f"{path}:{lineno}: node {i} out of range [0, {node_count})")
            labels[i] = names.setdefault(parts[1], len(names))
    return labels, list(names)


def synthetic_layers(dataset, theta=1, backend="brute"):
    structure = build_layer(dataset.edges.tolist(), dataset.labels.size)
    content = ContentMatrix.from_matrix(tfidf(dataset.counts))
    return build_layers(structure, [content], theta, backend)


def load_or_build(config):
    if config.multiplex:
        mpx = MultiplexGraph.load(config.multiplex)
        return list(mpx.layers)
    layers, summary = load_layers(config)
    log.info("built layers: %s", summary)
    return layers
