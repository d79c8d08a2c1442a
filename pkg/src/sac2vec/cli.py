"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 configuration or input error.
"""

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from sac2vec.embedder import EmbeddingInputError, EmbeddingMatrix, SgnsParams
from sac2vec.evaluate import (
    CLASSIFIER_NOTE,
    classification_sweep,
    clustering_accuracy,
    kmeans_pp,
    project_2d,
    write_projection,
)
from sac2vec.graph import GraphInputError
from sac2vec.multiplex import assemble
from sac2vec.pipeline import MODES, ConfigError, PipelineConfig, embed_layers, load_layers, load_or_build, read_labels
from sac2vec.synth import SyntheticSpec, planted_partition
from sac2vec.walker import WalkParams, generate_corpus

log = logging.getLogger("sac2vec")

# external reference figure for orientation only; never asserted
CITESEER_REFERENCE = {"dataset": "citeseer", "mode": "sac2vec", "train_fraction": 0.1, "micro_f1": 69.10}


def _input_args(p, content_required=False):
    p.add_argument("--edges", help="edge list: 'src dst [weight]' per line")
    p.add_argument("--content", action="append", default=[],
                   help="content file; repeat for several content types (one layer each)")
    p.add_argument("--format", choices=("triplet", "csv"), default="triplet", dest="content_format")
    p.add_argument("--tfidf", action="store_true", help="content holds raw counts; convert to tf-idf")
    p.add_argument("--nodes", type=int, default=None, help="node count (default: max id + 1)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--undirected", dest="directed", action="store_false", default=False)
    g.add_argument("--directed", dest="directed", action="store_true")
    p.add_argument("--theta", type=int, default=1)
    p.add_argument("--knn", choices=("brute", "tree"), default="brute", dest="knn_backend")


def _walk_args(p):
    p.add_argument("--walks", type=int, default=10)
    p.add_argument("--length", type=int, default=80)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int, default=1)


def _sgns_args(p):
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--alpha", type=float, default=0.5)


def _config(args):
    walk = sgns = None
    try:
        if hasattr(args, "walks"):
            walk = WalkParams(args.walks, args.length, args.p, args.q, seed=args.seed, threads=args.threads)
        if hasattr(args, "dim"):
            sgns = SgnsParams(args.dim, args.window, args.negatives, args.epochs, args.lr, args.seed, args.threads)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    cfg = PipelineConfig(
        edges=args.edges, contents=args.content, multiplex=getattr(args, "multiplex", None),
        directed=args.directed, node_count=args.nodes, content_format=args.content_format,
        raw_counts=args.tfidf, theta=args.theta, knn_backend=args.knn_backend,
        mode=getattr(args, "mode", "sac2vec"), alpha=getattr(args, "alpha", 0.5),
        seed=getattr(args, "seed", 42), threads=getattr(args, "threads", 1),
    )
    if walk:
        cfg.walk = walk
    if sgns:
        cfg.sgns = sgns
    return cfg


def cmd_build(args):
    cfg = _config(args)
    cfg.validate(need_content=args.mode != "structure-only")
    layers, summary = load_layers(cfg)
    mpx = assemble(layers)
    mpx.save(args.out)
    print(summary.to_text())
    return 0


def cmd_walk(args):
    cfg = _config(args)
    cfg.validate(need_content=args.mode == "sac2vec")
    layers = load_or_build(cfg)
    mode = "sac2vec" if args.mode == "sac2vec" else "single-layer"
    if args.mode == "content-only":
        layers = layers[1:2]
    corpus = generate_corpus(assemble(layers), replace(cfg.walk, mode=mode))
    corpus.save(args.out)
    print(f"walks\t{len(corpus)}\ntokens\t{corpus.tokens.size}")
    return 0


def cmd_embed(args):
    cfg = _config(args)
    cfg.validate()
    layers = load_or_build(cfg)
    emb = embed_layers(layers, cfg.mode, cfg.walk, cfg.sgns, cfg.alpha)
    emb.save(args.out)
    print(f"nodes\t{emb.node_count}\ndim\t{emb.dim}\nmode\t{cfg.mode}")
    return 0


def cmd_eval(args):
    emb = EmbeddingMatrix.load(args.embeddings)
    labels, names = read_labels(args.labels, emb.node_count)
    unlabeled = int((labels < 0).sum())
    if unlabeled:
        log.warning("%d unlabelled nodes excluded from evaluation", unlabeled)
    fractions = tuple(float(f) for f in args.fractions.split(","))
    report = classification_sweep(emb, labels, fractions, args.repeats, args.seed)
    keep = np.flatnonzero(labels >= 0)
    k = args.k or len(names)
    accs = []
    for rep in range(args.repeats):
        km = kmeans_pp(emb.input_vectors[keep], k, seed=args.seed + rep, n_init=10)
        accs.append(clustering_accuracy(km.labels, labels[keep]))
    report.metric_values["clustering_accuracy"] = float(np.mean(accs))
    report.config.update({"embeddings": args.embeddings, "labels": args.labels, "k": k,
                          "unlabelled_excluded": unlabeled, "classifier": CLASSIFIER_NOTE,
                          "reference_non_binding": CITESEER_REFERENCE})
    if args.projection:
        coords, flags = project_2d(emb)
        write_projection(coords, args.projection, labels, names)
        report.config["projection"] = {"path": args.projection, "method": "pca", "flags": flags}
    report.save(args.out)
    sys.stdout.write(report.to_text())
    return 0


def cmd_synth(args):
    try:
        spec = SyntheticSpec(args.n, args.communities, args.mixing_ratio, args.avg_degree, args.vocab,
                             args.informativeness, args.tokens, args.seed)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    data = planted_partition(spec)
    prefix = args.out
    data.write(prefix + ".edges", prefix + ".content", prefix + ".labels")
    inter = int((data.labels[data.edges[:, 0]] != data.labels[data.edges[:, 1]]).sum())
    print(f"nodes\t{spec.n}\nedges\t{len(data.edges)}\ninter_edges\t{inter}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="sac2vec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and serialise the multiplex graph")
    _input_args(p)
    p.add_argument("--mode", choices=MODES, default="sac2vec")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("walk", help="write the walk corpus")
    _input_args(p)
    _walk_args(p)
    p.add_argument("--multiplex", help="serialised multiplex from 'build'")
    p.add_argument("--mode", choices=("sac2vec", "structure-only", "content-only"), default="sac2vec")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("embed", help="walk + train (+ combine) and write embeddings")
    _input_args(p)
    _walk_args(p)
    _sgns_args(p)
    p.add_argument("--multiplex", help="serialised multiplex from 'build'")
    p.add_argument("--mode", choices=MODES, default="sac2vec")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("eval", help="classification sweep, clustering accuracy, projection")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--k", type=int, default=None, help="clusters (default: number of classes)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--projection", help="write 'node x y label' PCA coordinates here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a planted-partition dataset")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--mixing-ratio", type=float, default=0.2)
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--vocab", type=int, default=400)
    p.add_argument("--informativeness", type=float, default=0.8)
    p.add_argument("--tokens", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix; writes .edges/.content/.labels")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GraphInputError, EmbeddingInputError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.exception("failed: %s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
