import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sac2vec.content import ContentMatrix, build_content_layer
from sac2vec.graph import build_layer
from sac2vec.multiplex import assemble
from sac2vec.rng import RandomStream
from sac2vec.walker import WalkCorpus, WalkParams, generate_corpus, node2vec_step


def step_frequencies(layer, current, previous, params, draws, seed=0):
    rng = RandomStream(seed)
    counts = np.zeros(layer.node_count)
    for _ in range(draws):
        counts[node2vec_step(layer, current, previous, params, rng)] += 1
    return counts / draws


def layer_counts(corpus, layer_count):
    """counts[i, t]: steps taken from node i in layer t."""
    counts = np.zeros((corpus.node_count, layer_count))
    for j in range(len(corpus)):
        w = corpus.walk(j)
        base = corpus.offsets[j] - j
        for s in range(w.size - 1):
            counts[w[s], corpus.layers[base + s]] += 1
    return counts


def layer_counts_one_step(corpus, layer_count):
    # every walk has exactly one step: walk j starts at tokens[2j]
    starts = corpus.tokens[0::2]
    counts = np.zeros((corpus.node_count, layer_count))
    np.add.at(counts, (starts, corpus.layers), 1)
    return counts


class TestNode2vecStep:
    def test_return_bias(self):
        path = build_layer([(0, 1), (1, 2)], 3)
        f = step_frequencies(path, 1, 0, WalkParams(return_param=0.25, inout_param=4.0), 10**5)
        assert abs(f[0] - 16 / 17) < 0.01
        assert abs(f[2] - 1 / 17) < 0.01

    def test_common_neighbour_weight_one(self):
        # triangle 0-1-2 plus tail 1-3: from 1 with previous 0, node 2 is adjacent to 0
        layer = build_layer([(0, 1), (1, 2), (0, 2), (1, 3)], 4)
        p, q = 0.5, 2.0
        f = step_frequencies(layer, 1, 0, WalkParams(return_param=p, inout_param=q), 10**5)
        beta = np.array([1 / p, 0, 1.0, 1 / q])
        assert np.max(np.abs(f - beta / beta.sum())) < 0.01

    def test_fallback_when_previous_not_adjacent(self):
        layer = build_layer([(1, 0, 1.0), (1, 2, 2.0), (1, 3, 3.0), (4, 0, 1.0)], 5, directed=True)
        f = step_frequencies(layer, 1, 4, WalkParams(return_param=0.25, inout_param=4.0), 10**5)
        assert np.max(np.abs(f - np.array([1, 0, 2, 3, 0]) / 6)) < 0.01

    def test_no_previous(self):
        layer = build_layer([(0, 1, 1.0), (0, 2, 3.0)], 3, directed=True)
        f = step_frequencies(layer, 0, None, WalkParams(return_param=0.1, inout_param=10.0), 10**5)
        assert abs(f[2] - 0.75) < 0.01

    def test_unbiased_ignores_previous(self):
        path = build_layer([(0, 1), (1, 2)], 3)
        f = step_frequencies(path, 1, 0, WalkParams(), 10**5)
        assert abs(f[0] - 0.5) < 0.01

    def test_dead_end(self):
        layer = build_layer([(0, 1)], 3, directed=True)
        assert node2vec_step(layer, 1, 0, WalkParams(), RandomStream(0)) is None


class TestCorpus:
    def test_isolated_nodes(self):
        corpus = generate_corpus(assemble([build_layer([], 4)]), WalkParams(walks_per_node=3, walk_length=5))
        assert corpus.walks == [[v] for _ in range(3) for v in range(4)]

    def test_truncation(self):
        chain = build_layer([(0, 1), (1, 2)], 3, directed=True)
        corpus = generate_corpus(assemble([chain]), WalkParams(walks_per_node=1, walk_length=10))
        assert corpus.walks == [[0, 1, 2], [1, 2], [2]]

    def test_dead_end_retries_other_layer(self):
        s = build_layer([(0, 1), (1, 2), (2, 0)], 3, directed=True)
        c = build_layer([(0, 2)], 3, directed=True)
        corpus = generate_corpus(assemble([s, c]), WalkParams(walks_per_node=20, walk_length=30))
        assert all(len(w) == 31 for w in corpus.walks)

    def test_shape_and_order(self):
        ring = build_layer([(i, (i + 1) % 6) for i in range(6)], 6)
        corpus = generate_corpus(assemble([ring]), WalkParams(walks_per_node=4, walk_length=7))
        assert len(corpus) == 24
        assert [w[0] for w in corpus.walks] == list(range(6)) * 4
        assert all(len(w) == 8 for w in corpus.walks)

    def test_uniform_walk_reduction(self):
        star = build_layer([(0, i) for i in range(1, 5)], 5)
        corpus = generate_corpus(assemble([star]), WalkParams(walks_per_node=5000, walk_length=1, mode="single-layer"))
        nxt = np.array([w[1] for w in corpus.walks if w[0] == 0])
        assert np.max(np.abs(np.bincount(nxt, minlength=5)[1:] / nxt.size - 0.25)) < 0.02

    def test_single_layer_mode_ignores_content(self):
        s = build_layer([(0, 1)], 3)
        c = build_layer([(0, 2), (1, 2)], 3)
        corpus = generate_corpus(assemble([s, c]), WalkParams(walks_per_node=10, walk_length=5, mode="single-layer"))
        # node 2 is only reachable through the content layer
        assert all(2 not in w for w in corpus.walks if w[0] != 2)

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        s = build_layer(sorted({tuple(sorted(e)) for e in rng.integers(0, 40, (120, 2)).tolist() if e[0] != e[1]}), 40)
        c = build_content_layer(ContentMatrix.from_matrix(rng.random((40, 5))), 4)
        mpx = assemble([s, c])
        params = WalkParams(walks_per_node=3, walk_length=20, return_param=0.5, inout_param=2.0, seed=9)
        a = generate_corpus(mpx, params)
        b = generate_corpus(mpx, params)
        par = generate_corpus(mpx, WalkParams(**{**params.__dict__, "threads": 2}))
        assert a.to_text() == b.to_text() == par.to_text()
        assert generate_corpus(mpx, WalkParams(**{**params.__dict__, "seed": 10})).to_text() != a.to_text()

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.25, 4.0), st.floats(0.25, 4.0))
    def test_respects_adjacency(self, seed, p, q):
        rng = np.random.default_rng(seed)
        n = 15
        s = build_layer(sorted({tuple(sorted(e)) for e in rng.integers(0, n, (20, 2)).tolist() if e[0] != e[1]}), n)
        c = build_content_layer(ContentMatrix.from_matrix(rng.random((n, 3)) * (rng.random((n, 3)) < 0.5)), 2)
        corpus = generate_corpus(assemble([s, c]), WalkParams(2, 10, p, q, seed=seed))
        for w in corpus.walks:
            assert 1 <= len(w) <= 11
            for u, v in zip(w, w[1:]):
                assert s.has_arc(u, v) or c.has_arc(u, v)

    def test_coverage(self):
        ring = build_layer([(i, (i + 1) % 50) for i in range(50)] + [(0, 25)], 50)
        corpus = generate_corpus(assemble([ring]), WalkParams(walks_per_node=1, walk_length=200))
        assert set(corpus.tokens.tolist()) == set(range(50))

    def test_file_round_trip(self, tmp_path):
        ring = build_layer([(i, (i + 1) % 5) for i in range(5)], 5)
        corpus = generate_corpus(assemble([ring]), WalkParams(walks_per_node=2, walk_length=4))
        corpus.save(tmp_path / "w.txt")
        back = WalkCorpus.load(tmp_path / "w.txt", 5)
        assert back.walks == corpus.walks


class TestLayerChoice:
    def test_cycle_and_star(self):
        cycle = build_layer([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
        star = build_layer([(0, 1), (0, 2), (0, 3)], 4)
        mpx = assemble([cycle, star])
        corpus = generate_corpus(mpx, WalkParams(walks_per_node=10**5, walk_length=1), record_layers=True)
        counts = layer_counts_one_step(corpus, 2)
        freq = counts / counts.sum(1, keepdims=True)
        assert np.max(np.abs(freq - mpx.switch_probs)) < 0.01

    def test_layer_record_in_long_walks(self):
        cycle = build_layer([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
        star = build_layer([(0, 1), (0, 2), (0, 3)], 4)
        mpx = assemble([cycle, star])
        corpus = generate_corpus(mpx, WalkParams(walks_per_node=500, walk_length=100), record_layers=True)
        counts = layer_counts(corpus, 2)
        assert counts.sum(1).min() > 2 * 10**4
        assert np.max(np.abs(counts / counts.sum(1, keepdims=True) - mpx.switch_probs)) < 0.01

    def test_bias_survives_layer_switch(self):
        # from 1 with previous 0: structure has 0->1 (biased), content lacks it (fallback)
        s = build_layer([(0, 1), (1, 2)], 3)
        c = build_layer([(1, 0), (1, 2), (2, 1)], 3, directed=True)
        mpx = assemble([s, c])
        corpus = generate_corpus(mpx, WalkParams(walks_per_node=10**5, walk_length=2, return_param=0.25,
                                                 inout_param=4.0), record_layers=True)
        walks = corpus.tokens.reshape(-1, 3)[0::3]  # walks from node 0 (always full length here)
        layers = corpus.layers.reshape(-1, 2)[0::3]
        back = walks[:, 2] == 0
        in_s = layers[:, 1] == 0
        assert abs(back[in_s].mean() - 16 / 17) < 0.01
        assert abs(back[~in_s].mean() - 0.5) < 0.01
        assert abs(in_s.mean() - mpx.switch_probs[1, 0]) < 0.01
