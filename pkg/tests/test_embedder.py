import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sac2vec.embedder import (
    EmbeddingInputError,
    EmbeddingMatrix,
    SgnsParams,
    combine_append,
    combine_convex,
    init_vectors,
    sgns_pair_grad,
    sgns_pair_loss,
    sgns_step,
    train_sgns,
)
from sac2vec.graph import build_layer
from sac2vec.multiplex import assemble
from sac2vec.walker import WalkCorpus, WalkParams, generate_corpus

H = 1e-5


def central_difference(f, x):
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = x[i]
        x[i] = old + H
        up = f()
        x[i] = old - H
        down = f()
        x[i] = old
        g[i] = (up - down) / (2 * H)
    return g


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def random_config(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 12))
    k = int(rng.integers(1, 7))
    return rng.normal(size=dim), rng.normal(size=dim), rng.normal(size=(k, dim))


class TestGradient:
    def test_finite_differences_100_configs(self):
        worst = 0.0
        for seed in range(100):
            v, u, negs = random_config(seed)
            loss = lambda: sgns_pair_loss(v, u, negs)
            dv, du, dn = sgns_pair_grad(v, u, negs)
            worst = max(worst, rel_err(dv, central_difference(loss, v)),
                        rel_err(du, central_difference(loss, u)), rel_err(dn, central_difference(loss, negs)))
        assert worst < 1e-4

    def test_kernel_step_is_gradient_step(self):
        rng = np.random.default_rng(1)
        syn0 = rng.normal(size=(6, 5))
        syn1 = rng.normal(size=(6, 5))
        before0, before1 = syn0.copy(), syn1.copy()
        lr = 0.01
        dv, du, dn = sgns_pair_grad(before0[0], before1[1], before1[[2, 3, 4]])
        sgns_step(syn0, syn1, 0, 1, [2, 3, 4], lr)
        assert np.allclose(syn0[0], before0[0] - lr * dv, rtol=0, atol=1e-12)
        assert np.allclose(syn1[1], before1[1] - lr * du, rtol=0, atol=1e-12)
        assert np.allclose(syn1[[2, 3, 4]], before1[[2, 3, 4]] - lr * dn, rtol=0, atol=1e-12)
        assert np.array_equal(syn1[5], before1[5])

    def test_negative_equal_to_context_skipped(self):
        rng = np.random.default_rng(2)
        syn0, syn1 = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
        b0, b1 = syn0.copy(), syn1.copy()
        sgns_step(syn0, syn1, 0, 1, [1, 1], 0.05)
        dv, du, _ = sgns_pair_grad(b0[0], b1[1], np.zeros((0, 4)))
        assert np.allclose(syn0[0], b0[0] - 0.05 * dv, atol=1e-12)
        assert np.allclose(syn1[1], b1[1] - 0.05 * du, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_small_step_descends(self, seed):
        v, u, negs = random_config(seed)
        syn0 = v[None, :].copy()
        syn1 = np.vstack([u, negs])
        before = sgns_pair_loss(syn0[0], syn1[0], syn1[1:])
        sgns_step(syn0, syn1, 0, 0, list(range(1, syn1.shape[0])), 1e-4)
        assert sgns_pair_loss(syn0[0], syn1[0], syn1[1:]) < before


class TestTraining:
    def test_init_ranges(self):
        syn0, syn1 = init_vectors(50, 8, 0)
        assert np.all(np.abs(syn0) <= 0.5 / 8)
        assert not np.any(syn1)

    def test_repeated_pair_attracts(self):
        corpus = WalkCorpus.from_walks([[0, 1]] * 500, 2)
        emb = train_sgns(corpus, SgnsParams(dim=8, window=1, negatives=1, epochs=5, seed=3))
        dot = emb.output_vectors[1] @ emb.input_vectors[0]
        assert 1 / (1 + np.exp(-dot)) > 0.9

    def test_two_cliques_separate(self):
        edges = [(a + o, b + o) for o in (0, 10) for a in range(10) for b in range(a + 1, 10)]
        layer = build_layer(edges, 20)
        corpus = generate_corpus(assemble([layer]), WalkParams(walks_per_node=10, walk_length=20, seed=1))
        x = train_sgns(corpus, SgnsParams(dim=16, window=4, epochs=3, seed=1)).input_vectors
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        cos = x @ x.T
        same = np.equal.outer(np.arange(20) // 10, np.arange(20) // 10)
        np.fill_diagonal(same, False)
        cross = ~np.equal.outer(np.arange(20) // 10, np.arange(20) // 10)
        assert cos[same].mean() > cos[cross].mean() + 0.2

    def test_bit_reproducible(self):
        corpus = WalkCorpus.from_walks(np.random.default_rng(0).integers(0, 30, (40, 15)).tolist(), 30)
        a = train_sgns(corpus, SgnsParams(dim=10, seed=5, epochs=2))
        b = train_sgns(corpus, SgnsParams(dim=10, seed=5, epochs=2))
        assert np.array_equal(a.input_vectors, b.input_vectors)
        assert a.to_text() == b.to_text()

    def test_errors(self):
        with pytest.raises(EmbeddingInputError):
            train_sgns(WalkCorpus(np.empty(0, np.int32), np.zeros(1, np.int64), 3), SgnsParams(dim=4))
        with pytest.raises(EmbeddingInputError):
            train_sgns(WalkCorpus(np.array([0, 5], np.int32), np.array([0, 2]), 3), SgnsParams(dim=4))
        with pytest.raises(ValueError):
            SgnsParams(window=0)


class TestCombiners:
    def setup_method(self):
        rng = np.random.default_rng(0)
        self.e_s = EmbeddingMatrix(rng.normal(size=(7, 4)))
        self.e_c = EmbeddingMatrix(rng.normal(size=(7, 4)))

    def test_boundaries_exact(self):
        assert np.array_equal(combine_convex(self.e_s, self.e_c, 1.0).input_vectors, self.e_s.input_vectors)
        assert np.array_equal(combine_convex(self.e_s, self.e_c, 0.0).input_vectors, self.e_c.input_vectors)

    def test_midpoint(self):
        out = combine_convex(EmbeddingMatrix(np.array([[2.0, 0.0]])), EmbeddingMatrix(np.array([[0.0, 2.0]])))
        assert out.input_vectors.tolist() == [[1.0, 1.0]]

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 1.0))
    def test_linear_in_alpha(self, alpha):
        got = combine_convex(self.e_s, self.e_c, alpha).input_vectors
        one = combine_convex(self.e_s, self.e_c, 1.0).input_vectors
        zero = combine_convex(self.e_s, self.e_c, 0.0).input_vectors
        assert np.max(np.abs(got - (alpha * one + (1 - alpha) * zero))) < 1e-9

    def test_convex_errors(self):
        with pytest.raises(EmbeddingInputError):
            combine_convex(self.e_s, EmbeddingMatrix(np.zeros((7, 3))))
        with pytest.raises(EmbeddingInputError):
            combine_convex(self.e_s, self.e_c, 1.5)

    def test_append(self):
        out = combine_append(EmbeddingMatrix(np.array([[1.0, 2.0]])), EmbeddingMatrix(np.array([[3.0]])))
        assert out.input_vectors.tolist() == [[1.0, 2.0, 3.0]]
        wide = combine_append(EmbeddingMatrix(np.zeros((5, 128))), EmbeddingMatrix(np.ones((5, 128))))
        assert wide.dim == 256

    def test_append_empty_identity(self):
        out = combine_append(self.e_s, EmbeddingMatrix(np.zeros((7, 0))))
        assert np.array_equal(out.input_vectors, self.e_s.input_vectors)

    def test_append_mismatch(self):
        with pytest.raises(EmbeddingInputError):
            combine_append(self.e_s, EmbeddingMatrix(np.zeros((6, 4))))


class TestEmbeddingFile:
    def test_format(self):
        emb = EmbeddingMatrix(np.array([[0.123456789, -2.0], [1e-7, 12345678.0]]))
        assert emb.to_text() == "2 2\n0 0.123457 -2\n1 1e-07 1.23457e+07\n"

    def test_round_trip(self, tmp_path):
        emb = EmbeddingMatrix(np.random.default_rng(4).normal(size=(9, 3)))
        emb.save(tmp_path / "e.txt")
        back = EmbeddingMatrix.load(tmp_path / "e.txt")
        assert np.allclose(back.input_vectors, emb.input_vectors, rtol=1e-5)
        back.save(tmp_path / "f.txt")
        assert (tmp_path / "e.txt").read_text() == (tmp_path / "f.txt").read_text()

    def test_non_finite(self):
        with pytest.raises(EmbeddingInputError):
            EmbeddingMatrix(np.array([[np.nan]]))

    def test_missing_rows(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("3 1\n0 1.0\n2 1.0\n")
        with pytest.raises(EmbeddingInputError, match="missing"):
            EmbeddingMatrix.load(p)
