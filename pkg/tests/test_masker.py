import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffmask.corpus_io import Document, Group, Token, word_tokenize
from diffmask.embeddings import EmbeddingStore
from diffmask.errors import DegenerateAttention, LengthError, NoSeeds, SpanError
from diffmask.masker import (
    Strategy,
    group_weights,
    score_attention,
    score_centroid,
    score_difference_nn,
    score_entity_spans,
    score_random,
)
from diffmask.tficf import DiffSet

EPS = 1e-6


def vector_doc(vectors, doc_id="v", groups=None):
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    n = len(vectors)
    groups = groups or [[i] for i in range(n)]
    owner = {m: gi for gi, g in enumerate(groups) for m in g}
    tokens = tuple(Token(f"t{i}", f"t{i}", owner[i], vectors[i]) for i in range(n))
    return Document(doc_id, tokens, tuple(Group(tuple(g)) for g in groups))


def seeds(*vecs):
    return DiffSet.from_vectors((f"s{i}", v) for i, v in enumerate(vecs))


def unit(cos_value):
    return [cos_value, math.sqrt(1 - cos_value**2)]


class TestDifferenceNN:
    def test_two_token_proportional(self):
        d = score_difference_nn(vector_doc([unit(0.8), unit(0.2)]), seeds([1, 0]), None, EPS)
        np.testing.assert_allclose(d.probs, [0.8, 0.2], atol=1e-12)
        assert d.argmax_seed.tolist() == [0, 0]

    def test_identical_tokens_uniform(self):
        d = score_difference_nn(vector_doc([[2, 1]] * 5), seeds([2, 1]), None, EPS)
        np.testing.assert_allclose(d.probs, [0.2] * 5, atol=1e-15)

    def test_negative_clamped(self):
        d = score_difference_nn(vector_doc([unit(0.9), unit(-0.5)]), seeds([1, 0]), None, EPS)
        expected = [0.9 / (0.9 + EPS), EPS / (0.9 + EPS)]
        np.testing.assert_allclose(d.probs, expected, rtol=1e-9)
        assert d.probs[0] == pytest.approx(0.999999, abs=2e-7)
        assert d.probs[1] == pytest.approx(1.1e-6, rel=0.02)

    def test_argmax_picks_nearest(self):
        d = score_difference_nn(vector_doc([[1, 0.1], [0.1, 1]]), seeds([1, 0], [0, 1]), None, EPS)
        assert d.argmax_seed.tolist() == [0, 1]

    def test_no_seeds(self):
        with pytest.raises(NoSeeds):
            score_difference_nn(vector_doc([[1, 0]]), DiffSet(()), None, EPS)

    def test_store_lookup_and_oov(self):
        doc = word_tokenize("alpha beta unknown")
        store = EmbeddingStore.from_dict({"alpha": [1.0, 0.0], "beta": [0.6, 0.8]})
        d = score_difference_nn(doc, seeds([1, 0]), store, EPS)
        total = 1.0 + 0.6 + EPS
        np.testing.assert_allclose(d.probs, [1 / total, 0.6 / total, EPS / total], rtol=1e-12)
        assert d.argmax_list() == [0, 0, None]

    def test_inline_vector_overrides_store(self):
        doc = vector_doc([[0, 1], [1, 0]])
        store = EmbeddingStore.from_dict({"t0": [1.0, 0.0], "t1": [1.0, 0.0]})
        d = score_difference_nn(doc, seeds([1, 0]), store, EPS)
        assert d.probs[1] > 0.99

    def test_seed_equal_token_is_max(self):
        rng = np.random.default_rng(3)
        sd = rng.standard_normal((3, 4))
        toks = np.vstack([rng.standard_normal((6, 4)), sd[1]])
        d = score_difference_nn(vector_doc(toks), seeds(*sd), None, EPS)
        assert np.argmax(d.probs) == 6


class TestCentroid:
    def test_opposite_seeds_uniform(self):
        d = score_centroid(vector_doc([[1, 0], [0, 1], [3, 3]]), seeds([1, 0], [-1, 0]), None, EPS)
        np.testing.assert_allclose(d.probs, [1 / 3] * 3, atol=1e-15)
        assert d.argmax_seed is None

    def test_single_seed_equals_nn(self):
        rng = np.random.default_rng(5)
        doc = vector_doc(rng.standard_normal((9, 6)))
        s = seeds(rng.standard_normal(6))
        a = score_centroid(doc, s, None, EPS)
        b = score_difference_nn(doc, s, None, EPS)
        np.testing.assert_allclose(a.probs, b.probs, atol=1e-12, rtol=0)

    def test_two_cluster_separation(self):
        # seeds A=(1,0), B=(0,1); token 0 sits on A, token 1 on the diagonal.
        # NN raw (1, 1/sqrt2) -> p0 = 2 - sqrt2; centroid raw (1/sqrt2, 1) -> p0 = sqrt2 - 1
        doc = vector_doc([[1, 0], [1, 1]])
        s = seeds([1, 0], [0, 1])
        nn = score_difference_nn(doc, s, None, EPS).probs[0]
        cen = score_centroid(doc, s, None, EPS).probs[0]
        assert abs(nn - (2 - math.sqrt(2))) < 1e-9
        assert abs(cen - (math.sqrt(2) - 1)) < 1e-9
        assert nn > cen


class TestRandom:
    @pytest.mark.parametrize("n", [1, 3, 4, 7])
    def test_exact_one_over_n(self, n):
        d = score_random(word_tokenize(" ".join("w" for _ in range(n))))
        assert all(p == 1.0 / n for p in d.probs)

    def test_three(self):
        d = score_random(word_tokenize("a b c"))
        np.testing.assert_allclose(d.probs, 0.3333333333, atol=1e-10)


class TestAttention:
    def test_normalized(self):
        d = score_attention(word_tokenize("a b c"), [2, 1, 1])
        assert d.probs.tolist() == [0.5, 0.25, 0.25]

    def test_uniform(self):
        d = score_attention(word_tokenize("a b c d"), [3, 3, 3, 3])
        assert d.probs.tolist() == [0.25] * 4

    def test_length(self):
        with pytest.raises(LengthError):
            score_attention(word_tokenize("a b c d"), [1, 1, 1])

    def test_all_zero(self):
        with pytest.raises(DegenerateAttention):
            score_attention(word_tokenize("a b"), [0, 0])

    def test_negative(self):
        with pytest.raises(DegenerateAttention):
            score_attention(word_tokenize("a b"), [1, -1])


class TestEntitySpans:
    def test_inside_span(self):
        d = score_entity_spans(word_tokenize("a b c d"), [[1, 3]], clamp_epsilon=EPS)
        z = 2 + 2 * EPS
        np.testing.assert_allclose(d.probs, [EPS / z, 1 / z, 1 / z, EPS / z], rtol=1e-12)

    def test_no_spans_uniform(self):
        d = score_entity_spans(word_tokenize("a b c d"), [], clamp_epsilon=EPS)
        np.testing.assert_allclose(d.probs, [0.25] * 4, atol=1e-15)

    def test_overlap_counted_once(self):
        a = score_entity_spans(word_tokenize("a b c d"), [[0, 2], [1, 3]])
        b = score_entity_spans(word_tokenize("a b c d"), [[0, 3]])
        np.testing.assert_array_equal(a.probs, b.probs)

    @pytest.mark.parametrize("span", [[-1, 2], [2, 5], [3, 3], [2, 1]])
    def test_out_of_range(self, span):
        with pytest.raises(SpanError):
            score_entity_spans(word_tokenize("a b c d"), [span])

    def test_custom_weights(self):
        d = score_entity_spans(word_tokenize("a b"), [[0, 1]], in_weight=3.0, out_weight=1.0)
        np.testing.assert_allclose(d.probs, [0.75, 0.25])


class TestGroupWeights:
    def test_max_rule(self):
        doc = vector_doc([[1, 0], [1, 0], [1, 0]], groups=[[0, 1], [2]])
        d = score_attention(doc, [0.1, 0.3, 0.6])
        np.testing.assert_allclose(group_weights(d, doc), [0.3, 0.6])

    def test_mean_switch(self):
        doc = vector_doc([[1, 0], [1, 0], [1, 0]], groups=[[0, 1], [2]])
        d = score_attention(doc, [0.1, 0.3, 0.6])
        np.testing.assert_allclose(group_weights(d, doc, "mean"), [0.2, 0.6])

    def test_singletons_equal_probs(self):
        doc = word_tokenize("a b c")
        d = score_attention(doc, [1, 2, 3])
        np.testing.assert_array_equal(group_weights(d, doc), d.probs)

    def test_uniform(self):
        doc = vector_doc([[1, 0]] * 6, groups=[[0, 1, 2], [3], [4, 5]])
        w = group_weights(score_random(doc), doc)
        assert len(set(w.tolist())) == 1


dims = st.integers(2, 6)


@st.composite
def doc_and_seeds(draw):
    d = draw(dims)
    n = draw(st.integers(1, 20))
    k = draw(st.integers(1, 5))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return vector_doc(rng.standard_normal((n, d))), seeds(*rng.standard_normal((k, d)))


class TestDistributionLaws:
    @settings(max_examples=150, deadline=None)
    @given(doc_and_seeds(), st.floats(0.01, 100.0))
    def test_sum_nonneg_monotone_scale(self, ds, scale):
        doc, s = ds
        d = score_difference_nn(doc, s, None, EPS)
        assert abs(d.probs.sum() - 1) < 1e-9 and (d.probs >= 0).all()
        mats = np.vstack([t.inline_vector for t in doc.tokens])
        raw = np.array([max(np.dot(t, v) / (np.linalg.norm(t) * np.linalg.norm(v)) for v in s.matrix()) for t in mats])
        for i in range(len(raw)):
            for j in range(len(raw)):
                if raw[i] > raw[j] + 1e-12 and raw[j] > EPS:
                    assert d.probs[i] > d.probs[j]
        scaled_doc = vector_doc(mats * scale)
        scaled_seeds = DiffSet.from_vectors((x.word, x.vector * scale) for x in s.seeds)
        d2 = score_difference_nn(scaled_doc, scaled_seeds, None, EPS)
        np.testing.assert_allclose(d.probs, d2.probs, atol=1e-9, rtol=0)

    @settings(max_examples=50, deadline=None)
    @given(doc_and_seeds())
    def test_centroid_law(self, ds):
        doc, s = ds
        d = score_centroid(doc, s, None, EPS)
        assert abs(d.probs.sum() - 1) < 1e-9 and (d.probs >= 0).all()
        assert d.strategy is Strategy.DIFFERENCE_CENTROID
