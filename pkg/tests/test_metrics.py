import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsumm.metrics import bleu, meteor, rouge2, rougeL
from legalsumm.textproc import lcs_len

TOKENS = st.lists(st.sampled_from("abcdefg"), max_size=10)


def bigram_oracle(candidate, reference):
    """Independent clipped bigram counting."""
    cand = Counter(zip(candidate, candidate[1:]))
    ref = Counter(zip(reference, reference[1:]))
    overlap = sum(min(cand[g], ref[g]) for g in cand)
    c_total = max(len(candidate) - 1, 0)
    r_total = max(len(reference) - 1, 0)
    p = overlap / c_total if c_total else 0.0
    r = overlap / r_total if r_total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


class TestRouge2:
    def test_identity(self):
        x = ["the", "court", "agreed", "today"]
        result = rouge2(x, x)
        assert (result.precision, result.recall, result.f1) == (1.0, 1.0, 1.0)

    def test_single_shared_bigram(self):
        result = rouge2(list("abcd"), list("abed"))
        assert result.precision == pytest.approx(1 / 3)
        assert result.recall == pytest.approx(1 / 3)
        assert result.f1 == pytest.approx(1 / 3)

    def test_disjoint(self):
        result = rouge2(list("abc"), list("xyz"))
        assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)

    def test_swap_transposes_p_and_r(self):
        a, b = list("abcab"), list("abxab")
        fwd, rev = rouge2(a, b), rouge2(b, a)
        assert fwd.precision == rev.recall
        assert fwd.recall == rev.precision
        assert fwd.f1 == rev.f1

    @settings(max_examples=300, deadline=None)
    @given(TOKENS, TOKENS)
    def test_matches_bigram_oracle(self, a, b):
        result = rouge2(a, b)
        p, r, f = bigram_oracle(a, b)
        assert (result.precision, result.recall, result.f1) == (p, r, f)


class TestRougeL:
    def test_identity(self):
        x = list("abcd")
        result = rougeL(x, x)
        assert (result.precision, result.recall, result.f1) == (1.0, 1.0, 1.0)

    def test_transposition(self):
        result = rougeL(list("abcd"), list("acbd"))
        assert result.precision == result.recall == result.f1 == 0.75

    def test_half_prefix(self):
        result = rougeL(list("ab"), list("abcd"))
        assert result.precision == 1.0
        assert result.recall == 0.5
        assert result.f1 == pytest.approx(2 / 3)

    @settings(max_examples=300, deadline=None)
    @given(TOKENS, TOKENS)
    def test_matches_lcs(self, a, b):
        result = rougeL(a, b)
        if not a or not b:
            assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)
        else:
            ell = lcs_len(a, b)
            assert result.precision == ell / len(a)
            assert result.recall == ell / len(b)


class TestBleu:
    def test_identity_is_100(self):
        x = ["w%d" % i for i in range(6)]
        assert bleu(x, x) == pytest.approx(100.0)

    def test_disjoint_near_zero(self):
        assert bleu(list("abc"), list("xyz")) < 1.0

    def test_empty_candidate(self):
        assert bleu([], list("abc")) == 0.0

    def test_hand_evaluated_instance(self):
        # p1=4/5, p2=3/4, p3=2/3, p4=1/2, BP=1
        expected = 100.0 * math.exp(
            (math.log(4 / 5) + math.log(3 / 4) + math.log(2 / 3) + math.log(1 / 2)) / 4
        )
        assert bleu(list("abcde"), list("abcdf")) == pytest.approx(expected, abs=1e-6)

    def test_brevity_penalty(self):
        # candidate is a 4-token prefix of an 8-token reference
        ref = ["w%d" % i for i in range(8)]
        cand = ref[:4]
        expected_bp = math.exp(1 - 8 / 4)
        assert bleu(cand, ref) == pytest.approx(100.0 * expected_bp)

    @settings(max_examples=300, deadline=None)
    @given(TOKENS, TOKENS)
    def test_range(self, a, b):
        assert 0.0 <= bleu(a, b) <= 100.0


class TestMeteor:
    def test_disjoint_zero(self):
        assert meteor(list("abc"), list("xyz")) == 0.0

    def test_single_token(self):
        assert meteor(["a"], ["a"]) == pytest.approx(0.5)

    def test_identity_20_tokens(self):
        x = ["w%d" % i for i in range(20)]
        assert meteor(x, x) == pytest.approx(1.0 * (1 - 0.5 * (1 / 20) ** 3))
        assert meteor(x, x) >= 0.999

    def test_hand_alignment(self):
        # cand [a b d], ref [a c d]: m=2, P=2/3, R=2/3, chunks=2
        p = r = 2 / 3
        fmean = 10 * p * r / (r + 9 * p)
        expected = fmean * (1 - 0.5 * (2 / 2) ** 3)
        assert meteor(list("abd"), list("acd")) == pytest.approx(expected)

    @settings(max_examples=300, deadline=None)
    @given(TOKENS, TOKENS)
    def test_range(self, a, b):
        assert 0.0 <= meteor(a, b) <= 1.0
