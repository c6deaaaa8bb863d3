import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from rtwl.problems import (
    LpoInstance,
    cfi_bar,
    cfi_is_member,
    cfi_psi,
    lpo_answer,
)
from rtwl.reductions import (
    CascadeRange,
    ReductionTrace,
    cascade_backward,
    cascade_exact_limits,
    cascade_psi_table,
    cascade_tail_sets,
    cfi_meet_tail,
    cfi_relabel,
    cfi_relabel_shift,
    dchar_encode,
    dwub_to_cfi,
    lpo_balanced_decode,
    lpo_balanced_encode,
    lpo_srt3_decode,
    lpo_srt3_encode,
    lpo_wub_decode,
    lpo_wub_encode,
    product_decode,
    product_encode,
    product_psi_table,
    wub_merge,
)
from rtwl.streams import EvpStream, StepFunction, ValidationError


def random_stream(rng, alphabet, max_transient=12, max_cycle=8):
    t = tuple(rng.randrange(alphabet) for _ in range(rng.randrange(max_transient + 1)))
    c = tuple(rng.randrange(alphabet) for _ in range(1, rng.randrange(1, max_cycle + 1) + 1))
    return EvpStream(t, c[: rng.randrange(1, len(c) + 1)], alphabet)


class TestProduct:
    @pytest.mark.parametrize("ks", [(2, 2), (2, 3), (3, 3), (2, 2, 2)])
    def test_round_trip(self, ks):
        n = 1
        for k in ks:
            n *= k
        for a in range(n):
            t = product_decode(a, ks)
            streams = [EvpStream.constant(v, k) for v, k in zip(t, ks)]
            merged = product_encode(streams, ks)
            assert merged.infinitely_often() == {a}
        for t in itertools.product(*(range(k) for k in ks)):
            streams = [EvpStream.constant(v, k) for v, k in zip(t, ks)]
            a = next(iter(product_encode(streams, ks).infinitely_often()))
            assert product_decode(a, ks) == t

    def test_psi_table_is_bijection(self):
        psi = product_psi_table((2, 3))
        assert psi.is_total()
        assert psi.n_colors == 6
        assert all(len(psi.fiber(i)) == 1 for i in range(6))


class TestCascade:
    def test_range_offsets(self):
        rng = CascadeRange((2, 3, 4))
        assert rng.offsets == (0, 1, 3, 6)
        assert rng.n_colors == 7

    def test_exact_limits_22(self):
        r = CascadeRange((2, 2))
        cases = {0: (0, 1), 1: (1, 1), 2: (0, 2)}
        for color, expect in cases.items():
            c = EvpStream.constant(color, 3)
            assert tuple(cascade_exact_limits(c, r)) == expect
            assert cascade_backward(expect, r) == color

    def test_backward_range_checked(self):
        r = CascadeRange((2, 2))
        with pytest.raises(ValidationError):
            cascade_backward((2, 2), r)
        with pytest.raises(ValidationError):
            cascade_backward((0,), r)

    def test_psi_table_matches_backward(self):
        r = CascadeRange((2, 2))
        psi = cascade_psi_table(r)
        assert psi.is_total() and psi.n_colors == 3
        assert psi.get((0, 0)) == 0
        assert psi.get((1, 0)) == 1
        assert psi.get((0, 1)) == 2
        assert psi.get((1, 1)) == 2

    def test_psi_table_surjective_generally(self):
        for ks in [(2, 3), (3, 3), (2, 2, 2)]:
            r = CascadeRange(ks)
            psi = cascade_psi_table(r)
            assert psi.is_total()
            assert set(psi.assignment.values()) == set(range(r.n_colors))

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32))
    def test_soundness_on_random_streams(self, seed):
        r = CascadeRange((2, 2))
        c = random_stream(random.Random(seed), r.n_colors)
        tails = cascade_tail_sets(c, r)
        for a in itertools.product(*tails):
            assert cascade_backward(a, r) in c.infinitely_often()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32))
    def test_soundness_on_23(self, seed):
        r = CascadeRange((2, 3))
        c = random_stream(random.Random(seed), r.n_colors)
        tails = cascade_tail_sets(c, r)
        for a in itertools.product(*tails):
            assert cascade_backward(a, r) in c.infinitely_often()


class TestLpoBalanced:
    @pytest.mark.parametrize("flip", [None, 0, 1, 2, 7])
    def test_decode_recovers_answer(self, flip):
        S = LpoInstance(flip)
        c = lpo_balanced_encode(S)
        base = (flip or 0) + 1
        x0, x1 = 2 * base, 2 * base + 2
        assert lpo_balanced_decode(c, x0, x1) == lpo_answer(S)

    def test_limit_pattern_alternates(self):
        c = lpo_balanced_encode(LpoInstance(None))
        assert c.limits(6) == [0, 1, 0, 1, 0, 1]
        d = lpo_balanced_encode(LpoInstance(2))
        assert d.limits(6) == [1, 0, 1, 0, 1, 0]

    def test_decode_preconditions(self):
        c = lpo_balanced_encode(LpoInstance(None))
        with pytest.raises(ValidationError):
            lpo_balanced_decode(c, 2, 3)  # mixed parity
        with pytest.raises(ValidationError):
            lpo_balanced_decode(c, 4, 2)


class TestLpoSrt3:
    @pytest.mark.parametrize("flip", [None, 0, 1, 5])
    def test_decode_with_valid_solution(self, flip):
        S = LpoInstance(flip)
        d = lpo_srt3_encode(S, lpo_balanced_encode(S))
        # a homogeneous set must start at or after the flip
        min_h = flip if flip is not None else 0
        bit, ok = lpo_srt3_decode(S, min_h)
        assert ok and bit == lpo_answer(S)

    def test_fresh_color_before_flip(self):
        S = LpoInstance(3)
        d = lpo_srt3_encode(S, lpo_balanced_encode(S))
        assert d.k == 3
        # pairs straddling the flip show the fresh color
        assert d.value(1, 4) == 2
        assert d.value(0, 3) == 2

    def test_precondition_flagged(self):
        S = LpoInstance(4)
        _, ok = lpo_srt3_decode(S, 2)
        assert not ok


class TestLpoWub:
    @pytest.mark.parametrize("flip", [None, 0, 3])
    def test_decode(self, flip):
        S = LpoInstance(flip)
        c = lpo_wub_encode(S)
        min_l = flip if flip is not None else 0
        assert lpo_wub_decode(S, min_l) == lpo_answer(S)

    def test_no_flip_is_constant_one(self):
        c = lpo_wub_encode(LpoInstance(None))
        assert c.limits(5) == [1] * 5

    def test_flip_zeroes_low_rows(self):
        c = lpo_wub_encode(LpoInstance(2))
        assert c.limits(4) == [0, 0, 1, 1]


class TestWubMerge:
    def test_merge_values(self):
        c = lpo_wub_encode(LpoInstance(2))
        d = lpo_wub_encode(LpoInstance(4))
        e = wub_merge(c, 0, d, 0)
        for x in range(6):
            for y in range(x + 1, 8):
                expect = 0 if (c.value(x, y) == 0 or d.value(x, y) == 0) else c.value(x, y)
                assert e.value(x, y) == expect

    def test_witness_validation(self):
        c = lpo_wub_encode(LpoInstance(1))
        with pytest.raises(ValidationError):
            wub_merge(c, 5, c, 0)


class TestDchar:
    def test_no_flip_returns_base(self):
        c = lpo_wub_encode(LpoInstance(2))
        d = dchar_encode(LpoInstance(None), c, StepFunction.constant(0))
        assert d == c

    def test_flip_splices_ell(self):
        c = lpo_wub_encode(LpoInstance(2))
        ell = StepFunction(1, ((3, 0),))
        d = dchar_encode(LpoInstance(4), c, ell)
        for x in range(4):
            for y in range(x + 1, 10):
                expect = c.value(x, y) if x >= 4 or y < 4 else ell.eval(y)
                assert d.value(x, y) == expect

    def test_bad_witness_rejected(self):
        c = lpo_wub_encode(LpoInstance(2))  # default limit 1
        with pytest.raises(ValidationError):
            dchar_encode(LpoInstance(1), c, StepFunction.constant(1))


class TestDwubToCfi:
    def test_pointwise_rule(self):
        c = lpo_wub_encode(LpoInstance(3))
        ell = StepFunction.constant(0)
        d = dwub_to_cfi(c, ell)
        for x in range(5):
            for y in range(x + 1, 9):
                assert d.value(x, y) == (1 if c.value(x, y) == 1 - ell.eval(y) else 0)

    def test_validation_rejects_non_instances(self):
        c = lpo_wub_encode(LpoInstance(3))
        with pytest.raises(ValidationError):
            dwub_to_cfi(c, StepFunction.constant(1))


words_small = st.lists(st.integers(0, 4), max_size=4).map(tuple)


class TestCfiWordOps:
    def test_relabel_examples(self):
        assert cfi_relabel((1,), (1,)) == (1, 1, 2)
        assert cfi_relabel((5, 0, 2), ()) == (5, 0, 2)
        assert cfi_relabel((), (2, 1)) == (2, 1, 1, 2)

    @given(words_small, words_small)
    def test_relabel_per_element_contract(self, p, sigma):
        out = cfi_relabel(p, sigma)
        shift = cfi_relabel_shift(sigma)
        for n in range(10):
            assert cfi_is_member(out, n + shift) == cfi_is_member(p, n)

    @given(words_small)
    def test_relabel_prefix_is_evened_sigma(self, sigma):
        out = cfi_relabel((), sigma)
        assert out == cfi_bar(sigma)

    def test_meet_tail_examples(self):
        assert cfi_meet_tail((), 1) == (1, 2)
        assert cfi_meet_tail((1,), 0) == (1,)

    @given(words_small.filter(lambda w: len(w) <= 6), st.integers(0, 5))
    def test_meet_tail_membership(self, p, k):
        out = cfi_meet_tail(p, k)
        bound = max([*p, k + 1]) + 3
        for n in range(bound):
            expect = cfi_is_member(p, n) and n > k
            assert cfi_is_member(out, n) == expect

    @given(words_small, st.integers(0, 5))
    def test_meet_tail_complement_formula(self, p, k):
        out = cfi_meet_tail(p, k)
        expect = cfi_psi(p) | {n for n in range(k + 1) if cfi_is_member(p, n)}
        assert cfi_psi(out) == expect


class TestTrace:
    def test_json_shape(self):
        t = ReductionTrace("demo", LpoInstance(1), None, 3, 0, True)
        data = t.to_json()
        assert data["name"] == "demo"
        assert data["instance"] == {"flip": 1}
        assert data["valid"] is True
        assert "decoded" in data
