"""Shuffle algebra and the dual pairing.

The shuffle oracle enumerates letter interleavings by choosing positions,
independently of the production last-letter recursion.
"""

from itertools import combinations
from math import comb

import numpy as np
import pytest

from pathsig import (
    LinearFunctional,
    TensorShape,
    pair,
    shuffle,
    shuffle_closure_check,
    shuffle_words,
    tensor_exp,
    TruncatedTensor,
)

from conftest import random_group_element, random_tensor


def shuffle_oracle(w1, w2):
    """All interleavings via position choices, with multiplicity."""
    n, m = len(w1), len(w2)
    out = {}
    for positions in combinations(range(n + m), n):
        word = [None] * (n + m)
        for slot, letter in zip(positions, w1):
            word[slot] = letter
        it = iter(w2)
        for i in range(n + m):
            if word[i] is None:
                word[i] = next(it)
        key = tuple(word)
        out[key] = out.get(key, 0) + 1
    return out


class TestShuffleWords:
    def test_two_single_letters(self):
        assert dict(shuffle_words((1,), (2,))) == {(1, 2): 1, (2, 1): 1}

    def test_spec_sh21_case(self):
        # (1,2) sh (3) = (1,2,3) + (1,3,2) + (3,1,2)
        assert dict(shuffle_words((1, 2), (3,))) == {
            (1, 2, 3): 1,
            (1, 3, 2): 1,
            (3, 1, 2): 1,
        }

    def test_matches_position_oracle(self, rng):
        for _ in range(30):
            w1 = tuple(rng.integers(1, 4, rng.integers(0, 4)))
            w2 = tuple(rng.integers(1, 4, rng.integers(0, 4)))
            assert dict(shuffle_words(w1, w2)) == shuffle_oracle(w1, w2)

    def test_term_count_is_binomial(self, rng):
        for n, m in [(1, 1), (2, 1), (2, 2), (3, 2)]:
            w1 = tuple(rng.integers(1, 3, n))
            w2 = tuple(rng.integers(1, 3, m))
            total = sum(c for _, c in shuffle_words(w1, w2))
            assert total == comb(n + m, n)


class TestShuffleFunctionals:
    def test_empty_word_acts_as_scalar(self, rng):
        shape = TensorShape(2, 3)
        y = LinearFunctional(shape, {(1, 2): 0.5, (2,): -1.0})
        c = LinearFunctional(shape, {(): 3.0})
        prod = shuffle(c, y)
        assert prod.terms == {(1, 2): 1.5, (2,): -3.0}
        assert shuffle(y, c).terms == prod.terms

    def test_commutative_and_associative(self, rng):
        shape = TensorShape(2, 6)
        def rand_functional():
            terms = {}
            for _ in range(3):
                length = int(rng.integers(0, 3))
                word = tuple(rng.integers(1, 3, length))
                terms[word] = float(rng.uniform(-1, 1))
            return LinearFunctional(shape, terms)

        for _ in range(10):
            a, b, c = rand_functional(), rand_functional(), rand_functional()
            ab = shuffle(a, b)
            ba = shuffle(b, a)
            assert set(ab.terms) == set(ba.terms)
            for w in ab.terms:
                assert ab.terms[w] == pytest.approx(ba.terms[w], abs=1e-12)
            left = shuffle(shuffle(a, b), c)
            right = shuffle(a, shuffle(b, c))
            assert set(left.terms) == set(right.terms)
            for w in left.terms:
                assert left.terms[w] == pytest.approx(right.terms[w], abs=1e-12)

    def test_truncation_sets_flag(self):
        shape = TensorShape(2, 2)
        y = LinearFunctional(shape, {(1, 2): 1.0})
        y2 = LinearFunctional(shape, {(1,): 1.0})
        prod = shuffle(y, y2)
        assert prod.truncated
        assert prod.terms == {}

    def test_json_roundtrip(self):
        shape = TensorShape(3, 2)
        y = LinearFunctional(shape, {(1, 3): 0.25, (): -2.0})
        back = LinearFunctional.from_json(y.to_json())
        assert back.shape == shape and back.terms == y.terms


class TestPairing:
    def test_grouplike_pairs_to_one_with_empty_word(self, rng):
        shape = TensorShape(2, 3)
        g = random_group_element(shape, rng)
        assert pair(g, LinearFunctional.one(shape)) == 1.0

    def test_unit_tensor_kills_positive_words(self):
        shape = TensorShape(2, 3)
        one = TruncatedTensor.unit(shape)
        assert pair(one, LinearFunctional(shape, {(1, 2): 1.0, (2,): 2.0})) == 0.0

    def test_matches_exhaustive_word_loop(self, rng):
        shape = TensorShape(2, 3)
        x = random_tensor(shape, rng)
        terms = {}
        for k in range(shape.N + 1):
            for w in shape.words(k):
                terms[w] = float(rng.uniform(-1, 1))
        l = LinearFunctional(shape, terms)
        brute = sum(c * x.coordinate(w) for w, c in terms.items())
        assert pair(x, l) == pytest.approx(brute, rel=1e-13)


class TestShuffleClosure:
    def test_exp_of_letter_is_closed(self, rng):
        shape = TensorShape(2, 4)
        v = TruncatedTensor.from_level1(shape, [0.8, -0.3])
        g = tensor_exp(v)
        y = LinearFunctional(shape, {(1,): 1.0, (2,): 0.5})
        y2 = LinearFunctional(shape, {(2, 1): 1.0})
        assert shuffle_closure_check(g, y, y2) < 1e-12

    def test_non_lie_perturbation_breaks_closure(self):
        # bump the symmetric level-2 part of exp(e1): <x,1><x,1> != <x,(1,1)> * 2
        shape = TensorShape(2, 2)
        g = tensor_exp(TruncatedTensor.from_level1(shape, [1.0, 0.0]))
        levels = [lvl.copy() for lvl in g.levels]
        levels[2][0] += 0.25
        from pathsig import GroupElement

        bumped = GroupElement(shape, levels)
        y = LinearFunctional(shape, {(1,): 1.0})
        assert shuffle_closure_check(bumped, y, y) == pytest.approx(0.5, abs=1e-12)

    def test_empty_word_always_closed(self, rng):
        shape = TensorShape(2, 3)
        g = random_group_element(shape, rng)
        one = LinearFunctional.one(shape)
        y = LinearFunctional(shape, {(1, 2): -0.7})
        assert shuffle_closure_check(g, one, y) < 1e-14

    def test_degree_overflow_rejected(self, rng):
        shape = TensorShape(2, 2)
        g = random_group_element(shape, rng)
        y = LinearFunctional(shape, {(1, 2): 1.0})
        y2 = LinearFunctional(shape, {(1,): 1.0})
        with pytest.raises(ValueError):
            shuffle_closure_check(g, y, y2)
