"""Words, sparse linear functionals on the tensor algebra, and the shuffle product.

A word is a tuple of letters from {1..d}; the empty word () is the constant
functional.  A LinearFunctional is a sparse word -> coefficient map acting on
truncated tensors through the coordinate pairing.  Shuffling two functionals
and pairing against a group-like tensor multiplies the individual pairings;
that closure is what the regression lab leans on.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Mapping, Sequence

from .tensor import ShapeMismatchError, TensorShape, TruncatedTensor

Word = tuple[int, ...]


@lru_cache(maxsize=None)
def shuffle_words(w1: Word, w2: Word) -> tuple[tuple[Word, int], ...]:
    """Shuffle of two bare words as (word, multiplicity) pairs.

    Inductive recursion on the last letters: (u.a) sh (v.b) =
    ((u.a) sh v).b + (u sh (v.b)).a, with the empty word acting as 1.
    """
    if not w1:
        return ((w2, 1),)
    if not w2:
        return ((w1, 1),)
    out: dict[Word, int] = {}
    a, b = w1[-1], w2[-1]
    for w, c in shuffle_words(w1[:-1], w2):
        key = w + (a,)
        out[key] = out.get(key, 0) + c
    for w, c in shuffle_words(w1, w2[:-1]):
        key = w + (b,)
        out[key] = out.get(key, 0) + c
    return tuple(sorted(out.items()))


class LinearFunctional:
    """Sparse linear functional on T^(N)(R^d) in the word basis."""

    __slots__ = ("shape", "terms", "truncated")

    def __init__(
        self,
        shape: TensorShape,
        terms: Mapping[Sequence[int], float],
        *,
        truncated: bool = False,
    ):
        self.shape = shape
        clean: dict[Word, float] = {}
        for word, coeff in terms.items():
            word = tuple(int(l) for l in word)
            if len(word) > shape.N:
                raise ValueError(f"word {word} longer than truncation level {shape.N}")
            for letter in word:
                if not 1 <= letter <= shape.d:
                    raise ValueError(f"letter {letter} outside alphabet 1..{shape.d}")
            coeff = float(coeff)
            if coeff != 0.0:
                clean[word] = clean.get(word, 0.0) + coeff
        self.terms = {w: c for w, c in clean.items() if c != 0.0}
        self.truncated = bool(truncated)

    @classmethod
    def from_word(cls, shape: TensorShape, word: Sequence[int], coeff: float = 1.0):
        return cls(shape, {tuple(word): coeff})

    @classmethod
    def one(cls, shape: TensorShape) -> "LinearFunctional":
        return cls(shape, {(): 1.0})

    def degree(self) -> int:
        """Highest word length with a nonzero coefficient (0 for the zero map)."""
        return max((len(w) for w in self.terms), default=0)

    def __add__(self, other: "LinearFunctional") -> "LinearFunctional":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shapes differ: {self.shape} vs {other.shape}")
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0.0) + c
        return LinearFunctional(
            self.shape, terms, truncated=self.truncated or other.truncated
        )

    def scale(self, c: float) -> "LinearFunctional":
        return LinearFunctional(
            self.shape, {w: c * v for w, v in self.terms.items()}, truncated=self.truncated
        )

    def __repr__(self):
        return f"LinearFunctional({len(self.terms)} terms, deg={self.degree()})"

    def to_json(self) -> str:
        payload = {
            "d": self.shape.d,
            "N": self.shape.N,
            "terms": [
                {"word": list(w), "coeff": c} for w, c in sorted(self.terms.items())
            ],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LinearFunctional":
        payload = json.loads(text)
        shape = TensorShape(int(payload["d"]), int(payload["N"]))
        terms = {tuple(t["word"]): float(t["coeff"]) for t in payload["terms"]}
        return cls(shape, terms)


def shuffle(y: LinearFunctional, y2: LinearFunctional) -> LinearFunctional:
    """Bilinear extension of the word shuffle, truncated at level N.

    Product words longer than N are dropped; the result's `truncated` flag
    records whether that happened, since dropping breaks the closure
    identity the group-like tests rely on.
    """
    if y.shape != y2.shape:
        raise ShapeMismatchError(f"shapes differ: {y.shape} vs {y2.shape}")
    N = y.shape.N
    out: dict[Word, float] = {}
    dropped = False
    for w1, c1 in y.terms.items():
        for w2, c2 in y2.terms.items():
            if len(w1) + len(w2) > N:
                dropped = True
                continue
            c = c1 * c2
            for w, mult in shuffle_words(w1, w2):
                out[w] = out.get(w, 0.0) + c * mult
    return LinearFunctional(
        y.shape, out, truncated=dropped or y.truncated or y2.truncated
    )


def pair(x: TruncatedTensor, l: LinearFunctional) -> float:
    """Coordinate pairing <x, l> = sum of coeff * coordinate-of-x per word."""
    if x.shape != l.shape:
        raise ShapeMismatchError(f"shapes differ: {x.shape} vs {l.shape}")
    total = 0.0
    for word, coeff in l.terms.items():
        total += coeff * x.coordinate(word)
    return total


def shuffle_closure_check(
    x: TruncatedTensor, y: LinearFunctional, y2: LinearFunctional
) -> float:
    """Residual |<x,y><x,y2> - <x, y sh y2>| of the shuffle identity.

    Requires deg(y) + deg(y2) <= N so no shuffle term is truncated away.
    Vanishes exactly on group-like tensors.
    """
    if y.degree() + y2.degree() > x.shape.N:
        raise ValueError(
            f"degree overflow: {y.degree()} + {y2.degree()} > N={x.shape.N}"
        )
    prod = shuffle(y, y2)
    return abs(pair(x, y) * pair(x, y2) - pair(x, prod))
