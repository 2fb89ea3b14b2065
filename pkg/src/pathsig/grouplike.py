"""Membership tests for group-like tensors, by three independent routes.

* weak_grouplike_residual -- pairing route: the product of two word
  pairings must equal the pairing against their shuffle.
* block_shuffle_residual -- coefficient route: the outer product of two
  level blocks must equal the sum of shuffled slot permutations of the
  joint block.
* log_lie_residual -- Lie route: the log must be a Lie polynomial, tested
  levelwise with the right-bracketing projector (a degree-m homogeneous
  tensor is a Lie element iff right-bracketing returns m times itself).

In finite dimensions the three residuals vanish on exactly the same
elements; the agreement is itself a tested property.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from .tensor import GroupElement, TensorShape, TruncatedTensor, tensor_log
from .words import LinearFunctional, shuffle_closure_check


@lru_cache(maxsize=None)
def shuffle_permutations(m: int, l: int) -> tuple[tuple[int, ...], ...]:
    """All (m, l)-shuffles as permutations of range(m + l).

    sigma sends slots 0..m-1 and slots m..m+l-1 to increasing positions.
    """
    out = []
    for positions in combinations(range(m + l), m):
        rest = [p for p in range(m + l) if p not in positions]
        out.append(tuple(positions) + tuple(rest))
    return tuple(out)


def weak_grouplike_residual(x: GroupElement, max_total_degree: int | None = None) -> float:
    """Max shuffle-closure residual over all basis word pairs.

    Exhausts pairs (w1, w2) with len(w1) + len(w2) <= N (or the given cap);
    group-like inputs give 0 up to roundoff.
    """
    shape = x.shape
    cap = shape.N if max_total_degree is None else min(max_total_degree, shape.N)
    functionals = {
        k: [LinearFunctional.from_word(shape, w) for w in shape.words(k)]
        for k in range(cap + 1)
    }
    worst = 0.0
    for a in range(cap + 1):
        for b in range(cap + 1 - a):
            for y in functionals[a]:
                for y2 in functionals[b]:
                    worst = max(worst, shuffle_closure_check(x, y, y2))
    return worst


def block_shuffle_residual(x: GroupElement) -> float:
    """Max residual of outer(x^(m), x^(l)) = sum of slot-shuffles of x^(m+l).

    Measured in the Euclidean block norm over all m + l <= N with m, l >= 1.
    """
    shape = x.shape
    d = shape.d
    worst = 0.0
    for m in range(1, shape.N):
        for l in range(1, shape.N + 1 - m):
            lhs = np.outer(x.levels[m], x.levels[l]).ravel()
            top = x.levels[m + l].reshape((d,) * (m + l))
            rhs = np.zeros_like(top)
            for perm in shuffle_permutations(m, l):
                rhs = rhs + top.transpose(perm)
            worst = max(worst, float(np.linalg.norm(lhs - rhs.ravel())))
    return worst


@lru_cache(maxsize=None)
def _bracketing_table(d: int, m: int):
    """Expansion of w -> [e_{w_1}, [e_{w_2}, ..., e_{w_m}]] in the word basis.

    Returns (indices, signs, out_words) as flat arrays: input word index i
    scatters sign[j] into output word index out[j] for each expansion term.
    """
    shape = TensorShape(d, m)
    rows = []
    cols = []
    signs = []
    for i, word in enumerate(shape.words(m)):
        # terms of the right-nested bracket, built back to front
        terms = {word[-1:]: 1}
        for letter in reversed(word[:-1]):
            new: dict[tuple, int] = {}
            for w, sgn in terms.items():
                left = (letter,) + w
                right = w + (letter,)
                new[left] = new.get(left, 0) + sgn
                new[right] = new.get(right, 0) - sgn
            terms = new
        for w, sgn in terms.items():
            if sgn:
                rows.append(shape.word_index(w))
                cols.append(i)
                signs.append(sgn)
    return (
        np.asarray(rows, dtype=np.intp),
        np.asarray(cols, dtype=np.intp),
        np.asarray(signs, dtype=np.float64),
    )


def right_bracketing(block: np.ndarray, d: int, m: int) -> np.ndarray:
    """Apply the right-nested bracketing map to a level-m block."""
    block = np.asarray(block, dtype=np.float64).ravel()
    if block.size != d ** m:
        raise ValueError(f"block size {block.size} != d^m = {d ** m}")
    rows, cols, signs = _bracketing_table(d, m)
    out = np.zeros_like(block)
    np.add.at(out, rows, signs * block[cols])
    return out


def dynkin_residuals(x: TruncatedTensor) -> list[float]:
    """Per-level Lie-membership residuals ||D(x^(m)) - m x^(m)|| for m >= 1.

    Zero at level m exactly when the level-m block is a Lie element.
    """
    if x.levels[0][0] != 0.0:
        raise ValueError("Lie membership applies to tensors with zero level-0")
    out = []
    for m in range(1, x.shape.N + 1):
        block = x.levels[m]
        if m == 1:
            out.append(0.0)
            continue
        defect = right_bracketing(block, x.shape.d, m) - m * block
        out.append(float(np.linalg.norm(defect)))
    return out


def log_lie_residual(x: GroupElement) -> float:
    """Max Dynkin residual of log(x); the exp-of-Lie-series membership test."""
    residuals = dynkin_residuals(tensor_log(x))
    return max(residuals, default=0.0)
