"""Truncated tensor algebra over R^d.

Elements are sequences of dense coefficient blocks, one block per tensor
level 0..N.  The level-k block is a flat array of length d**k indexed
lexicographically by words over the alphabet {1, ..., d}.  Multiplication
is the Cauchy product of levels, truncated at level N; every formal series
appearing here (inverse, exponential, logarithm) is therefore a finite sum
and is evaluated exactly, not approximately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class ShapeMismatchError(ValueError):
    """Two tensors with different (d, N) were combined."""


@dataclass(frozen=True)
class TensorShape:
    """Alphabet size d and truncation level N."""

    d: int
    N: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"alphabet size must be >= 1, got d={self.d}")
        if self.N < 0:
            raise ValueError(f"truncation level must be >= 0, got N={self.N}")

    def level_size(self, k: int) -> int:
        return self.d ** k

    @property
    def total_size(self) -> int:
        return sum(self.d ** k for k in range(self.N + 1))

    def words(self, k: int) -> Iterator[tuple[int, ...]]:
        """All words of length k over {1..d}, in lexicographic order."""
        if k == 0:
            yield ()
            return
        idx = [1] * k
        while True:
            yield tuple(idx)
            j = k - 1
            while j >= 0 and idx[j] == self.d:
                idx[j] = 1
                j -= 1
            if j < 0:
                return
            idx[j] += 1

    def word_index(self, word: Sequence[int]) -> int:
        """Flat index of a word inside its level block."""
        pos = 0
        for letter in word:
            if not 1 <= letter <= self.d:
                raise ValueError(f"letter {letter} outside alphabet 1..{self.d}")
            pos = pos * self.d + (letter - 1)
        return pos


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class TruncatedTensor:
    """Immutable element of the truncated tensor algebra."""

    __slots__ = ("shape", "levels")

    def __init__(self, shape: TensorShape, levels: Iterable[np.ndarray], *, _trust: bool = False):
        self.shape = shape
        if _trust:
            self.levels = tuple(levels)
            return
        blocks = []
        for k, block in enumerate(levels):
            block = np.asarray(block, dtype=np.float64).ravel()
            if block.size != shape.level_size(k):
                raise ValueError(
                    f"level {k} has {block.size} entries, expected {shape.level_size(k)}"
                )
            if not np.all(np.isfinite(block)):
                raise ValueError(f"level {k} contains non-finite entries")
            blocks.append(_freeze(block))
        if len(blocks) != shape.N + 1:
            raise ValueError(f"expected {shape.N + 1} levels, got {len(blocks)}")
        self.levels = tuple(blocks)

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, shape: TensorShape) -> "TruncatedTensor":
        return cls(shape, [np.zeros(shape.level_size(k)) for k in range(shape.N + 1)])

    @classmethod
    def unit(cls, shape: TensorShape) -> "TruncatedTensor":
        levels = [np.zeros(shape.level_size(k)) for k in range(shape.N + 1)]
        levels[0][0] = 1.0
        return cls(shape, levels)

    @classmethod
    def scalar(cls, shape: TensorShape, c: float) -> "TruncatedTensor":
        levels = [np.zeros(shape.level_size(k)) for k in range(shape.N + 1)]
        levels[0][0] = float(c)
        return cls(shape, levels)

    @classmethod
    def from_level1(cls, shape: TensorShape, v: np.ndarray) -> "TruncatedTensor":
        """Embed a vector of R^d at level 1 (levels 0 and >=2 are zero)."""
        v = np.asarray(v, dtype=np.float64).ravel()
        if v.size != shape.d:
            raise ValueError(f"vector has size {v.size}, expected d={shape.d}")
        if shape.N < 1:
            raise ValueError("shape must have N >= 1 to hold a level-1 vector")
        levels = [np.zeros(shape.level_size(k)) for k in range(shape.N + 1)]
        levels[1] = v
        return cls(shape, levels)

    # ----- basic access -------------------------------------------------

    @property
    def level0(self) -> float:
        return float(self.levels[0][0])

    def level(self, k: int) -> np.ndarray:
        return self.levels[k]

    def coordinate(self, word: Sequence[int]) -> float:
        k = len(word)
        if k > self.shape.N:
            raise ValueError(f"word of length {k} exceeds truncation level {self.shape.N}")
        return float(self.levels[k][self.shape.word_index(word)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedTensor):
            return NotImplemented
        return self.shape == other.shape and all(
            np.array_equal(a, b) for a, b in zip(self.levels, other.levels)
        )

    def __hash__(self):
        return hash((self.shape, tuple(lvl.tobytes() for lvl in self.levels)))

    def __repr__(self):
        return f"TruncatedTensor(d={self.shape.d}, N={self.shape.N}, level0={self.level0:g})"

    def _check_same_shape(self, other: "TruncatedTensor") -> None:
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shapes differ: {self.shape} vs {other.shape}")

    # ----- ring operations ----------------------------------------------

    def __add__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        self._check_same_shape(other)
        return TruncatedTensor(
            self.shape,
            [_freeze(a + b) for a, b in zip(self.levels, other.levels)],
            _trust=True,
        )

    def __sub__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        self._check_same_shape(other)
        return TruncatedTensor(
            self.shape,
            [_freeze(a - b) for a, b in zip(self.levels, other.levels)],
            _trust=True,
        )

    def __neg__(self) -> "TruncatedTensor":
        return self.scale(-1.0)

    def scale(self, c: float) -> "TruncatedTensor":
        return TruncatedTensor(
            self.shape, [_freeze(c * lvl) for lvl in self.levels], _trust=True
        )

    def mul(self, other: "TruncatedTensor") -> "TruncatedTensor":
        """Cauchy product of levels, truncated at N.

        The level-k block of the result is sum_{i+j=k} outer(a_i, b_j);
        flattening the outer product of lexicographic blocks is again
        lexicographic, so no reindexing is needed.
        """
        self._check_same_shape(other)
        shape = self.shape
        out = [np.zeros(shape.level_size(k)) for k in range(shape.N + 1)]
        for i, a in enumerate(self.levels):
            if not a.any():
                continue
            for j in range(shape.N + 1 - i):
                b = other.levels[j]
                if not b.any():
                    continue
                k = i + j
                if i == 0:
                    out[k] += a[0] * b
                elif j == 0:
                    out[k] += b[0] * a
                else:
                    out[k] += np.outer(a, b).ravel()
        return TruncatedTensor(shape, [_freeze(lvl) for lvl in out], _trust=True)

    def __matmul__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        return self.mul(other)

    # ----- level bookkeeping ----------------------------------------------

    def project(self, m: int) -> "TruncatedTensor":
        """Truncate to levels 0..m (the natural quotient projection)."""
        if m > self.shape.N:
            raise ValueError(f"cannot project to level {m} > N={self.shape.N}")
        if m < 0:
            raise ValueError("projection level must be >= 0")
        return TruncatedTensor(
            TensorShape(self.shape.d, m), self.levels[: m + 1], _trust=True
        )

    def pad(self, m: int) -> "TruncatedTensor":
        """Extend to truncation level m >= N with zero blocks."""
        if m < self.shape.N:
            raise ValueError(f"cannot pad to level {m} < N={self.shape.N}")
        shape = TensorShape(self.shape.d, m)
        levels = list(self.levels) + [
            _freeze(np.zeros(shape.level_size(k))) for k in range(self.shape.N + 1, m + 1)
        ]
        return TruncatedTensor(shape, levels, _trust=True)

    def permute_level(self, k: int, perm: Sequence[int]) -> "TruncatedTensor":
        """Reindex the level-k block by a permutation of tensor slots.

        `perm` is a permutation of range(k); slot i of the output word is
        slot perm[i] of the input word, i.e. basis words map as
        e_{w_1} x ... x e_{w_k}  ->  e_{w_{perm[0]+1}} x ... x e_{w_{perm[k-1]+1}}.
        """
        if not 0 <= k <= self.shape.N:
            raise ValueError(f"level {k} out of range 0..{self.shape.N}")
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(k)):
            raise ValueError(f"{perm} is not a permutation of range({k})")
        if k <= 1:
            return self
        d = self.shape.d
        block = self.levels[k].reshape((d,) * k)
        # result[u] = block[u o perm^{-1}], i.e. transpose with axes = perm
        new_block = block.transpose(perm).ravel()
        levels = list(self.levels)
        levels[k] = _freeze(new_block.copy())
        return TruncatedTensor(self.shape, levels, _trust=True)

    def hilbert_norm(self) -> float:
        """Direct-sum norm: sum over levels of the Euclidean block norm."""
        return float(sum(np.linalg.norm(lvl) for lvl in self.levels))

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(lvl)) if lvl.size else 0.0 for lvl in self.levels))

    # ----- serialization --------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "d": self.shape.d,
            "N": self.shape.N,
            "levels": [lvl.tolist() for lvl in self.levels],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TruncatedTensor":
        payload = json.loads(text)
        shape = TensorShape(int(payload["d"]), int(payload["N"]))
        return cls(shape, [np.asarray(lvl, dtype=np.float64) for lvl in payload["levels"]])


class GroupElement(TruncatedTensor):
    """Truncated tensor with level-0 entry exactly 1 (hence invertible)."""

    def __init__(self, shape, levels, *, _trust: bool = False):
        super().__init__(shape, levels, _trust=_trust)
        if self.levels[0][0] != 1.0:
            raise ValueError(f"group element needs level-0 == 1, got {self.levels[0][0]!r}")

    @classmethod
    def from_tensor(cls, t: TruncatedTensor) -> "GroupElement":
        return cls(t.shape, t.levels, _trust=True)

    @classmethod
    def identity(cls, shape: TensorShape) -> "GroupElement":
        return cls.from_tensor(TruncatedTensor.unit(shape))

    def mul(self, other: TruncatedTensor) -> TruncatedTensor:
        out = super().mul(other)
        if isinstance(other, GroupElement):
            return GroupElement.from_tensor(out)
        return out

    def project(self, m: int) -> "GroupElement":
        return GroupElement.from_tensor(super().project(m))

    def pad(self, m: int) -> "GroupElement":
        return GroupElement.from_tensor(super().pad(m))

    def inverse(self) -> "GroupElement":
        return tensor_inverse(self)

    def log(self) -> TruncatedTensor:
        return tensor_log(self)


def tensor_inverse(a: GroupElement) -> GroupElement:
    """Group inverse: the geometric series in (1 - a), finite after N terms.

    (1 - a) has zero level-0 entry, so its powers vanish above level N and
    the series is evaluated exactly by Horner accumulation.
    """
    shape = a.shape
    one = TruncatedTensor.unit(shape)
    u = one - a
    acc = one
    for _ in range(shape.N):
        acc = one + u.mul(acc)
    return GroupElement.from_tensor(acc)


def tensor_exp(a: TruncatedTensor) -> GroupElement:
    """Exponential power series, truncated exactly at level N.

    Requires a zero level-0 entry, so a^k contributes nothing below level k.
    """
    if a.levels[0][0] != 0.0:
        raise ValueError(f"exponential needs level-0 == 0, got {a.levels[0][0]!r}")
    shape = a.shape
    one = TruncatedTensor.unit(shape)
    acc = one
    for k in range(shape.N, 0, -1):
        acc = one + a.mul(acc).scale(1.0 / k)
    return GroupElement.from_tensor(acc)


def tensor_log(a: GroupElement) -> TruncatedTensor:
    """Logarithm: the series inverse of tensor_exp, finite after N terms.

    log(a) = -sum_{n>=1} (1-a)^n / n, with (1-a) nilpotent in the truncated
    algebra.  Satisfies exp(log(a)) == a up to floating error.
    """
    shape = a.shape
    if shape.N == 0:
        return TruncatedTensor.zero(shape)
    one = TruncatedTensor.unit(shape)
    u = one - a
    acc = TruncatedTensor.scalar(shape, 1.0 / shape.N)
    for n in range(shape.N - 1, 0, -1):
        acc = TruncatedTensor.scalar(shape, 1.0 / n) + u.mul(acc)
    return u.mul(acc).scale(-1.0)
