"""Crossnorms on tensor levels and homogeneous Hoelder norms on rough paths.

Three level-norm families are supported:

* ``hilbert`` -- the Euclidean norm of the flat coefficient block; exact.
* ``projective`` -- a certified upper bound from a greedy rank-one peeling
  (exact nuclear norm at level 2, exact for rank-one blocks at any level).
* ``injective`` -- a certified lower bound from alternating maximization of
  |<block, u_1 x ... x u_k>| over unit vectors (exact spectral norm at
  level 2, exact for rank-one blocks).

The bounds are one-sided by construction, so the ordering
injective <= hilbert <= projective always holds on the computed values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .tensor import TensorShape, TruncatedTensor

CROSSNORM_KINDS = ("hilbert", "projective", "injective")

#: Default configuration keys understood by the CLI / lab layers.
DEFAULT_CONFIG = {
    "norm.kind": "hilbert",
    "norm.restarts": 32,
    "norm.seed": 0,
    "hoelder.dyadic_depth": 10,
}


def _infer_order(block: np.ndarray, d: int) -> int:
    k = round(math.log(block.size, d)) if d > 1 else block.size
    if d == 1:
        if block.size != 1:
            raise ValueError("d=1 level blocks must have a single entry")
        return 1
    if d ** k != block.size:
        raise ValueError(f"block size {block.size} is not a power of d={d}")
    return k


def _als_rank_one(block: np.ndarray, d: int, k: int, restarts: int, seed: int):
    """Best |<block, u_1 x...x u_k>| over unit u_i, by alternating maximization.

    Returns (value, directions).  Each restart ascends monotonically, so the
    best value over restarts is a certified lower bound for the injective
    norm; it is exact whenever the block is rank one.
    """
    tensor = block.reshape((d,) * k)
    rng = np.random.default_rng(seed)
    best_val = 0.0
    best_dirs = [np.zeros(d) for _ in range(k)]
    if d == 1:
        v = float(abs(tensor.ravel()[0]))
        return v, [np.ones(1) for _ in range(k)]
    for _ in range(max(1, restarts)):
        dirs = [rng.standard_normal(d) for _ in range(k)]
        dirs = [u / np.linalg.norm(u) for u in dirs]
        val = 0.0
        degenerate = False
        for _ in range(60):
            prev = val
            for axis in range(k):
                # contract every other slot; descending order keeps positions stable
                contracted = tensor
                for other in range(k - 1, -1, -1):
                    if other == axis:
                        continue
                    contracted = np.tensordot(contracted, dirs[other], axes=(other, 0))
                norm = np.linalg.norm(contracted)
                if norm == 0.0:
                    degenerate = True
                    break
                dirs[axis] = contracted / norm
                val = norm
            if degenerate or abs(val - prev) <= 1e-14 * max(1.0, val):
                break
        if val > best_val:
            best_val = val
            best_dirs = dirs
    return float(best_val), best_dirs


def _outer_all(dirs: Sequence[np.ndarray]) -> np.ndarray:
    out = dirs[0]
    for u in dirs[1:]:
        out = np.multiply.outer(out, u)
    return out


def level_norm(
    block: np.ndarray,
    d: int,
    kind: str = "hilbert",
    *,
    restarts: int = 32,
    seed: int = 0,
) -> float:
    """Norm of a level-k coefficient block (k >= 1) under the chosen family."""
    block = np.asarray(block, dtype=np.float64).ravel()
    if block.size == 1 and d > 1:
        raise ValueError("level-0 blocks are scalars; use abs() upstream")
    if kind not in CROSSNORM_KINDS:
        raise ValueError(f"unknown crossnorm kind {kind!r}")
    k = _infer_order(block, d)
    if not block.any():
        return 0.0
    if kind == "hilbert" or k == 1:
        return float(np.linalg.norm(block))
    if k == 2:
        sv = np.linalg.svd(block.reshape(d, d), compute_uv=False)
        return float(sv[0]) if kind == "injective" else float(np.sum(sv))
    if kind == "injective":
        val, _ = _als_rank_one(block, d, k, restarts, seed)
        return val
    return _projective_upper(block, d, k, restarts, seed)[0]


def _projective_upper(block, d, k, restarts, seed):
    """Greedy rank-one peeling; any leftover is capped by its coefficient l1 mass.

    Every basis word is an elementary tensor of unit factors, so the l1 norm
    of the coefficients is itself a valid projective upper bound; the greedy
    terms only ever tighten it.
    """
    l1 = float(np.sum(np.abs(block)))
    residual = block.copy()
    total = 0.0
    terms = []
    for step in range(4 * d):
        if np.linalg.norm(residual) <= 1e-13 * max(1.0, np.linalg.norm(block)):
            break
        val, dirs = _als_rank_one(residual, d, k, restarts, seed + step)
        if val <= 1e-15:
            break
        rank_one = _outer_all(dirs).ravel()
        coeff = float(np.dot(residual, rank_one))
        residual = residual - coeff * rank_one
        total += abs(coeff)
        terms.append((coeff, dirs))
    total += float(np.sum(np.abs(residual)))
    if total >= l1:
        return l1, []
    return total, terms


def level_norm_certificate(
    block: np.ndarray, d: int, kind: str, *, restarts: int = 32, seed: int = 0
) -> dict:
    """Like level_norm but returns the bound together with its witness.

    injective: unit directions attaining the reported lower bound.
    projective: rank-one terms (coefficient, directions) of the peeled
    decomposition certifying the upper bound.
    """
    block = np.asarray(block, dtype=np.float64).ravel()
    k = _infer_order(block, d)
    if kind == "injective":
        val, dirs = _als_rank_one(block, d, k, restarts, seed)
        return {"value": val, "bound": "lower", "directions": dirs}
    if kind == "projective":
        val, terms = _projective_upper(block, d, k, restarts, seed)
        return {"value": val, "bound": "upper", "terms": terms}
    return {"value": float(np.linalg.norm(block)), "bound": "exact", "terms": None}


def tensor_norm(t: TruncatedTensor, kind: str = "hilbert", **kw) -> float:
    """Direct-sum norm on T^(N): |level-0| plus the sum of level norms."""
    total = abs(t.level0)
    for k in range(1, t.shape.N + 1):
        block = t.levels[k]
        if block.any():
            total += level_norm(block, t.shape.d, kind, **kw)
    return total


# ---------------------------------------------------------------------------
# Hoelder norms for multiplicative functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoelderParams:
    """Exponent, horizon and the finite grid the supremum is scanned over."""

    alpha: float
    T: float
    grid: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.T <= 0:
            raise ValueError("horizon must be positive")
        g = tuple(float(t) for t in self.grid)
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing")
        if g and (g[0] < 0.0 or g[-1] > self.T + 1e-12):
            raise ValueError("grid must lie inside [0, T]")
        object.__setattr__(self, "grid", g)


def hoelder_grid(
    breakpoints: Sequence[float], T: float, dyadic_depth: int = 0
) -> tuple[float, ...]:
    """Breakpoints merged with a dyadic subdivision of [0, T]."""
    pts = set(float(t) for t in breakpoints)
    pts.update((0.0, float(T)))
    n = 2 ** max(0, dyadic_depth)
    pts.update(T * k / n for k in range(n + 1))
    return tuple(sorted(pts))


def _pair_increments(x, grid):
    """All increments x_{s,t} for grid pairs s < t, via Chen from x_{t0, .}."""
    base = [x.eval(grid[0], t) for t in grid]
    inverses = [g.inverse() for g in base]
    out = {}
    for i in range(len(grid)):
        for j in range(i + 1, len(grid)):
            out[(i, j)] = inverses[i].mul(base[j])
    return out


def hoelder_norm(x, p: HoelderParams, kind: str = "hilbert", **kw) -> float:
    """Homogeneous alpha-Hoelder norm over the grid pairs of `p`.

    max over levels i and pairs u < v of (||x^(i)_{u,v}||_i / (v-u)^{i a})^{1/i}.
    The finite grid makes this a lower approximation of the true supremum;
    refining the grid can only increase it.
    """
    if len(p.grid) < 2:
        raise ValueError("need at least two grid points")
    incs = _pair_increments(x, p.grid)
    best = 0.0
    for (i, j), g in incs.items():
        dt = p.grid[j] - p.grid[i]
        for lvl in range(1, x.shape.N + 1):
            block = g.levels[lvl]
            if not block.any():
                continue
            val = level_norm(block, x.shape.d, kind, **kw) / dt ** (lvl * p.alpha)
            best = max(best, val ** (1.0 / lvl))
    return best


def hoelder_metric(x, y, p: HoelderParams, kind: str = "hilbert", **kw) -> float:
    """Homogeneous Hoelder distance: the norm formula on levelwise differences."""
    if x.shape != y.shape:
        raise ValueError(f"shapes differ: {x.shape} vs {y.shape}")
    if len(p.grid) < 2:
        raise ValueError("need at least two grid points")
    incs_x = _pair_increments(x, p.grid)
    incs_y = _pair_increments(y, p.grid)
    best = 0.0
    for key, gx in incs_x.items():
        gy = incs_y[key]
        dt = p.grid[key[1]] - p.grid[key[0]]
        for lvl in range(1, x.shape.N + 1):
            block = gx.levels[lvl] - gy.levels[lvl]
            if not block.any():
                continue
            val = level_norm(block, x.shape.d, kind, **kw) / dt ** (lvl * p.alpha)
            best = max(best, val ** (1.0 / lvl))
    return best


# ---------------------------------------------------------------------------
# Time extension plumbing
# ---------------------------------------------------------------------------


def time_extension_split(block: np.ndarray, d: int):
    """Split a level-2 block over R^(1+d) into (tt, t x, x t, x x) parts.

    Coordinate 0 is the time letter.  The splitting is pure bookkeeping and
    inverts bit-exactly via time_extension_merge.
    """
    block = np.asarray(block, dtype=np.float64).reshape(1 + d, 1 + d)
    tt = float(block[0, 0])
    t_space = block[0, 1:].copy()
    space_t = block[1:, 0].copy()
    space_space = block[1:, 1:].ravel().copy()
    return tt, t_space, space_t, space_space


def time_extension_merge(tt, t_space, space_t, space_space, d: int) -> np.ndarray:
    """Inverse of time_extension_split."""
    block = np.empty((1 + d, 1 + d), dtype=np.float64)
    block[0, 0] = tt
    block[0, 1:] = np.asarray(t_space, dtype=np.float64)
    block[1:, 0] = np.asarray(space_t, dtype=np.float64)
    block[1:, 1:] = np.asarray(space_space, dtype=np.float64).reshape(d, d)
    return block.ravel()


# ---------------------------------------------------------------------------
# Failure of operator-norm multiplicativity for a mixed norm pair
# ---------------------------------------------------------------------------

# Fixed construction on R + R^2 with the norm |t| + max(|x|, |y|) and the
# matching mixed norm on the 3x3 level-2 blocks.  The linear map
# phi(t, x, y) = (x+y, x-y, x-y) has operator norm 2, yet phi x phi blows a
# unit tensor up to norm 8 > 2*2, so this norm pair cannot be extended
# multiplicatively to operators.  Every quantity below is evaluated in
# integer arithmetic.

_PHI = np.array([[0, 1, 1], [0, 1, -1], [0, 1, -1]], dtype=np.int64)
_A = np.array([[0, 0, 0], [0, 1, 1], [0, 1, -1]], dtype=np.int64)

# Extreme points of the unit ball of |t| + max(|x|, |y|); a convex norm
# attains its maximum over the ball at these vertices.
_BALL_VERTICES = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 1], [0, 1, -1], [0, -1, 1], [0, -1, -1]],
    dtype=np.int64,
)


def _vec_norm_mixed(v) -> int:
    return abs(int(v[0])) + max(abs(int(v[1])), abs(int(v[2])))


def _block_norm_mixed(a) -> int:
    return (
        abs(int(a[0, 0]))
        + max(abs(int(a[0, 1])), abs(int(a[0, 2])))
        + max(abs(int(a[1, 0])), abs(int(a[2, 0])))
        + max(abs(int(a[1, 1])), abs(int(a[1, 2])), abs(int(a[2, 1])), abs(int(a[2, 2])))
    )


def uniformity_counterexample() -> dict:
    """Integer-exact demonstration that the mixed norm pair is not uniform.

    Returns the operator norm of the map, the mixed norm of the test tensor,
    and the mixed norm of its image under map x map (2, 1 and 8).
    """
    operator_norm = max(_vec_norm_mixed(_PHI @ v) for v in _BALL_VERTICES)
    argument_norm = _block_norm_mixed(_A)
    image = _PHI @ _A @ _PHI.T
    image_norm = _block_norm_mixed(image)
    return {
        "operator_norm": float(operator_norm),
        "argument_norm": float(argument_norm),
        "image_norm": float(image_norm),
    }
