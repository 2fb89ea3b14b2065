"""Piecewise-linear paths, exact signatures, and multiplicative functionals.

Signatures of piecewise-linear paths are closed form: the signature of a
linear piece is the exponential of its increment, and pieces concatenate by
the tensor product (Chen).  That exactness is what every approximate
construction in this module (the partition-limit lift, the Hoelder scans)
is tested against.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import norms
from .tensor import GroupElement, TensorShape, TruncatedTensor


class PathFormatError(ValueError):
    """A path file or array violated the expected layout."""


class PiecewiseLinearPath:
    """Samples (t_i, x_i) with x linearly interpolated between them."""

    __slots__ = ("times", "points")

    def __init__(self, times: Sequence[float], points: np.ndarray):
        times = np.asarray(times, dtype=np.float64).ravel()
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if times.size < 2:
            raise PathFormatError("need at least two samples")
        if points.shape[0] != times.size:
            raise PathFormatError(
                f"{times.size} times but {points.shape[0]} sample points"
            )
        if not np.all(np.diff(times) > 0):
            raise PathFormatError("times must be strictly increasing")
        if times[0] != 0.0:
            raise PathFormatError(f"paths start at time 0, got {times[0]}")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(points))):
            raise PathFormatError("non-finite sample values")
        self.times = times
        self.points = points
        self.times.setflags(write=False)
        self.points.setflags(write=False)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def value(self, t: float) -> np.ndarray:
        """Linear interpolation at time t in [0, T]."""
        if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
            raise ValueError(f"time {t} outside [0, {self.T}]")
        t = min(max(t, self.times[0]), self.times[-1])
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        i = min(i, self.times.size - 2)
        u, v = self.times[i], self.times[i + 1]
        w = (t - u) / (v - u)
        return (1.0 - w) * self.points[i] + w * self.points[i + 1]

    def increment(self, s: float, t: float) -> np.ndarray:
        return self.value(t) - self.value(s)

    def segment_times(self, s: float, t: float) -> np.ndarray:
        """s, the interior breakpoints in (s, t), and t."""
        inner = self.times[(self.times > s + 1e-15) & (self.times < t - 1e-15)]
        return np.concatenate(([s], inner, [t]))

    def with_time_coordinate(self) -> "PiecewiseLinearPath":
        """The same path with running time prepended as coordinate 0."""
        return PiecewiseLinearPath(
            self.times, np.column_stack([self.times, self.points])
        )

    # ----- CSV interface: header "t,x1,...,xd", one row per sample -----

    @classmethod
    def from_csv(cls, text: str) -> "PiecewiseLinearPath":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise PathFormatError("empty path file")
        header = [h.strip() for h in lines[0].split(",")]
        if header[0] != "t" or len(header) < 2:
            raise PathFormatError(
                f"header row must be 't,x1,...,xd', got {lines[0]!r}"
            )
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            if len(cells) != len(header):
                raise PathFormatError(
                    f"row {lineno}: expected {len(header)} columns, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise PathFormatError(f"row {lineno}: {exc}") from None
        if len(rows) < 2:
            raise PathFormatError("need at least two sample rows")
        data = np.asarray(rows)
        try:
            return cls(data[:, 0], data[:, 1:])
        except PathFormatError as exc:
            raise PathFormatError(f"invalid sample rows: {exc}") from None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t," + ",".join(f"x{i + 1}" for i in range(self.d)) + "\n")
        for t, row in zip(self.times, self.points):
            buf.write(",".join(repr(float(v)) for v in [t, *row]) + "\n")
        return buf.getvalue()


def _exp_level1(shape: TensorShape, v: np.ndarray) -> GroupElement:
    """exp of a level-1 vector: level k is v^(x k) / k!, computed directly."""
    levels = [np.ones(1)]
    block = np.ones(1)
    for k in range(1, shape.N + 1):
        block = np.outer(block, v).ravel() / k
        levels.append(block)
    return GroupElement(shape, levels)


def signature_pl(
    path: PiecewiseLinearPath, N: int, s: float | None = None, t: float | None = None
) -> GroupElement:
    """Exact signature of the path over [s, t], truncated at level N.

    Concatenation of per-piece exponentials; for s > t the inverse of the
    forward signature is returned.
    """
    if s is None:
        s = 0.0
    if t is None:
        t = path.T
    lo, hi = min(s, t), max(s, t)
    if lo < -1e-12 or hi > path.T + 1e-12:
        raise ValueError(f"[{s}, {t}] outside the path horizon [0, {path.T}]")
    shape = TensorShape(path.d, N)
    if s == t:
        return GroupElement.identity(shape)
    grid = path.segment_times(lo, hi)
    sig = GroupElement.identity(shape)
    for u, v in zip(grid[:-1], grid[1:]):
        sig = sig.mul(_exp_level1(shape, path.increment(u, v)))
    if s > t:
        sig = sig.inverse()
    return sig


@dataclass(frozen=True, eq=False)
class MultiplicativeFunctional:
    """Two-parameter family (s,t) -> group element satisfying Chen's relation.

    `evaluate` must be pure.  `breakpoints` lists times where the underlying
    object is non-smooth; partition constructions snap to them.
    """

    shape: TensorShape
    evaluate: Callable[[float, float], GroupElement]
    T: float
    tag: str = "custom"
    breakpoints: Optional[np.ndarray] = None

    def eval(self, s: float, t: float) -> GroupElement:
        return self.evaluate(s, t)

    def project(self, m: int) -> "MultiplicativeFunctional":
        if m > self.shape.N:
            raise ValueError(f"cannot project to level {m} > N={self.shape.N}")
        return MultiplicativeFunctional(
            shape=TensorShape(self.shape.d, m),
            evaluate=lambda s, t: self.evaluate(s, t).project(m),
            T=self.T,
            tag=self.tag,
            breakpoints=self.breakpoints,
        )


def exact_pl_functional(path: PiecewiseLinearPath, N: int) -> MultiplicativeFunctional:
    """The exact signature of a piecewise-linear path as a functional."""
    shape = TensorShape(path.d, N)
    return MultiplicativeFunctional(
        shape=shape,
        evaluate=lambda s, t: signature_pl(path, N, s, t),
        T=path.T,
        tag="exact_pl",
        breakpoints=path.times,
    )


def pure_area_functional(
    d: int, T: float, i: int = 1, j: int = 2, scale: float = 1.0
) -> MultiplicativeFunctional:
    """Zero-increment functional whose level 2 grows like (t-s) times an area.

    x^(1) = 0 and x^(2)_{s,t} = (t-s) * scale * (e_i x e_j - e_j x e_i);
    Chen holds because the level-2 blocks add and no cross terms appear.
    """
    if not (1 <= i <= d and 1 <= j <= d) or i == j:
        raise ValueError(f"need distinct letters 1 <= i,j <= {d}")
    shape = TensorShape(d, 2)
    area = np.zeros(d * d)
    area[(i - 1) * d + (j - 1)] = scale
    area[(j - 1) * d + (i - 1)] = -scale

    def evaluate(s: float, t: float) -> GroupElement:
        return GroupElement(
            shape, [np.ones(1), np.zeros(d), (t - s) * area]
        )

    return MultiplicativeFunctional(
        shape=shape, evaluate=evaluate, T=T, tag="pure_area", breakpoints=None
    )


def chen_check(
    x: MultiplicativeFunctional,
    triples: Sequence[tuple[float, float, float]],
    kind: str = "hilbert",
) -> float:
    """Max direct-sum-norm residual of x_{s,u} (x) x_{u,t} = x_{s,t}."""
    worst = 0.0
    for s, u, t in triples:
        lhs = x.eval(s, u).mul(x.eval(u, t))
        residual = norms.tensor_norm(lhs - x.eval(s, t), kind)
        worst = max(worst, residual)
    return worst


def default_triples(T: float, n: int, seed: int = 0) -> list[tuple[float, float, float]]:
    """Sorted random triples in [0, T], including a degenerate one."""
    rng = np.random.default_rng(seed)
    triples = [tuple(sorted(rng.uniform(0.0, T, 3))) for _ in range(n)]
    triples.append((T / 2, T / 2, T / 2))
    return triples


# ---------------------------------------------------------------------------
# Lift to higher levels as a partition-product limit
# ---------------------------------------------------------------------------


def _partition(s: float, t: float, depth: int, breakpoints, T: float) -> np.ndarray:
    """Trace of the depth-level dyadic grid of [0, T] (plus breakpoints) on [s, t].

    Anchoring all queries on one global grid keeps nested lifts consistent:
    evaluating at consecutive grid points returns the factors themselves, so
    lifting level by level agrees with lifting in one pass.
    """
    grid = np.linspace(0.0, T, 2 ** depth + 1)
    pts = {s, t}
    pts.update(grid[(grid > s + 1e-15) & (grid < t - 1e-15)].tolist())
    if breakpoints is not None:
        inner = np.asarray(breakpoints)
        pts.update(inner[(inner > s + 1e-15) & (inner < t - 1e-15)].tolist())
    return np.asarray(sorted(pts))


def _partition_product(
    x: MultiplicativeFunctional, target_shape: TensorShape, grid: np.ndarray
) -> GroupElement:
    """Product over the partition of the input values padded with zero blocks."""
    prod = GroupElement.identity(target_shape)
    for u, v in zip(grid[:-1], grid[1:]):
        prod = prod.mul(x.eval(u, v).pad(target_shape.N))
    return prod


@dataclass(frozen=True, eq=False)
class LiftResult:
    """Lifted functional plus the convergence trace of the defining limit."""

    functional: MultiplicativeFunctional
    depths: tuple[int, ...]
    #: per-depth value of the full-interval lift, deepest last
    values: tuple[GroupElement, ...] = field(repr=False)

    @property
    def value(self) -> GroupElement:
        return self.values[-1]

    def error_trace(self) -> list[tuple[int, float]]:
        """(depth, max-abs gap to the deepest value) per requested depth."""
        deepest = self.values[-1]
        return [
            (depth, (val - deepest).max_abs())
            for depth, val in zip(self.depths, self.values)
        ]


def lyons_lift(
    x: MultiplicativeFunctional,
    target_N: int,
    mesh_depths: Sequence[int] = (2, 4, 6, 8),
    *,
    chen_tol: float = 1e-8,
    chen_samples: int = 8,
    seed: int = 0,
) -> LiftResult:
    """Extend a multiplicative functional to level target_N by partition products.

    Each factor is the input value over a partition interval, padded with
    zero blocks at the missing top levels; the products converge to the
    unique multiplicative extension as the mesh refines.  The returned
    functional evaluates at the deepest requested mesh; per-depth values over
    the full interval form the convergence trace.
    """
    if target_N < x.shape.N:
        raise ValueError(f"target level {target_N} below input level {x.shape.N}")
    depths = tuple(sorted(int(d) for d in mesh_depths))
    if not depths:
        raise ValueError("need at least one mesh depth")
    residual = chen_check(x, default_triples(x.T, chen_samples, seed))
    if residual > chen_tol:
        raise ValueError(
            f"input is not multiplicative: Chen residual {residual:.3e} > {chen_tol:.1e}"
        )
    target_shape = TensorShape(x.shape.d, target_N)

    def evaluate(s: float, t: float) -> GroupElement:
        if s == t:
            return GroupElement.identity(target_shape)
        if s > t:
            return evaluate(t, s).inverse()
        grid = _partition(s, t, depths[-1], x.breakpoints, x.T)
        return _partition_product(x, target_shape, grid)

    lifted = MultiplicativeFunctional(
        shape=target_shape,
        evaluate=evaluate,
        T=x.T,
        tag="lifted",
        breakpoints=x.breakpoints,
    )
    values = tuple(
        _partition_product(x, target_shape, _partition(0.0, x.T, depth, x.breakpoints, x.T))
        for depth in depths
    )
    return LiftResult(functional=lifted, depths=depths, values=values)


# ---------------------------------------------------------------------------
# Time extension
# ---------------------------------------------------------------------------


def young_integrals(path: PiecewiseLinearPath, s: float, t: float):
    """Closed forms of int_s^t (u-s) dx_u and int_s^t (x_u - x_s) du."""
    grid = path.segment_times(s, t)
    d = path.d
    int_t_dx = np.zeros(d)
    int_x_dt = np.zeros(d)
    x_s = path.value(s)
    for u, v in zip(grid[:-1], grid[1:]):
        slope = (path.value(v) - path.value(u)) / (v - u)
        int_t_dx += slope * ((v - s) ** 2 - (u - s) ** 2) / 2.0
        int_x_dt += (path.value(u) - x_s) * (v - u) + slope * (v - u) ** 2 / 2.0
    return int_t_dx, int_x_dt


@dataclass(frozen=True, eq=False)
class TimeExtendedPath:
    """Level-2 functional of the path with running time as an extra letter."""

    base: PiecewiseLinearPath
    functional: MultiplicativeFunctional

    @property
    def shape(self) -> TensorShape:
        return self.functional.shape

    @property
    def T(self) -> float:
        return self.functional.T

    def eval(self, s: float, t: float) -> GroupElement:
        return self.functional.eval(s, t)

    def augmented_path(self) -> PiecewiseLinearPath:
        return self.base.with_time_coordinate()


def time_extend(path: PiecewiseLinearPath, N: int = 2) -> TimeExtendedPath:
    """Adjoin the running time as coordinate 0 of a level-2 functional.

    Level 1 is (t-s, x_t - x_s); level 2 merges ((t-s)^2/2, the two Young
    integrals, x^(2)_{s,t}).  Pairing with the time letter returns t-s, which
    is what makes signatures injective on path families.
    """
    if N != 2:
        raise ValueError("time extension is built at level 2 only")
    d = path.d
    shape = TensorShape(1 + d, 2)

    def evaluate(s: float, t: float) -> GroupElement:
        if s > t:
            return evaluate(t, s).inverse()
        if s == t:
            return GroupElement.identity(shape)
        level1 = np.concatenate(([t - s], path.increment(s, t)))
        int_t_dx, int_x_dt = young_integrals(path, s, t)
        base2 = signature_pl(path, 2, s, t).levels[2]
        level2 = norms.time_extension_merge(
            (t - s) ** 2 / 2.0, int_t_dx, int_x_dt, base2, d
        )
        return GroupElement(shape, [np.ones(1), level1, level2])

    functional = MultiplicativeFunctional(
        shape=shape,
        evaluate=evaluate,
        T=path.T,
        tag="exact_pl",
        breakpoints=path.times,
    )
    return TimeExtendedPath(base=path, functional=functional)


# ---------------------------------------------------------------------------
# Finite-dimensional projection along dual directions
# ---------------------------------------------------------------------------


def project_directions(
    x: MultiplicativeFunctional, directions: Sequence[np.ndarray]
) -> MultiplicativeFunctional:
    """Down-project a functional over R^d to one over R^p along dual vectors.

    Coordinate (i_1..i_j) of the output is the pairing of the input against
    y_{i_1} x ... x y_{i_j}.  The map is linear on each level, so Chen's
    relation survives it.
    """
    Y = np.asarray(directions, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != x.shape.d:
        raise ValueError(
            f"directions must be vectors of length d={x.shape.d}; got shape {Y.shape}"
        )
    p = Y.shape[0]
    d = x.shape.d
    out_shape = TensorShape(p, x.shape.N)

    def project_tensor(g: TruncatedTensor) -> GroupElement:
        levels = [np.asarray([g.level0])]
        for k in range(1, g.shape.N + 1):
            block = g.levels[k].reshape((d,) * k)
            for _ in range(k):
                # contract the leading axis with Y^T; axes cycle back into order
                block = np.tensordot(block, Y.T, axes=([0], [0]))
            levels.append(block.ravel())
        return GroupElement(out_shape, levels)

    return MultiplicativeFunctional(
        shape=out_shape,
        evaluate=lambda s, t: project_tensor(x.eval(s, t)),
        T=x.T,
        tag=x.tag,
        breakpoints=x.breakpoints,
    )
