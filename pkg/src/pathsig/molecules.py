"""Zero-sum molecules, the transport norm dual to the Hoelder coefficient,
and bounded pointwise-weak convergence reports.

A molecule is a finitely supported vector-valued map on [0, T] whose values
sum to zero.  Its transport norm is the cheapest decomposition into
two-point molecules a * (1_t - 1_s) y with unit y, at cost |a| |t-s|^alpha.

Molecule values carry the l1 norm and sampled functions the sup norm, the
matching dual pair: with it the transport problem decouples over
coordinates, so solving one scalar minimum-cost transportation problem per
coordinate (exact, since |t-s|^alpha is a metric for alpha <= 1 and relay
points cannot help) and summing gives the norm itself, not just a bound.
Pairing a sampled function against molecules is then bounded by the product
of its sup-norm Hoelder coefficient and the transport norm, and probing
with coordinate molecules recovers that coefficient exactly on the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog


class MoleculeError(ValueError):
    """Molecule constraints (zero sum, matching supports) violated."""


class MissingSampleError(KeyError):
    """A pairing needed a function value at an unsampled time."""


class Molecule:
    """Finite support times with vector values in R^p summing to zero."""

    __slots__ = ("times", "values")

    def __init__(self, times: Sequence[float], values: np.ndarray):
        times = np.asarray(times, dtype=np.float64).ravel()
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != times.size:
            raise MoleculeError(
                f"{times.size} support times but {values.shape[0]} values"
            )
        order = np.argsort(times)
        times, values = times[order], values[order]
        if times.size and np.any(np.diff(times) <= 0):
            # merge duplicated support times
            merged_t, merged_v = [], []
            for t, v in zip(times, values):
                if merged_t and t == merged_t[-1]:
                    merged_v[-1] = merged_v[-1] + v
                else:
                    merged_t.append(t)
                    merged_v.append(v.copy())
            times = np.asarray(merged_t)
            values = np.asarray(merged_v)
        total = np.abs(values.sum(axis=0)).max() if values.size else 0.0
        if total > 1e-12:
            raise MoleculeError(f"values must sum to zero; residual {total:.3e}")
        self.times = times
        self.values = values
        self.times.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def elementary(cls, t: float, s: float, y: np.ndarray) -> "Molecule":
        """(1_t - 1_s) y for a vector y."""
        y = np.asarray(y, dtype=np.float64).ravel()
        return cls([t, s], np.vstack([y, -y]))

    @classmethod
    def zero(cls, p: int = 1) -> "Molecule":
        return cls([], np.zeros((0, p)))

    def scale(self, c: float) -> "Molecule":
        return Molecule(self.times, c * self.values)

    def __add__(self, other: "Molecule") -> "Molecule":
        if self.p != other.p:
            raise MoleculeError(f"dimension mismatch: {self.p} vs {other.p}")
        return Molecule(
            np.concatenate([self.times, other.times]),
            np.vstack([self.values, other.values]),
        )

    def to_json(self) -> str:
        return json.dumps(
            [{"t": float(t), "v": v.tolist()} for t, v in zip(self.times, self.values)],
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Molecule":
        entries = json.loads(text)
        times = [e["t"] for e in entries]
        values = [np.atleast_1d(np.asarray(e["v"], dtype=np.float64)) for e in entries]
        return cls(times, np.asarray(values))


def _transport_cost(sources, supplies, sinks, demands, alpha):
    """Exact minimum-cost transportation between scalar masses.

    Costs |t - s|^alpha are a metric for alpha <= 1, so intermediate relay
    points can never improve the optimum and the bipartite program over the
    support is the full infimum for scalar molecules.
    """
    ns, nd = len(sources), len(sinks)
    cost = np.abs(sources[:, None] - sinks[None, :]) ** alpha
    res = linprog(
        c=cost.ravel(),
        A_eq=_transport_constraints(ns, nd),
        b_eq=np.concatenate([supplies, demands]),
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"transportation solve failed: {res.message}")
    return res.fun, res.x.reshape(ns, nd)


def _transport_constraints(ns: int, nd: int) -> np.ndarray:
    A = np.zeros((ns + nd, ns * nd))
    for i in range(ns):
        A[i, i * nd : (i + 1) * nd] = 1.0
    for j in range(nd):
        A[ns + j, j::nd] = 1.0
    return A


@dataclass(frozen=True, eq=False)
class TransportCertificate:
    """One decomposition term: coefficient, endpoints, unit direction."""

    a: float
    t: float
    s: float
    y: np.ndarray


def ae_norm(
    m: Molecule,
    alpha: float,
    candidate_times: Sequence[float] | None = None,
) -> tuple[float, list[TransportCertificate]]:
    """Transport norm with a certifying decomposition.

    Coordinates are decomposed independently by a minimum-cost
    transportation solve with cost |t - s|^alpha; under the l1 norm on
    values the sum over coordinates is the exact infimum (any decomposition
    splits into coordinates at no loss).  Candidate times beyond the support
    are accepted but cannot lower a metric cost, so they are only validated,
    not used.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if candidate_times is not None:
        cands = set(float(t) for t in candidate_times)
        missing = [t for t in m.times if float(t) not in cands]
        if missing:
            raise ValueError(f"candidate times must cover the support; missing {missing}")
    total = 0.0
    certificate: list[TransportCertificate] = []
    for c in range(m.p):
        masses = m.values[:, c]
        pos = masses > 1e-15
        neg = masses < -1e-15
        if not pos.any():
            continue
        value, flow = _transport_cost(
            m.times[pos], masses[pos], m.times[neg], -masses[neg], alpha
        )
        total += value
        unit = np.zeros(m.p)
        unit[c] = 1.0
        src_times = m.times[pos]
        dst_times = m.times[neg]
        for i in range(flow.shape[0]):
            for j in range(flow.shape[1]):
                if flow[i, j] > 1e-14:
                    certificate.append(
                        TransportCertificate(
                            a=float(flow[i, j]),
                            t=float(src_times[i]),
                            s=float(dst_times[j]),
                            y=unit,
                        )
                    )
    return total, certificate


class SampledFunction:
    """Function [0, T] -> R^p known at finitely many times."""

    __slots__ = ("times", "values")

    def __init__(self, times: Sequence[float], values: np.ndarray):
        times = np.asarray(times, dtype=np.float64).ravel()
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != times.size:
            raise ValueError(f"{times.size} times but {values.shape[0]} values")
        order = np.argsort(times)
        self.times = times[order]
        self.values = values[order]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_callable(cls, fn, times: Sequence[float], p: int | None = None):
        times = np.asarray(times, dtype=np.float64)
        vals = np.asarray([np.atleast_1d(fn(t)) for t in times], dtype=np.float64)
        return cls(times, vals)

    def value(self, t: float) -> np.ndarray:
        i = int(np.searchsorted(self.times, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < self.times.size and abs(self.times[j] - t) <= 1e-9:
                return self.values[j]
        raise MissingSampleError(f"no sample at t={t}")

    def hoelder_coefficient(self, alpha: float) -> float:
        """Grid Hoelder coefficient in the sup norm on values.

        max over grid pairs of max_c |x_c(u) - x_c(v)| / |u - v|^alpha; the
        sup norm is the dual of the l1 norm molecules carry.
        """
        best = 0.0
        for i in range(self.times.size):
            diffs = self.values[i + 1 :] - self.values[i]
            if diffs.size == 0:
                continue
            dts = (self.times[i + 1 :] - self.times[i]) ** alpha
            best = max(best, float(np.max(np.abs(diffs).max(axis=1) / dts)))
        return best


def pairing(x: SampledFunction, m: Molecule) -> float:
    """<x, m> = sum over support times of <x(t), m(t)>."""
    if x.p != m.p:
        raise MoleculeError(f"dimension mismatch: {x.p} vs {m.p}")
    return float(sum(np.dot(x.value(t), v) for t, v in zip(m.times, m.values)))


def dual_norm_via_molecules(
    x: SampledFunction, probes: Sequence[Molecule], alpha: float
) -> float:
    """Lower bound on the Hoelder coefficient: max |<x,m>| / ae_norm(m)."""
    best = 0.0
    for m in probes:
        value, _ = ae_norm(m, alpha)
        if value <= 0.0:
            continue
        best = max(best, abs(pairing(x, m)) / value)
    return best


def elementary_probes(times: Sequence[float], p: int) -> list[Molecule]:
    """All coordinate elementary molecules on a sample grid."""
    times = np.asarray(times, dtype=np.float64)
    probes = []
    for i in range(times.size):
        for j in range(i + 1, times.size):
            for c in range(p):
                y = np.zeros(p)
                y[c] = 1.0
                probes.append(Molecule.elementary(times[j], times[i], y))
    return probes


def weakstar_convergence_check(
    family: Sequence[SampledFunction],
    limit: SampledFunction,
    probes: Sequence[Molecule],
    alpha: float,
    norm_bound: float | None = None,
) -> dict:
    """Bounded pointwise-weak convergence report for a function family.

    Weak-star convergence against the transport predual of the Hoelder space
    reduces, on norm-bounded families, to pairings against molecules
    converging; the report records the per-member, per-probe pairing gaps to
    the limit, the family norm bound, and whether the limit's coefficient
    respects lower semicontinuity.
    """
    coeffs = [x.hoelder_coefficient(alpha) for x in family]
    measured_bound = max(coeffs, default=0.0)
    bounded = norm_bound is None or measured_bound <= norm_bound + 1e-12
    limit_pairings = [pairing(limit, m) for m in probes]
    gap_trace = np.asarray(
        [[abs(pairing(x, m) - lp) for m, lp in zip(probes, limit_pairings)] for x in family]
    )
    limit_coeff = limit.hoelder_coefficient(alpha)
    tail = coeffs[len(coeffs) // 2 :] or coeffs
    lsc_ok = limit_coeff <= min(tail, default=0.0) + 1e-9
    return {
        "norm_bound": measured_bound,
        "bounded": bounded,
        "member_coefficients": coeffs,
        "max_pairing_gap_trace": gap_trace.max(axis=1) if gap_trace.size else np.zeros(0),
        "gap_trace": gap_trace,
        "limit_coefficient": limit_coeff,
        "lower_semicontinuity_ok": bool(lsc_ok),
    }
