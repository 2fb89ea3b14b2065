"""Transport norm on zero-sum molecules and the duality with sampled
Hoelder functions.

Oracles: two-candidate enumeration for chained molecules, the explicit dual
witness u -> |u - s|^alpha for elementary ones, and direct reconstruction of
molecules from their certificates.
"""

import numpy as np
import pytest

from pathsig import (
    Molecule,
    SampledFunction,
    ae_norm,
    dual_norm_via_molecules,
    elementary_probes,
    pairing,
    weakstar_convergence_check,
)
from pathsig.molecules import MissingSampleError, MoleculeError


def reconstruct(certificate, times, p):
    """Sum the certified elementary molecules back into support values."""
    values = {float(t): np.zeros(p) for t in times}
    for term in certificate:
        values[term.t] = values.get(term.t, np.zeros(p)) + term.a * term.y
        values[term.s] = values.get(term.s, np.zeros(p)) - term.a * term.y
    return values


class TestMolecule:
    def test_zero_sum_enforced(self):
        with pytest.raises(MoleculeError):
            Molecule([0.0, 1.0], [[1.0], [1.0]])

    def test_duplicate_support_merged(self):
        m = Molecule([0.5, 0.5, 1.0], [[1.0], [1.0], [-2.0]])
        assert m.times.tolist() == [0.5, 1.0]
        assert m.values.ravel().tolist() == [2.0, -2.0]

    def test_json_roundtrip(self):
        m = Molecule([0.1, 0.9], [[1.0, -2.0], [-1.0, 2.0]])
        back = Molecule.from_json(m.to_json())
        assert np.array_equal(back.times, m.times)
        assert np.array_equal(back.values, m.values)


class TestTransportNorm:
    def test_elementary_molecule_value(self):
        for alpha in [0.3, 0.5, 1.0]:
            m = Molecule.elementary(0.8, 0.25, [1.0])
            value, cert = ae_norm(m, alpha)
            assert value == pytest.approx(0.55 ** alpha, abs=1e-12)
            assert len(cert) == 1

    def test_elementary_mixed_direction_and_dual_witness(self, rng):
        # unit-l1 direction: the norm is |t-s|^alpha, with equality certified
        # by pairing against the sign-pattern witness u -> |u-s|^alpha sgn(y)
        alpha = 0.5
        t, s = 0.9, 0.2
        y = rng.standard_normal(3)
        y /= np.abs(y).sum()
        m = Molecule.elementary(t, s, y)
        value, _ = ae_norm(m, alpha)
        assert value == pytest.approx(abs(t - s) ** alpha, abs=1e-12)
        witness = SampledFunction(
            [s, t], np.vstack([np.zeros(3), abs(t - s) ** alpha * np.sign(y)])
        )
        assert witness.hoelder_coefficient(alpha) == pytest.approx(1.0, rel=1e-12)
        assert pairing(witness, m) == pytest.approx(value, abs=1e-12)

    def test_zero_molecule(self):
        assert ae_norm(Molecule.zero(2), 0.5)[0] == 0.0

    def test_chained_molecule_picks_the_cheaper_route(self):
        # (1_t - 1_s) + (1_s - 1_r) = (1_t - 1_r); the solver must find the
        # minimum of the two-candidate enumeration
        alpha = 0.5
        t, s, r = 0.9, 0.1, 0.8
        m = Molecule.elementary(t, s, [1.0]) + Molecule.elementary(s, r, [1.0])
        value, _ = ae_norm(m, alpha)
        oracle = min(abs(t - s) ** alpha + abs(s - r) ** alpha, abs(t - r) ** alpha)
        assert value == pytest.approx(oracle, abs=1e-10)

    def test_certificate_reconstructs_molecule(self, rng):
        times = np.sort(rng.uniform(0.0, 1.0, 5))
        vals = rng.standard_normal((5, 2))
        vals[-1] -= vals.sum(axis=0)
        m = Molecule(times, vals)
        value, cert = ae_norm(m, 0.5)
        rebuilt = reconstruct(cert, m.times, 2)
        for t, v in zip(m.times, m.values):
            assert np.allclose(rebuilt[float(t)], v, atol=1e-9)

    def test_triangle_inequality_and_homogeneity(self, rng):
        alpha = 0.5
        for _ in range(10):
            times = np.sort(rng.uniform(0.0, 1.0, 4))
            va = rng.standard_normal((4, 1))
            va[-1] -= va.sum(axis=0)
            vb = rng.standard_normal((4, 1))
            vb[-1] -= vb.sum(axis=0)
            a, b = Molecule(times, va), Molecule(times, vb)
            na, _ = ae_norm(a, alpha)
            nb, _ = ae_norm(b, alpha)
            nab, _ = ae_norm(a + b, alpha)
            assert nab <= na + nb + 1e-9
            nsc, _ = ae_norm(a.scale(-2.5), alpha)
            assert nsc == pytest.approx(2.5 * na, rel=1e-9)

    def test_candidate_times_must_cover_support(self):
        m = Molecule.elementary(0.5, 0.1, [1.0])
        with pytest.raises(ValueError):
            ae_norm(m, 0.5, candidate_times=[0.1, 0.9])


class TestPairing:
    def test_constant_function_pairs_to_zero(self, rng):
        times = np.sort(rng.uniform(0.0, 1.0, 4))
        vals = rng.standard_normal((4, 1))
        vals[-1] -= vals.sum(axis=0)
        m = Molecule(times, vals)
        x = SampledFunction(m.times, 3.7 * np.ones((4, 1)))
        assert pairing(x, m) == pytest.approx(0.0, abs=1e-12)

    def test_linear_function_against_elementary(self):
        m = Molecule.elementary(0.8, 0.3, [1.0])
        x = SampledFunction.from_callable(lambda u: u, [0.3, 0.8])
        assert pairing(x, m) == pytest.approx(0.5, abs=1e-14)

    def test_missing_sample_raises(self):
        m = Molecule.elementary(0.8, 0.3, [1.0])
        x = SampledFunction([0.3], [[1.0]])
        with pytest.raises(MissingSampleError):
            pairing(x, m)

    def test_duality_sandwich_on_random_pairs(self, rng):
        alpha = 0.5
        grid = np.linspace(0.0, 1.0, 6)
        for _ in range(50):
            vals = rng.standard_normal((6, 2))
            x = SampledFunction(grid, vals)
            mv = rng.standard_normal((6, 2))
            mv[-1] -= mv.sum(axis=0)
            m = Molecule(grid, mv)
            bound = x.hoelder_coefficient(alpha) * ae_norm(m, alpha)[0]
            assert abs(pairing(x, m)) <= bound * (1 + 1e-9)


class TestDualNorm:
    def test_elementary_probes_recover_grid_coefficient(self, rng):
        # with l1 molecules against sup-norm functions, coordinate probes
        # attain the grid Hoelder coefficient exactly
        alpha = 0.4
        grid = np.linspace(0.0, 1.0, 5)
        x = SampledFunction(grid, rng.standard_normal((5, 2)))
        probes = elementary_probes(grid, 2)
        got = dual_norm_via_molecules(x, probes, alpha)
        assert got == pytest.approx(x.hoelder_coefficient(alpha), rel=1e-9)

    def test_mixed_direction_probe_stays_below_the_coefficient(self, rng):
        alpha = 0.6
        grid = np.linspace(0.0, 1.0, 4)
        x = SampledFunction(grid, rng.standard_normal((4, 3)))
        y = rng.standard_normal(3)
        y /= np.abs(y).sum()
        probe = Molecule.elementary(grid[2], grid[0], y)
        got = dual_norm_via_molecules(x, [probe], alpha)
        assert got <= x.hoelder_coefficient(alpha) * (1 + 1e-12)

    def test_zero_function(self):
        grid = np.linspace(0.0, 1.0, 4)
        x = SampledFunction(grid, np.zeros((4, 1)))
        assert dual_norm_via_molecules(x, elementary_probes(grid, 1), 0.5) == 0.0


class TestWeakStarReport:
    def test_coordinate_escape(self):
        # x_n = e_n g: pairings against fixed low-coordinate probes die out
        # while every Hoelder coefficient stays put
        p, n_members = 16, 16
        grid = np.linspace(0.0, 1.0, 6)
        g = np.sqrt(grid)
        family = []
        for n in range(n_members):
            vals = np.zeros((6, p))
            vals[:, n % p] = g
            family.append(SampledFunction(grid, vals))
        limit = SampledFunction(grid, np.zeros((6, p)))
        probes = []
        for c in range(3):
            y = np.zeros(p)
            y[c] = 1.0
            probes.append(Molecule.elementary(1.0, 0.0, y))
        report = weakstar_convergence_check(family, limit, probes, alpha=0.5)
        coeff = family[0].hoelder_coefficient(0.5)
        assert np.allclose(report["member_coefficients"], coeff, atol=1e-12)
        tail = report["max_pairing_gap_trace"][3:]
        assert np.all(tail == 0.0)
        assert report["lower_semicontinuity_ok"]

    def test_constant_family_has_zero_gaps(self):
        grid = np.linspace(0.0, 1.0, 4)
        x = SampledFunction(grid, np.tile(np.linspace(0, 1, 4)[:, None], (1, 2)))
        report = weakstar_convergence_check([x, x, x], x, elementary_probes(grid, 2), 0.5)
        assert np.all(report["gap_trace"] == 0.0)

    def test_unbounded_family_flagged(self):
        grid = np.linspace(0.0, 1.0, 3)
        small = SampledFunction(grid, np.linspace(0, 1, 3)[:, None])
        big = SampledFunction(grid, np.linspace(0, 100, 3)[:, None])
        report = weakstar_convergence_check([small, big], small, [], 0.5, norm_bound=2.0)
        assert not report["bounded"]

    def test_norm_lower_semicontinuity(self, rng):
        # pointwise limit of a coordinate-rotating family: limit coefficient
        # cannot exceed the tail minimum
        grid = np.linspace(0.0, 1.0, 5)
        base = np.abs(rng.standard_normal((5, 4)))
        family = [SampledFunction(grid, base * (1 + 1.0 / (k + 1))) for k in range(6)]
        limit = SampledFunction(grid, base)
        report = weakstar_convergence_check(family, limit, [], 0.5)
        tail_min = min(report["member_coefficients"][3:])
        assert report["limit_coefficient"] <= tail_min + 1e-9
