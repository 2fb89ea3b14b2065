"""Signature features, least-squares functionals, and the level sweep."""

import numpy as np
import pytest
from sklearn.base import clone

from pathsig import (
    FamilyBoundError,
    FamilySpec,
    LinearFunctional,
    PiecewiseLinearPath,
    SignatureFeatures,
    SignatureRegression,
    generate_family,
    make_target,
    pair,
    shuffle,
    uat_sweep,
)


@pytest.fixture(scope="module")
def family():
    return generate_family(FamilySpec(count=60, d=2, segments=5, amplitude=0.6, seed=11))


class TestFeatures:
    def test_empty_word_column_is_ones(self, family):
        F = SignatureFeatures(level=2).fit(family.paths).transform(family.paths)
        assert np.all(F[:, 0] == 1.0)

    def test_time_word_column_is_horizon(self, family):
        tf = SignatureFeatures(level=2).fit(family.paths)
        F = tf.transform(family.paths)
        col = tf.words_.index((1,))
        assert np.allclose(F[:, col], family.spec.T, atol=1e-14)

    def test_feature_rows_satisfy_shuffle_closure(self, family):
        tf = SignatureFeatures(level=4).fit(family.paths)
        F = tf.transform(family.paths[:10])
        shape = tf.feature_shape_
        index = {w: i for i, w in enumerate(tf.words_)}
        rng = np.random.default_rng(0)
        for _ in range(20):
            w1 = tuple(rng.integers(1, shape.d + 1, rng.integers(1, 3)))
            w2 = tuple(rng.integers(1, shape.d + 1, rng.integers(1, 3)))
            prod = shuffle(
                LinearFunctional.from_word(shape, w1),
                LinearFunctional.from_word(shape, w2),
            )
            lhs = F[:, index[w1]] * F[:, index[w2]]
            rhs = sum(c * F[:, index[w]] for w, c in prod.terms.items())
            assert np.allclose(lhs, rhs, atol=1e-10)

    def test_feature_count_matches_level(self, family):
        for level in [1, 2, 3]:
            tf = SignatureFeatures(level=level).fit(family.paths)
            expected = sum(3 ** k for k in range(level + 1))
            assert tf.n_features_ == expected

    def test_array_inputs_accepted(self):
        arr = np.column_stack([np.linspace(0, 1, 4), np.linspace(0, 2, 4)])
        F = SignatureFeatures(level=1).fit([arr]).transform([arr])
        assert F.shape == (1, 3)

    def test_sklearn_params_protocol(self):
        tf = SignatureFeatures(level=3, add_time=False)
        assert tf.get_params() == {"level": 3, "add_time": False}
        tf2 = clone(tf).set_params(level=2)
        assert tf2.get_params()["level"] == 2


class TestRegression:
    def test_zero_target_gives_zero_functional(self, family):
        model = SignatureRegression(level=2).fit(family.paths, np.zeros(len(family.paths)))
        assert model.train_sup_error_ == 0.0
        assert model.functional_.terms == {}

    def test_feature_column_recovered_exactly(self, family):
        # target = one existing signature coordinate; held-out error at solver precision
        tf = SignatureFeatures(level=2).fit(family.paths)
        F = tf.transform(family.paths)
        col = tf.words_.index((2, 3))
        y = F[:, col]
        model = SignatureRegression(level=2).fit(family.paths[:40], y[:40])
        pred = model.predict(family.paths[40:])
        assert np.max(np.abs(pred - y[40:])) < 1e-8

    def test_square_target_is_linear_at_doubled_level(self, family):
        target = make_target("shuffle_square", word=(2,))
        y = np.asarray([target(p) for p in family.paths])
        model = SignatureRegression(level=2).fit(family.paths[:40], y[:40])
        pred = model.predict(family.paths[40:])
        assert np.max(np.abs(pred - y[40:])) < 1e-8
        # the fitted functional reproduces the squared pairing through shuffles
        shape = model.features_.feature_shape_
        w = LinearFunctional.from_word(shape, (2,))
        expected = shuffle(w, w)
        from pathsig import signature_pl

        for p in family.paths[40:43]:
            sig = signature_pl(p.with_time_coordinate(), 2)
            assert pair(sig, model.functional_) == pytest.approx(
                pair(sig, expected), abs=1e-8
            )

    def test_ridge_damps_coefficients(self, family):
        target = make_target("smooth_of_increment", phi=[1.0, -1.0])
        y = np.asarray([target(p) for p in family.paths])
        free = SignatureRegression(level=3, ridge=0.0).fit(family.paths, y)
        damped = SignatureRegression(level=3, ridge=10.0).fit(family.paths, y)
        assert np.linalg.norm(damped.coef_) < np.linalg.norm(free.coef_)

    def test_rank_deficiency_reported_not_fatal(self, family):
        model = SignatureRegression(level=2).fit(
            family.paths[:5], np.ones(5)
        )
        assert model.report_["rank"] <= 5
        assert np.isfinite(model.train_sup_error_)


class TestFamily:
    def test_determinism(self):
        spec = FamilySpec(count=10, d=2, segments=4, amplitude=0.5, seed=42)
        a, b = generate_family(spec), generate_family(spec)
        for p, q in zip(a.paths, b.paths):
            assert np.array_equal(p.points, q.points)
        assert a.R == b.R

    def test_norm_bound_recorded_and_enforced(self):
        fam = generate_family(FamilySpec(count=10, d=2, segments=4, amplitude=0.3, seed=7))
        assert fam.R == max(fam.norms)
        wild = PiecewiseLinearPath([0.0, 0.5, 1.0], [[0.0, 0.0], [9.0, -9.0], [0.0, 5.0]])
        with pytest.raises(FamilyBoundError):
            fam.check_member(wild)

    def test_requested_bound_violation_raises(self):
        spec = FamilySpec(count=5, d=2, segments=4, amplitude=2.0, seed=1, R=0.1)
        with pytest.raises(FamilyBoundError):
            generate_family(spec)


class TestSweep:
    def test_square_target_collapses_at_level_two(self, family):
        target = make_target("shuffle_square", word=(2,))
        report, functionals = uat_sweep(family, target, [1, 2, 3], holdout=0.25, seed=3)
        errs = {row.level: row.test_sup_err for row in report.rows}
        assert errs[2] < 1e-8
        assert errs[3] < 1e-8
        assert errs[1] > 1e-4
        assert 2 in functionals

    def test_single_path_family_interpolates(self):
        fam = generate_family(FamilySpec(count=1, d=2, segments=3, amplitude=0.4, seed=9))
        target = make_target("terminal_coordinate", coord=1)
        report, _ = uat_sweep(fam, target, [1, 2], holdout=0.0, seed=0)
        for row in report.rows:
            assert row.train_sup_err < 1e-10

    def test_reports_are_deterministic_up_to_runtime(self, family):
        target = make_target("smooth_of_increment", phi=[0.5, 0.5])
        r1, _ = uat_sweep(family, target, [1, 2], seed=5)
        r2, _ = uat_sweep(family, target, [1, 2], seed=5)
        assert r1.key() == r2.key()

    def test_report_csv_schema(self, family):
        target = make_target("terminal_coordinate")
        report, _ = uat_sweep(family, target, [1], seed=0)
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "level,train_sup_err,test_sup_err,n_features,seconds"
        assert len(lines) == 2

    def test_column_scale_report_emitted_per_level(self, family):
        target = make_target("terminal_coordinate")
        report, _ = uat_sweep(family, target, [3], seed=0)
        scales = report.column_scales[3]
        assert sorted(scales) == [0, 1, 2, 3]
        assert scales[0] == 1.0
        assert all(v > 0 for v in scales.values())

    def test_negative_control_target_exists(self, family):
        target = make_target("level_norm", k=2)
        report, _ = uat_sweep(family, target, [1, 2], seed=1)
        assert all(np.isfinite(row.test_sup_err) for row in report.rows)

    def test_polynomial_target_exact_at_product_level(self, family):
        # degree-2 polynomial in level-1 coordinates plus a linear level-2
        # term: exactly linear on signatures at level 2
        from pathsig import signature_pl

        def poly(path):
            sig = signature_pl(path.with_time_coordinate(), 2)
            return (
                sig.coordinate((2,)) * sig.coordinate((3,))
                + 2.0 * sig.coordinate((2, 3))
                - 0.5 * sig.coordinate((1,))
            )

        target = make_target("custom", fn=poly)
        report, _ = uat_sweep(family, target, [2], holdout=0.25, seed=4)
        assert report.rows[0].test_sup_err <= 1e-6
