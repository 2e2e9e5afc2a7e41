"""Instance validation, partitioning, auditing, perturbation, evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcqp_exact.errors import DimensionMismatch, EmptyModel, NonFiniteEntry
from qcqp_exact.model import (
    DiagonalQCQP,
    check_assumption1,
    compute_partition,
    evaluate,
    perturb,
    validate_instance,
)

from conftest import make_e1, make_t1


def e1_dict(xi):
    return {
        "n": 2,
        "m": 2,
        "objective": {"D": [-1.0, -0.5], "c": [0.0, 0.5]},
        "constraints": [
            {"A": [1.0, 1.0], "a": [0.5, -0.5], "b": 2.0},
            {"A": [0.0, 0.0], "a": [-0.5, 0.5], "b": xi},
        ],
    }


class TestValidateInstance:
    def test_worked_family_is_valid(self):
        q = validate_instance(e1_dict(0.0))
        assert q.n == 2 and q.m == 2
        np.testing.assert_allclose(q.D, [-1.0, -0.5])
        np.testing.assert_allclose(q.a[1], [-0.5, 0.5])

    def test_minimal_instance(self):
        q = validate_instance(
            {
                "n": 1,
                "m": 1,
                "objective": {"D": [1.0], "c": [-1.0]},
                "constraints": [{"A": [1.0], "a": [0.0], "b": 1.0}],
            }
        )
        assert q.n == 1

    def test_length_mismatch(self):
        doc = e1_dict(0.0)
        doc["objective"]["D"] = [1.0, 2.0, 3.0]
        with pytest.raises(DimensionMismatch):
            validate_instance(doc)

    def test_empty_model(self):
        with pytest.raises(EmptyModel):
            validate_instance({"n": 0, "m": 1, "objective": {"D": [], "c": []},
                               "constraints": [{"A": [], "a": [], "b": 0.0}]})

    def test_non_finite(self):
        doc = e1_dict(0.0)
        doc["objective"]["c"] = [float("nan"), 0.5]
        with pytest.raises(NonFiniteEntry):
            validate_instance(doc)


class TestComputePartition:
    def test_shared_coefficients_single_class(self):
        part = compute_partition(make_e1(0.0))
        assert part.classes == ((0, 1),)
        np.testing.assert_allclose(part.class_coeffs[:, 0], [1.0, 0.0])
        assert part.min_index == (0,)
        np.testing.assert_allclose(part.min_diag, [-1.0])
        assert part.unique_min == (True,)

    def test_distinct_coefficients_split(self):
        q = DiagonalQCQP(
            D=np.array([1.0, 2.0]),
            c=np.zeros(2),
            A=np.array([[1.0, 2.0]]),
            a=np.zeros((1, 2)),
            b=np.array([1.0]),
        )
        part = compute_partition(q)
        assert part.num_classes == 2
        assert all(len(cls) == 1 for cls in part.classes)

    def test_tied_minimum_flagged(self):
        q = DiagonalQCQP(
            D=np.array([3.0, 3.0]),
            c=np.zeros(2),
            A=np.array([[1.0, 1.0]]),
            a=np.zeros((1, 2)),
            b=np.array([1.0]),
        )
        part = compute_partition(q)
        assert part.num_classes == 1
        assert part.unique_min == (False,)

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(1, 5),
        st.integers(1, 3),
        st.integers(0, 2**31 - 1),
    )
    def test_classes_cover_and_agree(self, n, m, seed):
        rng = np.random.default_rng(seed)
        # force some coincidences so classes of size > 1 appear
        base = rng.integers(0, 2, size=(m, n)).astype(float)
        q = DiagonalQCQP(
            D=rng.standard_normal(n),
            c=rng.standard_normal(n),
            A=base,
            a=rng.standard_normal((m, n)),
            b=rng.standard_normal(m),
        )
        part = compute_partition(q)
        seen = sorted(j for cls in part.classes for j in cls)
        assert seen == list(range(n))
        for h, cls in enumerate(part.classes):
            for j in cls:
                np.testing.assert_allclose(q.A[:, j], part.class_coeffs[:, h], atol=1e-9)
            assert part.min_index[h] in cls
            assert np.isclose(part.min_diag[h], min(q.D[list(cls)]))


class TestAssumptionAudit:
    def test_worked_family(self):
        rep = check_assumption1(make_e1(0.0))
        assert rep.feasibility == "Certified"
        np.testing.assert_allclose(rep.y_weights, [1.0, 0.0])
        assert rep.margin == pytest.approx(1.0)
        assert rep.slater == "Certified"

    def test_negative_definite_row_has_no_weights(self):
        q = DiagonalQCQP(
            D=np.array([1.0]),
            c=np.zeros(1),
            A=np.array([[-1.0]]),
            a=np.zeros((1, 1)),
            b=np.array([1.0]),
        )
        rep = check_assumption1(q, probe_interior=False)
        assert rep.y_weights is None
        assert rep.margin == 0.0

    def test_trust_region_instance(self):
        rep = check_assumption1(make_t1())
        np.testing.assert_allclose(rep.y_weights, [1.0])
        assert rep.margin == pytest.approx(1.0)
        assert rep.feasibility == "Certified"

    def test_margin_inequality_always_holds(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            q = DiagonalQCQP(
                D=rng.standard_normal(n),
                c=rng.standard_normal(n),
                A=rng.standard_normal((m, n)),
                a=rng.standard_normal((m, n)),
                b=rng.standard_normal(m),
            )
            rep = check_assumption1(q, probe_interior=False)
            if rep.y_weights is not None:
                assert np.all(rep.y_weights >= 0)
                assert np.min(rep.y_weights @ q.A) >= rep.margin > 0


class TestPerturb:
    def test_zero_radius_identity(self):
        q = make_e1(0.0)
        assert perturb(q, 0.0, 123) is q

    def test_breaks_ties(self):
        q = DiagonalQCQP(
            D=np.array([3.0, 3.0]),
            c=np.zeros(2),
            A=np.array([[1.0, 1.0]]),
            a=np.zeros((1, 2)),
            b=np.array([1.0]),
        )
        q2 = perturb(q, 1e-7, seed=5)
        part = compute_partition(q2)
        assert all(part.unique_min)

    def test_deterministic(self):
        q = make_e1(0.0)
        a = perturb(q, 1e-5, 7)
        b = perturb(q, 1e-5, 7)
        np.testing.assert_array_equal(a.D, b.D)
        np.testing.assert_array_equal(a.b, b.b)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(1e-9, 1e-3),
        st.integers(0, 2**31 - 1),
        st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    )
    def test_objective_shift_bound(self, eps, seed, point):
        q = make_e1(0.25)
        x = np.asarray(point)
        q2 = perturb(q, eps, seed)
        before, _ = evaluate(q, x)
        after, _ = evaluate(q2, x)
        bound = eps * (np.sum(x * x) + 2.0 * np.sum(np.abs(x)) + 1.0)
        assert abs(after - before) <= bound + 1e-12


class TestEvaluate:
    def test_worked_point(self):
        # the point sits on neither constraint: the first row evaluates to 4
        # against right-hand side 2
        obj, viol = evaluate(make_e1(0.25), np.array([1.0, -1.0]))
        assert obj == pytest.approx(-2.5)
        np.testing.assert_allclose(viol, [2.0, -2.25])

    def test_origin(self):
        q = make_e1(0.7)
        obj, viol = evaluate(q, np.zeros(2))
        assert obj == 0.0
        np.testing.assert_allclose(viol, -q.b)

    def test_boundary_point(self):
        obj, viol = evaluate(make_t1(), np.array([1.0]))
        assert obj == pytest.approx(-1.0)
        np.testing.assert_allclose(viol, [0.0])
