"""Dense kernels: small linear solves, root isolation, simplex, barrier QP."""

import itertools

import numpy as np
import pytest

from qcqp_exact.errors import SingularSystem
from qcqp_exact.numerics import (
    ConvexQp,
    LinearProgram,
    find_real_roots,
    lp_solve,
    qp_solve,
    solve_linear,
    verify_farkas,
)

from conftest import lp_brute_force, qp_grid_scan


class TestSolveLinear:
    def test_stationarity_pair(self):
        # the pinned-multiplier system of the worked family
        x = solve_linear([[1.0, 0.0], [0.5, -0.5]], [1.0, 0.0])
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_identity(self):
        b = np.array([3.0, -2.0, 0.5])
        np.testing.assert_allclose(solve_linear(np.eye(3), b), b)

    def test_zero_matrix_singular(self):
        with pytest.raises(SingularSystem):
            solve_linear(np.zeros((2, 2)), [1.0, 1.0])

    def test_pivoting_handles_zero_leading_entry(self):
        x = solve_linear([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
        np.testing.assert_allclose(x, [3.0, 2.0])

    def test_random_systems_match_numpy(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            A = rng.standard_normal((k, k))
            b = rng.standard_normal(k)
            np.testing.assert_allclose(
                solve_linear(A, b), np.linalg.solve(A, b), atol=1e-8
            )


class TestFindRealRoots:
    def test_single_root(self):
        roots = find_real_roots(lambda t: t * t - 1.0, (0.0, 3.0), 100, 1e-10)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(1.0, abs=1e-8)

    def test_cubic(self):
        roots = find_real_roots(
            lambda t: t * (t - 2.0) * (t - 5.0), (-1.0, 6.0), 400, 1e-10
        )
        np.testing.assert_allclose(roots, [0.0, 2.0, 5.0], atol=1e-7)

    def test_no_real_roots(self):
        assert find_real_roots(lambda t: t * t + 1.0, (-10.0, 10.0), 100, 1e-10) == []

    def test_pole_is_not_a_root(self):
        with np.errstate(divide="ignore"):
            roots = find_real_roots(lambda t: 1.0 / (t - 0.5), (0.0, 1.0), 101, 1e-10)
        assert roots == []

    def test_random_cubics_with_separated_roots(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            while True:
                r = np.sort(rng.uniform(-9.5, 9.5, 3))
                if np.min(np.diff(r)) >= 0.1:
                    break
            lead = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)

            def f(t, r=r, lead=lead):
                return lead * (t - r[0]) * (t - r[1]) * (t - r[2])

            found = find_real_roots(f, (-10.0, 10.0), 2000, 1e-12)
            assert len(found) == 3
            np.testing.assert_allclose(found, r, atol=1e-6)


class TestLpSolve:
    def test_equality_pinned_multipliers(self):
        lp = LinearProgram(
            n_vars=2,
            eq=((np.array([1.0, 0.0]), 1.0), (np.array([1.0, -1.0]), 0.0)),
            nonneg=frozenset({0, 1}),
        )
        out = lp_solve(lp)
        assert out.status == "Feasible"
        np.testing.assert_allclose(out.point, [1.0, 1.0], atol=1e-9)

    def test_sign_clash_infeasible_with_certificate(self):
        lp = LinearProgram(
            n_vars=1, ineq=((np.array([1.0]), -1.0),), nonneg=frozenset({0})
        )
        out = lp_solve(lp)
        assert out.status == "Infeasible"
        assert verify_farkas(lp, out.certificate)

    def test_box_maximum(self):
        lp = LinearProgram(
            n_vars=2,
            objective=np.array([0.0, 1.0]),
            maximize=True,
            ineq=((np.array([-1.0, 1.0]), 0.0), (np.array([1.0, 0.0]), 1.0)),
            nonneg=frozenset({0}),
        )
        out = lp_solve(lp)
        assert out.status == "Feasible"
        assert out.value == pytest.approx(1.0)

    def test_unbounded(self):
        lp = LinearProgram(
            n_vars=1, objective=np.array([-1.0]), ineq=((np.array([-1.0]), 0.0),)
        )
        assert lp_solve(lp).status == "Unbounded"

    def test_degenerate_redundant_rows(self):
        row = np.array([1.0, 1.0])
        lp = LinearProgram(
            n_vars=2,
            objective=np.array([1.0, 2.0]),
            eq=((row, 1.0), (row.copy(), 1.0), (2.0 * row, 2.0)),
            nonneg=frozenset({0, 1}),
        )
        out = lp_solve(lp)
        assert out.status == "Feasible"
        assert out.value == pytest.approx(1.0)

    def test_random_bounded_lps_match_enumeration(self):
        rng = np.random.default_rng(21)
        for trial in range(40):
            n = int(rng.integers(2, 4))
            n_in = int(rng.integers(1, 4))
            ineq = [(rng.standard_normal(n), float(rng.uniform(0.5, 2.0)))]
            for _ in range(n_in):
                ineq.append((rng.standard_normal(n), float(rng.uniform(-1.0, 2.0))))
            # box rows keep everything bounded
            for j in range(n):
                e = np.zeros(n)
                e[j] = 1.0
                ineq.append((e.copy(), 3.0))
                ineq.append((-e, 3.0))
            obj = rng.standard_normal(n)
            lp = LinearProgram(n_vars=n, objective=obj, ineq=tuple(ineq))
            out = lp_solve(lp)
            status, value = lp_brute_force(obj, False, (), ineq, frozenset(), n)
            assert out.status == status
            if status == "Feasible":
                assert out.value == pytest.approx(value, abs=1e-6)

    def test_random_infeasible_lps_carry_verified_certificates(self):
        rng = np.random.default_rng(22)
        for trial in range(30):
            n = int(rng.integers(1, 4))
            g = rng.standard_normal(n)
            delta = float(rng.uniform(0.1, 1.0))
            ineq = [(g.copy(), delta), (-g, -2.0 * delta)]  # g v <= d and g v >= 2d
            for _ in range(int(rng.integers(0, 3))):
                ineq.append((rng.standard_normal(n), float(rng.uniform(-1, 1))))
            lp = LinearProgram(n_vars=n, ineq=tuple(ineq))
            out = lp_solve(lp)
            assert out.status == "Infeasible"
            assert verify_farkas(lp, out.certificate)


class TestQpSolve:
    def test_scalar_box(self):
        p = ConvexQp(
            n_vars=1,
            diag=np.array([1.0]),
            linear=np.array([1.0]),
            ineq=((np.array([-1.0]), 3.0),),
        )
        res = qp_solve(p)
        assert res.status == "Optimal"
        assert res.value == pytest.approx(-0.25, abs=1e-7)

    def test_shifted_bound(self):
        # the reduced single-class program of the worked family at its
        # left exactness boundary
        p = ConvexQp(
            n_vars=1,
            diag=np.array([1.0]),
            linear=np.array([1.0]),
            ineq=((np.array([-1.0]), -1.0),),
        )
        res = qp_solve(p)
        assert res.value == pytest.approx(2.0, abs=1e-7)

    def test_equality_elimination(self):
        p = ConvexQp(n_vars=1, diag=np.array([1.0]), eq=((np.array([1.0]), 5.0),))
        res = qp_solve(p)
        assert res.status == "Optimal"
        assert res.value == pytest.approx(25.0)

    def test_infeasible_reports_best_slack(self):
        p = ConvexQp(
            n_vars=1,
            diag=np.array([1.0]),
            ineq=((np.array([-1.0]), -1.0), (np.array([1.0]), 0.0)),
        )
        res = qp_solve(p)
        assert res.status == "Infeasible"
        assert res.best_slack == pytest.approx(0.5, abs=1e-6)

    def test_unbounded(self):
        p = ConvexQp(n_vars=1, linear=np.array([-1.0]))
        assert qp_solve(p).status == "Unbounded"

    def test_random_qps_match_grid_scan(self):
        rng = np.random.default_rng(33)
        for trial in range(12):
            n = int(rng.integers(2, 4))
            n_sq = int(rng.integers(0, 3))
            sq_terms = tuple(
                (rng.standard_normal(n), float(rng.standard_normal()))
                for _ in range(n_sq)
            )
            diag = rng.uniform(0.1, 1.5, n)
            linear = rng.standard_normal(n)
            ineq = []
            for j in range(n):
                e = np.zeros(n)
                e[j] = 1.0
                ineq.append((e.copy(), 3.0))
                ineq.append((-e, 3.0))
            p0 = rng.uniform(-1.0, 1.0, n)
            for _ in range(int(rng.integers(0, 3))):
                g = rng.standard_normal(n)
                ineq.append((g, float(g @ p0 + rng.uniform(0.2, 1.0))))
            p = ConvexQp(
                n_vars=n, sq_terms=sq_terms, diag=diag, linear=linear, ineq=tuple(ineq)
            )
            res = qp_solve(p)
            assert res.status == "Optimal"
            ref, _ = qp_grid_scan(p)
            assert res.value == pytest.approx(ref, abs=1e-4)
