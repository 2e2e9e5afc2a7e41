"""Shared fixtures: the worked 2-variable families and independent oracles."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from qcqp_exact.model import DiagonalQCQP


def make_e1(xi: float) -> DiagonalQCQP:
    """Two variables, one shared-coefficient class, second right-hand side
    parameterized; the workhorse family for boundary behavior."""
    return DiagonalQCQP(
        D=np.array([-1.0, -0.5]),
        c=np.array([0.0, 0.5]),
        A=np.array([[1.0, 1.0], [0.0, 0.0]]),
        a=np.array([[0.5, -0.5], [-0.5, 0.5]]),
        b=np.array([2.0, xi]),
    )


def e1_true_value(xi: float) -> float:
    """Closed-form global minimum of the parameterized family (both
    constraints active at the minimizer)."""
    s = np.sqrt(4.0 + 2.0 * xi - xi * xi)
    return -1.5 - xi / 4.0 - 0.5 * (1.0 + xi / 2.0) * s


def make_t1() -> DiagonalQCQP:
    """One-variable trust-region instance with optimum on the boundary."""
    return DiagonalQCQP(
        D=np.array([1.0]),
        c=np.array([-1.0]),
        A=np.array([[1.0]]),
        a=np.array([[0.0]]),
        b=np.array([1.0]),
    )


def make_tl(b: float) -> DiagonalQCQP:
    """Unit ball plus one linear constraint; tight exactly when b >= 2."""
    return DiagonalQCQP(
        D=np.array([-1.0, 1.0]),
        c=np.array([1.0, 0.0]),
        A=np.array([[1.0, 1.0], [0.0, 0.0]]),
        a=np.array([[0.0, 0.0], [-1.0, 0.0]]),
        b=np.array([1.0, b]),
    )


@pytest.fixture
def e1():
    return make_e1


@pytest.fixture
def t1():
    return make_t1()


@pytest.fixture
def tl():
    return make_tl


# ---------------------------------------------------------------------------
# independent test oracles (kept deliberately naive)


def lp_brute_force(objective, maximize, eq, ineq, nonneg, n_vars, tol=1e-9):
    """Enumerate basic points of a small LP: every n-subset of tight rows.

    Returns (status, value) with status in {"Feasible", "Infeasible"};
    unboundedness is not detected (callers use bounded test problems).
    """
    rows = []
    for r, rhs in eq:
        rows.append((np.asarray(r, float), float(rhs), "eq"))
    for r, rhs in ineq:
        rows.append((np.asarray(r, float), float(rhs), "ineq"))
    for j in nonneg:
        e = np.zeros(n_vars)
        e[j] = 1.0
        rows.append((e, 0.0, "ineq"))

    def feasible(v):
        for r, rhs, kind in rows:
            val = r @ v
            if kind == "eq" and abs(val - rhs) > tol * (1 + abs(rhs)):
                return False
            if kind == "ineq" and val - rhs > tol * (1 + abs(rhs)):
                return False
        return True

    best = None
    for subset in itertools.combinations(range(len(rows)), n_vars):
        M = np.array([rows[i][0] for i in subset])
        rhs = np.array([rows[i][1] for i in subset])
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        v = np.linalg.solve(M, rhs)
        if not feasible(v):
            continue
        if objective is None:
            return "Feasible", None
        val = float(np.asarray(objective) @ v)
        if best is None or (val > best if maximize else val < best):
            best = val
    if best is None and objective is None:
        # no basic point: fall back to a coarse random probe
        rng = np.random.default_rng(0)
        for _ in range(20000):
            v = rng.uniform(-10, 10, n_vars)
            if feasible(v):
                return "Feasible", None
        return "Infeasible", None
    return ("Feasible", best) if best is not None else ("Infeasible", None)


def qp_grid_scan(prob, box=3.0, grid=41, rounds=16):
    """Refining grid scan for a convex quadratic over linear inequalities.

    ``prob`` carries the quadratic in sum-of-squares-plus-diagonal form, so
    the objective is evaluated on whole grids at once.
    """
    n_vars = prob.n_vars
    diag = np.zeros(n_vars) if prob.diag is None else np.asarray(prob.diag, float)
    lin = np.zeros(n_vars) if prob.linear is None else np.asarray(prob.linear, float)
    rows = [(np.asarray(r, float), float(rhs)) for r, rhs in prob.ineq]

    def values(pts):
        out = (pts * pts) @ diag + pts @ lin + prob.offset
        for g, h in prob.sq_terms:
            out = out + (pts @ np.asarray(g, float) + h) ** 2
        return out

    lo = np.full(n_vars, -box)
    hi = np.full(n_vars, box)
    best_val, best_pt = np.inf, None
    for _ in range(rounds + 1):
        axes = [np.linspace(lo[j], hi[j], grid) for j in range(n_vars)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        mask = np.ones(len(pts), dtype=bool)
        for r, rhs in rows:
            mask &= pts @ r <= rhs + 1e-12
        if np.any(mask):
            feas = pts[mask]
            vals = values(feas)
            k = int(np.argmin(vals))
            if vals[k] < best_val:
                best_val, best_pt = float(vals[k]), feas[k]
        if best_pt is None:
            lo, hi = lo * 0.5, hi * 0.5
            continue
        half = (hi - lo) / 4.0
        lo = best_pt - half
        hi = best_pt + half
    return best_val, best_pt
