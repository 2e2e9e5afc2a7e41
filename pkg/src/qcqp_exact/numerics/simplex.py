"""Two-phase dense simplex with Bland's rule and verified certificates.

The linear programs handled here are tiny (a handful of multipliers and a
few dozen rows), so the implementation favors auditability over speed:
basis systems are re-solved from scratch each pivot, every ``Feasible``
outcome is re-checked against the original constraints before it is
returned, and every ``Infeasible`` outcome carries a Farkas certificate
that is verified numerically first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import CycleGuardExceeded, QcqpError

DEFAULT_FEAS_TOL = 1e-8


@dataclass(frozen=True)
class LinearProgram:
    """min (or max) ``objective @ v`` over linear equalities and inequalities.

    ``eq`` rows read ``row @ v == rhs`` and ``ineq`` rows ``row @ v <= rhs``.
    Variables listed in ``nonneg`` are sign-constrained; the rest are free.
    ``objective=None`` means a pure feasibility problem.
    """

    n_vars: int
    objective: Optional[np.ndarray] = None
    maximize: bool = False
    eq: tuple = ()
    ineq: tuple = ()
    nonneg: frozenset = frozenset()

    def rows(self):
        return [np.asarray(r, dtype=float) for r, _ in self.eq], [
            np.asarray(r, dtype=float) for r, _ in self.ineq
        ]


@dataclass(frozen=True)
class LpOutcome:
    """Solver outcome: a verified point, a verified certificate, or Unbounded."""

    status: str  # "Feasible" | "Infeasible" | "Unbounded"
    point: Optional[np.ndarray] = None
    value: Optional[float] = None
    certificate: Optional[dict] = None


def _pivot_loop(A, b, cost, basis, cap, banned):
    """Bland-rule simplex iterations on standard-form data; returns final state."""
    n_rows, n_cols = A.shape
    tol_red = 1e-9 * (1.0 + float(np.abs(cost).max(initial=0.0)))
    tol_dir = 1e-11
    iters = 0
    while True:
        iters += 1
        if iters > cap:
            raise CycleGuardExceeded(f"simplex exceeded {cap} pivots")
        B = A[:, basis]
        try:
            xB = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, cost[basis])
        except np.linalg.LinAlgError as exc:
            raise CycleGuardExceeded(f"basis became singular: {exc}") from exc
        reduced = cost - y @ A
        in_basis = set(basis)
        entering = -1
        for j in range(n_cols):
            if j in banned or j in in_basis:
                continue
            if reduced[j] < -tol_red:
                entering = j
                break
        if entering < 0:
            return "optimal", xB, basis, y
        d = np.linalg.solve(B, A[:, entering])
        best_ratio = None
        leaving = -1
        for r in range(n_rows):
            if d[r] <= tol_dir:
                continue
            ratio = max(xB[r], 0.0) / d[r]
            if (
                best_ratio is None
                or ratio < best_ratio - 1e-12 * (1.0 + abs(best_ratio))
                or (
                    abs(ratio - best_ratio) <= 1e-12 * (1.0 + abs(best_ratio))
                    and basis[r] < basis[leaving]
                )
            ):
                best_ratio = ratio
                leaving = r
        if leaving < 0:
            return "unbounded", xB, basis, y
        basis[leaving] = entering


def _standard_form(p: LinearProgram):
    """Split free variables, add slacks, and flip rows to make rhs >= 0."""
    eq_rows, in_rows = p.rows()
    n_rows = len(eq_rows) + len(in_rows)
    col_var = []  # (original index, sign) per structural column
    for j in range(p.n_vars):
        col_var.append((j, +1.0))
        if j not in p.nonneg:
            col_var.append((j, -1.0))
    n_struct = len(col_var)
    n_slack = len(in_rows)
    A = np.zeros((n_rows, n_struct + n_slack))
    b = np.zeros(n_rows)
    for r, (row, rhs) in enumerate(list(p.eq) + list(p.ineq)):
        row = np.asarray(row, dtype=float)
        for cidx, (j, sgn) in enumerate(col_var):
            A[r, cidx] = sgn * row[j]
        b[r] = float(rhs)
    for k in range(n_slack):
        A[len(eq_rows) + k, n_struct + k] = 1.0
    sigma = np.ones(n_rows)
    for r in range(n_rows):
        if b[r] < 0:
            A[r] *= -1.0
            b[r] *= -1.0
            sigma[r] = -1.0
    return A, b, sigma, col_var, n_struct, n_slack


def _recover_point(x_std, col_var, n_vars):
    v = np.zeros(n_vars)
    for cidx, (j, sgn) in enumerate(col_var):
        v[j] += sgn * x_std[cidx]
    return v


def _check_point(p: LinearProgram, v: np.ndarray, feas_tol: float) -> None:
    vmax = 1.0 + float(np.abs(v).max(initial=0.0))
    for row, rhs in p.eq:
        row = np.asarray(row, dtype=float)
        scale = 1.0 + abs(rhs) + float(np.abs(row).max(initial=0.0)) * vmax
        if abs(row @ v - rhs) > feas_tol * scale:
            raise QcqpError("internal: simplex returned an infeasible equality point")
    for row, rhs in p.ineq:
        row = np.asarray(row, dtype=float)
        scale = 1.0 + abs(rhs) + float(np.abs(row).max(initial=0.0)) * vmax
        if row @ v - rhs > feas_tol * scale:
            raise QcqpError("internal: simplex returned an infeasible inequality point")
    for j in p.nonneg:
        if v[j] < -feas_tol * vmax:
            raise QcqpError("internal: simplex violated a sign constraint")


def verify_farkas(p: LinearProgram, certificate: dict, feas_tol: float = DEFAULT_FEAS_TOL) -> bool:
    """Check an infeasibility witness against the original data.

    The witness consists of multipliers ``lam_eq`` (free) and ``lam_in``
    (nonnegative) whose combined row ``r`` vanishes on free variables, is
    nonnegative on sign-constrained variables, and satisfies
    ``lam @ rhs < 0``; no admissible point can then exist.
    """
    lam_eq = np.asarray(certificate.get("eq", []), dtype=float)
    lam_in = np.asarray(certificate.get("ineq", []), dtype=float)
    eq_rows, in_rows = p.rows()
    if lam_eq.shape[0] != len(eq_rows) or lam_in.shape[0] != len(in_rows):
        return False
    lam_scale = 1.0 + max(
        float(np.abs(lam_eq).max(initial=0.0)), float(np.abs(lam_in).max(initial=0.0))
    )
    if np.any(lam_in < -feas_tol * lam_scale):
        return False
    r = np.zeros(p.n_vars)
    total = 0.0
    for lam, (row, rhs) in zip(lam_eq, p.eq):
        r += lam * np.asarray(row, dtype=float)
        total += lam * rhs
    for lam, (row, rhs) in zip(lam_in, p.ineq):
        r += lam * np.asarray(row, dtype=float)
        total += lam * rhs
    row_scale = lam_scale * (1.0 + float(np.abs(r).max(initial=0.0)))
    for j in range(p.n_vars):
        if j in p.nonneg:
            if r[j] < -feas_tol * row_scale:
                return False
        elif abs(r[j]) > feas_tol * row_scale:
            return False
    return total < -0.5 * feas_tol


def lp_solve(p: LinearProgram, feas_tol: float = DEFAULT_FEAS_TOL) -> LpOutcome:
    """Solve or refute a small dense linear program.

    Two-phase simplex with Bland's anti-cycling rule and an iteration cap of
    ``50 * (rows + cols)``.  Feasible outcomes satisfy all constraints within
    ``feas_tol`` (re-checked before returning); infeasible outcomes carry a
    Farkas certificate that has been verified numerically.
    """
    n_eq, n_in = len(p.eq), len(p.ineq)
    if n_eq + n_in == 0:
        return _solve_unconstrained(p)

    A, b, sigma, col_var, n_struct, n_slack = _standard_form(p)
    n_rows, n_cols = A.shape
    cap = 50 * (n_rows + n_cols + n_rows)

    # Phase 1: artificial variables, minimize their sum.
    A1 = np.hstack([A, np.eye(n_rows)])
    cost1 = np.zeros(n_cols + n_rows)
    cost1[n_cols:] = 1.0
    basis = list(range(n_cols, n_cols + n_rows))
    status, xB, basis, y = _pivot_loop(A1, b, cost1, basis, cap, banned=frozenset())
    if status != "optimal":
        raise CycleGuardExceeded("phase-1 claimed unbounded; sum of artificials is bounded")
    infeas = float(cost1[basis] @ xB)
    scale_b = 1.0 + float(np.abs(b).max(initial=0.0))
    if infeas > feas_tol * scale_b:
        t = sigma * y
        lam_eq = -t[:n_eq]
        lam_in = -t[n_eq:]
        lam_in = np.maximum(lam_in, 0.0)
        certificate = {"eq": lam_eq, "ineq": lam_in}
        if not verify_farkas(p, certificate, feas_tol):
            raise QcqpError("internal: infeasibility certificate failed verification")
        return LpOutcome(status="Infeasible", certificate=certificate)

    # Drive artificials out of the basis; drop redundant rows if stuck.
    keep_rows = list(range(n_rows))
    for r in range(n_rows):
        if basis[r] < n_cols:
            continue
        B = A1[:, basis]
        tableau_row = np.linalg.solve(B, A1[:, :n_cols])[r]
        candidates = [j for j in range(n_cols) if j not in set(basis) and abs(tableau_row[j]) > 1e-9]
        if candidates:
            basis[r] = candidates[0]
        else:
            keep_rows.remove(r)
    if len(keep_rows) < n_rows:
        A = A[keep_rows]
        b = b[keep_rows]
        basis = [basis[r] for r in keep_rows]
        n_rows = len(keep_rows)
    else:
        A = A1[:, :n_cols]

    if p.objective is None:
        xB = np.linalg.solve(A[:, basis], b)
        x_std = np.zeros(n_cols)
        x_std[basis] = np.maximum(xB, 0.0)
        v = _recover_point(x_std, col_var, p.n_vars)
        _check_point(p, v, feas_tol)
        return LpOutcome(status="Feasible", point=v, value=None)

    obj = np.asarray(p.objective, dtype=float)
    cost2 = np.zeros(n_cols)
    for cidx, (j, sgn) in enumerate(col_var):
        cost2[cidx] = sgn * obj[j] * (-1.0 if p.maximize else 1.0)
    status, xB, basis, y = _pivot_loop(A, b, cost2, basis, cap, banned=frozenset())
    if status == "unbounded":
        return LpOutcome(status="Unbounded")
    x_std = np.zeros(n_cols)
    x_std[basis] = np.maximum(xB, 0.0)
    v = _recover_point(x_std, col_var, p.n_vars)
    _check_point(p, v, feas_tol)
    return LpOutcome(status="Feasible", point=v, value=float(obj @ v))


def _solve_unconstrained(p: LinearProgram) -> LpOutcome:
    """Degenerate case with no rows: only sign constraints remain."""
    v = np.zeros(p.n_vars)
    if p.objective is None:
        return LpOutcome(status="Feasible", point=v, value=None)
    obj = np.asarray(p.objective, dtype=float)
    sense = -1.0 if p.maximize else 1.0
    for j in range(p.n_vars):
        coeff = sense * obj[j]
        if j in p.nonneg:
            if coeff < 0:
                return LpOutcome(status="Unbounded")
        elif coeff != 0.0:
            return LpOutcome(status="Unbounded")
    return LpOutcome(status="Feasible", point=v, value=0.0)
