"""Linearly constrained convex QP via null-space reduction and a log barrier.

The quadratic part is specified as a sum of squares of affine forms plus a
nonnegative diagonal, so it is positive semidefinite by construction and no
PSD check is ever needed.  Equalities are eliminated through a null-space
parameterization; the remaining inequalities are handled by a log-barrier
path with Newton inner steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import IllConditioned

BARRIER_T0 = 1.0
BARRIER_SHRINK = 0.2
BARRIER_MAX_OUTER = 200
DIVERGE_NORM = 1e8


@dataclass(frozen=True)
class ConvexQp:
    """min sum_k (g_k @ v + h_k)^2 + sum_j diag_j v_j^2 + linear @ v + offset.

    Subject to ``eq`` rows (``row @ v == rhs``), ``ineq`` rows
    (``row @ v <= rhs``) and sign constraints on the ``nonneg`` indices.
    ``diag`` must be entrywise nonnegative.
    """

    n_vars: int
    sq_terms: tuple = ()  # ((g, h), ...)
    diag: Optional[np.ndarray] = None
    linear: Optional[np.ndarray] = None
    offset: float = 0.0
    eq: tuple = ()
    ineq: tuple = ()
    nonneg: frozenset = frozenset()

    def hessian_parts(self):
        d = np.zeros(self.n_vars) if self.diag is None else np.asarray(self.diag, float)
        lin = np.zeros(self.n_vars) if self.linear is None else np.asarray(self.linear, float)
        G = np.array([np.asarray(g, float) for g, _ in self.sq_terms]).reshape(
            len(self.sq_terms), self.n_vars
        )
        h = np.array([float(off) for _, off in self.sq_terms])
        return d, lin, G, h

    def value(self, v: np.ndarray) -> float:
        d, lin, G, h = self.hessian_parts()
        sq = 0.0
        if len(self.sq_terms):
            sq = float(np.sum((G @ v + h) ** 2))
        return float(sq + d @ (v * v) + lin @ v + self.offset)


@dataclass(frozen=True)
class QpResult:
    status: str  # "Optimal" | "Infeasible" | "Unbounded"
    point: Optional[np.ndarray] = None
    value: Optional[float] = None
    multipliers: Optional[np.ndarray] = None  # barrier estimates for ineq rows
    best_slack: Optional[float] = None  # phase-1 residual when Infeasible


def _reduced_quadratic(p: ConvexQp, v0: np.ndarray, Z: np.ndarray):
    """Objective restricted to v = v0 + Z u, as (H, g, const) with H PSD."""
    d, lin, G, h = p.hessian_parts()
    Dm = np.diag(d)
    Q = Dm.copy()
    if len(p.sq_terms):
        Q = Q + G.T @ G
    H = 2.0 * Z.T @ Q @ Z
    grad0 = 2.0 * Q @ v0 + lin
    if len(p.sq_terms):
        grad0 = grad0 + 2.0 * G.T @ h
    g = Z.T @ grad0
    const = p.value(v0)
    return H, g, const


def _newton_barrier(H, g, const, A, c, u0, tol, n_ineq_weight=None):
    """Minimize 0.5 u'Hu + g'u + const + barrier over {A u < c} from u0.

    Returns (status, u, tau_final) where status is "optimal", "unbounded"
    or a callable early-exit decided by the caller via ``stop``.
    """
    u = u0.copy()
    n_ineq = A.shape[0]
    tau = BARRIER_T0
    newton_tol = tol / 10.0

    def slacks(uu):
        return c - A @ uu

    for _ in range(BARRIER_MAX_OUTER):
        for _ in range(80):
            s = slacks(u)
            grad = H @ u + g + tau * (A.T @ (1.0 / s))
            hess = H + tau * (A.T * (1.0 / s**2)) @ A
            step = _solve_spd(hess, -grad)
            decrement = float(-grad @ step)
            if decrement <= 2.0 * newton_tol * (1.0 + abs(const)):
                break
            alpha = _max_step(s, A @ step)
            alpha = min(1.0, 0.99 * alpha)
            phi0 = _phi(H, g, u, s, tau)
            while alpha > 1e-14:
                u_new = u + alpha * step
                s_new = slacks(u_new)
                if np.all(s_new > 0):
                    phi_new = _phi(H, g, u_new, s_new, tau)
                    if phi_new <= phi0 - 1e-4 * alpha * decrement:
                        break
                alpha *= 0.5
            else:
                break
            u = u + alpha * step
            if np.linalg.norm(u) > DIVERGE_NORM:
                return "unbounded", u, tau
        if n_ineq * tau <= 0.5 * tol:
            return "optimal", u, tau
        tau *= BARRIER_SHRINK
    return "optimal", u, tau


def _phi(H, g, u, s, tau):
    return 0.5 * u @ H @ u + g @ u - tau * float(np.sum(np.log(s)))


def _max_step(s, ds):
    hit = ds > 0
    if not np.any(hit):
        return np.inf
    return float(np.min(s[hit] / ds[hit]))


def _solve_spd(M, rhs):
    ridge = 0.0
    base = float(np.trace(M)) / max(1, M.shape[0])
    for _ in range(12):
        try:
            L = np.linalg.cholesky(M + ridge * np.eye(M.shape[0]))
            z = np.linalg.solve(L, rhs)
            return np.linalg.solve(L.T, z)
        except np.linalg.LinAlgError:
            ridge = max(ridge * 10.0, 1e-12 * max(base, 1.0))
    raise IllConditioned("Newton system unsolvable after ridge escalation")


def qp_solve(p: ConvexQp, tol: float = 1e-8) -> QpResult:
    """Solve a linearly constrained convex QP to within ``tol`` in value.

    Equalities are eliminated by a null-space parameterization; a one-slack
    phase 1 finds a strictly feasible start for the barrier.  ``Infeasible``
    means phase 1 could not reach a strictly interior point (the best slack
    achieved is reported); ``Unbounded`` is detected by iterate blow-up.
    """
    n = p.n_vars
    rows = [(np.asarray(r, float), float(rhs)) for r, rhs in p.ineq]
    for j in p.nonneg:
        e = np.zeros(n)
        e[j] = -1.0
        rows.append((e, 0.0))

    if p.eq:
        E = np.array([np.asarray(r, float) for r, _ in p.eq])
        f = np.array([float(rhs) for _, rhs in p.eq])
        v0, residual, Z = _affine_solution_space(E, f)
        if v0 is None:
            return QpResult(status="Infeasible", best_slack=residual)
    else:
        v0 = np.zeros(n)
        Z = np.eye(n)

    if Z.shape[1] == 0:
        # Equalities pin the point; only verify the inequalities.
        worst = max((r @ v0 - rhs for r, rhs in rows), default=0.0)
        scale = 1.0 + float(np.abs(v0).max(initial=0.0))
        if worst > 10 * tol * scale:
            return QpResult(status="Infeasible", best_slack=float(worst))
        return QpResult(status="Optimal", point=v0, value=p.value(v0))

    H, g, const = _reduced_quadratic(p, v0, Z)

    if rows:
        A = np.array([r for r, _ in rows]) @ Z
        c = np.array([rhs - r @ v0 for r, rhs in rows])
        live = np.abs(A).max(axis=1) > 1e-13
        dead_bad = (~live) & (c < -10 * tol)
        if np.any(dead_bad):
            return QpResult(status="Infeasible", best_slack=float(np.min(c[dead_bad])))
        A, c = A[live], c[live]
    else:
        A = np.zeros((0, Z.shape[1]))
        c = np.zeros(0)

    if A.shape[0] == 0:
        u, unbounded = _unconstrained_min(H, g)
        if unbounded:
            return QpResult(status="Unbounded")
        v = v0 + Z @ u
        return QpResult(status="Optimal", point=v, value=p.value(v))

    u_start, best_slack = _phase_one(A, c, tol)
    if u_start is None:
        return QpResult(status="Infeasible", best_slack=best_slack)

    status, u, tau = _newton_barrier(H, g, const, A, c, u_start, tol)
    if status == "unbounded":
        return QpResult(status="Unbounded")
    v = v0 + Z @ u
    lam = tau / (c - A @ u)
    return QpResult(status="Optimal", point=v, value=p.value(v), multipliers=lam)


def _affine_solution_space(E, f):
    """Least-squares particular solution and null-space basis of E v = f."""
    v0, _, rank, sv = np.linalg.lstsq(E, f, rcond=None)
    residual = float(np.linalg.norm(E @ v0 - f))
    scale = 1.0 + float(np.abs(f).max(initial=0.0)) + float(np.abs(E).max(initial=0.0))
    if residual > 1e-8 * scale:
        return None, residual, None
    _, s, Vt = np.linalg.svd(E, full_matrices=True)
    cutoff = max(E.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > max(cutoff, 1e-13 * scale)))
    Z = Vt[rank:].T
    return v0, residual, Z


def _unconstrained_min(H, g):
    """Minimize the reduced quadratic with no inequality rows."""
    sol, _, rank, sv = np.linalg.lstsq(H, -g, rcond=None)
    if rank < H.shape[0]:
        # flat directions: unbounded iff the gradient has a component there
        residual = H @ sol + g
        if np.linalg.norm(residual) > 1e-9 * (1.0 + np.linalg.norm(g)):
            return sol, True
    return sol, False


def _phase_one(A, c, tol):
    """Find A u < c strictly by minimizing one added slack variable."""
    n_rows, dim = A.shape
    u0 = np.zeros(dim)
    s0 = float(np.max(A @ u0 - c)) + 1.0
    # variables (u, s): minimize s subject to A u - s <= c
    A1 = np.hstack([A, -np.ones((n_rows, 1))])
    w = np.concatenate([u0, [s0]])
    H = np.zeros((dim + 1, dim + 1))
    g = np.zeros(dim + 1)
    g[dim] = 1.0
    tau = BARRIER_T0
    exit_level = -0.05 * (1.0 + float(np.abs(c).max(initial=0.0)))
    for _ in range(BARRIER_MAX_OUTER):
        for _ in range(60):
            slack = (c + w[dim]) - A @ w[:dim]
            grad = g + tau * (A1.T @ (1.0 / slack))
            hess = tau * (A1.T * (1.0 / slack**2)) @ A1
            step = _solve_spd(hess + 1e-12 * np.eye(dim + 1), -grad)
            decrement = float(-grad @ step)
            if decrement <= tol:
                break
            alpha = min(1.0, 0.99 * _max_step(slack, A1 @ step))
            # never overshoot far past the strict-feasibility exit level
            if step[dim] < 0:
                alpha = min(alpha, (2.0 * exit_level - w[dim]) / step[dim])
            step_scale = float(np.abs(step).max())
            if step_scale > 0:
                alpha = min(alpha, 1e3 * (1.0 + float(np.abs(w).max())) / step_scale)
            phi0 = g @ w - tau * np.sum(np.log(slack))
            while alpha > 1e-14:
                w_new = w + alpha * step
                s_new = (c + w_new[dim]) - A @ w_new[:dim]
                if np.all(s_new > 0):
                    if g @ w_new - tau * np.sum(np.log(s_new)) <= phi0 - 1e-4 * alpha * decrement:
                        break
                alpha *= 0.5
            else:
                break
            w = w + alpha * step
            if w[dim] < exit_level:
                return w[:dim], float(w[dim])
        if n_rows * tau <= 0.25 * max(tol, 1e-12):
            break
        tau *= BARRIER_SHRINK
    if w[dim] < -10 * max(tol, 1e-12):
        return w[:dim], float(w[dim])
    return None, float(w[dim])
