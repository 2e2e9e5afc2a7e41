"""Convex relaxations of the diagonal QCQP and their optimality data.

Two equivalent relaxations are solved here.  The per-coordinate form lifts
every square ``x_j^2`` into a variable ``z_j >= x_j^2``; the aggregated form
introduces one lifted variable per partition class, ``w_h >= sum of squares``
over the class, and moves the within-class curvature surplus into the
objective.  Both are solved by a log-barrier method on the natural
variables; the semidefinite program they bound is never formed explicitly,
because any optimal point here can be completed to a feasible matrix pair
with the same value (see :func:`reconstruct_shor`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NegativeSlack, QcqpError
from .model import DiagonalQCQP, PartitionInfo, compute_partition
from .numerics.qp import _solve_spd

DEFAULT_TOL = 1e-8
FEAS_TOL = 1e-8
BARRIER_SHRINK = 0.2
MAX_OUTER = 200
DIVERGE_NORM = 1e8

CONV = "conv"
NEWCONV = "newconv"


@dataclass(frozen=True)
class RelaxSolution:
    """Primal and dual output of one relaxation solve."""

    which: str  # "conv" | "newconv"
    status: str  # "Optimal" | "Infeasible" | "NumericalFailure"
    x: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None  # per-coordinate lifted values (conv)
    w: Optional[np.ndarray] = None  # per-class aggregates (newconv)
    mu: Optional[np.ndarray] = None  # constraint multipliers
    nu: Optional[np.ndarray] = None  # lifting multipliers (conv)
    gamma: Optional[np.ndarray] = None  # class multipliers (newconv)
    value: Optional[float] = None
    partition: Optional[PartitionInfo] = None
    detail: str = ""


@dataclass(frozen=True)
class KktResiduals:
    """Literal residuals of the first-order system; no tolerance is applied."""

    stationarity_quadratic: float
    stationarity_linear: float
    primal: float
    complementarity: float
    dual_sign: float

    def worst(self) -> float:
        return max(
            self.stationarity_quadratic,
            self.stationarity_linear,
            self.primal,
            self.complementarity,
            self.dual_sign,
        )


@dataclass(frozen=True)
class ShorPoint:
    """A matrix-relaxation feasible pair encoded by its diagonal correction.

    The matrix variable is ``x x^T + diag(correction)``; nonnegativity of the
    correction is exactly positive semidefiniteness of the completion.
    """

    x: np.ndarray
    correction: np.ndarray
    value: float


class _Lifted:
    """Barrier data for: min quad@v^2 + lin@v  s.t. R v <= rhs and, per
    group ``(t, members)``, sum of squares of the member variables <= v_t."""

    def __init__(self, quad, lin, R, rhs, groups):
        self.quad = quad
        self.lin = lin
        self.R = R
        self.rhs = rhs
        self.groups = groups
        self.nvars = lin.shape[0]
        self.n_slacks = R.shape[0] + len(groups)

    def objective(self, v):
        return float(self.quad @ (v * v) + self.lin @ v)

    def lin_slacks(self, v):
        return self.rhs - self.R @ v

    def group_slacks(self, v):
        return np.array([v[t] - np.sum(v[list(ms)] ** 2) for t, ms in self.groups])

    def strictly_feasible(self, v):
        return np.all(self.lin_slacks(v) > 0) and np.all(self.group_slacks(v) > 0)

    def grad_hess(self, v, tau):
        grad = 2.0 * self.quad * v + self.lin
        hess = np.diag(2.0 * self.quad)
        s_lin = self.lin_slacks(v)
        grad += tau * (self.R.T @ (1.0 / s_lin))
        hess += tau * (self.R.T * (1.0 / s_lin**2)) @ self.R
        for (t, ms), s in zip(self.groups, self.group_slacks(v)):
            ms = list(ms)
            gs = np.zeros(self.nvars)
            gs[t] = 1.0
            gs[ms] -= 2.0 * v[ms]
            grad += -(tau / s) * gs
            hess += (tau / s**2) * np.outer(gs, gs)
            for j in ms:
                hess[j, j] += 2.0 * tau / s
        return grad, hess

    def phi(self, v, tau):
        s_lin = self.lin_slacks(v)
        s_grp = self.group_slacks(v)
        if np.any(s_lin <= 0) or np.any(s_grp <= 0):
            return np.inf
        return self.objective(v) - tau * (np.sum(np.log(s_lin)) + np.sum(np.log(s_grp)))

    def max_step(self, v, d):
        alpha = np.inf
        s_lin = self.lin_slacks(v)
        dd = self.R @ d
        hit = dd > 0
        if np.any(hit):
            alpha = min(alpha, float(np.min(s_lin[hit] / dd[hit])))
        for (t, ms), s in zip(self.groups, self.group_slacks(v)):
            ms = list(ms)
            q = float(np.sum(d[ms] ** 2))
            p = float(d[t] - 2.0 * v[ms] @ d[ms])
            if q <= 1e-16:
                if p < 0:
                    alpha = min(alpha, s / (-p))
            else:
                alpha = min(alpha, (p + np.sqrt(p * p + 4.0 * q * s)) / (2.0 * q))
        return alpha


def _barrier_minimize(model: _Lifted, v0: np.ndarray, tol: float):
    """Follow the central path from a strictly feasible start."""
    v = v0.copy()
    tau = 1.0
    newton_tol = tol / 10.0
    for _ in range(MAX_OUTER):
        for _ in range(80):
            grad, hess = model.grad_hess(v, tau)
            step = _solve_spd(hess, -grad)
            decrement = float(-grad @ step)
            if decrement <= 2.0 * newton_tol:
                break
            alpha = min(1.0, 0.99 * model.max_step(v, step))
            phi0 = model.phi(v, tau)
            while alpha > 1e-14:
                if model.phi(v + alpha * step, tau) <= phi0 - 1e-4 * alpha * decrement:
                    break
                alpha *= 0.5
            else:
                break
            v = v + alpha * step
            if np.linalg.norm(v) > DIVERGE_NORM:
                return "unbounded", v, tau
        if model.n_slacks * tau <= 0.5 * tol:
            return "optimal", v, tau
        tau *= BARRIER_SHRINK
    return "optimal", v, tau


def _phase_one(model: _Lifted, tol: float):
    """Minimize one added violation bound; success means a strict interior."""
    n = model.nvars
    v = np.zeros(n)
    for t, ms in model.groups:
        v[t] = 1.0
    worst = max(
        float(np.max(model.R @ v - model.rhs, initial=-np.inf)),
        max((np.sum(v[list(ms)] ** 2) - v[t] for t, ms in model.groups), default=-np.inf),
    )
    sigma = worst + 1.0
    exit_level = -0.05 * (1.0 + float(np.abs(model.rhs).max(initial=0.0)))

    # treat sigma as one extra variable appended to v
    def slacks(vv, sg):
        s_lin = sg + model.rhs - model.R @ vv
        s_grp = np.array([sg + vv[t] - np.sum(vv[list(ms)] ** 2) for t, ms in model.groups])
        return s_lin, s_grp

    tau = 1.0
    for _ in range(MAX_OUTER):
        for _ in range(60):
            s_lin, s_grp = slacks(v, sigma)
            grad = np.zeros(n + 1)
            grad[n] = 1.0
            hess = np.zeros((n + 1, n + 1))
            grad[:n] += tau * (model.R.T @ (1.0 / s_lin))
            grad[n] += -tau * np.sum(1.0 / s_lin)
            rows = np.hstack([-model.R, np.ones((model.R.shape[0], 1))])
            hess += tau * (rows.T * (1.0 / s_lin**2)) @ rows
            for (t, ms), s in zip(model.groups, s_grp):
                ms = list(ms)
                gs = np.zeros(n + 1)
                gs[t] = 1.0
                gs[n] = 1.0
                gs[ms] -= 2.0 * v[ms]
                grad += -(tau / s) * gs
                hess += (tau / s**2) * np.outer(gs, gs)
                for j in ms:
                    hess[j, j] += 2.0 * tau / s
            step = _solve_spd(hess + 1e-12 * np.eye(n + 1), -grad)
            decrement = float(-grad @ step)
            if decrement <= tol:
                break
            w = np.concatenate([v, [sigma]])
            alpha = 1.0
            if step[n] < 0:
                alpha = min(alpha, (2.0 * exit_level - sigma) / step[n])
            scale = float(np.abs(step).max())
            if scale > 0:
                alpha = min(alpha, 1e3 * (1.0 + float(np.abs(w).max())) / scale)
            while alpha > 1e-14:
                v_new = v + alpha * step[:n]
                s_new = sigma + alpha * step[n]
                s_lin_n, s_grp_n = slacks(v_new, s_new)
                if np.all(s_lin_n > 0) and np.all(s_grp_n > 0):
                    break
                alpha *= 0.5
            else:
                break
            v = v + alpha * step[:n]
            sigma = sigma + alpha * step[n]
            if sigma < exit_level:
                return v, sigma
        if (model.n_slacks) * tau <= 0.25 * max(tol, 1e-12):
            break
        tau *= BARRIER_SHRINK
    if sigma < -10 * max(tol, 1e-12):
        return v, sigma
    return None, sigma


def _conv_model(q: DiagonalQCQP) -> _Lifted:
    n, m = q.n, q.m
    quad = np.zeros(2 * n)
    lin = np.concatenate([2.0 * q.c, q.D])
    R = np.hstack([2.0 * q.a, q.A])
    groups = tuple((n + j, (j,)) for j in range(n))
    return _Lifted(quad, lin, R, q.b.copy(), groups)


def _newconv_model(q: DiagonalQCQP, part: PartitionInfo) -> _Lifted:
    n, m = q.n, q.m
    H = part.num_classes
    quad = np.zeros(n + H)
    for j in range(n):
        quad[j] = q.D[j] - part.min_diag[part.class_of[j]]
    lin = np.concatenate([2.0 * q.c, part.min_diag])
    R = np.hstack([2.0 * q.a, part.class_coeffs])
    groups = tuple((n + h, tuple(part.classes[h])) for h in range(H))
    return _Lifted(quad, lin, R, q.b.copy(), groups)


def _recover_multipliers(q, model, v, tau, which, part):
    """Recover constraint multipliers from the active-set structure.

    A positive lifting slack forces its multiplier to zero, which turns the
    quadratic stationarity rows into exact linear equations on the
    constraint multipliers; the linear stationarity rows (with the lifting
    multiplier eliminated) complete the system.  Inactive constraints are
    pinned to zero.  Raw barrier slack quotients are kept as a fallback
    candidate, and whichever candidate gives smaller overall first-order
    residuals wins.
    """
    n, m = q.n, q.m
    x = v[:n]
    s_lin = model.lin_slacks(v)
    s_grp = model.group_slacks(v)
    scale = q.scale()
    act = 1e-6 * scale

    mu_barrier = np.minimum(tau / np.maximum(s_lin, 1e-300), 1e12)

    if which == CONV:
        xi_cols = q.A  # (m, n): per-coordinate aggregated diagonals
        lift_slack = s_grp  # groups are per coordinate, in order
        base_diag = q.D
    else:
        xi_cols = part.class_coeffs  # (m, H)
        lift_slack = s_grp
        base_diag = part.min_diag

    active = [i for i in range(m) if s_lin[i] <= act]
    rows = []
    rhs = []
    for g in range(lift_slack.shape[0]):
        if lift_slack[g] > act:
            rows.append(xi_cols[:, g])
            rhs.append(-float(base_diag[g]))
    if which == CONV:
        curvature = np.zeros(n)
    else:
        curvature = np.array(
            [q.D[j] - part.min_diag[part.class_of[j]] for j in range(n)]
        )
    for j in range(n):
        if which == CONV:
            rows.append(q.a[:, j] + q.A[:, j] * x[j])
        else:
            h = part.class_of[j]
            rows.append(q.a[:, j] + part.class_coeffs[:, h] * x[j])
        # lifting multiplier eliminated: both forms collapse to the same rhs
        rhs.append(-(float(q.c[j]) + float(q.D[j]) * x[j]))
    Mfull = np.array(rows)
    rhs = np.array(rhs)
    mu_fit = np.zeros(m)
    if active:
        sub, *_ = np.linalg.lstsq(Mfull[:, active], rhs, rcond=None)
        mu_fit[active] = np.maximum(sub, 0.0)

    def duals_for(mu):
        return np.maximum(base_diag + mu @ xi_cols, 0.0)

    def worst_resid(mu):
        dual = duals_for(mu)
        r1 = float(np.abs(base_diag + mu @ xi_cols - dual).max())
        if which == CONV:
            r2 = float(np.abs(q.c + mu @ q.a + dual * x).max())
        else:
            per_j = np.array(
                [
                    curvature[j] * x[j]
                    + q.c[j]
                    + mu @ q.a[:, j]
                    + dual[part.class_of[j]] * x[j]
                    for j in range(n)
                ]
            )
            r2 = float(np.abs(per_j).max())
        comp = float(np.abs(mu * s_lin).max())
        comp = max(comp, float(np.abs(dual * lift_slack).max()))
        return max(r1, r2, comp)

    best = min((mu_fit, mu_barrier), key=worst_resid)
    return best, duals_for(best)


def _crossover(q, model, v, tau, which, part):
    """Newton refinement of the barrier point on its guessed active set.

    Each constraint is pinned either to activity or to a zero multiplier,
    whichever its barrier slack-multiplier pair favors; the resulting
    square system (stationarity, pinned activities, pinned zeros) is solved
    by Newton.  Returns (v, mu, dual) or None when the guess is unusable.
    The payoff is at weakly active optima, where the central path alone
    leaves residuals of the order of the square root of the gap parameter.
    """
    n, m = q.n, q.m
    n_lift = len(model.groups)
    s_lin = model.lin_slacks(v)
    s_grp = model.group_slacks(v)
    mu_est = tau / np.maximum(s_lin, 1e-300)
    dual_est = tau / np.maximum(s_grp, 1e-300)
    pin_lin = [s_lin[i] <= mu_est[i] for i in range(m)]
    pin_grp = [s_grp[g] <= dual_est[g] for g in range(n_lift)]

    if which == CONV:
        xi_cols = q.A
        base_diag = q.D
        curvature = np.zeros(n)
        class_of = list(range(n))
    else:
        xi_cols = part.class_coeffs
        base_diag = part.min_diag
        curvature = np.array(
            [q.D[j] - part.min_diag[part.class_of[j]] for j in range(n)]
        )
        class_of = list(part.class_of)

    dim_v = model.nvars
    size = dim_v + m + n_lift

    def unpack(u):
        return u[:dim_v], u[dim_v : dim_v + m], u[dim_v + m :]

    def residual(u):
        vv, mu, dual = unpack(u)
        x = vv[:n]
        F = np.zeros(size)
        F[:n_lift] = base_diag + mu @ xi_cols - dual
        for j in range(n):
            F[n_lift + j] = (
                curvature[j] * x[j]
                + q.c[j]
                + float(mu @ q.a[:, j])
                + dual[class_of[j]] * x[j]
            )
        off = n_lift + n
        for i in range(m):
            F[off + i] = (q.b[i] - model.R[i] @ vv) if pin_lin[i] else mu[i]
        off += m
        for g, (t, ms) in enumerate(model.groups):
            if pin_grp[g]:
                F[off + g] = vv[t] - np.sum(vv[list(ms)] ** 2)
            else:
                F[off + g] = dual[g]
        return F

    def jacobian(u):
        vv, mu, dual = unpack(u)
        x = vv[:n]
        J = np.zeros((size, size))
        for g in range(n_lift):
            J[g, dim_v : dim_v + m] = xi_cols[:, g]
            J[g, dim_v + m + g] = -1.0
        for j in range(n):
            r = n_lift + j
            J[r, j] = curvature[j] + dual[class_of[j]]
            J[r, dim_v : dim_v + m] = q.a[:, j]
            J[r, dim_v + m + class_of[j]] = x[j]
        off = n_lift + n
        for i in range(m):
            if pin_lin[i]:
                J[off + i, :dim_v] = -model.R[i]
            else:
                J[off + i, dim_v + i] = 1.0
        off += m
        for g, (t, ms) in enumerate(model.groups):
            if pin_grp[g]:
                J[off + g, t] = 1.0
                for j in ms:
                    J[off + g, j] = -2.0 * vv[j]
            else:
                J[off + g, dim_v + m + g] = 1.0
        return J

    u = np.concatenate([v, np.minimum(mu_est, 1e6), np.minimum(dual_est, 1e6)])
    u[dim_v : dim_v + m] *= np.array([1.0 if p else 0.0 for p in pin_lin])
    u[dim_v + m :] *= np.array([1.0 if p else 0.0 for p in pin_grp])
    for _ in range(8):
        F = residual(u)
        if float(np.abs(F).max()) < 1e-13 * q.scale():
            break
        try:
            step = np.linalg.solve(jacobian(u), -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        u = u + step
    vv, mu, dual = unpack(u)
    tol_here = 1e-7 * q.scale()
    if float(np.abs(residual(u)).max()) > tol_here:
        return None
    if np.min(mu) < -tol_here or np.min(dual) < -tol_here:
        return None
    if np.max(model.R @ vv - model.rhs) > tol_here:
        return None
    if np.min(model.group_slacks(vv)) < -tol_here:
        return None
    return vv, np.maximum(mu, 0.0), np.maximum(dual, 0.0)


def _solve_relaxation(q, which, tol, part=None):
    if which == NEWCONV:
        part = part if part is not None else compute_partition(q)
        model = _newconv_model(q, part)
    else:
        part = part if part is not None else compute_partition(q)
        model = _conv_model(q)

    v0, sigma = _phase_one(model, tol)
    if v0 is None:
        return RelaxSolution(
            which=which,
            status="Infeasible",
            partition=part,
            detail=f"no strictly feasible point; best violation bound {sigma:.3e}",
        )
    status, v, tau = _barrier_minimize(model, v0, tol)
    if status == "unbounded":
        return RelaxSolution(
            which=which,
            status="NumericalFailure",
            partition=part,
            detail="iterates diverged; relaxation appears unbounded below",
        )
    n = q.n
    crossed = _crossover(q, model, v, tau, which, part)
    if crossed is not None:
        v, mu, dual = crossed
    else:
        mu, dual = _recover_multipliers(q, model, v, tau, which, part)
    x = v[:n]
    if which == CONV:
        sol = RelaxSolution(
            which=which,
            status="Optimal",
            x=x,
            z=v[n:],
            mu=mu,
            nu=dual,
            value=model.objective(v),
            partition=part,
        )
    else:
        sol = RelaxSolution(
            which=which,
            status="Optimal",
            x=x,
            w=v[n:],
            mu=mu,
            gamma=dual,
            value=model.objective(v),
            partition=part,
        )
    resid = kkt_residuals(q, part, sol)
    if resid.worst() > 100.0 * tol * q.scale():
        return RelaxSolution(
            which=which,
            status="NumericalFailure",
            x=x,
            z=sol.z,
            w=sol.w,
            mu=mu,
            nu=sol.nu,
            gamma=sol.gamma,
            value=sol.value,
            partition=part,
            detail=f"first-order residual {resid.worst():.3e} above 100*tol",
        )
    return sol


def solve_convrel(q: DiagonalQCQP, tol: float = DEFAULT_TOL) -> RelaxSolution:
    """Solve the per-coordinate lifted relaxation.

    Minimizes ``D @ z + 2 c @ x`` subject to the instance rows in ``(x, z)``
    and ``x_j^2 <= z_j``.  Multipliers are recovered from the barrier
    certificate; a solution whose first-order residuals exceed ``100 * tol``
    is reported as NumericalFailure, never silently as Optimal.
    """
    return _solve_relaxation(q, CONV, tol)


def solve_newconvrel(
    q: DiagonalQCQP, part: Optional[PartitionInfo] = None, tol: float = DEFAULT_TOL
) -> RelaxSolution:
    """Solve the class-aggregated relaxation (same value as the lifted one)."""
    return _solve_relaxation(q, NEWCONV, tol, part=part)


def kkt_residuals(q: DiagonalQCQP, part: PartitionInfo, sol: RelaxSolution) -> KktResiduals:
    """Evaluate the first-order system literally at a solution.

    No tolerance is applied; callers judge the magnitudes.
    """
    if sol.status != "Optimal" and sol.x is None:
        raise QcqpError("first-order residuals require a solved point")
    x, mu = sol.x, sol.mu
    lin_vals = None
    if sol.which == CONV:
        z = sol.z
        nu = sol.nu
        stat_q = float(np.abs(q.D + mu @ q.A - nu).max())
        stat_l = float(np.abs(q.c + mu @ q.a + nu * x).max())
        lin_vals = q.A @ z + 2.0 * q.a @ x - q.b
        lift_slack = z - x * x
        comp_lift = np.abs(nu * lift_slack)
        dual_min = min(float(np.min(mu)), float(np.min(nu)))
    else:
        w = sol.w
        gamma = sol.gamma
        stat_q = float(np.abs(part.min_diag + mu @ part.class_coeffs - gamma).max())
        per_j = np.array(
            [
                (q.D[j] - part.min_diag[part.class_of[j]]) * x[j]
                + q.c[j]
                + mu @ q.a[:, j]
                + gamma[part.class_of[j]] * x[j]
                for j in range(q.n)
            ]
        )
        stat_l = float(np.abs(per_j).max())
        lin_vals = part.class_coeffs @ w + 2.0 * q.a @ x - q.b
        lift_slack = np.array(
            [w[h] - np.sum(x[list(part.classes[h])] ** 2) for h in range(part.num_classes)]
        )
        comp_lift = np.abs(gamma * lift_slack)
        dual_min = min(float(np.min(mu)), float(np.min(gamma)))
    primal = max(float(np.max(lin_vals, initial=0.0)), float(np.max(-lift_slack, initial=0.0)), 0.0)
    comp = max(float(np.abs(mu * lin_vals).max()), float(comp_lift.max()))
    return KktResiduals(
        stationarity_quadratic=stat_q,
        stationarity_linear=stat_l,
        primal=primal,
        complementarity=comp,
        dual_sign=max(0.0, -dual_min),
    )


def expand_aggregates(sol: RelaxSolution) -> np.ndarray:
    """Per-coordinate lifted values implied by a class-aggregated solution.

    All aggregate slack is assigned to the class minimizer; the other
    coordinates carry exactly their squares, mirroring the fact that their
    lifting multipliers are strictly positive at optimality.
    """
    part = sol.partition
    x = sol.x
    z = x * x
    for h in range(part.num_classes):
        jh = part.min_index[h]
        others = [j for j in part.classes[h] if j != jh]
        z[jh] = sol.w[h] - np.sum(x[others] ** 2)
    return z


def reconstruct_shor(q: DiagonalQCQP, sol: RelaxSolution, feas_tol: float = FEAS_TOL) -> ShorPoint:
    """Complete a relaxation optimum into a matrix-feasible pair, same value.

    The diagonal correction is ``z - x^2`` (clamped at zero below
    ``feas_tol``); feasibility of the completed pair is re-verified.
    """
    if sol.status != "Optimal":
        raise QcqpError("can only reconstruct from an Optimal solution")
    x = sol.x
    z = sol.z if sol.which == CONV else expand_aggregates(sol)
    corr = z - x * x
    if np.min(corr) < -feas_tol * q.scale():
        raise NegativeSlack(f"lifted value below square by {float(np.min(corr)):.3e}")
    corr = np.maximum(corr, 0.0)
    value = float(q.D @ (x * x + corr) + 2.0 * q.c @ x)
    lhs = q.A @ (x * x + corr) + 2.0 * q.a @ x
    if np.any(lhs - q.b > feas_tol * q.scale() * 10):
        raise QcqpError("internal: completed pair violates a constraint")
    return ShorPoint(x=x.copy(), correction=corr, value=value)


def exactness_gap(q: DiagonalQCQP, sol: RelaxSolution):
    """Per-coordinate lifting slacks and their maximum.

    A maximum at or below the feasibility tolerance is this package's
    working definition of a rank-one relaxation solution.
    """
    if sol.status != "Optimal":
        raise QcqpError("exactness gap requires an Optimal solution")
    x = sol.x
    z = sol.z if sol.which == CONV else expand_aggregates(sol)
    slacks = np.maximum(z - x * x, 0.0)
    return slacks, float(np.max(slacks))


def find_strict_interior(q: DiagonalQCQP, tol: float = DEFAULT_TOL):
    """A strictly feasible point of the lifted relaxation, or None.

    Existence certifies a nonempty interior for the matrix relaxation as
    well: the completion with matrix ``x x^T + diag(z - x^2)`` is strictly
    feasible there.
    """
    model = _conv_model(q)
    v0, _ = _phase_one(model, tol)
    if v0 is None:
        return None
    n = q.n
    return v0[:n], v0[n:]
