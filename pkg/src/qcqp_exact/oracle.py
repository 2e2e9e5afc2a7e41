"""Approximate-global brute force for desk-scale instances.

This is the independent ground truth every verdict is tested against: a
feasible-region grid sweep inside a certified bounding box, local
shrink-and-regrid refinement, and an exact per-coordinate polish.  It never
claims infeasibility and never certifies global optimality; it produces
feasible points whose values upper-bound the true minimum tightly enough
for desk-scale auditing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DeskScaleExceeded, NoBoundingWeights, NoFeasiblePoint, QcqpError
from .model import AssumptionReport, DiagonalQCQP, evaluate, positive_weights

DESK_SCALE_MAX_N = 4
ORACLE_FEAS_TOL = 1e-6
POLISH_STEP_FLOOR = 1e-6
BOX_INFLATION = 1.01
CHUNK = 2_000_000

DEFAULT_GRIDS = {1: 2001, 2: 201, 3: 61, 4: 21}


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin: np.ndarray
    box: tuple  # (lo, hi) arrays certified to contain the feasible set
    grid_points: int
    refinements: int
    feasible_found: bool


def bounding_box(q: DiagonalQCQP, report: AssumptionReport):
    """Per-coordinate intervals certified to contain the feasible set.

    The nonnegative aggregation of the constraints is a coordinatewise
    separable quadratic that every feasible point satisfies; completing the
    square per coordinate gives the intervals, inflated by one percent.
    """
    if report.y_weights is None:
        raise NoBoundingWeights("no positive-definite aggregation weights available")
    y = report.y_weights
    alpha = y @ q.A
    beta = y @ q.a
    total = float(y @ q.b)
    if np.any(alpha <= 0):
        raise NoBoundingWeights("aggregation weights lost positivity")
    radius_sq = total + float(np.sum(beta * beta / alpha))
    if radius_sq < 0:
        raise NoFeasiblePoint("aggregated constraint is empty; no feasible point exists")
    center = -beta / alpha
    half = np.sqrt(radius_sq / alpha) * BOX_INFLATION
    return center - half, center + half


def _grid_scan(q: DiagonalQCQP, lo, hi, grid_per_dim):
    """Best feasible grid point and a short list of distinct runners-up."""
    axes = [np.linspace(lo[j], hi[j], grid_per_dim) for j in range(q.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    best_val = np.inf
    best_pt = None
    candidates = []
    spacing = np.max((hi - lo) / max(grid_per_dim - 1, 1))
    for start in range(0, pts.shape[0], CHUNK):
        block = pts[start : start + CHUNK]
        sq = block * block
        viol = sq @ q.A.T + 2.0 * block @ q.a.T - q.b
        mask = np.max(viol, axis=1) <= ORACLE_FEAS_TOL
        if not np.any(mask):
            continue
        feas = block[mask]
        vals = (feas * feas) @ q.D + 2.0 * feas @ q.c
        order = np.argsort(vals)[:32]
        for idx in order:
            candidates.append((float(vals[idx]), feas[idx]))
        if vals[order[0]] < best_val:
            best_val = float(vals[order[0]])
            best_pt = feas[order[0]]
    candidates.sort(key=lambda t: t[0])
    distinct = []
    for val, pt in candidates:
        if all(np.max(np.abs(pt - other)) > 2.0 * spacing for _, other in distinct):
            distinct.append((val, pt))
        if len(distinct) >= 8:
            break
    return best_val, best_pt, distinct, pts.shape[0]


def _line_intervals(q: DiagonalQCQP, x: np.ndarray, d: np.ndarray):
    """Feasible step intervals along ``x + t d``; each row stays quadratic in t."""
    _, viol = evaluate(q, x)
    alphas = q.A @ (d * d)
    betas = q.A @ (x * d) + q.a @ d
    pieces = [(-1e8, 1e8)]
    for i in range(q.m):
        allowed = _quad_le_zero(float(alphas[i]), float(betas[i]), float(viol[i]))
        pieces = _intersect(pieces, allowed)
        if not pieces:
            return []
    return pieces


def _quad_le_zero(alpha, beta, gamma):
    """Solution set of alpha s^2 + 2 beta s + gamma <= 0 as intervals."""
    if abs(alpha) < 1e-14:
        if abs(beta) < 1e-14:
            return [(-1e8, 1e8)] if gamma <= 1e-12 else []
        bound = -gamma / (2.0 * beta)
        return [(-1e8, bound)] if beta > 0 else [(bound, 1e8)]
    disc = beta * beta - alpha * gamma
    if alpha > 0:
        if disc < 0:
            return []
        root = np.sqrt(disc)
        return [((-beta - root) / alpha, (-beta + root) / alpha)]
    # concave: complement of the open interval between the roots
    if disc <= 0:
        return [(-1e8, 1e8)]
    root = np.sqrt(disc)
    u1 = (-beta + root) / alpha
    u2 = (-beta - root) / alpha
    lo, hi = min(u1, u2), max(u1, u2)
    return [(-1e8, lo), (hi, 1e8)]


def _intersect(pieces_a, pieces_b):
    out = []
    for alo, ahi in pieces_a:
        for blo, bhi in pieces_b:
            lo, hi = max(alo, blo), min(ahi, bhi)
            if hi >= lo:
                out.append((lo, hi))
    return out


def _line_minimize(q: DiagonalQCQP, x: np.ndarray, d: np.ndarray):
    """Exact minimizer of the objective along ``x + t d`` over the feasible set.

    Returns the best step t (possibly 0).  The restricted objective is the
    univariate quadratic ``qc t^2 + 2 ql t``; candidates are interval
    endpoints plus the interior vertex when the restriction is convex.
    """
    pieces = _line_intervals(q, x, d)
    if not pieces:
        return 0.0
    qc = float(q.D @ (d * d))
    ql = float(q.D @ (x * d) + q.c @ d)
    best_t, best_v = 0.0, 0.0
    for lo, hi in pieces:
        cands = [lo, hi]
        if qc > 0:
            vertex = -ql / qc
            if lo < vertex < hi:
                cands.append(vertex)
        for t in cands:
            v = qc * t * t + 2.0 * ql * t
            if v < best_v:
                best_v, best_t = v, t
    return best_t


def _tangent_directions(q: DiagonalQCQP, x: np.ndarray):
    """Objective descent directions projected off near-active constraint normals.

    Two activity thresholds are tried because grid incumbents sit anywhere
    from exactly on a boundary to one spacing away from it.
    """
    grad = 2.0 * (q.D * x + q.c)
    _, viol = evaluate(q, x)
    scale = q.scale()
    dirs = [-grad]
    for act_tol in (1e-7 * scale, 1e-4 * scale):
        active = [i for i in range(q.m) if viol[i] >= -act_tol]
        if not active:
            continue
        normals = np.array([2.0 * (q.A[i] * x + q.a[i]) for i in active])
        lam, *_ = np.linalg.lstsq(normals.T, -grad, rcond=None)
        d = -grad - normals.T @ lam
        dn = float(np.linalg.norm(d))
        if dn <= 1e-12 * (1.0 + float(np.linalg.norm(grad))):
            continue
        dirs.append(d)
        # A straight line leaves a curved boundary immediately, so tilt the
        # tangent inward by a ladder of amounts; each tilted line is a chord
        # of the boundary along which the exact search can make progress.
        inward = -np.sum(
            normals / np.linalg.norm(normals, axis=1, keepdims=True), axis=0
        )
        in_norm = float(np.linalg.norm(inward))
        if in_norm > 1e-12:
            inward /= in_norm
            for tilt in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
                dirs.append(d / dn + tilt * inward)
    return dirs


def _coordinate_polish(q: DiagonalQCQP, x0: np.ndarray, max_sweeps: int = 200):
    """Exact descent polish: coordinate sweeps plus projected-gradient moves.

    Every move is an exact univariate minimization over the feasible
    intervals of a line, so the iterate never leaves the feasible set and
    the objective never increases.  Coordinate sweeps handle indefinite
    curvature (the restriction is solved globally on the line); the
    projected directions slide along curved active boundaries, where pure
    coordinate moves stall; the displacement step collapses corner zigzag.
    """
    x = x0.copy()
    val0, _ = evaluate(q, x)
    eye = np.eye(q.n)
    for _ in range(max_sweeps):
        x_prev = x.copy()
        for j in range(q.n):
            t = _line_minimize(q, x, eye[j])
            if t != 0.0:
                x = x + t * eye[j]
        for d in _tangent_directions(q, x):
            t = _line_minimize(q, x, d)
            if t != 0.0:
                x = x + t * d
        disp = x - x_prev
        norm = float(np.max(np.abs(disp)))
        if norm > 0:
            t = _line_minimize(q, x, disp)
            if t != 0.0:
                x = x + t * disp
        if norm < POLISH_STEP_FLOOR:
            break
    new_val, viol = evaluate(q, x)
    if new_val <= val0 and float(np.max(viol)) <= ORACLE_FEAS_TOL:
        return x, new_val
    return x0, val0


def _restore_feasibility(q: DiagonalQCQP, x: np.ndarray):
    """One-dimensional backoff onto the worst-violated constraint.

    Starts from a vanishing step and doubles, so a hairline violation is
    repaired by a hairline move rather than a jump to a distant chord.
    """
    _, viol = evaluate(q, x)
    worst = int(np.argmax(viol))
    if viol[worst] <= 0:
        return x
    grad = 2.0 * q.A[worst] * x + 2.0 * q.a[worst]
    norm = float(np.linalg.norm(grad))
    if norm < 1e-14:
        return x
    direction = -grad / norm
    lo_t, hi_t = 0.0, 1e-12
    for _ in range(80):
        trial = x + hi_t * direction
        if np.max(evaluate(q, trial)[1]) <= 0:
            break
        lo_t = hi_t
        hi_t *= 2.0
        if hi_t > 10.0:
            return x
    for _ in range(80):
        mid = 0.5 * (lo_t + hi_t)
        if np.max(evaluate(q, x + mid * direction)[1]) <= 0:
            hi_t = mid
        else:
            lo_t = mid
    return x + hi_t * direction


def global_minimize(
    q: DiagonalQCQP,
    grid_per_dim: Optional[int] = None,
    refine_rounds: int = 4,
) -> OracleResult:
    """Grid the bounding box, refine around the incumbent, polish exactly.

    The incumbent value is non-increasing across rounds.  Runner-up grid
    candidates are polished as well, which guards against the refinement
    zooming into the wrong basin on multimodal instances.
    """
    if q.n > DESK_SCALE_MAX_N:
        raise DeskScaleExceeded(f"n={q.n} exceeds the oracle cap of {DESK_SCALE_MAX_N}")
    if grid_per_dim is None:
        grid_per_dim = DEFAULT_GRIDS[q.n]
    if grid_per_dim < 10:
        raise ValueError("need at least 10 grid points per dimension")

    y, _ = positive_weights(q)
    report = AssumptionReport(feasibility="Unknown", y_weights=y, slater="Unknown", margin=0.0)
    lo, hi = bounding_box(q, report)

    best_val, best_pt, candidates, n_pts = _grid_scan(q, lo, hi, grid_per_dim)
    total_pts = n_pts
    if best_pt is None:
        for probe in (0.5 * (lo + hi), np.zeros(q.n)):
            val, viol = evaluate(q, probe)
            if float(np.max(viol)) <= ORACLE_FEAS_TOL:
                best_val, best_pt = val, probe
                candidates = [(val, probe)]
                break
    if best_pt is None:
        raise NoFeasiblePoint(
            f"no feasible point among {n_pts} grid samples; refine the grid or "
            "check the instance (this is not a claim of infeasibility)"
        )

    half = (hi - lo) / 2.0
    center = best_pt.copy()
    for _ in range(refine_rounds):
        half = half / 2.0
        r_lo = np.maximum(center - half, lo)
        r_hi = np.minimum(center + half, hi)
        val, pt, _, n_new = _grid_scan(q, r_lo, r_hi, grid_per_dim)
        total_pts += n_new
        if pt is not None and val < best_val:
            best_val, best_pt = val, pt
        center = best_pt.copy()

    polished, polished_val = _coordinate_polish(q, best_pt)
    if polished_val < best_val:
        best_val, best_pt = polished_val, polished
    for _, cand in candidates[1:]:
        alt, alt_val = _coordinate_polish(q, cand)
        if alt_val < best_val:
            best_val, best_pt = alt_val, alt

    _, viol = evaluate(q, best_pt)
    if float(np.max(viol)) > 1e-12 * q.scale():
        restored = _restore_feasibility(q, best_pt)
        restored_val, r_viol = evaluate(q, restored)
        if float(np.max(r_viol)) <= 0 and restored_val <= best_val + 1e-6 * q.scale():
            best_pt, best_val = restored, restored_val
    final_val, final_viol = evaluate(q, best_pt)
    if float(np.max(final_viol)) > ORACLE_FEAS_TOL:
        raise QcqpError("internal: oracle incumbent lost feasibility")
    return OracleResult(
        value=float(final_val),
        argmin=best_pt,
        box=(lo, hi),
        grid_points=int(total_pts),
        refinements=int(refine_rounds),
        feasible_found=True,
    )


def verify_exactness(q: DiagonalQCQP, tol: float = 1e-5, **oracle_kwargs) -> dict:
    """Compare the relaxation value against the brute-force value.

    ``gap = oracle - relaxation`` is nonnegative up to solver tolerance
    because the relaxation is a valid lower bound; a substantially negative
    gap is a build-stopping inconsistency and raises.
    """
    from .relaxations import solve_convrel

    if q.n > DESK_SCALE_MAX_N:
        raise DeskScaleExceeded(f"n={q.n} exceeds the oracle cap of {DESK_SCALE_MAX_N}")
    sol = solve_convrel(q)
    if sol.status != "Optimal":
        raise QcqpError(f"relaxation not solved: {sol.status}; {sol.detail}")
    res = global_minimize(q, **oracle_kwargs)
    gap = res.value - sol.value
    if gap < -max(tol, 1e-7 * q.scale()):
        raise QcqpError(
            f"lower-bound violation: relaxation {sol.value} above oracle {res.value}"
        )
    return {
        "relax_value": float(sol.value),
        "oracle_value": float(res.value),
        "gap": float(gap),
        "exact": bool(gap <= tol),
    }
