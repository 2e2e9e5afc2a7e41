"""Real-root isolation by grid bracketing and bisection.

This is a semi-decision procedure: a root where the function touches zero
between grid points without a sign change can be missed.  Callers that rely
on completeness record that caveat in their verdicts.
"""

from __future__ import annotations

import numpy as np


def _sample(f, ts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(ts), dtype=float)
        if vals.shape == ts.shape:
            return vals
    except Exception:
        pass
    return np.array([float(f(t)) for t in ts])


def find_real_roots(f, interval, grid: int = 400, root_tol: float = 1e-10) -> list[float]:
    """Locate sign-change roots of ``f`` on ``interval``.

    Samples ``grid`` points, brackets sign changes (non-finite samples break
    brackets), bisects each bracket down to ``root_tol``, then polishes with
    a few secant steps.  Candidates whose residual stays large relative to
    the bracket endpoints are discarded; this filters out poles, where
    bisection converges to a jump rather than a zero.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (hi > lo):
        return []
    if grid < 2:
        raise ValueError("need at least 2 grid points")
    ts = np.linspace(lo, hi, grid)
    vs = _sample(f, ts)

    roots: list[float] = []

    def accept(t: float, fval: float, scale: float) -> None:
        if not np.isfinite(fval) or abs(fval) > root_tol * (1.0 + scale):
            return
        for r in roots:
            if abs(r - t) <= max(root_tol, 1e-12 * (1 + abs(t))) * 10:
                return
        roots.append(float(t))

    for idx in range(grid):
        if np.isfinite(vs[idx]) and vs[idx] == 0.0:
            accept(ts[idx], 0.0, 0.0)

    for idx in range(grid - 1):
        va, vb = vs[idx], vs[idx + 1]
        if not (np.isfinite(va) and np.isfinite(vb)):
            continue
        if va == 0.0 or vb == 0.0 or va * vb > 0.0:
            continue
        a, b = float(ts[idx]), float(ts[idx + 1])
        fa, fb = float(va), float(vb)
        scale = max(abs(fa), abs(fb))
        for _ in range(200):
            if b - a <= root_tol:
                break
            mid = 0.5 * (a + b)
            fm = float(f(mid))
            if not np.isfinite(fm):
                break
            if fm == 0.0:
                a = b = mid
                fa = fb = 0.0
                break
            if fa * fm < 0.0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        t = 0.5 * (a + b)
        ft = float(f(t))
        # secant polish drives the residual down on steep crossings
        t_prev, f_prev = a, fa
        for _ in range(3):
            if not np.isfinite(ft) or ft == 0.0 or ft == f_prev:
                break
            t_next = t - ft * (t - t_prev) / (ft - f_prev)
            if not (lo <= t_next <= hi):
                break
            f_next = float(f(t_next))
            if not np.isfinite(f_next) or abs(f_next) >= abs(ft):
                break
            t_prev, f_prev = t, ft
            t, ft = t_next, f_next
        accept(t, ft, scale)

    return sorted(roots)
