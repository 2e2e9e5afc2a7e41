"""Instance representation, validation, variable partitioning and auditing.

The data convention is fixed throughout the package: the objective value at
``x`` is ``sum_j D[j] x_j^2 + 2 sum_j c[j] x_j`` and constraint ``i`` reads
``sum_j A[i, j] x_j^2 + 2 sum_j a[i, j] x_j <= b[i]``.  The factor 2 on the
linear terms is part of the data contract, not a normalization choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyModel, NonFiniteEntry

#: Coefficients closer than this are grouped into one partition class.
GROUP_TOL = 1e-9

#: A second diagonal entry within this distance of the class minimum marks
#: the minimizer as non-unique; checkers then fall back to perturbation.
MIN_UNIQUE_TOL = 1e-9

#: Radius used when a checker auto-perturbs to break a tied minimum.
TIE_BREAK_EPS = 1e-7


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DiagonalQCQP:
    """A quadratic program whose objective and constraint Hessians are diagonal.

    Immutable after construction; all operations on it are pure functions.
    """

    D: np.ndarray  # (n,) objective diagonal
    c: np.ndarray  # (n,) objective linear coefficients
    A: np.ndarray  # (m, n) constraint diagonals, one row per constraint
    a: np.ndarray  # (m, n) constraint linear coefficients
    b: np.ndarray  # (m,) right-hand sides

    def __post_init__(self):
        for name in ("D", "c", "A", "a", "b"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        n = self.D.shape[0] if self.D.ndim == 1 else -1
        m = self.b.shape[0] if self.b.ndim == 1 else -1
        if n < 1 or m < 1:
            raise EmptyModel(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if self.c.shape != (n,):
            raise DimensionMismatch(f"c has shape {self.c.shape}, expected ({n},)")
        if self.A.shape != (m, n):
            raise DimensionMismatch(f"A has shape {self.A.shape}, expected ({m}, {n})")
        if self.a.shape != (m, n):
            raise DimensionMismatch(f"a has shape {self.a.shape}, expected ({m}, {n})")
        for name in ("D", "c", "A", "a", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NonFiniteEntry(f"non-finite entry in {name}")

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[0]

    def scale(self) -> float:
        """Largest coefficient magnitude; used for relative tolerances."""
        return max(
            1.0,
            float(np.abs(self.D).max()),
            float(np.abs(self.c).max()),
            float(np.abs(self.A).max()),
            float(np.abs(self.a).max()),
            float(np.abs(self.b).max()),
        )


def validate_instance(raw: dict) -> DiagonalQCQP:
    """Build a validated instance from a parsed instance record.

    ``raw`` follows the on-disk JSON layout: ``n``, ``m``, ``objective``
    with ``D`` and ``c``, and a list of ``constraints`` each carrying
    ``A``, ``a`` and ``b``.
    """
    try:
        n = int(raw["n"])
        m = int(raw["m"])
        obj = raw["objective"]
        cons = raw["constraints"]
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"missing or malformed field: {exc}") from exc
    if n < 1 or m < 1:
        raise EmptyModel(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if len(cons) != m:
        raise DimensionMismatch(f"{len(cons)} constraints listed but m={m}")

    def seq(value, length, what):
        arr = np.asarray(value, dtype=float)
        if arr.shape != (length,):
            raise DimensionMismatch(f"{what} has length {arr.shape}, expected {length}")
        return arr

    D = seq(obj["D"], n, "objective.D")
    c = seq(obj["c"], n, "objective.c")
    A = np.stack([seq(rec["A"], n, f"constraints[{i}].A") for i, rec in enumerate(cons)])
    a = np.stack([seq(rec["a"], n, f"constraints[{i}].a") for i, rec in enumerate(cons)])
    b = np.asarray([float(rec["b"]) for rec in cons])
    return DiagonalQCQP(D=D, c=c, A=A, a=a, b=b)


@dataclass(frozen=True)
class PartitionInfo:
    """Variable classes sharing identical constraint diagonals.

    Two indices land in one class when their columns of ``A`` agree within
    the grouping tolerance in every constraint.  Each class records the
    shared coefficients, the index of the smallest objective diagonal inside
    the class, and whether that minimum is unique.
    """

    classes: tuple  # tuple of tuples of variable indices, disjoint, covering N
    class_coeffs: np.ndarray  # (m, |H|) shared constraint diagonal per class
    min_index: tuple  # per class, index attaining the smallest D entry
    min_diag: np.ndarray  # (|H|,) smallest D entry per class
    unique_min: tuple  # per class, True when the minimum is isolated
    class_of: tuple  # per variable, the class it belongs to

    def __post_init__(self):
        object.__setattr__(self, "class_coeffs", _readonly(self.class_coeffs))
        object.__setattr__(self, "min_diag", _readonly(self.min_diag))

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def min_indices(self) -> tuple:
        """The set of per-class minimizing indices, one per class."""
        return self.min_index


def compute_partition(q: DiagonalQCQP, group_tol: float = GROUP_TOL) -> PartitionInfo:
    """Group variables whose constraint diagonals coincide within ``group_tol``.

    Classes are connected components of the pairwise closeness relation, so
    they are maximal.  Ties in the per-class minimum are flagged, never fatal.
    """
    n = q.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for j in range(n):
        for k in range(j + 1, n):
            if np.all(np.abs(q.A[:, j] - q.A[:, k]) <= group_tol):
                rj, rk = find(j), find(k)
                if rj != rk:
                    parent[max(rj, rk)] = min(rj, rk)

    groups: dict[int, list[int]] = {}
    for j in range(n):
        groups.setdefault(find(j), []).append(j)
    classes = tuple(tuple(sorted(members)) for _, members in sorted(groups.items()))

    coeffs = np.zeros((q.m, len(classes)))
    min_index = []
    min_diag = np.zeros(len(classes))
    unique = []
    class_of = [0] * n
    for h, members in enumerate(classes):
        coeffs[:, h] = q.A[:, members[0]]
        diags = q.D[list(members)]
        pos = int(np.argmin(diags))
        min_index.append(members[pos])
        min_diag[h] = diags[pos]
        others = np.delete(diags, pos)
        unique.append(bool(others.size == 0 or np.min(others) - diags[pos] > MIN_UNIQUE_TOL))
        for j in members:
            class_of[j] = h
    return PartitionInfo(
        classes=classes,
        class_coeffs=coeffs,
        min_index=tuple(min_index),
        min_diag=min_diag,
        unique_min=tuple(unique),
        class_of=tuple(class_of),
    )


@dataclass(frozen=True)
class AssumptionReport:
    """Audit of the regularity conditions the checkers rely on.

    ``y_weights`` is a nonnegative combination of the constraint diagonals
    that is entrywise positive; its existence bounds the feasible set.
    Statuses are ``Certified`` or ``Unknown``, never a false ``Certified``.
    """

    feasibility: str
    y_weights: Optional[np.ndarray]
    slater: str
    margin: float

    def __post_init__(self):
        if self.y_weights is not None:
            object.__setattr__(self, "y_weights", _readonly(self.y_weights))


def positive_weights(q: DiagonalQCQP, tol: float = 1e-9):
    """Find y >= 0 with every entry of ``y @ A`` positive, or return None.

    Solved as a small linear program maximizing the worst aggregated
    diagonal subject to ``sum(y) <= 1``.
    """
    from .numerics.simplex import LinearProgram, lp_solve

    m, n = q.m, q.n
    # variables: y_0..y_{m-1}, t;  maximize t with y@A[:,j] >= t for all j.
    ineq = []
    for j in range(n):
        row = np.zeros(m + 1)
        row[:m] = -q.A[:, j]
        row[m] = 1.0
        ineq.append((row, 0.0))
    row_sum = np.zeros(m + 1)
    row_sum[:m] = 1.0
    ineq.append((row_sum, 1.0))
    objective = np.zeros(m + 1)
    objective[m] = 1.0
    lp = LinearProgram(
        n_vars=m + 1,
        objective=objective,
        maximize=True,
        ineq=tuple((r, float(rhs)) for r, rhs in ineq),
        nonneg=frozenset(range(m)),
    )
    out = lp_solve(lp)
    if out.status != "Feasible" or out.value is None or out.value <= tol:
        return None, 0.0
    y = np.maximum(out.point[:m], 0.0)
    margin = float(np.min(y @ q.A))
    if margin <= 0.0:
        return None, 0.0
    return y, margin


def check_assumption1(q: DiagonalQCQP, probe_interior: bool = True) -> AssumptionReport:
    """Audit feasibility, aggregation weights and strict relaxation interior.

    Feasibility of the original problem is certified only by exhibiting a
    feasible point (the origin, the aggregated-ellipsoid center, or the
    relaxation's strictly interior point when its x-part happens to satisfy
    the original constraints).  Absence of a certificate yields ``Unknown``.
    """
    y, margin = positive_weights(q)

    feasibility = "Unknown"
    candidates = [np.zeros(q.n)]
    if y is not None:
        alpha = y @ q.A
        beta = y @ q.a
        candidates.append(-beta / alpha)

    slater = "Unknown"
    if probe_interior:
        from .relaxations import find_strict_interior

        interior = find_strict_interior(q)
        if interior is not None:
            slater = "Certified"
            candidates.append(interior[0])

    for x in candidates:
        _, viol = evaluate(q, x)
        if np.all(viol <= 0.0):
            feasibility = "Certified"
            break

    return AssumptionReport(
        feasibility=feasibility,
        y_weights=y,
        slater=slater,
        margin=margin if y is not None else 0.0,
    )


def perturb(q: DiagonalQCQP, eps: float, seed: int) -> DiagonalQCQP:
    """Shift every coefficient by an independent uniform draw in [-eps, eps].

    Deterministic given the seed.  ``eps = 0`` returns the instance
    unchanged.  Used to break ties and degenerate systems before checks
    that assume uniqueness; exactness of the perturbed family transfers to
    the original data in the vanishing-radius limit.
    """
    if eps < 0:
        raise ValueError("perturbation radius must be nonnegative")
    if eps == 0:
        return q
    rng = np.random.default_rng(seed)

    def shift(arr):
        return arr + rng.uniform(-eps, eps, size=arr.shape)

    return DiagonalQCQP(
        D=shift(q.D), c=shift(q.c), A=shift(q.A), a=shift(q.a), b=shift(q.b)
    )


def evaluate(q: DiagonalQCQP, x: Sequence[float]):
    """Objective value and per-constraint violations at a point.

    ``violations[i] <= 0`` means constraint ``i`` is satisfied.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (q.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({q.n},)")
    if not np.all(np.isfinite(x)):
        raise NonFiniteEntry("non-finite entry in evaluation point")
    sq = x * x
    objective = float(q.D @ sq + 2.0 * q.c @ x)
    violations = q.A @ sq + 2.0 * q.a @ x - q.b
    return objective, violations
