"""Instance files and seeded random instance generation.

The on-disk format is a small JSON document; numbers follow the fixed data
convention (factor 2 on linear terms), so fixtures can be written straight
from printed problem data.  Generation is deterministic: the same
``(n, m, scheme, seed)`` always yields byte-identical output.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .model import DiagonalQCQP, validate_instance

SCHEMES = ("gaussian", "signdef", "ball-linear")
_SCHEME_CODE = {"gaussian": 1, "signdef": 2, "ball-linear": 3}


def to_dict(q: DiagonalQCQP) -> dict:
    return {
        "n": q.n,
        "m": q.m,
        "objective": {"D": q.D.tolist(), "c": q.c.tolist()},
        "constraints": [
            {"A": q.A[i].tolist(), "a": q.a[i].tolist(), "b": float(q.b[i])}
            for i in range(q.m)
        ],
    }


def to_json(q: DiagonalQCQP) -> str:
    return json.dumps(to_dict(q), indent=2) + "\n"


def load_instance(path: str) -> DiagonalQCQP:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return validate_instance(raw)


def save_instance(q: DiagonalQCQP, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(q))


def digest(q: DiagonalQCQP) -> str:
    """Stable identifier of the instance content."""
    return hashlib.sha256(to_json(q).encode()).hexdigest()[:16]


def random_instance(n: int, m: int, scheme: str, seed: int) -> DiagonalQCQP:
    """Seeded random instance from one of three generation schemes.

    ``gaussian``: standard normal coefficients with the first constraint
    replaced by a ball of squared radius n, which guarantees bounding
    weights exist.  ``signdef``: gaussian, then each coordinate's objective
    and constraint linear coefficients are aligned to one sign.
    ``ball-linear``: a unit ball plus m-1 linear constraints through one
    random interior point, so the feasible region has an interior.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; pick one of {SCHEMES}")
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    rng = np.random.default_rng(
        np.random.SeedSequence((_SCHEME_CODE[scheme], n, m, int(seed) & 0xFFFFFFFF))
    )
    D = rng.standard_normal(n)
    c = rng.standard_normal(n)
    A = rng.standard_normal((m, n))
    a = rng.standard_normal((m, n))
    b = rng.standard_normal(m)

    if scheme in ("gaussian", "signdef"):
        A[0] = 1.0
        a[0] = 0.0
        b[0] = float(n)
        if scheme == "signdef":
            signs = np.where(np.signbit(c), -1.0, 1.0)
            c = signs * np.abs(c)
            a = signs[None, :] * np.abs(a)
            a[0] = 0.0
        return DiagonalQCQP(D=D, c=c, A=A, a=a, b=b)

    # ball-linear: constraint 0 is the unit ball, the rest pass through an
    # interior point of it
    A[:] = 0.0
    A[0] = 1.0
    a[0] = 0.0
    b[0] = 1.0
    direction = rng.standard_normal(n)
    direction /= max(np.linalg.norm(direction), 1e-12)
    radius = 0.9 * rng.uniform() ** (1.0 / n)
    x0 = radius * direction
    for i in range(1, m):
        g = rng.standard_normal(n)
        a[i] = g
        b[i] = float(2.0 * g @ x0)
    return DiagonalQCQP(D=D, c=c, A=A, a=a, b=b)
