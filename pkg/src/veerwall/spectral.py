"""Adjacency matrices, Perron-Frobenius data and the tetrahedron bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MissingInput, NoConvergence, NotIrreducible
from .flowgraph import scc


@dataclass(frozen=True)
class AdjacencyMatrix:
    vertices: tuple          # flow-graph vertex for each row/column
    entries: np.ndarray      # entries[w, v] = number of edges v -> w
    irreducible: bool

    @property
    def n(self):
        return len(self.vertices)

    def row_sums(self):
        return [int(x) for x in self.entries.sum(axis=1)]

    def to_json(self):
        return {"vertices": list(self.vertices),
                "entries": self.entries.astype(int).tolist(),
                "irreducible": self.irreducible}


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    right: np.ndarray
    left: np.ndarray
    iterations: int
    residual: float

    def to_json(self):
        return {"lambda": self.eigenvalue, "right": self.right.tolist(),
                "left": self.left.tolist(), "iterations": self.iterations,
                "residual": self.residual}


def _irreducible(m):
    """Irreducibility from the matrix alone: (I + A)^(n-1) > 0."""
    n = m.shape[0]
    reach = (m > 0) | np.eye(n, dtype=bool)
    for _ in range(max(1, n.bit_length())):
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
    return bool(reach.all())


def adjacency(fg):
    """Multiplicity matrix of ``fg`` with its irreducibility flag.

    The flag is computed from the matrix and must agree with strong
    connectivity of the graph.
    """
    pos = {v: i for i, v in enumerate(fg.vertices)}
    m = np.zeros((len(pos), len(pos)), dtype=np.int64)
    for s, t, _ in fg.edges:
        m[pos[t], pos[s]] += 1
    irr = _irreducible(m) if len(pos) else False
    if len(pos) and irr != scc(fg).strongly_connected:
        raise AssertionError("irreducibility disagrees with strong connectivity")
    return AdjacencyMatrix(tuple(fg.vertices), m, irr)


def _power(m, tol, cap):
    """Dominant eigenpair of an irreducible nonnegative matrix.

    Iterates with ``m + I`` so that periodic matrices converge too.
    """
    n = m.shape[0]
    shifted = m + np.eye(n)
    x = np.ones(n)
    lam, res = 0.0, math.inf
    for it in range(1, cap + 1):
        y = shifted @ x
        x = y / y.max()
        mx = m @ x
        lam = float(mx.max())
        res = float(np.abs(mx - lam * x).max())
        if res < tol:
            return lam, x, it, res
    raise NoConvergence(res, cap)


def _polish(m, lam, x, steps=3):
    """A few steps of inverse iteration shifted just above ``lam``.

    Power iteration stops at a residual of ``tol``; near the eigenvalue
    inverse iteration gains many digits per step, which brings the
    eigenpair to working precision.  The unpolished pair is returned if
    a step does not lower the residual.
    """
    n = m.shape[0]
    best = (lam, x, float(np.abs(m @ x - lam * x).max()))
    for _ in range(steps):
        shift = best[0] + 1e-7 * max(1.0, best[0])
        try:
            y = np.linalg.solve(m - shift * np.eye(n), best[1])
        except np.linalg.LinAlgError:
            break
        y = np.abs(y)
        y /= y.max()
        mx = m @ y
        lam_y = float(mx[np.argmax(y)])
        res = float(np.abs(mx - lam_y * y).max())
        if not res < best[2]:
            break
        best = (lam_y, y, res)
    return best


def perron(mat, tol=1e-10, cap=100_000):
    """Perron eigenvalue with right and left eigenvectors, max-normalized.

    Power iteration runs until the residual is below ``tol``; the result is
    then polished by shifted inverse iteration.
    """
    if not mat.irreducible:
        raise NotIrreducible("Perron data needs an irreducible matrix")
    m = mat.entries.astype(float)
    lam, right, it1, _ = _power(m, tol, cap)
    lam2, left, it2, _ = _power(m.T, tol, cap)
    lam, right, r1 = _polish(m, lam, right)
    lam2, left, r2 = _polish(m.T, lam2, left)
    return PerronData(lam, right, left, max(it1, it2), max(r1, r2, abs(lam - lam2)))


def bound(P):
    """Upper bound on the number of tetrahedra given a normalized
    dilatation bound ``P``: ``(P^9 - 1)/2 * (2 log P^9 / log(2 P^-9 + 1) - 1)``."""
    P = float(P)
    if not P >= 1:
        raise DomainError(f"P must be at least 1, got {P}")
    q = P ** 9
    if q == 1:
        return 0.0
    return (q - 1) / 2 * (2 * math.log(q) / math.log1p(2 / q) - 1)


def asymptotic_bound(P):
    """Leading-order growth ``(9/2) P^18 log P``."""
    return 4.5 * P ** 18 * math.log(P)


@dataclass(frozen=True)
class WallWidthCheck:
    W: int
    lhs: float
    rhs: float = None
    holds: bool = None
    note: str = ""

    def to_json(self):
        return {"W": self.W, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "note": self.note}


def wall_width_bound_check(vt, lam=None, e=None, e_prime=None, require=False, walls=None):
    """Evaluate ``W <= 2 log(lam^e) / log(2 lam^-e' + 1) - 1``.

    ``W`` is the maximum wall width of ``vt`` (1 without walls).  ``lam``,
    ``e`` and ``e_prime`` come from outside (a dilatation and counts tied
    to a surface layering).  Without them only ``W`` is reported, unless
    ``require`` is set.
    """
    if walls is None:
        from .walls import detect_walls
        walls = detect_walls(vt)
    W = max((w.width for w in walls), default=1)
    if lam is None or e is None or e_prime is None:
        if require:
            raise MissingInput("lambda, e and e' are all needed to check the inequality")
        return WallWidthCheck(W, W, note="inputs not supplied; W reported only")
    if lam <= 1 or e <= 0 or e_prime <= 0:
        raise DomainError("need lambda > 1 and positive e, e'")
    rhs = 2 * e * math.log(lam) / math.log1p(2 * lam ** (-e_prime)) - 1
    note = "vacuous: no walls" if W == 1 else ""
    return WallWidthCheck(W, W, rhs, W <= rhs, note)
