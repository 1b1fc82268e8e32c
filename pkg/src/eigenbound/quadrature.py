"""Adaptive cubature over triangulated domains.

Grundmann-Moeller rules give an embedded family on the n-simplex for any n;
the degree-7 rule (order 3) is paired with the degree-5 rule (order 2) and
their difference serves as the local error estimate.  Simplices whose
estimate exceeds their share of the tolerance are bisected along their
longest edge.  Work proceeds level by level so that every evaluation on a
level is one vectorised call.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

HIGH_ORDER = 3  # exact to degree 7
LOW_ORDER = 2   # exact to degree 5
DEPTH_CAP = 12


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def grundmann_moeller(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes (m, n+1) and weights for the unit n-simplex.

    Exact for polynomials of degree ``2*order + 1``; weights sum to 1/n!.
    """
    d = 2 * order + 1
    acc: dict = {}
    for i in range(order + 1):
        denom = d + n - 2 * i
        w = (-1) ** i * 2.0 ** (-2 * order) * denom ** d / (
            math.factorial(i) * math.factorial(d + n - i))
        for beta in _compositions(order - i, n + 1):
            node = tuple((2 * b + 1) / denom for b in beta)
            key = tuple(round(c, 13) for c in node)
            prev = acc.get(key, (node, 0.0))
            acc[key] = (node, prev[1] + w)
    nodes = np.array([node for node, _ in acc.values()])
    weights = np.array([w for _, w in acc.values()])
    return nodes, weights


@dataclass
class QuadratureReport:
    simplices: int = 0
    evaluations: int = 0
    max_depth: int = 0
    cap_hits: int = 0
    estimated_error: float = 0.0
    tolerance: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        """Cap hits are harmless when the summed error estimate is within budget."""
        return self.cap_hits == 0 or self.estimated_error <= self.tolerance

    def to_dict(self) -> dict:
        return {"simplices": self.simplices, "evaluations": self.evaluations,
                "max_depth": self.max_depth, "cap_hits": self.cap_hits,
                "estimated_error": self.estimated_error, "converged": self.converged,
                **self.extra}


def _volumes(verts: np.ndarray) -> np.ndarray:
    edges = verts[:, 1:, :] - verts[:, :1, :]
    n = verts.shape[2]
    return np.abs(np.linalg.det(edges)) / math.factorial(n)


def _bisect(verts: np.ndarray) -> np.ndarray:
    """Split each simplex (k, n+1, n) at the midpoint of its longest edge."""
    k, m, _ = verts.shape
    best = np.zeros(k)
    pair = np.zeros((k, 2), dtype=int)
    for i in range(m):
        for j in range(i + 1, m):
            length = np.sum((verts[:, i] - verts[:, j]) ** 2, axis=1)
            better = length > best + 1e-15
            best = np.where(better, length, best)
            pair[better] = (i, j)
    rows = np.arange(k)
    mid = 0.5 * (verts[rows, pair[:, 0]] + verts[rows, pair[:, 1]])
    left = verts.copy()
    right = verts.copy()
    left[rows, pair[:, 1]] = mid
    right[rows, pair[:, 0]] = mid
    return np.concatenate([left, right])


def _apply_rule(f, verts, nodes, weights, vols):
    # verts (k, n+1, n); nodes barycentric (q, n+1)
    pts = np.einsum("qv,kvn->kqn", nodes, verts)
    k, q, n = pts.shape
    vals = f(pts.reshape(k * q, n))
    vals = vals.reshape(k, q, -1)
    fact = math.factorial(n) * vols
    return np.einsum("q,kqe->ke", weights, vals) * fact[:, None], k * q


def integrate_simplices(f: Callable[[np.ndarray], np.ndarray], simplices: Sequence[np.ndarray],
                        tol: float = 1e-6, depth_cap: int = DEPTH_CAP,
                        extra_levels: int = 0) -> tuple[np.ndarray, QuadratureReport]:
    """Integrate a vector-valued ``f`` over the union of the given simplices.

    ``f`` maps points (m, n) to values (m, e).  A simplex is accepted when the
    max-norm difference between the two embedded rules is at most
    ``tol * vol(S) / vol(domain)``.  Simplices still failing at ``depth_cap``
    are accepted and counted; a warning is issued only if the summed error
    estimate then exceeds ``tol``.  ``extra_levels`` forces that many further
    uniform bisections of every accepted simplex, for convergence studies.
    """
    verts = np.array([np.asarray(s, dtype=float) for s in simplices])
    n = verts.shape[2]
    hi_nodes, hi_w = grundmann_moeller(n, HIGH_ORDER)
    lo_nodes, lo_w = grundmann_moeller(n, LOW_ORDER)
    total_vol = float(_volumes(verts).sum())
    report = QuadratureReport(tolerance=tol)
    result = None
    depth = 0
    pending = verts
    accepted_depth = []
    while pending.shape[0]:
        vols = _volumes(pending)
        hi, c1 = _apply_rule(f, pending, hi_nodes, hi_w, vols)
        lo, c2 = _apply_rule(f, pending, lo_nodes, lo_w, vols)
        report.evaluations += c1 + c2
        err = np.max(np.abs(hi - lo), axis=1)
        ok = err <= tol * vols / total_vol
        if depth >= depth_cap:
            report.cap_hits += int(np.count_nonzero(~ok))
            ok[:] = True
        if extra_levels and ok.any():
            done = pending[ok]
            for _ in range(extra_levels):
                done = _bisect(done)
            vals, cnt = _apply_rule(f, done, hi_nodes, hi_w, _volumes(done))
            report.evaluations += cnt
            contribution = vals.sum(axis=0)
            report.simplices += done.shape[0]
        else:
            contribution = hi[ok].sum(axis=0)
            report.simplices += int(np.count_nonzero(ok))
        result = contribution if result is None else result + contribution
        report.estimated_error += float(err[ok].sum())
        if ok.any():
            accepted_depth.append(depth)
        pending = _bisect(pending[~ok]) if (~ok).any() else pending[:0]
        depth += 1
    report.max_depth = max(accepted_depth, default=0) + extra_levels
    if not report.converged:
        warnings.warn(f"quadrature hit the subdivision cap on {report.cap_hits} simplices; "
                      f"estimated error {report.estimated_error:.3g} exceeds {tol:.3g}",
                      RuntimeWarning, stacklevel=2)
    return result, report
