"""Upper bound for the second eigenvalue of a toric Kähler-Einstein metric.

Test functions are quadratics ``phi^2`` in an affine-linear first
eigenfunction ``phi = a . x~`` where ``x~`` are whitened polytope coordinates
(mean zero, L2-orthonormal).  After projecting ``phi^2`` away from the
constants and the first eigenspace, integration by parts turns the Rayleigh
quotient into a ratio of quartic forms in ``a``:

    bound(a) = 8L/3 + (2L/3) (sum_i c_i^2 + 4 |a|^4 / vol) / |Phi|^2

with ``c_i = <x~_i, phi^2>`` and ``|Phi|^2 = int phi^4 - sum c_i^2 - |a|^4/vol``.
The bound is the infimum over directions ``a``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import exact
from .moments import MomentTensor, moment_tensors
from .poly import as_fraction
from .polytope import Polytope, barycenter

log = logging.getLogger(__name__)

# |Phi|^2 below this fraction of |a|^4 marks a degenerate direction.
DEGENERATE_TOL = 1e-12
# Relative barycenter tolerance for floating-point moment input.
RAW_BARYCENTER_TOL = 1e-12
VALUE_TOL = 1e-10
EXACT_MATCH_TOL = 1e-9


class BoundError(ValueError):
    pass


class FutakiObstruction(BoundError):
    """The barycenter is not at the origin, so the coordinates are not centred."""


class DegenerateDirection(BoundError):
    """The projected quadratic vanishes: phi^2 lies in span{1, x_1, ..., x_n}."""


@dataclass
class QuarticForms:
    t3w: np.ndarray
    t4w: np.ndarray
    vol: float

    @property
    def dim(self) -> int:
        return self.t3w.shape[0]

    def rotated(self, q: np.ndarray) -> "QuarticForms":
        """Forms in the rotated orthonormal basis ``x' = q x~``."""
        q = np.asarray(q, dtype=float)
        t3 = np.einsum("ia,jb,kc,abc->ijk", q, q, q, self.t3w)
        t4 = np.einsum("ia,jb,kc,ld,abcd->ijkl", q, q, q, q, self.t4w)
        return QuarticForms(t3, t4, self.vol)


@dataclass
class WhitenedBasis:
    """``x~ = transform @ x`` has zero mean and identity Gram matrix."""

    transform: np.ndarray
    moments: MomentTensor
    forms: QuarticForms


def whiten(m: MomentTensor, exact_barycenter: Optional[bool] = None) -> WhitenedBasis:
    """Symmetric whitening ``L = gram^(-1/2)`` of a centred moment tensor.

    Exact (rational) input must have first moments exactly zero.  Float input
    is accepted when ``|m1| <= 1e-12 vol^((n+1)/n)``.
    """
    if exact_barycenter is None:
        exact_barycenter = m.is_exact
    if m.gram is None or m.t3 is None or m.t4 is None:
        raise BoundError("the bound needs moments through degree four")
    vol, m1, gram, t3, t4 = m.arrays()
    n = m.dim
    if exact_barycenter:
        if any(Fraction(x) != 0 for x in m.m1):
            raise FutakiObstruction(
                "barycenter is not at the origin (Futaki obstruction); re-center the polytope")
    elif np.max(np.abs(m1)) > RAW_BARYCENTER_TOL * vol ** ((n + 1) / n):
        raise FutakiObstruction(
            f"first moments {m1.tolist()} are not zero; re-center the region")
    evals, evecs = np.linalg.eigh(gram)
    if evals.min() <= 1e-14 * max(evals.max(), 1e-300):
        raise BoundError("Gram matrix is singular: region is degenerate")
    transform = evecs @ np.diag(evals ** -0.5) @ evecs.T
    L = transform
    t3w = np.einsum("ia,jb,kc,abc->ijk", L, L, L, t3)
    t4w = np.einsum("ia,jb,kc,ld,abcd->ijkl", L, L, L, L, t4)
    return WhitenedBasis(transform, m, QuarticForms(t3w, t4w, vol))


def _pieces(f: QuarticForms, a: np.ndarray):
    a = np.asarray(a, dtype=float)
    c = np.einsum("ijk,j,k->i", f.t3w, a, a)
    phi4 = float(np.einsum("ijkl,i,j,k,l->", f.t4w, a, a, a, a))
    a2 = float(a @ a)
    csq = float(c @ c)
    proj = phi4 - csq - a2 * a2 / f.vol
    return c, csq, phi4, a2, proj


def _check_direction(a2: float, proj: float) -> None:
    if a2 == 0:
        raise BoundError("direction must be nonzero")
    if proj <= DEGENERATE_TOL * a2 * a2:
        raise DegenerateDirection(
            "projected quadratic vanishes: phi^2 lies in the span of the first eigenspace and constants")


def correction_ratio(f: QuarticForms, a: Sequence[float]) -> float:
    """(sum c_i^2 + 4|a|^4/vol) / |Phi|^2."""
    _, csq, _, a2, proj = _pieces(f, a)
    _check_direction(a2, proj)
    return (csq + 4 * a2 * a2 / f.vol) / proj


def bound_at(f: QuarticForms, lam: float, a: Sequence[float]) -> float:
    """The closed-form bound for the single direction ``a``."""
    return lam * (8 / 3 + 2 / 3 * correction_ratio(f, a))


def bound_at_gradient_form(f: QuarticForms, lam: float, a: Sequence[float]) -> float:
    """Rayleigh quotient |grad Phi|^2 / |Phi|^2, evaluated by integration by parts.

    |grad phi^2|^2 = (8L/3) int phi^4 and |grad Phi|^2 = |grad phi^2|^2 - 2L sum c_i^2.
    Algebraically identical to :func:`bound_at`.
    """
    _, csq, phi4, a2, proj = _pieces(f, a)
    _check_direction(a2, proj)
    grad_sq = 8 * lam / 3 * phi4 - 2 * lam * csq
    return grad_sq / proj


def _ratio_and_grad(f: QuarticForms, a: np.ndarray):
    c, csq, phi4, a2, proj = _pieces(f, a)
    num = csq + 4 * a2 * a2 / f.vol
    g_csq = 4 * np.einsum("i,imk,k->m", c, f.t3w, a)
    g_phi4 = 4 * np.einsum("mjkl,j,k,l->m", f.t4w, a, a, a)
    g_num = g_csq + 16 * a2 * a / f.vol
    g_den = g_phi4 - g_csq - 4 * a2 * a / f.vol
    return num / proj, (g_num * proj - num * g_den) / proj ** 2, proj


def sphere_starts(n: int) -> np.ndarray:
    """2n^2 + 8 deterministic unit vectors (up to sign) covering the sphere."""
    total = 2 * n * n + 8
    starts = [np.eye(n)[i] for i in range(n)]
    for signs in range(2 ** (n - 1)):
        d = np.ones(n)
        for i in range(1, n):
            if signs >> (i - 1) & 1:
                d[i] = -1
        starts.append(d / math.sqrt(n))
    remaining = max(total - len(starts), 0)
    if n == 2:
        for k in range(remaining):
            t = math.pi * (k + 0.5) / remaining
            starts.append(np.array([math.cos(t), math.sin(t)]))
    elif n == 3:
        golden = math.pi * (3 - math.sqrt(5))
        for k in range(remaining):
            z = 1 - (k + 0.5) / remaining
            r = math.sqrt(1 - z * z)
            starts.append(np.array([r * math.cos(golden * k), r * math.sin(golden * k), z]))
    else:
        rng = np.random.default_rng(12345)
        for _ in range(remaining):
            v = rng.standard_normal(n)
            starts.append(v / np.linalg.norm(v))
    return np.array(starts[:max(total, len(starts))])


def _canonical_sign(a: np.ndarray) -> np.ndarray:
    a = a / np.linalg.norm(a)
    nz = np.flatnonzero(np.abs(a) > 1e-12)
    if nz.size and a[nz[0]] < 0:
        a = -a
    return a


@dataclass
class BoundResult:
    bound: float
    argmin_a: list
    lam: float
    ratio: float
    numerator: float
    denominator: float
    exact: Optional[Fraction] = None
    raw_direction: Optional[list] = None
    transform: Optional[list] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"bound": self.bound, "lambda": self.lam, "argmin_a": self.argmin_a,
               "ratio": self.ratio, "numerator": self.numerator,
               "denominator": self.denominator,
               "exact": None if self.exact is None else _frac_str(self.exact),
               "raw_direction": self.raw_direction, "whitening": self.transform,
               "diagnostics": self.diagnostics}
        return out


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def minimize_forms(f: QuarticForms, lam: float = 1.0,
                   starts: Optional[np.ndarray] = None) -> BoundResult:
    """Minimise the bound over unit directions by multi-start BFGS.

    The objective is ``ratio(a) + (|a|^2 - 1)^2``: the ratio is invariant
    under scaling, and the penalty pins the radial direction without moving
    the minimiser.
    """
    n = f.dim
    if starts is None:
        starts = sphere_starts(n)
    skipped = 0
    candidates = []
    nfev = 0

    def objective(a):
        r, g, _ = _ratio_and_grad(f, a)
        s = a @ a - 1
        return r + s * s, g + 4 * s * a

    for a0 in starts:
        try:
            _, _, proj = _ratio_and_grad(f, a0)
            _check_direction(float(a0 @ a0), proj)
        except DegenerateDirection:
            skipped += 1
            continue
        if n == 1:
            a = np.array([1.0])
        else:
            res = minimize(objective, a0, jac=True, method="BFGS",
                           options={"gtol": 1e-12, "maxiter": 500})
            nfev += res.nfev
            a = res.x
        a = _canonical_sign(a)
        try:
            value = correction_ratio(f, a)
        except DegenerateDirection:
            skipped += 1
            continue
        candidates.append((value, tuple(np.round(a, 10)), a))
    if not candidates:
        raise DegenerateDirection("every start direction is degenerate")
    best_value = min(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] <= best_value + VALUE_TOL * max(1.0, abs(best_value))]
    ties.sort(key=lambda c: c[1])
    value, _, a = ties[0]
    value = min(value, best_value)
    _, csq, _, a2, proj = _pieces(f, a)
    return BoundResult(
        bound=lam * (8 / 3 + 2 / 3 * value), argmin_a=a.tolist(), lam=lam, ratio=value,
        numerator=csq + 4 * a2 * a2 / f.vol, denominator=proj,
        diagnostics={"starts": len(starts), "skipped_degenerate": skipped,
                     "function_evaluations": nfev,
                     "distinct_local_minima": len({round(c[0], 8) for c in candidates})})


# ----------------------------------------------------------------------------
# exact evaluation in the original coordinates
# ----------------------------------------------------------------------------

def exact_ratio_raw(m: MomentTensor, b: Sequence) -> Fraction:
    """The correction ratio for ``phi = b . x`` computed in exact arithmetic.

    Works directly with the raw moments: the projection onto the linear
    functions uses the inverse Gram matrix, so no square roots appear.
    """
    b = [Fraction(x) for x in b]
    n = m.dim
    rng = range(n)
    s = [sum(m.t3[i][j][k] * b[j] * b[k] for j in rng for k in rng) for i in rng]
    phi4 = sum(m.t4[i][j][k][l] * b[i] * b[j] * b[k] * b[l]
               for i in rng for j in rng for k in rng for l in rng)
    g = sum(m.gram[i][j] * b[i] * b[j] for i in rng for j in rng)
    ginv = exact.inverse(m.gram)
    proj_lin = sum(s[i] * ginv[i][j] * s[j] for i in rng for j in rng)
    vol = Fraction(m.vol)
    proj = phi4 - proj_lin - g * g / vol
    if proj <= 0:
        raise DegenerateDirection("projected quadratic vanishes for this direction")
    return (proj_lin + 4 * g * g / vol) / proj


def _rationalize(v: np.ndarray, max_den: int) -> list[Fraction]:
    v = v / np.max(np.abs(v))
    return [Fraction(float(x)).limit_denominator(max_den) for x in v]


def _attach_exact(result: BoundResult, wb: WhitenedBasis, lam: float) -> None:
    m = wb.moments
    raw = wb.transform.T @ np.asarray(result.argmin_a)
    result.raw_direction = (raw / np.max(np.abs(raw))).tolist()
    if not m.is_exact:
        return
    # Small denominators only: the ratio is flat at its minimum, so a fine
    # rational approximation of an irrational argmin would match spuriously.
    candidates = [[Fraction(int(i == j)) for j in range(m.dim)] for i in range(m.dim)]
    candidates.append(_rationalize(raw, 12))
    for b in candidates:
        try:
            r = exact_ratio_raw(m, b)
        except DegenerateDirection:
            continue
        if abs(float(r) - result.ratio) <= EXACT_MATCH_TOL:
            result.exact = as_fraction(lam) * (Fraction(8, 3) + Fraction(2, 3) * r)
            result.diagnostics["exact_direction"] = [_frac_str(x) for x in b]
            return


def minimize_bound(m: MomentTensor, lam: float = 1.0) -> BoundResult:
    """Infimum of the bound over all directions, from polytope moments."""
    wb = whiten(m)
    result = minimize_forms(wb.forms, lam)
    result.transform = wb.transform.tolist()
    result.diagnostics["moment_source"] = m.source
    _attach_exact(result, wb, lam)
    return result


def bound_from_raw_moments(m: MomentTensor, lam: float = 1.0) -> BoundResult:
    """Same pipeline for moments supplied directly (any compact region)."""
    wb = whiten(m, exact_barycenter=False)
    result = minimize_forms(wb.forms, lam)
    result.transform = wb.transform.tolist()
    result.diagnostics["moment_source"] = m.source
    _attach_exact(result, wb, lam)
    return result


def toric_bound(p: Polytope, lam: float = 1.0, recenter: bool = False) -> BoundResult:
    """Bound for the toric Kähler-Einstein manifold with moment polytope ``p``."""
    if recenter:
        bc = barycenter(p)
        if any(bc):
            log.warning("translating polytope by %s to its barycenter; the facet "
                        "constants (Fano normalisation) change", [str(-c) for c in bc])
            p = p.translated([-c for c in bc])
    return minimize_bound(moment_tensors(p), lam)
