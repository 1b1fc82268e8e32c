"""Rayleigh-Ritz approximation of the torus-invariant spectrum of a toric metric.

For torus-invariant functions the metric in symplectic coordinates pairs
gradients through the inverse Hessian of the symplectic potential, and the
Riemannian volume form is Lebesgue measure on the polytope (times the torus
volume, which cancels).  So for a basis ``f_i``

    A_ij = int_P grad f_i^T H(x)^{-1} grad f_j dx,     B_ij = int_P f_i f_j dx,

and the eigenvalues of ``B^{-1} A`` approximate the Laplacian spectrum.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .moments import integrate_polynomial
from .poly import MultiIndex, MultiPoly, monomials_up_to
from .polytope import Polytope, triangulate
from .quadrature import DEPTH_CAP, integrate_simplices

MAX_DEGREE = 4

# Coefficient of the canonical part sum_k l_k log l_k in a potential.  One
# half gives Einstein constant 1 on polytopes whose facet constants are 1
# (the round CP^1 of curvature 1 has Hessian 1/(1 - x^2) on [-1, 1]).
EINSTEIN_CANONICAL_WEIGHT = 0.5


class SpectrumError(ValueError):
    pass


class InvalidPotential(SpectrumError):
    """The Hessian of the potential is not positive definite somewhere."""


@dataclass
class LogTerm:
    """``coeff * (a . x + b) log(a . x + b)``."""

    a: tuple
    b: float
    coeff: float


@dataclass
class SymplecticPotential:
    """``canonical_weight * sum_k l_k log l_k + poly_correction + log_terms``."""

    poly_correction: Optional[MultiPoly] = None
    log_terms: list = field(default_factory=list)
    canonical_weight: float = EINSTEIN_CANONICAL_WEIGHT
    name: Optional[str] = None

    def _hessian_polys(self):
        if self.poly_correction is None or self.poly_correction.is_zero():
            return None
        return self.poly_correction.to_float().hessian()

    @classmethod
    def from_dict(cls, doc: dict, nvars: int) -> "SymplecticPotential":
        poly = MultiPoly(nvars, exact=False)
        for term in doc.get("poly_correction", []):
            alpha = tuple(int(x) for x in term["alpha"])
            if len(alpha) != nvars:
                raise SpectrumError(f"multi-index {alpha} does not match dimension {nvars}")
            poly = poly + MultiPoly(nvars, {alpha: float(term["coeff"])}, exact=False)
        logs = []
        for term in doc.get("log_terms", []):
            a = tuple(float(x) for x in term["a"])
            if len(a) != nvars:
                raise SpectrumError("log term direction has the wrong length")
            logs.append(LogTerm(a, float(term["b"]), float(term["coeff"])))
        weight = float(doc.get("canonical_weight", EINSTEIN_CANONICAL_WEIGHT))
        return cls(poly, logs, weight, doc.get("name"))

    def to_dict(self) -> dict:
        out = {"canonical_weight": self.canonical_weight,
               "poly_correction": [{"alpha": list(a), "coeff": float(c)}
                                   for a, c in (self.poly_correction or MultiPoly(1))],
               "log_terms": [{"a": list(t.a), "b": t.b, "coeff": t.coeff} for t in self.log_terms]}
        if self.name:
            out["name"] = self.name
        return out


def doran_dp6() -> SymplecticPotential:
    """Approximate Kähler-Einstein potential on the hexagon (D6-invariant fit).

    Corrections in U = x1^2 + x1 x2 + x2^2 and V = x1^2 x2^2 (x1 + x2)^2:
    -0.22412 U - 0.01450 U^2 - 0.00521 U^3 + 0.00734 V.
    """
    x1 = MultiPoly.variable(2, 0)
    x2 = MultiPoly.variable(2, 1)
    u = x1 * x1 + x1 * x2 + x2 * x2
    v = x1 * x1 * x2 * x2 * (x1 + x2) ** 2
    h = (u * Fraction("-0.22412") + u ** 2 * Fraction("-0.01450")
         + u ** 3 * Fraction("-0.00521") + v * Fraction("0.00734"))
    return SymplecticPotential(h.to_float(), [], EINSTEIN_CANONICAL_WEIGHT, "doran-dp6")


POTENTIAL_PRESETS = {"doran-dp6": doran_dp6}


def potential_preset(name: str) -> SymplecticPotential:
    try:
        return POTENTIAL_PRESETS[name]()
    except KeyError:
        raise SpectrumError(f"unknown potential preset {name!r}") from None


def parse_potential(text: str, nvars: int) -> SymplecticPotential:
    try:
        return SymplecticPotential.from_dict(json.loads(text), nvars)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SpectrumError(f"malformed potential document: {exc}") from exc


# ----------------------------------------------------------------------------
# Hessians
# ----------------------------------------------------------------------------

def _facet_values(p: Polytope, x: np.ndarray) -> np.ndarray:
    return x @ p.normals_array.T + p.consts_array


def canonical_hessian(p: Polytope, x: Sequence[float]) -> np.ndarray:
    """Hessian of sum_k l_k log l_k, i.e. sum_k v_k v_k^T / l_k(x)."""
    return _canonical_hessians(p, np.atleast_2d(np.asarray(x, dtype=float)))[0]


def _canonical_hessians(p: Polytope, x: np.ndarray) -> np.ndarray:
    vals = _facet_values(p, x)
    if np.any(vals <= 0):
        bad = x[np.any(vals <= 0, axis=1)][0]
        raise SpectrumError(f"point {bad.tolist()} is not in the interior of the polytope")
    v = p.normals_array
    return np.einsum("mk,ka,kb->mab", 1.0 / vals, v, v)


def potential_hessians(s: SymplecticPotential, p: Polytope, x: np.ndarray,
                       check: bool = True) -> np.ndarray:
    """Hessians (m, n, n) of the potential at the rows of ``x``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    h = s.canonical_weight * _canonical_hessians(p, x)
    hp = s._hessian_polys()
    if hp is not None:
        n = p.dim
        for i in range(n):
            for j in range(n):
                h[:, i, j] += hp[i][j].evaluate(x)
    for term in s.log_terms:
        a = np.asarray(term.a)
        arg = x @ a + term.b
        if np.any(arg <= 0):
            raise InvalidPotential("log term argument is not positive on the evaluation points")
        h += term.coeff * np.einsum("m,a,b->mab", 1.0 / arg, a, a)
    if check:
        try:
            np.linalg.cholesky(h)
        except np.linalg.LinAlgError:
            bad = next(i for i in range(len(h)) if np.linalg.eigvalsh(h[i])[0] <= 0)
            raise InvalidPotential(
                f"invalid potential at x={x[bad].tolist()}: Hessian is not positive definite"
            ) from None
    return h


def potential_hessian(s: SymplecticPotential, p: Polytope, x: Sequence[float]) -> np.ndarray:
    return potential_hessians(s, p, np.atleast_2d(np.asarray(x, dtype=float)))[0]


# ----------------------------------------------------------------------------
# assembly and eigenproblem
# ----------------------------------------------------------------------------

def generalized_eigenvalues(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``B^{-1} A`` via Cholesky reduction, ascending.

    With B = L L^T the problem becomes the symmetric ``L^{-1} A L^{-T}``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        chol = np.linalg.cholesky(b)
    except np.linalg.LinAlgError:
        raise SpectrumError("B is not positive definite: basis is linearly dependent in L2") from None
    tmp = solve_triangular(chol, a, lower=True)
    c = solve_triangular(chol, tmp.T, lower=True).T
    c = 0.5 * (c + c.T)
    return np.linalg.eigvalsh(c)


def _gradient_table(basis: Sequence[MultiPoly]):
    return [[g.to_float() for g in f.gradient()] for f in basis]


def assemble_matrices(p: Polytope, s: SymplecticPotential, basis: Sequence[MultiPoly],
                      tol: float = 1e-6, depth_cap: int = DEPTH_CAP, extra_levels: int = 0,
                      threads: int = 1):
    """Stiffness ``A`` by adaptive quadrature, mass ``B`` exactly.

    Returns ``(A, B, report)``.  Both matrices are checked: ``A`` symmetric
    positive semidefinite, ``B`` symmetric positive definite.
    """
    if not basis:
        raise SpectrumError("basis must not be empty")
    nb = len(basis)
    n = p.dim
    b = np.array([[float(integrate_polynomial(p, fi * fj)) for fj in basis] for fi in basis])
    grads = _gradient_table(basis)
    iu = np.triu_indices(nb)

    def integrand(x):
        hinv = np.linalg.inv(potential_hessians(s, p, x))
        g = np.stack([np.stack([grads[i][k].evaluate(x) for k in range(n)], axis=1)
                      for i in range(nb)], axis=1)  # (m, nb, n)
        full = np.einsum("mia,mab,mjb->mij", g, hinv, g)
        return full[:, iu[0], iu[1]]

    simplices = [np.array(t.vertices, dtype=float) for t in triangulate(p)]
    total_vol = sum(_simplex_volume(t) for t in simplices)
    threads = max(1, int(threads))
    chunks = [simplices[i::threads] for i in range(threads)] if threads > 1 else [simplices]
    chunks = [c for c in chunks if c]

    def run(chunk):
        frac = sum(_simplex_volume(t) for t in chunk) / total_vol
        return integrate_simplices(integrand, chunk, tol * frac, depth_cap, extra_levels)

    if len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(chunks[0])]
    upper = sum((v for v, _ in parts), np.zeros(len(iu[0])))
    report = parts[0][1]
    for _, r in parts[1:]:
        report.simplices += r.simplices
        report.evaluations += r.evaluations
        report.max_depth = max(report.max_depth, r.max_depth)
        report.cap_hits += r.cap_hits
        report.estimated_error += r.estimated_error
        report.tolerance += r.tolerance
    a = np.zeros((nb, nb))
    a[iu] = upper
    a = a + np.triu(a, 1).T
    _check_matrices(a, b, tol)
    return a, b, report


def _simplex_volume(verts: np.ndarray) -> float:
    import math

    edges = verts[1:] - verts[0]
    return abs(np.linalg.det(edges)) / math.factorial(verts.shape[1])


def _check_matrices(a: np.ndarray, b: np.ndarray, tol: float) -> None:
    if not np.allclose(a, a.T) or not np.allclose(b, b.T):
        raise SpectrumError("assembled matrices are not symmetric")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.linalg.eigvalsh(a)[0] < -max(10 * tol, 1e-9) * scale:
        raise SpectrumError("stiffness matrix A is not positive semidefinite")
    try:
        np.linalg.cholesky(b)
    except np.linalg.LinAlgError:
        raise SpectrumError("mass matrix B is not positive definite") from None


@dataclass
class SpectrumResult:
    eigenvalues: list
    basis: list
    quadrature_report: dict

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues, "basis": [list(a) for a in self.basis],
                "quadrature_report": self.quadrature_report}


def monomial_basis(n: int, degree: int) -> tuple[list[MultiIndex], list[MultiPoly]]:
    alphas = monomials_up_to(n, degree)
    alphas.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return alphas, [MultiPoly.monomial(a) for a in alphas]


def rayleigh_ritz_spectrum(p: Polytope, s: SymplecticPotential, degree: int = 2,
                           tol: float = 1e-6, check_convergence: bool = False,
                           threads: int = 1) -> SpectrumResult:
    """Generalised eigenvalues for all monomials of total degree <= ``degree``.

    With ``check_convergence`` the stiffness matrix is recomputed with every
    accepted simplex bisected one more time and the largest eigenvalue change
    is reported.
    """
    if not 1 <= degree <= MAX_DEGREE:
        raise SpectrumError(f"degree must lie in 1..{MAX_DEGREE}")
    alphas, basis = monomial_basis(p.dim, degree)
    a, b, report = assemble_matrices(p, s, basis, tol, threads=threads)
    evals = generalized_eigenvalues(a, b)
    info = report.to_dict()
    info["tolerance"] = tol
    if check_convergence:
        a2, _, rep2 = assemble_matrices(p, s, basis, tol, extra_levels=1, threads=threads)
        evals2 = generalized_eigenvalues(a2, b)
        info["refined_simplices"] = rep2.simplices
        info["max_eigenvalue_change"] = float(np.max(np.abs(evals2 - evals)))
    return SpectrumResult(evals.tolist(), alphas, info)
