"""Exact integration of polynomials over polytopes.

Each simplex of a triangulation is pulled back to the standard simplex by
its affine parametrisation ``x = v0 + J t``; the pulled-back polynomial is
integrated term by term with the Dirichlet formula

    integral over the standard n-simplex of t^beta = prod(beta_i!) / (|beta| + n)!

and scaled by ``|det J|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .poly import MultiIndex, MultiPoly, monomials_up_to
from .polytope import Polytope, Simplex, triangulate


def standard_simplex_monomial(beta: Sequence[int]) -> Fraction:
    """Integral of t^beta over {t >= 0, sum t <= 1}."""
    n = len(beta)
    num = 1
    for b in beta:
        num *= math.factorial(b)
    return Fraction(num, math.factorial(sum(beta) + n))


def integrate_standard_simplex(f: MultiPoly) -> Fraction:
    return sum((c * standard_simplex_monomial(beta) for beta, c in f.terms.items()), Fraction(0))


def _pullback_images(s: Simplex) -> list[MultiPoly]:
    n = s.dim
    v0 = s.vertices[0]
    jac = s.edge_matrix
    return [MultiPoly.linear(jac[i], v0[i]) for i in range(n)]


def simplex_integral(s: Simplex, f: MultiPoly) -> Fraction:
    """Exact integral of the polynomial ``f`` over the simplex ``s``."""
    pulled = f.substitute(_pullback_images(s))
    return abs(s.signed_det) * integrate_standard_simplex(pulled)


def simplex_monomial_integral(s: Simplex, alpha: MultiIndex) -> Fraction:
    return simplex_integral(s, MultiPoly.monomial(alpha))


@lru_cache(maxsize=None)
def _simplex_moments(s: Simplex, degree: int) -> dict:
    """All monomial integrals of total degree <= ``degree`` over ``s``.

    Powers of each pulled-back coordinate are shared across monomials.
    """
    n = s.dim
    images = _pullback_images(s)
    powers = [[MultiPoly.constant(n, 1)] for _ in range(n)]
    for i in range(n):
        for _ in range(degree):
            powers[i].append(powers[i][-1] * images[i])
    scale = abs(s.signed_det)
    out = {}
    for alpha in monomials_up_to(n, degree):
        term = MultiPoly.constant(n, 1)
        for i, a in enumerate(alpha):
            if a:
                term = term * powers[i][a]
        out[alpha] = scale * integrate_standard_simplex(term)
    return out


@lru_cache(maxsize=None)
def moment_table(p: Polytope, degree: int) -> dict:
    """Map every multi-index of total degree <= ``degree`` to its exact moment over ``p``."""
    table = {alpha: Fraction(0) for alpha in monomials_up_to(p.dim, degree)}
    for s in triangulate(p):
        for alpha, val in _simplex_moments(s, degree).items():
            table[alpha] += val
    return table


def monomial_moment(p: Polytope, alpha: Sequence[int]) -> Fraction:
    """Exact value of the integral of x^alpha over ``p``."""
    alpha = tuple(alpha)
    if len(alpha) != p.dim:
        raise ValueError(f"multi-index {alpha} does not match dimension {p.dim}")
    return moment_table(p, max(sum(alpha), 1))[alpha]


def integrate_polynomial(p: Polytope, f: MultiPoly) -> Fraction:
    if f.nvars != p.dim:
        raise ValueError("polynomial and polytope dimensions differ")
    if f.is_zero():
        return Fraction(0)
    table = moment_table(p, max(f.degree, 1))
    return sum((c * table[alpha] for alpha, c in f.terms.items()), Fraction(0))


@dataclass
class MomentTensor:
    """Moments up to degree four, stored as dense nested lists of Fractions.

    ``gram[i][j]`` is the integral of x_i x_j, ``t3[i][j][k]`` of x_i x_j x_k,
    and so on.  Entries may also be floats when the tensor comes from an
    external source.
    """

    dim: int
    vol: object
    m1: list
    gram: list
    t3: list
    t4: list
    source: str = "polytope"

    def __post_init__(self):
        if not self.vol > 0:
            raise ValueError("volume must be positive")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, (Fraction, int)) for x in self._flat())

    def _flat(self):
        yield self.vol
        yield from self.m1
        for part in (self.gram, self.t3, self.t4):
            if part is not None:
                yield from np.asarray(part, dtype=object).ravel()

    def arrays(self):
        """(vol, m1, gram, t3, t4) as float numpy arrays."""
        f = lambda a: np.asarray(a, dtype=object).astype(float)  # noqa: E731
        return float(self.vol), f(self.m1), f(self.gram), f(self.t3), f(self.t4)

    def moment(self, alpha: Sequence[int]):
        """Look up the moment for a multi-index of total degree <= 4."""
        idx = [i for i, a in enumerate(alpha) for _ in range(a)]
        table = {0: lambda: self.vol, 1: lambda: self.m1[idx[0]],
                 2: lambda: self.gram[idx[0]][idx[1]],
                 3: lambda: self.t3[idx[0]][idx[1]][idx[2]],
                 4: lambda: self.t4[idx[0]][idx[1]][idx[2]][idx[3]]}
        if len(idx) not in table:
            raise ValueError("moment tensors stop at degree 4")
        return table[len(idx)]()

    def to_dict(self) -> dict:
        return {"dimension": self.dim, "vol": _q(self.vol), "m1": _nested(self.m1),
                "gram": _nested(self.gram), "t3": _nested(self.t3), "t4": _nested(self.t4),
                "source": self.source}

    @classmethod
    def from_dict(cls, doc: dict) -> "MomentTensor":
        conv = _parse_nested
        return cls(dim=int(doc["dimension"]), vol=conv(doc["vol"]), m1=conv(doc["m1"]),
                   gram=conv(doc.get("gram")), t3=conv(doc.get("t3")), t4=conv(doc.get("t4")),
                   source=doc.get("source", "raw"))


def _q(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return float(x)


def _nested(a):
    if a is None:
        return None
    if isinstance(a, (list, tuple)):
        return [_nested(x) for x in a]
    return _q(a)


def _parse_nested(a):
    if a is None:
        return None
    if isinstance(a, list):
        return [_parse_nested(x) for x in a]
    if isinstance(a, str):
        return Fraction(a)
    if isinstance(a, int):
        return Fraction(a)
    return float(a)


def moment_tensors(p: Polytope, max_degree: int = 4) -> MomentTensor:
    """All exact moments of ``p`` up to total degree four."""
    n = p.dim
    table = moment_table(p, max_degree)

    def get(*idx):
        alpha = [0] * n
        for i in idx:
            alpha[i] += 1
        return table.get(tuple(alpha))

    rng = range(n)
    m1 = [get(i) for i in rng]
    gram = [[get(i, j) for j in rng] for i in rng] if max_degree >= 2 else None
    t3 = [[[get(i, j, k) for k in rng] for j in rng] for i in rng] if max_degree >= 3 else None
    t4 = ([[[[get(i, j, k, l) for l in rng] for k in rng] for j in rng] for i in rng]
          if max_degree >= 4 else None)
    return MomentTensor(dim=n, vol=get(), m1=m1, gram=gram, t3=t3, t4=t4,
                        source=f"polytope:{p.name}" if p.name else "polytope")


def monte_carlo_moment(p: Polytope, alpha: Sequence[int], samples: int = 10**6,
                       seed: int = 0) -> tuple[float, float]:
    """Rejection-sampling estimate of a moment and its standard error.

    Independent of the triangulation: samples uniformly in the bounding box
    of the vertices and keeps points satisfying every inequality.
    """
    from .polytope import vertices

    rng = np.random.default_rng(seed)
    verts = np.array(vertices(p), dtype=float)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    box = float(np.prod(hi - lo))
    pts = rng.uniform(lo, hi, size=(samples, p.dim))
    inside = np.all(pts @ p.normals_array.T + p.consts_array >= 0, axis=1)
    vals = np.where(inside, np.prod(pts ** np.asarray(alpha), axis=1), 0.0) * box
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


