"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` maps exponent tuples to :class:`fractions.Fraction`
coefficients.  Zero coefficients are never stored, so two polynomials are
equal exactly when their term dictionaries are equal.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

MultiIndex = Tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, ``"p/q"`` strings and decimal strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # floats go through their shortest repr so 0.1 -> 1/10
        return Fraction(repr(value))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def monomials_up_to(nvars: int, degree: int) -> list[MultiIndex]:
    """All exponent tuples of total degree <= ``degree``, graded then lex-descending."""
    out: list[MultiIndex] = []
    for d in range(degree + 1):
        out.extend(_exponents_of_degree(nvars, d))
    return out


def _exponents_of_degree(nvars: int, d: int) -> list[MultiIndex]:
    if nvars == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in _exponents_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return out


class MultiPoly:
    """Polynomial in ``nvars`` variables, coefficients kept as Fractions.

    Arithmetic is exact.  Coefficients may also be floats when the polynomial
    is built through :meth:`from_terms` with ``exact=False``; that mode is
    used for user-supplied potential corrections, which are real numbers.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[MultiIndex, object] | None = None,
                 exact: bool = True):
        self.nvars = int(nvars)
        clean: Dict[MultiIndex, object] = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.nvars or any(a < 0 for a in alpha):
                raise ValueError(f"bad multi-index {alpha} for {self.nvars} variables")
            c = as_fraction(coeff) if exact else coeff
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
                if clean[alpha] == 0:
                    del clean[alpha]
        self.terms = clean

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, value=1) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        alpha = [0] * nvars
        alpha[i] = 1
        return cls(nvars, {tuple(alpha): 1})

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff=1) -> "MultiPoly":
        return cls(len(alpha), {tuple(alpha): coeff})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "MultiPoly":
        """The affine form ``sum(coeffs[i] * x_i) + const``."""
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            alpha = [0] * n
            alpha[i] = 1
            terms[tuple(alpha)] = c
        return cls(n, terms)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different numbers of variables")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            out[alpha] = out.get(alpha, 0) + c
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if other == 0:
                return MultiPoly(self.nvars)
            return MultiPoly._raw(self.nvars, {a: c * other for a, c in self.terms.items()})
        other = self._coerce(other)
        out: Dict[MultiIndex, object] = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                alpha = tuple(i + j for i, j in zip(a1, a2))
                out[alpha] = out.get(alpha, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[MultiIndex, object]) -> "MultiPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = {a: c for a, c in terms.items() if c != 0}
        return p

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __iter__(self) -> Iterator[Tuple[MultiIndex, object]]:
        return iter(sorted(self.terms.items(), reverse=True))

    def __repr__(self) -> str:
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for alpha, c in self:
            mono = "*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}"
                            for i, a in enumerate(alpha) if a)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "MultiPoly(" + " + ".join(parts) + ")"

    # calculus and evaluation ----------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for alpha, c in self.terms.items():
            if alpha[i]:
                beta = list(alpha)
                beta[i] -= 1
                out[tuple(beta)] = c * alpha[i]
        return MultiPoly._raw(self.nvars, out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.diff(i) for i in range(self.nvars)]

    def hessian(self) -> list[list["MultiPoly"]]:
        grad = self.gradient()
        return [[g.diff(j) for j in range(self.nvars)] for g in grad]

    def __call__(self, point: Sequence):
        total = 0
        for alpha, c in self.terms.items():
            term = c
            for xi, a in zip(point, alpha):
                if a:
                    term = term * xi ** a
            total = total + term
        return total

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation at the rows of ``points`` (shape (m, n))."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(points.shape[0])
        for alpha, c in self.terms.items():
            out += float(c) * np.prod(points ** np.asarray(alpha), axis=1)
        return out

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose with the map ``x_i -> images[i]`` (all in the same variables)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        m = images[0].nvars
        result = MultiPoly(m)
        cache: Dict[Tuple[int, int], MultiPoly] = {}
        for alpha, c in self.terms.items():
            term = MultiPoly.constant(m, c)
            for i, a in enumerate(alpha):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            result = result + term
        return result

    def to_float(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {a: float(c) for a, c in self.terms.items()}, exact=False)


def from_terms(nvars: int, items: Iterable[Tuple[Sequence[int], object]],
               exact: bool = True) -> MultiPoly:
    poly = MultiPoly(nvars, exact=exact)
    for alpha, c in items:
        poly = poly + MultiPoly(nvars, {tuple(alpha): c}, exact=exact)
    return poly
