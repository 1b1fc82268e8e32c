"""Second-eigenvalue bound for Koiso-Sakane Kähler-Einstein manifolds.

The manifold is described by integer tuples ``n`` (factor dimensions), ``p``
(Chern indices) and ``q`` (Euler class coefficients).  Everything reduces to
the one-dimensional weighted moments

    I_k = integral_{-(n_1+1)}^{n_r+1} x^k prod_i |p_i/q_i - x|^{n_i} dx

which are piecewise polynomial integrals and are computed exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from .poly import MultiPoly, as_fraction

MAX_K = 8

TABLE2_GRID = ((2, 1), (2, 2), (3, 1), (3, 2), (3, 3))


class KSError(ValueError):
    pass


class KSDegenerate(KSError):
    """The projected test function vanishes, so the bound is undefined."""


@dataclass(frozen=True)
class KSData:
    n: tuple
    p: tuple
    q: tuple
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("n", "p", "q"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        object.__setattr__(self, "lam", as_fraction(self.lam))
        if not (len(self.n) == len(self.p) == len(self.q)) or not self.n:
            raise KSError("n, p and q must be non-empty tuples of equal length")
        if any(x < 0 for x in self.n):
            raise KSError("factor dimensions n_i must be non-negative")
        if any(x == 0 for x in self.q):
            raise KSError("every q_i must be nonzero")
        if not self.lower < self.upper:
            raise KSError("empty integration interval")

    @property
    def r(self) -> int:
        return len(self.n)

    @property
    def lower(self) -> int:
        return -(self.n[0] + 1)

    @property
    def upper(self) -> int:
        return self.n[-1] + 1

    @property
    def roots(self) -> list[tuple[Fraction, int]]:
        """(p_i/q_i, n_i) for the factors that actually enter the weight."""
        return [(Fraction(p, q), n) for n, p, q in zip(self.n, self.p, self.q) if n > 0]

    @property
    def breakpoints(self) -> list[Fraction]:
        return sorted({r for r, _ in self.roots if self.lower < r < self.upper})

    def hypothesis_warnings(self) -> list[str]:
        """Geometric-validity inequalities; reported, never enforced."""
        out = []
        for i in range(1, self.r - 1):
            p, q = self.p[i], self.q[i]
            if not -(self.n[0] + 1) * q < p:
                out.append(f"factor {i + 1}: -(n_1+1) q_i < p_i fails ({-(self.n[0] + 1) * q} >= {p})")
            if not (self.n[-1] + 1) * q < p:
                out.append(f"factor {i + 1}: (n_r+1) q_i < p_i fails ({(self.n[-1] + 1) * q} >= {p})")
        return out


@dataclass
class KSIntegrals:
    I0: Fraction
    I2: Fraction
    I3: Fraction
    I4: Fraction
    breakpoints: list

    def to_dict(self) -> dict:
        return {k: _fs(getattr(self, k)) for k in ("I0", "I2", "I3", "I4")} | {
            "breakpoints": [_fs(b) for b in self.breakpoints]}


def _fs(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _x() -> MultiPoly:
    return MultiPoly.variable(1, 0)


def _definite(poly: MultiPoly, lo: Fraction, hi: Fraction) -> Fraction:
    total = Fraction(0)
    for (d,), c in poly.terms.items():
        total += c * (hi ** (d + 1) - lo ** (d + 1)) / (d + 1)
    return total


def ks_integral(data: KSData, k: int) -> Fraction:
    """Exact ``I_k``: split at the roots, fix each factor's sign, integrate."""
    if not 0 <= k <= MAX_K:
        raise KSError(f"k must lie in 0..{MAX_K}")
    x = _x()
    cuts = [Fraction(data.lower)] + data.breakpoints + [Fraction(data.upper)]
    total = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        piece = x ** k
        for root, n in data.roots:
            sign = 1 if root - mid > 0 else -1
            piece = piece * ((root - x) * sign) ** n
        total += _definite(piece, lo, hi)
    return total


def futaki_integral(data: KSData) -> Fraction:
    """Signed integral of ``x prod (x - p_i/q_i)^{n_i}`` over the interval."""
    x = _x()
    integrand = x
    for root, n in data.roots:
        integrand = integrand * (x - root) ** n
    return _definite(integrand, Fraction(data.lower), Fraction(data.upper))


def ks_integrals(data: KSData) -> KSIntegrals:
    return KSIntegrals(*(ks_integral(data, k) for k in (0, 2, 3, 4)), data.breakpoints)


@dataclass
class KSBoundResult:
    bound: float
    exact: Fraction
    lam: Fraction
    integrals: KSIntegrals
    futaki: Fraction
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"bound": self.bound, "exact": _fs(self.exact), "lambda": _fs(self.lam),
                "integrals": self.integrals.to_dict(), "futaki": _fs(self.futaki),
                "warnings": list(self.warnings)}


def ks_bound(data: KSData) -> KSBoundResult:
    """The bound 8L/3 + (2L/3) (I3^2/I2^2 + 4/I0) / (I4/I2^2 - I3^2/I2^2 - 1/I0)."""
    ints = ks_integrals(data)
    notes = data.hypothesis_warnings()
    fut = futaki_integral(data)
    if fut != 0:
        msg = f"Futaki integral is {_fs(fut)} != 0; the bound assumes it vanishes"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    i0, i2, i3, i4 = ints.I0, ints.I2, ints.I3, ints.I4
    num = i3 * i3 / (i2 * i2) + 4 / i0
    den = i4 / (i2 * i2) - i3 * i3 / (i2 * i2) - 1 / i0
    if den <= 0:
        raise KSDegenerate("projection degenerate: I4/I2^2 - I3^2/I2^2 - 1/I0 <= 0")
    value = data.lam * (Fraction(8, 3) + Fraction(2, 3) * num / den)
    return KSBoundResult(float(value), value, data.lam, ints, fut, notes)


def ks_family_wq(N: int, q: int, lam=1) -> KSData:
    """Data for W_{q,-q} over CP^N x CP^N on the interval [-1, 1].

    The two CP^N factors have p = N + 1 and Euler coefficients q, -q; two
    zero-dimensional end factors fix the interval endpoints.
    """
    if N < 1:
        raise KSError("N must be a positive integer")
    if not 0 < q < N + 1:
        raise KSError(f"need 0 < q < N + 1, got q={q} for N={N}")
    return KSData(n=(0, N, N, 0), p=(0, N + 1, N + 1, 0), q=(1, q, -q, 1), lam=lam)


def table2(lam=1) -> list[tuple[int, int, KSBoundResult]]:
    return [(N, q, ks_bound(ks_family_wq(N, q, lam))) for N, q in TABLE2_GRID]


def parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]

