"""Independent reference computations used by the tests."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from eigenbound.koiso_sakane import KSData
from eigenbound.polytope import Polytope, vertices


def mc_moments(p: Polytope, alphas, samples=10**6, seed=1):
    """Rejection-sampling estimates (mean, stderr) for several monomials at once."""
    rng = np.random.default_rng(seed)
    verts = np.array(vertices(p), dtype=float)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    box = float(np.prod(hi - lo))
    pts = rng.uniform(lo, hi, size=(samples, p.dim))
    inside = np.all(pts @ p.normals_array.T + p.consts_array >= 0, axis=1)
    out = {}
    for alpha in alphas:
        vals = np.where(inside, np.prod(pts ** np.asarray(alpha), axis=1), 0.0) * box
        out[tuple(alpha)] = (float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)))
    return out


def simpson_ks(data: KSData, k: int, rel_tol=1e-12) -> float:
    """Composite Simpson for I_k, refined by doubling on each smooth piece."""
    roots = [(float(r), n) for r, n in data.roots]

    def f(x):
        w = np.ones_like(x)
        for r, n in roots:
            w = w * np.abs(r - x) ** n
        return x ** k * w

    cuts = [float(data.lower)] + [float(b) for b in data.breakpoints] + [float(data.upper)]
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        m = 8
        prev = None
        while True:
            x = np.linspace(a, b, 2 * m + 1)
            y = f(x)
            h = (b - a) / (2 * m)
            val = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
            if prev is not None and abs(val - prev) <= rel_tol * max(1.0, abs(val)):
                break
            prev = val
            m *= 2
            if m > 2**20:
                break
        total += val
    return total


def random_ks_data(rng) -> KSData:
    r = int(rng.integers(2, 5))
    n = [int(x) for x in rng.integers(0, 4, size=r)]
    p = [int(x) for x in rng.integers(-6, 7, size=r)]
    q = [int(x) for x in rng.choice([-3, -2, -1, 1, 2, 3], size=r)]
    return KSData(tuple(n), tuple(p), tuple(q))


def square_theta_scan(points=10**6) -> float:
    """Minimum over the circle of the closed-form square ratio, plus 8/3."""
    t = np.linspace(0, np.pi, points, endpoint=False)
    a, b = np.cos(t), np.sin(t)
    r = (6 * a**4 + 20 * a**2 * b**2 + 6 * b**4) / (a**4 + 5 * a**2 * b**2 + b**4)
    return float(r.min())


def constructed_pencil(eigs, seed=0):
    """(A, B) with B = M^T M and A = M^T diag(eigs) M, so B^-1 A has spectrum eigs."""
    rng = np.random.default_rng(seed)
    n = len(eigs)
    m = rng.normal(size=(n, n)) + n * np.eye(n)
    return m.T @ np.diag(eigs) @ m, m.T @ m


def threefold_triangular_basis():
    """Rows map x to the triangular orthonormal coordinates of the threefold."""
    s1 = math.sqrt(15 / 34)
    s2 = math.sqrt(30 / 79)
    return np.array([[s1, 0, 0], [s2 / 2, s2, 0], [-s2 / 2, 0, s2]])


def fibonacci_sphere(count):
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)


def frac(x) -> Fraction:
    return Fraction(x)
