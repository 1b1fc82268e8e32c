"""Moment polytopes given by affine inequalities ``v_k . x + c_k >= 0``.

Everything here is exact rational arithmetic.  Polytopes in this domain are
small (a handful of facets in dimension <= 3), so vertices are found by brute
force over n-subsets of facets and triangulation is a recursive centroid fan
over the face lattice.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np

from . import exact
from .poly import as_fraction

Point = Tuple[Fraction, ...]

# Above this many candidate facet subsets vertex enumeration gets slow.
ENUMERATION_WARN_LIMIT = 20000


class PolytopeError(ValueError):
    """Raised for malformed or geometrically invalid polytope input."""


@dataclass(frozen=True)
class Facet:
    normal: Tuple[int, ...]
    const: Fraction

    def __post_init__(self):
        normal = tuple(int(v) for v in self.normal)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "const", as_fraction(self.const))
        if not any(normal):
            raise PolytopeError("facet normal must be nonzero")
        if math.gcd(*normal) != 1:
            raise PolytopeError(f"facet normal {normal} is not primitive")

    def value(self, x: Sequence) -> Fraction:
        """l_k(x) = v_k . x + c_k."""
        return sum((v * xi for v, xi in zip(self.normal, x)), Fraction(0)) + self.const


@dataclass(frozen=True)
class Simplex:
    vertices: Tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(tuple(Fraction(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts[0])
        if len(verts) != n + 1:
            raise PolytopeError(f"an {n}-simplex needs {n + 1} vertices, got {len(verts)}")
        if self.signed_det == 0:
            raise PolytopeError("simplex vertices are affinely dependent")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def edge_matrix(self) -> list[list[Fraction]]:
        """Columns are the edge vectors ``vertices[j] - vertices[0]``."""
        v0 = self.vertices[0]
        return [[self.vertices[j + 1][i] - v0[i] for j in range(self.dim)]
                for i in range(self.dim)]

    @cached_property
    def signed_det(self) -> Fraction:
        v0 = self.vertices[0]
        edges = [[self.vertices[j + 1][i] - v0[i] for j in range(len(v0))]
                 for i in range(len(v0))]
        return exact.det(edges)

    @property
    def volume(self) -> Fraction:
        return abs(self.signed_det) / math.factorial(self.dim)

    @property
    def centroid(self) -> Point:
        k = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / k for i in range(self.dim))


@dataclass(frozen=True)
class Polytope:
    """Full-dimensional bounded polytope ``{x : l_k(x) >= 0 for all k}``.

    Construction validates the input: the region must be nonempty with
    interior, bounded, and free of redundant inequalities.
    """

    dim: int
    facets: Tuple[Facet, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        facets = tuple(f if isinstance(f, Facet) else Facet(*f) for f in self.facets)
        object.__setattr__(self, "facets", facets)
        if self.dim < 1:
            raise PolytopeError("dimension must be positive")
        for f in facets:
            if len(f.normal) != self.dim:
                raise PolytopeError(f"facet normal {f.normal} has wrong length for dimension {self.dim}")
        _validate(self)

    @classmethod
    def from_inequalities(cls, normals: Sequence[Sequence[int]], consts: Sequence,
                          name: Optional[str] = None) -> "Polytope":
        if len(normals) != len(consts):
            raise PolytopeError("need one constant per normal")
        facets = tuple(Facet(tuple(v), c) for v, c in zip(normals, consts))
        return cls(len(normals[0]), facets, name)

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        vals = [f.value(x) for f in self.facets]
        return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)

    @cached_property
    def vertex_data(self) -> Tuple[Tuple[Point, frozenset], ...]:
        return _enumerate_vertices(self.dim, self.facets)

    @property
    def normals_array(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets], dtype=float)

    @property
    def consts_array(self) -> np.ndarray:
        return np.array([float(f.const) for f in self.facets])

    def translated(self, shift: Sequence) -> "Polytope":
        """The polytope ``P + shift``; only the facet constants change."""
        shift = [as_fraction(s) for s in shift]
        facets = tuple(Facet(f.normal, f.const - sum(v * s for v, s in zip(f.normal, shift)))
                       for f in self.facets)
        return Polytope(self.dim, facets, self.name)

    def scaled(self, factor) -> "Polytope":
        """The dilation ``factor * P`` (factor > 0)."""
        factor = as_fraction(factor)
        if factor <= 0:
            raise PolytopeError("scale factor must be positive")
        return Polytope(self.dim, tuple(Facet(f.normal, f.const * factor) for f in self.facets),
                        self.name)

    def to_dict(self) -> dict:
        out = {"dimension": self.dim,
               "facets": [{"v": list(f.normal), "c": _rational_str(f.const)} for f in self.facets]}
        if self.name is not None:
            out = {"name": self.name, **out}
        return out


def _rational_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ----------------------------------------------------------------------------
# validation and vertex enumeration
# ----------------------------------------------------------------------------

def _enumerate_vertices(dim: int, facets: Sequence[Facet]):
    m = len(facets)
    if math.comb(m, dim) > ENUMERATION_WARN_LIMIT:
        warnings.warn(f"brute-force vertex enumeration over C({m},{dim}) facet subsets; "
                      "this may be slow", RuntimeWarning, stacklevel=3)
    found: dict[Point, frozenset] = {}
    for subset in combinations(range(m), dim):
        rows = [facets[k].normal for k in subset]
        rhs = [-facets[k].const for k in subset]
        x = exact.solve(rows, rhs)
        if x is None:
            continue
        point = tuple(x)
        if point in found:
            continue
        vals = [f.value(point) for f in facets]
        if all(v >= 0 for v in vals):
            found[point] = frozenset(k for k, v in enumerate(vals) if v == 0)
    return tuple(sorted(found.items()))


def _is_empty_interior(dim: int, facets: Sequence[Facet]) -> bool:
    # Chebyshev-ball LP: largest r with v.x + c >= r |v|, capped at r <= 1.
    from scipy.optimize import linprog

    a = np.array([f.normal for f in facets], dtype=float)
    c = np.array([float(f.const) for f in facets])
    norms = np.linalg.norm(a, axis=1)
    a_ub = np.hstack([-a, norms[:, None]])
    obj = np.zeros(dim + 1)
    obj[-1] = -1.0
    res = linprog(obj, A_ub=a_ub, b_ub=c, bounds=[(None, None)] * dim + [(None, 1.0)],
                  method="highs")
    return res.status != 0 or -res.fun <= 1e-12


def _is_unbounded(dim: int, facets: Sequence[Facet]) -> bool:
    normals = [f.normal for f in facets]
    if exact.rank(normals) < dim:
        return True
    # The recession cone {d : V d >= 0} is pointed; it is nonzero iff it has an
    # extreme ray, which lies on n-1 independent active constraints.
    for subset in combinations(range(len(facets)), dim - 1):
        d = exact.null_vector([normals[k] for k in subset], dim)
        if d is None:
            continue
        for sign in (1, -1):
            if all(sum(v * sign * di for v, di in zip(n, d)) >= 0 for n in normals):
                return True
    return False


def _validate(p: Polytope) -> None:
    if _is_empty_interior(p.dim, p.facets):
        raise PolytopeError("polytope is empty or has empty interior")
    if _is_unbounded(p.dim, p.facets):
        raise PolytopeError("polytope is unbounded")
    verts = p.vertex_data
    points = [v for v, _ in verts]
    if exact.affine_rank(points) < p.dim:
        raise PolytopeError("polytope is not full-dimensional")
    for k, f in enumerate(p.facets):
        on_facet = [v for v, act in verts if k in act]
        if len(on_facet) < p.dim or exact.affine_rank(on_facet) < p.dim - 1:
            raise PolytopeError(f"facet {k} (normal {f.normal}) is redundant")
    for v, act in verts:
        if len(act) > p.dim:
            warnings.warn(f"vertex {tuple(map(str, v))} lies on {len(act)} facets; "
                          "polytope is not simple (not Delzant)", RuntimeWarning, stacklevel=4)


# ----------------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------------

def parse_polytope(text: str) -> Polytope:
    """Parse the JSON polytope document ``{"dimension", "facets": [{"v", "c"}]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolytopeError(f"malformed JSON: {exc}") from exc
    return polytope_from_dict(doc)


def polytope_from_dict(doc: dict) -> Polytope:
    if not isinstance(doc, dict) or "facets" not in doc or "dimension" not in doc:
        raise PolytopeError("polytope document needs 'dimension' and 'facets'")
    dim = doc["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise PolytopeError("'dimension' must be an integer")
    facets = []
    for entry in doc["facets"]:
        try:
            v = entry["v"]
            c = entry["c"]
        except (KeyError, TypeError) as exc:
            raise PolytopeError(f"facet entry {entry!r} needs 'v' and 'c'") from exc
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise PolytopeError(f"facet normal {v!r} must be integers")
        try:
            c = as_fraction(c)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise PolytopeError(f"bad facet constant {c!r}") from exc
        facets.append(Facet(tuple(v), c))
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise PolytopeError("'name' must be a string")
    return Polytope(dim, tuple(facets), name)


def vertices(p: Polytope) -> list[Point]:
    """Extreme points of ``p``, sorted lexicographically."""
    return [v for v, _ in p.vertex_data]


def triangulate(p: Polytope) -> list[Simplex]:
    """Split ``p`` into simplices with disjoint interiors.

    Each face is coned from the average of its vertices over a triangulation
    of its own boundary faces, recursively down to vertices.
    """
    return _triangulation(p)


_TRI_CACHE: dict = {}


def _triangulation(p: Polytope) -> list[Simplex]:
    key = (p.dim, p.facets)
    if key not in _TRI_CACHE:
        verts = p.vertex_data
        points = [v for v, _ in verts]
        active = [a for _, a in verts]
        raw = _fan(tuple(range(len(points))), p.dim, points, active)
        simplices = [Simplex(tuple(sorted(s))) for s in raw]
        simplices.sort(key=lambda s: s.vertices)
        _TRI_CACHE[key] = simplices
    return list(_TRI_CACHE[key])


def _fan(face: Tuple[int, ...], face_dim: int, points, active) -> list[list[Point]]:
    if len(face) == face_dim + 1:
        return [[points[i] for i in face]]
    n = len(points[0])
    center = tuple(sum(points[i][c] for i in face) / len(face) for c in range(n))
    subfaces = set()
    for k in set().union(*(active[i] for i in face)):
        sub = tuple(i for i in face if k in active[i])
        if len(sub) < len(face) and exact.affine_rank([points[i] for i in sub]) == face_dim - 1:
            subfaces.add(sub)
    out = []
    for sub in sorted(subfaces):
        for simplex in _fan(sub, face_dim - 1, points, active):
            out.append(simplex + [center])
    return out


def volume(p: Polytope) -> Fraction:
    return sum((s.volume for s in triangulate(p)), Fraction(0))


def barycenter(p: Polytope) -> Point:
    """Exact centre of mass ``(integral of x over P) / Vol(P)``."""
    total = Fraction(0)
    first = [Fraction(0)] * p.dim
    for s in triangulate(p):
        vol = s.volume
        total += vol
        for i, c in enumerate(s.centroid):
            first[i] += vol * c
    return tuple(x / total for x in first)


@dataclass
class FanoReport:
    constants_equal: bool
    constants_one: bool
    barycenter: Point
    barycenter_zero: bool
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.constants_equal and self.constants_one and self.barycenter_zero


def check_fano_normalized(p: Polytope) -> FanoReport:
    """Check the normalisation behind the Lambda = 1 convention.

    The facet constants must all equal 1 and the barycenter must sit at the
    origin.  Only diagnoses; never raises.
    """
    consts = {f.const for f in p.facets}
    equal = len(consts) == 1
    one = consts == {Fraction(1)}
    bc = barycenter(p)
    zero = all(c == 0 for c in bc)
    msgs = []
    if not equal:
        msgs.append("facet constants differ: no common Fano scaling in these coordinates")
    elif not one:
        msgs.append(f"facet constants are equal but {_rational_str(next(iter(consts)))} != 1")
    if not zero:
        msgs.append("barycenter is not the origin: " + ", ".join(map(_rational_str, bc)))
    return FanoReport(equal, one, bc, zero, msgs)


@dataclass
class DelzantReport:
    simple: bool
    unimodular: bool
    bad_vertices: list

    @property
    def ok(self) -> bool:
        return self.simple and self.unimodular


def check_delzant(p: Polytope) -> DelzantReport:
    """Diagnose smoothness: n facets per vertex whose normals form a lattice basis."""
    simple = True
    unimodular = True
    bad = []
    for v, act in p.vertex_data:
        if len(act) != p.dim:
            simple = False
            bad.append(v)
            continue
        d = exact.det([p.facets[k].normal for k in sorted(act)])
        if abs(d) != 1:
            unimodular = False
            bad.append(v)
    return DelzantReport(simple, unimodular, bad)
