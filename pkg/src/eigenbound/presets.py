"""Built-in moment polytopes, all normalised so that every facet constant is 1.

With that normalisation the Kähler-Einstein metric has Einstein constant 1.
The same data is exported as JSON under ``data/presets/`` in the repository.
"""

from __future__ import annotations

from fractions import Fraction

from .polytope import Polytope, PolytopeError

PRESET_FACETS: dict[str, list[tuple[tuple[int, ...], int]]] = {
    # CP^1: the segment [-1, 1]
    "cp1": [((1,), 1), ((-1,), 1)],
    # CP^2: triangle with vertices (-1,-1), (2,-1), (-1,2)
    "cp2": [((1, 0), 1), ((0, 1), 1), ((-1, -1), 1)],
    # CP^1 x CP^1: the square [-1, 1]^2
    "cp1xcp1": [((1, 0), 1), ((0, 1), 1), ((-1, 0), 1), ((0, -1), 1)],
    # CP^2 blown up at three points: the hexagon
    "dp6": [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1),
            ((-1, -1), 1), ((1, 1), 1)],
    # P(O + O(1,-1)) over CP^1 x CP^1: a tetrahedron cut at two skew edges
    "threefold": [((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1),
                  ((-1, 0, 0), 1), ((-1, -1, 0), 1), ((1, 0, -1), 1)],
}

PRESET_NAMES = tuple(PRESET_FACETS)


def preset(name: str) -> Polytope:
    try:
        facets = PRESET_FACETS[name]
    except KeyError:
        raise PolytopeError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    normals = [v for v, _ in facets]
    consts = [Fraction(c) for _, c in facets]
    return Polytope.from_inequalities(normals, consts, name=name)


def disc_moments():
    """Moments of the unit disc divided by pi, up to degree 4.

    The bound is invariant under rescaling the measure, so dropping the
    common factor of pi keeps everything rational.
    """
    from .moments import MomentTensor

    q = Fraction
    t4 = [[[[q(0)] * 2 for _ in range(2)] for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    idx = sorted((i, j, k, l))
                    if idx in ([0, 0, 0, 0], [1, 1, 1, 1]):
                        t4[i][j][k][l] = q(1, 8)
                    elif idx == [0, 0, 1, 1]:
                        t4[i][j][k][l] = q(1, 24)
    zero3 = [[[q(0)] * 2 for _ in range(2)] for _ in range(2)]
    return MomentTensor(dim=2, vol=q(1), m1=[q(0), q(0)],
                        gram=[[q(1, 4), q(0)], [q(0), q(1, 4)]], t3=zero3, t4=t4)
