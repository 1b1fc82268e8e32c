import json
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eigenbound.moments import monomial_moment
from eigenbound.polytope import (Facet, Polytope, PolytopeError, Simplex, barycenter,
                                 check_delzant, check_fano_normalized, parse_polytope,
                                 polytope_from_dict, triangulate, vertices, volume)
from eigenbound.presets import PRESET_NAMES, preset

F = Fraction


def doc(facets, dim=None):
    return json.dumps({"dimension": dim or len(facets[0][0]),
                       "facets": [{"v": list(v), "c": c} for v, c in facets]})


def test_parse_segment():
    p = parse_polytope(doc([((1,), 1), ((-1,), 1)]))
    assert vertices(p) == [(F(-1),), (F(1),)]


def test_parse_hexagon_has_six_vertices():
    hexa = [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1), ((1, 1), 1), ((-1, -1), 1)]
    assert len(vertices(parse_polytope(doc(hexa)))) == 6


def test_rational_string_constants():
    p = parse_polytope(doc([((1,), "1/2"), ((-1,), "0.75")]))
    assert vertices(p) == [(F(-1, 2),), (F(3, 4),)]


@pytest.mark.parametrize("facets, msg", [
    ([((1, 0), 1), ((-1, 0), -2), ((0, 1), 1), ((0, -1), 1)], "empty"),
    ([((1, 0), 1), ((0, 1), 1)], "unbounded"),
    ([((2, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)], "primitive"),
    ([((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1), ((1, 0), 5)], "redundant"),
    ([((0, 0), 1), ((1, 0), 1)], "zero"),
])
def test_invalid_polytopes(facets, msg):
    with pytest.raises(PolytopeError, match=msg):
        parse_polytope(doc(facets))


@pytest.mark.parametrize("text", ["not json", "{}", '{"dimension": true, "facets": []}',
                                  '{"dimension": 1, "facets": [{"v": [1]}]}',
                                  '{"dimension": 1, "facets": [{"v": [1.5], "c": 1}]}'])
def test_malformed_documents(text):
    with pytest.raises(PolytopeError):
        parse_polytope(text)


def test_cp2_and_square_vertices():
    assert set(vertices(preset("cp2"))) == {(-1, -1), (2, -1), (-1, 2)}
    assert set(vertices(preset("cp1xcp1"))) == {(a, b) for a in (-1, 1) for b in (-1, 1)}
    assert len(vertices(preset("threefold"))) == 8


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_vertices_feasible_and_active(name):
    p = preset(name)
    for v, active in p.vertex_data:
        vals = [f.value(v) for f in p.facets]
        assert all(x >= 0 for x in vals)
        assert sum(1 for x in vals if x == 0) >= p.dim
        assert len(active) >= p.dim


def test_threefold_vertices_brute_force():
    # independent enumeration over facet triples with Cramer's rule
    from itertools import combinations
    p = preset("threefold")
    found = set()
    for trip in combinations(p.facets, 3):
        a = [f.normal for f in trip]
        b = [-f.const for f in trip]
        d = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
             - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
             + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
        if d == 0:
            continue
        x = []
        for col in range(3):
            m = [list(r) for r in a]
            for i in range(3):
                m[i][col] = b[i]
            dm = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                  - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                  + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            x.append(F(dm, d))
        if p.contains(x):
            found.add(tuple(x))
    assert found == set(vertices(p))


def test_triangulation_examples():
    seg = triangulate(preset("cp1"))
    assert len(seg) == 1 and seg[0].volume == 2
    sq = triangulate(preset("cp1xcp1"))
    assert len(sq) in (2, 4) and sum(s.volume for s in sq) == 4
    hexa = triangulate(preset("dp6"))
    assert len(hexa) == 6 and sum(s.volume for s in hexa) == 3


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_triangulation_volume_matches_moment(name):
    p = preset(name)
    assert sum(s.volume for s in triangulate(p)) == monomial_moment(p, (0,) * p.dim)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_triangulation_disjoint_interiors(name):
    # a fan of simplices with disjoint interiors: sampled interior points lie in exactly one
    import numpy as np
    p = preset(name)
    simp = triangulate(p)
    rng = np.random.default_rng(3)
    for s in simp:
        verts = np.array(s.vertices, dtype=float)
        w = rng.dirichlet(np.ones(p.dim + 1), size=20)
        for pt in w @ verts:
            count = 0
            for t in simp:
                tv = np.array(t.vertices, dtype=float)
                lam = np.linalg.solve(np.vstack([tv.T, np.ones(p.dim + 1)]), np.append(pt, 1))
                count += bool(np.all(lam > 1e-9))
            assert count == 1


def test_triangulation_is_deterministic():
    a = triangulate(preset("threefold"))
    b = triangulate(Polytope(3, preset("threefold").facets))
    assert a == b
    assert a == sorted(a, key=lambda s: s.vertices)


def test_simplex_rejects_degenerate():
    with pytest.raises(PolytopeError):
        Simplex(((F(0), F(0)), (F(1), F(1)), (F(2), F(2))))


def test_barycenter_examples():
    assert barycenter(preset("cp2")) == (0, 0)
    assert barycenter(preset("dp6")) == (0, 0)
    tri = Polytope.from_inequalities([(1, 0), (0, 1), (-1, -1)], [0, 0, 1])
    assert barycenter(tri) == (F(1, 3), F(1, 3))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["cp1xcp1", "cp2", "dp6", "threefold", "cp1"]),
       st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=3, max_size=3))
def test_barycenter_translation_equivariant(name, shift):
    p = preset(name)
    t = shift[: p.dim]
    moved = barycenter(p.translated(t))
    assert moved == tuple(b + s for b, s in zip(barycenter(p), t))


def test_fano_checks():
    assert check_fano_normalized(preset("dp6")).ok
    doubled = preset("cp1xcp1").scaled(2)
    r = check_fano_normalized(doubled)
    assert r.constants_equal and not r.constants_one and not r.ok
    assert any("!= 1" in m for m in r.messages)
    shifted = Polytope.from_inequalities([(1,), (-1,)], [0, 2])
    r = check_fano_normalized(shifted)
    assert not r.barycenter_zero and not r.ok and r.barycenter == (1,)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_are_delzant(name):
    assert check_delzant(preset(name)).ok


def test_non_simple_vertex_warns_and_non_unimodular_detected():
    with pytest.warns(RuntimeWarning, match="not simple"):
        pyr = Polytope.from_inequalities(
            [(0, 0, 1), (1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, -1)], [0, 1, 1, 1, 1])
    assert not check_delzant(pyr).simple
    tri = Polytope.from_inequalities([(1, 0), (0, 1), (-1, -2)], [1, 1, 1])
    assert not check_delzant(tri).unimodular


def test_round_trip_dict():
    for name in PRESET_NAMES:
        p = preset(name)
        q = polytope_from_dict(json.loads(json.dumps(p.to_dict())))
        assert q == p and q.name == name


def test_volume_helper():
    assert [volume(preset(n)) for n in PRESET_NAMES] == [2, F(9, 2), 4, 3, F(22, 3)]
