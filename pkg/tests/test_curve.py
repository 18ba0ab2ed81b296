import pytest

from caustics.context import trivial_context
from caustics.curve import (Line, PlaneCurve, PointCluster, ProjectivePoint,
                            contact_number, cyclic_point_I, cyclic_point_J,
                            intersect_with_line, intersection_number_with_line,
                            line_at_infinity, line_through, multiplicity,
                            multiplicity_cases, normalization_matrix_cases,
                            normalize_point, normalize_point_cases,
                            on_curve_cases, singular_points,
                            tangent_cone_cases)
from caustics.gaussian import GaussianRational
from caustics.parser import parse_point, parse_polynomial
from caustics.tripoly import mat_vec


LEMNISCATE = "(x^2+y^2)^2 - 2*(x^2-y^2)*z^2"
QUINTIC = "y^2*z^3 - x^5"


def curve(text):
    return PlaneCurve(parse_polynomial(text))


def point(text, ctx=None):
    coords = parse_point(text, ctx)
    ctx = coords[0].ctx
    return normalize_point(ctx, coords)


def test_reduced_check_rejects_squares():
    with pytest.raises(ValueError):
        curve("x^2*z - 2*x*y*z + y^2*z")  # z*(x-y)^2
    with pytest.raises(ValueError):
        curve("x^2*z^2 + 2*x*y*z^2 + y^2*z^2")  # z^2*(x+y)^2
    curve("x^2 - y*z")  # fine


def test_normalize_point():
    p = point("2:4:2")
    assert [c.coeffs[0].re for c in p.coords] == [1, 2, 1]
    assert p.pivot == 2
    q = point("3:5:0")
    assert q.pivot == 1
    assert q.coords[1] == q.ctx.one


def test_multiplicity_lemniscate_node():
    C = curve(LEMNISCATE)
    O = point("0:0:1")
    assert multiplicity(C, O) == 2
    # a generic off-curve point has multiplicity 0, on-curve smooth point 1
    assert multiplicity(C, point("1:1:1")) == 0
    assert multiplicity(C, point("6/5:2/5:1")) == 1


def test_multiplicity_quintic():
    C = curve(QUINTIC)
    assert multiplicity(C, point("0:0:1")) == 2
    assert multiplicity(C, point("0:1:0")) == 3
    assert multiplicity(C, point("1:1:1")) == 1


def test_multiplicity_smooth_conic():
    C = curve("x^2 + y^2 - z^2")
    assert multiplicity(C, point("1:0:1")) == 1


def test_singular_points_lemniscate():
    C = curve(LEMNISCATE)
    clusters = singular_points(C)
    # I, J, O: O is rational, I and J form one cluster over y^2+1 or two
    # rational-over-Q(i) clusters
    total = sum(cl.size(C.ctx) for cl in clusters)
    assert total == 3
    assert all(cl.annotations["multiplicity"] == 2 for cl in clusters)
    # I = [1:i:0] must be among them
    found_inf = [cl for cl in clusters if cl.point.pivot != 2]
    assert sum(cl.size(C.ctx) for cl in found_inf) == 2


def test_singular_points_quintic():
    C = curve(QUINTIC)
    clusters = singular_points(C)
    assert sum(cl.size(C.ctx) for cl in clusters) == 2
    mus = sorted(cl.annotations["multiplicity"] for cl in clusters)
    assert mus == [2, 3]


def test_singular_points_smooth():
    assert singular_points(curve("x^2 + y^2 - z^2")) == []


def test_tangent_cone_lemniscate_origin():
    C = curve(LEMNISCATE)
    O = point("0:0:1")
    [(ctx, cone)] = tangent_cone_cases(C, O)
    # -2(x^2 - y^2)
    assert cone[(2, 0)] == ctx.from_int(-2)
    assert cone[(0, 2)] == ctx.from_int(2)


def test_tangent_cone_quintic_cusp():
    C = curve(QUINTIC)
    A1 = point("0:0:1")
    [(ctx, cone)] = tangent_cone_cases(C, A1)
    assert set(cone) == {(0, 2)}


def test_line_sections_quintic():
    C = curve(QUINTIC)
    ctx = C.ctx
    # V(y) meets the quintic only at A1 with i = 5
    ly = Line(ctx, (ctx.zero, ctx.one, ctx.zero), 1)
    secs = intersect_with_line(C, ly)
    by_i = sorted(s.imult for s in secs)
    assert 5 in by_i
    A1 = point("0:0:1")
    i = intersection_number_with_line(C, ly, A1)
    assert i == 5
    # line at infinity meets only at A2 with i = 5
    A2 = point("0:1:0")
    i = intersection_number_with_line(C, line_at_infinity(ctx), A2)
    assert i == 5


def test_contact_numbers():
    C = curve(QUINTIC)
    ctx = C.ctx
    A2 = point("0:1:0")
    # Omega = i - mu = 5 - 3 = 2
    assert contact_number(C, line_at_infinity(ctx), A2) == 2
    lem = curve(LEMNISCATE)
    I = cyclic_point_I(lem.ctx)
    assert contact_number(lem, line_at_infinity(lem.ctx), I) == 0
    # transversal smooth point
    P = point("6/5:2/5:1")
    horizontal = Line(lem.ctx, (lem.ctx.zero, lem.ctx.invert(
        lem.ctx.from_qi(GaussianRational(2, 0, 5))), lem.ctx.one), 2)
    # build the line through P and [1:0:0] instead: y - 2/5 z = 0
    [(ctx2, ell)] = line_through(P, point("1:0:0"))
    assert contact_number(lem, ell, P.embed_into(ctx2)) == 0


def test_bezout_random_lines():
    import random
    rng = random.Random(2024)
    C = curve(LEMNISCATE)
    ctx = C.ctx
    for _ in range(25):
        coeffs = tuple(ctx.from_qi(GaussianRational(rng.randint(-9, 9),
                                                    rng.randint(-9, 9)))
                       for _ in range(3))
        if all(c.is_zero() for c in coeffs):
            continue
        from caustics.curve import normalize_line_cases
        for leaf, line in normalize_line_cases(ctx, coeffs):
            secs = intersect_with_line(C, line)  # asserts Bezout internally
            assert sum(s.imult * s.point.ctx.degree for s in secs) == \
                C.d * leaf.degree


def test_intersections_at_cyclic_points_lemniscate():
    C = curve(LEMNISCATE)
    I = cyclic_point_I(C.ctx)
    # tangent lines at I: V(y - i*x + i*z) and V(y - i*x - i*z);
    # each meets the curve at I with intersection number 4
    ctx = I.ctx
    i_el = ctx.from_qi(GaussianRational(0, 1))
    for sign in (1, -1):
        ell = Line(ctx, (-i_el, ctx.one, i_el if sign > 0 else -i_el), 2)
        # normalize: pivot should be the z coefficient
        from caustics.curve import normalize_line_cases
        [(leaf, ell_n)] = normalize_line_cases(ctx, ell.coeffs)
        assert intersection_number_with_line(C, ell_n,
                                             I.embed_into(leaf)) == 4
    # the line at infinity meets with i = 2 (transversal to both branches)
    assert intersection_number_with_line(C, line_at_infinity(ctx), I) == 2


def test_normalization_matrix():
    C = curve(QUINTIC)
    A2 = point("0:1:0")
    for leaf, (M, mu) in normalization_matrix_cases(C, A2):
        assert mu == 3
        img = mat_vec(M, (leaf.zero, leaf.zero, leaf.one))
        # third column is the point
        assert [c.coeffs for c in img] == [c.coeffs for c in
                                           A2.reduce_to(leaf).coords]


def test_on_curve_cases_cluster_split():
    # the section of the circle by V(x - 2z) has two conjugate points;
    # both lie on the curve
    C = curve("x^2 + y^2 - z^2")
    ctx = C.ctx
    ell = Line(ctx, (ctx.one, ctx.zero, ctx.from_int(-2)), 0)
    secs = intersect_with_line(C, ell)
    for s in secs:
        cases = on_curve_cases(C, s.point)
        assert all(v for _, v in cases)
