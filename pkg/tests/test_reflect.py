import random

import pytest

from caustics.context import trivial_context
from caustics.curve import (PlaneCurve, normalize_point, singular_points)
from caustics.gaussian import GaussianRational
from caustics.parser import parse_extension, parse_point, parse_polynomial
from caustics.reflect import (BrocardLemoyneReport, DegenerateConfiguration,
                              ReflectedMap, base_points, brocard_lemoyne,
                              degeneracy_check, delta1_estimate, flemma_path,
                              ledger_path, mclass, reflected_map_explicit,
                              reflected_map_general, theorem1_terms)
from caustics.tripoly import (com_matrix, mat_from_int, mat_inv, mat_mul,
                              mat_vec, substitute_linear)

LEMNISCATE = "(x^2+y^2)^2 - 2*(x^2-y^2)*z^2"
QUINTIC = "y^2*z^3 - x^5"
QUARTIC = ("2*y*z^3+2*z^2*y^2+2*z*y^3+2*y^4-2*z^3*x+2*z*y*x^2"
           "+5*y^2*x^2+3*x^4")


def curve(text, ctx=None):
    return PlaneCurve(parse_polynomial(text, ctx))


def point(text, ctx=None):
    coords = parse_point(text, ctx)
    return normalize_point(coords[0].ctx, coords)


def test_wedge_identity_and_explicit_formulas():
    C = curve(LEMNISCATE)
    S = point("1:0:1")
    rm = ReflectedMap(C, S)  # constructor asserts x*u + y*v + z*w == 0
    ue, ve, we = reflected_map_explicit(C, S)
    assert rm.u.terms == ue.terms
    assert rm.v.terms == ve.terms
    assert rm.w.terms == we.terms
    assert rm.u.deg == 2 * C.d - 1


def test_reflected_map_rejects_cyclic_source():
    C = curve(LEMNISCATE)
    with pytest.raises(DegenerateConfiguration):
        ReflectedMap(C, point("1:i:0"))


def test_equivariance_under_linear_maps():
    rng = random.Random(99)
    C = curve("y^2*z - x^3 + x*z^2")
    S = point("2:1:1")
    ctx = S.ctx
    rm = ReflectedMap(C, S)
    F = C.form_in(ctx)
    iI = ctx.from_qi(GaussianRational(0, 1))
    Iv = (ctx.one, iI, ctx.zero)
    Jv = (ctx.one, -iI, ctx.zero)
    for _ in range(20):
        M = mat_from_int(ctx, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        for _k in range(4):
            r, c = rng.sample(range(3), 2)
            E = [[1 if a == b else 0 for b in range(3)] for a in range(3)]
            E[r][c] = rng.randint(-2, 2)
            M = mat_mul(M, mat_from_int(ctx, E))
        Minv = mat_inv(M, ctx)
        lhs = tuple(substitute_linear(comp, M) for comp in rm.components())
        FM = substitute_linear(F, M)
        rhs0 = reflected_map_general(FM, mat_vec(Minv, S.coords),
                                     mat_vec(Minv, Iv), mat_vec(Minv, Jv))
        Com = com_matrix(M, ctx)
        rhs = tuple(
            rhs0[0].scale(Com[k][0]) + rhs0[1].scale(Com[k][1])
            + rhs0[2].scale(Com[k][2]) for k in range(3))
        for a, b in zip(lhs, rhs):
            assert a.terms == b.terms


def test_degeneracy_check():
    circle = curve("x^2 + y^2 - z^2")
    with pytest.raises(DegenerateConfiguration):
        degeneracy_check(circle, point("0:0:1"))  # center = focus
    degeneracy_check(circle, point("2:0:1"))  # fine
    with pytest.raises(DegenerateConfiguration):
        degeneracy_check(curve("x^2 + y^2 - z^2"), point("1:i:0"))
    degeneracy_check(curve(QUINTIC), point("3:1:1"))
    with pytest.raises(ValueError):
        PlaneCurve(parse_polynomial("x + y + z")) and None
        degeneracy_check(PlaneCurve(parse_polynomial("x + y + z")),
                         point("1:0:1"))


def test_parabola_tangent_infinity_source_degenerate():
    # conic tangent to the line at infinity, source at the tangency point:
    # both isotropic source lines coincide with the tangent line
    C = curve("y*z - x^2")
    with pytest.raises(DegenerateConfiguration):
        degeneracy_check(C, point("0:1:0"))


def test_base_points_lemniscate():
    C = curve(LEMNISCATE)
    S = point("2:3:1")  # generic finite source off the special lines
    clusters = base_points(C, S)
    assert sum(cl.size(S.ctx) for cl in clusters) == 3  # I, J, O only


def test_base_points_quintic():
    C = curve(QUINTIC)
    S = point("2:3:1")
    clusters = base_points(C, S)
    # for a generic source only the two singular points are base: the
    # isotropic tangency points keep a well-defined reflected line (the
    # tangent itself), so the map does not vanish there
    assert sum(cl.size(S.ctx) for cl in clusters) == 2


def test_base_points_quintic_source_on_isotropic_tangent():
    # with the source on one of the isotropic tangent lines, its tangency
    # point joins the base locus
    ctx = parse_extension("t^3 - 20")
    C = curve(QUINTIC, ctx)
    S = point("-3/25*t:0:1", ctx)
    clusters = base_points(C, S)
    total = sum(cl.ctx.degree for cl in clusters)
    # A1, A2 (3 conjugates each over the source field) plus the two
    # tangency points of the lines through S (one per isotropic pencil)
    assert total // ctx.degree == 4


def test_base_points_smooth_conic():
    C = curve("x^2 + y^2 - 2*z^2")
    S = point("3:1:1")
    clusters = base_points(C, S)
    # the conic passes through both cyclic points; for a generic source
    # they are the whole base locus
    assert sum(cl.size(S.ctx) for cl in clusters) == 2
    for cl in clusters:
        assert cl.point.pivot != 2  # both at infinity


def test_theorem1_lemniscate_S_on_two_tangents():
    C = curve(LEMNISCATE)
    S = point("1:0:1")
    terms = theorem1_terms(C, S)
    assert terms.dual == 6
    assert terms.f == 8
    assert terms.g == 0
    assert terms.f_prime == 0
    assert terms.g_prime == 0
    assert terms.q_prime == 0
    assert terms.mu_S == 0
    assert terms.mclass() == 8


def test_theorem1_lemniscate_source_at_infinity():
    C = curve(LEMNISCATE)
    S = point("1:1:0")
    terms = theorem1_terms(C, S)
    assert terms.at_infinity
    assert terms.mu_I == 2 and terms.mu_J == 2 and terms.mu_S == 0
    assert terms.g == 0 and terms.c_prime == 0
    assert terms.mclass() == 12


def test_theorem1_quintic_generic_finite():
    C = curve(QUINTIC)
    S = point("2:3:1")
    terms = theorem1_terms(C, S)
    assert terms.dual == 5
    assert terms.g == 2
    assert terms.f == 0
    assert terms.f_prime == 0
    assert terms.g_prime == 0
    assert terms.q_prime == 0
    assert terms.mclass() == 13


def test_theorem1_counterexample_quartic():
    C = curve(QUARTIC)
    S = point("0:0:1")
    terms = theorem1_terms(C, S)
    assert terms.dual == 12
    assert (terms.g, terms.f, terms.f_prime, terms.g_prime,
            terms.q_prime) == (0, 4, 0, 1, 0)
    assert terms.mclass() == 23


def test_brocard_lemoyne_counterexample():
    C = curve(QUARTIC)
    S = point("0:0:1")
    rep = brocard_lemoyne(C, S)
    assert rep.bl_value == 21
    assert rep.correction_sum == 2
    assert rep.mclass == 23
    assert rep.corrections == (1, 1, 0, 0)


def test_three_paths_lemniscate():
    C = curve(LEMNISCATE)
    S = point("1:0:1")
    rep = mclass(C, S, verify_h=True)
    assert rep.consistent
    assert rep.mclass_theorem1 == rep.mclass_ledger == rep.mclass_flemma == 8
    assert rep.caustic_class == 8
    # every dispatched case agreed with the direct valuation
    assert all(r.h_direct == r.h for r in rep.h_records)


def test_three_paths_quintic_A2():
    C = curve(QUINTIC)
    S = point("0:1:0")
    rep = mclass(C, S, verify_h=True)
    assert rep.consistent
    assert rep.mclass == 8
    assert rep.caustic_class == 8


def test_three_paths_quartic():
    C = curve(QUARTIC)
    S = point("0:0:1")
    rep = mclass(C, S, verify_h=True)
    assert rep.consistent
    assert rep.mclass == 23


def test_delta1_examples():
    assert delta1_estimate(curve(QUARTIC), point("0:0:1"), trials=2) == 1
    assert delta1_estimate(curve(LEMNISCATE), point("2:3:1"), trials=2) == 1
    assert delta1_estimate(curve(QUINTIC), point("2:3:1"), trials=2) == 1


def test_lemniscate_class_formula_samples():
    C = curve(LEMNISCATE)
    # class = 12 - 2*(on an I-tangent) - 2*(on a J-tangent) - mu_S
    expected = {
        "2:3:1": 12,     # generic
        "2:i:1": 10,     # on V(y - i*x + i*z) only
        "2:-i:1": 10,    # conjugate side
        "1:0:1": 8,      # on one tangent from each pencil
        "6/5:2/5:1": 11,  # smooth curve point off all tangents
    }
    for text, want in expected.items():
        S = point(text)
        rep = mclass(C, S, paths=("t1", "ledger"))
        assert rep.consistent, text
        assert rep.caustic_class == want, text
