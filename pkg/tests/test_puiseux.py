import random

import pytest
import sympy
from sympy.abc import x as sx, y as sy

from caustics.context import trivial_context
from caustics.curve import (PlaneCurve, line_at_infinity, normalize_point,
                            singular_points)
from caustics.gaussian import GaussianRational
from caustics.parser import parse_point, parse_polynomial
from caustics.puiseux import (Branch, branch_cases, branch_line_valuation,
                              branch_poly_valuation, branch_tangent_contact,
                              branch_tangent_line, branch_tangent_local,
                              dual_degree, first_char_exponent,
                              intersection_number, residual_valuation,
                              v_ledger_cases, weierstrass_factor)


def curve(text):
    return PlaneCurve(parse_polynomial(text))


def point(text, ctx=None):
    coords = parse_point(text, ctx)
    return normalize_point(coords[0].ctx, coords)


def qi(n, d=1):
    return GaussianRational(n, 0, d)


def test_cusp_branch():
    # y^2 z - x^3 at the origin: one branch, e = 2, y = t^3 (x = t^2)
    C = curve("y^2*z - x^3")
    [case] = branch_cases(C, point("0:0:1"))
    assert case.mu == 2
    assert len(case.branches) == 1
    br = case.branches[0]
    assert br.e == 2
    assert br.lam == br.ctx.one
    assert br.yser.coeffs == {3: br.ctx.one}
    v, trunc = residual_valuation(case, br)
    assert v is None  # exact solution: residual vanishes to known order


def test_quintic_cusp_branch():
    C = curve("y^2*z^3 - x^5")
    [case] = branch_cases(C, point("0:0:1"))
    br = case.branches[0]
    assert br.e == 2
    assert br.yser.coeffs == {5: br.ctx.one}


def test_lemniscate_origin_branches():
    C = curve("(x^2+y^2)^2 - 2*(x^2-y^2)*z^2")
    cases = branch_cases(C, point("0:0:1"))
    # two smooth branches with tangents y = x and y = -x (however the
    # cluster splits, the total count and tangent slopes must come out)
    total = 0
    for case in cases:
        assert case.mu == 2
        for br in case.branches:
            assert br.e == 1
            total += br.ctx.degree
            c = branch_tangent_local(br)
            # the slope satisfies c^2 = 1 (tangents y = x and y = -x),
            # whether the conjugate pair splits or stays one cluster
            assert c * c == br.ctx.one
            assert not br.ctx.decide_zero(c)
            vres, trunc = residual_valuation(case, br)
            assert vres is None or vres >= trunc
    assert total == 2


def test_branch_tangent_contact_flex():
    # at I the lemniscate has two smooth branches; one tangent has contact 3
    C = curve("(x^2+y^2)^2 - 2*(x^2-y^2)*z^2")
    I = point("1:i:0")
    contacts = []
    total = 0
    for case in branch_cases(C, I):
        for br in case.branches:
            contacts.append(branch_tangent_contact(br))
            total += br.ctx.degree
    assert total == 2  # two conjugate smooth branches
    assert all(c == 3 for c in contacts)


def test_branch_count_at_A2():
    C = curve("y^2*z^3 - x^5")
    A2 = point("0:1:0")
    [case] = branch_cases(C, A2)
    assert case.mu == 3
    [br] = case.branches
    assert br.e == 3
    # tangent is the line at infinity, contact 5 in t-units
    ell = line_at_infinity(br.ctx)
    assert branch_line_valuation(br, ell, case.M) == 5
    tl = branch_tangent_line(br, case.M)
    # the tangent line is z = 0
    assert [c.is_zero() for c in tl.coeffs] == [True, True, False]


def test_first_char_exponent():
    C = curve("y^2*z - x^3")
    [case] = branch_cases(C, point("0:0:1"))
    [br] = case.branches
    assert first_char_exponent(br) == 3  # t-units: beta_1 = 3/2 in x-units
    C2 = curve("y*z - x^2")
    [case2] = branch_cases(C2, point("0:0:1"))
    [br2] = case2.branches
    assert first_char_exponent(br2) is None


def test_v_ledger_examples():
    # ordinary node: V = 2
    C = curve("y^2*z - x^2*z - x^3")
    ledgers = v_ledger_cases(C, point("0:0:1"))
    assert sum(l.total for l in ledgers) == 2
    # cusp of y^2 z - x^3: V = 3
    C2 = curve("y^2*z - x^3")
    ledgers = v_ledger_cases(C2, point("0:0:1"))
    assert sum(l.total for l in ledgers) == 3
    # smooth point: V = 0
    ledgers = v_ledger_cases(C2, point("1:1:1"))
    assert sum(l.total for l in ledgers) == 0


def test_dual_degrees_golden():
    assert dual_degree(curve("(x^2+y^2)^2 - 2*(x^2-y^2)*z^2")) == 6
    assert dual_degree(curve("y^2*z^3 - x^5")) == 5
    assert dual_degree(curve(
        "2*y*z^3+2*z^2*y^2+2*z*y^3+2*y^4-2*z^3*x+2*z*y*x^2+5*y^2*x^2+3*x^4"
    )) == 12
    assert dual_degree(curve("x^3 + y^3 + z^3")) == 6
    # nodal and cuspidal cubics
    assert dual_degree(curve("y^2*z - x^2*z - x^3")) == 4
    assert dual_degree(curve("y^2*z - x^3")) == 3
    # smooth conic
    assert dual_degree(curve("x^2 + y^2 - z^2")) == 2
    # three-cusp quartic
    assert dual_degree(curve(
        "x^2*y^2 + y^2*z^2 + z^2*x^2 - 2*x*y*z*x - 2*x*y*z*y - 2*x*y*z*z"
    )) == 3


def test_intersection_number_cusp_line():
    C = curve("y^2*z - x^3")
    L = curve("y*z^2 - x^3 + x*z^2")  # a smooth cubic through the origin
    O = point("0:0:1")
    i = intersection_number(C, L, O)
    # both pass through O; tangents y=0 (cusp) and y=-x: transversal-ish:
    # i = sum over pairs; compare with the resultant valuation oracle below
    fs = sy ** 2 - sx ** 3
    gs = sy - sx ** 3 + sx
    r = sympy.Poly(sympy.resultant(fs, gs, sy), sx)
    import sympy as _s
    val = min(k for k, c in enumerate(reversed(r.all_coeffs())) if c != 0)
    assert i == val


def test_intersection_number_matches_resultant_oracle_random():
    rng = random.Random(12)
    tested = 0
    trials = 0
    while tested < 12 and trials < 120:
        trials += 1
        # random local curves through the origin with y^mu present
        def rand_local(mu, d):
            terms = {(0, mu): rng.choice([1, 2, -1])}
            for _ in range(4):
                ex = rng.randint(0, d)
                ey = rng.randint(0, d - 1)
                if ex + ey == 0:
                    continue
                if (ex, ey) == (0, mu):
                    continue
                terms[(ex, ey)] = rng.randint(-3, 3)
            return terms

        ta = rand_local(rng.randint(1, 2), 3)
        tb = rand_local(rng.randint(1, 2), 3)
        fa = sum(c * sx ** ex * sy ** ey for (ex, ey), c in ta.items())
        fb = sum(c * sx ** ex * sy ** ey for (ex, ey), c in tb.items())
        if fa == 0 or fb == 0:
            continue
        # oracle conditions: no common factor; only common axis root at 0
        if sympy.gcd(fa, fb).has(sx, sy):
            continue
        ga = sympy.Poly(fa.subs(sx, 0), sy)
        gb = sympy.Poly(fb.subs(sx, 0), sy)
        if ga.is_zero or gb.is_zero:
            continue
        common = sympy.gcd(ga, gb)
        if common.degree() > 0:
            if sympy.expand(common.monic().as_expr()
                            - sy ** common.degree()) != 0:
                continue
        res = sympy.Poly(sympy.resultant(fa, fb, sy), sx)
        if res.is_zero:
            continue
        # homogenize both to build curves; degree caps keep this cheap
        da = max(ex + ey for (ex, ey) in ta)
        db = max(ex + ey for (ex, ey) in tb)
        sa = " + ".join("%d*x^%d*y^%d*z^%d" % (c, ex, ey, da - ex - ey)
                        for (ex, ey), c in ta.items())
        sb = " + ".join("%d*x^%d*y^%d*z^%d" % (c, ex, ey, db - ex - ey)
                        for (ex, ey), c in tb.items())
        try:
            A = curve(sa)
            B = curve(sb)
        except ValueError:
            continue  # a square factor slipped in
        O = point("0:0:1")
        ours = intersection_number(A, B, O)
        val = min(k for k, c in enumerate(reversed(res.all_coeffs()))
                  if c != 0)
        assert ours == val, (sa, sb)
        tested += 1
    assert tested >= 12


def test_sum_branch_mults_equals_multiplicity():
    for text, pt_text, mu in [
        ("y^2*z^3 - x^5", "0:1:0", 3),
        ("(x^2+y^2)^2 - 2*(x^2-y^2)*z^2", "1:i:0", 2),
        ("y^2*z - x^3", "0:0:1", 2),
    ]:
        C = curve(text)
        cases = branch_cases(C, point(pt_text))
        for case in cases:
            assert sum(br.e * br.ctx.degree for br in case.branches) == \
                case.mu * case.ctx.degree
            assert case.mu == mu


def test_weierstrass_factor_roundtrip():
    # the factor of the cusp branch: y^2 - x^3 itself
    C = curve("y^2*z - x^3")
    [case] = branch_cases(C, point("0:0:1"))
    [br] = case.branches
    cols = weierstrass_factor(br)
    assert len(cols) == 3
    # y^2 coefficient 1, y^1 coefficient 0, y^0 coefficient -x^3
    assert cols[2].coeffs == {0: br.ctx.one}
    assert cols[1].is_syntactically_zero()
    assert cols[0].coeffs == {3: -br.ctx.one}
