"""The caustic-class engine: reflected map and polars, base points, the
eleven-case branch contribution dispatch with its direct-valuation oracle,
the two closed formulas for the class (finite source and source at
infinity), the branch-ledger and reflected-polar computation paths, the
Brocard-Lemoyne comparison and the birationality-degree estimator.

Everything here returns exact integers; the three computation paths are
independent enough that their agreement is the working correctness
certificate for a given instance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .context import NeedMoreTerms, adjoin_root, run_split
from .curve import (Line, PlaneCurve, PointCluster, ProjectivePoint,
                    common_zero_clusters, cyclic_point_I, cyclic_point_J,
                    intersect_with_line, line_at_infinity, multiplicity_cases,
                    normalize_point_cases, singular_points)
from .gaussian import GaussianRational, QI_I
from .puiseux import (Branch, branch_cases, branch_line_valuation,
                      branch_poly_valuation, branch_tangent_contact,
                      branch_tangent_line, branch_value_cases,
                      first_char_exponent, v_value, with_truncation_retry)
from .series import TSeries
from .tripoly import TriPoly, cross, mat_inv, mat_vec, substitute_linear
from .upoly import UniPoly, squarefree_decomposition, squarefree_part

COORD_BOX = 2 ** 16


class DegenerateConfiguration(ValueError):
    """The caustic degenerates to a point for this (curve, source)."""


class InconsistentPaths(AssertionError):
    """The independent computation paths disagree (internal error)."""


# -- reflected map -----------------------------------------------------------

def _coord_forms(ctx):
    one = ctx.one
    return (TriPoly(ctx, {(1, 0, 0): one}, 1),
            TriPoly(ctx, {(0, 1, 0): one}, 1),
            TriPoly(ctx, {(0, 0, 1): one}, 1))


def reflected_map_general(F, Sv, Av, Bv):
    """id wedge [dA*dB*S - dS*dA*B - dS*dB*A] for the polars dP of F with
    respect to the three anchor vectors; returns the (u, v, w) TriPolys."""
    ctx = F.ctx
    dA = F.polar(Av)
    dB = F.polar(Bv)
    dS = F.polar(Sv)
    p_ab = dA * dB
    p_sa = dS * dA
    p_sb = dS * dB
    bracket = []
    for k in range(3):
        comp = p_ab.scale(Sv[k]) - p_sa.scale(Bv[k]) - p_sb.scale(Av[k])
        bracket.append(comp)
    xf, yf, zf = _coord_forms(ctx)
    m = (xf, yf, zf)
    u = bracket[2] * m[1] - bracket[1] * m[2]
    v = bracket[0] * m[2] - bracket[2] * m[0]
    w = bracket[1] * m[0] - bracket[0] * m[1]
    return u, v, w


class ReflectedMap:
    """Coefficients [u : v : w] of the reflected line at a generic curve
    point, as forms of degree 2d-1 over the source context."""

    __slots__ = ("curve", "source", "u", "v", "w", "ctx")

    def __init__(self, curve, source):
        ctx = source.ctx
        _reject_cyclic_source(source)
        F = curve.form_in(ctx)
        iI = ctx.from_qi(QI_I)
        Av = (ctx.one, iI, ctx.zero)
        Bv = (ctx.one, -iI, ctx.zero)
        self.u, self.v, self.w = reflected_map_general(F, source.coords,
                                                       Av, Bv)
        self.curve = curve
        self.source = source
        self.ctx = ctx
        wedge = (self.u * _coord_forms(ctx)[0] + self.v * _coord_forms(ctx)[1]
                 + self.w * _coord_forms(ctx)[2])
        if not wedge.is_zero():
            raise AssertionError("wedge identity x*u + y*v + z*w failed")

    def components(self):
        return (self.u, self.v, self.w)

    def polar_form(self, a):
        """a0*u + a1*v + a2*w for a coordinate triple a."""
        return (self.u.scale(a[0]) + self.v.scale(a[1])
                + self.w.scale(a[2]))


def reflected_map_explicit(curve, source):
    """The spelled-out coordinate formulas for the reflected map:
    u = (z0*y - z*y0)(Fx^2 + Fy^2) + 2*z*dS(F)*Fy and companions; used as an
    independent construction to test the wedge form against."""
    ctx = source.ctx
    F = curve.form_in(ctx)
    Fx, Fy = F.partial(0), F.partial(1)
    x0, y0, z0 = source.coords
    q = Fx * Fx + Fy * Fy
    ds = F.polar(source.coords)
    xf, yf, zf = _coord_forms(ctx)
    u = (yf.scale(z0) - zf.scale(y0)) * q + (zf * ds * Fy).scale(
        ctx.from_int(2))
    v = (zf.scale(x0) - xf.scale(z0)) * q - (zf * ds * Fx).scale(
        ctx.from_int(2))
    w = (xf.scale(y0) - yf.scale(x0)) * q - ((xf * Fy - yf * Fx) * ds).scale(
        ctx.from_int(2))
    return u, v, w


def _reject_cyclic_source(source):
    ctx = source.ctx
    for sign in (1, -1):
        # I and J normalized on y: (-+i, 1, 0)
        if source.pivot == 1:
            a = source.coords[0] - ctx.from_qi(GaussianRational(0, -sign))
            c = source.coords[2]
            if ctx.decide_zero(a) and ctx.decide_zero(c):
                raise DegenerateConfiguration(
                    "the source is a cyclic point; the caustic degenerates")


def degeneracy_check(curve, source):
    """Raise DegenerateConfiguration unless the caustic is an honest curve:
    the source is not cyclic, the mirror is not a line, and a conic mirror
    is not seen from one of its foci (both isotropic source lines tangent)."""
    _reject_cyclic_source(source)
    if curve.d == 1:
        raise DegenerateConfiguration("a line mirror gives a point caustic")
    if curve.d == 2:
        ctx = source.ctx
        F = curve.form_in(ctx)
        tangencies = []
        for cyc in (cyclic_point_I(ctx), cyclic_point_J(ctx)):
            rest = F.restrict_to_line(source.coords, cyc.coords)
            if rest.is_zero():
                raise DegenerateConfiguration(
                    "an isotropic line through the source lies on the conic")

            def tangent_case(c, rest=rest):
                rc = rest.map_coeffs(lambda e: e.reduce_to(c), c) \
                    if c is not ctx else rest
                if rc.degree() <= curve.d - 2:
                    return True  # repeated root at the source direction
                return squarefree_part(rc).degree() != rc.degree()

            cases = run_split(ctx, tangent_case)
            tangencies.append(all(v for _, v in cases))
        if all(tangencies):
            raise DegenerateConfiguration(
                "the source is a focus of the conic mirror")
    return True


def _is_ancestor(ctx, other):
    """True when ctx appears in other's parent chain (or is other)."""
    cur = other
    while cur is not None:
        if cur is ctx:
            return True
        cur = cur.parent
    return False


def attach_source(point, source):
    """Pair a point cluster with the source cluster over a common context:
    [(ctx, point_there, source_there, embed_fn)] where embed_fn maps
    source-context elements into the common context.  When the source
    context is not an ancestor of the point's, its modulus is adjoined, so
    the leaves enumerate (point, source-conjugate) pairs."""
    pctx = point.ctx
    sctx = source.ctx
    if sctx.degree == 1 or _is_ancestor(sctx, pctx):
        return [(pctx, point, source.embed_into(pctx), pctx.embed)]
    phi = UniPoly(pctx, [pctx.from_qi(c) for c in sctx.modulus.c])
    out = []
    for ctx2, root in adjoin_root(pctx, phi):

        def embed_fn(e, ctx2=ctx2, root=root):
            v = e.lift().eval(root)
            return ctx2.from_qi(v) if isinstance(v, GaussianRational) else v

        coords = tuple(embed_fn(c) for c in source.coords)
        out.append((ctx2, point.embed_into(ctx2),
                    ProjectivePoint(ctx2, coords, source.pivot), embed_fn))
    return out


def _cluster_equals_point(cluster_point, other):
    """Uniform test whether the cluster coincides with a fixed point of an
    ancestor context; may raise SplitRequest."""
    ctx = cluster_point.ctx
    if cluster_point.pivot != other.pivot:
        return False
    o = other.embed_into(ctx)
    return all(ctx.decide_zero(a - b)
               for a, b in zip(cluster_point.coords, o.coords))


def isotropic_tangency_clusters(curve):
    """Smooth curve points whose tangent passes through a cyclic point:
    C ∩ V(dI(F) * dJ(F)) minus the singular locus and the cyclic points.
    Independent of the source, hence cached on the curve."""
    cache = getattr(curve, "_isotangency_cache", None)
    if cache is not None:
        return cache
    ctx = curve.ctx
    F = curve.form_in(ctx)
    iI = ctx.from_qi(QI_I)
    dI = F.polar((ctx.one, iI, ctx.zero))
    dJ = F.polar((ctx.one, -iI, ctx.zero))
    if dI.is_zero() or dJ.is_zero():
        raise ValueError("an isotropic polar vanishes identically; the "
                         "curve is a union of isotropic lines")
    out = []
    for cl in common_zero_clusters([F, dI * dJ], ctx):

        def keep(c, cl=cl):
            pt = cl.point.reduce_to(c)
            grads = [curve.Fx, curve.Fy, curve.Fz]
            smooth = any(not c.decide_zero(g.embed_into(c).eval(pt.coords))
                         for g in grads)
            if not smooth:
                return False
            for cyc in (cyclic_point_I(c), cyclic_point_J(c)):
                if _cluster_equals_point(pt, cyc):
                    return False
            return True

        for leaf, ok in run_split(cl.ctx, keep):
            if ok:
                out.append(PointCluster(cl.point.reduce_to(leaf)))
    curve._isotangency_cache = out
    return out


def infinity_tangency_clusters(curve):
    """Smooth curve points where both x- and y-partials vanish: the tangent
    line there is the line at infinity.  Source-independent, cached."""
    cache = getattr(curve, "_inftangency_cache", None)
    if cache is not None:
        return cache
    ctx = curve.ctx
    F = curve.form_in(ctx)
    out = []
    for cl in common_zero_clusters([F, curve.Fx.embed_into(ctx),
                                    curve.Fy.embed_into(ctx)], ctx):

        def smooth(c, cl=cl):
            pt = cl.point.reduce_to(c)
            return not c.decide_zero(curve.Fz.embed_into(c).eval(pt.coords))

        for leaf, ok in run_split(cl.ctx, smooth):
            if ok:
                out.append(PointCluster(cl.point.reduce_to(leaf)))
    curve._inftangency_cache = out
    return out


def source_polar_clusters(curve, source, require_isotropic=None):
    """C ∩ V(dS(F)) clusters over the source context, optionally filtered
    by whether dI(F)*dJ(F) vanishes there (True), does not (False), or is
    ignored (None)."""
    ctx = source.ctx
    F = curve.form_in(ctx)
    dS = F.polar(source.coords)
    if dS.is_zero():
        raise ValueError("the source polar vanishes identically")
    clusters = common_zero_clusters([F, dS], ctx)
    if require_isotropic is None:
        return clusters
    iI = ctx.from_qi(QI_I)
    dI = F.polar((ctx.one, iI, ctx.zero))
    dJ = F.polar((ctx.one, -iI, ctx.zero))
    q = dI * dJ
    out = []
    for cl in clusters:

        def keep(c, cl=cl):
            pt = cl.point.reduce_to(c)
            vanishes = c.decide_zero(q.embed_into(c).eval(pt.coords))
            return vanishes == require_isotropic

        for leaf, ok in run_split(cl.ctx, keep):
            if ok:
                out.append(PointCluster(cl.point.reduce_to(leaf)))
    return out


def base_points(curve, source, rmap=None):
    """Base clusters of the reflected map restricted to the curve: the
    singular points, the cyclic points and the source when on the curve,
    and the smooth tangency points with the isotropic source lines (where
    both the source polar and the cyclic polar product vanish).  Each
    cluster is verified to kill u, v and w."""
    rmap = rmap or ReflectedMap(curve, source)
    ctx = rmap.ctx
    out = []
    for cl in singular_points(curve):
        out.append(cl)
    for label, pt in (("I", cyclic_point_I(ctx)), ("J", cyclic_point_J(ctx)),
                      ("S", source)):
        def status_of(c, pt=pt):
            p = pt.reduce_to(c)
            if not c.decide_zero(curve.form_in(c).eval(p.coords)):
                return "off"
            fx = curve.Fx.embed_into(c).eval(p.coords)
            fy = curve.Fy.embed_into(c).eval(p.coords)
            fz = curve.Fz.embed_into(c).eval(p.coords)
            zx, zy, zz = (c.decide_zero(v) for v in (fx, fy, fz))
            if zx and zy:
                # singular or tangent-at-infinity: listed elsewhere
                return "covered"
            return "add"

        for leaf, status in run_split(pt.ctx, status_of):
            if status == "add":
                out.append(PointCluster(pt.embed_into(leaf)))
    # smooth points whose tangent is the line at infinity (Fx = Fy = 0),
    # disjoint by construction from everything above
    out.extend(infinity_tangency_clusters(curve))
    # smooth tangency points of the two isotropic source lines
    for cl in source_polar_clusters(curve, source, require_isotropic=True):

        def keep(c, cl=cl):
            pt = cl.point.reduce_to(c)
            fx = curve.Fx.embed_into(c).eval(pt.coords)
            fy = curve.Fy.embed_into(c).eval(pt.coords)
            if c.decide_zero(fx) and c.decide_zero(fy):
                return False  # singular or tangent-at-infinity: listed above
            for other in (cyclic_point_I(c), cyclic_point_J(c)):
                if _cluster_equals_point(pt, other):
                    return False
            if _cluster_equals_point(pt, source.embed_into(c)):
                return False
            return True

        for leaf, ok in run_split(cl.ctx, keep):
            if ok:
                out.append(PointCluster(cl.point.reduce_to(leaf)))
    _verify_base_clusters(curve, source, rmap, out)
    return out


def _verify_base_clusters(curve, source, rmap, clusters):
    for cl in clusters:
        for ctx2, pt, _src in attach_source(cl.point, source):

            def vanish(c, pt=pt):
                p = pt.reduce_to(c)
                for comp in rmap.components():
                    if not c.decide_zero(comp.embed_into(c).eval(p.coords)):
                        return False
                return True

            for _leaf, ok in run_split(ctx2, vanish):
                if not ok:
                    raise AssertionError("a base candidate does not kill "
                                         "the reflected map")


# -- branch contribution dispatch ---------------------------------------------

@dataclass
class HCaseRecord:
    case_index: int
    e: int
    contact: Optional[int]
    char_exp: Optional[int]
    h: int
    h_direct: Optional[int] = None
    ctx_degree: int = 1


def _memberships(tangent, pts, ctx):
    """Which of the labelled points lie on the tangent line."""
    out = {}
    for name, p in pts.items():
        val = tangent.eval_point(p.embed_into(ctx))
        out[name] = ctx.decide_zero(val)
    return out


def _point_is(point, other, ctx):
    if point.pivot != other.pivot:
        return False
    p = point.embed_into(ctx)
    q = other.embed_into(ctx)
    return all(ctx.decide_zero(a - b) for a, b in zip(p.coords, q.coords))


def h_value_dispatch(branch, case, source):
    """The closed-form branch contribution, by the tangent/center
    configuration with respect to the cyclic points and the source.

    Case table (P = {I, J, S}, T the branch tangent, m the center):
      1: T∩P empty                      -> 0
      2: |T∩P| = 1, m not in P          -> 0
      3: |T∩P| = 1, m in P              -> e
      4: T in {(IS),(JS)}, m not in P   -> i + min(i - 2e, 0)
      5: T in {(IS),(JS)}, m in pair    -> i
      6: T = (IJ), S not in T, m not in {I,J} -> i - e
      7: T = (IJ), S not in T, m in {I,J}     -> i
      8: {I,J,S} in T, m not in P       -> 2i - 2e
      9: {I,J,S} in T, m in {I,J}       -> 2i - e
     10: {I,J,S} in T, m = S, i != 2e   -> 2i - e
     11: {I,J,S} in T, m = S, i == 2e   -> e + min(K, 3e)
    with i = i(B, T_B) and K the first characteristic exponent in t-units.
    """
    e = branch.e
    bctx = branch.ctx
    tangent = branch_tangent_line(branch, case.M)
    I = cyclic_point_I(bctx)
    J = cyclic_point_J(bctx)
    S = source
    center = case.point.embed_into(bctx)
    member = _memberships(tangent, {"I": I, "J": J, "S": S}, bctx)
    m_is = {"I": _point_is(center, I, bctx),
            "J": _point_is(center, J, bctx),
            "S": _point_is(center, S, bctx)}
    on_count = sum(member.values())
    m_in = [k for k, v in m_is.items() if v]
    m_name = m_in[0] if m_in else None
    if on_count == 0:
        return HCaseRecord(1, e, None, None, 0, ctx_degree=branch.ctx.degree)
    if on_count == 1:
        if m_name is None:
            return HCaseRecord(2, e, None, None, 0,
                               ctx_degree=branch.ctx.degree)
        return HCaseRecord(3, e, None, None, e,
                           ctx_degree=branch.ctx.degree)
    i = branch_tangent_contact(branch)
    if on_count == 2:
        pair = {k for k, v in member.items() if v}
        if pair == {"I", "J"}:
            if m_name is None:
                return HCaseRecord(6, e, i, None, i - e,
                                   ctx_degree=branch.ctx.degree)
            return HCaseRecord(7, e, i, None, i,
                               ctx_degree=branch.ctx.degree)
        if m_name is None:
            return HCaseRecord(4, e, i, None, i + min(i - 2 * e, 0),
                               ctx_degree=branch.ctx.degree)
        return HCaseRecord(5, e, i, None, i, ctx_degree=branch.ctx.degree)
    # all three on the tangent (the source is at infinity, T = line at inf)
    if m_name is None:
        return HCaseRecord(8, e, i, None, 2 * i - 2 * e,
                           ctx_degree=branch.ctx.degree)
    if m_name in ("I", "J"):
        return HCaseRecord(9, e, i, None, 2 * i - e,
                           ctx_degree=branch.ctx.degree)
    if i != 2 * e:
        return HCaseRecord(10, e, i, None, 2 * i - e,
                           ctx_degree=branch.ctx.degree)
    K = first_char_exponent(branch, bound=3 * e + 1)
    kval = 3 * e if K is None else min(K, 3 * e)
    return HCaseRecord(11, e, i, K, e + kval, ctx_degree=branch.ctx.degree)


def h_value_direct(branch, case, source):
    """Independent valuation route for the branch contribution: substitute
    the representative probranch into the normalized reflected map written
    through the W-products and take the least coordinate valuation."""
    bctx = branch.ctx
    Me = tuple(tuple(bctx.embed(v) for v in row) for row in case.M)
    Mi = mat_inv(Me, bctx)
    iI = bctx.from_qi(QI_I)
    Iv = (bctx.one, iI, bctx.zero)
    Jv = (bctx.one, -iI, bctx.zero)
    Sv = tuple(bctx.embed(v) for v in source.coords)
    A = mat_vec(Mi, Iv)
    B = mat_vec(Mi, Jv)
    Sp = mat_vec(Mi, Sv)
    e, lam = branch.e, branch.lam
    xs = branch.x_series()
    ys = branch.yser
    dys = ys.derivative()
    einv = bctx.from_qi(GaussianRational(1, 0, e))
    # dy/dx = y'(t) * t^(1-e) / (e*lam);  x*dy/dx = t*y'(t)/e
    gprime = dys.shift(1 - e).scale(einv * bctx.invert(lam))
    xgp = dys.shift(1).scale(einv)
    wref = xgp - ys

    def W(P):
        return (TSeries.monomial(bctx, P[1], 0) - gprime.scale(P[0])
                + wref.scale(P[2]))

    WA, WB, WS = W(A), W(B), W(Sp)
    one = TSeries.monomial(bctx, bctx.one, 0)
    m_vec = (xs, ys, one)
    wab = WA * WB
    wsa = WS * WA
    wsb = WS * WB
    bracket = tuple(wab.scale(Sp[k]) - wsa.scale(B[k]) - wsb.scale(A[k])
                    for k in range(3))
    rhat = (bracket[2] * m_vec[1] - bracket[1] * m_vec[2],
            bracket[0] * m_vec[2] - bracket[2] * m_vec[0],
            bracket[1] * m_vec[0] - bracket[0] * m_vec[1])
    best = None
    min_unknown = None
    for comp in rhat:
        v = comp.valuation_or_none()
        if v is not None:
            best = v if best is None else min(best, v)
        elif not comp.is_exact():
            bound = comp.trunc
            min_unknown = bound if min_unknown is None \
                else min(min_unknown, bound)
    if best is None:
        raise NeedMoreTerms(min_unknown)
    if min_unknown is not None and min_unknown <= best:
        raise NeedMoreTerms(min_unknown)
    return best


# -- theorem-1 term bundle -----------------------------------------------------

@dataclass
class TermBundle:
    d: int
    dual: int
    g: int
    f: int
    f_prime: int
    g_prime: int
    q_prime: int
    mu_I: int
    mu_J: int
    mu_S: int
    c_prime: int
    at_infinity: bool
    omega_I_IS: int = 0
    omega_J_JS: int = 0
    omega_S_IS: int = 0
    omega_S_JS: int = 0

    def mclass(self):
        base = 2 * self.dual + self.d
        if self.at_infinity:
            return (base - 2 * self.g - self.mu_I - self.mu_J - self.mu_S
                    - self.c_prime)
        return (base - 2 * self.f_prime - self.g - self.f - self.g_prime
                + self.q_prime)


def _aggregate(pairs, base_deg, what):
    scaled = sum(leaf.degree * v for leaf, v in pairs)
    q, r = divmod(scaled, base_deg)
    if r:
        raise AssertionError("non-integral aggregate for %s" % what)
    return q


def _multiplicity_agg(curve, point, base_deg):
    return _aggregate(multiplicity_cases(curve, point), base_deg,
                      "multiplicity")


def _certified_valuation_cases(rest, ctx):
    """[(leaf, certified valuation)] of a UniPoly over ctx."""

    def val(c):
        rc = rest if c is ctx else \
            rest.map_coeffs(lambda e: e.reduce_to(c), c)
        for k in range(len(rc.c)):
            if not c.decide_zero(rc.c[k]):
                return k
        raise ValueError("restriction is identically zero (the line lies "
                         "on the curve)")

    return run_split(ctx, val)


def _line_valuation_at(curve, anchor, direction, ctx):
    """Certified valuation cases of F(anchor + u*direction) at u = 0: the
    intersection number of the curve with the line at the anchor point."""
    F = curve.form_in(ctx)
    rest = F.restrict_to_line(direction, anchor)
    return _certified_valuation_cases(rest, ctx)


def contact_sum_along_line(curve, anchor_coords, dir_coords, ctx,
                           t_order=None, want_q=False, exclude_anchor=True):
    """Sum of contact numbers (and the tangency excess q-term) over the
    section points P(u) = anchor + u*direction of the curve, u != 0.

    Returns (omega_sum_scaled, q_sum_scaled) both scaled by leaf degrees
    relative to ctx."""
    F = curve.form_in(ctx)
    rest = F.restrict_to_line(dir_coords, anchor_coords)
    if rest.is_zero():
        raise ValueError("an isotropic line lies on the curve")
    omega_scaled = 0
    q_scaled = 0

    def strip(c):
        rc = rest if c is ctx else \
            rest.map_coeffs(lambda e: e.reduce_to(c), c)
        for k in range(len(rc.c)):
            if not c.decide_zero(rc.c[k]):
                return UniPoly(c, rc.c[k:]), k
        raise ValueError("line on curve")

    for leaf, (tail, _k0) in run_split(ctx, strip):
        if tail.degree() == 0:
            continue
        for leaf2, dec in run_split(leaf, lambda c, tail=tail:
                                    squarefree_decomposition(
                                        tail if c is leaf else tail.map_coeffs(
                                            lambda e: e.reduce_to(c), c))):
            for gpoly, mult in dec:
                for ctx2, u0 in adjoin_root(leaf2, gpoly):
                    coords = tuple(ctx2.embed(a) * u0 + ctx2.embed(b)
                                   for a, b in zip(dir_coords, anchor_coords))
                    for ctx3, pt in normalize_point_cases(ctx2, coords):
                        for leaf3, mu in multiplicity_cases(curve, pt):
                            omega_scaled += (mult - mu) * leaf3.degree
                        if want_q and mult >= 2:
                            q_scaled += _q_excess_at(curve, pt,
                                                     anchor_coords,
                                                     dir_coords, t_order)
    return omega_scaled, q_scaled


def _q_excess_at(curve, pt, anchor_coords, dir_coords, t_order):
    """Scaled tangency-excess contributions max(i(B, T_B) - 2e, 0) over
    branches at pt whose tangent is the given line."""
    ctx = pt.ctx
    line_cases = _line_from_pair(anchor_coords, dir_coords, ctx)
    total = 0
    for leaf0, line in line_cases:
        for case in branch_cases(curve, pt.reduce_to(leaf0), t_order):
            for br in case.branches:

                def excess(b, c, case=case, line=line):
                    tangent = branch_tangent_line(b, case.M)
                    lc = line.embed_into(c)
                    crossv = cross(tangent.coeffs, lc.coeffs)
                    if any(not c.decide_zero(v) for v in crossv):
                        return 0
                    i = branch_tangent_contact(b)
                    return max(i - 2 * b.e, 0)

                for leaf, v in branch_value_cases(br, excess):
                    total += v * leaf.degree
    return total


def _line_from_pair(p_coords, q_coords, ctx):
    from .curve import normalize_line_cases
    return normalize_line_cases(ctx, cross(p_coords, q_coords))


def theorem1_terms(curve, source, t_order=None):
    """All terms of the two closed class formulas for this (curve, source).
    Exact integers, aggregated over every conjugate cluster."""
    ctx = source.ctx
    base_deg = ctx.degree
    I = cyclic_point_I(ctx)
    J = cyclic_point_J(ctx)
    from .puiseux import dual_degree
    dual = dual_degree(curve)
    at_inf = ctx.decide_zero(source.coords[2])
    mu_I = _multiplicity_agg(curve, I, base_deg)
    mu_J = _multiplicity_agg(curve, J, base_deg)
    mu_S = _multiplicity_agg(curve, source, base_deg)
    # g: contact with the line at infinity
    g = 0
    for sec in intersect_with_line(curve, line_at_infinity(ctx)):
        for leaf, mu in multiplicity_cases(curve, sec.point):
            g += (sec.imult - mu) * leaf.degree
    g, r = divmod(g, base_deg)
    if r:
        raise AssertionError("non-integral contact number with the line at "
                             "infinity")
    # f and the Omega corrections at I and J
    i_I = _aggregate(_line_valuation_at(curve, I.coords, source.coords, ctx),
                     base_deg, "i_I")
    i_J = _aggregate(_line_valuation_at(curve, J.coords, source.coords, ctx),
                     base_deg, "i_J")
    f = i_I + i_J
    # g' and the Omega corrections at S
    i_S_IS = _aggregate(_line_valuation_at(curve, source.coords, I.coords,
                                           ctx), base_deg, "i_S")
    i_S_JS = _aggregate(_line_valuation_at(curve, source.coords, J.coords,
                                           ctx), base_deg, "i_S")
    g_prime = i_S_IS + i_S_JS - mu_S
    # f' and q' along the two isotropic source lines
    om1, q1 = contact_sum_along_line(curve, source.coords, I.coords, ctx,
                                     t_order, want_q=True)
    om2, q2 = contact_sum_along_line(curve, source.coords, J.coords, ctx,
                                     t_order, want_q=True)
    f_prime, r = divmod(om1 + om2, base_deg)
    if r:
        raise AssertionError("non-integral isotropic contact sum")
    q_prime, r = divmod(q1 + q2, base_deg)
    if r:
        raise AssertionError("non-integral tangency excess sum")
    # c'(S): only meaningful for a source at infinity lying on the curve
    c_prime = 0
    if at_inf and mu_S > 0:
        scaled = 0
        for case in branch_cases(curve, source, t_order):
            for br in case.branches:

                def cval(b, c, case=case):
                    i_inf = branch_line_valuation(b, line_at_infinity(c),
                                                  case.M)
                    if i_inf != 2 * b.e:
                        return 0
                    K = first_char_exponent(b, bound=3 * b.e + 1)
                    kk = 0 if K is None else min(K - 3 * b.e, 0)
                    return b.e + kk

                for leaf, v in branch_value_cases(br, cval):
                    scaled += v * leaf.degree
        c_prime, r = divmod(scaled, base_deg)
        if r:
            raise AssertionError("non-integral c' sum")
    omega_I = i_I - mu_I if mu_I else 0
    omega_J = i_J - mu_J if mu_J else 0
    omega_S_IS = i_S_IS - mu_S if mu_S else 0
    omega_S_JS = i_S_JS - mu_S if mu_S else 0
    return TermBundle(curve.d, dual, g, f, f_prime, g_prime, q_prime,
                      mu_I, mu_J, mu_S, c_prime, at_inf,
                      omega_I, omega_J, omega_S_IS, omega_S_JS)


# -- ledger path ---------------------------------------------------------------

def ledger_candidates(curve, source):
    """Clusters that can carry a nonzero branch contribution: the curve
    points where the product of the three anchor polars vanishes."""
    ctx = source.ctx
    F = curve.form_in(ctx)
    iI = ctx.from_qi(QI_I)
    dI = F.polar((ctx.one, iI, ctx.zero))
    dJ = F.polar((ctx.one, -iI, ctx.zero))
    dS = F.polar(source.coords)
    for form in (dI, dJ, dS):
        if form.is_zero():
            raise ValueError("an anchor polar vanishes identically; the "
                             "curve is too degenerate for the ledger path")
    product = dI * dJ * dS
    return common_zero_clusters([F, product], ctx)


def ledger_path(curve, source, t_order=None, collect=None, verify_h=False):
    """mclass via 2*dual + d - sum of branch contributions."""
    from .puiseux import dual_degree
    ctx = source.ctx
    dual = dual_degree(curve)

    def compute(order):
        scaled = 0
        for cl in ledger_candidates(curve, source):
            for case in branch_cases(curve, cl.point, order):
                for br in case.branches:

                    def hval(b, c, case=case):
                        rec = h_value_dispatch(b, case, source)
                        if verify_h:
                            rec.h_direct = h_value_direct(b, case, source)
                            if rec.h_direct != rec.h:
                                raise InconsistentPaths(
                                    "branch contribution mismatch: case %d "
                                    "gives %d, direct valuation gives %d"
                                    % (rec.case_index, rec.h, rec.h_direct))
                        return rec

                    for leaf, rec in branch_value_cases(br, hval):
                        scaled += rec.h * leaf.degree
                        if collect is not None:
                            rec.ctx_degree = leaf.degree
                            collect.append(rec)
        q, r = divmod(scaled, ctx.degree)
        if r:
            raise AssertionError("non-integral ledger sum")
        return 2 * dual + curve.d - q

    return with_truncation_retry(curve, compute, t_order)


# -- reflected-polar path --------------------------------------------------------

def flemma_path(curve, source, rng=None, t_order=None, retries=6,
                rmap=None, clusters=None):
    """mclass via d(2d-1) minus the intersection numbers of the curve with a
    generic reflected polar at the base clusters; two independent random
    directions must agree."""
    rng = rng or random.Random(0xF1E)
    ctx = source.ctx
    rmap = rmap or ReflectedMap(curve, source)
    clusters = clusters if clusters is not None else base_points(
        curve, source, rmap)

    def one_draw(order):
        a = tuple(ctx.from_qi(GaussianRational(rng.randint(-COORD_BOX,
                                                           COORD_BOX),
                                               rng.randint(-COORD_BOX,
                                                           COORD_BOX)))
                  for _ in range(3))
        polar = rmap.polar_form(a)
        if polar.is_zero() or polar.deg != 2 * curve.d - 1:
            return None
        scaled = 0
        for cl in clusters:
            for case in branch_cases(curve, cl.point, order):
                for br in case.branches:
                    for leaf, v in branch_value_cases(
                            br, lambda b, c, case=case:
                            branch_poly_valuation(b, polar, case.M)):
                        scaled += v * leaf.degree
        q, r = divmod(scaled, ctx.degree)
        if r:
            raise AssertionError("non-integral base intersection sum")
        return curve.d * (2 * curve.d - 1) - q

    def compute(order):
        values = []
        for _ in range(retries):
            try:
                v = one_draw(order)
            except ValueError:
                v = None
            if v is not None:
                values.append(v)
            if len(values) == 2:
                if values[0] == values[1]:
                    return values[0]
                values = [values[0]]  # a third draw arbitrates
        raise RuntimeError("reflected-polar genericity retries exhausted")

    return with_truncation_retry(curve, compute, t_order)


# -- Brocard-Lemoyne ------------------------------------------------------------

@dataclass
class BrocardLemoyneReport:
    bl_value: int
    corrections: tuple
    mclass: int

    @property
    def correction_sum(self):
        return sum(self.corrections)


def brocard_lemoyne(curve, source, terms=None):
    """The historical class formula read literally, plus the four contact
    corrections whose sum reconciles it with the true class count."""
    ctx = source.ctx
    if ctx.decide_zero(source.coords[2]):
        raise ValueError("the historical formula only covers sources not "
                         "at infinity")
    terms = terms or theorem1_terms(curve, source)
    f_hat = terms.mu_I + terms.mu_J
    g_hat = terms.g
    gp_hat = terms.mu_S
    corrections = (terms.omega_I_IS, terms.omega_J_JS,
                   terms.omega_S_IS, terms.omega_S_JS)
    f_prime_hat = terms.f_prime + sum(corrections)
    q_hat = terms.q_prime
    bl = (terms.d + 2 * (terms.dual - f_prime_hat) - g_hat - f_hat - gp_hat
          + q_hat)
    mclass = terms.mclass()
    if bl + sum(corrections) != mclass:
        raise InconsistentPaths("correction identity failed: %d + %d != %d"
                                % (bl, sum(corrections), mclass))
    return BrocardLemoyneReport(bl, corrections, mclass)


# -- birationality degree --------------------------------------------------------

def delta1_estimate(curve, source, trials=2, rng=None):
    """Probable degree of the reflected map restricted to the curve.

    For a random curve point m the fiber over its image is cut out of the
    curve by two vanishing 2x2 minors; the non-base solutions are counted
    through the degree of the fiber's x-projection polynomial after the
    base-point projections are divided out.  No fiber root is ever adjoined,
    so the estimate stays cheap; indeterminate draws report None."""
    from .upoly import gcd_field
    rng = rng or random.Random(0xDE17A)
    ctx = source.ctx
    rmap = ReflectedMap(curve, source)
    base = base_points(curve, source, rmap)
    samples = _rational_curve_points(curve, ctx, rng)
    counts = set()
    done = 0
    attempts = 0
    while done < trials and attempts < 4 * trials:
        attempts += 1
        if samples:
            m_cluster = samples[attempts % len(samples)]
        elif curve.d <= 3:
            m_cluster = _random_curve_cluster(curve, ctx, rng)
        else:
            return None  # no cheap sample points: inconclusive
        if m_cluster is None:
            continue
        mctx = m_cluster.ctx
        coords = m_cluster.coords
        uvw = [comp.embed_into(mctx).eval(coords)
               for comp in rmap.components()]
        comps = [comp.embed_into(mctx) for comp in rmap.components()]
        anchor = next((k for k in range(3) if not uvw[k].is_zero()), None)
        if anchor is None:
            continue  # the sample is a base point
        minors = []
        for l in range(3):
            if l == anchor:
                continue
            form = comps[l].scale(uvw[anchor]) - comps[anchor].scale(uvw[l])
            if not form.is_zero():
                minors.append(_strip_content(form))
        if len(minors) < 2:
            continue
        count = None
        for theta in range(0, 6):
            try:
                count = _fiber_count(curve, mctx, minors, base, m_cluster,
                                     theta)
            except (ValueError, ZeroDivisionError):
                count = None
            if count is not None:
                break
        if count is None:
            continue
        counts.add(count)
        done += 1
    if done < trials or len(counts) != 1:
        return None
    return counts.pop()


def _strip_content(form):
    """Divide a TriPoly by the common rational content of its coefficient
    numerators, to keep integer heights down."""
    from math import gcd as igcd
    num = 0
    den = 1
    for coeff in form.terms.values():
        for q in coeff.coeffs:
            num = igcd(num, igcd(abs(q.a), abs(q.b)))
            den = den * q.den // igcd(den, q.den)
    if num <= 1 and den == 1:
        return form
    scale = form.ctx.from_qi(GaussianRational(den, 0, max(num, 1)))
    return form.scale(scale)


def _fiber_count(curve, mctx, minors, base, sample, theta):
    """Count, per specialization of the sample point, the distinct values of
    x + theta*y over the fiber system minus the base points.  Rejects the
    shear (returns None) when the sample's projection collides with a base
    projection; other generic-position assumptions are acceptable because
    the whole operation is an explicitly probabilistic estimator."""
    from .curve import _bivariate_cols
    from .tripoly import mat_from_int
    from .upoly import (PolyDomain, QI_DOM, UniPoly as UP, gcd_field,
                        resultant as res)
    shear = mat_from_int(mctx, [[1, -theta, 0], [0, 1, 0], [0, 0, 1]])
    Fs = substitute_linear(curve.form_in(mctx), shear)
    f = _bivariate_cols(Fs.dehomogenize(2), mctx)
    # base projections X = x + theta*y, as Q(i) polynomials, and the
    # sample's own projection for the collision check
    sdom = PolyDomain(QI_DOM)
    base_projs = []
    for cl in base:
        if cl.point.pivot != 2:
            continue
        bctx = cl.ctx
        proj_coord = cl.point.coords[0] + cl.point.coords[1] * theta
        lift = proj_coord.lift()
        cols = []
        for k in range(max(lift.degree(), 0) + 1):
            cc = -lift.coeff(k)
            if k == 0:
                cols.append(UP(QI_DOM, [cc, QI_DOM.one]))
            else:
                cols.append(UP(QI_DOM, [cc]))
        xminus = UP(sdom, cols)
        if xminus.is_zero():
            continue
        p_biv = UP(sdom, [UP(QI_DOM, [c]) for c in bctx.modulus.c])
        proj = res(p_biv, xminus)
        if proj.is_zero() or proj.degree() < 1:
            continue
        base_projs.append(squarefree_part(proj))
    if mctx.degree == 1:
        x_m = (sample.coords[0] + sample.coords[1] * theta).coeffs[0]
        for proj in base_projs:
            if not proj.eval(x_m):
                return None  # the sample hides behind a base projection
    rs = []
    for form in minors:
        gs = substitute_linear(form.embed_into(mctx), shear)
        gb = _bivariate_cols(gs.dehomogenize(2), mctx)
        if gb.degree() < 1 or f.degree() < 1:
            return None
        r = res(f, gb)
        if r.is_zero():
            return None
        rs.append(r)
    g = gcd_field(rs[0], rs[1])
    if g.degree() == 0:
        return 0
    g = squarefree_part(g)
    for proj in base_projs:
        proj_m = proj.map_coeffs(mctx.from_qi, mctx)
        overlap = gcd_field(g, proj_m)
        if overlap.degree() > 0:
            g = g.exact_div(overlap)
    q, r = divmod(g.degree(), mctx.degree)
    if r:
        return None
    return q


def _rational_curve_points(curve, ctx, rng, span=6, dens=(1, 2, 3, 5)):
    """Small-height rational curve points in the z = 1 chart, shuffled;
    these keep the fiber elimination over plain Q(i) where the heights stay
    readable.  Only looked for over a trivial base context."""
    if ctx.degree != 1:
        return []
    F = curve.form_in(ctx)
    f = F.dehomogenize(2)
    out = []
    seen = set()
    for dx in dens:
        for dy in dens:
            for nx in range(-span, span + 1):
                for ny in range(-span, span + 1):
                    key = (GaussianRational(nx, 0, dx),
                           GaussianRational(ny, 0, dy))
                    if key in seen:
                        continue
                    seen.add(key)
                    acc = GaussianRational(0)
                    for (ex, ey), c in f.items():
                        acc = acc + c.coeffs[0] * (key[0] ** ex) \
                            * (key[1] ** ey)
                    if not acc:
                        pt = ProjectivePoint(
                            ctx, (ctx.from_qi(key[0]), ctx.from_qi(key[1]),
                                  ctx.one), 2)
                        for _leaf, mu in multiplicity_cases(curve, pt):
                            if mu == 1:
                                out.append(pt)
                        continue
    rng.shuffle(out)
    return out


def _random_curve_cluster(curve, ctx, rng):
    """A random line section point of the curve, as a ProjectivePoint over
    an extension of ctx.  Small coefficients keep the downstream fiber
    eliminations at readable integer heights."""
    for _ in range(8):
        coeffs = tuple(ctx.from_qi(GaussianRational(rng.randint(-3, 3),
                                                    rng.randint(-3, 3)))
                       for _ in range(3))
        if all(c.is_zero() for c in coeffs):
            continue
        from .curve import normalize_line_cases
        cases = normalize_line_cases(ctx, coeffs)
        if len(cases) != 1:
            continue
        line = cases[0][1]
        try:
            secs = intersect_with_line(curve, line)
        except ValueError:
            continue
        for sec in secs:
            if sec.imult == 1 and not sec.at_p1:
                return sec.point
    return None


# -- report assembly --------------------------------------------------------------

@dataclass
class CausticClassReport:
    d: int
    dual_degree: int
    terms: TermBundle
    mclass_theorem1: Optional[int]
    mclass_ledger: Optional[int]
    mclass_flemma: Optional[int]
    delta1: int
    consistent: bool
    h_records: list = field(default_factory=list)
    flemma_error: Optional[str] = None

    @property
    def mclass(self):
        for v in (self.mclass_theorem1, self.mclass_ledger,
                  self.mclass_flemma):
            if v is not None:
                return v
        raise ValueError("no path produced a value")

    @property
    def caustic_class(self):
        q, r = divmod(self.mclass, self.delta1)
        if r:
            raise InconsistentPaths("mclass %d not divisible by delta1 %d"
                                    % (self.mclass, self.delta1))
        return q


def mclass(curve, source, paths=("t1", "ledger", "flemma"), delta1=1,
           rng=None, t_order=None, verify_h=False):
    """Full class computation with the selected paths and the exact
    consistency verdict."""
    degeneracy_check(curve, source)
    rng = rng or random.Random(0xCAFE)
    terms = None
    v_t1 = v_ledger = v_flemma = None
    records = []
    flemma_error = None
    if "t1" in paths:
        terms = theorem1_terms(curve, source, t_order)
        v_t1 = terms.mclass()
    if "ledger" in paths:
        v_ledger = ledger_path(curve, source, t_order,
                               collect=records, verify_h=verify_h)
    if "flemma" in paths:
        try:
            v_flemma = flemma_path(curve, source, rng, t_order)
        except RuntimeError as err:
            flemma_error = str(err)
    if terms is None:
        terms = theorem1_terms(curve, source, t_order)
    produced = [v for v in (v_t1, v_ledger, v_flemma) if v is not None]
    consistent = len(set(produced)) <= 1 and bool(produced)
    report = CausticClassReport(curve.d, terms.dual, terms, v_t1, v_ledger,
                                v_flemma, delta1, consistent, records,
                                flemma_error)
    return report
