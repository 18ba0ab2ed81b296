"""Global geometry of a plane projective curve: points, lines, clusters,
multiplicities, tangent cones, line sections and normalization matrices.

Points with algebraic coordinates are handled as clusters: a context whose
specializations enumerate the conjugate points, plus coordinates over that
context.  Anything that inspects a cluster (a multiplicity, a membership
test) runs under the splitting driver, so every returned case is uniform
across its leaf context.
"""

from __future__ import annotations

from .context import SplitRequest, adjoin_root, run_split
from .gaussian import QI_I
from .tripoly import (TriPoly, cross, mat_from_int, mat_mul,
                      substitute_linear)
from .upoly import (PolyDomain, UniPoly, content_pp, gcd_field, gcd_poly_ring,
                    resultant, squarefree_decomposition, squarefree_part)


class ProjectivePoint:
    """Normalized coordinates over a context: the pivot coordinate (chosen
    in z, y, x preference order) equals one."""

    __slots__ = ("ctx", "coords", "pivot")

    def __init__(self, ctx, coords, pivot):
        self.ctx = ctx
        self.coords = coords
        self.pivot = pivot

    def embed_into(self, ctx):
        if ctx is self.ctx:
            return self
        return ProjectivePoint(ctx, tuple(ctx.embed(c) for c in self.coords),
                               self.pivot)

    def reduce_to(self, ctx):
        if ctx is self.ctx:
            return self
        return ProjectivePoint(ctx, tuple(c.reduce_to(ctx)
                                          for c in self.coords), self.pivot)

    def __repr__(self):
        return "ProjectivePoint(%s; %s)" % (self.ctx.name,
                                            [list(c.coeffs)
                                             for c in self.coords])


class PointCluster:
    """A Galois-stable bundle of points: a context (descendant of some base)
    with one coordinate triple over it.  size(base) counts the points of the
    cluster per specialization of the base context."""

    __slots__ = ("point", "annotations")

    def __init__(self, point, **annotations):
        self.point = point
        self.annotations = annotations

    @property
    def ctx(self):
        return self.point.ctx

    def size(self, base_ctx):
        q, r = divmod(self.ctx.degree, base_ctx.degree)
        if r:
            raise ValueError("cluster degree %d not a multiple of base "
                             "degree %d" % (self.ctx.degree, base_ctx.degree))
        return q

    def __repr__(self):
        return "PointCluster(deg=%d, %s)" % (self.ctx.degree, self.annotations)


class Line:
    """V(a*x + b*y + c*z); coefficients normalized like point coordinates."""

    __slots__ = ("ctx", "coeffs", "pivot")

    def __init__(self, ctx, coeffs, pivot):
        self.ctx = ctx
        self.coeffs = coeffs
        self.pivot = pivot

    def eval_point(self, point):
        x, y, z = point.coords if isinstance(point, ProjectivePoint) else point
        a, b, c = self.coeffs
        return a * x + b * y + c * z

    def embed_into(self, ctx):
        if ctx is self.ctx:
            return self
        return Line(ctx, tuple(ctx.embed(c) for c in self.coeffs), self.pivot)

    def spanning_points(self):
        """Two independent points on the line, read off the pivot so no zero
        tests are needed."""
        ctx = self.ctx
        a, b, c = self.coeffs
        one, zero = ctx.one, ctx.zero
        if self.pivot == 2:   # c == 1
            return ((one, zero, -a), (zero, one, -b))
        if self.pivot == 1:   # b == 1, c == 0
            return ((one, -a, zero), (zero, zero, one))
        return ((zero, one, zero), (zero, zero, one))  # a == 1, b == c == 0

    def __repr__(self):
        return "Line(%s; %s)" % (self.ctx.name,
                                 [list(c.coeffs) for c in self.coeffs])


def normalize_point_cases(ctx, coords):
    """Normalize a raw coordinate triple into cluster cases."""

    def attempt(c):
        cc = [c.embed(v) for v in coords]
        for idx in (2, 1, 0):
            if not c.decide_zero(cc[idx]):
                inv = c.invert(cc[idx])
                return ProjectivePoint(c, tuple(v * inv for v in cc), idx)
        raise ValueError("zero coordinate triple")

    return run_split(ctx, attempt)


def normalize_point(ctx, coords):
    """Normalize when no splitting is expected; raises on a mixed cluster."""
    cases = normalize_point_cases(ctx, coords)
    if len(cases) != 1:
        raise ValueError("point normalization split the context")
    return cases[0][1]


def normalize_line_cases(ctx, coeffs):
    def attempt(c):
        cc = [c.embed(v) for v in coeffs]
        for idx in (2, 1, 0):
            if not c.decide_zero(cc[idx]):
                inv = c.invert(cc[idx])
                return Line(c, tuple(v * inv for v in cc), idx)
        raise ValueError("zero line coefficients")

    return run_split(ctx, attempt)


def line_through(p, q):
    """Line through two distinct points of a common context (cases)."""
    return normalize_line_cases(p.ctx, cross(p.coords, q.coords))


def line_at_infinity(ctx):
    return Line(ctx, (ctx.zero, ctx.zero, ctx.one), 2)


def cyclic_point_I(ctx):
    i = ctx.from_qi(QI_I)
    return ProjectivePoint(ctx, (ctx.invert(i), ctx.one, ctx.zero), 1)


def cyclic_point_J(ctx):
    j = ctx.from_qi(-QI_I)
    return ProjectivePoint(ctx, (ctx.invert(j), ctx.one, ctx.zero), 1)


def points_equal(p, q):
    """Uniform equality of normalized points in a common context; may raise
    SplitRequest."""
    if p.pivot != q.pivot:
        return False
    ctx = p.ctx
    for a, b in zip(p.coords, q.coords):
        if not ctx.decide_zero(a - b):
            return False
    return True


class PlaneCurve:
    """A reduced plane curve V(F) with cached partials and cluster caches."""

    def __init__(self, F):
        if F.is_zero() or F.deg < 1:
            raise ValueError("a curve needs a nonzero form of degree >= 1")
        self.F = F
        self.d = F.deg
        self.ctx = F.ctx
        _require_squarefree_form(F)
        self.Fx = F.partial(0)
        self.Fy = F.partial(1)
        self.Fz = F.partial(2)
        self.dual_degree_cache = None
        self._singular_cache = {}
        self._embedded = {}

    def form_in(self, ctx):
        got = self._embedded.get(ctx.uid)
        if got is None:
            got = self.F.embed_into(ctx)
            self._embedded[ctx.uid] = got
        return got

    def __repr__(self):
        return "PlaneCurve(d=%d)" % self.d


def _require_squarefree_form(F):
    """Reduced-curve check: F squarefree as a form, via bivariate gcds in
    the z = 1 chart plus z-power bookkeeping.  Exact."""
    zmin = min(k[2] for k in F.terms)
    if zmin >= 2:
        raise ValueError("curve form is divisible by z^2 (not reduced)")
    f = F.dehomogenize(2)
    ctx = F.ctx
    try:
        fb = _bivariate_cols(f, ctx)
        if fb.degree() == 0:
            g = fb.c[0]
            if squarefree_part(g).degree() != g.degree():
                raise ValueError("curve form has a repeated factor")
            return
        fy = UniPoly(fb.dom, [c * (k + 1) for k, c in enumerate(fb.c[1:])])
        if gcd_poly_ring(fb, fy).degree() > 0:
            raise ValueError("curve form has a repeated factor")
        cont, _ = content_pp(fb)
        if squarefree_part(cont).degree() != cont.degree():
            raise ValueError("curve form has a repeated factor")
    except SplitRequest:
        raise ValueError("curve reducedness is not uniform over the declared "
                         "extension; split the modulus first")


# -- local expansions --------------------------------------------------------

_CHART_COLUMNS = {2: ((1, 0, 0), (0, 1, 0)),
                  1: ((1, 0, 0), (0, 0, 1)),
                  0: ((0, 1, 0), (0, 0, 1))}


def chart_matrix(point):
    """Unimodular matrix with third column the point, first two columns the
    unit vectors of the non-pivot variables."""
    ctx = point.ctx
    c1, c2 = _CHART_COLUMNS[point.pivot]
    cols = [tuple(ctx.from_int(v) for v in c1),
            tuple(ctx.from_int(v) for v in c2),
            point.coords]
    return tuple(tuple(cols[c][r] for c in range(3)) for r in range(3))


def local_equation(curve, point, M=None):
    """F(M(x, y, 1)) as a bivariate dict {(e_x, e_y): coeff}; M defaults to
    the chart matrix, which maps [0:0:1] to the point."""
    ctx = point.ctx
    F = curve.form_in(ctx)
    if M is None:
        M = chart_matrix(point)
    return substitute_linear(F, M).dehomogenize(2)


def lowest_form(fdict, ctx):
    """(multiplicity, lowest certified-nonzero homogeneous part).  May raise
    SplitRequest while certifying coefficients."""
    for m in sorted({k[0] + k[1] for k in fdict}):
        nonzero = {}
        for k in sorted(k for k in fdict if k[0] + k[1] == m):
            if not ctx.decide_zero(fdict[k]):
                nonzero[k] = fdict[k]
        if nonzero:
            return m, nonzero
    raise ValueError("identically zero local equation")


def multiplicity_cases(curve, point):
    """[(leaf_ctx, multiplicity)]; 0 when the point is off the curve."""

    def compute(c):
        pt = point.reduce_to(c)
        f = local_equation(curve, pt)
        m, _ = lowest_form(f, c)
        return m

    return run_split(point.ctx, compute)


def multiplicity(curve, point):
    """Uniform multiplicity; raises ValueError on a mixed cluster."""
    values = {v for _, v in multiplicity_cases(curve, point)}
    if len(values) != 1:
        raise ValueError("multiplicity differs across the cluster: %s"
                         % sorted(values))
    return values.pop()


def tangent_cone_cases(curve, point):
    """[(leaf_ctx, {(e_x, e_y): coeff})]: lowest homogeneous part of the
    local equation in the chart centered at the point."""

    def compute(c):
        pt = point.reduce_to(c)
        m, cone = lowest_form(local_equation(curve, pt), c)
        if m == 0:
            raise ValueError("tangent cone of a point off the curve")
        return cone

    return run_split(point.ctx, compute)


def on_curve_cases(curve, point):
    def compute(c):
        pt = point.reduce_to(c)
        return c.decide_zero(curve.form_in(c).eval(pt.coords))

    return run_split(point.ctx, compute)


# -- line sections -----------------------------------------------------------

class LineSection:
    """One cluster of a curve-line section: the point cluster and its
    intersection number along the line."""

    __slots__ = ("point", "imult", "at_p1")

    def __init__(self, point, imult, at_p1=False):
        self.point = point
        self.imult = imult
        self.at_p1 = at_p1


def intersect_with_line(curve, line):
    """Clusters of curve ∩ line with intersection numbers; the weighted sum
    is asserted equal to the degree (Bezout on a line)."""
    ctx = line.ctx
    F = curve.form_in(ctx)
    p1, p2 = line.spanning_points()
    rest = F.restrict_to_line(p1, p2)
    if rest.is_zero():
        raise ValueError("the line is a component of the curve")
    out = []
    total = 0
    deg_drop = curve.d - rest.degree()
    if deg_drop > 0:
        for leaf, pt in normalize_point_cases(ctx, p1):
            out.append(LineSection(pt, deg_drop, at_p1=True))
            total += deg_drop * leaf.degree
    for leaf, dec in run_split(ctx, lambda c: squarefree_decomposition(
            rest if c is ctx else
            rest.map_coeffs(lambda e: e.reduce_to(c), c))):
        for g, mult in dec:
            for ctx2, u0 in adjoin_root(leaf, g):
                coords = tuple(ctx2.embed(a) * u0 + ctx2.embed(b)
                               for a, b in zip(p1, p2))
                for ctx3, pt in normalize_point_cases(ctx2, coords):
                    out.append(LineSection(pt, mult))
                    total += mult * ctx3.degree
    if total != curve.d * ctx.degree:
        raise AssertionError("Bezout on a line failed: %d != %d"
                             % (total, curve.d * ctx.degree))
    return out


def intersection_number_with_line(curve, line, point):
    """i_point(curve, line) as the certified valuation of F along a linear
    parametrization of the line centered at the point."""
    ctx = point.ctx
    F = curve.form_in(ctx)
    lin = line.embed_into(ctx)
    if not ctx.decide_zero(lin.eval_point(point)):
        raise ValueError("the point is not on the line")
    q = None
    for cand in lin.spanning_points():
        if any(not ctx.decide_zero(c) for c in cross(cand, point.coords)):
            q = cand
            break
    if q is None:
        raise ValueError("degenerate line parametrization")
    rest = F.restrict_to_line(q, point.coords)
    for e in range(len(rest.c)):
        if not ctx.decide_zero(rest.c[e]):
            return e
    raise ValueError("the line is a component of the curve")


def contact_number(curve, line, point):
    """i - mu at the point when it lies on both curve and line, else 0."""
    ctx = point.ctx
    lin = line.embed_into(ctx)
    if not ctx.decide_zero(lin.eval_point(point)):
        return 0
    if not ctx.decide_zero(curve.form_in(ctx).eval(point.coords)):
        return 0
    i = intersection_number_with_line(curve, lin, point)
    mu = multiplicity(curve, point)
    omega = i - mu
    if omega < 0:
        raise AssertionError("negative contact number")
    return omega


# -- zero-dimensional solving -------------------------------------------------

def _bivariate_cols(fdict, ctx):
    """{(e_x, e_y): coeff} -> UniPoly in y over Poly(ctx)[x]."""
    pdom = PolyDomain(ctx)
    maxy = max((k[1] for k in fdict), default=-1)
    cols = []
    for ey in range(maxy + 1):
        row = {ex: c for (ex, ey2), c in fdict.items() if ey2 == ey}
        n = max(row) + 1 if row else 0
        cols.append(UniPoly(ctx, [row.get(e, ctx.zero) for e in range(n)]))
    return UniPoly(pdom, cols)


def _eval_x(fdict, ctx, x0):
    """Specialize a bivariate dict at x = x0: a UniPoly in y over ctx."""
    maxy = max((k[1] for k in fdict), default=-1)
    out = [ctx.zero] * (maxy + 1)
    pows = {0: ctx.one}

    def powof(e):
        got = pows.get(e)
        if got is None:
            got = powof(e - 1) * x0
            pows[e] = got
        return got

    for (ex, ey), c in fdict.items():
        out[ey] = out[ey] + ctx.embed(c) * powof(ex)
    return UniPoly(ctx, out)


def solve_affine_system(fdicts, ctx):
    """Common zeros in the chart of >= 2 bivariate polynomials over ctx:
    [(leaf_ctx, (x0, y0))].  Complete for zero-dimensional systems; spurious
    resultant roots are filtered by direct verification downstream."""
    polys = [f for f in fdicts if f]
    if len(polys) < 2:
        raise ValueError("need at least two nonzero equations")
    bivs = [_bivariate_cols(f, ctx) for f in polys]
    rx = None
    for f in bivs:
        if f.degree() == 0:
            rx = f.c[0] if rx is None else gcd_field(rx, f.c[0])
    for a in range(len(bivs)):
        if rx is not None and rx.degree() == 0:
            break
        for b in range(a + 1, len(bivs)):
            fa, fb = bivs[a], bivs[b]
            if fa.degree() < 1 or fb.degree() < 1:
                continue
            r = resultant(fa, fb)
            if not r.is_zero():
                rx = r if rx is None else gcd_field(rx, r)
                if rx.degree() == 0:
                    break
    if rx is None:
        raise ValueError("system looks positive-dimensional in this chart")
    if rx.degree() == 0:
        return []
    out = []
    for leaf, sq in run_split(ctx, lambda c: squarefree_part(
            rx if c is ctx else rx.map_coeffs(lambda e: e.reduce_to(c), c))):
        for ctx1, x0 in adjoin_root(leaf, sq):

            def fiber(c):
                xx = x0 if x0.ctx is c else x0.reduce_to(c)
                g = None
                for f in polys:
                    u = _eval_x(f, c, xx)
                    g = u if g is None else gcd_field(g, u)
                    if not g.is_zero() and g.degree() == 0:
                        return []
                if g.is_zero():
                    raise ValueError("positive-dimensional fiber over a root")
                if g.degree() == 0:
                    return []
                sols = []
                for ctx2, y0 in adjoin_root(c, g):
                    sols.append((ctx2, (ctx2.embed(xx), y0)))
                return sols

            for _leaf2, sols in run_split(ctx1, fiber):
                out.extend(sols)
    return out


def _restrict_infinity(p, ctx):
    """p(x, 1, 0) as a UniPoly over ctx."""
    out = {}
    for (a, b, c), v in p.terms.items():
        if c == 0:
            out[a] = out.get(a, ctx.zero) + v
    n = max(out) + 1 if out else 0
    return UniPoly(ctx, [out.get(e, ctx.zero) for e in range(n)])


def _verified_points(ctx, coords, verify_forms):
    """Normalize candidate coordinates, keep cases where every form
    vanishes, and return them as PointClusters."""
    out = []
    for leaf, pt in normalize_point_cases(ctx, coords):

        def good(c):
            p = pt.reduce_to(c)
            for form in verify_forms:
                if not c.decide_zero(form.embed_into(c).eval(p.coords)):
                    return False
            return True

        for leaf2, ok in run_split(leaf, good):
            if ok:
                out.append(PointCluster(pt.reduce_to(leaf2)))
    return out


def common_zero_clusters(forms, ctx):
    """Clusters of the common zeros of >= 2 independent forms over ctx,
    across all three charts (z = 1, then the z = 0 line, then [1:0:0])."""
    out = []
    aff = [p.dehomogenize(2) for p in forms]
    aff = [f for f in aff if f]
    if len(aff) >= 2:
        for ctx2, (x0, y0) in solve_affine_system(aff, ctx):
            out.extend(_verified_points(ctx2, (x0, y0, ctx2.one), forms))
    elif aff:
        raise ValueError("affine system underdetermined")
    uni = [_restrict_infinity(p, ctx) for p in forms]
    g = None
    for u in uni:
        g = u if g is None else gcd_field(g, u)
    if g is not None and g.is_zero():
        raise ValueError("the line at infinity solves the whole system")
    if g is not None and g.degree() > 0:
        for leaf, sq in run_split(ctx, lambda c: squarefree_part(
                g if c is ctx else
                g.map_coeffs(lambda e: e.reduce_to(c), c))):
            for ctx2, x0 in adjoin_root(leaf, sq):
                out.extend(_verified_points(ctx2, (x0, ctx2.one, ctx2.zero),
                                            forms))
    vals = [p.eval((ctx.one, ctx.zero, ctx.zero)) for p in forms]

    def corner(c):
        return all(c.decide_zero(v if v.ctx is c else v.reduce_to(c))
                   for v in vals)

    for leaf, ok in run_split(ctx, corner):
        if ok:
            out.extend(_verified_points(leaf, (leaf.one, leaf.zero,
                                               leaf.zero), forms))
    return out


def singular_points(curve, base_ctx=None):
    """Clusters of the singular locus, annotated with their uniform
    multiplicities."""
    ctx = base_ctx or curve.ctx
    cached = curve._singular_cache.get(ctx.uid)
    if cached is not None:
        return cached
    F = curve.form_in(ctx)
    partials = [F.partial(0), F.partial(1), F.partial(2)]
    clusters = []
    for cl in common_zero_clusters(partials, ctx):
        for leaf, mu in multiplicity_cases(curve, cl.point):
            if mu >= 2:
                clusters.append(PointCluster(cl.point.reduce_to(leaf),
                                             multiplicity=mu))
            else:
                raise AssertionError("partials vanish at a smooth point")
    curve._singular_cache[ctx.uid] = clusters
    return clusters


# -- normalization matrices ----------------------------------------------------

def normalization_matrix_cases(curve, point):
    """[(leaf_ctx, (M, mu))] with M unimodular, M([0:0:1]) = point, and the
    tangent cone of F∘M at the origin not containing V(x); certified by the
    y^mu coefficient of the lowest form."""

    def attempt(c):
        pt = point.reduce_to(c)
        base = chart_matrix(pt)
        for s in range(0, curve.d + 2):
            shear = mat_from_int(c, [[1, s, 0], [0, 1, 0], [0, 0, 1]])
            M = mat_mul(base, shear) if s else base
            f = local_equation(curve, pt, M)
            mu, cone = lowest_form(f, c)
            if mu == 0:
                raise ValueError("normalizing at a point off the curve")
            if (0, mu) in cone:
                return M, mu
        raise RuntimeError("no shear avoiding the tangent cone")

    return run_split(point.ctx, attempt)
