"""Newton-Puiseux expansions, branches, valuations and the quantities built
on them: branch-curve intersection numbers, the pairwise-difference
intersection formula, characteristic exponents, the per-point valuation
ledger and the two-path dual degree.

A branch at a normalized point is stored through one representative
parametrization x = lam * t^e, y = Y(t); the e conjugate probranches are
never materialized.  Sums over conjugates fall out of two facts: rotating
t by an e-th root of unity preserves every valuation read here, and the
conjugate-symmetric functions needed for cross-branch work (power sums of
the probranches) are plain exponent bookkeeping on the representative.
"""

from __future__ import annotations

import random
from math import gcd

from .context import NeedMoreTerms, adjoin_root, run_split
from .curve import (local_equation, lowest_form, normalization_matrix_cases,
                    singular_points, chart_matrix)
from .gaussian import GaussianRational
from .series import INF, TSeries, eval_bipoly
from .tripoly import mat_from_int, mat_inv, mat_mul, substitute_linear
from .upoly import UniPoly

MAX_ORDER_FACTOR = 64


class Branch:
    """One cluster of conjugate branches: x = lam * t^e, y = Y(t) over ctx,
    which refines the ambient point-cluster context."""

    __slots__ = ("ctx", "e", "lam", "yser")

    def __init__(self, ctx, e, lam, yser):
        self.ctx = ctx
        self.e = e
        self.lam = lam
        self.yser = yser

    def x_series(self):
        return TSeries.monomial(self.ctx, self.lam, self.e)

    def embed_into(self, ctx):
        if ctx is self.ctx:
            return self
        yser = TSeries(ctx, {e: ctx.embed(c)
                             for e, c in self.yser.coeffs.items()},
                       self.yser.trunc)
        return Branch(ctx, self.e, ctx.embed(self.lam), yser)

    def reduce_to(self, ctx):
        if ctx is self.ctx:
            return self
        yser = TSeries(ctx, {e: c.reduce_to(ctx)
                             for e, c in self.yser.coeffs.items()},
                       self.yser.trunc)
        return Branch(ctx, self.e, self.lam.reduce_to(ctx), yser)

    def __repr__(self):
        return "Branch(e=%d, lam deg %d ctx, %s)" % (self.e, self.ctx.degree,
                                                     self.yser)


class BranchCase:
    """Branches of a curve at one refined point cluster, with the
    normalization matrix and the local equation they share."""

    __slots__ = ("ctx", "point", "M", "mu", "branches", "fdict", "t_order")

    def __init__(self, ctx, point, M, mu, branches, fdict, t_order):
        self.ctx = ctx
        self.point = point
        self.M = M
        self.mu = mu
        self.branches = branches
        self.fdict = fdict
        self.t_order = t_order


def _reduce_fdict(f, ctx):
    return {k: (v if v.ctx is ctx else v.reduce_to(ctx))
            for k, v in f.items()}


def _embed_fdict(f, ctx):
    return {k: ctx.embed(v) for k, v in f.items()}


def _reduce_matrix(M, ctx):
    return tuple(tuple(v if v.ctx is ctx else v.reduce_to(ctx) for v in row)
                 for row in M)


def _embed_matrix(M, ctx):
    return tuple(tuple(ctx.embed(v) for v in row) for row in M)


# -- Newton polygon ----------------------------------------------------------

def _certified_hull(f, ctx):
    """Certified support and the strictly descending lower Newton-polygon
    sides.  Coefficients sitting on the hull are zero-tested; decidedly zero
    vertices are dropped and the hull recomputed (splits propagate)."""
    alive = dict(f)
    while True:
        pts = {}
        for (ex, ey) in alive:
            if ey not in pts or ex < pts[ey]:
                pts[ey] = ex
        hull = _lower_hull(sorted(pts.items()))
        bad = None
        for i, j in hull:
            if ctx.decide_zero(alive[(j, i)]):
                bad = (j, i)
                break
        if bad is None:
            return alive, _hull_sides(hull, alive)
        del alive[bad]


def _lower_hull(points):
    """Lower convex hull of (i, min_j) pairs, i ascending."""
    hull = []
    for i, j in points:
        while len(hull) >= 2:
            (i1, j1), (i2, j2) = hull[-2], hull[-1]
            if (j2 - j1) * (i - i1) >= (j - j1) * (i2 - i1):
                hull.pop()
            else:
                break
        hull.append((i, j))
    return hull


def _hull_sides(hull, alive):
    """(ia, ja, ib, jb, m, n, points-on-side) per descending side; the side
    slope is n/m in lowest terms."""
    sides = []
    for (ia, ja), (ib, jb) in zip(hull, hull[1:]):
        if jb >= ja:
            break
        di, dj = ib - ia, ja - jb
        g = gcd(di, dj)
        m, n = di // g, dj // g
        pts = [(ey, ex, v) for (ex, ey), v in alive.items()
               if ia <= ey <= ib and n * (ey - ia) == m * (ja - ex)]
        sides.append((ia, ja, ib, jb, m, n, pts))
    return sides


def _bezout_mn(m, n):
    """(u, v) with u*m - v*n == 1, so that the transformed leading
    coefficient satisfies c^m = xi with xi a root of the side polynomial."""
    old_r, r = m, n
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    assert old_r == 1, "side slope not in lowest terms"
    return old_u, -old_v


def _pow_signed(ctx, base, k):
    if k >= 0:
        return base ** k
    return ctx.invert(base) ** (-k)


def _transform_side(f, ctx, m, n, xi, ell, x_cap):
    """f(xi^v * x^m, x^n * (xi^u + y)) / x^ell, truncated in x at x_cap."""
    u, v = _bezout_mn(m, n)
    xi_u = _pow_signed(ctx, xi, u)
    out = {}
    binom_cache = {}

    def binom(nn, kk):
        got = binom_cache.get((nn, kk))
        if got is None:
            got = 1
            for a in range(kk):
                got = got * (nn - a) // (a + 1)
            binom_cache[(nn, kk)] = got
        return got

    xi_u_pows = {0: ctx.one}

    def xiu(k):
        got = xi_u_pows.get(k)
        if got is None:
            got = xiu(k - 1) * xi_u
            xi_u_pows[k] = got
        return got

    for (ex, ey), coeff in f.items():
        base_x = m * ex + n * ey - ell
        if base_x >= x_cap:
            continue
        scaled = coeff * _pow_signed(ctx, xi, v * ex) if ex else coeff
        for r in range(ey + 1):
            term = scaled * xiu(ey - r)
            b = binom(ey, r)
            if b != 1:
                term = term * b
            key = (base_x, r)
            got = out.get(key)
            out[key] = term if got is None else got + term
    return {k: v for k, v in out.items() if not v.is_zero()}


def _series_inverse(s, ctx, order):
    """Inverse of a series with a certified-unit constant term."""
    c0inv = ctx.invert(s.coeff(0))
    coeffs = {0: c0inv}
    smax = min(order, s.trunc)
    for k in range(1, smax):
        acc = None
        for j in range(1, k + 1):
            sj = s.coeff(j)
            if sj.is_zero():
                continue
            rk = coeffs.get(k - j)
            if rk is None:
                continue
            acc = sj * rk if acc is None else acc + sj * rk
        if acc is not None:
            ck = -(c0inv * acc)
            if not ck.is_zero():
                coeffs[k] = ck
    return TSeries(ctx, coeffs, smax)


def _hensel_series(f, ctx, order):
    """The unique series solution y(x), y(0) = 0, of a local equation that
    is regular in y at the origin (f(0,0) = 0, f_y(0,0) a unit)."""
    xs = TSeries.monomial(ctx, ctx.one, 1)
    fy = {}
    for (ex, ey), v in f.items():
        if ey >= 1:
            fy[(ex, ey - 1)] = v * ey
    y = TSeries.zero(ctx, 1)
    prec = 1
    while prec < order:
        prec = min(2 * prec, order)
        yv = TSeries(ctx, y.coeffs, prec)
        val = eval_bipoly(f, xs, yv, ctx).truncate(prec)
        der = eval_bipoly(fy, xs, yv, ctx).truncate(prec)
        corr = val * _series_inverse(der, ctx, prec)
        y = (yv - corr).truncate(prec)
    return TSeries(ctx, y.coeffs, order)


def _expand(f, ctx, t_order, depth=0):
    """Branches at the origin of a local equation: [(leaf_ctx, Branch)].
    Requires x not dividing f (an axis branch would have been removed by
    the normalization) and f reduced."""
    if depth > 64:
        raise RuntimeError("Newton-Puiseux recursion too deep")
    f = {k: v for k, v in f.items() if not v.is_zero()}
    if not f:
        raise ValueError("zero local equation in branch expansion")
    out = []

    def work(c):
        fc = _reduce_fdict(f, c) if c is not ctx else dict(f)
        res = []
        c00 = fc.pop((0, 0), None)
        if c00 is not None and not c.decide_zero(c00):
            return res  # does not pass through the origin on this limb
        if not fc:
            raise ValueError("zero local equation in branch expansion")
        if all(k[1] >= 1 for k in fc):
            # y divides f: the branch y = 0 is exact
            res.append((c, Branch(c, 1, c.one, TSeries.zero(c, INF))))
            reduced = {(ex, ey - 1): v for (ex, ey), v in fc.items()}
            res.extend(_expand(reduced, c, t_order, depth + 1))
            return res
        c01 = fc.get((0, 1))
        if c01 is not None and not c.decide_zero(c01):
            res.append((c, Branch(c, 1, c.one,
                                  _hensel_series(fc, c, t_order))))
            return res
        alive, sides = _certified_hull(fc, c)
        for (ia, ja, ib, jb, m, n, pts) in sides:
            phi_c = {(i - ia) // m: v for (i, j, v) in pts}
            dmax = max(phi_c)
            phi = UniPoly(c, [phi_c.get(k, c.zero) for k in range(dmax + 1)])
            ell = m * ja + n * ia
            for ctx2, xi in adjoin_root(c, phi):
                f2 = _transform_side(
                    _embed_fdict(alive, ctx2) if ctx2 is not c else
                    dict(alive), ctx2, m, n, xi, ell, t_order + 1)
                u, v = _bezout_mn(m, n)
                for leaf, sub in _expand(f2, ctx2, t_order, depth + 1):
                    xi_l = xi if xi.ctx is leaf else leaf.embed(xi)
                    e = m * sub.e
                    lam = _pow_signed(leaf, xi_l, v) * sub.lam ** m
                    lead = _pow_signed(leaf, xi_l, u)
                    inner = TSeries.monomial(leaf, lead, 0) + sub.yser
                    yser = (inner * TSeries.monomial(
                        leaf, sub.lam ** n, n * sub.e)).truncate(t_order)
                    res.append((leaf, Branch(leaf, e, lam, yser)))
        return res

    for _leaf, items in run_split(ctx, work):
        out.extend(items)
    return out


def branch_cases(curve, point, t_order=None):
    """Branches of the curve at a point cluster: [BranchCase], one per
    refined (context, normalization) case; sum(e * degree) is checked
    against mu * degree."""
    if t_order is None:
        t_order = 2 * curve.d
    cases = []
    for leaf, (M, mu) in normalization_matrix_cases(curve, point):
        pt = point.reduce_to(leaf)
        f = local_equation(curve, pt, M)

        def work(c, f=f, leaf=leaf):
            return _expand(_reduce_fdict(f, c) if c is not leaf else f,
                           c, t_order)

        for leaf2, items in run_split(leaf, work):
            branches = [br for _, br in items]
            total = sum(br.e * br.ctx.degree for br in branches)
            if total != mu * leaf2.degree:
                raise AssertionError(
                    "branch multiplicities %d != point multiplicity "
                    "%d * %d" % (total, mu, leaf2.degree))
            cases.append(BranchCase(leaf2, pt.reduce_to(leaf2),
                                    _reduce_matrix(M, leaf2), mu, branches,
                                    _reduce_fdict(f, leaf2), t_order))
    return cases


def with_truncation_retry(curve, compute, initial=None):
    """Run compute(t_order), doubling the order on NeedMoreTerms up to the
    hard cap."""
    order = initial or 2 * curve.d
    cap = MAX_ORDER_FACTOR * curve.d
    while True:
        try:
            return compute(order)
        except NeedMoreTerms:
            if order >= cap:
                raise
            order = min(2 * order, cap)


def branch_value_cases(branch, fn):
    """Evaluate fn(branch, leaf_ctx) under the splitting driver for the
    branch context: [(leaf_ctx, value)]."""
    return run_split(branch.ctx, lambda c: fn(branch.reduce_to(c), c))


def residual_valuation(case, branch):
    """Valuation bound check data for f(x(t), y(t)): (valuation-or-None,
    truncation)."""
    fx = eval_bipoly(_embed_fdict(case.fdict, branch.ctx)
                     if case.ctx is not branch.ctx else case.fdict,
                     branch.x_series(), branch.yser, branch.ctx)
    return fx.valuation_or_none(), fx.trunc


def branch_poly_valuation(branch, G, M):
    """val_t of the form G pulled back through M along the branch: the
    intersection number of the branch cluster with V(G), summed over the
    conjugate probranches."""
    ctx = branch.ctx
    GM = substitute_linear(G.embed_into(ctx), _embed_matrix(M, ctx))
    s = eval_bipoly(GM.dehomogenize(2), branch.x_series(), branch.yser, ctx)
    if s.is_syntactically_zero() and s.is_exact():
        raise ValueError("the form vanishes along the branch")
    return s.valuation()


def branch_line_valuation(branch, line, M):
    """val_t of a line form along the branch (i(B, line))."""
    ctx = branch.ctx
    a, b, c = (ctx.embed(v) for v in line.coeffs)
    Me = _embed_matrix(M, ctx)
    loc = tuple(a * Me[0][k] + b * Me[1][k] + c * Me[2][k] for k in range(3))
    s = (branch.x_series().scale(loc[0]) + branch.yser.scale(loc[1])
         + TSeries.monomial(ctx, loc[2], 0))
    if s.is_syntactically_zero() and s.is_exact():
        raise ValueError("the branch lies on the line")
    return s.valuation()


def branch_tangent_local(branch):
    """(c,) the local tangent slope: the branch tangent is y = c*x."""
    ctx = branch.ctx
    v = branch.yser.valuation_or_none()
    if v is None:
        if branch.yser.is_exact():
            return ctx.zero
        if branch.yser.trunc <= branch.e:
            raise NeedMoreTerms(branch.e + 1)
        return ctx.zero
    if v < branch.e:
        raise AssertionError("branch valuation below 1 after normalization")
    if v > branch.e:
        return ctx.zero
    return branch.yser.coeff(branch.e) * ctx.invert(branch.lam)


def branch_tangent_line(branch, M):
    """The branch tangent as a global Line over branch.ctx.  Zero tests on
    the raw coefficients may raise SplitRequest; run under
    branch_value_cases when the cluster might be mixed."""
    from .curve import Line
    ctx = branch.ctx
    c = branch_tangent_local(branch)
    Mi = mat_inv(_embed_matrix(M, ctx), ctx)
    loc = (-c, ctx.one, ctx.zero)
    glob = tuple(loc[0] * Mi[0][k] + loc[1] * Mi[1][k] + loc[2] * Mi[2][k]
                 for k in range(3))
    for idx in (2, 1, 0):
        if not ctx.decide_zero(glob[idx]):
            inv = ctx.invert(glob[idx])
            return Line(ctx, tuple(v * inv for v in glob), idx)
    raise AssertionError("zero tangent line coefficients")


def branch_tangent_contact(branch):
    """i(B, T_B) in t-units: valuation of y(t) - c*lam*t^e."""
    ctx = branch.ctx
    c = branch_tangent_local(branch)
    s = branch.yser - TSeries.monomial(ctx, c * branch.lam, branch.e)
    v = s.valuation_or_none()
    if v is None:
        if s.is_exact():
            raise ValueError("the branch lies on its tangent line")
        raise NeedMoreTerms(s.trunc)
    return v


def first_char_exponent(branch, bound=None):
    """Smallest certified t-exponent of the series not divisible by the
    ramification index; None if there is none below the bound (default: the
    series truncation)."""
    ctx = branch.ctx
    e = branch.e
    if e == 1:
        return None
    limit = branch.yser.trunc if bound is None else min(bound,
                                                        branch.yser.trunc)
    for k in sorted(branch.yser.coeffs):
        if k >= limit:
            break
        if k % e and not ctx.decide_zero(branch.yser.coeffs[k]):
            return k
    if bound is not None and bound > branch.yser.trunc:
        raise NeedMoreTerms(bound)
    return None


def v_value(case, branch):
    """val_t of f_y along the branch: the sum, over this branch cluster's
    probranches, of the valuations of the differences with every other
    probranch at the point.  May raise SplitRequest for the branch context;
    run under branch_value_cases when the cluster might be mixed."""
    fy = {}
    for (ex, ey), v in case.fdict.items():
        if ey >= 1:
            fy[(ex, ey - 1)] = v * ey
    fyr = _embed_fdict(fy, branch.ctx) if branch.ctx is not case.ctx else fy
    return eval_bipoly(fyr, branch.x_series(), branch.yser,
                       branch.ctx).valuation()


class ValuationLedger:
    """Per-branch difference valuations at one point case; total is the
    integer V contribution per specialization of the case context."""

    __slots__ = ("case", "entries", "total")

    def __init__(self, case, entries):
        self.case = case
        self.entries = entries
        scaled = sum(v * leaf.degree for leaf, _br, v in entries)
        q, r = divmod(scaled, case.ctx.degree)
        if r:
            raise AssertionError("non-integral valuation ledger total")
        self.total = q


def v_ledger_cases(curve, point, t_order=None):
    """ValuationLedgers over the refined cases of the point cluster."""

    def compute(order):
        out = []
        for case in branch_cases(curve, point, order):
            entries = []
            for br in case.branches:
                for leaf, v in branch_value_cases(
                        br, lambda b, c, case=case: v_value(case, b)):
                    entries.append((leaf, br, v))
            out.append(ValuationLedger(case, entries))
        return out

    return with_truncation_retry(curve, compute, t_order)


# -- pairwise-difference intersection numbers ---------------------------------

def joint_normalization_cases(curve_a, curve_b, point):
    """Normalization matrices valid for both curves at the point: neither
    transformed tangent cone may contain V(x)."""
    from .curve import chart_matrix as _chart

    def attempt(c):
        pt = point.reduce_to(c)
        base = _chart(pt)
        for s in range(0, curve_a.d + curve_b.d + 2):
            shear = mat_from_int(c, [[1, s, 0], [0, 1, 0], [0, 0, 1]])
            M = mat_mul(base, shear) if s else base
            mus = []
            ok = True
            for curve in (curve_a, curve_b):
                fd = local_equation(curve, pt, M)
                mu, cone = lowest_form(fd, c)
                if (0, mu) not in cone:
                    ok = False
                    break
                mus.append(mu)
            if ok:
                return M, tuple(mus)
        raise RuntimeError("no shear valid for both curves")

    return run_split(point.ctx, attempt)


def _compose_x(series, lam, e, ctx):
    """Substitute x = lam * t^e into a series with integer x-exponents."""
    lam_pows = {0: ctx.one}

    def lpow(k):
        got = lam_pows.get(k)
        if got is None:
            got = lpow(k - 1) * lam
            lam_pows[k] = got
        return got

    coeffs = {k * e: v * lpow(k) for k, v in series.coeffs.items()}
    return TSeries(ctx, coeffs, series.trunc * e)


def weierstrass_factor(branch):
    """Truncated Weierstrass factor of the branch: the y^j coefficients
    (series in x) of prod over conjugate probranches of (y - g_j(x)),
    computed from power sums by exponent bookkeeping."""
    ctx = branch.ctx
    e = branch.e
    psums = []
    ypow = TSeries.one(ctx)
    for r in range(1, e + 1):
        ypow = ypow * branch.yser
        coeffs = {}
        for k, v in ypow.coeffs.items():
            if k % e == 0:
                kk = k // e
                coeffs[kk] = v * e * _pow_signed(ctx, branch.lam, -kk)
        psums.append(TSeries(ctx, coeffs, max(ypow.trunc // e, 1)))
    elem = [TSeries.one(ctx)]
    for k in range(1, e + 1):
        acc = TSeries.zero(ctx)
        for r in range(1, k + 1):
            term = elem[k - r] * psums[r - 1]
            acc = acc + (term if r % 2 == 1 else -term)
        elem.append(acc.scale(ctx.from_qi(GaussianRational(1, 0, k))))
    return [(elem[e - j] if (e - j) % 2 == 0 else -elem[e - j])
            for j in range(e + 1)]


def pair_valuation_sum(branch_a, factor_cols_b):
    """Sum over probranch pairs (i of A, j of B) of val_x(g_i - g'_j),
    returned in integer t_A-units: val_t of B's factor along A."""
    ctx = branch_a.ctx
    acc = TSeries.zero(ctx)
    ypow = TSeries.one(ctx)
    for j, col in enumerate(factor_cols_b):
        colc = col if col.ctx is ctx else TSeries(
            ctx, {e: ctx.embed(v) for e, v in col.coeffs.items()}, col.trunc)
        acc = acc + _compose_x(colc, branch_a.lam, branch_a.e, ctx) * ypow
        if j < len(factor_cols_b) - 1:
            ypow = ypow * branch_a.yser
    return acc.valuation()


def intersection_number_cases(curve_a, curve_b, point, t_order=None):
    """i_point(curve_a, curve_b) as the pairwise probranch-difference sum:
    [(case_ctx, integer)].  The second curve's branches are expanded over
    each branch context of the first, so conjugate pairs stay aligned."""
    base_order = t_order or 2 * (curve_a.d + curve_b.d)

    def compute(order):
        out = []
        for leaf, (M, _mus) in joint_normalization_cases(curve_a, curve_b,
                                                         point):
            pt = point.reduce_to(leaf)
            fa = local_equation(curve_a, pt, M)
            fb = local_equation(curve_b, pt, M)

            def work(c, fa=fa, fb=fb, leaf=leaf):
                total = 0
                for leaf_a, br_a in _expand(
                        _reduce_fdict(fa, c) if c is not leaf else fa,
                        c, order):
                    fb_a = _embed_fdict(fb, leaf_a)
                    for leaf_b, br_b in _expand(fb_a, leaf_a, order):

                        def pairval(bb, cc, br_a=br_a):
                            ba = br_a.embed_into(cc)
                            return pair_valuation_sum(
                                ba, weierstrass_factor(bb))

                        for leaf2, v in branch_value_cases(br_b, pairval):
                            total += v * leaf2.degree
                q, r = divmod(total, c.degree)
                if r:
                    raise AssertionError("non-integral intersection number")
                return q

            out.extend(run_split(leaf, work))
        return out

    return with_truncation_retry(curve_a, compute, base_order)


def intersection_number(curve_a, curve_b, point, t_order=None):
    """Uniform i_point(curve_a, curve_b); raises on a mixed cluster."""
    cases = intersection_number_cases(curve_a, curve_b, point, t_order)
    values = {v for _, v in cases}
    if len(values) != 1:
        raise ValueError("intersection number differs across the cluster")
    return values.pop()


# -- dual degree --------------------------------------------------------------

def dual_degree(curve, rng=None, retries=6):
    """Class of the curve, by two routes that must agree: the generic-polar
    route d(d-1) - sum over singular clusters of i(C, polar), with two
    independent random polar directions, and the valuation-ledger route
    d(d-1) - sum of V."""
    if curve.dual_degree_cache is not None:
        return curve.dual_degree_cache
    if curve.d < 2:
        raise ValueError("dual degree needs degree >= 2")
    rng = rng or random.Random(0xD0A1)
    ctx = curve.ctx
    sing = singular_points(curve)

    def compute(order):
        all_cases = [branch_cases(curve, cl.point, order) for cl in sing]
        v_total = 0
        for cases in all_cases:
            for case in cases:
                for br in case.branches:
                    for leaf, v in branch_value_cases(
                            br, lambda b, c, case=case: v_value(case, b)):
                        v_total += v * leaf.degree
        q, r = divmod(v_total, ctx.degree)
        if r:
            raise AssertionError("non-integral total valuation ledger")
        ledger_value = curve.d * (curve.d - 1) - q
        polar_values = []
        for _attempt in range(retries):
            a = tuple(ctx.from_qi(GaussianRational(
                rng.randint(-2 ** 16, 2 ** 16),
                rng.randint(-2 ** 16, 2 ** 16))) for _ in range(3))
            polar = curve.form_in(ctx).polar(a)
            if polar.is_zero():
                continue
            total = 0
            for cases in all_cases:
                for case in cases:
                    for br in case.branches:
                        for leaf, v in branch_value_cases(
                                br, lambda b, c, case=case:
                                branch_poly_valuation(b, polar, case.M)):
                            total += v * leaf.degree
            qq, rr = divmod(total, ctx.degree)
            if rr:
                raise AssertionError("non-integral polar valuation total")
            polar_values.append(curve.d * (curve.d - 1) - qq)
            if len(polar_values) == 2:
                break
        if len(polar_values) < 2:
            raise RuntimeError("could not certify a generic polar direction")
        if not (polar_values[0] == polar_values[1] == ledger_value):
            raise AssertionError("dual-degree paths disagree: polar %s vs "
                                 "ledger %d" % (polar_values, ledger_value))
        return ledger_value

    value = with_truncation_retry(curve, compute)
    curve.dual_degree_cache = value
    return value
