"""Truncated Laurent series in the branch parameter t over a context.

A TSeries knows its coefficients for every exponent < trunc; everything at
or beyond trunc is unknown.  Exponents may be negative (they appear in
intermediate reflected-map computations).  Series coming from honest
polynomials are exact and carry the INF truncation sentinel.  Every
quantity read off a series is a valuation, obtained through the
splitting-aware zero test on coefficients; a valuation that cannot be
certified below the truncation raises NeedMoreTerms, which callers
translate into a retry at a higher order.
"""

from __future__ import annotations

from .context import NeedMoreTerms

INF = 10 ** 9


class TSeries:
    __slots__ = ("ctx", "coeffs", "trunc")

    def __init__(self, ctx, coeffs, trunc):
        self.ctx = ctx
        self.coeffs = {e: c for e, c in coeffs.items()
                       if e < trunc and not c.is_zero()}
        self.trunc = min(trunc, INF)

    @classmethod
    def zero(cls, ctx, trunc=INF):
        return cls(ctx, {}, trunc)

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {0: ctx.one}, INF)

    @classmethod
    def monomial(cls, ctx, coeff, exp, trunc=INF):
        return cls(ctx, {exp: coeff}, trunc)

    def is_exact(self):
        return self.trunc >= INF // 2

    def support_min(self):
        """Smallest exponent with a syntactically nonzero coefficient, or
        trunc when there is none (a valuation lower bound)."""
        return min(self.coeffs) if self.coeffs else self.trunc

    def coeff(self, e):
        return self.coeffs.get(e, self.ctx.zero)

    def __neg__(self):
        return TSeries(self.ctx, {e: -c for e, c in self.coeffs.items()},
                       self.trunc)

    def __add__(self, other):
        trunc = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            got = out.get(e)
            out[e] = c if got is None else got + c
        return TSeries(self.ctx, out, trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            return self.scale(other)
        trunc = min(self.trunc + other.support_min(),
                    other.trunc + self.support_min())
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= trunc:
                    continue
                got = out.get(e)
                p = c1 * c2
                out[e] = p if got is None else got + p
        return TSeries(self.ctx, out, trunc)

    def scale(self, c):
        return TSeries(self.ctx, {e: v * c for e, v in self.coeffs.items()},
                       self.trunc)

    def shift(self, k):
        """Multiply by t^k (k may be negative)."""
        return TSeries(self.ctx, {e + k: c for e, c in self.coeffs.items()},
                       self.trunc + k)

    def truncate(self, trunc):
        return TSeries(self.ctx, self.coeffs, min(trunc, self.trunc))

    def derivative(self):
        out = {}
        for e, c in self.coeffs.items():
            if e != 0:
                out[e - 1] = c * e
        return TSeries(self.ctx, out, self.trunc - 1)

    def power(self, n):
        if n < 0:
            raise ValueError("negative series power")
        if n == 0:
            return TSeries.one(self.ctx)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def valuation(self):
        """Exact valuation via splitting-aware zero tests; NeedMoreTerms when
        every known coefficient is certified zero."""
        for e in sorted(self.coeffs):
            if not self.ctx.decide_zero(self.coeffs[e]):
                return e
        raise NeedMoreTerms(self.trunc)

    def valuation_or_none(self):
        """Valuation, or None when zero to the known order."""
        for e in sorted(self.coeffs):
            if not self.ctx.decide_zero(self.coeffs[e]):
                return e
        return None

    def is_syntactically_zero(self):
        return not self.coeffs

    def map_ctx(self, ctx):
        """Push coefficients through a context embedding or reduction."""
        if ctx is self.ctx:
            return self
        return TSeries(ctx, {e: c.reduce_to(ctx) for e, c in
                             self.coeffs.items()}, self.trunc)

    def __repr__(self):
        bits = ["(%s)*t^%d" % (list(c.coeffs), e)
                for e, c in sorted(self.coeffs.items())[:4]]
        t = "oo" if self.is_exact() else str(self.trunc)
        return "TSeries(%s + O(t^%s))" % (" + ".join(bits) or "0", t)


def eval_bipoly(f, xs, ys, ctx):
    """Evaluate a bivariate polynomial {(e_x, e_y): coeff} at TSeries
    arguments, Horner in y with precomputed x powers."""
    by_y = {}
    max_ex = 0
    for (ex, ey), c in f.items():
        by_y.setdefault(ey, {})[ex] = c
        max_ex = max(max_ex, ex)
    if not by_y:
        return TSeries.zero(ctx, min(xs.trunc, ys.trunc))
    xpow = [TSeries.one(ctx)]
    for _ in range(max_ex):
        xpow.append(xpow[-1] * xs)

    def row(ey):
        terms = by_y.get(ey)
        acc = TSeries.zero(ctx)
        if terms:
            for ex, c in terms.items():
                acc = acc + xpow[ex].scale(c)
        return acc

    max_ey = max(by_y)
    acc = row(max_ey)
    for ey in range(max_ey - 1, -1, -1):
        acc = acc * ys + row(ey)
    return acc
