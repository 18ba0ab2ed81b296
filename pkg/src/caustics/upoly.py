"""Dense univariate polynomials over an abstract coefficient domain.

The same machinery serves three coefficient domains: the base field Q(i),
extension rings Q(i)[t]/(p) (which may encounter zero divisors and signal
splits) and polynomial rings K[x] themselves, so that bivariate resultants
are resultants of UniPolys whose coefficients are UniPolys.

gcds come in two flavours: monic Euclid for field-like domains (this is
where dynamic evaluation splits surface) and a primitive subresultant PRS
for polynomial coefficient rings.  Resultants use the subresultant PRS in
the det-of-Sylvester sign convention.
"""

from __future__ import annotations

from .gaussian import GaussianRational, QI_ONE, QI_ZERO


class QIDomain:
    """Domain adapter for Q(i) coefficients."""

    name = "QI"

    @property
    def zero(self):
        return QI_ZERO

    @property
    def one(self):
        return QI_ONE

    def is_zero(self, e):
        return not e

    def inv(self, e):
        return e.inverse()

    def div(self, a, b):
        return a * b.inverse()

    def from_int(self, n):
        return GaussianRational(n)


QI_DOM = QIDomain()


class PolyDomain:
    """Domain adapter whose elements are UniPolys over an inner domain."""

    def __init__(self, inner):
        self.inner = inner
        self.name = "Poly(%s)" % getattr(inner, "name", "?")

    @property
    def zero(self):
        return UniPoly(self.inner, [])

    @property
    def one(self):
        return UniPoly(self.inner, [self.inner.one])

    def is_zero(self, e):
        return e.is_zero()

    def inv(self, e):
        if e.degree() != 0:
            raise ZeroDivisionError("non-constant polynomial is not a unit")
        return UniPoly(self.inner, [self.inner.inv(e.c[0])])

    def div(self, a, b):
        return a.exact_div(b)

    def from_int(self, n):
        c = self.inner.from_int(n)
        return UniPoly(self.inner, [c])


class UniPoly:
    """Dense polynomial; c[-1] is a (syntactically) nonzero leading coefficient."""

    __slots__ = ("dom", "c")

    def __init__(self, dom, coeffs):
        c = list(coeffs)
        while c and dom.is_zero(c[-1]):
            c.pop()
        self.dom = dom
        self.c = c

    @classmethod
    def x_power(cls, dom, k, scale=None):
        lead = dom.one if scale is None else scale
        return cls(dom, [dom.zero] * k + [lead])

    @classmethod
    def const(cls, dom, v):
        return cls(dom, [v])

    def is_zero(self):
        return not self.c

    def degree(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.c) - 1

    def lc(self):
        return self.c[-1]

    def constant(self):
        return self.c[0] if self.c else self.dom.zero

    def coeff(self, k):
        return self.c[k] if k < len(self.c) else self.dom.zero

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        if len(self.c) != len(other.c):
            return False
        return all(a == b for a, b in zip(self.c, other.c))

    def __hash__(self):
        return hash(tuple(self.c))

    def __neg__(self):
        return UniPoly(self.dom, [-a for a in self.c])

    def __add__(self, other):
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, v in enumerate(b):
            out[k] = out[k] + v
        return UniPoly(self.dom, out)

    def __sub__(self, other):
        n = max(len(self.c), len(other.c))
        z = self.dom.zero
        out = []
        for k in range(n):
            p = self.c[k] if k < len(self.c) else z
            q = other.c[k] if k < len(other.c) else z
            out.append(p - q)
        return UniPoly(self.dom, out)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return self.scale(other)
        if not self.c or not other.c:
            return UniPoly(self.dom, [])
        z = self.dom.zero
        out = [z] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if self.dom.is_zero(a):
                continue
            for j, b in enumerate(other.c):
                out[i + j] = out[i + j] + a * b
        return UniPoly(self.dom, out)

    def scale(self, k):
        if isinstance(k, int):
            k = self.dom.from_int(k)
        if self.dom.is_zero(k):
            return UniPoly(self.dom, [])
        return UniPoly(self.dom, [a * k for a in self.c])

    def shift(self, k):
        """Multiply by x^k."""
        if not self.c:
            return self
        return UniPoly(self.dom, [self.dom.zero] * k + self.c)

    def derivative(self):
        return UniPoly(self.dom, [c * k for k, c in enumerate(self.c)][1:])

    def eval(self, v):
        """Horner evaluation; v must multiply with domain elements."""
        if not self.c:
            return self.dom.zero
        acc = self.c[-1]
        for k in range(len(self.c) - 2, -1, -1):
            acc = acc * v + self.c[k]
        return acc

    def valuation(self):
        """Index of the lowest syntactically nonzero coefficient (-1 if zero)."""
        for k, a in enumerate(self.c):
            if not self.dom.is_zero(a):
                return k
        return -1

    def monic(self):
        if not self.c:
            return self
        inv = self.dom.inv(self.c[-1])
        return UniPoly(self.dom, [a * inv for a in self.c[:-1]] + [self.dom.one])

    def rem_monic(self, g):
        """Remainder by a monic divisor (no inversions)."""
        r = list(self.c)
        dg = g.degree()
        while len(r) - 1 >= dg:
            lead = r[-1]
            if not self.dom.is_zero(lead):
                off = len(r) - 1 - dg
                for k in range(dg):
                    r[off + k] = r[off + k] - lead * g.c[k]
            r.pop()
        return UniPoly(self.dom, r)

    def divmod_monic(self, g):
        r = list(self.c)
        dg = g.degree()
        q = [self.dom.zero] * max(len(r) - dg, 0)
        while len(r) - 1 >= dg:
            lead = r[-1]
            off = len(r) - 1 - dg
            if not self.dom.is_zero(lead):
                q[off] = lead
                for k in range(dg):
                    r[off + k] = r[off + k] - lead * g.c[k]
            r.pop()
        return UniPoly(self.dom, q), UniPoly(self.dom, r)

    def exact_div(self, g):
        """Exact division; raises ValueError if not exact."""
        if g.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dg = g.degree()
        glc = g.lc()
        q = [self.dom.zero] * max(len(r) - dg, 0)
        for off in range(len(r) - dg - 1, -1, -1):
            lead = r[off + dg]
            if not self.dom.is_zero(lead):
                qk = self.dom.div(lead, glc)
                q[off] = qk
                for k in range(dg + 1):
                    r[off + k] = r[off + k] - qk * g.c[k]
        if any(not self.dom.is_zero(a) for a in r):
            raise ValueError("inexact polynomial division")
        return UniPoly(self.dom, q)

    def compose_linear(self, a, b):
        """self(a*x + b) for domain scalars a, b."""
        dom = self.dom
        acc = UniPoly(dom, [])
        lin = UniPoly(dom, [b, a])
        for c in reversed(self.c):
            acc = acc * lin + UniPoly(dom, [c])
        return acc

    def map_coeffs(self, fn, dom=None):
        dom = dom or self.dom
        return UniPoly(dom, [fn(a) for a in self.c])

    def __repr__(self):
        return "UniPoly(%r)" % (self.c,)


def prem(A, B):
    """Pseudo-remainder: rem(lc(B)^(deg A - deg B + 1) * A, B)."""
    dom = A.dom
    dB = B.degree()
    lb = B.lc()
    r = list(A.c)
    e = A.degree() - dB + 1
    while len(r) - 1 >= dB and r:
        lead = r[-1]
        r = [lb * a for a in r[:-1]]
        if not dom.is_zero(lead):
            off = len(r) - dB
            for k in range(dB):
                r[off + k] = r[off + k] - lead * B.c[k]
        e -= 1
    out = UniPoly(dom, r)
    for _ in range(e):
        out = out.scale(lb)
    return out


def pow_elem(dom, e, n):
    acc = dom.one
    for _ in range(n):
        acc = acc * e
    return acc


def _scalar_div(P, d):
    dom = P.dom
    return UniPoly(dom, [dom.div(a, d) for a in P.c])


def _certify_leading(dom, P):
    """Over a context domain, strip leading coefficients that vanish at
    every specialization; a coefficient with a mixed answer raises
    SplitRequest so the caller re-runs per factor.  Syntactic domains pass
    through unchanged."""
    if P.is_zero() or not hasattr(dom, "decide_zero"):
        return P
    c = list(P.c)
    while c and dom.decide_zero(c[-1]):
        c.pop()
    return UniPoly(dom, c)


def resultant(A, B):
    """Res(A, B) in the det-of-Sylvester convention, via subresultant PRS.
    Over a context domain the PRS degrees are certified, so the result is
    valid at every specialization (up to unit factors when leading
    coefficients collapse)."""
    dom = A.dom
    A = _certify_leading(dom, A)
    B = _certify_leading(dom, B)
    if A.is_zero() or B.is_zero():
        return dom.zero
    if A.degree() == 0 and B.degree() == 0:
        return dom.one
    if A.degree() == 0:
        return pow_elem(dom, A.c[0], B.degree())
    if B.degree() == 0:
        return pow_elem(dom, B.c[0], A.degree())
    s = 1
    if A.degree() < B.degree():
        if (A.degree() * B.degree()) % 2:
            s = -s
        A, B = B, A
    g = dom.one
    h = dom.one
    while True:
        dA, dB = A.degree(), B.degree()
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = _certify_leading(dom, prem(A, B))
        A = B
        denom = g
        for _ in range(delta):
            denom = denom * h
        B = _scalar_div(R, denom)
        g = A.lc()
        if delta == 1:
            h = g
        elif delta > 1:
            h = dom.div(pow_elem(dom, g, delta), pow_elem(dom, h, delta - 1))
        if B.is_zero():
            return dom.zero
        if B.degree() == 0:
            num = pow_elem(dom, B.c[0], A.degree())
            if A.degree() <= 1:
                res = num
            else:
                res = dom.div(num, pow_elem(dom, h, A.degree() - 1))
            return res if s == 1 else -res


def gcd_field(f, g):
    """Monic gcd over a field-like domain (Q(i) or an extension context).

    Subresultant PRS rather than monic Euclid: the divisions keep the
    coefficient heights polynomial instead of squaring per step.  Over an
    extension context the division/inversion steps are where zero divisors
    surface, and the resulting SplitRequest propagates to the caller, which
    re-runs per factor.
    """
    dom = f.dom
    f = _certify_leading(dom, f)
    g = _certify_leading(dom, g)
    if f.is_zero():
        return g.monic() if not g.is_zero() else g
    if g.is_zero():
        return f.monic()
    A, B = (f, g) if f.degree() >= g.degree() else (g, f)
    if B.degree() == 0:
        return UniPoly(dom, [dom.one])
    gg = dom.one
    h = dom.one
    while True:
        delta = A.degree() - B.degree()
        R = _certify_leading(dom, prem(A, B))
        if R.is_zero():
            return B.monic()
        if R.degree() == 0:
            return UniPoly(dom, [dom.one])
        A = B
        denom = gg
        for _ in range(delta):
            denom = denom * h
        B = _scalar_div(R, denom)
        gg = A.lc()
        if delta == 1:
            h = gg
        elif delta > 1:
            h = dom.div(pow_elem(dom, gg, delta), pow_elem(dom, h, delta - 1))


def xgcd_field(f, g):
    """(d, u, v) with u*f + v*g = d, d monic, over a field-like domain."""
    dom = f.dom
    zero = UniPoly(dom, [])
    one = UniPoly(dom, [dom.one])
    r0, r1 = f, g
    u0, u1 = one, zero
    v0, v1 = zero, one
    while not r1.is_zero():
        lcinv = dom.inv(r1.lc())
        r1m = r1.scale(lcinv)
        q, r = r0.divmod_monic(r1m)
        q = q.scale(lcinv)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero():
        return r0, u0, v0
    lcinv = dom.inv(r0.lc())
    return r0.scale(lcinv), u0.scale(lcinv), v0.scale(lcinv)


def squarefree_part(f):
    """f / gcd(f, f'), monic; the squarefree polynomial with the same roots."""
    if f.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if f.degree() == 0:
        return f.monic()
    g = gcd_field(f, f.derivative())
    if g.degree() == 0:
        return f.monic()
    return f.exact_div(g).monic()


def squarefree_decomposition(f):
    """Yun's algorithm: [(g_k, k)] with f = lc * prod g_k^k, the g_k squarefree
    and pairwise coprime, deg g_k > 0 only for multiplicities that occur."""
    if f.is_zero():
        raise ValueError("squarefree decomposition of zero")
    f = f.monic()
    if f.degree() == 0:
        return []
    out = []
    a = gcd_field(f, f.derivative())
    if a.degree() == 0:
        return [(f, 1)]
    b = f.exact_div(a)
    c = f.derivative().exact_div(a)
    k = 1
    while b.degree() > 0:
        d = c - b.derivative()
        g = gcd_field(b, d)
        if g.degree() > 0:
            out.append((g, k))
            b = b.exact_div(g)
            d = d.exact_div(g)
        c = d
        k += 1
    return out


def content_pp(P, inner_gcd=gcd_field):
    """Content and primitive part of a UniPoly over a PolyDomain."""
    if P.is_zero():
        raise ValueError("content of zero polynomial")
    cont = None
    for a in P.c:
        if a.is_zero():
            continue
        cont = a if cont is None else inner_gcd(cont, a)
        if cont.degree() == 0:
            break
    cont = cont.monic()
    if cont.degree() == 0:
        return cont, P
    return cont, P.map_coeffs(lambda a: a.exact_div(cont) if not a.is_zero() else a)


def gcd_poly_ring(A, B):
    """gcd of UniPolys over a PolyDomain (bivariate gcd), via primitive PRS.

    Normalized so the result is primitive with monic leading coefficient.
    """
    dom = A.dom
    if A.is_zero():
        return B
    if B.is_zero():
        return A
    contA, ppA = content_pp(A)
    contB, ppB = content_pp(B)
    cont = gcd_field(contA, contB)
    if ppA.degree() < ppB.degree():
        ppA, ppB = ppB, ppA
    while not ppB.is_zero():
        R = prem(ppA, ppB)
        if R.is_zero():
            ppA = ppB
            break
        _, Rpp = content_pp(R)
        ppA, ppB = ppB, Rpp
    _, G = content_pp(ppA)
    inv = G.lc().dom.inv(G.lc().lc())
    G = G.map_coeffs(lambda a: a.scale(inv))
    if cont.degree() > 0:
        G = G.map_coeffs(lambda a: a * cont)
    return UniPoly(dom, G.c)
