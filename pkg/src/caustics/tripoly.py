"""Sparse homogeneous trivariate polynomials over an extension context,
plus the little 3x3 exact linear algebra the geometry needs."""

from __future__ import annotations

from .context import ExtensionContext
from .gaussian import GaussianRational


class TriPoly:
    """Homogeneous polynomial in x, y, z; terms maps (a, b, c) exponent
    triples with a+b+c == deg to nonzero context elements."""

    __slots__ = ("ctx", "terms", "deg")

    def __init__(self, ctx, terms, deg=None):
        clean = {}
        for key, coeff in terms.items():
            if coeff.is_zero():
                continue
            if deg is None:
                deg = sum(key)
            elif sum(key) != deg:
                raise ValueError("non-homogeneous term %s in degree-%d form"
                                 % (key, deg))
            clean[key] = coeff
        if deg is None:
            raise ValueError("cannot build the zero TriPoly without a degree")
        self.ctx = ctx
        self.terms = clean
        self.deg = deg

    @classmethod
    def zero(cls, ctx, deg):
        return cls(ctx, {}, deg)

    @classmethod
    def monomial(cls, ctx, key, coeff):
        return cls(ctx, {key: coeff})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TriPoly):
            return NotImplemented
        return self.ctx is other.ctx and self.deg == other.deg \
            and self.terms == other.terms

    def __neg__(self):
        return TriPoly(self.ctx, {k: -v for k, v in self.terms.items()},
                       self.deg)

    def __add__(self, other):
        if self.deg != other.deg:
            raise ValueError("adding forms of different degrees")
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return TriPoly(self.ctx, out, self.deg)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TriPoly):
            out = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                    w = out.get(k)
                    p = v1 * v2
                    out[k] = p if w is None else w + p
            return TriPoly(self.ctx, out, self.deg + other.deg)
        return self.scale(other)

    def scale(self, c):
        return TriPoly(self.ctx, {k: v * c for k, v in self.terms.items()},
                       self.deg)

    def partial(self, var):
        """d/dx, d/dy or d/dz for var = 0, 1, 2."""
        out = {}
        for k, v in self.terms.items():
            e = k[var]
            if e == 0:
                continue
            nk = list(k)
            nk[var] = e - 1
            out[tuple(nk)] = v * e
        return TriPoly(self.ctx, out, self.deg - 1)

    def polar(self, point):
        """Directional polar x1*Fx + y1*Fy + z1*Fz for point = (x1, y1, z1)."""
        acc = TriPoly.zero(self.ctx, self.deg - 1)
        for var in range(3):
            acc = acc + self.partial(var).scale(point[var])
        return acc

    def eval(self, triple):
        """Value at a coordinate triple of context elements."""
        acc = self.ctx.zero
        pows = [{}, {}, {}]

        def powof(var, e):
            cache = pows[var]
            got = cache.get(e)
            if got is None:
                got = triple[var] ** e
                cache[e] = got
            return got

        for (a, b, c), v in self.terms.items():
            acc = acc + v * powof(0, a) * powof(1, b) * powof(2, c)
        return acc

    def dehomogenize(self, chart):
        """Set variable `chart` to 1; returns {(e_u, e_v): coeff} in the two
        remaining variables, ordered (x, y), (x, z) or (y, z)."""
        keep = [v for v in range(3) if v != chart]
        out = {}
        for k, v in self.terms.items():
            key = (k[keep[0]], k[keep[1]])
            w = out.get(key)
            out[key] = v if w is None else w + v
        return {k: v for k, v in out.items() if not v.is_zero()}

    def restrict_to_line(self, p1, p2):
        """Coefficients [c_0..c_deg] of F(u*p1 + p2) as a polynomial in u."""
        from .upoly import UniPoly
        ctx = self.ctx
        lin = [(p1[v], p2[v]) for v in range(3)]
        coeffs = [ctx.zero] * (self.deg + 1)
        powcache = [{0: [ctx.one]} for _ in range(3)]

        def powof(var, e):
            cache = powcache[var]
            got = cache.get(e)
            if got is not None:
                return got
            prev = powof(var, e - 1)
            a, b = lin[var]
            out = [ctx.zero] * (e + 1)
            for k, coeff in enumerate(prev):
                out[k] = out[k] + coeff * b
                out[k + 1] = out[k + 1] + coeff * a
            cache[e] = out
            return out

        for (a, b, c), v in self.terms.items():
            pa, pb, pc = powof(0, a), powof(1, b), powof(2, c)
            # convolve the three univariate expansions
            tmp = [ctx.zero] * (a + b + 1)
            for k1, c1 in enumerate(pa):
                if c1.is_zero():
                    continue
                for k2, c2 in enumerate(pb):
                    if not c2.is_zero():
                        tmp[k1 + k2] = tmp[k1 + k2] + c1 * c2
            for k12, c12 in enumerate(tmp):
                if c12.is_zero():
                    continue
                for k3, c3 in enumerate(pc):
                    if not c3.is_zero():
                        coeffs[k12 + k3] = coeffs[k12 + k3] + v * c12 * c3
        return UniPoly(ctx, coeffs)

    def map_coeffs(self, fn, ctx=None):
        return TriPoly(ctx or self.ctx,
                       {k: fn(v) for k, v in self.terms.items()}, self.deg)

    def embed_into(self, ctx):
        if ctx is self.ctx:
            return self
        return self.map_coeffs(ctx.embed, ctx)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def __repr__(self):
        return "TriPoly(deg=%d, %d terms)" % (self.deg, len(self.terms))


def substitute_linear(F, M):
    """F composed with the linear map M: returns G with G(v) = F(M @ v).

    M is a 3x3 matrix (rows) of context elements; it must be invertible,
    which is checked exactly via the determinant.
    """
    ctx = F.ctx
    if det3(M).is_zero():
        raise ValueError("singular substitution matrix")
    rows = [TriPoly(ctx, {(1, 0, 0): M[r][0], (0, 1, 0): M[r][1],
                          (0, 0, 1): M[r][2]}, 1) for r in range(3)]
    pows = [{0: TriPoly(ctx, {(0, 0, 0): ctx.one}, 0)} for _ in range(3)]

    def powof(var, e):
        cache = pows[var]
        got = cache.get(e)
        if got is None:
            got = powof(var, e - 1) * rows[var]
            cache[e] = got
        return got

    acc = TriPoly.zero(ctx, F.deg)
    for (a, b, c), v in F.terms.items():
        acc = acc + (powof(0, a) * powof(1, b) * powof(2, c)).scale(v)
    return acc


# -- 3x3 exact linear algebra over a context --

def mat_from_int(ctx, rows):
    return tuple(tuple(ctx.from_int(v) for v in row) for row in rows)


def mat_vec(M, v):
    return tuple(M[r][0] * v[0] + M[r][1] * v[1] + M[r][2] * v[2]
                 for r in range(3))


def vec_mat(v, M):
    return tuple(v[0] * M[0][c] + v[1] * M[1][c] + v[2] * M[2][c]
                 for c in range(3))


def mat_mul(A, B):
    return tuple(tuple(A[r][0] * B[0][c] + A[r][1] * B[1][c]
                       + A[r][2] * B[2][c] for c in range(3))
                 for r in range(3))


def det3(M):
    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))


def adjugate3(M):
    c = [[None] * 3 for _ in range(3)]
    for r in range(3):
        for k in range(3):
            r1, r2 = [a for a in range(3) if a != r]
            c1, c2 = [a for a in range(3) if a != k]
            minor = M[r1][c1] * M[r2][c2] - M[r1][c2] * M[r2][c1]
            c[k][r] = minor if (r + k) % 2 == 0 else -minor
    return tuple(tuple(row) for row in c)


def mat_inv(M, ctx):
    """Exact inverse; raises SplitRequest if the determinant is a zero
    divisor in the context."""
    d = det3(M)
    dinv = ctx.invert(d)
    adj = adjugate3(M)
    return tuple(tuple(adj[r][c] * dinv for c in range(3)) for r in range(3))


def com_matrix(M, ctx):
    """det(M) * transpose(inverse(M)) — the cofactor matrix."""
    adj = adjugate3(M)  # adj = det * inv
    return tuple(tuple(adj[c][r] for c in range(3)) for r in range(3))


def cross(u, v):
    """Wedge of two coordinate vectors: (z2*y1 - z1*y2, z1*x2 - z2*x1,
    x1*y2 - y1*x2)."""
    return (v[2] * u[1] - u[2] * v[1],
            u[2] * v[0] - v[2] * u[0],
            u[0] * v[1] - u[1] * v[0])


def wedge_tripoly(m_forms, vec_forms):
    """Componentwise wedge where both arguments are triples of TriPolys."""
    u, v = m_forms, vec_forms
    return (v[2] * u[1] - u[2] * v[1],
            u[2] * v[0] - v[2] * u[0],
            u[0] * v[1] - u[1] * v[0])
