"""Dynamic evaluation over algebraic extensions of Q(i).

An ExtensionContext represents Q(i)[t]/(p(t)) with p monic and squarefree.
No irreducibility is ever tested: when an element fails to invert because
it shares a factor with the modulus, the context splits into the two factor
contexts and the computation is re-run in each.  Arithmetic (including the
zero test on a reduced element) is purely syntactic; any *decision* that
must hold at every specialization of t goes through decide_zero, which may
raise SplitRequest.

Contexts form a chain: a split child keeps the same generator with a
smaller modulus, while adjoin_root builds a new context over Q(i) whose
generator is a primitive element for (old generator, new root), flattening
what would otherwise be a tower.
"""

from __future__ import annotations

import itertools

from .gaussian import GaussianRational, QI_ONE, QI_ZERO
from .upoly import (QI_DOM, PolyDomain, UniPoly, gcd_field, resultant,
                    squarefree_part, xgcd_field)


class SplitRequest(Exception):
    """A zero divisor was hit in `ctx`; `factor` is a proper monic squarefree
    divisor of the modulus.  Callers re-run the computation in both factor
    contexts."""

    def __init__(self, ctx, factor):
        super().__init__("context split required (factor degree %d of %d)"
                         % (factor.degree(), ctx.degree))
        self.ctx = ctx
        self.factor = factor


class NeedMoreTerms(Exception):
    """A series/branch computation ran past its truncation order."""

    def __init__(self, needed=None):
        super().__init__("truncation order insufficient")
        self.needed = needed


_ctx_counter = itertools.count()


class ExtensionContext:
    """Q(i)[t]/(modulus); doubles as the UniPoly coefficient domain for
    polynomials with ExtElem coefficients."""

    def __init__(self, modulus, parent=None, parent_image=None):
        if modulus.is_zero() or modulus.degree() < 1:
            raise ValueError("modulus must have degree >= 1")
        self.modulus = modulus.monic()
        self.degree = self.modulus.degree()
        self.parent = parent
        self.parent_image = parent_image
        self.uid = next(_ctx_counter)
        self.name = "ctx%d" % self.uid
        self.split_log = []
        self._red = self._reduction_table()
        self.zero = ExtElem(self, (QI_ZERO,) * self.degree)
        self.one = ExtElem(self, (QI_ONE,) + (QI_ZERO,) * (self.degree - 1))
        gen_c = [QI_ZERO] * self.degree
        if self.degree == 1:
            # modulus t - c: the generator is the constant c
            gen_c[0] = -self.modulus.c[0]
        else:
            gen_c[1] = QI_ONE
        self.gen = ExtElem(self, tuple(gen_c))
        self._image_cache = {}

    def _reduction_table(self):
        # t^k mod modulus for k = deg .. 2*deg-2
        n = self.degree
        table = []
        prev = [-c for c in self.modulus.c[:-1]]  # t^n
        table.append(tuple(prev))
        for _ in range(n - 2):
            shifted = [QI_ZERO] + prev[:-1]
            lead = prev[-1]
            if lead:
                for k in range(n):
                    shifted[k] = shifted[k] - lead * self.modulus.c[k]
            prev = shifted
            table.append(tuple(prev))
        return table

    # -- domain adapter protocol (for UniPoly over this context) --

    def is_zero(self, e):
        return e.is_zero()

    def inv(self, e):
        return self.invert(e)

    def div(self, a, b):
        """Exact division a/b.  Solved through the multiplication matrix of
        b rather than via b's inverse: when b has large coefficients its
        inverse carries the norm as a denominator, which squares heights,
        while the direct solve keeps the honest quotient height.  A singular
        system falls back to invert(), which raises the SplitRequest."""
        if self.degree == 1:
            return ExtElem(self, (a.coeffs[0] * b.coeffs[0].inverse(),))
        q = self._solve_multiplication(b, a)
        if q is None:
            return a * self.invert(b)
        return q

    def _solve_multiplication(self, b, a):
        """q with q*b == a, or None when the multiplication matrix of b is
        singular (b is a zero divisor or zero)."""
        k = self.degree
        cols = [b.coeffs]
        cur = b
        for _ in range(1, k):
            cur = cur * self.gen
            cols.append(cur.coeffs)
        rows = [[cols[j][i] for j in range(k)] + [a.coeffs[i]]
                for i in range(k)]
        piv_cols = []
        r = 0
        for c in range(k):
            piv = None
            for rr in range(r, k):
                if rows[rr][c]:
                    piv = rr
                    break
            if piv is None:
                return None
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [v * inv for v in rows[r]]
            for rr in range(k):
                if rr != r and rows[rr][c]:
                    fac = rows[rr][c]
                    rows[rr] = [v - fac * w for v, w in zip(rows[rr],
                                                            rows[r])]
            piv_cols.append(c)
            r += 1
        return ExtElem(self, tuple(rows[c][k] for c in range(k)))

    def from_int(self, n):
        return self.from_qi(GaussianRational(n))

    # -- element constructors --

    def from_qi(self, q):
        c = [QI_ZERO] * self.degree
        c[0] = q
        return ExtElem(self, tuple(c))

    def from_coeffs(self, coeffs):
        """Element from Q(i) coefficients of powers of the generator."""
        lifted = UniPoly(QI_DOM, list(coeffs))
        red = lifted.rem_monic(self.modulus)
        c = list(red.c) + [QI_ZERO] * (self.degree - len(red.c))
        return ExtElem(self, tuple(c))

    # -- core operations --

    def invert(self, e):
        """Inverse of e, or raise: ZeroDivisionError if e == 0 everywhere,
        SplitRequest if e is a zero divisor."""
        if e.is_zero():
            raise ZeroDivisionError("inverse of zero in %s" % self.name)
        if self.degree == 1:
            return ExtElem(self, (e.coeffs[0].inverse(),))
        lifted = e.lift()
        d, u, _ = xgcd_field(lifted, self.modulus)
        if d.degree() == 0:
            return self.from_coeffs(u.c)
        if d.degree() == self.degree:
            raise ZeroDivisionError("inverse of zero in %s" % self.name)
        raise SplitRequest(self, d)

    def decide_zero(self, e):
        """Uniform zero test: True/False valid at every specialization,
        or SplitRequest when the answer is mixed."""
        if e.is_zero():
            return True
        if self.degree == 1:
            return False
        d = gcd_field(e.lift(), self.modulus)
        if d.degree() == 0:
            return False
        raise SplitRequest(self, d)

    def split(self, factor):
        """Split into the factor context and its cofactor context.  Children
        keep the same generator, so the parent image is the child generator
        itself and embedding doubles as reduction."""
        co = self.modulus.exact_div(factor)
        parts = []
        for m in (factor, co):
            child = ExtensionContext(m, parent=self, parent_image=None)
            child.parent_image = child.gen
            child.split_log = self.split_log + ["%s -> deg %d of %d"
                                                % (self.name, m.degree(),
                                                   self.degree)]
            parts.append(child)
        return parts

    def image_of(self, ancestor):
        """Image of ancestor's generator in this context."""
        if ancestor is self:
            return self.gen
        key = ancestor.uid
        img = self._image_cache.get(key)
        if img is not None:
            return img
        if self.parent is None:
            raise ValueError("%s is not an ancestor of %s"
                             % (ancestor.name, self.name))
        if ancestor is self.parent:
            img = self.parent_image
        else:
            parent_img = self.parent.image_of(ancestor)
            img = parent_img.lift().eval(self.parent_image)
            if isinstance(img, GaussianRational):
                img = self.from_qi(img)
        self._image_cache[key] = img
        return img

    def embed(self, e):
        """Embed an element of an ancestor context (or Q(i)) into this one.
        Degree-1 contexts hold plain Q(i) values and embed anywhere."""
        if isinstance(e, GaussianRational):
            return self.from_qi(e)
        if e.ctx is self:
            return e
        if e.ctx.degree == 1:
            return self.from_qi(e.coeffs[0])
        img = self.image_of(e.ctx)
        out = e.lift().eval(img)
        if isinstance(out, GaussianRational):
            out = self.from_qi(out)
        return out

    def __repr__(self):
        return "ExtensionContext(deg=%d, %s)" % (self.degree, self.name)


class ExtElem:
    """Element of an ExtensionContext, reduced mod the modulus."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def lift(self):
        return UniPoly(QI_DOM, list(self.coeffs))

    def is_zero(self):
        return all(not c for c in self.coeffs)

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ctx.from_int(other)
        if not isinstance(other, ExtElem):
            return NotImplemented
        if self.ctx is not other.ctx:
            raise ValueError("elements of different contexts")
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.uid, self.coeffs))

    def __neg__(self):
        return ExtElem(self.ctx, tuple(-c for c in self.coeffs))

    def _coerce(self, other):
        if isinstance(other, ExtElem):
            if other.ctx is not self.ctx:
                if other.ctx.degree == 1:
                    # degree-1 contexts carry plain Q(i) values
                    return self.ctx.from_qi(other.coeffs[0])
                if self.ctx.degree == 1:
                    return None
                raise ValueError("elements of different contexts: %s vs %s"
                                 % (self.ctx.name, other.ctx.name))
            return other
        if isinstance(other, GaussianRational):
            return self.ctx.from_qi(other)
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.ctx, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.ctx, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.ctx, tuple(b - a for a, b in zip(self.coeffs, o.coeffs)))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.ctx.degree
        if n == 1:
            return ExtElem(self.ctx, (self.coeffs[0] * o.coeffs[0],))
        a, b = self.coeffs, o.coeffs
        conv = [QI_ZERO] * (2 * n - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] = conv[i + j] + ai * bj
        out = conv[:n]
        red = self.ctx._red
        for k in range(n, 2 * n - 1):
            ck = conv[k]
            if ck:
                row = red[k - n]
                for m in range(n):
                    if row[m]:
                        out[m] = out[m] + ck * row[m]
        return ExtElem(self.ctx, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * self.ctx.invert(o)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        acc = self.ctx.one
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def reduce_to(self, child):
        """Reduce into a split child (same generator, smaller modulus)."""
        red = self.lift().rem_monic(child.modulus)
        c = list(red.c) + [QI_ZERO] * (child.degree - len(red.c))
        return ExtElem(child, tuple(c))

    def as_qi(self):
        """The Q(i) value, valid only when all higher coefficients vanish."""
        if any(self.coeffs[1:]):
            raise ValueError("element is not rational over Q(i)")
        return self.coeffs[0]

    def __repr__(self):
        return "ExtElem(%s, %s)" % (self.ctx.name, list(self.coeffs))


TRIVIAL_MODULUS = UniPoly(QI_DOM, [QI_ZERO, QI_ONE])  # t


def trivial_context():
    """A fresh degree-1 context representing plain Q(i) (generator == 0)."""
    return ExtensionContext(TRIVIAL_MODULUS)


QI_CTX = trivial_context()


def run_split(ctx, fn):
    """Run fn(ctx); on a SplitRequest for this ctx, recurse into both factor
    contexts.  Returns a list of (leaf_ctx, value)."""
    try:
        return [(ctx, fn(ctx))]
    except SplitRequest as sr:
        if sr.ctx is not ctx:
            raise
        out = []
        for child in ctx.split(sr.factor):
            out.extend(run_split(child, fn))
        return out


def decide_zero_cases(ctx, elem):
    """Like ctx.decide_zero but returning cluster cases:
    [(leaf_ctx, bool)], splitting as needed."""
    return run_split(ctx, lambda c: c.decide_zero(elem.reduce_to(c)
                                                  if c is not ctx else elem))


def invert_or_split(e, ctx):
    """Inverse of e in ctx, or the pair of factor contexts if e is a zero
    divisor.  Returns ('inv', element) or ('split', [ctx_a, ctx_b])."""
    try:
        return ("inv", ctx.invert(e))
    except SplitRequest as sr:
        if sr.ctx is not ctx:
            raise
        return ("split", ctx.split(sr.factor))


def _poly_over_ctx_to_bipoly(p, ctx):
    """UniPoly over ctx -> UniPoly in the same variable over Q(i)[s],
    where s stands for the context generator."""
    sdom = PolyDomain(QI_DOM)
    return UniPoly(sdom, [c.lift() for c in p.c])


def adjoin_root(ctx, phi, max_shift=64):
    """Adjoin a root of phi (UniPoly over ctx, not necessarily squarefree).

    Returns a list of (new_ctx, root) where each new_ctx is a context over
    Q(i) whose generator is a primitive element for (old generator, root);
    new_ctx.parent is ctx (or a split child of it) and new_ctx.parent_image
    recovers the old generator.  The combined degree over Q(i) is
    deg(ctx) * deg(squarefree(phi)), so clusters stay countable.
    """
    out = []
    for leaf, sq in run_split(ctx, lambda c: squarefree_part(
            phi if c is ctx else phi.map_coeffs(lambda e: e.reduce_to(c), c))):
        out.extend(_adjoin_squarefree(leaf, sq, max_shift))
    return out


def _adjoin_squarefree(ctx, phi, max_shift):
    if phi.degree() == 0:
        raise ValueError("adjoining a root of a unit")
    if phi.degree() == 1:
        # root already lives in ctx (after possible splits for the inversion)
        def solve(c):
            p = phi if c is ctx else phi.map_coeffs(lambda e: e.reduce_to(c), c)
            return -(p.c[0] * c.invert(p.c[1]))
        return run_split(ctx, solve)
    if ctx.degree == 1:
        # base is plain Q(i): the modulus is phi itself with Q(i) coefficients
        mod = UniPoly(QI_DOM, [c.coeffs[0] for c in phi.c])
        child = ExtensionContext(mod, parent=ctx, parent_image=None)
        child.parent_image = child.from_qi(ctx.gen.coeffs[0])
        return [(child, child.gen)]
    # primitive element: s = root + shift * t, minimal polynomial by resultant
    sdom = PolyDomain(QI_DOM)
    p_biv = UniPoly(sdom, [UniPoly(QI_DOM, [c]) for c in ctx.modulus.c])
    for shift in range(0, max_shift):
        lam = GaussianRational(shift)
        # Psi(t, s) = phi(s - lam*t) as UniPoly in t over Q(i)[s]
        psi = _compose_y_minus_lambda_t(phi, lam, ctx.degree)
        r = resultant(p_biv, psi)
        if r.is_zero():
            continue
        if gcd_field(r, r.derivative()).degree() != 0:
            continue
        child = ExtensionContext(r.monic(), parent=None, parent_image=None)
        return run_split(child, lambda c: _recover_root(c, ctx, phi, lam))
    raise RuntimeError("no valid primitive-element shift found")


def _compose_y_minus_lambda_t(phi, lam, ctx_deg):
    """phi(s - lam*t) arranged as a UniPoly in t with Q(i)[s] coefficients."""
    sdom = PolyDomain(QI_DOM)
    d = phi.degree()
    maxt = d + ctx_deg - 1
    acc = [dict() for _ in range(maxt + 1)]  # t-power -> {s-power: coeff}
    binom = [[0] * (d + 1) for _ in range(d + 1)]
    for n in range(d + 1):
        binom[n][0] = 1
        for k in range(1, n + 1):
            binom[n][k] = binom[n - 1][k - 1] + (binom[n - 1][k] if k <= n - 1 else 0)
    for k, coeff_ext in enumerate(phi.c):
        if coeff_ext.is_zero():
            continue
        lifted = coeff_ext.lift()  # Q(i)-poly in t
        for j in range(k + 1):
            scal = GaussianRational(binom[k][j]) * ((-lam) ** j)
            if not scal:
                continue
            # contributes scal * s^(k-j) * t^j * lifted(t)
            for tdeg, cc in enumerate(lifted.c):
                if cc:
                    slot = acc[j + tdeg]
                    slot[k - j] = slot.get(k - j, QI_ZERO) + scal * cc
    cols = []
    for slot in acc:
        if slot:
            n = max(slot) + 1
            cc = [QI_ZERO] * n
            for e, v in slot.items():
                cc[e] = v
            cols.append(UniPoly(QI_DOM, cc))
        else:
            cols.append(UniPoly(QI_DOM, []))
    return UniPoly(sdom, cols)


def _recover_root(child, ctx, phi, lam):
    """In the primitive-element context, recover the old generator by a gcd,
    attach the parent link, and return the adjoined root gen - lam*old_gen."""
    p_u = UniPoly(child, [child.from_qi(c) for c in ctx.modulus.c])
    lam_el = child.from_qi(lam)
    y_of_u = UniPoly(child, [child.gen, -lam_el])
    acc = UniPoly(child, [])
    for k in range(phi.degree(), -1, -1):
        lifted = phi.c[k].lift()  # Q(i)-poly in the old generator -> poly in u
        cku = UniPoly(child, [child.from_qi(c) for c in lifted.c])
        acc = acc * y_of_u + cku
    g = gcd_field(p_u, acc)
    if g.degree() != 1:
        # cannot happen with a squarefree primitive-element resultant
        raise RuntimeError("primitive element failed to separate conjugates "
                           "(gcd degree %d in %s)" % (g.degree(), child.name))
    old_gen = -(g.c[0] * child.invert(g.c[1]))
    child.parent = ctx
    child.parent_image = old_gen
    child._image_cache.clear()
    return child.gen - lam_el * old_gen
