"""Parser and renderer for polynomial and point expressions.

Grammar: variables x, y, z (and t when an extension modulus is declared),
integer and p/q literals, the imaginary unit i, operators + - * / ^ and
parentheses.  Multiplication is always explicit ("2x" is rejected);
division is only by constants.
"""

from __future__ import annotations

from .context import ExtensionContext, trivial_context
from .gaussian import GaussianRational, QI_I, QI_ONE, QI_ZERO
from .tripoly import TriPoly
from .upoly import QI_DOM, UniPoly, squarefree_part


class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


_TOKEN_CHARS = {"+", "-", "*", "/", "^", "(", ")"}


def _tokenize(text):
    tokens = []
    k = 0
    n = len(text)
    while k < n:
        ch = text[k]
        if ch.isspace():
            k += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, k, None))
            k += 1
            continue
        if ch.isdigit():
            j = k
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", k, int(text[k:j])))
            k = j
            continue
        if ch.isalpha():
            j = k
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(("name", k, text[k:j]))
            k = j
            continue
        raise ParseError("unexpected character %r" % ch, k)
    tokens.append(("end", n, None))
    return tokens


class _Expr:
    """Polynomial in x, y, z, t with Q(i) coefficients; keys are exponent
    4-tuples, and each monomial remembers where it came from."""

    __slots__ = ("terms", "pos")

    def __init__(self, terms, pos):
        self.terms = terms
        self.pos = pos

    @classmethod
    def const(cls, v, at):
        if not v:
            return cls({}, {})
        return cls({(0, 0, 0, 0): v}, {(0, 0, 0, 0): at})

    @classmethod
    def var(cls, idx, at):
        key = tuple(1 if v == idx else 0 for v in range(4))
        return cls({key: QI_ONE}, {key: at})

    def add(self, other, sign=1):
        out = dict(self.terms)
        pos = dict(self.pos)
        for k, v in other.terms.items():
            out[k] = out.get(k, QI_ZERO) + (v if sign > 0 else -v)
            pos.setdefault(k, other.pos[k])
        return _Expr({k: v for k, v in out.items() if v}, pos)

    def mul(self, other):
        out = {}
        pos = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, QI_ZERO) + v1 * v2
                pos.setdefault(k, self.pos[k1])
        return _Expr({k: v for k, v in out.items() if v}, pos)

    def neg(self):
        return _Expr({k: -v for k, v in self.terms.items()}, dict(self.pos))

    def constant_value(self):
        if any(k != (0, 0, 0, 0) for k in self.terms):
            return None
        return self.terms.get((0, 0, 0, 0), QI_ZERO)


class _Parser:
    def __init__(self, text, allow_vars, allow_t):
        self.tokens = _tokenize(text)
        self.k = 0
        self.allow_vars = allow_vars
        self.allow_t = allow_t

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def parse(self):
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError("unexpected trailing input", tok[1])
        return out

    def expr(self):
        tok = self.peek()
        if tok[0] in ("+", "-"):
            self.next()
            acc = self.term()
            if tok[0] == "-":
                acc = acc.neg()
        else:
            acc = self.term()
        while True:
            tok = self.peek()
            if tok[0] in ("+", "-"):
                self.next()
                acc = acc.add(self.term(), 1 if tok[0] == "+" else -1)
            else:
                return acc

    def term(self):
        acc = self.power()
        while True:
            tok = self.peek()
            if tok[0] == "*":
                self.next()
                acc = acc.mul(self.power())
            elif tok[0] == "/":
                self.next()
                rhs = self.power()
                c = rhs.constant_value()
                if c is None:
                    raise ParseError("division by a non-constant", tok[1])
                if not c:
                    raise ParseError("division by zero", tok[1])
                acc = acc.mul(_Expr.const(c.inverse(), tok[1]))
            else:
                return acc

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "^":
            self.next()
            etok = self.next()
            if etok[0] != "int":
                raise ParseError("exponent must be a nonnegative integer",
                                 etok[1])
            acc = _Expr.const(QI_ONE, etok[1])
            for _ in range(etok[2]):
                acc = acc.mul(base)
            return acc
        return base

    def atom(self):
        tok = self.next()
        if tok[0] == "(":
            inner = self.expr()
            close = self.next()
            if close[0] != ")":
                raise ParseError("expected ')'", close[1])
            return inner
        if tok[0] == "-":
            return self.atom().neg()
        if tok[0] == "int":
            return _Expr.const(GaussianRational(tok[2]), tok[1])
        if tok[0] == "name":
            name = tok[2]
            if name == "i":
                return _Expr.const(QI_I, tok[1])
            if name in ("x", "y", "z"):
                if not self.allow_vars:
                    raise ParseError("variable %r not allowed here" % name,
                                     tok[1])
                return _Expr.var("xyz".index(name), tok[1])
            if name == "t":
                if not self.allow_t:
                    raise ParseError("t used without an extension modulus",
                                     tok[1])
                return _Expr.var(3, tok[1])
            raise ParseError("unknown symbol %r" % name, tok[1])
        raise ParseError("unexpected token %r" % (tok[0],), tok[1])


def parse_extension(text):
    """Parse an extension modulus in t; returns a fresh squarefree-monic
    context over Q(i)."""
    expr = _Parser(text, allow_vars=False, allow_t=True).parse()
    coeffs = {}
    for key, v in expr.terms.items():
        if any(key[:3]):
            raise ParseError("modulus may only involve t", expr.pos[key])
        coeffs[key[3]] = v
    if not coeffs or max(coeffs) < 1:
        raise ParseError("extension modulus must have degree >= 1", 0)
    n = max(coeffs)
    modulus = UniPoly(QI_DOM, [coeffs.get(e, QI_ZERO) for e in range(n + 1)])
    if squarefree_part(modulus).degree() != n:
        raise ParseError("extension modulus must be squarefree", 0)
    return ExtensionContext(modulus.monic())


def _to_context(expr, ctx):
    """Collapse t-powers into context elements; returns {(a,b,c): ExtElem}."""
    out = {}
    pos = {}
    for (a, b, c, e), v in expr.terms.items():
        coeff = ctx.from_qi(v) * (ctx.gen ** e) if e else ctx.from_qi(v)
        key = (a, b, c)
        got = out.get(key)
        out[key] = coeff if got is None else got + coeff
        pos.setdefault(key, expr.pos[(a, b, c, e)])
    return {k: v for k, v in out.items() if not v.is_zero()}, pos


def parse_polynomial(text, ctx=None):
    """Parse a homogeneous curve polynomial over the given context."""
    ctx = ctx or trivial_context()
    expr = _Parser(text, allow_vars=True, allow_t=ctx.degree > 1).parse()
    terms, pos = _to_context(expr, ctx)
    if not terms:
        raise ParseError("the zero polynomial is not a curve", 0)
    degrees = {sum(k) for k in terms}
    if len(degrees) > 1:
        lo, hi = min(degrees), max(degrees)
        badkey = next(k for k in terms if sum(k) == lo)
        raise ParseError("non-homogeneous polynomial: degree-%d term mixed "
                         "with degree %d" % (lo, hi), pos.get(badkey, 0))
    return TriPoly(ctx, terms)


def parse_scalar(text, ctx):
    """Parse a degree-0 expression (a point coordinate)."""
    expr = _Parser(text, allow_vars=False, allow_t=ctx.degree > 1).parse()
    terms, _ = _to_context(expr, ctx)
    if any(k != (0, 0, 0) for k in terms):
        raise ParseError("expected a scalar expression", 0)
    return terms.get((0, 0, 0), ctx.zero)


def parse_point(text, ctx=None):
    """Parse 'x0:y0:z0' with scalar coordinate expressions."""
    ctx = ctx or trivial_context()
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError("a point needs exactly three ':'-separated "
                         "coordinates", 0)
    coords = tuple(parse_scalar(p, ctx) for p in parts)
    if all(c.is_zero() for c in coords):
        raise ParseError("the zero triple is not a projective point", 0)
    return coords


def render_polynomial(F):
    """Canonical text form; parses back to an identical TriPoly."""
    if F.is_zero():
        return "0"
    bits = []
    for (a, b, c), coeff in F.sorted_terms():
        mono = []
        for name, e in (("x", a), ("y", b), ("z", c)):
            if e == 1:
                mono.append(name)
            elif e > 1:
                mono.append("%s^%d" % (name, e))
        cs = _render_coeff(coeff)
        if mono:
            if cs == "1":
                bits.append("*".join(mono))
            elif cs == "-1":
                bits.append("-" + "*".join(mono))
            else:
                bits.append(cs + "*" + "*".join(mono))
        else:
            bits.append(cs)
    out = bits[0]
    for b in bits[1:]:
        out += " - " + b[1:] if b.startswith("-") else " + " + b
    return out


def _render_coeff(coeff):
    lifted = coeff.lift()
    parts = []
    for e, q in enumerate(lifted.c):
        if not q:
            continue
        qs = _render_qi(q)
        if e == 0:
            parts.append(qs)
        elif e == 1:
            parts.append("%s*t" % _paren(qs))
        else:
            parts.append("%s*t^%d" % (_paren(qs), e))
    if not parts:
        return "0"
    if len(parts) == 1:
        return parts[0]
    joined = parts[0]
    for p in parts[1:]:
        joined += "+" + p
    return "(" + joined + ")"


def _paren(s):
    if s.startswith("-") or any(op in s for op in "+*/"):
        return "(" + s + ")"
    return s


def _render_qi(q):
    def frac(n, d):
        return str(n) if d == 1 else "%d/%d" % (n, d)

    if q.b == 0:
        return frac(q.a, q.den)
    ims = "i" if q.b == q.den else ("-i" if q.b == -q.den
                                    else "%s*i" % frac(q.b, q.den))
    if q.a == 0:
        return ims
    rs = frac(q.a, q.den)
    if ims.startswith("-"):
        return "(" + rs + "-" + ims[1:] + ")"
    return "(" + rs + "+" + ims + ")"
