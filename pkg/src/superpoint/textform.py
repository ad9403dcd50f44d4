"""Canonical text form for elements and derivations, and its parser.

Elements print as ``c·x1^a1x2^a2·ξ1ξ3`` terms joined by `` + `` (`` - `` for
negative coefficients); unit coefficients and exponents are omitted.
Derivations append ``∂ξi`` or ``∂xi`` to each term of an image.

The parser also accepts the ASCII spellings ``xi1`` for ξ1, ``dxi1`` for ∂ξ1,
``dx1`` for ∂x1, ``*`` for ``·``, and ``E`` for the Euler field.
"""

import re
from fractions import Fraction

from .algebra import SuperElement, mono_sort_key, odd_indices


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _mono_text(key):
    exps, mask = key
    xpart = "".join(f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e)
    oddpart = "".join(f"ξ{i + 1}" for i in odd_indices(mask))
    return "·".join(p for p in (xpart, oddpart) if p)


def _term_text(c, mono, suffix=""):
    c = Fraction(c)
    body = mono + suffix
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}·{body}"


def _join(terms):
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def format_element(a):
    return _join([_term_text(c, _mono_text(k)) for k, c in a.sorted_terms()])


def format_derivation(delta):
    terms = []
    for i, h in enumerate(delta.images_xi):
        terms += [_term_text(c, _mono_text(k), f"∂ξ{i + 1}") for k, c in h.sorted_terms()]
    for i, h in enumerate(delta.images_x):
        terms += [_term_text(c, _mono_text(k), f"∂x{i + 1}") for k, c in h.sorted_terms()]
    return _join(terms)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<dxi>(?:∂ξ|∂xi|dxi|dξ)(?P<dxi_i>\d+))
  | (?P<dx>(?:∂x|dx)(?P<dx_i>\d+))
  | (?P<xi>(?:ξ|xi)(?P<xi_i>\d+))
  | (?P<x>x(?P<x_i>\d+)(?:\^(?P<x_e>\d+))?)
  | (?P<euler>E)
  | (?P<plus>\+)
  | (?P<minus>[-−])
  | (?P<dot>[·*])
  | (?P<lpar>\()
  | (?P<rpar>\))
    """,
    re.VERBOSE,
)


def tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        # lastgroup reports the innermost named group; map back to the token kind
        for k in ("ws", "num", "dxi", "dx", "xi", "x", "euler", "plus", "minus", "dot", "lpar", "rpar"):
            if m.group(k) is not None:
                kind = k
                break
        if kind != "ws":
            out.append((kind, m, pos))
        pos = m.end()
    out.append(("end", None, pos))
    return out


def _max_index(tokens):
    best = 0
    for kind, m, _ in tokens:
        if kind in ("dxi", "dx", "xi", "x"):
            best = max(best, int(m.group(kind + "_i")))
    return best


class _Value:
    """Either an element (``images`` None) or a derivation (2n images)."""

    __slots__ = ("element", "images")

    def __init__(self, element=None, images=None):
        self.element = element
        self.images = images


class _Parser:
    def __init__(self, text, n):
        self.tokens = tokenize(text)
        self.n = n if n is not None else max(_max_index(self.tokens), 1)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def index(self, m, group, pos):
        i = int(m.group(group))
        if not 1 <= i <= self.n:
            raise ParseError(f"index {i} outside 1..{self.n}", pos)
        return i

    def parse(self):
        v = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return v

    def expr(self):
        n = self.n
        total = None
        sign = 1
        kind, _, _ = self.peek()
        if kind in ("plus", "minus"):
            sign = -1 if self.take()[0] == "minus" else 1
        while True:
            v = self.term()
            total = self._add(total, v, sign)
            kind, _, _ = self.peek()
            if kind not in ("plus", "minus"):
                break
            sign = -1 if self.take()[0] == "minus" else 1
        return total if total is not None else _Value(SuperElement.zero(n))

    def _add(self, acc, v, sign):
        if sign < 0:
            v = _Value(-v.element) if v.images is None else _Value(images=[-h for h in v.images])
        if acc is None:
            return v
        if (acc.images is None) != (v.images is None):
            raise ParseError("cannot add an element to a derivation", self.peek()[2])
        if acc.images is None:
            return _Value(acc.element + v.element)
        return _Value(images=[a + b for a, b in zip(acc.images, v.images)])

    def term(self):
        n = self.n
        coeff = SuperElement.const(n, 1)
        deriv = None
        seen = False
        while True:
            kind, m, pos = self.peek()
            if kind == "dot":
                if not seen:
                    raise ParseError("dangling multiplication sign", pos)
                self.take()
                continue
            if kind not in ("num", "x", "xi", "dxi", "dx", "euler", "lpar"):
                break
            if deriv is not None:
                raise ParseError("a derivation symbol must end its term", pos)
            self.take()
            seen = True
            if kind == "num":
                coeff = coeff.scale(Fraction(m.group("num")))
            elif kind == "x":
                e = int(m.group("x_e") or 1)
                coeff = coeff * SuperElement.x(n, self.index(m, "x_i", pos)) ** e
            elif kind == "xi":
                coeff = coeff * SuperElement.xi(n, self.index(m, "xi_i", pos))
            elif kind == "dxi":
                deriv = self._unit(self.index(m, "dxi_i", pos) - 1)
            elif kind == "dx":
                deriv = self._unit(n + self.index(m, "dx_i", pos) - 1)
            elif kind == "euler":
                deriv = [SuperElement.xi(n, i) for i in range(1, n + 1)] + [SuperElement.zero(n)] * n
            else:
                inner = self.expr()
                k2, _, p2 = self.take()
                if k2 != "rpar":
                    raise ParseError("expected ')'", p2)
                if inner.images is None:
                    coeff = coeff * inner.element
                else:
                    deriv = inner.images
        if not seen:
            raise ParseError("expected a term", self.peek()[2])
        if deriv is None:
            return _Value(coeff)
        return _Value(images=[coeff * h for h in deriv])

    def _unit(self, slot):
        images = [SuperElement.zero(self.n)] * (2 * self.n)
        images[slot] = SuperElement.const(self.n, 1)
        return images


def parse_element(text, n=None):
    """Parse the text form of an element of A."""
    v = _Parser(text, n).parse()
    if v.images is not None:
        raise ParseError("expected an element, found a derivation", 0)
    return v.element


def parse_derivation(text, n=None):
    """Parse the text form of a derivation.

    Returns a :class:`SuperpointField` when the input only involves ∂ξ and
    odd coefficients of a single degree, else a general ``SuperDerivation``.
    A bare ``0`` parses as the zero field.
    """
    from .derivations import InhomogeneousError, SuperDerivation, SuperpointField

    p = _Parser(text, n)
    v = p.parse()
    n = p.n
    if v.images is None:
        if v.element.is_zero():
            return SuperpointField(n, [SuperElement.zero(n)] * n, -1)
        raise ParseError("expected a derivation, found an element", 0)
    imxi, imx = v.images[:n], v.images[n:]
    if not any(imx) and all(h.is_odd_only() for h in imxi):
        try:
            return SuperpointField(n, imxi)
        except InhomogeneousError:
            pass
    return SuperDerivation(n, imxi, imx)
