"""Exact arithmetic in A = Q[x1..xn] (x) Lambda[xi1..xin].

A monomial is stored as a pair ``(exps, mask)``: ``exps`` is the tuple of
exponents of the even variables and bit ``i`` of ``mask`` marks the odd
generator xi_{i+1}.  Odd factors are always kept in increasing order; the sign
of the reordering lives in the coefficient.

Coefficients are Python ints when integral and ``Fraction`` otherwise.
"""

from fractions import Fraction
from typing import NamedTuple


class DimensionError(ValueError):
    """Operands live in algebras with different numbers of generators."""


class Bidegree(NamedTuple):
    x_degree: int
    xi_degree: int

    @property
    def parity(self):
        return self.xi_degree % 2


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def to_coeff(c):
    """Coerce ``c`` to an exact coefficient (int or Fraction)."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, str):
        return _norm(Fraction(c))
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not supported")
    return _norm(Fraction(c))


def odd_indices(mask):
    """Zero-based indices of the odd generators in ``mask``, increasing."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_sign(m1, m2):
    """Sign of xi_{m1} * xi_{m2} after sorting; 0 if an index repeats."""
    if m1 & m2:
        return 0
    swaps = 0
    b = m2
    while b:
        low = b & -b
        # factors of m1 sitting above this factor of m2 must be passed over
        swaps += (m1 & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if swaps & 1 else 1


def sort_odd(indices):
    """Return ``(sign, mask)`` for the product xi_{i1} ... xi_{ik} (0-based)."""
    mask = 0
    sign = 1
    for i in indices:
        bit = 1 << i
        if mask & bit:
            return 0, 0
        if (mask & ~((bit << 1) - 1)).bit_count() & 1:
            sign = -sign
        mask |= bit
    return sign, mask


def mono_mul(a, b):
    """Product of two monomial keys: ``(sign, key)`` with sign 0 for zero."""
    s = mask_sign(a[1], b[1])
    if not s:
        return 0, None
    return s, (tuple(p + q for p, q in zip(a[0], b[0])), a[1] | b[1])


def mono_sort_key(key):
    exps, mask = key
    return (sum(exps) + mask.bit_count(), tuple(-e for e in exps), odd_indices(mask))


class SuperElement:
    """An element of A with exact coefficients, stored sparsely.

    Instances are treated as immutable; every operation returns a new object.
    """

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        if terms:
            for key, c in terms.items():
                exps, mask = key
                if len(exps) != n or mask >> n:
                    raise DimensionError(f"monomial {key!r} does not fit n={n}")
                c = to_coeff(c)
                if c:
                    clean[(tuple(exps), mask)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        # trusted constructor: keys already canonical, no zero coefficients
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def const(cls, n, c=1):
        c = to_coeff(c)
        return cls._raw(n, {((0,) * n, 0): c} if c else {})

    @classmethod
    def x(cls, n, i):
        """The even generator x_i (1-based)."""
        if not 1 <= i <= n:
            raise DimensionError(f"x{i} out of range for n={n}")
        exps = [0] * n
        exps[i - 1] = 1
        return cls._raw(n, {(tuple(exps), 0): 1})

    @classmethod
    def xi(cls, n, i):
        """The odd generator xi_i (1-based)."""
        if not 1 <= i <= n:
            raise DimensionError(f"xi{i} out of range for n={n}")
        return cls._raw(n, {((0,) * n, 1 << (i - 1)): 1})

    @classmethod
    def monomial(cls, n, even=None, odd=(), coeff=1):
        """Monomial ``coeff * x^even * xi_{odd[0]} xi_{odd[1]} ...`` (1-based odd).

        ``odd`` may be in any order; the permutation sign is absorbed.
        """
        exps = tuple(even) if even is not None else (0,) * n
        if len(exps) != n or any(e < 0 for e in exps):
            raise DimensionError(f"bad exponent vector {exps!r} for n={n}")
        if any(not 1 <= i <= n for i in odd):
            raise DimensionError(f"odd index out of range in {odd!r}")
        sign, mask = sort_odd([i - 1 for i in odd])
        c = to_coeff(coeff) * sign
        return cls._raw(n, {(exps, mask): c} if c else {})

    # basic protocol

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, SuperElement):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == SuperElement.const(self.n, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .textform import format_element

        return f"SuperElement({format_element(self)!r})"

    def __str__(self):
        from .textform import format_element

        return format_element(self)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: mono_sort_key(kv[0]))

    def _coerce(self, other):
        if isinstance(other, SuperElement):
            if other.n != self.n:
                raise DimensionError(f"n={self.n} vs n={other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return SuperElement.const(self.n, other)
        return None

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _norm(v)
            else:
                out.pop(k, None)
        return SuperElement._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c):
        c = to_coeff(c)
        if not c:
            return SuperElement.zero(self.n)
        return SuperElement._raw(self.n, {k: _norm(v * c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for (e1, m1), c1 in self.terms.items():
            for (e2, m2), c2 in other.terms.items():
                s = mask_sign(m1, m2)
                if not s:
                    continue
                key = (tuple(p + q for p, q in zip(e1, e2)), m1 | m2)
                v = out.get(key, 0) + (c1 * c2 if s > 0 else -c1 * c2)
                if v:
                    out[key] = v
                else:
                    del out[key]
        return SuperElement._raw(self.n, {k: _norm(v) for k, v in out.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = SuperElement.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    # grading

    def bidegrees(self):
        return sorted({Bidegree(sum(e), m.bit_count()) for e, m in self.terms})

    def homogeneous_component(self, d):
        d = Bidegree(*d)
        return SuperElement._raw(
            self.n,
            {k: c for k, c in self.terms.items() if sum(k[0]) == d.x_degree and k[1].bit_count() == d.xi_degree},
        )

    def components(self):
        return {d: self.homogeneous_component(d) for d in self.bidegrees()}

    def is_homogeneous(self):
        return len(self.bidegrees()) <= 1

    @property
    def parity(self):
        """0 or 1 for parity-homogeneous elements (zero counts as even), else None."""
        ps = {m.bit_count() % 2 for _, m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def xi_degrees(self):
        return sorted({m.bit_count() for _, m in self.terms})

    def x_degrees(self):
        return sorted({sum(e) for e, _ in self.terms})

    def is_even_only(self):
        """True when no odd generator occurs (an element of Q[x])."""
        return all(m == 0 for _, m in self.terms)

    def is_odd_only(self):
        """True when no even generator occurs (an element of Lambda[xi])."""
        return all(not any(e) for e, _ in self.terms)

    def coefficient(self, even=None, odd=()):
        exps = tuple(even) if even is not None else (0,) * self.n
        sign, mask = sort_odd([i - 1 for i in odd])
        if not sign:
            return 0
        return sign * self.terms.get((exps, mask), 0)

    def constant_term(self):
        return self.terms.get(((0,) * self.n, 0), 0)

    # substitutions

    def evaluate_even(self, point):
        """Substitute the rationals ``point`` for x1..xn; the result lies in Lambda."""
        if len(point) != self.n:
            raise DimensionError(f"point of length {len(point)} for n={self.n}")
        p = [to_coeff(v) for v in point]
        zero = (0,) * self.n
        out = {}
        for (exps, mask), c in self.terms.items():
            v = c
            for pi, e in zip(p, exps):
                if e:
                    v = v * pi**e
                    if not v:
                        break
            if v:
                w = out.get((zero, mask), 0) + v
                if w:
                    out[(zero, mask)] = w
                else:
                    del out[(zero, mask)]
        return SuperElement._raw(self.n, {k: _norm(v) for k, v in out.items()})

    def linear_substitution(self, g):
        """Apply the algebra automorphism x_i -> sum_j g[i][j] x_j, xi_i -> sum_j g[i][j] xi_j."""
        n = self.n
        xs = [sum((SuperElement.x(n, j + 1).scale(g[i][j]) for j in range(n)), SuperElement.zero(n)) for i in range(n)]
        xis = [sum((SuperElement.xi(n, j + 1).scale(g[i][j]) for j in range(n)), SuperElement.zero(n)) for i in range(n)]
        out = SuperElement.zero(n)
        for (exps, mask), c in self.terms.items():
            t = SuperElement.const(n, c)
            for i, e in enumerate(exps):
                for _ in range(e):
                    t = t * xs[i]
            for i in odd_indices(mask):
                t = t * xis[i]
            out = out + t
        return out

    # serialization

    def to_json(self):
        return [
            {"coeff": str(Fraction(c)), "even": list(e), "odd": [i + 1 for i in odd_indices(m)]}
            for (e, m), c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, n, data):
        out = cls.zero(n)
        for t in data:
            out = out + cls.monomial(n, t["even"], t["odd"], Fraction(t["coeff"]))
        return out


def partial_xi(a, i):
    """Left partial derivative d/dxi_i (1-based) of ``a``."""
    bit = 1 << (i - 1)
    out = {}
    for (exps, mask), c in a.terms.items():
        if mask & bit:
            # move xi_i to the front past the lower odd factors
            below = (mask & (bit - 1)).bit_count()
            out[(exps, mask ^ bit)] = -c if below & 1 else c
    return SuperElement._raw(a.n, out)


def partial_x(a, i):
    """Partial derivative d/dx_i (1-based) of ``a``."""
    j = i - 1
    out = {}
    for (exps, mask), c in a.terms.items():
        e = exps[j]
        if e:
            new = exps[:j] + (e - 1,) + exps[j + 1 :]
            key = (new, mask)
            v = out.get(key, 0) + c * e
            if v:
                out[key] = v
            else:
                del out[key]
    return SuperElement._raw(a.n, out)


def odd_monomials(n, degree):
    """All monomials of Lambda^degree as increasing 1-based index tuples."""
    from itertools import combinations

    if degree < 0 or degree > n:
        return []
    return list(combinations(range(1, n + 1), degree))


def even_exponents(n, degree):
    """All exponent vectors of total degree ``degree`` in n variables (graded lex, descending)."""
    if n == 0:
        return [()] if degree == 0 else []
    if n == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in even_exponents(n - 1, degree - first):
            out.append((first,) + rest)
    return out


def monomials_of_bidegree(n, x_degree, xi_degree):
    return [
        SuperElement.monomial(n, e, odd)
        for e in even_exponents(n, x_degree)
        for odd in odd_monomials(n, xi_degree)
    ]
