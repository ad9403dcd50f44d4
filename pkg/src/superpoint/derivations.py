"""Superderivations of A, the Koszul differential and the extension of fields.

A derivation is stored by its values on the generators xi_1..xi_n and
x_1..x_n; evaluation on other elements goes through the graded Leibniz rule.
"""

from .algebra import DimensionError, SuperElement, _norm, mask_sign, odd_indices


class MixedParityError(ValueError):
    pass


class InhomogeneousError(ValueError):
    pass


def _shift(elements, xi_offset):
    """Set of xi-degree shifts realised by the terms of ``elements``."""
    out = set()
    for off, el in zip(xi_offset, elements):
        for _, mask in el.terms:
            out.add(mask.bit_count() - off)
    return out


class SuperDerivation:
    """A derivation of A given by its images on the generators.

    ``parity`` is 0, 1, or None (mixed); ``degree`` is the shift in
    xi-degree, or None when the images do not share one.  Both are read off
    the images; ``parity``/``degree`` arguments only matter for the zero
    derivation.
    """

    __slots__ = ("n", "images_xi", "images_x", "parity", "degree", "_hash")

    def __init__(self, n, images_xi=None, images_x=None, parity=0, degree=0):
        zero = SuperElement.zero(n)
        images_xi = tuple(images_xi) if images_xi is not None else (zero,) * n
        images_x = tuple(images_x) if images_x is not None else (zero,) * n
        if len(images_xi) != n or len(images_x) != n:
            raise DimensionError("need exactly n images for each kind of generator")
        if any(el.n != n for el in images_xi + images_x):
            raise DimensionError("image lives in the wrong algebra")
        self.n = n
        self.images_xi = images_xi
        self.images_x = images_x
        self._hash = None
        pars = set()
        for el in images_xi:
            pars.update((m.bit_count() + 1) % 2 for _, m in el.terms)
        for el in images_x:
            pars.update(m.bit_count() % 2 for _, m in el.terms)
        if not pars:
            self.parity, self.degree = parity, degree
            return
        self.parity = pars.pop() if len(pars) == 1 else None
        shifts = _shift(images_xi, [1] * n) | _shift(images_x, [0] * n)
        self.degree = shifts.pop() if len(shifts) == 1 else None

    @property
    def z_degree(self):
        return "mixed" if self.degree is None else self.degree

    def is_zero(self):
        return not any(self.images_xi) and not any(self.images_x)

    def __eq__(self, other):
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        return self.n == other.n and self.images_xi == other.images_xi and self.images_x == other.images_x

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.images_xi, self.images_x))
        return self._hash

    def __repr__(self):
        from .textform import format_derivation

        return f"{type(self).__name__}({format_derivation(self)!r})"

    def __str__(self):
        from .textform import format_derivation

        return format_derivation(self)

    def _combine(self, other, f):
        if other.n != self.n:
            raise DimensionError(f"n={self.n} vs n={other.n}")
        return SuperDerivation(
            self.n,
            [f(a, b) for a, b in zip(self.images_xi, other.images_xi)],
            [f(a, b) for a, b in zip(self.images_x, other.images_x)],
            parity=self.parity if self.parity is not None else 0,
            degree=self.degree if self.degree is not None else 0,
        )

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return SuperDerivation(
            self.n,
            [a.scale(c) for a in self.images_xi],
            [a.scale(c) for a in self.images_x],
            parity=self.parity or 0,
            degree=self.degree or 0,
        )

    def __rmul__(self, c):
        return self.scale(c)

    def generator_images(self):
        """Images in the fixed order xi_1..xi_n, x_1..x_n."""
        return self.images_xi + self.images_x

    def coordinates(self):
        """Sparse coordinate dict {(generator slot, monomial key): coeff}."""
        out = {}
        for slot, el in enumerate(self.generator_images()):
            for k, c in el.terms.items():
                out[(slot, k)] = c
        return out

    def apply(self, a):
        """Evaluate on ``a`` by the graded Leibniz rule."""
        if a.n != self.n:
            raise DimensionError(f"n={self.n} vs n={a.n}")
        p = self.parity
        if p is None:
            raise MixedParityError("derivation has no definite parity")
        imx = [el.terms for el in self.images_x]
        imxi = [el.terms for el in self.images_xi]
        out = {}

        def put(key, v):
            w = out.get(key, 0) + v
            if w:
                out[key] = w
            else:
                del out[key]

        for (exps, mask), c in a.terms.items():
            # x^exps is even: delta(x^exps) xi_I with no Koszul sign
            for j, e in enumerate(exps):
                if e and imx[j]:
                    rest = exps[:j] + (e - 1,) + exps[j + 1 :]
                    ce = c * e
                    for (e2, m2), c2 in imx[j].items():
                        s = mask_sign(m2, mask)
                        if s:
                            put((tuple(u + v for u, v in zip(rest, e2)), m2 | mask), s * ce * c2)
            before = 0
            for t, i in enumerate(odd_indices(mask)):
                bit = 1 << i
                after = mask & ~((bit << 1) - 1)
                img = imxi[i]
                if img:
                    ks = -c if (p and t & 1) else c
                    for (e2, m2), c2 in img.items():
                        s1 = mask_sign(before, m2)
                        if not s1:
                            continue
                        s2 = mask_sign(before | m2, after)
                        if not s2:
                            continue
                        put((tuple(u + v for u, v in zip(exps, e2)), before | m2 | after), s1 * s2 * ks * c2)
                before |= bit
        return SuperElement._raw(self.n, {k: _norm(v) for k, v in out.items()})

    __call__ = apply

    def bracket(self, other):
        return bracket(self, other)


class SuperpointField(SuperDerivation):
    """A vector field on the superpoint: an element of W_n = Der Lambda[xi].

    Images of the xi's lie in Lambda^{k+1}; the x's are not touched.  Use
    :func:`extend` for the derivation of A commuting with d.
    """

    __slots__ = ()

    def __init__(self, n, images, degree=None):
        images = tuple(images)
        for h in images:
            if not h.is_odd_only():
                raise ValueError("field images must not involve the even variables")
        super().__init__(n, images, None, parity=(degree or 0) % 2, degree=degree if degree is not None else 0)
        if self.degree is None:
            raise InhomogeneousError("superpoint field must be homogeneous")
        if degree is not None and not self.is_zero() and self.degree != degree:
            raise InhomogeneousError(f"images have degree {self.degree}, not {degree}")

    @property
    def images(self):
        return self.images_xi

    def _as_field(self, d):
        return SuperpointField(self.n, d.images_xi, d.degree)

    def __add__(self, other):
        d = super().__add__(other)
        if isinstance(other, SuperpointField) and d.degree is not None:
            return self._as_field(d)
        return d

    def __sub__(self, other):
        d = super().__sub__(other)
        if isinstance(other, SuperpointField) and d.degree is not None:
            return self._as_field(d)
        return d

    def scale(self, c):
        return SuperpointField(self.n, [h.scale(c) for h in self.images_xi], self.degree)


def apply(delta, a):
    return delta.apply(a)


def bracket(d1, d2):
    """Superbracket [d1, d2] = d1 d2 - (-1)^{p1 p2} d2 d1, evaluated on generators."""
    if d1.n != d2.n:
        raise DimensionError(f"n={d1.n} vs n={d2.n}")
    if d1.parity is None or d2.parity is None:
        raise MixedParityError("bracket needs parity-homogeneous operands")
    sign = -1 if d1.parity and d2.parity else 1
    n = d1.n

    def on(h1, h2):
        # h1 = d1(g), h2 = d2(g)
        return d1.apply(h2) - d2.apply(h1).scale(sign)

    imxi = [on(h1, h2) for h1, h2 in zip(d1.images_xi, d2.images_xi)]
    imx = [on(h1, h2) for h1, h2 in zip(d1.images_x, d2.images_x)]
    par = (d1.parity + d2.parity) % 2
    deg = None if d1.degree is None or d2.degree is None else d1.degree + d2.degree
    if isinstance(d1, SuperpointField) and isinstance(d2, SuperpointField):
        return SuperpointField(n, imxi, deg)
    return SuperDerivation(n, imxi, imx, parity=par, degree=deg if deg is not None else 0)


def koszul_d(n):
    """The odd derivation d with d(xi_i) = x_i and d(x_i) = 0."""
    if n < 1:
        raise ValueError("n must be positive")
    return SuperDerivation(n, [SuperElement.x(n, i) for i in range(1, n + 1)], None, parity=1, degree=-1)


def partial(n, i):
    """The coordinate field d/dxi_i (1-based) as an element of W_n."""
    images = [SuperElement.zero(n)] * n
    images[i - 1] = SuperElement.const(n, 1)
    return SuperpointField(n, images, -1)


def coordinate_field(n, f, i):
    """The field f * d/dxi_i for f in Lambda."""
    images = [SuperElement.zero(n)] * n
    images[i - 1] = f
    degree = f.xi_degrees()[0] - 1 if f else 0
    return SuperpointField(n, images, degree)


def euler(n):
    """E = sum xi_i d/dxi_i."""
    if n < 1:
        raise ValueError("n must be positive")
    return SuperpointField(n, [SuperElement.xi(n, i) for i in range(1, n + 1)], 0)


def extend(delta):
    """Unique derivation of A extending ``delta`` and supercommuting with d.

    On x_i it is (-1)^k d(h_i) for ``delta`` of degree k with h_i = delta(xi_i).
    """
    if not isinstance(delta, SuperpointField):
        raise TypeError("extend expects a SuperpointField")
    if delta.degree is None:
        raise InhomogeneousError("cannot extend an inhomogeneous field")
    d = koszul_d(delta.n)
    k = delta.degree
    imx = [d.apply(h).scale(-1 if k % 2 else 1) for h in delta.images_xi]
    return SuperDerivation(delta.n, delta.images_xi, imx, parity=k % 2, degree=k)


def extend_by_constraint(delta):
    """Recover the images of the x's from [delta~, d] = 0 by an exact linear solve.

    The unknown images of x_1..x_n range over all of x * Lambda^k, i.e. the
    full space allowed by the grading.  Returns ``(derivation, kernel_dim)``;
    a kernel dimension of 0 means the extension is unique.  Independent of
    :func:`extend`; used to cross-check it.
    """
    from .algebra import monomials_of_bidegree
    from .linalg import sparse_nullspace, sparse_solve

    n, k = delta.n, delta.degree
    d = koszul_d(n)
    sign = -1 if k % 2 else 1
    cands = monomials_of_bidegree(n, 1, k) if 0 <= k <= n else []
    unknowns = [(i, m) for i in range(n) for m in cands]

    # [delta~, d](g) = delta~(d g) - (-1)^k d(delta~ g), linear in the unknowns.
    # Column for unknown (i, m): effect of delta~(x_i) = m on the constraint.
    def constraint(imx):
        der = SuperDerivation(n, delta.images_xi, imx, parity=k % 2, degree=k)
        vals = []
        for g in range(1, n + 1):
            xi = SuperElement.xi(n, g)
            vals.append(der.apply(d.apply(xi)) - d.apply(der.apply(xi)).scale(sign))
            x = SuperElement.x(n, g)
            vals.append(der.apply(d.apply(x)) - d.apply(der.apply(x)).scale(sign))
        return vals

    zero = [SuperElement.zero(n)] * n
    base = constraint(zero)
    cols = []
    for i, m in unknowns:
        imx = list(zero)
        imx[i] = m
        col = {}
        for slot, (v, b) in enumerate(zip(constraint(imx), base)):
            for key, c in (v - b).terms.items():
                col[(slot, key)] = c
        cols.append(col)
    rhs = {(slot, key): -c for slot, b in enumerate(base) for key, c in b.terms.items()}
    if not unknowns:
        ok = not rhs
        return (SuperDerivation(n, delta.images_xi, zero, parity=k % 2, degree=k) if ok else None), 0
    sol = sparse_solve(cols, rhs)
    if sol is None:
        return None, None
    kernel = sparse_nullspace(cols)
    imx = list(zero)
    for (i, m), c in zip(unknowns, sol):
        if c:
            imx[i] = imx[i] + m.scale(c)
    return SuperDerivation(n, delta.images_xi, imx, parity=k % 2, degree=k), len(kernel)
