"""Localized elements on the charts of P(V), the quotient A' = A/omega A,
and the actions of W_n and DH_n on them.

Chart i is U_i = {x_i != 0}.  Over U_i the annihilator bundle has the frame
eta_j = xi_j - (x_j/x_i) xi_i, j != i, which lies in the kernel of d.
"""

import random
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .algebra import DimensionError, SuperElement, _norm, even_exponents, mono_mul
from .derivations import SuperDerivation, bracket, extend, koszul_d
from .linalg import rank
from .report import Check, Report
from .vectorial import QuadraticForm, dh_basis, hamiltonian_defect, proportionality, w_basis_all


class ChartError(ValueError):
    pass


class NotInDHError(ValueError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# localized elements


class LocalizedElement:
    """A fraction f/g with f in A and g a nonzero polynomial in the x's.

    When g is a single monomial the fraction is stored in lowest terms with
    a monic denominator, so equal fractions compare equal structurally.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None):
        n = numerator.n
        if denominator is None:
            denominator = SuperElement.const(n, 1)
        elif isinstance(denominator, (int, Fraction)):
            denominator = SuperElement.const(n, denominator)
        if denominator.n != n:
            raise DimensionError("numerator and denominator disagree on n")
        if not denominator:
            raise ZeroDivisionError("zero denominator")
        if not denominator.is_even_only():
            raise ValueError("denominator must not involve odd generators")
        self.numerator, self.denominator = _cancel(numerator, denominator)

    @property
    def n(self):
        return self.numerator.n

    def __repr__(self):
        return f"LocalizedElement(({self.numerator}) / ({self.denominator}))"

    def __str__(self):
        if self.denominator == 1:
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"

    def is_zero(self):
        return self.numerator.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def _coerce(self, other):
        if isinstance(other, LocalizedElement):
            return other
        if isinstance(other, SuperElement):
            return LocalizedElement(other)
        if isinstance(other, (int, Fraction)):
            return LocalizedElement(SuperElement.const(self.n, other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.denominator == other.denominator:
            return LocalizedElement(self.numerator + other.numerator, self.denominator)
        return LocalizedElement(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return LocalizedElement(-self.numerator, self.denominator)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LocalizedElement(self.numerator * other.numerator, self.denominator * other.denominator)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self

    def scale(self, c):
        return LocalizedElement(self.numerator.scale(c), self.denominator)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.denominator == other.denominator:
            return self.numerator == other.numerator
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def is_homogeneous(self):
        """True when every numerator term has the x-degree of the (homogeneous) denominator."""
        dd = self.denominator.x_degrees()
        if len(dd) != 1:
            return False
        nd = self.numerator.x_degrees()
        return not nd or nd == dd

    def evaluate(self, point):
        """Value at a point of V, an element of Lambda; None where the denominator vanishes."""
        g = self.denominator.evaluate_even(point).constant_term()
        if not g:
            return None
        return self.numerator.evaluate_even(point).scale(Fraction(1) / Fraction(g))

    def xi_degrees(self):
        return self.numerator.xi_degrees()

    def over(self, power, i):
        """Numerator after rewriting the denominator as x_i^power (needs den | x_i^power)."""
        n = self.n
        e, c = _monomial_denominator(self.denominator)
        if e is None or any(v for j, v in enumerate(e) if j != i - 1) or e[i - 1] > power:
            raise ChartError(f"{self} is not over a power of x{i} dividing x{i}^{power}")
        exps = [0] * n
        exps[i - 1] = power - e[i - 1]
        return (self.numerator * SuperElement.monomial(n, exps)).scale(Fraction(1) / Fraction(c))


def _monomial_denominator(g):
    if len(g.terms) != 1:
        return None, None
    ((e, _), c), = g.terms.items()
    return e, c


def _cancel(f, g):
    e, c = _monomial_denominator(g)
    if e is None:
        return f, g
    n = f.n
    low = list(e)
    for (fe, _) in f.terms:
        low = [min(a, b) for a, b in zip(low, fe)]
        if not any(low):
            break
    if not f.terms:
        return f, SuperElement.const(n, 1)
    inv = Fraction(1) / Fraction(c)
    newe = tuple(a - b for a, b in zip(e, low))
    if not any(low):
        num = f.scale(inv) if c != 1 else f
    else:
        num = SuperElement._raw(
            n,
            {(tuple(a - b for a, b in zip(fe, low)), m): _norm(v * inv) for (fe, m), v in f.terms.items()},
        )
    return num, SuperElement._raw(n, {(newe, 0): 1})


def localized(f, g=None):
    return LocalizedElement(f, g)


def apply_localized(delta, u):
    """delta(f/g) = (g delta(f) - delta(g) f) / g^2 for a derivation of A."""
    f, g = u.numerator, u.denominator
    df = delta.apply(f)
    if g == 1:
        return LocalizedElement(df)
    dg = delta.apply(g)
    if not dg:
        return LocalizedElement(df, g)
    return LocalizedElement(g * df - dg * f, g * g)


def d_localized(u):
    """The Koszul differential on B; it kills every x, so only the numerator moves."""
    return LocalizedElement(koszul_d(u.n).apply(u.numerator), u.denominator)


# ---------------------------------------------------------------------------
# points, charts and frames


class ProjectivePoint:
    """A point of P(V) in homogeneous coordinates, first nonzero coordinate 1."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = [Fraction(c) for c in coords]
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        self.coords = tuple(_norm(c / lead) for c in coords)

    @property
    def n(self):
        return len(self.coords)

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def chart(self):
        """Smallest i with x_i(z) != 0."""
        return next(i + 1 for i, c in enumerate(self.coords) if c)


def chart_function(n, i, j):
    """t_j = x_j / x_i on chart i."""
    return LocalizedElement(SuperElement.x(n, j), SuperElement.x(n, i))


def frame_section(n, i, j):
    """eta_j = xi_j - (x_j/x_i) xi_i on chart i (j != i)."""
    if i == j:
        raise ValueError("frame index must differ from the chart index")
    num = SuperElement.x(n, i) * SuperElement.xi(n, j) - SuperElement.x(n, j) * SuperElement.xi(n, i)
    return LocalizedElement(num, SuperElement.x(n, i))


def frame(n, i):
    return {j: frame_section(n, i, j) for j in range(1, n + 1) if j != i}


def chart_functions(n, i):
    return {j: chart_function(n, i, j) for j in range(1, n + 1) if j != i}


def in_chart_algebra(u, i):
    """u lies in the localized algebra of chart i: degree-0 fractions over powers of x_i."""
    if u.is_zero():
        return True
    e, _ = _monomial_denominator(u.denominator)
    if e is None or any(v for j, v in enumerate(e) if j != i - 1):
        return False
    return u.is_homogeneous()


class Verdict(Enum):
    STRUCTURE = "in O^a_z"
    AMBIENT_ONLY = "in hat O^a_z only"
    OUTSIDE = "not in hat O^a_z"


def stalk_membership(u, z):
    """Classify u against the stalks at z: the kernel of d cuts O^a_z out of hat O^a_z."""
    if not isinstance(z, ProjectivePoint):
        z = ProjectivePoint(z)
    if not u.is_homogeneous():
        return Verdict.OUTSIDE
    if not u.denominator.evaluate_even(z.coords).constant_term():
        return Verdict.OUTSIDE
    if d_localized(u).is_zero():
        return Verdict.STRUCTURE
    return Verdict.AMBIENT_ONLY


def pointwise_d(point):
    """d_x = sum x_i d/dxi_i on Lambda with the numeric point x."""
    n = len(point)
    return SuperDerivation(n, [SuperElement.const(n, c) for c in point], None, parity=1, degree=-1)


def pointwise_annihilator_check(u, samples):
    """Compare the symbolic test du = 0 with d_x u(x) = 0 at sample points.

    Also checks the pointwise identity (du)(x) = d_x(u(x)).  Returns a dict
    with the per-sample values, skipped samples, and the two verdicts.
    """
    du = d_localized(u)
    symbolic = du.is_zero()
    values = []
    skipped = []
    identity = True
    for x in samples:
        ux = u.evaluate(x)
        if ux is None:
            skipped.append(tuple(x))
            continue
        v = pointwise_d(x).apply(ux)
        if du.evaluate(x) != v:
            identity = False
        values.append((tuple(x), v))
    pointwise = all(v.is_zero() for _, v in values)
    return {
        "symbolic_zero": symbolic,
        "pointwise_zero": pointwise,
        "agree": symbolic == pointwise,
        "identity": identity,
        "values": values,
        "skipped": skipped,
    }


def frame_matrix(n, i, point):
    """Rows: coefficient vectors of the evaluated frame covectors eta_j(x)."""
    rows = []
    for j, eta in frame(n, i).items():
        v = eta.evaluate(point)
        rows.append([v.coefficient(None, (l,)) for l in range(1, n + 1)])
    return rows


def frame_spans_annihilator(n, i, point):
    """Evaluated frame has rank n-1 and kills the point: it spans Ann x."""
    rows = frame_matrix(n, i, point)
    kills = all(sum(Fraction(r) * Fraction(p) for r, p in zip(row, point)) == 0 for row in rows)
    return kills and rank(rows, n) == n - 1


def pointwise_kernel_dim(point, degree):
    """dim of ker d_x on Lambda^degree, by exact nullspace."""
    from .algebra import monomials_of_bidegree
    from .linalg import CoordinateIndex, nullspace

    n = len(point)
    dx = pointwise_d(point)
    mons = monomials_of_bidegree(n, 0, degree)
    cols = [dx.apply(m) for m in mons]
    idx = CoordinateIndex()
    for c in cols:
        for key in c.terms:
            idx.col(key)
    rows = [[0] * len(cols) for _ in range(len(idx))]
    for j, c in enumerate(cols):
        for key, v in c.terms.items():
            rows[idx.index[key]][j] = v
    if not rows:
        return len(cols)
    return len(nullspace(rows, len(cols)))


def random_point(n, rng, chart=None, bound=5):
    """Random integer point with x_chart != 0 (and not the zero vector)."""
    while True:
        p = [rng.randint(-bound, bound) for _ in range(n)]
        if chart is not None and not p[chart - 1]:
            continue
        if any(p):
            return p


def _random_function(n, i, rng, max_degree=2):
    """Random degree-0 fraction f / x_i^m on chart i."""
    m = rng.randint(0, max_degree)
    mons = even_exponents(n, m)
    f = SuperElement.zero(n)
    for e in rng.sample(mons, min(len(mons), rng.randint(1, 3))):
        f = f + SuperElement.monomial(n, e, (), rng.choice([-3, -2, -1, 1, 2, 3, Fraction(1, 2)]))
    exps = [0] * n
    exps[i - 1] = m
    return LocalizedElement(f, SuperElement.monomial(n, exps))


def random_kernel_element(n, i, rng):
    """Random combination of frame monomials eta_J with function coefficients."""
    etas = frame(n, i)
    idx = sorted(etas)
    out = LocalizedElement(SuperElement.zero(n))
    for _ in range(rng.randint(1, 3)):
        size = rng.randint(0, min(2, len(idx)))
        J = rng.sample(idx, size)
        term = _random_function(n, i, rng)
        for j in J:
            term = term * etas[j]
        out = out + term
    return out


def random_localized(n, i, rng, in_kernel):
    u = random_kernel_element(n, i, rng)
    if in_kernel:
        return u
    odd = rng.sample(range(1, n + 1), rng.randint(1, min(2, n)))
    extra = _random_function(n, i, rng) * LocalizedElement(SuperElement.monomial(n, None, odd))
    if extra.is_zero():
        extra = LocalizedElement(SuperElement.monomial(n, None, odd))
    return u + extra


def verify_lemma_2_1(n, samples=20, seed=0, random_elements=50, charts=None):
    """Symbolic du = 0 against pointwise d_x u(x) = 0 on every chart."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = random.Random(seed)
    charts = list(range(1, n + 1)) if charts is None else charts
    report = Report("lemma21", n=n, seed=seed, samples=samples)
    tested = agree = identity_ok = 0
    intent_ok = True
    frame_ok = True
    kernel_dims_ok = True
    membership_ok = True
    first_bad = None
    points_log = {}
    for i in charts:
        pts = [random_point(n, rng, chart=i) for _ in range(samples)]
        points_log[str(i)] = [list(map(str, p)) for p in pts]
        elements = []
        for j, eta in frame(n, i).items():
            elements.append((f"eta{j}", eta, True))
        for j, t in chart_functions(n, i).items():
            elements.append((f"t{j}", t, True))
        for l in range(1, n + 1):
            elements.append((f"xi{l}", LocalizedElement(SuperElement.xi(n, l)), False))
        for r in range(random_elements):
            want = r % 2 == 0
            elements.append((f"random{r}", random_localized(n, i, rng, want), want))
        for name, u, expect in elements:
            res = pointwise_annihilator_check(u, pts)
            tested += 1
            agree += res["agree"]
            identity_ok += res["identity"]
            if res["symbolic_zero"] != expect:
                intent_ok = False
            if (not res["agree"] or not res["identity"]) and first_bad is None:
                first_bad = f"chart {i} {name}: {u}"
            z = ProjectivePoint(pts[0])
            verdict = stalk_membership(u, z)
            want_verdict = Verdict.STRUCTURE if res["symbolic_zero"] else Verdict.AMBIENT_ONLY
            if verdict != want_verdict:
                membership_ok = False
        for p in pts:
            if not frame_spans_annihilator(n, i, p):
                frame_ok = False
        for p in pts[:3]:
            from math import comb

            for m in range(n + 1):
                if pointwise_kernel_dim(p, m) != comb(n - 1, m):
                    kernel_dims_ok = False
    report.add(Check("symbolic_vs_pointwise", agree == tested, f"{agree}/{tested} elements agree" + (f"; {first_bad}" if first_bad else "")))
    report.add(Check("pointwise_identity", identity_ok == tested, f"(du)(x) = d_x u(x) for {identity_ok}/{tested} elements"))
    report.add(Check("generated_kernel_membership", intent_ok, "frame products lie in ker d, perturbed elements do not"))
    report.add(Check("stalk_verdicts", membership_ok, "stalk_membership matches the symbolic kernel test"))
    report.add(Check("frame_spans_annihilator", frame_ok, "evaluated frame has rank n-1 and annihilates x"))
    report.add(Check("pointwise_kernel_dims", kernel_dims_ok, "dim ker d_x on Lambda^m = C(n-1, m)"))
    report.extra["points"] = points_log
    return report


# ---------------------------------------------------------------------------
# frame expansion and (gamma_0, gamma_1) pairs


def frame_expand(u, i):
    """Coordinates of u over the frame monomials eta_J on chart i.

    Returns ``(coeffs, residual)``: ``coeffs`` maps increasing index tuples
    J (j != i) to degree-0 fractions, and ``residual`` is the part involving
    xi_i, which vanishes exactly when du = 0.
    """
    n = u.n
    xi_x = SuperElement.x(n, i)
    subst = {}
    for j in range(1, n + 1):
        if j == i:
            subst[j] = (SuperElement.xi(n, i), 0)
        else:
            # xi_j = eta_j + (x_j/x_i) xi_i; index j below stands for eta_j
            subst[j] = (xi_x * SuperElement.xi(n, j) + SuperElement.x(n, j) * SuperElement.xi(n, i), 1)
    total = LocalizedElement(SuperElement.zero(n))
    for (exps, mask), c in u.numerator.terms.items():
        num = SuperElement._raw(n, {(exps, 0): c})
        power = 0
        for j in range(1, n + 1):
            if mask >> (j - 1) & 1:
                img, p = subst[j]
                num = num * img
                power += p
        den = u.denominator * SuperElement.monomial(n, [power if l == i - 1 else 0 for l in range(n)])
        total = total + LocalizedElement(num, den)
    ibit = 1 << (i - 1)
    groups = {}
    residual = {}
    for (exps, mask), c in total.numerator.terms.items():
        target = residual if mask & ibit else groups.setdefault(mask, {})
        target[(exps, mask)] = c
    coeffs = {}
    for mask, terms in sorted(groups.items()):
        J = tuple(j + 1 for j in range(n) if mask >> j & 1)
        even = SuperElement._raw(n, {(e, 0): c for (e, _), c in terms.items()})
        coeffs[J] = LocalizedElement(even, total.denominator)
    res = LocalizedElement(SuperElement._raw(n, residual), total.denominator)
    return coeffs, res


def frame_combine(coeffs, n, i):
    """Inverse of :func:`frame_expand` on the kernel part."""
    etas = frame(n, i)
    out = LocalizedElement(SuperElement.zero(n))
    for J, f in coeffs.items():
        term = f
        for j in J:
            term = term * etas[j]
        out = out + term
    return out


class GammaPair:
    """A derivation of the chart algebra split into its action on frame
    sections (gamma_0) and on even functions (gamma_1)."""

    def __init__(self, chart, n, degree, gamma0, gamma1, derivation):
        self.chart = chart
        self.n = n
        self.degree = degree
        self.gamma0 = gamma0
        self.gamma1 = gamma1
        self.derivation = derivation

    def gamma0_value(self, j):
        return frame_combine(self.gamma0[j], self.n, self.chart)

    def gamma1_value(self, j):
        return frame_combine(self.gamma1[j], self.n, self.chart)

    def is_zero(self):
        return not any(self.gamma0.values()) and not any(self.gamma1.values())

    def gamma1_of(self, phi_indices):
        """gamma_1 on a product of chart functions t_j, expanded by the Leibniz rule."""
        n, i = self.n, self.chart
        out = LocalizedElement(SuperElement.zero(n))
        for pos, j in enumerate(phi_indices):
            rest = LocalizedElement(SuperElement.const(n, 1))
            for q, l in enumerate(phi_indices):
                if q != pos:
                    rest = rest * chart_function(n, i, l)
            out = out + rest * self.gamma1_value(j)
        return out

    def check_conditions(self):
        """Both Leibniz conditions on the generating set, against direct evaluation."""
        n, i = self.n, self.chart
        ts = sorted(chart_functions(n, i))
        etas = frame(n, i)
        ok = True
        phis = [(j,) for j in ts] + [(j, l) for j, l in combinations(ts, 2)] + [(j, j) for j in ts]
        for phi in phis:
            phi_val = LocalizedElement(SuperElement.const(n, 1))
            for j in phi:
                phi_val = phi_val * chart_function(n, i, j)
            g1 = self.gamma1_of(phi)
            if apply_localized(self.derivation, phi_val) != g1:
                ok = False
            for l, s in etas.items():
                lhs = apply_localized(self.derivation, phi_val * s)
                rhs = g1 * s + phi_val * self.gamma0_value(l)
                if lhs != rhs:
                    ok = False
        return ok


def gamma_pair(gamma, chart):
    """Split a derivation preserving chart ``chart`` into (gamma_0, gamma_1)."""
    n = gamma.n
    gamma0 = {}
    gamma1 = {}
    for j, eta in frame(n, chart).items():
        v = apply_localized(gamma, eta)
        if not in_chart_algebra(v, chart):
            raise ChartError(f"image of eta{j} leaves the chart algebra")
        coeffs, res = frame_expand(v, chart)
        if res:
            raise ChartError(f"image of eta{j} is not a section of Lambda(E)")
        gamma0[j] = coeffs
    for j, t in chart_functions(n, chart).items():
        v = apply_localized(gamma, t)
        if not in_chart_algebra(v, chart):
            raise ChartError(f"image of t{j} leaves the chart algebra")
        coeffs, res = frame_expand(v, chart)
        if res:
            raise ChartError(f"image of t{j} is not a section of Lambda(E)")
        gamma1[j] = coeffs
    degree = gamma.degree if gamma.degree is not None else 0
    return GammaPair(chart, n, degree, gamma0, gamma1, gamma)


# ---------------------------------------------------------------------------
# quotient A' = A / omega A


class QuotientError(ValueError):
    pass


def _reduction_data(omega):
    if not omega.is_diagonal():
        raise QuotientError("quotient reduction needs a diagonal form; diagonalize first")
    diag = [omega.matrix[i][i] for i in range(omega.n)]
    return diag


def divide_by_form(a, omega):
    """``(q, r)`` with a = q*omega + r and r free of x_n^2."""
    n = a.n
    diag = _reduction_data(omega)
    cn = diag[-1]
    work = dict(a.terms)
    rem = {}
    quo = {}

    def bump(d, key, v):
        w = d.get(key, 0) + v
        if w:
            d[key] = w
        else:
            d.pop(key, None)

    while work:
        key, c = work.popitem()
        exps, mask = key
        if exps[-1] < 2:
            bump(rem, key, c)
            continue
        base = exps[:-1] + (exps[-1] - 2,)
        f = Fraction(c) / cn
        # c x^base x_n^2 = f x^base (omega - sum_{i<n} c_i x_i^2)
        bump(quo, (base, mask), f)
        for i in range(n - 1):
            if diag[i]:
                e = list(base)
                e[i] += 2
                k2 = (tuple(e), mask)
                w = work.get(k2, 0) - f * diag[i]
                if w:
                    work[k2] = w
                else:
                    work.pop(k2, None)
    q = SuperElement._raw(n, {k: _norm(v) for k, v in quo.items()})
    r = SuperElement._raw(n, {k: _norm(v) for k, v in rem.items()})
    return q, r


class QuotientElement:
    """Class in A' = A/omega A, held by its normal-form representative."""

    __slots__ = ("omega", "representative")

    def __init__(self, a, omega, reduced=False):
        self.omega = omega
        self.representative = a if reduced else divide_by_form(a, omega)[1]

    @property
    def n(self):
        return self.representative.n

    def lift(self):
        return self.representative

    def __eq__(self, other):
        if isinstance(other, QuotientElement):
            return self.omega == other.omega and self.representative == other.representative
        return NotImplemented

    def __hash__(self):
        return hash(self.representative)

    def __add__(self, other):
        return QuotientElement(self.representative + other.representative, self.omega, reduced=True)

    def __sub__(self, other):
        return QuotientElement(self.representative - other.representative, self.omega, reduced=True)

    def __neg__(self):
        return QuotientElement(-self.representative, self.omega, reduced=True)

    def __mul__(self, other):
        return QuotientElement(self.representative * other.representative, self.omega)

    def is_zero(self):
        return self.representative.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"QuotientElement({self.representative})"

    def __str__(self):
        return f"[{self.representative}]"


def quotient_reduce(a, omega):
    return QuotientElement(a, omega)


def is_normal_form(a):
    return all(exps[-1] < 2 for exps, _ in a.terms)


class InducedDerivation:
    """A derivation of A preserving omega A, acting on A'."""

    def __init__(self, derivation, omega, field=None, factor=None):
        self.derivation = derivation
        self.omega = omega
        self.field = field
        self.factor = factor

    @property
    def parity(self):
        return self.derivation.parity

    def apply(self, q):
        return QuotientElement(self.derivation.apply(q.lift()), self.omega)

    __call__ = apply


def induced_derivation(delta, omega):
    """The derivation of A' determined by a field in DH(omega)."""
    c = proportionality(delta, omega)
    if c is None:
        raise NotInDHError(f"{delta} is not in DH(omega)", hamiltonian_defect(delta, omega))
    return InducedDerivation(extend(delta), omega, field=delta, factor=c)


def induced_d(omega):
    """d' on A'; d(omega) = 0 so d preserves omega A."""
    return InducedDerivation(koszul_d(omega.n), omega)


def quotient_generators(omega):
    n = omega.n
    return [QuotientElement(SuperElement.xi(n, i), omega) for i in range(1, n + 1)] + [
        QuotientElement(SuperElement.x(n, i), omega) for i in range(1, n + 1)
    ]


def induced_bracket_on(D1, D2, q):
    sign = -1 if D1.parity and D2.parity else 1
    a = D1.apply(D2.apply(q))
    b = D2.apply(D1.apply(q))
    return a - b if sign > 0 else a + b


def random_element(n, rng, max_x=3, max_terms=4):
    out = SuperElement.zero(n)
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(0, max_x)
        e = rng.choice(even_exponents(n, deg))
        odd = rng.sample(range(1, n + 1), rng.randint(0, min(2, n)))
        out = out + SuperElement.monomial(n, e, odd, rng.choice([-2, -1, 1, 2, 3, Fraction(1, 3)]))
    return out


def verify_quotient(n, omega=None, trials=20, seed=0):
    """Exactness and idempotence of the reduction, d'^2 = 0, and
    representative independence of every induced DH field."""
    if omega is None:
        omega = QuadraticForm.standard(n)
    rng = random.Random(seed)
    report = Report("quotient", n=n, omega=omega, seed=seed, samples=trials)
    w = omega.element()
    exact = idem = True
    for _ in range(trials):
        a = random_element(n, rng)
        q, r = divide_by_form(a, omega)
        if a - r != q * w or not is_normal_form(r):
            exact = False
        if divide_by_form(r, omega)[1] != r:
            idem = False
    report.add(Check("reduction_exact", exact, f"a - reduce(a) = q*omega on {trials} random elements"))
    report.add(Check("reduction_idempotent", idem, "reduce(reduce(a)) = reduce(a)"))
    report.add(Check("omega_reduces_to_zero", quotient_reduce(w, omega).is_zero(), "reduce(omega) = 0"))
    dprime = induced_d(omega)
    gens = quotient_generators(omega)
    dd_gens = all(dprime.apply(dprime.apply(g)).is_zero() for g in gens)
    dd_rand = all(dprime.apply(dprime.apply(QuotientElement(random_element(n, rng), omega))).is_zero() for _ in range(trials))
    report.add(Check("dprime_squared_zero", dd_gens and dd_rand, "d'(d'(a)) = 0 on generators and random classes"))
    well = True
    witness = ""
    count = 0
    for k in range(-1, n):
        for f in dh_basis(n, omega, k).basis:
            D = induced_derivation(f, omega)
            count += 1
            for _ in range(trials):
                a = random_element(n, rng)
                r = random_element(n, rng, max_x=1, max_terms=2)
                if D.apply(QuotientElement(a + w * r, omega)) != D.apply(QuotientElement(a, omega)):
                    well = False
                    witness = witness or f"{f} on {a} + omega*({r})"
    report.add(Check("induced_representative_independent", well, witness or f"{count} DH fields x {trials} perturbations"))
    return report


# ---------------------------------------------------------------------------
# the maps W_n -> Der O^a and DH_n -> Der A'


def _chart_generators(n, i):
    gens = [(f"t{j}", t) for j, t in chart_functions(n, i).items()]
    gens += [(f"eta{j}", e) for j, e in frame(n, i).items()]
    return gens


def _localized_coordinates(values, i, tag):
    """Sparse coordinates of localized values over a common power of x_i."""
    power = 0
    for v in values:
        e, _ = _monomial_denominator(v.denominator)
        power = max(power, e[i - 1])
    out = {}
    for slot, v in enumerate(values):
        for key, c in v.over(power, i).terms.items():
            out[(tag, slot, key)] = c
    return out


def verify_w_action(n, charts=None):
    """W_n acts on every chart by derivations preserving hat O^a and O^a,
    and the assignment is an injective bracket-preserving map."""
    basis = w_basis_all(n)
    charts = list(range(1, n + 1)) if charts is None else charts
    report = Report("waction", n=n)
    ext = [extend(b) for b in basis]
    d = koszul_d(n)
    hyp_ok = True
    for g in ext:
        for img in g.images_x:
            if img and img.x_degrees() != [1]:
                hyp_ok = False
    report.add(Check("linear_in_x_hypothesis", hyp_ok, "delta~(x_i) = sum v_ij x_j with v_ij in Lambda"))
    preserve_ok = quotient_rule_ok = kernel_ok = True
    hom_ok = True
    first = {}
    images = {}
    for i in charts:
        gens = _chart_generators(n, i)
        ambient = gens + [(f"xi{l}", LocalizedElement(SuperElement.xi(n, l))) for l in range(1, n + 1)]
        for bi, g in enumerate(ext):
            vals = []
            for name, u in ambient:
                v = apply_localized(g, u)
                if not in_chart_algebra(v, i):
                    preserve_ok = False
                    first.setdefault("preserve", f"chart {i}, {basis[bi]} on {name}")
                if name.startswith("eta") and not d_localized(v).is_zero():
                    kernel_ok = False
                    first.setdefault("kernel", f"chart {i}, {basis[bi]} on {name}")
                vals.append(v)
            images[(i, bi)] = vals[: len(gens)]
            # delta(x_j) = delta(t_j) x_i + t_j delta(x_i)
            for j in range(1, n + 1):
                if j == i:
                    continue
                t = chart_function(n, i, j)
                lhs = LocalizedElement(g.apply(SuperElement.x(n, j)))
                rhs = apply_localized(g, t) * SuperElement.x(n, i) + t * LocalizedElement(g.apply(SuperElement.x(n, i)))
                if lhs != rhs:
                    quotient_rule_ok = False
        for a in range(len(basis)):
            for b in range(a, len(basis)):
                br = extend(bracket(basis[a], basis[b]))
                ga, gb = ext[a], ext[b]
                sign = -1 if ga.parity and gb.parity else 1
                for slot, (name, u) in enumerate(gens):
                    lhs = apply_localized(br, u)
                    ub = images[(i, b)][slot]
                    ua = images[(i, a)][slot]
                    rhs = apply_localized(ga, ub) - apply_localized(gb, ua).scale(sign)
                    if lhs != rhs:
                        hom_ok = False
                        first.setdefault("hom", f"chart {i}: [{basis[a]}, {basis[b]}] on {name}")
    report.add(Check("preserves_chart_algebra", preserve_ok, first.get("preserve", "images of t_j, xi_l, eta_j stay in the chart algebra")))
    report.add(Check("quotient_rule", quotient_rule_ok, "delta(f/g) = (g delta f - f delta g)/g^2 consistent with delta on A"))
    report.add(Check("preserves_ker_d", kernel_ok, first.get("kernel", "d(delta~ eta_j) = 0 on every chart")))
    report.add(Check("bracket_preserving", hom_ok, first.get("hom", f"{len(basis) * (len(basis) + 1) // 2} pairs x {len(charts)} charts")))
    vectors = []
    for bi in range(len(basis)):
        v = {}
        for i in charts:
            v.update(_localized_coordinates(images[(i, bi)], i, i))
        vectors.append(v)
    keys = sorted({k for v in vectors for k in v}, key=repr)
    mat = [[v.get(k, 0) for k in keys] for v in vectors]
    r = rank(mat, len(keys)) if keys else 0
    report.add(Check("injective", r == len(basis), f"rank {r} of {len(basis)} chart actions on t_j, eta_j"))
    return report


def verify_dh_action(n, omega=None, seed=0, trials=20):
    """DH(omega) acts on A' by well-defined derivations supercommuting with d',
    injectively and compatibly with brackets."""
    if omega is None:
        omega = QuadraticForm.standard(n)
    rng = random.Random(seed)
    report = Report("dhaction", n=n, omega=omega, seed=seed, samples=trials)
    basis = [f for k in range(-1, n) for f in dh_basis(n, omega, k).basis]
    induced = [induced_derivation(f, omega) for f in basis]
    gens = quotient_generators(omega)
    dprime = induced_d(omega)
    w = omega.element()
    well = commute = closure = hom = True
    first = {}
    for f, D in zip(basis, induced):
        for _ in range(trials):
            a = random_element(n, rng)
            r = random_element(n, rng, max_x=1, max_terms=2)
            if D.apply(QuotientElement(a + w * r, omega)) != D.apply(QuotientElement(a, omega)):
                well = False
                first.setdefault("well", f"{f}")
        for g in gens:
            if not induced_bracket_on(D, dprime, g).is_zero():
                commute = False
                first.setdefault("commute", f"{f} on {g}")
    report.add(Check("well_defined", well, first.get("well", f"{len(basis)} fields x {trials} perturbations")))
    report.add(Check("commutes_with_dprime", commute, first.get("commute", "[delta', d'] = 0 on generators of A'")))
    report.add(Check("dprime_squared_zero", all(dprime.apply(dprime.apply(g)).is_zero() for g in gens), "d'^2 = 0 on generators"))
    for a in range(len(basis)):
        for b in range(a, len(basis)):
            br = bracket(basis[a], basis[b])
            if proportionality(br, omega) is None:
                closure = False
                first.setdefault("closure", f"[{basis[a]}, {basis[b]}]")
                continue
            Dbr = induced_derivation(br, omega) if not br.is_zero() else None
            for g in gens:
                lhs = Dbr.apply(g) if Dbr is not None else QuotientElement(SuperElement.zero(n), omega)
                if lhs != induced_bracket_on(induced[a], induced[b], g):
                    hom = False
                    first.setdefault("hom", f"[{basis[a]}, {basis[b]}] on {g}")
    report.add(Check("closed_under_bracket", closure, first.get("closure", "DH is a subalgebra")))
    report.add(Check("bracket_preserving", hom, first.get("hom", f"{len(basis) * (len(basis) + 1) // 2} pairs on {len(gens)} generators")))
    vectors = []
    for D in induced:
        v = {}
        for slot, g in enumerate(gens):
            for key, c in D.apply(g).lift().terms.items():
                v[(slot, key)] = c
        vectors.append(v)
    keys = sorted({k for v in vectors for k in v}, key=repr)
    r = rank([[v.get(k, 0) for k in keys] for v in vectors], len(keys)) if keys else 0
    report.add(Check("injective", r == len(basis), f"rank {r} of {len(basis)} induced derivations of A'"))
    return report


def quadric_points(n, count, rng, bound=4):
    """Rational points on x_1^2 + ... + x_{n-1}^2 = x_n^2 (stereographic parametrization)."""
    pts = []
    while len(pts) < count:
        t = [Fraction(rng.randint(-bound, bound)) for _ in range(n - 2)]
        s = sum(v * v for v in t)
        p = [2 * v for v in t] + [s - 1, s + 1]
        if any(p):
            pts.append([_norm(v) for v in p])
    return pts
