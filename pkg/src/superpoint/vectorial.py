"""Graded layers of W_n, H(omega), DH(omega) and the checks on them."""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .algebra import SuperElement, monomials_of_bidegree, odd_monomials, partial_xi
from .derivations import SuperpointField, bracket, coordinate_field, euler, extend
from .linalg import SpanSolver, _invert, rank, sparse_nullspace, sparse_rank
from .report import Check, Report


class DegenerateFormError(ValueError):
    pass


class QuadraticForm:
    """A nondegenerate quadratic form sum S_ab x_a x_b with rational symmetric S."""

    def __init__(self, matrix):
        S = [[Fraction(v) for v in row] for row in matrix]
        n = len(S)
        if n == 0 or any(len(row) != n for row in S):
            raise ValueError("quadratic form needs a square matrix")
        if any(S[i][j] != S[j][i] for i in range(n) for j in range(n)):
            raise ValueError("quadratic form matrix must be symmetric")
        if rank(S, n) != n:
            raise DegenerateFormError("quadratic form is degenerate")
        self.n = n
        self.matrix = S

    @classmethod
    def standard(cls, n):
        """sum x_i^2."""
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def split(cls, n):
        """x_1^2 + ... + x_{n-1}^2 - x_n^2, whose cone has rational points."""
        return cls.diagonal([1] * (n - 1) + [-1])

    def is_diagonal(self):
        return all(self.matrix[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def element(self):
        n = self.n
        out = SuperElement.zero(n)
        for a in range(n):
            for b in range(n):
                if self.matrix[a][b]:
                    out = out + (SuperElement.x(n, a + 1) * SuperElement.x(n, b + 1)).scale(self.matrix[a][b])
        return out

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self.matrix == other.matrix

    def to_json(self):
        return [[str(v) for v in row] for row in self.matrix]

    def label(self):
        if self == QuadraticForm.standard(self.n):
            return "standard"
        return ";".join(" ".join(str(v) for v in row) for row in self.matrix)


@dataclass
class GradedSubspace:
    """Basis of one graded layer together with how it was obtained."""

    n: int
    degree: int
    basis: list
    provenance: str
    coefficients: list = field(default_factory=list)

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self):
        return len(self.basis)


def w_basis(n, k):
    """Monomial basis {f d/dxi_i : f in Lambda^{k+1}} of (W_n)_k."""
    if not -1 <= k <= n - 1:
        return GradedSubspace(n, k, [], "W")
    basis = [
        coordinate_field(n, SuperElement.monomial(n, None, odd), i)
        for odd in odd_monomials(n, k + 1)
        for i in range(1, n + 1)
    ]
    return GradedSubspace(n, k, basis, "W")


def w_basis_all(n):
    return [f for k in range(-1, n) for f in w_basis(n, k).basis]


def hamiltonian_defect(delta, omega):
    """Image of omega under the extension of ``delta``."""
    return extend(delta).apply(omega.element())


def defect_formula(delta, omega):
    """Closed form 2(-1)^k sum_{a,b,j} S_ab x_b x_j dh_a/dxi_j.

    For omega = sum x_i^2 this is 2(-1)^k sum_{i,j} x_i x_j dh_j/dxi_i.
    Computed without the Leibniz engine, as a second route to the defect.
    """
    n, k = delta.n, delta.degree
    S = omega.matrix
    out = SuperElement.zero(n)
    for a in range(n):
        h = delta.images[a]
        if not h:
            continue
        for j in range(n):
            dh = partial_xi(h, j + 1)
            if not dh:
                continue
            for b in range(n):
                if S[a][b]:
                    out = out + (SuperElement.x(n, b + 1) * SuperElement.x(n, j + 1) * dh).scale(S[a][b])
    return out.scale(-2 if k % 2 else 2)


def _combine(fields, coeffs, n, k):
    out = SuperpointField(n, [SuperElement.zero(n)] * n, k)
    for c, f in zip(coeffs, fields):
        if c:
            out = out + f.scale(c)
    return SuperpointField(n, out.images, k)


def _defect_columns(layer, omega):
    return [hamiltonian_defect(f, omega) for f in layer.basis]


def h_basis(n, omega, k):
    """Exact kernel of delta -> defect on (W_n)_k."""
    layer = w_basis(n, k)
    if not layer.basis:
        return GradedSubspace(n, k, [], "H")
    cols = _defect_columns(layer, omega)
    kernel = sparse_nullspace([c.terms for c in cols])
    basis = [_combine(layer.basis, v, n, k) for v in kernel]
    return GradedSubspace(n, k, basis, "H", kernel)


def _phi_space(n, k, scalar_only):
    if scalar_only:
        return [SuperElement.const(n, 1)]
    return [SuperElement.monomial(n, None, odd) for d in range(n + 1) for odd in odd_monomials(n, d)]


def dh_solutions(n, omega, k, scalar_only=False):
    """Kernel of (delta, phi) -> defect(delta) - phi*omega over (W_n)_k x Phi.

    ``Phi`` is all of Lambda unless ``scalar_only``.  Returns
    ``(layer, phi_monomials, kernel_vectors)`` with each vector laid out as
    delta coefficients followed by phi coefficients.
    """
    layer = w_basis(n, k)
    phis = _phi_space(n, k, scalar_only)
    w = omega.element()
    cols = _defect_columns(layer, omega) + [-(p * w) for p in phis]
    kernel = sparse_nullspace([c.terms for c in cols])
    return layer, phis, kernel


def dh_basis(n, omega, k):
    """(DH(omega))_k: fields whose extension sends omega to a multiple of omega."""
    layer, phis, kernel = dh_solutions(n, omega, k)
    m = len(layer.basis)
    vecs = [v[:m] for v in kernel]
    if vecs and sparse_rank([{j: c for j, c in enumerate(v) if c} for v in vecs]) != len(vecs):
        raise ArithmeticError("delta projection of DH solutions is not injective")
    basis = [_combine(layer.basis, v, n, k) for v in vecs]
    return GradedSubspace(n, k, basis, "DH", vecs)


def proportionality(delta, omega):
    """Return c with defect(delta) == c * omega, or None when not proportional."""
    df = hamiltonian_defect(delta, omega)
    if not df:
        return Fraction(0)
    w = omega.element()
    key, c0 = next(iter(w.terms.items()))
    c = Fraction(df.terms.get(key, 0)) / c0
    if c and df == w.scale(c):
        return c
    return None


def in_span(vectors, target):
    """True when ``target`` (a field) lies in the span of ``vectors``."""
    if not vectors:
        return target.is_zero()
    return SpanSolver([v.coordinates() for v in vectors]).coordinates(target.coordinates()) is not None


def verify_lemma_1_1(n, omega=None, degrees=None):
    """Scalar multiplier, DH = H + QE, [E, H] in H, and the E-decomposition."""
    if omega is None:
        omega = QuadraticForm.standard(n)
    if not 1 <= n <= 8:
        raise ValueError("verify_lemma_1_1 is limited to 1 <= n <= 8")
    report = Report("lemma11", n=n, omega=omega)
    E = euler(n)
    degrees = list(range(-1, n)) if degrees is None else degrees
    tot_h = tot_dh = 0
    scalar_ok = True
    decomp_ok = True
    ideal_ok = True
    kernel_ok = True
    first_failure = {}
    for k in degrees:
        layer, phis, kernel = dh_solutions(n, omega, k)
        m = len(layer.basis)
        for v in kernel:
            if any(v[m + 1 :]) or any(p.xi_degrees() != [0] for p, c in zip(phis, v[m:]) if c):
                scalar_ok = False
                first_failure.setdefault("scalar", f"k={k}: phi coefficients {v[m:]}")
        _, _, scalar_kernel = dh_solutions(n, omega, k, scalar_only=True)
        if len(scalar_kernel) != len(kernel):
            scalar_ok = False
            first_failure.setdefault("scalar", f"k={k}: {len(kernel)} vs {len(scalar_kernel)} solutions")
        h = h_basis(n, omega, k)
        dh = dh_basis(n, omega, k)
        for f in h.basis:
            if hamiltonian_defect(f, omega):
                kernel_ok = False
                first_failure.setdefault("kernel", f"k={k}: {f}")
            if not in_span(h.basis, bracket(E, f)):
                ideal_ok = False
                first_failure.setdefault("ideal", f"k={k}: [E, {f}]")
        for f in dh.basis:
            c = proportionality(f, omega)
            if c is None:
                decomp_ok = False
                first_failure.setdefault("decomposition", f"k={k}: {f} not in DH")
                continue
            rest = f - E.scale(c / 2)
            rest = SuperpointField(n, rest.images_xi, k) if not rest.is_zero() else rest
            if hamiltonian_defect(rest, omega) or not in_span(h.basis, rest):
                decomp_ok = False
                first_failure.setdefault("decomposition", f"k={k}: {f}")
        report.layers.append({"k": k, "dimW": len(layer.basis), "dimH": h.dim, "dimDH": dh.dim})
        tot_h += h.dim
        tot_dh += dh.dim
    e_def = hamiltonian_defect(E, omega)
    report.add(Check("euler_defect_is_2omega", e_def == omega.element().scale(2), f"E~(omega) = {e_def}"))
    report.add(Check("phi_is_scalar", scalar_ok, first_failure.get("scalar", "every solution has constant phi")))
    report.add(Check("h_basis_in_kernel", kernel_ok, first_failure.get("kernel", "defect vanishes on every H basis field")))
    report.add(
        Check(
            "dim_dh_equals_dim_h_plus_1",
            tot_dh == tot_h + 1 if degrees == list(range(-1, n)) else tot_dh - tot_h in (0, 1),
            f"dim H = {tot_h}, dim DH = {tot_dh}",
        )
    )
    per_degree = all(row["dimDH"] == row["dimH"] + (1 if row["k"] == 0 else 0) for row in report.layers)
    report.add(Check("extra_generator_in_degree_0", per_degree, "dim DH_k - dim H_k = [k == 0]"))
    report.add(Check("ideal_E_H", ideal_ok, first_failure.get("ideal", "[E, h] in H for every basis h")))
    report.add(Check("decomposition_delta0_plus_half_cE", decomp_ok, first_failure.get("decomposition", "delta - c/2 E in H for every DH basis field")))
    return report


def structure_constants(basis):
    """Expansion of every bracket [b_i, b_j] over ``basis``.

    Returns ``(table, failures)``; ``table[(i, j)]`` lists the coefficients
    and ``failures`` holds the pairs whose bracket leaves the span.
    """
    solver = SpanSolver([b.coordinates() for b in basis])
    table = {}
    failures = []
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            coords = solver.coordinates(bracket(a, b).coordinates())
            if coords is None:
                failures.append((i, j))
            else:
                table[(i, j)] = coords
    return table, failures


def bracket_closure(left, right, target):
    """Pairs (i, j) with [left_i, right_j] outside span(target)."""
    solver = SpanSolver([b.coordinates() for b in target]) if target else None
    bad = []
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            br = bracket(a, b)
            if br.is_zero():
                continue
            if solver is None or solver.coordinates(br.coordinates()) is None:
                bad.append((i, j))
    return bad


def jacobi_sum(a, b, c):
    """(-1)^{ac}[a,[b,c]] + (-1)^{ba}[b,[c,a]] + (-1)^{cb}[c,[a,b]]."""

    def s(p, q):
        return -1 if p and q else 1

    pa, pb, pc = a.parity, b.parity, c.parity
    return (
        bracket(a, bracket(b, c)).scale(s(pa, pc))
        + bracket(b, bracket(c, a)).scale(s(pb, pa))
        + bracket(c, bracket(a, b)).scale(s(pc, pb))
    )


def jacobi_check(basis, triples, name="jacobi"):
    """Graded Jacobi identity on the given index triples; inner brackets are cached."""
    inner = {}

    def br(i, j):
        v = inner.get((i, j))
        if v is None:
            v = inner[(i, j)] = bracket(basis[i], basis[j])
        return v

    failures = []
    count = 0
    for i, j, k in triples:
        a, b, c = basis[i], basis[j], basis[k]
        pa, pb, pc = a.parity, b.parity, c.parity
        total = (
            bracket(a, br(j, k)).scale(-1 if pa and pc else 1)
            + bracket(b, br(k, i)).scale(-1 if pb and pa else 1)
            + bracket(c, br(i, j)).scale(-1 if pc and pb else 1)
        )
        count += 1
        if not total.is_zero():
            failures.append((i, j, k))
    detail = f"{count} triples, {len(failures)} failures"
    if failures:
        detail += f"; first {failures[0]}"
    return Check(name, not failures, detail)


def all_triples(m):
    return [(i, j, k) for i in range(m) for j in range(m) for k in range(m)]


def random_triples(m, count, seed=0):
    rng = random.Random(seed)
    return [(rng.randrange(m), rng.randrange(m), rng.randrange(m)) for _ in range(count)]


def verify_jacobi(n, samples=500, seed=0, exhaustive=None):
    """Jacobi on W_n: exhaustive for n <= 3, else ``samples`` seeded random triples."""
    basis = w_basis_all(n)
    if exhaustive is None:
        exhaustive = n <= 3
    report = Report("jacobi", n=n, seed=seed, samples=None if exhaustive else samples)
    triples = all_triples(len(basis)) if exhaustive else random_triples(len(basis), samples, seed)
    report.add(jacobi_check(basis, triples, f"jacobi_W{n}_{'exhaustive' if exhaustive else 'random'}"))
    return report


def matrix_inverse(g):
    g = [[Fraction(v) for v in row] for row in g]
    n = len(g)
    if rank(g, n) != n:
        raise ValueError("change of basis matrix is singular")
    return _invert(g)


def change_of_basis(omega, g):
    """Transform omega to g^T omega g, plus the induced automorphism of W_n.

    The substitution Phi: x_i -> sum_j g_ij x_j, xi_i -> sum_j g_ij xi_j
    commutes with d and sends omega to g^T omega g; a field delta goes to
    Phi delta Phi^{-1}.
    """
    n = omega.n
    gi = matrix_inverse(g)
    S = omega.matrix
    new = [[sum(Fraction(g[a][i]) * S[a][b] * Fraction(g[b][j]) for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]
    new_form = QuadraticForm(new)

    def transport(delta):
        images = []
        for i in range(n):
            pre = SuperElement.xi(n, i + 1).linear_substitution(gi)
            images.append(delta.apply(pre).linear_substitution(g))
        return SuperpointField(n, images, delta.degree)

    return new_form, transport


def dimension_table(n, omega=None):
    """Rows {k, dimW, dimH, dimDH} for k = -1..n-1."""
    if omega is None:
        omega = QuadraticForm.standard(n)
    rows = []
    for k in range(-1, n):
        rows.append(
            {
                "k": k,
                "dimW": len(w_basis(n, k)),
                "dimH": h_basis(n, omega, k).dim,
                "dimDH": dh_basis(n, omega, k).dim,
            }
        )
    return rows


def w_dimension(n, k):
    return n * comb(n, k + 1) if -1 <= k <= n - 1 else 0
