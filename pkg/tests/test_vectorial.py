from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings

from strategies import any_field
from superpoint.algebra import SuperElement, odd_monomials, partial_xi
from superpoint.derivations import SuperpointField, bracket, coordinate_field, euler, partial
from superpoint.vectorial import (
    DegenerateFormError,
    QuadraticForm,
    bracket_closure,
    change_of_basis,
    defect_formula,
    dh_basis,
    h_basis,
    hamiltonian_defect,
    in_span,
    jacobi_sum,
    proportionality,
    structure_constants,
    verify_jacobi,
    verify_lemma_1_1,
    w_basis,
    w_basis_all,
    w_dimension,
)


def generated_field(f):
    """Field sum_i (df/dxi_i) d/dxi_i built from a generating function f."""
    n = f.n
    imgs = [partial_xi(f, i) for i in range(1, n + 1)]
    k = f.xi_degrees()[0] - 2
    return SuperpointField(n, imgs, k)


def rotation(n=2):
    xi = lambda i: SuperElement.xi(n, i)
    return coordinate_field(n, xi(1), 2) - coordinate_field(n, xi(2), 1)


def test_w_basis_examples():
    assert w_basis(2, -1).basis == [partial(2, 1), partial(2, 2)]
    assert sum(len(w_basis(2, k)) for k in range(-1, 2)) == 8
    top = w_basis(3, 2).basis
    assert len(top) == 3
    assert all(f.images[i - 1] == SuperElement.monomial(3, None, (1, 2, 3)) for i, f in enumerate(top, 1))
    assert w_basis(3, 3).dim == 0


def test_w_dimensions_closed_form():
    for n in range(1, 7):
        for k in range(-1, n):
            assert len(w_basis(n, k)) == n * comb(n, k + 1) == w_dimension(n, k)
        assert len(w_basis_all(n)) == n * 2**n


def test_rotation_is_hamiltonian():
    omega = QuadraticForm.standard(2)
    assert hamiltonian_defect(rotation(), omega).is_zero()
    assert in_span(h_basis(2, omega, 0).basis, rotation())


def test_constant_field_has_zero_defect():
    omega = QuadraticForm.standard(3)
    assert hamiltonian_defect(partial(3, 1), omega).is_zero()
    assert defect_formula(partial(3, 1), omega).is_zero()


def test_euler_defect_is_twice_omega():
    for n in range(1, 5):
        omega = QuadraticForm.standard(n)
        assert hamiltonian_defect(euler(n), omega) == omega.element().scale(2)
        assert proportionality(euler(n), omega) == 2


def test_diagonal_field_is_not_in_dh():
    omega = QuadraticForm.standard(3)
    f = coordinate_field(3, SuperElement.xi(3, 1), 1)
    assert hamiltonian_defect(f, omega) == SuperElement.x(3, 1) ** 2 * 2
    assert proportionality(f, omega) is None


@settings(max_examples=60, deadline=None)
@given(any_field(3))
def test_defect_routes_agree(f):
    for omega in (QuadraticForm.standard(3), QuadraticForm([[1, 1, 0], [1, 3, 0], [0, 0, -2]])):
        assert hamiltonian_defect(f, omega) == defect_formula(f, omega)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_h_matches_generating_functions(n):
    omega = QuadraticForm.standard(n)
    for k in range(-1, n):
        h = h_basis(n, omega, k)
        assert h.dim == (comb(n, k + 2) if k + 2 <= n else 0)
        for odd in odd_monomials(n, k + 2):
            g = generated_field(SuperElement.monomial(n, None, odd))
            assert hamiltonian_defect(g, omega).is_zero()
            assert in_span(h.basis, g)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dh_adds_one_in_degree_zero(n):
    omega = QuadraticForm.standard(n)
    for k in range(-1, n):
        extra = 1 if k == 0 else 0
        assert dh_basis(n, omega, k).dim == h_basis(n, omega, k).dim + extra
    assert in_span(dh_basis(n, omega, 0).basis, euler(n))


@pytest.mark.parametrize("n", [2, 5])
def test_dh_structure_report_passes(n):
    report = verify_lemma_1_1(n)
    assert report.passed, report.to_text()
    assert sum(r["dimDH"] for r in report.layers) == sum(r["dimH"] for r in report.layers) + 1


def test_dh_structure_report_nonstandard_form():
    omega = QuadraticForm([[1, Fraction(1, 2), 0], [Fraction(1, 2), 2, 0], [0, 0, -1]])
    assert verify_lemma_1_1(3, omega).passed


def test_h_closed_under_bracket():
    for n in range(2, 5):
        omega = QuadraticForm.standard(n)
        H = [f for k in range(-1, n) for f in h_basis(n, omega, k).basis]
        assert bracket_closure(H, H, H) == []


def test_structure_constants_of_w2():
    basis = w_basis_all(2)
    table, failures = structure_constants(basis)
    assert failures == []
    for (i, j), coeffs in table.items():
        total = None
        for c, b in zip(coeffs, basis):
            if c:
                total = b.scale(c) if total is None else total + b.scale(c)
        br = bracket(basis[i], basis[j])
        assert (br.is_zero() and total is None) or br == total


def test_jacobi_exhaustive_w2_and_sum_helper():
    assert verify_jacobi(2).passed
    b = w_basis_all(2)
    assert jacobi_sum(b[0], b[3], b[5]).is_zero()


def test_change_of_basis_diagonal_scaling():
    omega = QuadraticForm.standard(2)
    new, transport = change_of_basis(omega, [[1, 0], [0, 2]])
    assert new == QuadraticForm.diagonal([1, 4])
    for k in range(-1, 2):
        H = h_basis(2, omega, k)
        assert h_basis(2, new, k).dim == H.dim
        for f in H.basis:
            assert hamiltonian_defect(transport(f), new).is_zero()


def test_change_of_basis_identity():
    omega = QuadraticForm.standard(3)
    new, transport = change_of_basis(omega, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert new == omega
    for f in w_basis_all(3):
        assert transport(f) == f


def test_transport_preserves_brackets():
    omega = QuadraticForm.standard(3)
    g = [[1, 1, 0], [0, 1, 2], [1, 0, 1]]
    _, transport = change_of_basis(omega, g)
    b = w_basis_all(3)
    for a, c in [(0, 5), (4, 9), (10, 20), (3, 23)]:
        assert transport(bracket(b[a], b[c])) == bracket(transport(b[a]), transport(b[c]))


def test_split_and_standard_dims_agree():
    for n in (2, 3, 4):
        std, split = QuadraticForm.standard(n), QuadraticForm.split(n)
        for k in range(-1, n):
            assert h_basis(n, std, k).dim == h_basis(n, split, k).dim


def test_degenerate_form_rejected():
    with pytest.raises(DegenerateFormError):
        QuadraticForm([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        QuadraticForm([[1, 2], [0, 1]])


@pytest.mark.parametrize("n", [6, 7, 8])
def test_dimension_table_larger_n(n):
    from superpoint.vectorial import dimension_table

    rows = dimension_table(n)
    for r in rows:
        assert r["dimH"] == comb(n, r["k"] + 2)
        assert r["dimDH"] == r["dimH"] + (r["k"] == 0)
    assert sum(r["dimH"] for r in rows) == 2**n - 1
