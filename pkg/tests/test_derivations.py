import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import any_field, elements, fields, homogeneous_elements
from superpoint.algebra import SuperElement, monomials_of_bidegree, partial_x, partial_xi
from superpoint.derivations import (
    MixedParityError,
    SuperDerivation,
    SuperpointField,
    bracket,
    coordinate_field,
    euler,
    extend,
    extend_by_constraint,
    koszul_d,
    partial,
)
from superpoint.vectorial import w_basis_all

N = 3
x = lambda i, n=N: SuperElement.x(n, i)
xi = lambda i, n=N: SuperElement.xi(n, i)


def apply_by_partials(delta, a):
    """Oracle: sum_i delta(xi_i) d_a/d_xi_i + sum_j delta(x_j) d_a/d_x_j."""
    out = SuperElement.zero(a.n)
    for i in range(a.n):
        out = out + delta.images_xi[i] * partial_xi(a, i + 1) + delta.images_x[i] * partial_x(a, i + 1)
    return out


def test_koszul_on_xi_pair():
    d = koszul_d(2)
    a = SuperElement.xi(2, 1) * SuperElement.xi(2, 2)
    assert d.apply(a) == SuperElement.x(2, 1) * SuperElement.xi(2, 2) - SuperElement.x(2, 2) * SuperElement.xi(2, 1)


def test_euler_counts_xi_degree():
    a = SuperElement.xi(2, 1) * SuperElement.xi(2, 2)
    assert euler(2).apply(a) == a.scale(2)
    assert euler(3).apply(x(1) ** 2 * xi(3)) == x(1) ** 2 * xi(3)


def test_d_squared_zero_on_all_small_monomials():
    d = koszul_d(3)
    for xd in range(3):
        for k in range(4):
            for m in monomials_of_bidegree(3, xd, k):
                assert d.apply(d.apply(m)).is_zero()


def test_extension_examples():
    f = coordinate_field(2, SuperElement.xi(2, 1), 2)
    g = extend(f)
    assert g.images_x == (SuperElement.zero(2), SuperElement.x(2, 1))
    h = coordinate_field(2, SuperElement.xi(2, 1) * SuperElement.xi(2, 2), 1)
    gh = extend(h)
    expected = -(SuperElement.x(2, 1) * SuperElement.xi(2, 2) - SuperElement.x(2, 2) * SuperElement.xi(2, 1))
    assert gh.images_x[0] == expected
    assert gh.images_x[1].is_zero()


def test_bracket_examples():
    d1 = partial(2, 1)
    e11 = coordinate_field(2, SuperElement.xi(2, 1), 1)
    assert bracket(d1, e11) == d1
    assert bracket(partial(2, 1), partial(2, 2)).is_zero()
    f = coordinate_field(2, SuperElement.xi(2, 1) * SuperElement.xi(2, 2), 1)
    assert bracket(euler(2), f) == f


def test_bracket_of_fields_is_a_field():
    assert isinstance(bracket(partial(3, 1), coordinate_field(3, xi(2), 1)), SuperpointField)


def test_mixed_parity_apply_raises():
    mixed = SuperDerivation(N, [SuperElement.const(N), xi(1), SuperElement.zero(N)], None)
    assert mixed.parity is None
    with pytest.raises(MixedParityError):
        mixed.apply(xi(1))


def test_extension_is_unique_and_agrees_n3():
    d = koszul_d(N)
    for f in w_basis_all(N):
        g, kernel_dim = extend_by_constraint(f)
        assert kernel_dim == 0
        assert g == extend(f)
        assert bracket(extend(f), d).is_zero()


def test_extension_restricts_to_field():
    for f in w_basis_all(N):
        g = extend(f)
        assert g.images_xi == f.images_xi


@settings(max_examples=50, deadline=None)
@given(any_field(N), elements(N))
def test_apply_matches_partial_oracle(f, a):
    g = extend(f)
    assert g.apply(a) == apply_by_partials(g, a)
    assert koszul_d(N).apply(a) == apply_by_partials(koszul_d(N), a)


@settings(max_examples=50, deadline=None)
@given(any_field(N), st.integers(0, 1), st.integers(0, 1), st.data())
def test_graded_leibniz(f, pa, pb, data):
    g = extend(f)
    a = data.draw(homogeneous_elements(N, pa))
    b = data.draw(homogeneous_elements(N, pb))
    sign = -1 if g.parity and pa else 1
    assert g.apply(a * b) == g.apply(a) * b + (a * g.apply(b)).scale(sign)


@settings(max_examples=40, deadline=None)
@given(any_field(N), any_field(N))
def test_bracket_graded_antisymmetry(a, b):
    sign = -1 if a.parity and b.parity else 1
    assert bracket(a, b) == bracket(b, a).scale(-sign)


@settings(max_examples=40, deadline=None)
@given(any_field(N), any_field(N), elements(N))
def test_bracket_is_commutator_on_elements(a, b, el):
    sign = -1 if a.parity and b.parity else 1
    lhs = bracket(extend(a), extend(b)).apply(el)
    rhs = extend(a).apply(extend(b).apply(el)) - extend(b).apply(extend(a).apply(el)).scale(sign)
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(any_field(N), any_field(N))
def test_extension_is_a_homomorphism(a, b):
    assert extend(bracket(a, b)) == bracket(extend(a), extend(b))


@settings(max_examples=40, deadline=None)
@given(any_field(N))
def test_extension_supercommutes_with_d(f):
    assert bracket(extend(f), koszul_d(N)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(-1, N - 1).flatmap(lambda k: st.tuples(st.just(k), fields(N, k))))
def test_euler_grades_fields(kf):
    k, f = kf
    assert bracket(euler(N), f) == f.scale(k)


def test_faithful_on_basis():
    """Distinct basis fields act differently on the odd generators."""
    basis = w_basis_all(N)
    images = {tuple(f.apply(xi(i)) for i in range(1, N + 1)) for f in basis}
    assert len(images) == len(basis)
