from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from superpoint.linalg import (
    SpanSolver,
    column_blocks,
    nullspace,
    rank,
    solve,
    sparse_nullspace,
    sparse_rank,
    sparse_solve,
)


def gauss_jordan(rows, ncols):
    """Textbook reduced row echelon form over Fractions (oracle)."""
    M = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def matvec(rows, v):
    return [sum(Fraction(a) * b for a, b in zip(r, v)) for r in rows]


def matrices(max_rows=6, max_cols=6):
    entry = st.one_of(st.just(0), st.just(0), st.integers(-5, 5), st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)))
    return st.integers(1, max_cols).flatmap(
        lambda c: st.tuples(st.just(c), st.lists(st.lists(entry, min_size=c, max_size=c), min_size=1, max_size=max_rows))
    )


def to_columns(rows, ncols):
    return [{i: r[j] for i, r in enumerate(rows) if r[j]} for j in range(ncols)]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_gauss_jordan(m):
    ncols, rows = m
    assert rank(rows, ncols) == len(gauss_jordan(rows, ncols)[1])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_is_a_kernel_basis(m):
    ncols, rows = m
    kern = nullspace(rows, ncols)
    assert len(kern) == ncols - len(gauss_jordan(rows, ncols)[1])
    for v in kern:
        assert all(x == 0 for x in matvec(rows, v))
        assert all(isinstance(x, int) for x in v)
    if kern:
        assert rank(kern, ncols) == len(kern)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_sparse_routines_equal_dense(m):
    ncols, rows = m
    cols = to_columns(rows, ncols)
    assert sparse_nullspace(cols) == nullspace(rows, ncols)
    assert sparse_rank(cols) == rank(rows, ncols)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_solve_consistent_systems(m, x0):
    ncols, rows = m
    x0 = x0[:ncols]
    b = matvec(rows, x0)
    x = solve(rows, b, ncols)
    assert x is not None and matvec(rows, x) == b
    y = sparse_solve(to_columns(rows, ncols), {i: v for i, v in enumerate(b) if v})
    assert y is not None and matvec(rows, y) == b


def test_inconsistent_system():
    rows = [[1, 1], [2, 2]]
    assert solve(rows, [1, 3]) is None
    assert sparse_solve(to_columns(rows, 2), {0: 1, 1: 3}) is None


def test_known_kernel():
    # x + 2y - z = 0, 2x + 4y - 2z = 0 has kernel {(2,-1,0), (1,0,1)}
    assert nullspace([[1, 2, -1], [2, 4, -2]], 3) == [[2, -1, 0], [1, 0, 1]]


def test_column_blocks_split_disjoint_supports():
    cols = [{"a": 1}, {"b": 1}, {"a": 2, "c": 1}, {}]
    assert column_blocks(cols) == [[0, 2], [1], [3]]


def test_span_solver_coordinates_and_membership():
    s = SpanSolver([{"a": 1, "b": 1}, {"b": 1}])
    assert s.coordinates({"a": 2, "b": 5}) == [2, 3]
    assert s.coordinates({"c": 1}) is None
