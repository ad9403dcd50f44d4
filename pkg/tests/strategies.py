"""Hypothesis strategies for elements and fields of small superalgebras."""

from fractions import Fraction

from hypothesis import strategies as st

from superpoint.algebra import SuperElement
from superpoint.derivations import SuperpointField

coeffs = st.one_of(
    st.integers(-4, 4),
    st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3)),
)


def monomials(n, max_x=2):
    return st.tuples(
        st.lists(st.integers(0, max_x), min_size=n, max_size=n),
        st.lists(st.integers(1, n), max_size=n, unique=True),
        coeffs,
    ).map(lambda t: SuperElement.monomial(n, t[0], sorted(t[1]), t[2]))


def elements(n, max_terms=4, max_x=2):
    return st.lists(monomials(n, max_x), max_size=max_terms).map(
        lambda ms: sum(ms, SuperElement.zero(n))
    )


def homogeneous_elements(n, parity, max_terms=3):
    """Elements whose odd part has the requested parity."""

    def keep(a):
        out = SuperElement.zero(n)
        for (exps, mask), c in a.terms.items():
            if bin(mask).count("1") % 2 == parity:
                out = out + SuperElement._raw(n, {(exps, mask): c})
        return out

    return elements(n, max_terms).map(keep)


def grassmann(n, degree, max_terms=3):
    """Elements of Lambda^degree (no x's)."""
    from itertools import combinations

    combos = list(combinations(range(1, n + 1), degree))
    term = st.tuples(st.sampled_from(combos), coeffs).map(
        lambda t: SuperElement.monomial(n, None, t[0], t[1])
    )
    return st.lists(term, max_size=max_terms).map(lambda ts: sum(ts, SuperElement.zero(n)))


def fields(n, degree):
    """Homogeneous fields of Z-degree ``degree`` on the superpoint of dimension n."""
    return st.lists(grassmann(n, degree + 1), min_size=n, max_size=n).map(
        lambda imgs: SuperpointField(n, imgs, degree)
    )


def any_field(n):
    return st.integers(-1, n - 1).flatmap(lambda k: fields(n, k))
