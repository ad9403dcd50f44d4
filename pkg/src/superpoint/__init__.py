"""Exact computations with vector fields on the superpoint.

The supercommutative algebra A = Q[x1..xn] (x) Lambda[xi1..xin] with its
Koszul differential, the Lie superalgebras W_n, H(omega), DH(omega), and
their actions on the annihilator supermanifold over P^{n-1} and on the
quadric quotient A/omega A.
"""

from .algebra import Bidegree, DimensionError, SuperElement, partial_x, partial_xi
from .derivations import (
    SuperDerivation,
    SuperpointField,
    apply,
    bracket,
    coordinate_field,
    euler,
    extend,
    extend_by_constraint,
    koszul_d,
    partial,
)
from .textform import ParseError, format_derivation, format_element, parse_derivation, parse_element
from .vectorial import (
    GradedSubspace,
    QuadraticForm,
    change_of_basis,
    dh_basis,
    h_basis,
    hamiltonian_defect,
    jacobi_check,
    structure_constants,
    verify_lemma_1_1,
    w_basis,
)

__version__ = "0.1.0"
