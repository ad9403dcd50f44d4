"""Exact linear algebra over Q by fraction-free (Bareiss) elimination.

Matrices are plain lists of rows.  Entries may be ints or Fractions; each row
is scaled to integers before elimination, so the elimination itself runs on
Python ints only.
"""

from fractions import Fraction
from math import gcd, lcm


class ExactMatrix:
    """Thin row-major wrapper used where a shaped object reads better than a list."""

    def __init__(self, rows, ncols=None):
        self.rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.ncols = ncols

    @property
    def shape(self):
        return len(self.rows), self.ncols

    def rank(self):
        return rank(self.rows, self.ncols)

    def nullspace(self):
        return nullspace(self.rows, self.ncols)

    def transpose(self):
        return ExactMatrix([list(c) for c in zip(*self.rows)], len(self.rows))


def integer_row(row):
    """Scale a rational row to a primitive integer row (same kernel)."""
    den = 1
    for v in row:
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    out = [int(v * den) for v in row]
    g = 0
    for v in out:
        if v:
            g = gcd(g, v)
            if g == 1:
                break
    if g > 1:
        out = [v // g for v in out]
    return out


def bareiss_echelon(rows, ncols):
    """Row echelon form by Bareiss elimination.

    Returns ``(echelon_rows, pivot_columns)``; rows are integer lists and zero
    rows are dropped.
    """
    M = [integer_row(r) for r in rows if any(r)]
    m = len(M)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        if r == m:
            break
        p = None
        for i in range(r, m):
            if M[i][c]:
                p = i
                break
        if p is None:
            continue
        if p != r:
            M[r], M[p] = M[p], M[r]
        Mr = M[r]
        pv = Mr[c]
        for i in range(r + 1, m):
            Mi = M[i]
            a = Mi[c]
            if a:
                for j in range(c + 1, ncols):
                    Mi[j] = (pv * Mi[j] - a * Mr[j]) // prev
                Mi[c] = 0
            elif pv != prev:
                for j in range(c + 1, ncols):
                    if Mi[j]:
                        Mi[j] = pv * Mi[j] // prev
        prev = pv
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(rows, ncols=None):
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return len(bareiss_echelon(rows, ncols)[1])


def _back_substitute(U, pivots, ncols, fixed):
    """Solve U x = 0 given values for the free columns in ``fixed``."""
    x = [Fraction(0)] * ncols
    for col, v in fixed.items():
        x[col] = Fraction(v)
    for row, pc in zip(reversed(U), reversed(pivots)):
        s = sum(row[j] * x[j] for j in range(pc + 1, ncols) if row[j] and x[j])
        x[pc] = -Fraction(s) / row[pc]
    return x


def primitive(vec):
    """Scale a rational vector to coprime integers with positive leading entry."""
    vec = integer_row(vec)
    for v in vec:
        if v:
            if v < 0:
                vec = [-w for w in vec]
            break
    return vec


def nullspace(rows, ncols):
    """Basis of {v : M v = 0} as primitive integer vectors, one per free column."""
    U, pivots = bareiss_echelon(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        basis.append(primitive(_back_substitute(U, pivots, ncols, {f: 1})))
    return basis


def solve(rows, rhs, ncols=None):
    """One rational solution of M v = rhs, or None when inconsistent."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [-b] for r, b in zip(rows, rhs)]
    U, pivots = bareiss_echelon(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = _back_substitute(U, pivots, ncols + 1, {ncols: 1})
    return x[:ncols]


class CoordinateIndex:
    """Assigns stable column numbers to hashable coordinate keys."""

    def __init__(self):
        self.index = {}

    def __len__(self):
        return len(self.index)

    def col(self, key):
        i = self.index.get(key)
        if i is None:
            i = self.index[key] = len(self.index)
        return i

    def densify(self, sparse_vectors):
        """Turn {key: value} dicts into dense rows over all keys seen so far."""
        for v in sparse_vectors:
            for k in v:
                self.col(k)
        width = len(self.index)
        out = []
        for v in sparse_vectors:
            row = [0] * width
            for k, c in v.items():
                row[self.index[k]] = c
            out.append(row)
        return out


class SpanSolver:
    """Expresses vectors in a fixed, linearly independent family.

    The family is given as sparse {key: value} dicts.  A maximal invertible
    square block of the coordinate matrix is inverted once; each query is then
    a matrix-vector product plus an exact membership check.
    """

    def __init__(self, vectors):
        self.vectors = list(vectors)
        keys = sorted({k for v in self.vectors for k in v}, key=repr)
        self.keys = keys
        m = len(self.vectors)
        # columns of M are the family; rows are coordinates
        cols = [[v.get(k, 0) for k in keys] for v in self.vectors]
        M = [list(r) for r in zip(*cols)] if m else []
        U, pivots = bareiss_echelon(cols, len(keys))
        if len(pivots) != m:
            raise ValueError(f"family of {m} vectors has rank {len(pivots)}")
        self.rows = pivots
        block = [[Fraction(M[r][j]) for j in range(m)] for r in pivots]
        self.inverse = _invert(block)

    def coordinates(self, target):
        """Coefficients c with sum c_i v_i == target, or None if outside the span."""
        t = [target.get(self.keys[r], 0) for r in self.rows]
        c = [sum(row[j] * t[j] for j in range(len(t)) if t[j]) for row in self.inverse]
        c = [Fraction(v) for v in c]
        # membership: reconstruct and compare on every coordinate
        recon = {}
        for ci, v in zip(c, self.vectors):
            if ci:
                for k, a in v.items():
                    recon[k] = recon.get(k, 0) + ci * a
        recon = {k: a for k, a in recon.items() if a}
        tgt = {k: a for k, a in target.items() if a}
        if recon != tgt:
            return None
        return c


def _invert(block):
    n = len(block)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(block)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c])
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [v / pv for v in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


def column_blocks(columns):
    """Group column indices that share a nonzero row (connected components)."""
    parent = list(range(len(columns)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner = {}
    for j, col in enumerate(columns):
        for key in col:
            o = owner.setdefault(key, j)
            if o != j:
                ra, rb = find(o), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    blocks = {}
    for j in range(len(columns)):
        blocks.setdefault(find(j), []).append(j)
    return [blocks[r] for r in sorted(blocks)]


def sparse_nullspace(columns):
    """Kernel basis of the matrix whose j-th column is the sparse dict ``columns[j]``.

    The matrix is split into independent blocks first; the result equals
    :func:`nullspace` on the dense matrix (same free columns, same vectors).
    """
    m = len(columns)
    basis = []
    for block in column_blocks(columns):
        keys = {}
        for j in block:
            for key in columns[j]:
                keys.setdefault(key, len(keys))
        rows = [[0] * len(block) for _ in keys]
        for local, j in enumerate(block):
            for key, v in columns[j].items():
                rows[keys[key]][local] = v
        if rows:
            kern = nullspace(rows, len(block))
        else:
            kern = [[1]]
        for v in kern:
            full = [0] * m
            for local, j in enumerate(block):
                full[j] = v[local]
            basis.append(full)
    # order like the dense routine: by free column
    basis.sort(key=lambda v: max(j for j, c in enumerate(v) if c))
    return basis


def sparse_rank(columns):
    """Rank of the matrix with sparse columns, block by block."""
    total = 0
    for block in column_blocks(columns):
        keys = {}
        for j in block:
            for key in columns[j]:
                keys.setdefault(key, len(keys))
        rows = [[0] * len(block) for _ in keys]
        for local, j in enumerate(block):
            for key, v in columns[j].items():
                rows[keys[key]][local] = v
        if rows:
            total += rank(rows, len(block))
    return total


def sparse_solve(columns, rhs):
    """One solution of sum_j v_j columns[j] = rhs (sparse dicts), or None.

    Solves through the kernel of the augmented matrix [columns | -rhs]: a
    solution exists iff that kernel has a vector with last entry nonzero.
    """
    m = len(columns)
    aug = list(columns) + [{k: -v for k, v in rhs.items() if v}]
    for vec in sparse_nullspace(aug):
        if vec[m]:
            return [Fraction(v, vec[m]) for v in vec[:m]]
    return None
