"""Exact rational matrices.

Elimination is fraction-free: each row is scaled to integers and reduced
with Bareiss' algorithm, so intermediate entries are minors of the input
and never carry denominators.  Results are handed back as reduced
:class:`~fractions.Fraction` values.
"""

from fractions import Fraction

from .errors import DegenerateBasis, SingularMatrix, StructuralError
from .poly import as_fraction, frac_text, lcm_of_denominators


class RatMatrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ("_rows", "_nrows", "_ncols")

    def __init__(self, rows, ncols=None):
        data = tuple(tuple(as_fraction(v) for v in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise StructuralError("ragged matrix rows")
        self._rows = data
        self._nrows = len(data)
        self._ncols = ncols

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns, nrows):
        columns = [tuple(c) for c in columns]
        if any(len(c) != nrows for c in columns):
            raise StructuralError(f"columns must have length {nrows}")
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @classmethod
    def column_vector(cls, v):
        return cls([[x] for x in v], 1)

    @classmethod
    def block(cls, grid):
        """Assemble from a 2-D grid of RatMatrix blocks."""
        rows = []
        for block_row in grid:
            height = block_row[0].nrows
            if any(b.nrows != height for b in block_row):
                raise StructuralError("block row heights disagree")
            for i in range(height):
                rows.append([v for b in block_row for v in b._rows[i]])
        ncols = sum(b.ncols for b in grid[0]) if grid else 0
        return cls(rows, ncols)

    # -- accessors ------------------------------------------------------

    @property
    def nrows(self):
        return self._nrows

    @property
    def ncols(self):
        return self._ncols

    @property
    def shape(self):
        return (self._nrows, self._ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i):
        return self._rows[i]

    def column(self, j):
        return tuple(r[j] for r in self._rows)

    def columns(self):
        return [self.column(j) for j in range(self._ncols)]

    def to_rows(self):
        return [list(r) for r in self._rows]

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return RatMatrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    @property
    def T(self):
        return RatMatrix([[self._rows[i][j] for i in range(self._nrows)]
                          for j in range(self._ncols)], self._nrows)

    def is_zero(self):
        return all(v == 0 for r in self._rows for v in r)

    # -- arithmetic -----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __add__(self, other):
        if self.shape != other.shape:
            raise StructuralError(f"shape mismatch {self.shape} vs {other.shape}")
        return RatMatrix([[a + b for a, b in zip(r, s)]
                          for r, s in zip(self._rows, other._rows)], self._ncols)

    def __neg__(self):
        return RatMatrix([[-a for a in r] for r in self._rows], self._ncols)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_fraction(c)
        return RatMatrix([[a * c for a in r] for r in self._rows], self._ncols)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self._ncols != other._nrows:
                raise StructuralError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return RatMatrix([[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols]
                              for r in self._rows], other._ncols)
        return self.apply(other)

    def apply(self, v):
        """Matrix-vector product; returns a tuple of Fractions."""
        v = tuple(v)
        if len(v) != self._ncols:
            raise StructuralError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * as_fraction(b) for a, b in zip(r, v)), Fraction(0))
                     for r in self._rows)

    def power(self, k):
        if self._nrows != self._ncols:
            raise StructuralError("power of a non-square matrix")
        out = RatMatrix.identity(self._nrows)
        for _ in range(k):
            out = out @ self
        return out

    # -- exact linear algebra ------------------------------------------

    def rank(self):
        _, pivots = _bareiss_echelon(self._rows, self._ncols)
        return len(pivots)

    def nullspace(self):
        return rref_nullspace(self)

    def inverse(self):
        return invert(self)

    def determinant(self):
        if self._nrows != self._ncols:
            raise StructuralError("determinant of a non-square matrix")
        n = self._nrows
        if n == 0:
            return Fraction(1)
        scaled, scales = _integer_rows(self._rows)
        a = [list(r) for r in scaled]
        sign = 1
        prev = 1
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                return Fraction(0)
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        denom = 1
        for s in scales:
            denom *= s
        return Fraction(sign * a[n - 1][n - 1], denom)

    # -- text -----------------------------------------------------------

    def to_strings(self):
        return [[frac_text(v) for v in r] for r in self._rows]

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in r) for r in self._rows)
        return f"RatMatrix({self._nrows}x{self._ncols}: [{body}])"


def _integer_rows(rows):
    scaled, scales = [], []
    for r in rows:
        s = lcm_of_denominators(r) if r else 1
        scaled.append([int(v * s) for v in r])
        scales.append(s)
    return scaled, scales


def _bareiss_echelon(rows, ncols):
    """Fraction-free row echelon form.

    Returns the integer echelon rows (only the first ``rank`` are nonzero)
    and the list of pivot columns.
    """
    a, _ = _integer_rows(rows)
    nrows = len(a)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nrows):
            lead = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, ncols):
                row_i[j] = (row_i[j] * p - lead * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        pivots.append(c)
        r += 1
    return a, pivots


def _back_substitute(echelon, pivots, ncols, free_col):
    """Kernel vector with ``free_col`` set to 1 and other free columns 0."""
    v = [Fraction(0)] * ncols
    v[free_col] = Fraction(1)
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = echelon[r]
        s = sum((row[j] * v[j] for j in range(c + 1, ncols) if row[j]), Fraction(0))
        v[c] = -s / row[c]
    return tuple(v)


def rref_nullspace(M):
    """Exact basis of ``ker M``, one vector per free column in increasing order."""
    if not isinstance(M, RatMatrix):
        M = RatMatrix(M)
    echelon, pivots = _bareiss_echelon(M._rows, M.ncols)
    pivot_set = set(pivots)
    return [_back_substitute(echelon, pivots, M.ncols, f)
            for f in range(M.ncols) if f not in pivot_set]


def rank_of_vectors(vectors, length):
    if not vectors:
        return 0
    return RatMatrix(vectors, length).rank()


def invert(M):
    if M.nrows != M.ncols:
        raise StructuralError(f"cannot invert a {M.shape} matrix")
    n = M.nrows
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M._rows)]
    echelon, pivots = _bareiss_echelon(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    # Solve the upper-triangular system for each identity column.
    cols = []
    for k in range(n):
        x = [Fraction(0)] * n
        for r in range(n - 1, -1, -1):
            row = echelon[r]
            s = Fraction(row[n + k]) - sum((row[j] * x[j] for j in range(r + 1, n)), Fraction(0))
            x[r] = s / row[r]
        cols.append(x)
    return RatMatrix.from_columns(cols, n)


class SpanBuilder:
    """Incremental independence test for vectors of a fixed length.

    Keeps a reduced echelon copy of the accepted vectors; ``add`` reports
    whether the candidate enlarged the span.
    """

    def __init__(self, length):
        self.length = length
        self.vectors = []
        self._reduced = []  # (pivot index, vector with pivot entry 1)

    def _reduce(self, v):
        v = list(v)
        for piv, w in self._reduced:
            c = v[piv]
            if c:
                v = [a - c * b for a, b in zip(v, w)]
        return v

    def contains(self, v):
        return not any(self._reduce(v))

    def add(self, v):
        v = tuple(as_fraction(x) for x in v)
        if len(v) != self.length:
            raise StructuralError(f"vector of length {len(v)}, expected {self.length}")
        r = self._reduce(v)
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is None:
            return False
        inv = 1 / r[piv]
        r = [x * inv for x in r]
        # keep existing rows reduced against the new pivot
        self._reduced = [
            (p, [a - w[piv] * b for a, b in zip(w, r)]) if w[piv] else (p, w)
            for p, w in self._reduced
        ]
        self._reduced.append((piv, r))
        self.vectors.append(v)
        return True

    @property
    def dim(self):
        return len(self.vectors)


def krylov_span(A, V0):
    """Column basis of ``span{V0, A V0, ..., A^(n-1) V0}``.

    Columns are added in order of discovery and the iteration stops as soon
    as a power of ``A`` contributes nothing new.
    """
    if A.nrows != A.ncols:
        raise StructuralError("Krylov span needs a square matrix")
    if not isinstance(V0, RatMatrix):
        V0 = RatMatrix.column_vector(V0)
    n = A.nrows
    if V0.nrows != n:
        raise StructuralError(f"starting block has {V0.nrows} rows, expected {n}")
    span = SpanBuilder(n)
    frontier = [c for c in V0.columns() if span.add(c)]
    for _ in range(n - 1):
        if not frontier:
            break
        frontier = [w for w in (A.apply(v) for v in frontier) if span.add(w)]
    return RatMatrix.from_columns(span.vectors, n)


def extend_basis(vectors, n):
    """Invertible ``n x n`` matrix whose leading columns are ``vectors``.

    Remaining columns are the first standard basis vectors that keep the
    column set independent.
    """
    span = SpanBuilder(n)
    for v in vectors:
        if not span.add(v):
            raise DegenerateBasis("input vectors are linearly dependent")
    for i in range(n):
        if span.dim == n:
            break
        span.add(tuple(Fraction(int(i == j)) for j in range(n)))
    return RatMatrix.from_columns(span.vectors, n)


def in_span(basis, v):
    span = SpanBuilder(len(v))
    for b in basis:
        span.add(b)
    return span.contains(v)


def vec_text(v):
    return [frac_text(as_fraction(x)) for x in v]
