"""Polynomial vector fields and Lie calculus."""

from fractions import Fraction

from .errors import StructuralError
from .linalg import RatMatrix
from .poly import Polynomial, as_fraction


class PolyVectorField:
    """A tuple of polynomials over a common set of ``n_vars`` variables.

    Square fields (as many components as variables) are vector fields on
    R^n; other lengths represent polynomial maps R^n -> R^k such as an
    observable map.
    """

    __slots__ = ("_n", "_components")

    def __init__(self, n_vars, components):
        components = tuple(components)
        for c in components:
            if not isinstance(c, Polynomial):
                raise TypeError(f"component {c!r} is not a Polynomial")
            if c.n_vars != n_vars:
                raise StructuralError(
                    f"component over {c.n_vars} variables in a field over {n_vars}"
                )
        self._n = n_vars
        self._components = components

    @classmethod
    def zero(cls, n_vars, length=None):
        length = n_vars if length is None else length
        return cls(n_vars, [Polynomial.zero(n_vars)] * length)

    @classmethod
    def constant(cls, vector):
        n = len(vector)
        return cls(n, [Polynomial.constant(n, v) for v in vector])

    @classmethod
    def linear(cls, A):
        """The linear field ``x -> A x``."""
        if A.nrows != A.ncols:
            raise StructuralError("linear field needs a square matrix")
        return cls(A.ncols, [Polynomial.linear_form(A.row(i)) for i in range(A.nrows)])

    @property
    def n_vars(self):
        return self._n

    @property
    def components(self):
        return self._components

    def __len__(self):
        return len(self._components)

    def __iter__(self):
        return iter(self._components)

    def __getitem__(self, i):
        return self._components[i]

    def __eq__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self._n == other._n and self._components == other._components

    def __hash__(self):
        return hash((self._n, self._components))

    def __add__(self, other):
        self._check_same_shape(other)
        return PolyVectorField(self._n, [a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check_same_shape(other)
        return PolyVectorField(self._n, [a - b for a, b in zip(self, other)])

    def __neg__(self):
        return PolyVectorField(self._n, [-a for a in self])

    def scale(self, c):
        return PolyVectorField(self._n, [a * c for a in self])

    def _check_same_shape(self, other):
        if self._n != other._n or len(self) != len(other):
            raise StructuralError("vector fields of different shapes")

    def is_zero(self):
        return all(c.is_zero() for c in self._components)

    @property
    def degree(self):
        return max((c.degree for c in self._components), default=float("-inf"))

    def jacobian(self):
        """Rows of partial derivatives, ``J[i][j] = d comp_i / d x_j``."""
        return [c.gradient() for c in self._components]

    def evaluate(self, point):
        return tuple(c.evaluate(point) for c in self._components)

    def compose_affine(self, T, c=None):
        return PolyVectorField(self._n, [p.compose_affine(T, c) for p in self._components])

    def homogeneous_part(self, degree):
        return PolyVectorField(self._n, [p.homogeneous_part(degree) for p in self])

    def part_from(self, degree):
        return PolyVectorField(self._n, [p.part_from(degree) for p in self])

    def to_text(self):
        return [p.to_text() for p in self._components]

    def __repr__(self):
        return f"PolyVectorField({self._n}, {self.to_text()!r})"


def mat_field(M, field):
    """Matrix times polynomial map: ``(M p)_i = sum_j M_ij p_j``."""
    if M.ncols != len(field):
        raise StructuralError(f"{M.shape} matrix applied to a map with {len(field)} components")
    n = field.n_vars
    out = []
    for i in range(M.nrows):
        acc = Polynomial.zero(n)
        for coeff, comp in zip(M.row(i), field):
            if coeff:
                acc = acc + comp * coeff
        out.append(acc)
    return PolyVectorField(n, out)


def affine_map(M, offset, n_vars):
    """``x -> M x + offset`` as a polynomial map in ``n_vars`` variables."""
    if M.ncols != n_vars:
        raise StructuralError(f"{M.shape} matrix does not act on R^{n_vars}")
    comps = [Polynomial.linear_form(M.row(i)) + as_fraction(offset[i]) for i in range(M.nrows)]
    return PolyVectorField(n_vars, comps)


def _directional(p, f):
    """``(dp/dx) f`` for a scalar polynomial ``p``."""
    acc = Polynomial.zero(p.n_vars)
    for j, fj in enumerate(f):
        if fj.is_zero():
            continue
        dp = p.diff(j)
        if not dp.is_zero():
            acc = acc + dp * fj
    return acc


def lie_derivative(f, p):
    """Lie derivative of ``p`` along ``f``: ``(dp/dx) f``, component-wise.

    ``p`` may be a :class:`PolyVectorField` of any length or a single
    :class:`Polynomial`; the result has the same kind.
    """
    if isinstance(f, (list, tuple)):
        f = PolyVectorField(f[0].n_vars, f)
    if len(f) != f.n_vars:
        raise StructuralError("Lie derivative direction must be a square vector field")
    if isinstance(p, Polynomial):
        if p.n_vars != f.n_vars:
            raise StructuralError(f"polynomial over {p.n_vars} vars, field over {f.n_vars}")
        return _directional(p, f)
    if p.n_vars != f.n_vars:
        raise StructuralError(f"map over {p.n_vars} vars, field over {f.n_vars}")
    return PolyVectorField(p.n_vars, [_directional(c, f) for c in p])


def lie_bracket(f, g):
    """``[f, g] = (dg/dx) f - (df/dx) g``."""
    if len(f) != f.n_vars or len(g) != g.n_vars or f.n_vars != g.n_vars:
        raise StructuralError("Lie bracket needs two square fields on the same space")
    return lie_derivative(f, g) - lie_derivative(g, f)


def iterated_lie_scalar(A, q, k):
    """``L_{Ax}^k q`` for the linear field ``x -> A x``."""
    if not isinstance(k, int) or k < 0:
        raise StructuralError(f"iteration count must be a non-negative int, got {k!r}")
    if A.nrows != A.ncols or A.ncols != q.n_vars:
        raise StructuralError("matrix and polynomial dimensions disagree")
    field = PolyVectorField.linear(A)
    out = q
    for _ in range(k):
        out = _directional(out, field)
    return out


def directional_derivative(p, v):
    """``(dp/dx) v`` for a constant direction ``v``."""
    if len(v) != p.n_vars:
        raise StructuralError(f"direction of length {len(v)} for {p.n_vars} variables")
    acc = Polynomial.zero(p.n_vars)
    for j, c in enumerate(v):
        c = as_fraction(c)
        if c:
            acc = acc + p.diff(j) * c
    return acc


def coefficient_matrices(rows):
    """Split a matrix of polynomials into ``{monomial: RatMatrix}``.

    ``rows`` is a list of equal-length lists of polynomials; the result
    satisfies ``rows == sum_alpha M_alpha x^alpha`` entry-wise.
    """
    if not rows:
        return {}
    nr, nc = len(rows), len(rows[0])
    found = {}
    for i, r in enumerate(rows):
        for j, p in enumerate(r):
            for mono, c in p.terms.items():
                found.setdefault(mono, {})[(i, j)] = c
    out = {}
    for mono, entries in found.items():
        grid = [[entries.get((i, j), Fraction(0)) for j in range(nc)] for i in range(nr)]
        out[mono] = RatMatrix(grid, nc)
    return out
