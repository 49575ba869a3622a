"""Exact sparse multivariate polynomials with rational coefficients.

A :class:`Polynomial` maps exponent tuples to :class:`fractions.Fraction`
coefficients.  Zero coefficients are never stored, so the zero polynomial
is the empty map.  Instances are immutable; every operation returns a new
polynomial.

Monomials are ordered graded-lexicographically (higher total degree first,
ties broken lexicographically on the exponent tuple, ``x1`` most
significant).  This order is used for text output, serialization, and
floating-point evaluation so that results are reproducible.
"""

from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
import math
import re

from .errors import StructuralError

#: Degree of the zero polynomial.
NEG_INF = float("-inf")


def as_fraction(value):
    """Coerce an int, Fraction, or ``"num/den"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def grlex_key(exponents):
    return (sum(exponents), exponents)


def frac_text(c):
    return f"{c.numerator}/{c.denominator}"


class Polynomial:
    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n_vars, terms=None):
        if not isinstance(n_vars, int) or n_vars < 0:
            raise StructuralError(f"n_vars must be a non-negative int, got {n_vars!r}")
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != n_vars:
                    raise StructuralError(
                        f"monomial {mono} has {len(mono)} exponents, expected {n_vars}"
                    )
                if any(e < 0 for e in mono):
                    raise StructuralError(f"negative exponent in {mono}")
                c = as_fraction(coeff)
                if c:
                    clean[mono] = clean.get(mono, 0) + c
                    if not clean[mono]:
                        del clean[mono]
        self._n = n_vars
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, n_vars, terms):
        # trusted path: terms already normalized
        obj = object.__new__(cls)
        obj._n = n_vars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n_vars):
        return cls._raw(n_vars, {})

    @classmethod
    def constant(cls, n_vars, value):
        c = as_fraction(value)
        return cls._raw(n_vars, {(0,) * n_vars: c} if c else {})

    @classmethod
    def var(cls, n_vars, index, coeff=1):
        if not 0 <= index < n_vars:
            raise StructuralError(f"variable index {index} out of range for {n_vars} vars")
        mono = tuple(1 if i == index else 0 for i in range(n_vars))
        return cls(n_vars, {mono: coeff})

    @classmethod
    def monomial(cls, exponents, coeff=1):
        exponents = tuple(exponents)
        return cls(len(exponents), {exponents: coeff})

    @classmethod
    def linear_form(cls, coeffs):
        """``sum_i coeffs[i] * x_i``."""
        n = len(coeffs)
        return cls(n, {tuple(1 if i == j else 0 for i in range(n)): c
                       for j, c in enumerate(coeffs)})

    # -- basic accessors ----------------------------------------------

    @property
    def n_vars(self):
        return self._n

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def coefficient(self, exponents):
        return self._terms.get(tuple(exponents), Fraction(0))

    def monomials(self):
        """Monomials in graded-lex order, highest first."""
        return sorted(self._terms, key=grlex_key, reverse=True)

    def items(self):
        return [(m, self._terms[m]) for m in self.monomials()]

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return all(sum(m) == 0 for m in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self._n, Fraction(0))

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(m) for m in self._terms)

    @property
    def min_degree(self):
        """Least total degree among the stored terms (``+inf`` for zero)."""
        if not self._terms:
            return float("inf")
        return min(sum(m) for m in self._terms)

    def depends_on(self, index):
        return any(m[index] for m in self._terms)

    # -- equality / hashing ------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other._n != self._n:
                raise StructuralError(
                    f"variable-count mismatch: {self._n} vs {other._n}"
                )
            return other
        try:
            return Polynomial.constant(self._n, other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(self._n, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self._n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Polynomial.zero(self._n)
            return Polynomial._raw(self._n, {m: v * c for m, v in self._terms.items()})
        other = self._coerce(other)
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial._raw(self._n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative int")
        result = Polynomial.constant(self._n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and grading -------------------------------------------

    def diff(self, index):
        """Formal partial derivative with respect to variable ``index``."""
        if not 0 <= index < self._n:
            raise StructuralError(f"variable index {index} out of range for {self._n} vars")
        out = {}
        for m, c in self._terms.items():
            e = m[index]
            if e:
                dm = m[:index] + (e - 1,) + m[index + 1:]
                out[dm] = c * e
        return Polynomial._raw(self._n, out)

    def gradient(self):
        return [self.diff(i) for i in range(self._n)]

    def homogeneous_part(self, degree):
        return Polynomial._raw(
            self._n, {m: c for m, c in self._terms.items() if sum(m) == degree}
        )

    def part_from(self, degree):
        """Sum of the homogeneous parts of degree ``>= degree``."""
        return Polynomial._raw(
            self._n, {m: c for m, c in self._terms.items() if sum(m) >= degree}
        )

    def homogeneous_parts(self):
        if not self._terms:
            return {}
        return {d: self.homogeneous_part(d) for d in range(int(self.degree) + 1)}

    # -- evaluation ---------------------------------------------------

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        """Evaluate at ``point``.

        The result is an exact Fraction when every coordinate is an int or
        Fraction, and a float otherwise.  Terms are accumulated in
        graded-lex order.
        """
        point = list(point)
        if len(point) != self._n:
            raise StructuralError(f"point has {len(point)} coordinates, expected {self._n}")
        exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in point)
        if exact:
            total = Fraction(0)
            for m, c in self.items():
                term = c
                for v, e in zip(point, m):
                    if e:
                        term *= Fraction(v) ** e
                total += term
            return total
        xs = [float(v) for v in point]
        total = 0.0
        for m, c in self.items():
            term = float(c)
            for v, e in zip(xs, m):
                if e:
                    term *= v ** e
            total += term
        return total

    # -- substitution ---------------------------------------------------

    def compose_affine(self, T, c=None):
        """Return ``p(T x' + c)`` expanded in the variables ``x'``."""
        rows = _matrix_rows(T)
        n = self._n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise StructuralError(f"substitution matrix must be {n}x{n}")
        if c is None:
            c = [0] * n
        if len(c) != n:
            raise StructuralError(f"offset has length {len(c)}, expected {n}")
        images = [
            Polynomial.linear_form([as_fraction(v) for v in rows[i]]) + as_fraction(c[i])
            for i in range(n)
        ]
        return self.substitute(images)

    def substitute(self, images):
        """Replace variable ``x_i`` by the polynomial ``images[i]``."""
        if len(images) != self._n:
            raise StructuralError(f"need {self._n} images, got {len(images)}")
        if not images:
            return self
        n_out = images[0].n_vars
        if any(im.n_vars != n_out for im in images):
            raise StructuralError("substituted polynomials disagree on variable count")
        powers = [{0: Polynomial.constant(n_out, 1)} for _ in images]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        result = Polynomial.zero(n_out)
        for m, coeff in self._terms.items():
            term = Polynomial.constant(n_out, coeff)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def restrict(self, indices):
        """Polynomial in the listed variables only (others must be absent)."""
        indices = list(indices)
        keep = set(indices)
        out = {}
        for m, c in self._terms.items():
            if any(e for i, e in enumerate(m) if i not in keep):
                raise StructuralError("polynomial depends on a dropped variable")
            out[tuple(m[i] for i in indices)] = c
        return Polynomial._raw(len(indices), out)

    # -- text -----------------------------------------------------------

    def to_text(self):
        """Canonical text form, e.g. ``-1/1*x1^1 + 1/1*x2^2``."""
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.items():
            factors = [f"x{i + 1}^{e}" for i, e in enumerate(m) if e]
            parts.append("*".join([frac_text(c)] + factors))
        return " + ".join(parts)

    _TERM = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)((?:\s*\*\s*x\d+\^\d+)*)\s*$")
    _FACTOR = re.compile(r"x(\d+)\^(\d+)")

    @classmethod
    def from_text(cls, text, n_vars):
        """Inverse of :meth:`to_text`."""
        text = text.strip()
        if text == "0":
            return cls.zero(n_vars)
        terms = {}
        for chunk in text.split(" + "):
            match = cls._TERM.match(chunk)
            if not match:
                raise ValueError(f"malformed term {chunk!r}")
            exps = [0] * n_vars
            for idx, e in cls._FACTOR.findall(match.group(2)):
                i = int(idx) - 1
                if not 0 <= i < n_vars:
                    raise StructuralError(f"variable x{idx} out of range")
                exps[i] += int(e)
            m = tuple(exps)
            terms[m] = terms.get(m, 0) + Fraction(match.group(1))
        return cls(n_vars, terms)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self._n}, {self.to_text()!r})"


def _matrix_rows(T):
    if hasattr(T, "to_rows"):
        return T.to_rows()
    return [list(r) for r in T]


def variables(n_vars):
    """The coordinate functions ``x_1, ..., x_n`` as polynomials."""
    return [Polynomial.var(n_vars, i) for i in range(n_vars)]


def monomials_of_degree(n_vars, degree, indices=None):
    """All exponent tuples of the given total degree supported on ``indices``."""
    if indices is None:
        indices = range(n_vars)
    indices = list(indices)
    out = []

    def rec(pos, remaining, acc):
        if pos == len(indices) - 1:
            acc[indices[pos]] = remaining
            out.append(tuple(acc))
            acc[indices[pos]] = 0
            return
        for e in range(remaining, -1, -1):
            acc[indices[pos]] = e
            rec(pos + 1, remaining - e, acc)
        acc[indices[pos]] = 0

    if not indices:
        return [(0,) * n_vars] if degree == 0 else []
    rec(0, degree, [0] * n_vars)
    return sorted(out, key=grlex_key, reverse=True)


def lcm_of_denominators(coeffs):
    out = 1
    for c in coeffs:
        out = out * c.denominator // math.gcd(out, c.denominator)
    return out
