"""Shared fixtures data and hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from superlin import ControlSystem, Embedding, Polynomial, PolyVectorField, RatMatrix
from superlin.poly import monomials_of_degree

SYSTEMS_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "systems"


def brunton_system():
    x, y = Polynomial.var(2, 0), Polynomial.var(2, 1)
    return ControlSystem(PolyVectorField(2, [-x + y ** 2, -y]), PolyVectorField.constant([1, 0]))


def brunton_embedding(M=-2):
    y = Polynomial.var(2, 1)
    A_ell = RatMatrix([[-1, 0, 1], [0, -1, 0], [0, 0, M]])
    return Embedding(2, 1, A_ell, (1, 0, 0), (0, 0, 0), PolyVectorField(2, [y ** 2]))


def rotation_system():
    x1, x2, x3 = (Polynomial.var(3, i) for i in range(3))
    return ControlSystem(PolyVectorField(3, [-x1 + x2 ** 2, x3, -x2]),
                         PolyVectorField.constant([1, 0, 0]))


def rotation_embedding():
    x2, x3 = Polynomial.var(3, 1), Polynomial.var(3, 2)
    A_ell = RatMatrix([
        [-1, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, -1, 0, 1],
        [0, 0, 0, 0, -2, 0],
    ])
    p = PolyVectorField(3, [x2 ** 2, x2 * x3, x3 ** 2])
    return Embedding(3, 3, A_ell, (1, 0, 0, 0, 0, 0), (0,) * 6, p)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)
small_ints = st.integers(-3, 3)


@st.composite
def polynomials(draw, n=None, max_degree=3, min_degree=0, max_terms=6):
    n = draw(st.integers(1, 3)) if n is None else n
    monos = [m for d in range(min_degree, max_degree + 1) for m in monomials_of_degree(n, d)]
    chosen = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True)) if monos else []
    return Polynomial(n, {m: draw(rationals) for m in chosen})


@st.composite
def poly_tuples(draw, count, max_degree=3, **kw):
    n = draw(st.integers(1, 3))
    return tuple(draw(polynomials(n=n, max_degree=max_degree, **kw)) for _ in range(count))


@st.composite
def fields(draw, n, max_degree=2, max_terms=3):
    return PolyVectorField(n, [draw(polynomials(n=n, max_degree=max_degree, max_terms=max_terms))
                               for _ in range(n)])


@st.composite
def points(draw, n):
    return tuple(draw(rationals) for _ in range(n))


@st.composite
def matrices(draw, rows, cols, elements=small_ints):
    return RatMatrix([[draw(elements) for _ in range(cols)] for _ in range(rows)], cols)


@st.composite
def invertible_matrices(draw, n):
    M = draw(matrices(n, n))
    if M.determinant() == 0:
        # shift by a multiple of the identity; some shift in 0..n is always nonsingular
        for s in range(1, n + 2):
            shifted = M + RatMatrix.identity(n).scale(s)
            if shifted.determinant() != 0:
                return shifted
    return M


def frac(x):
    return Fraction(x)


def transform_observables(emb, S, L=None, c=None):
    """Embedding for the observables ``S p + L x + c`` (same base system).

    The lifted state moves by ``w = P z + d`` with ``P = [[I, 0], [L, S]]``
    and ``d = (0, c)``, so ``A' = P A P^-1``, ``B' = P B`` and
    ``D' = P D - A' d``.
    """
    from superlin.linalg import invert

    n, m = emb.n, emb.m
    L = L if L is not None else RatMatrix.zeros(m, n)
    c = tuple(Fraction(v) for v in (c if c is not None else (0,) * m))
    P = RatMatrix.block([[RatMatrix.identity(n), RatMatrix.zeros(n, m)], [L, S]])
    A2 = P @ emb.A_ell @ invert(P)
    d = (Fraction(0),) * n + c
    B2 = P.apply(emb.B_ell)
    D2 = tuple(a - b for a, b in zip(P.apply(emb.D_ell), A2.apply(d)))
    comps = []
    for i in range(m):
        acc = Polynomial.linear_form(L.row(i)) + c[i]
        for j in range(m):
            if S[i, j]:
                acc = acc + emb.p[j] * S[i, j]
        comps.append(acc)
    return Embedding(n, m, A2, B2, D2, PolyVectorField(n, comps))
