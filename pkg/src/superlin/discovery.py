"""Closure search for observables, and random balanced test families."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .canonical import CanonicalForm
from .errors import NotFound, StructuralError, UnsupportedControlField
from .linalg import RatMatrix, invert, rref_nullspace
from .model import Blocks, ControlSystem, Embedding, is_balanced, partition, verify_embedding
from .poly import Polynomial, grlex_key, monomials_of_degree
from .vectorfield import PolyVectorField, lie_derivative, mat_field


@dataclass(frozen=True)
class DiscoveryConfig:
    max_degree: int = 4
    max_observables: int = 64
    require_balanced: bool = False

    def __post_init__(self):
        if self.max_degree < 2:
            raise ValueError("max_degree must be at least 2")
        if self.max_observables < 1:
            raise ValueError("max_observables must be positive")


class _PolySpan:
    """Echelon basis of a space of polynomials, pivoting on the grlex-leading monomial."""

    def __init__(self, n_vars):
        self.n_vars = n_vars
        self.rows = {}  # pivot monomial -> polynomial with coefficient 1 there

    def __len__(self):
        return len(self.rows)

    def reduce(self, p):
        for mono in sorted(self.rows, key=grlex_key, reverse=True):
            c = p.coefficient(mono)
            if c:
                p = p - self.rows[mono] * c
        return p

    def add(self, p):
        """Insert the reduced polynomial ``p`` (nonzero); returns the stored row."""
        lead = max(p.terms, key=grlex_key)
        row = p / p.coefficient(lead)
        for mono, other in list(self.rows.items()):
            c = other.coefficient(lead)
            if c:
                self.rows[mono] = other - row * c
        self.rows[lead] = row
        return row

    def basis(self):
        """Fully reduced basis ordered by decreasing pivot."""
        return [self.rows[m] for m in sorted(self.rows, key=grlex_key, reverse=True)]


def _coordinates(basis, pivots, p):
    """Coordinates of ``p`` in a reduced echelon basis; ``None`` if outside the span."""
    coords = [p.coefficient(m) for m in pivots]
    rest = p
    for c, b in zip(coords, basis):
        if c:
            rest = rest - b * c
    return coords if rest.is_zero() else None


def discover_embedding(sys, cfg=None):
    """Search for observables whose Lie derivatives close affinely.

    The search space is the smallest space of polynomials without constant
    or linear terms that contains the nonlinear part of ``f`` and is closed
    under ``w -> (L_f w)`` modulo affine terms.  Its reduced echelon basis
    becomes the observable map; ``H, M, E, C`` are read off by exact
    coordinates and ``A, G, D`` from the decomposition of ``f``.
    """
    cfg = cfg or DiscoveryConfig()
    if not sys.control_is_constant():
        raise UnsupportedControlField("closure search requires a constant control field g = B")
    n = sys.n
    B = sys.control_vector()
    drift = sys.f
    nonlinear = drift.part_from(2)

    span = _PolySpan(n)
    frontier = []
    queue = []

    def offer(p):
        r = span.reduce(p)
        if r.is_zero():
            return
        if r.degree > cfg.max_degree or len(span) >= cfg.max_observables:
            frontier.append(r)
            return
        queue.append(span.add(r))

    for comp in nonlinear:
        offer(comp)
    while queue:
        w = queue.pop(0)
        offer(lie_derivative(drift, w).part_from(2))
    if frontier:
        raise NotFound(
            f"no closure within degree {cfg.max_degree} and {cfg.max_observables} observables; "
            f"frontier: {', '.join(p.to_text() for p in frontier)}",
            frontier=frontier,
        )

    basis = span.basis()
    pivots = [max(b.terms, key=grlex_key) for b in basis]
    m = len(basis)
    p = PolyVectorField(n, basis)
    control = PolyVectorField.constant(B)
    for b in basis:
        lb = lie_derivative(control, b)
        if not lb.is_constant():
            raise NotFound(
                f"control acts non-affinely on observable {b.to_text()} (L_B = {lb.to_text()})",
                frontier=[lb], reason="control",
            )

    def unit(i):
        return tuple(int(i == j) for j in range(n))

    G_rows, A_rows, D = [], [], []
    for comp in drift:
        coords = _coordinates(basis, pivots, comp.part_from(2))
        G_rows.append(coords)
        A_rows.append([comp.coefficient(unit(j)) for j in range(n)])
        D.append(comp.constant_term())
    H_rows, M_rows, E, C = [], [], [], []
    for b in basis:
        lf = lie_derivative(drift, b)
        M_rows.append(_coordinates(basis, pivots, lf.part_from(2)))
        H_rows.append([lf.coefficient(unit(j)) for j in range(n)])
        E.append(lf.constant_term())
        C.append(lie_derivative(control, b).constant_term())

    blocks = Blocks(
        A=RatMatrix(A_rows, n), G=RatMatrix(G_rows, m), H=RatMatrix(H_rows, n),
        M=RatMatrix(M_rows, m), B=B, C=tuple(C), D=tuple(D), E=tuple(E),
    )
    emb = Embedding.from_blocks(blocks, p)
    report = verify_embedding(sys, emb)
    if not (report.sufficient_ok and report.system_form_ok):
        raise AssertionError("discovered embedding failed re-verification")
    if cfg.require_balanced and not is_balanced(emb):
        raise NotFound("closure found but it is not balanced", frontier=(), reason="unbalanced")
    return emb


# -- random balanced families ------------------------------------------------


class GeneratedSystem(NamedTuple):
    system: ControlSystem
    embedding: Embedding
    truth: CanonicalForm


def _rand_matrix(rng, rows, cols, bound):
    return RatMatrix([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols)


def random_unimodular(rng, n, steps=None, bound=2):
    """Random integer matrix with determinant +-1 (row operations and a permutation)."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice([c for c in range(-bound, bound + 1) if c])
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    rng.shuffle(rows)
    return RatMatrix(rows, n)


def _solve_in_basis(basis_polys, target):
    monos = sorted({m for p in basis_polys for m in p.terms} | set(target.terms))
    cols = [[p.coefficient(m) for m in monos] for p in basis_polys]
    cols.append([-target.coefficient(m) for m in monos])
    system = RatMatrix.from_columns(cols, len(monos))
    for v in rref_nullspace(system):
        if v[-1]:
            return [x / v[-1] for x in v[:-1]]
    raise ArithmeticError("target polynomial is outside the span of the basis")


def generate_random_balanced(seed, k, n2, deg, scramble=True, bound=3):
    """Random system with a known balanced single-visible embedding.

    The system is built in block coordinates ``x' = (x1', x2')`` with
    ``x2'`` linear and autonomous and the nonlinearity ``Gbar' q'(x2')``
    entering only the first block.  All monomials of degree ``2..deg`` in
    ``x2'`` serve as observables (with ``q'`` replacing one of the top
    degree ones), which closes automatically under the linear ``x2'``
    dynamics.  The result is then expressed in ``x = T0 x'`` for a random
    unimodular ``T0``.
    """
    if k < 1 or n2 < 1 or deg < 2:
        raise StructuralError("need k >= 1, n2 >= 1, deg >= 2")
    rng = random.Random(seed)
    n = k + n2
    second = list(range(k, n))

    A11 = _rand_matrix(rng, k, k, bound)
    A12 = _rand_matrix(rng, k, n2, bound)
    A22 = _rand_matrix(rng, n2, n2, bound)
    A_p = RatMatrix.block([[A11, A12], [RatMatrix.zeros(n2, k), A22]])
    B_p = tuple(rng.randint(-bound, bound) for _ in range(k)) + (0,) * n2
    gbar_top = [0] * k
    while not any(gbar_top):
        gbar_top = [rng.randint(-bound, bound) for _ in range(k)]
    G_p = tuple(gbar_top) + (0,) * n2

    monos = [mono for d in range(deg, 1, -1) for mono in monomials_of_degree(n, d, second)]
    top = monomials_of_degree(n, deg, second)
    lead = rng.choice(top)
    q_terms = {mono: rng.randint(-bound, bound) for mono in monos}
    q_terms[lead] = rng.choice([c for c in range(-bound, bound + 1) if c])
    q_p = Polynomial(n, q_terms)
    observables_p = [q_p] + [Polynomial.monomial(mono) for mono in monos if mono != lead]
    m = len(observables_p)

    linear = PolyVectorField.linear(A_p)
    M = RatMatrix([_solve_in_basis(observables_p, lie_derivative(linear, obs))
                   for obs in observables_p], m)

    T0 = random_unimodular(rng, n) if scramble else RatMatrix.identity(n)
    T0_inv = invert(T0)
    A = T0 @ A_p @ T0_inv
    B = T0.apply(B_p)
    gbar = T0.apply(G_p)
    p = PolyVectorField(n, [obs.compose_affine(T0_inv) for obs in observables_p])
    q = p[0]
    f = PolyVectorField(n, [Polynomial.linear_form(A.row(i)) + q * gbar[i] for i in range(n)])
    system = ControlSystem(f, PolyVectorField.constant(B))

    G = RatMatrix([[gbar[i]] + [0] * (m - 1) for i in range(n)], m)
    zeros_m = (Fraction(0),) * m
    blocks = Blocks(A=A, G=G, H=RatMatrix.zeros(m, n), M=M, B=B, C=zeros_m,
                    D=(Fraction(0),) * n, E=zeros_m)
    embedding = Embedding.from_blocks(blocks, p)
    truth = CanonicalForm(
        T=T0, T_inv=T0_inv, k=k, A11=A11, A12=A12, A22=A22,
        Bp=tuple(Fraction(b) for b in B_p[:k]), Gbar_p=tuple(Fraction(g) for g in gbar_top),
        Dp=(Fraction(0),) * n, qp=q_p,
    )
    return GeneratedSystem(system, embedding, truth)


def embedding_through(emb, T):
    """Re-express an embedding in coordinates ``x = T x'`` (observables unchanged)."""
    b = partition(emb)
    T_inv = invert(T)
    blocks = Blocks(A=T_inv @ b.A @ T, G=T_inv @ b.G, H=b.H @ T, M=b.M,
                    B=T_inv.apply(b.B), C=b.C, D=T_inv.apply(b.D), E=b.E)
    return Embedding.from_blocks(blocks, emb.p.compose_affine(T))


def system_through(sys, T):
    """Re-express ``x' = f + u g`` in coordinates ``x = T x'``."""
    T_inv = invert(T)
    f = mat_field(T_inv, sys.f.compose_affine(T))
    g = mat_field(T_inv, sys.g.compose_affine(T))
    return ControlSystem(f, g)
