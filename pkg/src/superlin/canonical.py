"""Canonical form for balanced embeddings with one visible observable.

Given a verified, balanced embedding whose G-matrix has rank one, a linear
change of variables ``x = T x'`` splits ``x' = (x1', x2')`` so that

    x1' = A11 x1' + A12 x2' + Gbar' q'(x2') + B' u
    x2' = A22 x2'

i.e. the nonlinearity only enters the first block and depends only on the
second, which evolves linearly and autonomously.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import BlockStructureViolation, NotBalanced, NotSingleVisible, NotVerified
from .errors import StructuralError
from .linalg import RatMatrix, extend_basis, invert, krylov_span, rank_of_vectors, rref_nullspace
from .model import (
    ControlSystem,
    Embedding,
    classify_observables,
    is_balanced,
    normalize_single_visible,
    partition,
    reduce_observables,
    verify_embedding,
    visible_parts,
)
from .poly import Polynomial
from .vectorfield import (
    PolyVectorField,
    coefficient_matrices,
    directional_derivative,
    mat_field,
)


@dataclass(frozen=True)
class CanonicalForm:
    T: RatMatrix
    T_inv: RatMatrix
    k: int
    A11: RatMatrix
    A12: RatMatrix
    A22: RatMatrix
    Bp: tuple
    Gbar_p: tuple
    Dp: tuple
    qp: Polynomial
    embedding: Optional[Embedding] = None

    @property
    def n(self):
        return self.T.nrows

    @property
    def A_prime(self):
        n, k = self.n, self.k
        lower_left = RatMatrix.zeros(n - k, k)
        return RatMatrix.block([[self.A11, self.A12], [lower_left, self.A22]])

    @property
    def B_prime(self):
        return tuple(self.Bp) + (Fraction(0),) * (self.n - self.k)

    @property
    def Gbar_prime(self):
        return tuple(self.Gbar_p) + (Fraction(0),) * (self.n - self.k)

    def system(self):
        """The transformed system in the ``x'`` coordinates."""
        n = self.n
        rows = []
        for i in range(n):
            comp = Polynomial.linear_form(self.A_prime.row(i)) + self.Dp[i]
            if self.Gbar_prime[i]:
                comp = comp + self.qp * self.Gbar_prime[i]
            rows.append(comp)
        return ControlSystem(PolyVectorField(n, rows), PolyVectorField.constant(self.B_prime))


class Prop1Result(NamedTuple):
    ok: bool
    family: Optional[str] = None
    direction: Optional[tuple] = None
    residual: Optional[Polynomial] = None


def proposition1_check(sys, emb):
    """Check that the visible observable is constant along the Krylov spans.

    For every basis vector ``v`` of ``span{B, AB, ...}`` and of
    ``span{Gbar, A Gbar, ...}`` the polynomial ``(dq/dx) v`` must vanish
    identically.  The first offending direction is returned on failure.
    """
    if sys is not None and sys.n != emb.n:
        raise StructuralError(f"system has n={sys.n}, embedding n={emb.n}")
    gbar, q = visible_parts(emb)
    b = partition(emb)
    for family, start in (("controllability", b.B), ("Gbar", gbar)):
        for v in krylov_span(b.A, start).columns():
            r = directional_derivative(q, v)
            if not r.is_zero():
                return Prop1Result(False, family, v, r)
    return Prop1Result(True)


def _annihilator_stack(emb):
    """Stacked coefficient matrices of the polynomial matrix ``G dp/dx``."""
    b = partition(emb)
    gp = mat_field(b.G, emb.p)
    mats = coefficient_matrices(gp.jacobian())
    rows = [r for mono in sorted(mats) for r in mats[mono].to_rows()]
    return RatMatrix(rows, emb.n)


def annihilating_subspace(emb):
    """Largest subspace ``V`` with ``G (dp/dx)(x) v = 0`` for every ``x``."""
    return rref_nullspace(_annihilator_stack(emb))


def compute_invariant_subspace(emb):
    """Largest ``A``-invariant subspace inside :func:`annihilating_subspace`.

    This is ``ker [K; K A; ...; K A^(n-1)]`` where ``K`` stacks the
    coefficient matrices of ``G dp/dx``.  It contains the Krylov spans of
    ``B`` and ``Gbar`` whenever the visible observable is constant along
    them, and its invariance is what makes the lower-left block of
    ``T^-1 A T`` vanish.
    """
    K = _annihilator_stack(emb)
    A = partition(emb).A
    rows = []
    block = K
    for _ in range(emb.n):
        if block.nrows == 0:
            break
        rows.extend(block.to_rows())
        block = block @ A
    return rref_nullspace(RatMatrix(rows, emb.n))


def _prepare(sys, emb):
    report = verify_embedding(sys, emb)
    if not (report.sufficient_ok and report.system_form_ok):
        raise NotVerified("embedding does not satisfy the closure and system-form identities")
    if any(not pj.homogeneous_part(0).is_zero() or not pj.homogeneous_part(1).is_zero()
           for pj in emb.p):
        emb = reduce_observables(emb)
    cls = classify_observables(emb)
    if cls.g_rank > 1:
        raise NotSingleVisible(f"G-matrix has rank {cls.g_rank}; one visible observable expected")
    if cls.g_rank == 1:
        emb = normalize_single_visible(emb)
    if not is_balanced(emb):
        raise NotBalanced("hidden observables exceed the visible observable's degree")
    return emb, cls.g_rank


def canonicalize(sys, emb):
    """Compute the block-triangular canonical form of a verified embedding.

    The embedding is reduced (constant and linear observable parts
    stripped) and normalized to ``G = Gbar e1^T`` first when needed.  All
    structural claims of the form are re-checked exactly before returning.
    """
    emb, g_rank = _prepare(sys, emb)
    n = emb.n
    b = partition(emb)
    if g_rank == 1:
        gbar, q = visible_parts(emb)
    else:
        gbar, q = (Fraction(0),) * n, Polynomial.zero(n)

    V = compute_invariant_subspace(emb)
    k = len(V)
    T = extend_basis(V, n)
    T_inv = invert(T)
    A_p = T_inv @ b.A @ T
    B_p = T_inv.apply(b.B)
    G_p = T_inv.apply(gbar)
    D_p = T_inv.apply(b.D)
    q_p = q.compose_affine(T)

    problems = []
    if not A_p.submatrix(range(k, n), range(k)).is_zero():
        problems.append("lower-left block of T^-1 A T is nonzero")
    if any(B_p[k:]):
        problems.append("control enters the autonomous block")
    if any(G_p[k:]):
        problems.append("nonlinearity enters the autonomous block")
    if any(q_p.depends_on(j) for j in range(k)):
        problems.append("transformed observable depends on the first block")
    if problems:
        raise BlockStructureViolation("; ".join(problems))

    return CanonicalForm(
        T=T, T_inv=T_inv, k=k,
        A11=A_p.submatrix(range(k), range(k)),
        A12=A_p.submatrix(range(k), range(k, n)),
        A22=A_p.submatrix(range(k, n), range(k, n)),
        Bp=B_p[:k], Gbar_p=G_p[:k], Dp=D_p, qp=q_p,
        embedding=emb,
    )


def krylov_contained(emb, V):
    """True when the Krylov spans of ``B`` and ``Gbar`` lie in ``span(V)``.

    Membership is tested by exact rank equality of ``[V | v]`` and ``V``.
    """
    b = partition(emb)
    gbar, _ = visible_parts(emb)
    n = emb.n
    r = rank_of_vectors(list(V), n)
    return all(rank_of_vectors(list(V) + [v], n) == r
               for start in (b.B, gbar)
               for v in krylov_span(b.A, start).columns())


class Lemma1Verdict(str, Enum):
    HYPOTHESIS_NOT_MET = "hypothesis_not_met"
    CONCLUSION_HOLDS = "conclusion_holds"
    VIOLATION = "VIOLATION"


def lemma1_oracle(psi, q, gbar):
    """Brute-force check of the degree lemma on one instance.

    With ``phi = L_{Gbar q} psi``: if ``psi`` has no constant or linear
    part, ``q`` is nonzero, and ``deg phi <= deg q``, then both ``phi`` and
    ``L_Gbar psi`` must vanish.  ``VIOLATION`` means they do not.
    """
    if psi.n_vars != q.n_vars or len(gbar) != psi.n_vars:
        raise StructuralError("psi, q and Gbar must live on the same space")
    if psi.is_zero():
        return Lemma1Verdict.CONCLUSION_HOLDS
    d_psi = directional_derivative(psi, gbar)
    phi = d_psi * q
    if (not psi.homogeneous_part(0).is_zero() or not psi.homogeneous_part(1).is_zero()
            or q.is_zero() or phi.degree > q.degree):
        return Lemma1Verdict.HYPOTHESIS_NOT_MET
    if d_psi.is_zero() and phi.is_zero():
        return Lemma1Verdict.CONCLUSION_HOLDS
    return Lemma1Verdict.VIOLATION
