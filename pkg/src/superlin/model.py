"""Control systems, affine embeddings, and per-embedding predicates.

An :class:`Embedding` lifts ``x' = f(x) + u g(x)`` on R^n to the affine
system ``z' = A_l z + B_l u + D_l`` on R^(n+m) through the observable map
``p``.  The lifted matrices are partitioned as::

    A_l = [[A, G],    B_l = [B,    D_l = [D,
           [H, M]]           C]           E]

with ``A`` n x n, ``G`` n x m, ``H`` m x n, ``M`` m x m.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import NotSingleVisible, NotVerified, StructuralError, UnsupportedReduction
from .linalg import RatMatrix, extend_basis, invert
from .poly import Polynomial, as_fraction
from .vectorfield import PolyVectorField, affine_map, lie_derivative, mat_field


def _vec(values):
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class ControlSystem:
    """``x' = f(x) + u g(x)`` with polynomial ``f`` and ``g``."""

    f: PolyVectorField
    g: PolyVectorField

    def __post_init__(self):
        n = self.f.n_vars
        if len(self.f) != n:
            raise StructuralError(f"drift has {len(self.f)} components over {n} variables")
        if self.g.n_vars != n or len(self.g) != n:
            raise StructuralError("control field shape does not match the drift")

    @property
    def n(self):
        return self.f.n_vars

    @property
    def f_at_origin(self):
        return tuple(c.constant_term() for c in self.f)

    def has_equilibrium_at_origin(self):
        return not any(self.f_at_origin)

    def control_is_constant(self):
        return all(c.is_constant() for c in self.g)

    def control_vector(self):
        if not self.control_is_constant():
            raise StructuralError("control field is not constant")
        return tuple(c.constant_term() for c in self.g)


@dataclass(frozen=True)
class Blocks:
    A: RatMatrix
    G: RatMatrix
    H: RatMatrix
    M: RatMatrix
    B: tuple
    C: tuple
    D: tuple
    E: tuple

    @property
    def n(self):
        return self.A.nrows

    @property
    def m(self):
        return self.M.nrows

    def assemble(self):
        """Return ``(A_l, B_l, D_l)``."""
        A_ell = RatMatrix.block([[self.A, self.G], [self.H, self.M]])
        return A_ell, tuple(self.B) + tuple(self.C), tuple(self.D) + tuple(self.E)


@dataclass(frozen=True)
class Embedding:
    n: int
    m: int
    A_ell: RatMatrix
    B_ell: tuple
    D_ell: tuple
    p: PolyVectorField

    def __post_init__(self):
        object.__setattr__(self, "B_ell", _vec(self.B_ell))
        object.__setattr__(self, "D_ell", _vec(self.D_ell))
        n, m = self.n, self.m
        if n < 1 or m < 0:
            raise StructuralError(f"invalid dimensions n={n}, m={m}")
        if self.A_ell.shape != (n + m, n + m):
            raise StructuralError(f"A_ell is {self.A_ell.shape}, expected {(n + m, n + m)}")
        if len(self.B_ell) != n + m or len(self.D_ell) != n + m:
            raise StructuralError("B_ell and D_ell must have length n + m")
        if self.p.n_vars != n or len(self.p) != m:
            raise StructuralError(f"observable map must be R^{n} -> R^{m}")

    @classmethod
    def from_blocks(cls, blocks, p):
        A_ell, B_ell, D_ell = blocks.assemble()
        return cls(blocks.n, len(p), A_ell, B_ell, D_ell, p)

    def blocks(self):
        return partition(self)

    def lift(self, x):
        """``iota(x) = (x, p(x))``."""
        x = tuple(x)
        return x + self.p.evaluate(x)


def partition(emb):
    n, m = emb.n, emb.m
    top, bottom = range(n), range(n, n + m)
    return Blocks(
        A=emb.A_ell.submatrix(top, top),
        G=emb.A_ell.submatrix(top, bottom),
        H=emb.A_ell.submatrix(bottom, top),
        M=emb.A_ell.submatrix(bottom, bottom),
        B=emb.B_ell[:n],
        C=emb.B_ell[n:],
        D=emb.D_ell[:n],
        E=emb.D_ell[n:],
    )


class Residual(NamedTuple):
    identity: str
    row: int
    residual: Polynomial


@dataclass(frozen=True)
class VerificationReport:
    necessary_ok: bool
    sufficient_ok: bool
    system_form_ok: bool
    details: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return self.necessary_ok and self.sufficient_ok and self.system_form_ok


@dataclass(frozen=True)
class ObservableClassification:
    visible: tuple
    hidden: tuple
    g_rank: int
    gbar: tuple = None


def _drift(blocks, p):
    """``A x + G p(x) + D`` as a polynomial field."""
    return affine_map(blocks.A, blocks.D, p.n_vars) + mat_field(blocks.G, p)


def _system_form_residuals(sys, emb):
    b = partition(emb)
    out = []
    for i, r in enumerate(sys.f - _drift(b, emb.p)):
        if not r.is_zero():
            out.append(Residual("drift form f = Ax + Gp + D", i, r))
    for i, (gi, bi) in enumerate(zip(sys.g, b.B)):
        r = gi - bi
        if not r.is_zero():
            out.append(Residual("control field g = B", i, r))
    return out


def check_system_form(sys, emb):
    if sys.n != emb.n:
        raise StructuralError(f"system has n={sys.n}, embedding n={emb.n}")
    return not _system_form_residuals(sys, emb)


def closure_residuals(emb):
    """Residuals of the observable closure identities.

    Returns ``(drift, control)`` maps over R^n with m components each:
    ``(dp/dx)(Ax + Gp + D) - (Hx + Mp + E)`` and ``(dp/dx) B - C``.
    """
    b = partition(emb)
    n = emb.n
    drift = lie_derivative(_drift(b, emb.p), emb.p)
    target = affine_map(b.H, b.E, n) + mat_field(b.M, emb.p)
    control = lie_derivative(PolyVectorField.constant(b.B), emb.p)
    control = PolyVectorField(n, [c - ci for c, ci in zip(control, b.C)])
    return drift - target, control


def closure_ok(emb):
    drift, control = closure_residuals(emb)
    return drift.is_zero() and control.is_zero()


def verify_embedding(sys, emb):
    """Check the system form and both the projected and full closure identities."""
    if sys.n != emb.n:
        raise StructuralError(f"system has n={sys.n}, embedding n={emb.n}")
    b = partition(emb)
    details = _system_form_residuals(sys, emb)
    system_form_ok = not details
    drift, control = closure_residuals(emb)
    proj_drift, proj_control = mat_field(b.G, drift), mat_field(b.G, control)
    for name, resid in (("G-projected drift closure", proj_drift),
                        ("G-projected control closure", proj_control),
                        ("drift closure (z2-row)", drift),
                        ("control closure (z2-row)", control)):
        details.extend(Residual(name, i, r) for i, r in enumerate(resid) if not r.is_zero())
    return VerificationReport(
        necessary_ok=proj_drift.is_zero() and proj_control.is_zero(),
        sufficient_ok=drift.is_zero() and control.is_zero(),
        system_form_ok=system_form_ok,
        details=tuple(details),
    )


def _first_nonzero(v):
    return next((i for i, x in enumerate(v) if x), None)


def classify_observables(emb):
    G = partition(emb).G
    visible = tuple(j for j in range(emb.m) if any(G.column(j)))
    hidden = tuple(j for j in range(emb.m) if j not in visible)
    g_rank = G.rank()
    gbar = None
    if g_rank == 1:
        col = G.column(visible[0])
        lead = col[_first_nonzero(col)]
        gbar = tuple(x / lead for x in col)
    return ObservableClassification(visible, hidden, g_rank, gbar)


def _coefficient_rows(polys):
    monos = sorted({mono for p in polys for mono in p.terms})
    return [[p.coefficient(mono) for mono in monos] for p in polys], len(monos)


def _independent(polys):
    if not polys:
        return True
    rows, width = _coefficient_rows(polys)
    if width == 0:
        return False
    return RatMatrix(rows, width).rank() == len(polys)


def is_reduced_visible_form(emb):
    """Return ``(ok, diagnostics)``; observables are numbered from 1."""
    diagnostics = []
    for j, pj in enumerate(emb.p):
        if not pj.homogeneous_part(0).is_zero():
            diagnostics.append(f"constant term in observable {j + 1}")
        if not pj.homogeneous_part(1).is_zero():
            diagnostics.append(f"linear term in observable {j + 1}")
    visible = classify_observables(emb).visible
    if not _independent([emb.p[j] for j in visible]):
        diagnostics.append("dependent visible observables")
    return not diagnostics, diagnostics


def reduce_observables(emb):
    """Strip constant and linear parts from every observable.

    With ``p = c + L x + p~`` the lifted state ``z2 - c - L z1`` satisfies an
    affine system with the same ``B``, ``G`` and

        A' = A + GL,   D' = D + Gc,   M' = M - LG,   C' = C - LB,
        H' = H + ML - L(A + GL),      E' = E + Mc - L(D + Gc).
    """
    if not closure_ok(emb):
        raise NotVerified("closure identities fail; cannot reduce observables")
    n = emb.n
    b = partition(emb)
    c = tuple(pj.constant_term() for pj in emb.p)
    L = RatMatrix([[pj.coefficient(tuple(int(i == k) for i in range(n))) for k in range(n)]
                   for pj in emb.p], n)
    if not any(c) and L.is_zero():
        return emb
    stripped = PolyVectorField(n, [pj.part_from(2) for pj in emb.p])
    visible = classify_observables(emb).visible
    if not _independent([stripped[j] for j in visible]):
        raise UnsupportedReduction("visible observables become dependent after stripping; "
                                   "merging them is not supported")
    A2 = b.A + b.G @ L
    D2 = tuple(d + gc for d, gc in zip(b.D, b.G.apply(c)))
    M2 = b.M - L @ b.G
    C2 = tuple(ci - lb for ci, lb in zip(b.C, L.apply(b.B)))
    H2 = b.H + b.M @ L - L @ A2
    E2 = tuple(e + mc - ld for e, mc, ld in zip(b.E, b.M.apply(c), L.apply(D2)))
    blocks = Blocks(A=A2, G=b.G, H=H2, M=M2, B=b.B, C=C2, D=D2, E=E2)
    return Embedding.from_blocks(blocks, stripped)


def is_balanced(emb, classification=None):
    cls = classification or classify_observables(emb)
    if not cls.hidden:
        return True
    hidden = max(emb.p[j].degree for j in cls.hidden)
    visible = min((emb.p[j].degree for j in cls.visible), default=float("inf"))
    return hidden <= visible


def is_single_visible_normal(emb):
    """True when ``G = Gbar e1^T`` with ``Gbar != 0``."""
    G = partition(emb).G
    return emb.m >= 1 and any(G.column(0)) and all(not any(G.column(j))
                                                   for j in range(1, emb.m))


def visible_parts(emb):
    """``(Gbar, q)`` for an embedding already in single-visible normal form."""
    if not is_single_visible_normal(emb):
        raise NotSingleVisible("G-matrix is not of the form Gbar e1^T")
    return partition(emb).G.column(0), emb.p[0]


def normalize_single_visible(emb):
    """Change observable basis so the G-matrix becomes ``Gbar e1^T``.

    ``Gbar`` is the first nonzero column of ``G``; writing ``G = Gbar c^T``
    the new observables are ``S p`` where ``S`` has first row ``c^T`` and
    is completed by standard basis rows.
    """
    b = partition(emb)
    if b.G.rank() != 1:
        raise NotSingleVisible(f"G-matrix has rank {b.G.rank()}, expected 1")
    j0 = next(j for j in range(emb.m) if any(b.G.column(j)))
    gbar = b.G.column(j0)
    i0 = _first_nonzero(gbar)
    c = tuple(b.G[i0, j] / gbar[i0] for j in range(emb.m))
    S = extend_basis([c], emb.m).T
    if S == RatMatrix.identity(emb.m):
        return emb
    S_inv = invert(S)
    blocks = Blocks(
        A=b.A, G=b.G @ S_inv, H=S @ b.H, M=S @ b.M @ S_inv,
        B=b.B, C=S.apply(b.C), D=b.D, E=S.apply(b.E),
    )
    return Embedding.from_blocks(blocks, mat_field(S, emb.p))


def observable_degrees(emb):
    return [p.degree for p in emb.p]


def zero_vector(n):
    return (Fraction(0),) * n
