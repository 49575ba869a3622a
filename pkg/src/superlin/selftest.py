"""Randomized self-checks shared by the ``selftest`` command and the test suite.

Results are reported as pass counts per family together with short
descriptions of the first few failing cases.
"""

import random
from fractions import Fraction

from .canonical import (
    Lemma1Verdict,
    canonicalize,
    compute_invariant_subspace,
    krylov_contained,
    lemma1_oracle,
    proposition1_check,
)
from .discovery import generate_random_balanced
from .errors import SuperlinError
from .linalg import RatMatrix, rref_nullspace
from .model import verify_embedding
from .poly import Polynomial, monomials_of_degree
from .sim import MAX_DERIVATIVE_ORDER, check_derivative_identity
from .vectorfield import PolyVectorField, lie_bracket, lie_derivative

MAX_REPORTED_FAILURES = 5


def random_polynomial(rng, n, max_degree, min_degree=0, density=0.5, bound=3):
    """Random polynomial with integer coefficients in ``[-bound, bound]``."""
    terms = {}
    for d in range(min_degree, max_degree + 1):
        for mono in monomials_of_degree(n, d):
            if rng.random() < density:
                terms[mono] = rng.randint(-bound, bound)
    return Polynomial(n, terms)


def random_field(rng, n, max_degree, **kw):
    return PolyVectorField(n, [random_polynomial(rng, n, max_degree, **kw) for _ in range(n)])


def random_point(rng, n, bound=5):
    return tuple(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(n))


def _nonzero_vector(rng, n, bound=3):
    v = [0] * n
    while not any(v):
        # sparse directions are the interesting edge cases
        v = [rng.randint(-bound, bound) if rng.random() < 0.7 else 0 for _ in range(n)]
    return tuple(Fraction(x) for x in v)


def _annihilating_forms(gbar):
    """Linear forms vanishing on ``gbar`` (a basis of its orthogonal complement)."""
    return [Polynomial.linear_form(v) for v in rref_nullspace(RatMatrix([list(gbar)]))]


def _transverse(rng, n, gbar, deg_max):
    """Random polynomial of degree >= 2 in the linear forms annihilating ``gbar``."""
    forms = _annihilating_forms(gbar)
    if not forms:
        return Polynomial.zero(n)
    r = random_polynomial(rng, len(forms), rng.randint(2, deg_max), min_degree=2)
    return r.substitute(forms)


def constructive_triple(rng, n_max=3, deg_max=4):
    """``psi`` built from coordinates transverse to ``Gbar``, so ``L_Gbar psi = 0``."""
    n = rng.randint(1, n_max)
    gbar = _nonzero_vector(rng, n)
    q = Polynomial.zero(n)
    while q.is_zero():
        q = random_polynomial(rng, n, rng.randint(1, deg_max))
    return _transverse(rng, n, gbar, deg_max), q, gbar


def adversarial_triple(rng, n_max=3, deg_max=4):
    """Triples aimed at the boundary of the hypothesis.

    Mixes transverse polynomials with small perturbations along ``Gbar``,
    pure powers of linear forms, constant ``q``, and unconstrained draws.
    """
    n = rng.randint(1, n_max)
    gbar = _nonzero_vector(rng, n)
    kind = rng.randrange(5)
    q = random_polynomial(rng, n, rng.randint(0, deg_max), density=0.6)
    if kind == 0:
        bump = Polynomial.monomial(rng.choice(monomials_of_degree(n, 2)), rng.choice([-1, 1]))
        psi = _transverse(rng, n, gbar, deg_max) + bump
    elif kind == 1:
        form = Polynomial.linear_form([rng.randint(-2, 2) for _ in range(n)])
        psi = form ** rng.randint(2, deg_max)
    elif kind == 2:
        psi = _transverse(rng, n, gbar, deg_max)
        q = Polynomial.constant(n, rng.choice([-2, -1, 1, 2]))
    elif kind == 3:
        psi = random_polynomial(rng, n, rng.randint(2, deg_max), min_degree=2)
        q = random_polynomial(rng, n, deg_max, min_degree=deg_max, density=0.8)
    else:
        psi = random_polynomial(rng, n, rng.randint(0, deg_max))
    return psi, q, gbar


def lemma_sweep(seed, adversarial=500, constructive=500):
    """Run the degree-lemma oracle; returns verdict counts per family."""
    rng = random.Random(seed)
    counts = {}
    examples = []
    for family, count, make in (("adversarial", adversarial, adversarial_triple),
                                ("constructive", constructive, constructive_triple)):
        tally = {v: 0 for v in Lemma1Verdict}
        for _ in range(count):
            psi, q, gbar = make(rng)
            verdict = lemma1_oracle(psi, q, gbar)
            tally[verdict] += 1
            if verdict is Lemma1Verdict.VIOLATION and len(examples) < MAX_REPORTED_FAILURES:
                examples.append(f"psi={psi.to_text()}, q={q.to_text()}, Gbar={list(map(str, gbar))}")
        counts[family] = {v.value: c for v, c in tally.items()}
    return counts, examples


def roundtrip_family(seed, count=100):
    """Generated balanced systems cycling through ``k``, ``n2`` and ``deg``."""
    rng = random.Random(seed)
    shapes = [(k, n2, deg) for k in (1, 2) for n2 in (1, 2, 3) for deg in (2, 3)]
    out = []
    for i in range(count):
        k, n2, deg = shapes[i % len(shapes)]
        out.append(((k, n2, deg), generate_random_balanced(rng.randrange(2 ** 32), k, n2, deg)))
    return out


def check_roundtrip_case(gen, k, rng=None, derivative_orders=range(MAX_DERIVATIVE_ORDER + 1)):
    """All structural claims for one generated system; returns a list of problems."""
    sys, emb = gen.system, gen.embedding
    problems = []
    if not verify_embedding(sys, emb).sufficient_ok:
        problems.append("closure identities fail")
    if not proposition1_check(sys, emb).ok:
        problems.append("visible observable varies along a Krylov direction")
    if not krylov_contained(emb, compute_invariant_subspace(emb)):
        problems.append("Krylov spans leave the invariant subspace")
    try:
        cf = canonicalize(sys, emb)
    except SuperlinError as exc:
        return problems + [f"canonicalize failed: {exc}"]
    n = cf.n
    A_p = cf.T_inv @ cf.embedding.blocks().A @ cf.T
    if not A_p.submatrix(range(cf.k, n), range(cf.k)).is_zero():
        problems.append("lower-left block nonzero")
    if any(cf.T_inv.apply(emb.blocks().B)[cf.k:]):
        problems.append("control enters the autonomous block")
    if cf.k < k:
        problems.append(f"recovered k={cf.k} below generated k={k}")
    if any(not cf.qp.diff(j).is_zero() for j in range(cf.k)):
        problems.append("q' depends on the first block")
    rng = rng or random.Random(0)
    point = random_point(rng, n)
    for order in derivative_orders:
        if check_derivative_identity(sys, emb, order, point) != 0:
            problems.append(f"derivative identity fails at order {order}")
    return problems


def _ring_case(rng):
    n = rng.randint(1, 3)
    a, b, c = (random_polynomial(rng, n, rng.randint(0, 3)) for _ in range(3))
    pt = random_point(rng, n)
    return ((a + b) + c == a + (b + c) and a + b == b + a and a * b == b * a
            and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
            and (a - a).is_zero() and (a * b)(pt) == a(pt) * b(pt)
            and (a + b)(pt) == a(pt) + b(pt))


def _lie_case(rng):
    n = rng.randint(1, 3)
    f, g, h = (random_field(rng, n, 2, density=0.4, bound=2) for _ in range(3))
    p = random_polynomial(rng, n, 3, density=0.4)
    fg = lie_bracket(f, g)
    lhs = lie_derivative(fg, p)
    rhs = lie_derivative(f, lie_derivative(g, p)) - lie_derivative(g, lie_derivative(f, p))
    jacobi = (lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f))
              + lie_bracket(h, lie_bracket(f, g)))
    return lhs == rhs and (fg + lie_bracket(g, f)).is_zero() and jacobi.is_zero()


def run_selftest(seed=0, cases=50, lemma_cases=500, roundtrip_cases=20):
    """Run every family and return ``{name: {"passed", "total", "failures"}}``."""
    rng = random.Random(seed)
    results = {}

    def record(name, outcomes):
        failures = [msg for ok, msg in outcomes if not ok]
        results[name] = {"passed": len(outcomes) - len(failures), "total": len(outcomes),
                         "failures": failures[:MAX_REPORTED_FAILURES]}

    record("ring_axioms", [(_ring_case(rng), f"ring case {i}") for i in range(cases)])
    record("lie_identities", [(_lie_case(rng), f"lie case {i}") for i in range(cases)])

    counts, examples = lemma_sweep(rng.randrange(2 ** 32), lemma_cases, lemma_cases)
    violations = sum(c[Lemma1Verdict.VIOLATION.value] for c in counts.values())
    total = 2 * lemma_cases
    results["lemma_sweep"] = {"passed": total - violations, "total": total,
                              "failures": examples, "verdicts": counts}

    outcomes = []
    for (k, n2, deg), gen in roundtrip_family(rng.randrange(2 ** 32), roundtrip_cases):
        problems = check_roundtrip_case(gen, k, rng)
        outcomes.append((not problems, f"k={k} n2={n2} deg={deg}: {'; '.join(problems)}"))
    record("roundtrip_canonicalization", outcomes)
    return results
