"""Exact verification and canonical forms for affine lifts of polynomial control systems."""

from .canonical import (
    CanonicalForm,
    Lemma1Verdict,
    annihilating_subspace,
    canonicalize,
    compute_invariant_subspace,
    krylov_contained,
    lemma1_oracle,
    proposition1_check,
)
from .discovery import DiscoveryConfig, discover_embedding, generate_random_balanced
from .errors import (
    BlockStructureViolation,
    DegenerateBasis,
    DivergenceError,
    NotBalanced,
    NotFound,
    NotSingleVisible,
    NotVerified,
    ParseError,
    SchemaError,
    SingularMatrix,
    StructuralError,
    SuperlinError,
    UnsupportedControlField,
    UnsupportedReduction,
)
from .fileformat import dump_system, load_system, parse_system_file, write_system_file
from .linalg import RatMatrix, extend_basis, invert, krylov_span, rref_nullspace
from .model import (
    Blocks,
    ControlSystem,
    Embedding,
    classify_observables,
    is_balanced,
    is_reduced_visible_form,
    normalize_single_visible,
    reduce_observables,
    verify_embedding,
)
from .poly import Polynomial
from .sim import (
    ControlSignal,
    check_derivative_identity,
    check_diagram,
    check_gp_identity,
    integrate,
)
from .vectorfield import PolyVectorField, iterated_lie_scalar, lie_bracket, lie_derivative

__version__ = "0.1.0"
