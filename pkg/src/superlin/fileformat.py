"""JSON system descriptions with exact rational coefficients.

Layout::

    {"n": 2, "m": 1,
     "f": [[{"coefficient": "-1/1", "exponents": [1, 0]}, ...], ...],
     "g": [...],
     "embedding": {"A_ell": [["-1/1", ...], ...], "B_ell": [...],
                   "D_ell": [...], "p": [...]}}

Rationals are ``"num/den"`` strings (plain integer strings and JSON
integers are accepted on input).  :func:`dump_system` emits a canonical
text form, so ``dump_system(*load_system(text)) == text`` for any file it
wrote.
"""

import json
from fractions import Fraction

from .errors import ParseError, SchemaError
from .linalg import RatMatrix
from .model import ControlSystem, Embedding
from .poly import Polynomial, frac_text
from .vectorfield import PolyVectorField


def _rational(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(f"{path}: expected a rational string like \"3/4\", got {value!r}")
    try:
        return Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{path}: {value!r} is not a rational number") from None


def _int(doc, key, path=""):
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SchemaError(f"{path}{key}: expected a non-negative integer, got {value!r}")
    return value


def _list(value, path, length=None):
    if not isinstance(value, list):
        raise SchemaError(f"{path}: expected a list")
    if length is not None and len(value) != length:
        raise SchemaError(f"{path}: expected {length} entries, found {len(value)}")
    return value


def _polynomial(terms, n, path):
    out = {}
    for t, term in enumerate(_list(terms, path)):
        tpath = f"{path}[{t}]"
        if not isinstance(term, dict) or set(term) != {"coefficient", "exponents"}:
            raise SchemaError(f"{tpath}: expected an object with keys coefficient, exponents")
        exps = _list(term["exponents"], f"{tpath}.exponents", n)
        if any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in exps):
            raise SchemaError(f"{tpath}.exponents: entries must be non-negative integers")
        mono = tuple(exps)
        if mono in out:
            raise SchemaError(f"{tpath}: repeated monomial {list(mono)}")
        out[mono] = _rational(term["coefficient"], f"{tpath}.coefficient")
    return Polynomial(n, out)


def _field(value, n, length, path):
    comps = _list(value, path, length)
    return PolyVectorField(n, [_polynomial(c, n, f"{path}[{i}]") for i, c in enumerate(comps)])


def _vector(value, length, path):
    return tuple(_rational(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path, length)))


def _grid(value, size, path):
    rows = _list(value, path, size)
    return RatMatrix([_vector(r, size, f"{path}[{i}]") for i, r in enumerate(rows)], size)


def system_from_document(doc):
    """Build ``(ControlSystem, Embedding | None)`` from parsed JSON."""
    if not isinstance(doc, dict):
        raise SchemaError("top level: expected an object")
    unknown = set(doc) - {"n", "m", "f", "g", "embedding"}
    if unknown:
        raise SchemaError(f"top level: unknown keys {sorted(unknown)}")
    n = _int(doc, "n")
    if n < 1:
        raise SchemaError("n: must be at least 1")
    for key in ("f", "g"):
        if key not in doc:
            raise SchemaError(f"{key}: missing")
    sys = ControlSystem(_field(doc["f"], n, n, "f"), _field(doc["g"], n, n, "g"))

    block = doc.get("embedding")
    if block is None:
        if "m" in doc:
            _int(doc, "m")
        return sys, None
    if "m" not in doc:
        raise SchemaError("m: required when an embedding is given")
    m = _int(doc, "m")
    if not isinstance(block, dict):
        raise SchemaError("embedding: expected an object")
    keys = {"A_ell", "B_ell", "D_ell", "p"}
    if set(block) != keys:
        raise SchemaError(f"embedding: expected exactly the keys {sorted(keys)}")
    emb = Embedding(
        n=n, m=m,
        A_ell=_grid(block["A_ell"], n + m, "embedding.A_ell"),
        B_ell=_vector(block["B_ell"], n + m, "embedding.B_ell"),
        D_ell=_vector(block["D_ell"], n + m, "embedding.D_ell"),
        p=_field(block["p"], n, m, "embedding.p"),
    )
    return sys, emb


def load_system(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return system_from_document(doc)


def parse_system_file(path):
    """Read a system file; returns ``(ControlSystem, Embedding | None)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text ({exc.reason})") from None
    return load_system(text)


# -- output --------------------------------------------------------------


def polynomial_document(p):
    return [{"coefficient": frac_text(c), "exponents": list(m)} for m, c in p.items()]


def field_document(field):
    return [polynomial_document(c) for c in field]


def system_document(sys, emb=None):
    doc = {"n": sys.n, "m": emb.m if emb is not None else 0,
           "f": field_document(sys.f), "g": field_document(sys.g)}
    if emb is not None:
        doc["embedding"] = {
            "A_ell": emb.A_ell.to_strings(),
            "B_ell": [frac_text(v) for v in emb.B_ell],
            "D_ell": [frac_text(v) for v in emb.D_ell],
            "p": field_document(emb.p),
        }
    return doc


def _compact(value, indent):
    # one term / one matrix row per line keeps the files diffable
    pad = " " * indent
    if isinstance(value, dict):
        if "coefficient" in value or not value:
            return json.dumps(value)
        items = [f'{pad}  {json.dumps(k)}: {_compact(v, indent + 2)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, list):
        if not value or all(not isinstance(v, (list, dict)) for v in value):
            return json.dumps(value)
        items = [f"{pad}  {_compact(v, indent + 2)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(value)


def dump_document(doc):
    return _compact(doc, 0) + "\n"


def dump_system(sys, emb=None):
    """Canonical text of a system file."""
    return dump_document(system_document(sys, emb))


def write_system_file(path, sys, emb=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_system(sys, emb))
