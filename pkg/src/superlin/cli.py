"""Command-line front end.

Every command assembles one report dictionary; the text output and the
``--json`` file are both rendered from it.  Exit codes: 0 when every
verdict passes, 1 when a verdict fails, 2 on unusable input.
"""

import argparse
import hashlib
import json
import sys as _sys
import time

import numpy as np

from .canonical import canonicalize, compute_invariant_subspace, krylov_contained, proposition1_check
from .discovery import DiscoveryConfig, discover_embedding
from .errors import (
    BlockStructureViolation,
    DivergenceError,
    NotBalanced,
    NotFound,
    NotSingleVisible,
    NotVerified,
    ParseError,
    SchemaError,
    StructuralError,
    UnsupportedControlField,
    UnsupportedReduction,
)
from .fileformat import parse_system_file, system_document, write_system_file
from .linalg import RatMatrix
from .model import (
    classify_observables,
    is_balanced,
    is_reduced_visible_form,
    observable_degrees,
    verify_embedding,
)
from .poly import frac_text
from .selftest import run_selftest
from .sim import ControlSignal, diagram_errors, write_csv

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULTS = {"seed": 0, "horizon": 2.0, "step": 1e-3, "tol": 1e-6, "max_degree": 4, "draws": 20}

# failures of the mathematical pipeline (as opposed to unusable input)
VERDICT_ERRORS = (NotVerified, NotSingleVisible, NotBalanced, BlockStructureViolation,
                  UnsupportedReduction, NotFound, UnsupportedControlField, DivergenceError)


class InputError(Exception):
    pass


def _grid(M):
    return M.to_strings()


def _vec(v):
    return [frac_text(x) for x in v]


def _one_based(indices):
    return [i + 1 for i in indices]


# -- pipeline pieces -------------------------------------------------------


def _load(args, need_embedding):
    if args.system is None:
        raise InputError("a system file is required")
    try:
        with open(args.system, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {args.system}: {exc.strerror}") from None
    system, emb = parse_system_file(args.system)
    source = "file"
    if args.discover or args.command == "discover":
        emb = discover_embedding(system, DiscoveryConfig(max_degree=args.max_degree))
        source = "discovered"
    if need_embedding and emb is None:
        raise InputError("the file has no embedding block; pass --discover to synthesize one")
    info = {"path": args.system, "sha256": digest, "n": system.n}
    if emb is not None:
        info["m"] = emb.m
        info["embedding_source"] = source
    return system, emb, info


def _verification(system, emb):
    report = verify_embedding(system, emb)
    verdicts = {
        "system_form_ok": report.system_form_ok,
        "necessary_ok": report.necessary_ok,
        "sufficient_ok": report.sufficient_ok,
    }
    residuals = [{"identity": r.identity, "row": r.row + 1, "residual": r.residual.to_text()}
                 for r in report.details]
    return verdicts, residuals


def _classification(emb):
    cls = classify_observables(emb)
    reduced, diagnostics = is_reduced_visible_form(emb)
    degrees = observable_degrees(emb)
    out = {
        "visible": _one_based(cls.visible),
        "hidden": _one_based(cls.hidden),
        "g_rank": cls.g_rank,
        "balanced": is_balanced(emb, cls),
        "reduced_visible_form": reduced,
        "reduced_form_diagnostics": list(diagnostics),
        "observable_degrees": [d if d != float("-inf") else None for d in degrees],
    }
    if cls.gbar is not None:
        out["gbar"] = _vec(cls.gbar)
    return out


def _canonical_payload(cf):
    n = cf.n
    return {
        "k": cf.k,
        "T_is_identity": cf.T == RatMatrix.identity(n),
        "T": _grid(cf.T),
        "T_inv": _grid(cf.T_inv),
        "A11": _grid(cf.A11),
        "A12": _grid(cf.A12),
        "A22": _grid(cf.A22),
        "B_prime": _vec(cf.B_prime),
        "Gbar_prime": _vec(cf.Gbar_prime),
        "D_prime": _vec(cf.Dp),
        "q_prime": cf.qp.to_text(),
        "transformed_system": cf.system().f.to_text(),
    }


def _draws(n, args):
    rng = np.random.default_rng(args.seed)
    x0 = rng.uniform(-2.0, 2.0, size=(args.draws, n))
    controls = [ControlSignal.random(rng, args.horizon) for _ in range(args.draws)]
    return x0, controls


def _finite(x):
    return float(x) if np.isfinite(x) else None


# -- commands ---------------------------------------------------------------


def cmd_verify(args, report):
    system, emb, report["input"] = _load(args, need_embedding=True)
    verdicts, residuals = _verification(system, emb)
    report["verdicts"] = verdicts
    report["residuals"] = residuals


def cmd_classify(args, report):
    system, emb, report["input"] = _load(args, need_embedding=True)
    verdicts, residuals = _verification(system, emb)
    report["verdicts"] = verdicts
    report["residuals"] = residuals
    report["classification"] = _classification(emb)


def cmd_canonicalize(args, report):
    system, emb, report["input"] = _load(args, need_embedding=True)
    verdicts, residuals = _verification(system, emb)
    report["verdicts"] = verdicts
    report["residuals"] = residuals
    report["classification"] = _classification(emb)
    cf = canonicalize(system, emb)
    prop = proposition1_check(system, cf.embedding)
    V = compute_invariant_subspace(cf.embedding)
    report["verdicts"]["krylov_constancy_ok"] = prop.ok
    report["verdicts"]["krylov_contained_ok"] = krylov_contained(cf.embedding, V)
    report["verdicts"]["canonical_form_ok"] = True
    report["canonical_form"] = _canonical_payload(cf)


def cmd_discover(args, report):
    system, emb, report["input"] = _load(args, need_embedding=True)
    verdicts, _ = _verification(system, emb)
    report["verdicts"] = {"found": True, **verdicts}
    report["embedding"] = system_document(system, emb)["embedding"]
    report["observables"] = emb.p.to_text()
    report["classification"] = _classification(emb)
    if args.output:
        write_system_file(args.output, system, emb)


def cmd_simulate(args, report):
    system, emb, report["input"] = _load(args, need_embedding=True)
    verdicts, _ = _verification(system, emb)
    report["verdicts"] = verdicts
    x0, controls = _draws(system.n, args)
    diag, gp, base, lifted = diagram_errors(system, emb, x0, controls, args.horizon, args.step)
    diag2, gp2, _, _ = diagram_errors(system, emb, x0, controls, args.horizon, args.step / 2)
    table = {
        "columns": ["draw", "diagram", "gp_identity", "diagram_half_step", "gp_identity_half_step"],
        "rows": [[i + 1, float(d), float(g), float(d2), float(g2)]
                 for i, (d, g, d2, g2) in enumerate(zip(diag, gp, diag2, gp2))],
    }
    summary = {"max_diagram": float(diag.max()), "max_gp_identity": float(gp.max()),
               "max_diagram_half_step": float(diag2.max()),
               "max_gp_identity_half_step": float(gp2.max())}
    with np.errstate(divide="ignore", invalid="ignore"):
        summary["diagram_ratio"] = _finite(diag.max() / diag2.max())
        summary["gp_identity_ratio"] = _finite(gp.max() / gp2.max())
    report["simulation"] = {"summary": summary, "draws": table}
    report["verdicts"]["diagram_within_tol"] = summary["max_diagram"] <= args.tol
    report["verdicts"]["gp_identity_within_tol"] = summary["max_gp_identity"] <= args.tol
    if args.csv:
        write_csv(args.csv, _first(base), _first(lifted))


def _first(traj):
    return type(traj)(traj.times, traj.states[:, 0, :])


def cmd_selftest(args, report):
    results = run_selftest(seed=args.seed, cases=args.cases)
    report["selftest"] = results
    report["verdicts"] = {f"{name}_ok": r["passed"] == r["total"] for name, r in results.items()}


COMMANDS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "canonicalize": cmd_canonicalize,
    "discover": cmd_discover,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


# -- rendering ---------------------------------------------------------------


def _scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6e}"
    return str(v)


def _is_flat(v):
    return isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v)


def render_text(report):
    """Plain-text rendering of a report; every JSON field appears."""
    lines = []

    def walk(value, indent, label):
        pad = "  " * indent
        if isinstance(value, dict):
            lines.append(f"{pad}{label}:")
            for k, v in value.items():
                walk(v, indent + 1, k)
        elif _is_flat(value):
            lines.append(f"{pad}{label}: [{', '.join(_scalar(x) for x in value)}]")
        elif isinstance(value, list) and all(_is_flat(r) for r in value):
            lines.append(f"{pad}{label}:")
            for r in value:
                lines.append(f"{pad}  [{', '.join(_scalar(x) for x in r)}]")
        elif isinstance(value, list):
            lines.append(f"{pad}{label}:")
            for i, item in enumerate(value, 1):
                walk(item, indent + 1, f"[{i}]")
        else:
            lines.append(f"{pad}{label}: {_scalar(value)}")

    for key, value in report.items():
        walk(value, 0, key)
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="superlin",
        description="Verify, classify, discover and canonicalize affine lifts of "
                    "polynomial control systems.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("system", nargs="?", help="system description (JSON)")
    parser.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    parser.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    parser.add_argument("--horizon", type=float, default=DEFAULTS["horizon"])
    parser.add_argument("--step", type=float, default=DEFAULTS["step"])
    parser.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    parser.add_argument("--max-degree", type=int, default=DEFAULTS["max_degree"])
    parser.add_argument("--draws", type=int, default=DEFAULTS["draws"],
                        help="number of random (x0, u) draws for simulate")
    parser.add_argument("--cases", type=int, default=50, help="cases per selftest family")
    parser.add_argument("--discover", action="store_true",
                        help="synthesize the embedding by closure search")
    parser.add_argument("--csv", metavar="PATH", help="simulate: export the first draw")
    parser.add_argument("--output", metavar="PATH", help="discover: write the system with its embedding")
    return parser


def _parameters(args):
    params = {"seed": args.seed, "max_degree": args.max_degree}
    if args.command == "simulate":
        params.update(horizon=args.horizon, step=args.step, tol=args.tol, draws=args.draws)
    if args.command == "selftest":
        params["cases"] = args.cases
    if args.discover:
        params["discover"] = True
    return params


def _check_args(args):
    if args.horizon <= 0 or args.step <= 0 or args.tol < 0:
        raise InputError("horizon and step must be positive and tol non-negative")
    if args.draws < 1 or args.cases < 1:
        raise InputError("draws and cases must be positive")
    if args.max_degree < 2:
        raise InputError("max-degree must be at least 2")


def run(argv=None, out=None):
    """Execute one command; returns ``(report, exit_code)``."""
    out = out if out is not None else _sys.stdout
    args = build_parser().parse_args(argv)
    report = {"command": args.command, "parameters": _parameters(args)}
    start = time.perf_counter()
    try:
        _check_args(args)
        COMMANDS[args.command](args, report)
        code = EXIT_OK if all(report.get("verdicts", {}).values()) else EXIT_FAIL
    except VERDICT_ERRORS as exc:
        report.setdefault("verdicts", {})["pipeline_ok"] = False
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NotFound):
            report["error"]["frontier"] = [p.to_text() for p in exc.frontier]
        code = EXIT_FAIL
    except (InputError, ParseError, SchemaError, StructuralError) as exc:
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        code = EXIT_INPUT
    report["status"] = {EXIT_OK: "pass", EXIT_FAIL: "fail", EXIT_INPUT: "input-error"}[code]
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    out.write(render_text(report))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(report, indent=2) + "\n")
    return report, code


def main(argv=None):
    _, code = run(argv)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
