"""
designlab command line.

    designlab constants --field H --dim 3 --t 5 --n 315
    designlab verify mub_h2.json --t 3 --expect-design
    designlab search --field H --dim 2 --n 6 --t 2 --restarts 20 --seed 1

JSON goes to stdout, logs to stderr. Exit codes: 0 success, 1 invalid input,
2 failed verification under --expect-design.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass
import json
import logging
from pathlib import Path
import sys
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from designlab import __version__
from designlab.algebra.hilbert import Configuration, FieldTag, Vector, abs_ip_sq
from designlab.analytics import designs, moments, polyspace, projective, search
from designlab.exceptions import ConfigurationError, DesignLabError
from designlab.logging_config import setup_logging
from designlab.models.requests import (
    CatalogRequest,
    CommandSpec,
    ConstantsRequest,
    DimRequest,
    HoggarRequest,
    KernelTestRequest,
    OutputFormat,
    SearchRequest,
    VerifyRequest,
)
from designlab.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_DESIGN = 2

KERNEL_TEST_TOL = 1e-9


class UsageError(Exception):
    """Raised instead of argparse's own exit on bad flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


@dataclass
class CommandOutput:
    """What a subcommand produced."""
    payload: Dict[str, Any]
    table: pd.DataFrame
    ok: Optional[bool] = None


def _jsonify(x: Any) -> Any:
    """Make results JSON-serializable (numpy safe)."""
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, FieldTag):
        return x.value
    if isinstance(x, dict):
        return {k: _jsonify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    return x


def _summary_table(payload: Dict[str, Any]) -> pd.DataFrame:
    rows = [(key, value) for key, value in payload.items() if not isinstance(value, (dict, list))]
    return pd.DataFrame(rows, columns=["quantity", "value"])


def _write_json(doc: Dict[str, Any], path: str) -> None:
    Path(path).write_text(json.dumps(_jsonify(doc), indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_constants(req: ConstantsRequest) -> CommandOutput:
    exact = moments.c_t_exact(req.field, req.dim, req.t)
    payload: Dict[str, Any] = {
        "field": req.field.value,
        "m": req.field.m,
        "dim": req.dim,
        "t": req.t,
        "c_t": float(exact),
        "c_t_exact": str(exact),
        "b_tm": moments.b_const(req.t, req.field.m) if req.t >= 1 else None,
        "dim_homtt": moments.dim_homtt(req.field, req.dim, req.t),
    }
    if req.n is not None:
        bound = exact * req.n * req.n
        payload.update({"n": req.n, "bound": float(bound), "bound_exact": str(bound)})
    return CommandOutput(payload, _summary_table(payload))


def cmd_dim(req: DimRequest) -> CommandOutput:
    result = polyspace.homtt_dim_by_rank(req.field, req.dim, req.t, samples=req.samples, seed=req.seed)
    payload = {
        "field": req.field.value,
        "dim": req.dim,
        "t": req.t,
        "formula": result.expected,
        "rank": result.rank,
        "samples": result.samples,
        "insufficient_samples": result.insufficient_samples,
        "matches": result.matches,
    }
    return CommandOutput(payload, _summary_table(payload), ok=result.matches)


def _read_configuration(path: str) -> Configuration:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigurationError(f"{path} is not UTF-8 text: {exc}")
    return Configuration.from_json(text)


def cmd_verify(req: VerifyRequest) -> CommandOutput:
    cfg = _read_configuration(req.config_path)
    report = designs.verify(cfg, req.t, tol=req.tol)
    payload = report.to_dict()
    table = pd.DataFrame(
        [(c.r, c.potential, c.bound, c.relative_gap) for c in report.per_r],
        columns=["r", "potential", "bound", "relative_gap"],
    )
    summary = _summary_table(payload)
    return CommandOutput(payload, pd.concat([summary, table], axis=1), ok=report.is_design)


def cmd_search(req: SearchRequest) -> CommandOutput:
    result = search.minimize(req)
    if req.out:
        _write_json(result.best.to_dict(), req.out)
    if req.emit_trajectory:
        search.write_trajectory_csv(result, req.emit_trajectory)
    payload = result.to_dict()
    payload["rational_angles"] = [
        {"angle": value, "multiplicity": count, "rational": None if frac is None else f"{frac[0]}/{frac[1]}"}
        for value, count, frac in search.rationalize_spectrum(result.report.spectrum)
    ]
    table = pd.DataFrame(payload["rational_angles"])
    summary = _summary_table(
        {k: v for k, v in payload["report"].items() if k in ("potential", "bound", "relative_gap", "is_design")}
    )
    return CommandOutput(payload, pd.concat([summary, table], axis=1), ok=result.report.is_design)


def cmd_catalog(req: CatalogRequest) -> CommandOutput:
    cfg = designs.catalog(req.name, req.field, req.dim)
    payload = cfg.to_dict()
    table = pd.DataFrame(
        [(j, json.dumps(cfg.vectors[j].tolist())) for j in range(cfg.n)], columns=["index", "vector"]
    )
    return CommandOutput(payload, table)


def cmd_hoggar(req: HoggarRequest) -> CommandOutput:
    scheme = projective.RegularScheme(n=req.n, angles=tuple(req.angles), counts=tuple(req.counts))
    rows = []
    for r in range(1, req.t + 1):
        lhs, rhs = projective.regular_scheme_check(scheme, req.field, req.dim, r)
        rows.append({"r": r, "lhs": lhs, "rhs": rhs, "passes": abs(lhs - rhs) <= req.tol * max(1.0, abs(rhs))})
    ok = all(row["passes"] for row in rows)
    payload = {"n": req.n, "field": req.field.value, "dim": req.dim, "t": req.t, "checks": rows, "is_design": ok}
    return CommandOutput(payload, pd.DataFrame(rows), ok=ok)


def cmd_kernel_test(req: KernelTestRequest) -> CommandOutput:
    """
    Random checks of <K_v, K_w> = |<v,w>|^{2t} and of reproduce() on kernel
    combinations. Errors are relative to ||v||^{2t} ||w||^{2t}.
    """
    polyspace.check_envelope(req.field.m * req.dim, 2 * req.t)
    rng = np.random.default_rng(req.seed)
    kernel_error = 0.0
    reproduce_error = 0.0
    for _ in range(req.trials):
        vs = polyspace.random_unit_vectors(req.field, req.dim, req.terms + 1, rng)
        vs = vs * rng.uniform(0.5, 1.5, size=req.terms + 1)[:, None, None]
        v, w = Vector(vs[0]), Vector(vs[1])
        scale = (v.norm_sq() * w.norm_sq()) ** req.t
        lhs = polyspace.apolar(polyspace.kernel(v, req.field, req.t), polyspace.kernel(w, req.field, req.t),
                               req.t, req.field.m)
        kernel_error = max(kernel_error, abs(lhs - abs_ip_sq(v, w) ** req.t) / scale)

        coeffs = rng.standard_normal(req.terms)
        f = polyspace.Poly.zero(req.field.m * req.dim)
        for coef, u in zip(coeffs, vs[1:]):
            f = f + polyspace.kernel(Vector(u), req.field, req.t).scale(float(coef))
        left, right = polyspace.reproduce(f, v, req.t, req.field)
        norm = v.norm_sq() ** req.t * float(np.sum(np.abs(coeffs) * np.sum(vs[1:] ** 2, axis=(1, 2)) ** req.t))
        reproduce_error = max(reproduce_error, abs(left - right) / norm)
    ok = kernel_error <= KERNEL_TEST_TOL and reproduce_error <= KERNEL_TEST_TOL
    payload = {
        "field": req.field.value,
        "dim": req.dim,
        "t": req.t,
        "trials": req.trials,
        "max_kernel_error": kernel_error,
        "max_reproduce_error": reproduce_error,
        "passed": ok,
    }
    return CommandOutput(payload, _summary_table(payload), ok=ok)


HANDLERS: Dict[str, Callable[[Any], CommandOutput]] = {
    "constants": cmd_constants,
    "dim": cmd_dim,
    "verify": cmd_verify,
    "search": cmd_search,
    "catalog": cmd_catalog,
    "hoggar": cmd_hoggar,
    "kernel-test": cmd_kernel_test,
}


# =============================================================================
# PARSING
# =============================================================================

def _field_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--field", required=True, type=str.upper, choices=[f.value for f in FieldTag])


def build_parser() -> argparse.ArgumentParser:
    # shared flags may appear before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=[f.value for f in OutputFormat], default=argparse.SUPPRESS)
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    common.add_argument("--expect-design", action="store_true", default=argparse.SUPPRESS,
                        help="Exit with status 2 when the verdict is negative")

    parser = _Parser(prog="designlab", description="Spherical (t,t)-designs in R^d, C^d and H^d",
                     parents=[common])
    parser.add_argument("--version", action="version", version=f"designlab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="c_t, b_{t,m}, dim Hom(t,t) and c_t n^2")
    _field_arg(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int)

    p = sub.add_parser("dim", parents=[common], help="dim Hom(t,t) by formula and by Gram rank")
    _field_arg(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", parents=[common], help="Verify a configuration JSON file")
    p.add_argument("config_path")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("search", parents=[common], help="Minimise the frame potential")
    _field_arg(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--grad-tol", type=float, default=1e-11)
    p.add_argument("--target-gap", type=float, default=1e-12)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="Write the best configuration JSON here")
    p.add_argument("--emit-trajectory", help="Write the (iteration, potential) CSV here")

    p = sub.add_parser("catalog", parents=[common], help="Emit a closed-form configuration")
    p.add_argument("name", choices=sorted(designs.CATALOG))
    _field_arg(p)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--out", help="Write the configuration JSON here instead of stdout")

    p = sub.add_parser("hoggar", parents=[common], help="Regular-scheme design condition for r = 1..t")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    _field_arg(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--angles", required=True, help="Comma separated; g+ and g- stand for (3 +- sqrt 5)/8")
    p.add_argument("--counts", required=True, help="Comma separated counts, summing to n - 1")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("kernel-test", parents=[common], help="Random reproducing-kernel checks")
    _field_arg(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--terms", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)

    return parser


REQUEST_MODELS = {
    "constants": ConstantsRequest,
    "dim": DimRequest,
    "verify": VerifyRequest,
    "search": SearchRequest,
    "catalog": CatalogRequest,
    "hoggar": HoggarRequest,
    "kernel-test": KernelTestRequest,
}

GLOBAL_FLAGS = ("subcommand", "output", "log_level", "expect_design")


def parse_command(argv: Sequence[str]) -> CommandSpec:
    """Parse and validate argv; raises UsageError or pydantic.ValidationError."""
    args = vars(build_parser().parse_args(list(argv)))
    subcommand = args["subcommand"]
    fields = {k: v for k, v in args.items() if k not in GLOBAL_FLAGS and v is not None}
    request = REQUEST_MODELS[subcommand].model_validate(fields)
    return CommandSpec(
        subcommand=subcommand,
        output_format=args.get("output", OutputFormat.JSON.value),
        expect_design=args.get("expect_design", False),
        request=request,
    )


def _emit(spec: CommandSpec, output: CommandOutput) -> None:
    if spec.output_format is OutputFormat.TABLE:
        text = output.table.to_string(index=False)
    elif spec.subcommand == "catalog" and getattr(spec.request, "out", None):
        _write_json(output.payload, spec.request.out)
        return
    else:
        text = json.dumps(_jsonify(output.payload), indent=2, sort_keys=True)
    sys.stdout.write(text + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI invocation and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    settings = get_settings()
    level = settings.log_level
    if "--log-level" in argv:
        index = argv.index("--log-level")
        if index + 1 < len(argv):
            level = argv[index + 1]
    try:
        setup_logging(level=level, log_file=settings.log_file)
    except (AttributeError, ValueError):
        setup_logging(level=settings.log_level, log_file=settings.log_file)

    try:
        spec = parse_command(argv)
        logger.info(f"Running {spec.subcommand}")
        output = HANDLERS[spec.subcommand](spec.request)
    except UsageError as exc:
        sys.stderr.write(f"designlab: usage error: {exc}\n")
        return EXIT_INVALID
    except ValidationError as exc:
        sys.stderr.write(f"designlab: invalid arguments: {exc.errors()[0]['msg']}\n")
        return EXIT_INVALID
    except DesignLabError as exc:
        sys.stderr.write(f"designlab: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(f"designlab: I/O error: {exc}\n")
        return EXIT_INVALID

    _emit(spec, output)
    if spec.expect_design and output.ok is False:
        logger.warning(f"{spec.subcommand}: expected a design, verdict is negative")
        return EXIT_NOT_DESIGN
    return EXIT_OK


def main() -> None:
    sys.exit(run())
