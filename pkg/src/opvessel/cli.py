"""Batch front end: one JSON input document, one report.

Input documents have the top-level shape
``{"schema_version": 1, "vessel"?, "feedback"?, "problem"?, "curve"?}``.
Exit status is 0 when the command's check passes, 1 when it fails and 2 on
any error (schema, precondition or numerical).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from . import elliptic as ec
from .errors import ConfigError, VesselError
from .feedback import closed_loop, factorization_check, is_admissible
from .genus0 import feedback_dimension, place_poles_genus0
from .numeric import ToleranceProfile
from .records import (
    SCHEMA_VERSION,
    check_fields,
    cpair,
    cvalue,
    curve_point_to_json,
    jsonable,
    matrix_from_json,
    matrix_to_json,
    vector_from_json,
    vessel_from_record,
    vessel_to_record,
)
from .transfer import Divisor, restricted_transfer, rmf_zero_divisor, transfer_eval, vessel_spectrum
from .vessel import (
    CurvePoint,
    Direction,
    curve_fiber,
    discriminant_polys,
    fiber_residual,
    sample_curve_points,
    validate_vessel,
)

COMMANDS = ("validate", "curve", "spectrum", "transfer", "feedback-check", "feedback-apply",
            "factor-check", "place", "fbdim", "ec", "achievable")

SECTIONS = {"schema_version", "vessel", "feedback", "problem", "curve"}

# top-level sections each command requires; the others are ignored if present
_NEEDS = {
    "validate": {"vessel"},
    "curve": {"vessel"},
    "spectrum": {"vessel"},
    "transfer": {"vessel"},
    "feedback-check": {"vessel", "feedback"},
    "feedback-apply": {"vessel", "feedback"},
    "factor-check": {"vessel", "feedback"},
    "place": {"vessel", "problem"},
    "fbdim": {"problem"},
    "ec": {"curve", "problem"},
    "achievable": {"curve", "problem"},
}

EXIT = {"pass": 0, "fail": 1, "error": 2}


@dataclass
class RunConfig:
    command: str
    document: dict
    input_path: str | None = None
    output_path: str | None = None
    seed: int = 0
    tol: ToleranceProfile = field(default_factory=ToleranceProfile)
    fmt: str = "text"


@dataclass
class Report:
    command: str
    status: str
    payload: dict
    provenance: dict

    def to_json(self) -> dict:
        return {"command": self.command, "status": self.status,
                "payload": self.payload, "provenance": self.provenance}

    @classmethod
    def from_json(cls, doc: dict) -> "Report":
        return cls(doc["command"], doc["status"], doc["payload"], doc["provenance"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opvessel", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--in", dest="input_path", help="input JSON document (default: stdin)")
    parser.add_argument("--out", dest="output_path", help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol-residual", type=float, default=ToleranceProfile.residual_tol)
    parser.add_argument("--tol-rank", type=float, default=ToleranceProfile.rank_tol)
    parser.add_argument("--tol-cluster", type=float, default=ToleranceProfile.eig_cluster_tol)
    parser.add_argument("--format", dest="fmt", choices=("text", "structured"), default="text")
    return parser


def parse_config(argv, contents: str | None = None) -> RunConfig:
    """Parse command-line arguments and the input document.

    ``contents`` overrides reading ``--in`` (or stdin).

    Raises
    ------
    ConfigError
        With every schema problem listed in ``payload["errors"]``.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        raise ConfigError("bad command line", {"errors": ["see usage above"]}) from exc
    try:
        tol = ToleranceProfile(args.tol_residual, args.tol_rank, args.tol_cluster)
    except ValueError as exc:
        raise ConfigError(str(exc), {"errors": [str(exc)]}) from exc
    if contents is None:
        try:
            if args.input_path:
                with open(args.input_path, encoding="utf-8") as fh:
                    contents = fh.read()
            else:
                contents = sys.stdin.read()
        except OSError as exc:
            raise ConfigError(f"cannot read input: {exc}", {"errors": [str(exc)]}) from exc
    try:
        doc = json.loads(contents)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}", {"errors": [str(exc)]}) from exc
    errors: list[str] = []
    check_fields(doc, SECTIONS, _NEEDS[args.command] | {"schema_version"}, "document", errors)
    if isinstance(doc, dict) and doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        errors.append(f"document.schema_version: expected {SCHEMA_VERSION}")
    if errors:
        raise ConfigError(f"{len(errors)} schema error(s)", {"errors": errors})
    return RunConfig(args.command, doc, args.input_path, args.output_path, args.seed, tol, args.fmt)


# ---------------------------------------------------------------------------
# command handlers: each returns (status, payload)


def _problem(cfg: RunConfig, allowed: set[str], required: set[str] = frozenset()) -> dict:
    prob = cfg.document.get("problem", {})
    errors: list[str] = []
    check_fields(prob, allowed, set(required), "problem", errors)
    if errors:
        raise ConfigError(f"{len(errors)} schema error(s)", {"errors": errors})
    return prob


def _int_field(prob: dict, key: str, default: int, low: int = 0) -> int:
    val = prob.get(key, default)
    if not isinstance(val, int) or isinstance(val, bool) or val < low:
        raise ConfigError(f"problem.{key}: expected an integer >= {low}", {"errors": [f"problem.{key}"]})
    return val


def _vessel(cfg: RunConfig):
    return vessel_from_record(cfg.document["vessel"])


def _feedback(cfg: RunConfig, V):
    errors: list[str] = []
    F = matrix_from_json(cfg.document["feedback"], "feedback", errors)
    if F is not None and F.shape != (V.m, V.n):
        errors.append(f"feedback: shape {F.shape} != ({V.m}, {V.n})")
    if errors:
        raise ConfigError("bad feedback", {"errors": errors})
    return F


def _points(cfg: RunConfig, V, prob: dict) -> list[CurvePoint]:
    if "points" in prob:
        errors: list[str] = []
        pts = []
        for k, rec in enumerate(prob["points"]):
            v = vector_from_json(rec, f"problem.points[{k}]", errors)
            if v is not None and v.size != 2:
                errors.append(f"problem.points[{k}]: expected [lambda1, lambda2]")
            elif v is not None:
                pts.append(CurvePoint.affine(*v))
        if errors:
            raise ConfigError("bad points", {"errors": errors})
        return pts
    count = _int_field(prob, "count", 8, 1)
    return sample_curve_points(discriminant_polys(V, cfg.tol).p_in, count, cfg.seed, cfg.tol).affine


def cmd_validate(cfg):
    V = _vessel(cfg)
    rep = validate_vessel(V, cfg.tol)
    rows = [{"condition": k, "residual": rep.residuals[k], "scale": rep.scales[k],
             "relative": rep.relative(k)} for k in rep.residuals]
    payload = {"n": V.n, "m": V.m, "m_star": V.m_star, "residuals": rows,
               "structural_errors": rep.structural_errors,
               "D_invertible": rep.D_invertible, "D_tilde_invertible": rep.D_tilde_invertible}
    return ("pass" if rep.passed else "fail"), payload


def cmd_curve(cfg):
    V = _vessel(cfg)
    prob = _problem(cfg, {"count"})
    disc = discriminant_polys(V, cfg.tol)
    sample = sample_curve_points(disc.p_in, _int_field(prob, "count", 8, 1), cfg.seed, cfg.tol)
    payload = {
        "p_in": matrix_to_json(disc.p_in.coeffs),
        "p_out": matrix_to_json(disc.p_out.coeffs),
        "degree": disc.p_in.degree,
        "mu": None if disc.mu is None else cpair(disc.mu),
        "points": [curve_point_to_json(p) for p in sample.affine],
        "at_infinity": [curve_point_to_json(p) for p in sample.at_infinity],
    }
    return ("pass" if disc.mu is not None else "fail"), payload


def cmd_spectrum(cfg):
    V = _vessel(cfg)
    rep = vessel_spectrum(V, cfg.tol)
    rows = [{"lambda1": cpair(p.lambda1), "lambda2": cpair(p.lambda2), "mult": p.multiplicity,
             "on_curve": p.on_curve, "smooth": p.smooth} for p in rep.pairs]
    ok = all(p.on_curve and p.smooth for p in rep.pairs)
    return ("pass" if ok else "fail"), {"pairs": rows, "total_multiplicity": rep.total_multiplicity}


def cmd_transfer(cfg):
    V = _vessel(cfg)
    prob = _problem(cfg, {"points", "count"})
    rows = []
    worst = 0.0
    for p in _points(cfg, V, prob):
        fib = curve_fiber(V, p, "input", cfg.tol)
        for v in fib.basis.T:
            w = transfer_eval(V, p, v, cfg.tol)
            res = fiber_residual(V, p, w, "output")
            worst = max(worst, res)
            rows.append({"lambda1": cpair(p.lambda1), "lambda2": cpair(p.lambda2),
                         "input": [cpair(z) for z in v], "output": [cpair(z) for z in w],
                         "fiber_residual": res})
    return ("pass" if worst <= cfg.tol.residual_tol else "fail"), {"evaluations": rows,
                                                                   "max_fiber_residual": worst}


def cmd_feedback_check(cfg):
    V = _vessel(cfg)
    ok, res = is_admissible(V, _feedback(cfg, V), cfg.tol)
    rows = [{"equation": k, "residual": r, "scale": c} for k, (r, c) in res.items()]
    return ("pass" if ok else "fail"), {"admissible": ok, "residuals": rows}


def cmd_feedback_apply(cfg):
    V = _vessel(cfg)
    F = _feedback(cfg, V)
    ok, res = is_admissible(V, F, cfg.tol)
    rows = [{"equation": k, "residual": r, "scale": c} for k, (r, c) in res.items()]
    if not ok:
        return "fail", {"admissible": False, "residuals": rows}
    V_cl = closed_loop(V, F, cfg.tol)
    rep = validate_vessel(V_cl, cfg.tol)
    return ("pass" if rep.passed else "fail"), {
        "admissible": True, "residuals": rows, "closed_loop_valid": rep.passed,
        "closed_loop": vessel_to_record(V_cl)}


def cmd_factor_check(cfg):
    V = _vessel(cfg)
    F = _feedback(cfg, V)
    prob = _problem(cfg, {"points", "count"})
    rep = factorization_check(V, F, _points(cfg, V, prob), cfg.tol)
    return ("pass" if rep.passed else "fail"), {
        "max_residual": rep.max_residual,
        "evaluated": [curve_point_to_json(p) for p in rep.evaluated],
        "residuals": rep.residuals,
        "skipped": [{"point": curve_point_to_json(p), "reason": why} for p, why in rep.skipped],
    }


def _divisor_json(D: Divisor) -> list:
    return [{"point": cpair(e.point), "mult": e.multiplicity} for e in D.entries]


def cmd_place(cfg):
    V = _vessel(cfg)
    prob = _problem(cfg, {"desired", "xi"}, {"desired"})
    errors: list[str] = []
    desired = vector_from_json(prob["desired"], "problem.desired", errors)
    xi = None
    if "xi" in prob:
        xv = vector_from_json(prob["xi"], "problem.xi", errors)
        if xv is not None and xv.size != 2:
            errors.append("problem.xi: expected [xi1, xi2]")
        elif xv is not None:
            xi = Direction(*xv)
    if errors:
        raise ConfigError("bad placement problem", {"errors": errors})
    F, rep = place_poles_genus0(V, desired, cfg.tol, xi=xi)
    S = restricted_transfer(V, rep.xi, cfg.tol)
    payload = {
        "F": matrix_to_json(F),
        "xi": [cpair(rep.xi.xi1), cpair(rep.xi.xi2)],
        "route": rep.route,
        "desired": [cpair(z) for z in rep.desired],
        "achieved": [cpair(z) for z in np.sort_complex(rep.achieved)],
        "spectrum_error": rep.spectrum_error,
        "admissible": rep.admissible,
        "conditions_hold": rep.conditions_hold,
        "open_loop_poles": _divisor_json(rep.open_loop_poles),
        "open_loop_zeros": _divisor_json(rmf_zero_divisor(S, cfg.tol)),
    }
    if rep.f is not None:
        payload["certificate"] = rep.f.certificate
    ok = rep.admissible and rep.conditions_hold
    return ("pass" if ok else "fail"), payload


def cmd_fbdim(cfg):
    prob = _problem(cfg, {"genus", "n", "m", "ell_correction"}, {"genus", "n", "m"})
    fb = feedback_dimension(_int_field(prob, "genus", 0), _int_field(prob, "n", 0),
                            _int_field(prob, "m", 0), _int_field(prob, "ell_correction", 0))
    return "pass", {"value": fb.value, "exact": fb.exact}


def _curve(cfg) -> ec.EllipticCurve:
    rec = cfg.document["curve"]
    errors: list[str] = []
    check_fields(rec, {"a", "b"}, {"a", "b"}, "curve", errors)
    if errors:
        raise ConfigError("bad curve", {"errors": errors})
    return ec.EllipticCurve(cvalue(rec["a"], "curve.a"), cvalue(rec["b"], "curve.b"))


def _ec_divisor(prob: dict, key: str) -> ec.ECDivisor:
    try:
        return ec.divisor_from_record(prob[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"problem.{key}: bad divisor record", {"errors": [f"problem.{key}: {exc}"]}) from exc


def cmd_ec(cfg):
    E = _curve(cfg)
    prob = _problem(cfg, {"divisor", "Z", "D_inf", "partial"}, {"divisor"})
    D = _ec_divisor(prob, "divisor")
    principal = ec.is_principal(E, D)
    payload = {"degree": D.degree, "phi": ec.point_to_record(ec.phi_of_divisor(E, D)),
               "principal": principal}
    if principal:
        f = ec.miller_build(E, D)
        payload["miller"] = [{"line": [cpair(c) for c in line], "exponent": e} for line, e in f.factors]
    if "Z" in prob:
        Z, Dinf = _ec_divisor(prob, "Z"), _ec_divisor(prob, "D_inf")
        partial = [ec.point_from_record(p) for p in prob.get("partial", [])]
        payload["forbidden_point"] = ec.point_to_record(ec.forbidden_point(E, Z, Dinf, partial))
    return "pass", payload


def cmd_achievable(cfg):
    E = _curve(cfg)
    prob = _problem(cfg, {"Z", "P", "D_inf"}, {"Z", "P", "D_inf"})
    res = ec.genus1_achievability(E, _ec_divisor(prob, "Z"), _ec_divisor(prob, "P"),
                                  _ec_divisor(prob, "D_inf"))
    payload = {"achievable": res.achievable, "reason": res.reason,
               "values_on_D_inf": [cpair(v) for v in res.values]}
    if res.f is not None:
        payload["constant"] = cpair(res.f.constant)
        payload["miller"] = [{"line": [cpair(c) for c in line], "exponent": e} for line, e in res.f.factors]
    return ("pass" if res.achievable else "fail"), payload


HANDLERS = {
    "validate": cmd_validate, "curve": cmd_curve, "spectrum": cmd_spectrum,
    "transfer": cmd_transfer, "feedback-check": cmd_feedback_check,
    "feedback-apply": cmd_feedback_apply, "factor-check": cmd_factor_check,
    "place": cmd_place, "fbdim": cmd_fbdim, "ec": cmd_ec, "achievable": cmd_achievable,
}


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _provenance(cfg: RunConfig | None) -> dict:
    tol = cfg.tol if cfg else ToleranceProfile()
    return {"seed": cfg.seed if cfg else None, "version": _version(),
            "tolerances": {"residual": tol.residual_tol, "rank": tol.rank_tol,
                           "cluster": tol.eig_cluster_tol}}


def _error_payload(exc: Exception) -> dict:
    code = getattr(exc, "code", "opvessel.error")
    details = jsonable(getattr(exc, "payload", {}))
    return {"code": code, "message": str(exc), "details": details}


def dispatch(cfg: RunConfig) -> Report:
    """Run exactly one command; module errors become an ``error`` report."""
    try:
        status, payload = HANDLERS[cfg.command](cfg)
    except (VesselError, ValueError, np.linalg.LinAlgError) as exc:
        status, payload = "error", _error_payload(exc)
    return Report(cfg.command, status, jsonable(payload), _provenance(cfg))


# ---------------------------------------------------------------------------
# output


def _fmt_scalar(v) -> str:
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v):
        re, im = v
        return f"{re + 0.0:.6g}{im + 0.0:+.6g}j"  # + 0.0 drops signed zeros
    if isinstance(v, float):
        return f"{v + 0.0:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt_scalar(x)}" for k, x in v.items()) + "}"
    return str(v)


def _table(rows: list[dict]) -> list[str]:
    cols = list(rows[0])
    cells = [[_fmt_scalar(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  " + "  ".join("-" * w for w in widths))
    lines += ["  " + "  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells]
    return lines


def emit_report(report: Report, fmt: str = "text") -> str:
    """Render a report; ``structured`` is canonical JSON (sorted keys)."""
    if fmt == "structured":
        return json.dumps(report.to_json(), sort_keys=True, indent=2, allow_nan=False) + "\n"
    lines = [f"command: {report.command}", f"status:  {report.status}"]
    for key, val in report.payload.items():
        if isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
            lines.append(f"{key}:")
            lines += _table(val)
        elif isinstance(val, dict) and key == "closed_loop":
            lines.append(f"{key}: vessel with n = {val.get('n')}")
        else:
            lines.append(f"{key}: {_fmt_scalar(val)}")
    tol = report.provenance["tolerances"]
    lines.append(f"seed {report.provenance['seed']}, tolerances residual={tol['residual']:g} "
                 f"rank={tol['rank']:g} cluster={tol['cluster']:g}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        report = Report(argv[0] if argv else "", "error", _error_payload(exc), _provenance(None))
        fmt = "structured" if "structured" in argv else "text"
        sys.stdout.write(emit_report(report, fmt))
        return EXIT["error"]
    report = dispatch(cfg)
    text = emit_report(report, cfg.fmt)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT[report.status]


if __name__ == "__main__":
    sys.exit(main())
