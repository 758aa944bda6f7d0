"""Command-line front end.

Exit codes: 0 success, 1 I/O, parse or usage error, 2 validation or
precondition failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, List, Optional

import numpy as np

from . import __version__
from .channels import (
    UnitaryMixture,
    channel_from_procedure,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    procedure_from_mixture,
    trace_preservation_error,
)
from .errors import ValidationError
from .linalg import STRUCT_TOL, verify_unitary
from .paper_examples import (
    DilationSpec,
    PaperInteractionParams,
    build_repeatable_dilation,
    check_dilation,
    default_grid,
    paper_procedure,
    run_paper_suite,
)
from .procedures import REPEAT_TOL, Procedure, is_repeatable, is_repeatable_to_depth, iterate_environment, map_distance
from .states import as_bloch, bloch_to_density, purity, random_bloch, random_density, validate_density

LOAD_TOL = 1e-8
FORMS = ("paper", "dense", "mixture")
DILATION_PRECONDITION = "requires ⟨Ξ₁⟩=0 and |⟨Ξ₂⟩|+|⟨Ξ₃⟩|=1"


class SpecError(Exception):
    """Unreadable or malformed input (exit code 1)."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- decoding ---------------------------------------------------------------

def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(obj: Any, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise SpecError(f"field '{where}': expected an object")
    if key not in obj:
        raise SpecError(f"field '{where}.{key}' missing")
    return obj[key]


def _real(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"field '{where}': expected a number, got {v!r}")
    return float(v)


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"field '{where}': expected an integer, got {v!r}")
    return v


def _reals(v: Any, n: int, where: str) -> List[float]:
    if not isinstance(v, list) or len(v) != n:
        raise SpecError(f"field '{where}': expected a list of {n} numbers")
    return [_real(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _complex_matrix(v: Any, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(row, list) for row in v):
        raise SpecError(f"field '{where}': expected a nested list of [re, im] pairs")
    width = len(v[0])
    out = np.zeros((len(v), width), dtype=complex)
    for i, row in enumerate(v):
        if len(row) != width:
            raise SpecError(f"field '{where}[{i}]': ragged row")
        for j, z in enumerate(row):
            re, im = _reals(z, 2, f"{where}[{i}][{j}]")
            out[i, j] = complex(re, im)
    return out


def encode_complex_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def encode_real(v) -> Any:
    return np.asarray(v, dtype=float).tolist()


def load_spec(path: str):
    """Return ``(form, echo, procedure)`` for a spec file.

    Malformed content raises :class:`SpecError`, invariant violations raise
    :class:`ValidationError`.
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise SpecError(f"{path}: top level must be an object with one of {FORMS}")
    present = [k for k in FORMS if k in data]
    if len(present) != 1:
        raise SpecError(f"{path}: exactly one of {FORMS} must be present, found {present or 'none'}")
    form = present[0]
    body = data[form]
    return form, data, build_procedure(form, body)


def build_procedure(form: str, body: Any) -> Procedure:
    if form == "paper":
        g2 = _real(_field(body, "gamma2", "paper"), "paper.gamma2")
        g3 = _real(_field(body, "gamma3", "paper"), "paper.gamma3")
        xi = _reals(_field(body, "xi", "paper"), 3, "paper.xi")
        return paper_procedure(PaperInteractionParams(g2, g3), xi)
    if form == "dense":
        ds = _int(_field(body, "dim_s", "dense"), "dense.dim_s")
        dr = _int(_field(body, "dim_r", "dense"), "dense.dim_r")
        u = _complex_matrix(_field(body, "unitary", "dense"), "dense.unitary")
        xi = _complex_matrix(_field(body, "xi", "dense"), "dense.xi")
        if ds < 1 or dr < 1:
            raise SpecError("field 'dense.dim_s'/'dense.dim_r': dimensions must be positive")
        if u.shape != (ds * dr, ds * dr):
            raise ValidationError(f"dense.unitary has shape {u.shape}, expected {(ds * dr, ds * dr)}")
        if not verify_unitary(u, LOAD_TOL):
            raise ValidationError("unitarity violated (dense.unitary)")
        validate_density(xi, LOAD_TOL, LOAD_TOL)
        return Procedure(ds, dr, u, xi, tol=LOAD_TOL)
    weights = _field(body, "weights", "mixture")
    unitaries = _field(body, "unitaries", "mixture")
    if not isinstance(weights, list) or not isinstance(unitaries, list):
        raise SpecError("field 'mixture': weights and unitaries must be lists")
    w = np.array(_reals(weights, len(weights), "mixture.weights"))
    us = [_complex_matrix(u, f"mixture.unitaries[{k}]") for k, u in enumerate(unitaries)]
    if len(w) != len(us) or not len(w):
        raise ValidationError("mixture needs one weight per unitary")
    if abs(w.sum() - 1) > LOAD_TOL:
        raise ValidationError(f"mixture weights sum to {w.sum()!r}, not 1")
    for k, u in enumerate(us):
        if u.shape != (2, 2) or not verify_unitary(u, LOAD_TOL):
            raise ValidationError(f"unitarity violated (mixture.unitaries[{k}])")
    return procedure_from_mixture(UnitaryMixture(w / w.sum(), tuple(us), tol=LOAD_TOL))


def dense_spec(p: Procedure) -> dict:
    return {"dense": {"dim_s": p.dim_s, "dim_r": p.dim_r,
                      "unitary": encode_complex_matrix(p.u), "xi": encode_complex_matrix(p.xi)}}


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise SpecError(f"cannot write {path}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# -- analysis ---------------------------------------------------------------

def analyze(p: Procedure, tol: float, struct_tol: float, depth: int, seed: int) -> dict:
    rep = is_repeatable(p, tol)
    deep = is_repeatable_to_depth(p, depth, tol, seed)
    channel = None
    flags = {"cp": None, "tp": None, "unital": None,
             "repeatable": rep.repeatable, "repeatable_depth_n": deep.repeatable}
    violations = {"cp": None, "tp": None, "unital": None,
                  "repeatable": rep.max_violation, "repeatable_depth_n": deep.max_violation,
                  "depth_reached": deep.depth}
    if p.dim_s == 2:
        ch = channel_from_procedure(p)
        evals = ch.choi_eigenvalues()
        channel = {"M": encode_real(ch.bloch_matrix), "t": encode_real(ch.translation),
                   "choi_eigenvalues": encode_real(evals)}
        flags.update(cp=is_completely_positive(ch, tol), tp=is_trace_preserving(ch, struct_tol),
                     unital=is_unital(ch, struct_tol))
        violations.update(cp=float(max(0.0, -evals[0])), tp=trace_preservation_error(ch),
                          unital=float(np.linalg.norm(ch.translation)))
    return {"channel": channel, "flags": flags, "violations": violations}


def _fmt(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:.3e}"


def _analysis_table(report: dict) -> str:
    lines = []
    ch = report["channel"]
    if ch is not None:
        lines.append("Bloch matrix M | translation t")
        for row, t in zip(ch["M"], ch["t"]):
            lines.append("  " + " ".join(f"{v:+.6f}" for v in row) + f" | {t:+.6f}")
        lines.append("Choi eigenvalues: " + " ".join(f"{v:+.6f}" for v in ch["choi_eigenvalues"]))
    lines.append(f"{'check':<20}{'flag':<8}violation")
    for key, flag in report["flags"].items():
        shown = "-" if flag is None else str(flag).lower()
        lines.append(f"{key:<20}{shown:<8}{_fmt(report['violations'][key])}")
    lines.append(f"depth reached: {report['violations']['depth_reached']}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    form, echo, p = load_spec(args.spec)
    report = analyze(p, args.tol, args.struct_tol, args.depth, args.seed)
    report["provenance"] = {"input": echo, "form": form, "tool": "repeatable", "version": __version__,
                            "seed": args.seed, "tol": args.tol, "struct_tol": args.struct_tol,
                            "depth": args.depth}
    sys.stdout.write(_analysis_table(report))
    if args.json:
        _write_text(args.json, _dump(report))
    return 0


def cmd_dilate(args) -> int:
    data = _read_json(args.spec)
    if not isinstance(data, dict) or "paper" not in data or any(k in data for k in ("dense", "mixture")):
        raise ValidationError("dilate needs a paper-form spec")
    body = data["paper"]
    g2 = _real(_field(body, "gamma2", "paper"), "paper.gamma2")
    g3 = _real(_field(body, "gamma3", "paper"), "paper.gamma3")
    xi = _reals(_field(body, "xi", "paper"), 3, "paper.xi")
    try:
        spec = DilationSpec(PaperInteractionParams(g2, g3), tuple(xi))
    except ValidationError:
        raise ValidationError(DILATION_PRECONDITION) from None
    d = build_repeatable_dilation(spec)
    check = check_dilation(d, args.depth, args.tol, args.seed)
    _write_text(args.out, _dump(dense_spec(d.procedure)))
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    stream.write(f"channel distance to two-qubit procedure: {check.channel_distance:.3e}\n")
    stream.write(f"environment drift: {check.environment_drift:.3e}\n")
    stream.write(f"repeatable: {str(check.repeatable).lower()} (depth {check.depth}, "
                 f"violation {check.repeat_violation:.3e})\n")
    return 0


def _rho_sequence(args, p: Procedure) -> List[np.ndarray]:
    if args.rho_seq:
        data = _read_json(args.rho_seq)
        if not isinstance(data, list):
            raise SpecError(f"{args.rho_seq}: expected a list of states")
        seq = []
        for k, item in enumerate(data):
            if isinstance(item, list) and len(item) == 3 and all(isinstance(c, (int, float)) for c in item):
                seq.append(bloch_to_density(_reals(item, 3, f"rho_seq[{k}]")))
            else:
                seq.append(validate_density(_complex_matrix(item, f"rho_seq[{k}]"), LOAD_TOL, LOAD_TOL))
        if len(seq) < args.steps:
            raise SpecError(f"{args.rho_seq}: {len(seq)} states given, --steps needs {args.steps}")
        for rho in seq:
            if rho.shape != (p.dim_s, p.dim_s):
                raise ValidationError(f"sequence state has shape {rho.shape}, system dimension is {p.dim_s}")
        return seq[: args.steps]
    rng = np.random.default_rng(args.seed)
    if p.dim_s == 2:
        return [bloch_to_density(random_bloch(rng, pure=True)) for _ in range(args.steps)]
    return [random_density(p.dim_s, rng) for _ in range(args.steps)]


def cmd_repeat(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    _, _, p = load_spec(args.spec)
    seq = _rho_sequence(args, p)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "drift", "environment_purity"])
    for step, q in enumerate(iterate_environment(p, seq), start=1):
        writer.writerow([step, f"{map_distance(p, q):.17g}", f"{purity(q.xi):.17g}"])
    _write_text(args.csv, buf.getvalue())
    return 0


def _grid_from_file(path: str):
    data = _read_json(path)
    if not isinstance(data, list):
        raise SpecError(f"{path}: grid must be a list of {{gamma2, gamma3, xi}} objects")
    grid = []
    for k, row in enumerate(data):
        where = f"grid[{k}]"
        g2 = _real(_field(row, "gamma2", where), f"{where}.gamma2")
        g3 = _real(_field(row, "gamma3", where), f"{where}.gamma3")
        xi = _reals(_field(row, "xi", where), 3, f"{where}.xi")
        as_bloch(xi)
        grid.append(((g2, g3), tuple(xi)))
    return grid


def suite_row_json(row) -> dict:
    dil = None
    if row.dilation is not None:
        d = row.dilation
        dil = {"channel_distance": d.channel_distance, "repeatable": d.repeatable,
               "repeat_violation": d.repeat_violation, "depth": d.depth,
               "environment_drift": d.environment_drift, "ok": d.ok}
    return {
        "gamma2": row.gamma2, "gamma3": row.gamma3, "xi": list(row.xi),
        "repeatable": row.repeatable, "repeat_violation": row.repeat_violation,
        "unital": row.unital, "cp": row.cp, "decomposable": row.decomposable,
        "M": encode_real(row.bloch_matrix), "t": encode_real(row.translation),
        "dilation": dil, "expectations": row.expectations, "claims_hold": row.claims_hold,
    }


def _suite_table(rows) -> str:
    head = f"{'gamma2':>8} {'gamma3':>8}  {'xi':<22}{'repeat':<8}{'viol':<11}{'unital':<8}{'dilation':<10}claims"
    lines = [head]
    for r in rows:
        xi = "(" + ",".join(f"{c:+.2f}" for c in r.xi) + ")"
        dil = "-" if r.dilation is None else ("ok" if r.dilation.ok else "FAIL")
        lines.append(f"{r.gamma2:8.4f} {r.gamma3:8.4f}  {xi:<22}{str(r.repeatable).lower():<8}"
                     f"{r.repeat_violation:<11.3e}{str(r.unital).lower():<8}{dil:<10}"
                     f"{'hold' if r.claims_hold else 'MISMATCH'}")
    return "\n".join(lines) + "\n"


def cmd_paper(args) -> int:
    grid = default_grid() if args.grid == "default" else _grid_from_file(args.grid)
    rows = run_paper_suite(grid, args.tol, args.depth, args.seed)
    sys.stdout.write(_suite_table(rows))
    ok = all(r.claims_hold for r in rows)
    if args.json:
        out = {"tool": "repeatable", "version": __version__, "grid": args.grid, "seed": args.seed,
               "tol": args.tol, "depth": args.depth, "all_claims_hold": ok,
               "rows": [suite_row_json(r) for r in rows]}
        _write_text(args.json, _dump(out))
    if not ok:
        sys.stderr.write("some verdicts contradict the expected behaviour\n")
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repeatable", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, depth=5):
        sp.add_argument("--tol", type=float, default=REPEAT_TOL,
                        help="repeatability / CP classification tolerance (default %(default)g)")
        sp.add_argument("--struct-tol", type=float, default=STRUCT_TOL,
                        help="trace-preservation / unitality tolerance (default %(default)g)")
        sp.add_argument("--depth", type=int, default=depth, help="repetition depth (default %(default)s)")
        sp.add_argument("--seed", type=int, default=0, help="seed for random sequences (default %(default)s)")

    sp = sub.add_parser("analyze", help="channel, CP/TP/unital flags and repeatability of a procedure")
    sp.add_argument("spec")
    common(sp)
    sp.add_argument("--json", metavar="PATH", help="write the analysis report as JSON")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("dilate", help="write the 16-level repeatable dilation of a paper-form spec")
    sp.add_argument("spec")
    common(sp)
    sp.add_argument("--out", metavar="PATH", help="dense-form output spec (default stdout)")
    sp.set_defaults(func=cmd_dilate)

    sp = sub.add_parser("repeat", help="apply repeatedly without resetting the environment")
    sp.add_argument("spec")
    common(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--rho-seq", metavar="PATH", help="JSON list of Bloch vectors or density matrices")
    sp.add_argument("--csv", metavar="PATH", help="CSV output (default stdout)")
    sp.set_defaults(func=cmd_repeat)

    sp = sub.add_parser("paper", help="run the two-qubit example grid")
    sp.add_argument("--grid", default="default", help="'default' or a JSON grid file")
    common(sp)
    sp.add_argument("--json", metavar="PATH")
    sp.set_defaults(func=cmd_paper)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "depth", 1) < 1:
        parser.error("--depth must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except SpecError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValidationError as exc:
        sys.stderr.write(f"validation failed: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
